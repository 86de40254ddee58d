#include "wtime/commands.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <ostream>
#include <optional>
#include <set>
#include <sstream>

#include "wtime/error.hpp"
#include "wtime/propagator.hpp"

namespace wtime {

namespace fs = std::filesystem;

const std::vector<std::string>& all_check_names() {
    static const std::vector<std::string> names = {
        "boundary_term", "commutation", "cross_construction", "deficiency",  "domain",
        "hermiticity",   "matrix_hermiticity", "propagator",  "spectrum",    "unitary_equivalence"};
    return names;
}

namespace {

double inf() { return std::numeric_limits<double>::infinity(); }

void add_deficiency(VerificationReport& report, const RunConfig& cfg, const ResolvedConfig& r) {
    const DeficiencyVerdict v = deficiency_index_estimate(r.weight, r.constants, cfg.deficiency_L,
                                                          cfg.nodes_per_unit, cfg.kappa, r.tolerances);
    // threshold / growth over every increment and sign; <= 1 means divergent growth everywhere
    double worst = v.weight_admissible ? 0.0 : inf();
    for (std::size_t k = 0; k < v.thresholds.size(); ++k) {
        for (double g : {v.growth_plus[k], v.growth_minus[k]}) {
            worst = std::max(worst, g > 0.0 ? v.thresholds[k] / g : inf());
        }
    }
    report.details["deficiency"] = to_json(v);
    report.add(make_record("deficiency", worst, 1.0,
                           {{"n_plus", to_string(v.n_plus)}, {"n_minus", to_string(v.n_minus)},
                            {"kappa", cfg.kappa}, {"nodes_per_unit", cfg.nodes_per_unit}}));
}

void add_spectrum(VerificationReport& report, const ResolvedConfig& r) {
    const double L = r.grid.half_width();
    nlohmann::json runs = nlohmann::json::array();
    double mismatch = 0.0;
    double previous_hi = -inf();
    double previous_lo = inf();
    bool strictly_growing = true;
    for (double scale : {0.5, 1.0, 2.0}) {
        const Grid g(scale * L, r.grid.size());
        const SpectrumRecord s = spectrum_H(g);
        mismatch += std::abs(s.lo + g.half_width()) + std::abs(s.hi - g.half_width());
        if (!(s.hi > previous_hi && s.lo < previous_lo)) strictly_growing = false;
        previous_hi = s.hi;
        previous_lo = s.lo;
        runs.push_back({{"L", g.half_width()}, {"lo", s.lo}, {"hi", s.hi}, {"count", s.eigenvalues.size()}});
    }
    report.details["spectrum"] = runs;
    report.add(make_record("spectrum", strictly_growing ? mismatch : inf(), 0.0, {{"runs", runs}}));
}

void add_matrix(VerificationReport& report, const ResolvedConfig& r) {
    try {
        const OperatorMatrix t = build_Tw_matrix(r.weight, r.grid, r.constants, r.order, r.construction);
        report.add(matrix_hermiticity_check(t, default_matrix_tolerance(t, r.tolerances)));
    } catch (const Error& e) {
        if (e.kind() != ErrorKind::DenseCap) throw;
        report.add(make_record("matrix_hermiticity", inf(), 0.0, {{"error", e.what()}}));
    }
    try {
        const OperatorMatrix hm = build_H_matrix(r.weight, r.grid);
        ResidualRecord rec = matrix_hermiticity_check(hm, default_matrix_tolerance(hm, r.tolerances));
        rec.name = "matrix_hermiticity.H";
        report.add(std::move(rec));
    } catch (const Error& e) {
        if (e.kind() != ErrorKind::DenseCap) throw;
        report.add(make_record("matrix_hermiticity.H", inf(), 0.0, {{"error", e.what()}}));
    }
}

void add_propagator(VerificationReport& report, const RunConfig& cfg, const ResolvedConfig& r,
                    const WaveFunction& bump) {
    const double h = r.grid.spacing();
    const long k = std::max(2L, std::lround(cfg.propagator_sigma / h));
    const double sigma = static_cast<double>(k) * h;
    const double sigma1 = static_cast<double>(k / 2) * h;
    const double sigma2 = static_cast<double>(k - k / 2) * h;
    report.add(propagator_unitarity_residual(bump, sigma, r.weight, r.constants, r.tolerances));
    report.add(round_trip_residual(bump, sigma, r.weight, r.constants, r.tolerances));
    report.add(group_property_residual(bump, sigma1, sigma2, r.weight, r.constants, r.tolerances));
    const GeneratorStudy study = generator_consistency(bump, 8.0 * h, 4, r.weight, r.constants, r.order);
    report.add(make_record("propagator.generator_order", std::abs(study.order - 1.0), r.tolerances.generator_order,
                           {{"sigmas", study.sigmas}, {"errors", study.errors}, {"orders", study.orders}}));
}

}  // namespace

VerificationReport run_verification(const RunConfig& cfg, const ResolvedConfig& r) {
    std::set<std::string> enabled;
    if (cfg.checks.empty()) {
        enabled.insert(all_check_names().begin(), all_check_names().end());
    } else {
        for (const auto& name : cfg.checks) {
            if (std::find(all_check_names().begin(), all_check_names().end(), name) == all_check_names().end()) {
                throw Error(ErrorKind::Config, "config field 'checks': unknown check '" + name + "'");
            }
            enabled.insert(name);
        }
    }

    VerificationReport report;
    report.run = to_json(cfg);
    report.run.erase("output_dir");
    report.metadata = {{"timestamp", utc_timestamp()}, {"tool", "wtime"}};

    const double L = r.grid.half_width();
    const double radius = L / 4.0;
    const WaveFunction phi = sample_test_function("smooth_bump", {{"r", radius}}, r.grid);
    const WaveFunction psi = sample_test_function("smooth_bump", {{"r", 0.8 * radius}, {"mu", 0.2 * radius}}, r.grid);
    const auto on = [&](const char* name) { return enabled.count(name) > 0; };

    if (on("hermiticity")) {
        const HermiticityResult pair =
            hermiticity_residual(phi, psi, r.weight, r.constants, r.order, r.construction, r.tolerances);
        report.add(pair.raw);
        report.add(pair.corrected);
        // a phase gives ψ a nonzero expectation value, so the realness ratio is meaningful
        std::vector<cplx> waved(psi.size());
        for (std::size_t i = 0; i < psi.size(); ++i) waved[i] = psi[i] * std::polar(1.0, r.grid.node(i));
        const WaveFunction moving = with_values(psi, std::move(waved), psi.label() + " x exp(iE)");
        const HermiticityResult diag =
            hermiticity_residual(moving, moving, r.weight, r.constants, r.order, r.construction, r.tolerances);
        const double form = std::abs(diag.diagonal_form);
        const double realness = form > 0.0 ? std::abs(diag.diagonal_form.imag()) / form : 0.0;
        const double tol = r.construction == Construction::Conjugated
                               ? 1e-12
                               : r.tolerances.hermiticity_direct_coeff * std::pow(r.grid.spacing(), to_int(r.order));
        report.add(make_record("hermiticity.quadratic_form", realness, tol, diag.raw.context));
    }
    if (on("boundary_term")) {
        const WaveFunction one = sample_test_function("constant_one", {}, r.grid);
        HermiticityResult b = hermiticity_residual(one, one, r.weight, r.constants, r.order, r.construction, r.tolerances);
        b.corrected.name = "boundary_term";
        report.add(b.corrected);
    }
    if (on("unitary_equivalence")) {
        const WaveFunction f = sample_test_function("gaussian", {{"mu", 0.0}, {"s", 1.0}}, r.grid);
        report.add(unitary_equivalence_residual(f, r.weight, r.constants, r.order, r.construction, r.tolerances));
    }
    if (on("commutation")) {
        report.add(commutation_residual(phi, r.weight, r.constants, r.order, r.construction, r.tolerances));
    }
    if (on("cross_construction")) {
        report.add(cross_construction_residual(phi, r.weight, r.constants, r.order, r.tolerances));
    }
    if (on("domain")) {
        const DomainReport core = domain_membership_check(phi, r.weight, r.tolerances.domain);
        const double core_value = core.derivative_in_space
                                      ? std::max(core.edge_decay / r.tolerances.domain.edge,
                                                 core.smoothness_proxy / r.tolerances.domain.smooth)
                                      : inf();
        report.add(make_record("domain.core", core_value, 1.0, {{"input", phi.label()}, {"report", to_json(core)}}));
        const WaveFunction one = sample_test_function("constant_one", {}, r.grid);
        const DomainReport outside = domain_membership_check(one, r.weight, r.tolerances.domain);
        report.add(make_record("domain.constant_one_excluded", outside.in_domain ? 1.0 : 0.0, 0.0,
                               {{"input", one.label()}, {"report", to_json(outside)}}));
    }
    if (on("deficiency")) add_deficiency(report, cfg, r);
    if (on("spectrum")) add_spectrum(report, r);
    if (on("matrix_hermiticity")) add_matrix(report, r);
    if (on("propagator")) add_propagator(report, cfg, r, phi);
    return report;
}

namespace {

fs::path output_dir(const RunConfig& cfg) {
    fs::path dir(cfg.output_dir);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw Error(ErrorKind::Io, "cannot create output directory '" + dir.string() + "': " + ec.message());
    return dir;
}

void write_file(const fs::path& path, const std::string& contents) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorKind::Io, "cannot write '" + path.string() + "'");
    out << contents;
    if (!out) throw Error(ErrorKind::Io, "write failed for '" + path.string() + "'");
}

int exit_code_for(const Error& e) {
    switch (e.kind()) {
        case ErrorKind::Config: return kExitConfig;
        case ErrorKind::Io: return kExitIo;
        default: return kExitCheckFailed;
    }
}

// Config-phase failures are config errors regardless of kind (except I/O).
template <typename Body>
int guarded(std::ostream& log, const RunConfig& cfg, Body body) {
    std::optional<ResolvedConfig> resolved;
    try {
        resolved.emplace(resolve(cfg));
    } catch (const Error& e) {
        log << "error: " << e.what() << '\n';
        return e.kind() == ErrorKind::Io ? kExitIo : kExitConfig;
    }
    try {
        return body(*resolved);
    } catch (const Error& e) {
        log << "error (" << to_string(e.kind()) << "): " << e.what() << '\n';
        return exit_code_for(e);
    } catch (const std::exception& e) {
        log << "error: " << e.what() << '\n';
        return kExitIo;
    }
}

WeightValidationReport validate_for(const ResolvedConfig& r) {
    return validate_weight(r.weight, r.grid);
}

}  // namespace

int cmd_validate(const RunConfig& cfg, std::ostream& log) {
    return guarded(log, cfg, [&](const ResolvedConfig& r) {
        const WeightValidationReport report = validate_for(r);
        nlohmann::json doc = to_json(report);
        doc["weight"] = weight_to_json(r.weight);
        write_file(output_dir(cfg) / "validation_report.json", doc.dump(2) + "\n");
        log << "positivity " << (report.positivity_ok ? "ok" : "FAILED") << ", smoothness "
            << (report.smoothness_ok ? "ok" : "FAILED") << ", bounds " << (report.bounds_ok ? "ok" : "FAILED")
            << '\n';
        return report.all_ok() ? kExitOk : kExitCheckFailed;
    });
}

int cmd_verify(const RunConfig& cfg, std::ostream& log) {
    return guarded(log, cfg, [&](const ResolvedConfig& r) {
        const fs::path dir = output_dir(cfg);
        const WeightValidationReport validation = validate_for(r);
        if (!validation.all_ok() && !cfg.force) {
            nlohmann::json doc = {{"run", to_json(cfg)}, {"validation", to_json(validation)}, {"all_passed", false},
                                  {"error", "weight fails validation; rerun with --force to verify anyway"}};
            doc["run"].erase("output_dir");
            write_file(dir / "verification_report.json", doc.dump(2) + "\n");
            log << "weight '" << r.weight.id << "' fails validation (use --force to override)\n";
            return kExitCheckFailed;
        }
        VerificationReport report = run_verification(cfg, r);
        report.details["validation"] = to_json(validation);
        write_file(dir / "verification_report.json", report.to_json().dump(2) + "\n");
        const std::string table = report.to_text();
        write_file(dir / "verification_report.txt", table);
        log << table;
        return report.all_passed() ? kExitOk : kExitCheckFailed;
    });
}

int cmd_propagate(const RunConfig& cfg, std::ostream& log) {
    return guarded(log, cfg, [&](const ResolvedConfig& r) {
        std::optional<WaveFunction> input;
        if (cfg.input_csv) {
            std::ifstream in(*cfg.input_csv);
            if (!in) throw Error(ErrorKind::Io, "cannot read input '" + *cfg.input_csv + "'");
            input.emplace(read_wavefunction_csv(in, *cfg.input_csv));
        } else {
            input.emplace(test_function_from_json(cfg.test_function, r.grid));
        }
        PropagateOptions options;
        options.allow_interpolation = cfg.interpolate;
        const Propagated out = propagate(*input, cfg.sigma, r.weight, r.constants, options);

        const fs::path dir = output_dir(cfg);
        std::ostringstream before;
        write_wavefunction_csv(before, *input);
        std::ostringstream after;
        write_wavefunction_csv(after, out.psi);
        write_file(dir / "before.csv", before.str());
        write_file(dir / "after.csv", after.str());

        VerificationReport report;
        report.run = to_json(cfg);
        report.run.erase("output_dir");
        report.metadata = {{"timestamp", utc_timestamp()}, {"tool", "wtime"}};
        report.details["step"] = {{"sigma", out.step.sigma},       {"shift_nodes", out.step.shift_nodes},
                                  {"aligned", out.step.aligned},   {"interpolated", out.step.interpolated},
                                  {"support_radius", out.step.support_radius}, {"margin_ok", out.step.margin_ok}};
        report.add(propagator_unitarity_residual(*input, cfg.sigma, r.weight, r.constants, r.tolerances, options));
        if (out.step.aligned) {
            report.add(round_trip_residual(*input, cfg.sigma, r.weight, r.constants, r.tolerances));
        }
        write_file(dir / "propagate_report.json", report.to_json().dump(2) + "\n");
        log << report.to_text();
        return report.all_passed() ? kExitOk : kExitCheckFailed;
    });
}

int cmd_export_matrix(const RunConfig& cfg, std::ostream& log) {
    return guarded(log, cfg, [&](const ResolvedConfig& r) {
        const OperatorMatrix m = build_Tw_matrix(r.weight, r.grid, r.constants, r.order, r.construction);
        const fs::path dir = output_dir(cfg);
        std::ostringstream csv;
        write_matrix_csv(csv, m);
        write_file(dir / "matrix.csv", csv.str());
        write_file(dir / "matrix.json", matrix_metadata(m).dump(2) + "\n");
        log << "wrote " << (dir / "matrix.csv").string() << " (" << m.dim() << "x" << m.dim() << ")\n";
        return kExitOk;
    });
}

}  // namespace wtime
