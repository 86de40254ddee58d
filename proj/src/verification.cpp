#include "wtime/verification.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "wtime/error.hpp"

namespace wtime {

namespace {

nlohmann::json finite_or_string(double x) {
    if (std::isfinite(x)) return x;
    return std::isnan(x) ? "nan" : (x > 0 ? "inf" : "-inf");
}

nlohmann::json grid_json(const Grid& g) {
    return {{"L", g.half_width()}, {"N", g.size()}, {"h", g.spacing()}};
}

nlohmann::json base_context(const WaveFunction& psi, const Weight& w, const PhysicalConstants& c,
                            StencilOrder order, Construction construction) {
    return {{"grid", grid_json(psi.grid())},  {"weight", weight_to_json(w)},
            {"hbar", c.hbar},                 {"order", to_int(order)},
            {"construction", to_string(construction)}, {"input", psi.label()}};
}

double resolution_factor(const Grid& g, StencilOrder order) {
    return std::pow(g.spacing(), to_int(order));
}

// sqrt(Σ_{interior} q_i g_i |v_i|²)
double interior_norm(const std::vector<cplx>& v, const std::vector<double>& node_metric, const Grid& grid,
                     StencilOrder order) {
    const QuadratureRule rule = make_trapezoid(grid);
    const auto [lo, hi] = interior_range(grid.size(), order);
    double acc = 0.0;
    for (std::size_t i = lo; i < hi; ++i) acc += rule.node_weights[i] * node_metric[i] * std::norm(v[i]);
    return std::sqrt(acc);
}

}  // namespace

ResidualRecord make_record(std::string name, double value, double tolerance, nlohmann::json context) {
    ResidualRecord r;
    r.name = std::move(name);
    r.value = value;
    r.tolerance = tolerance;
    r.passed = value <= tolerance;
    r.context = std::move(context);
    return r;
}

nlohmann::json to_json(const ResidualRecord& r) {
    return {{"name", r.name},
            {"value", finite_or_string(r.value)},
            {"tolerance", finite_or_string(r.tolerance)},
            {"passed", r.passed},
            {"context", r.context}};
}

nlohmann::json to_json(const VerificationTolerances& t) {
    return {
        {"hermiticity_conjugated", t.hermiticity_conjugated},
        {"hermiticity_direct_coeff", t.hermiticity_direct_coeff},
        {"boundary_relative", t.boundary_relative},
        {"unitary_conjugated", t.unitary_conjugated},
        {"unitary_direct_coeff", t.unitary_direct_coeff},
        {"commutation", t.commutation},
        {"cross_construction_coeff", t.cross_construction_coeff},
        {"matrix_conjugated", t.matrix_conjugated},
        {"matrix_direct_coeff", t.matrix_direct_coeff},
        {"propagator_unitarity", t.propagator_unitarity},
        {"propagator_unaligned", t.propagator_unaligned},
        {"group_law", t.group_law},
        {"round_trip", t.round_trip},
        {"generator_order", t.generator_order},
        {"divergence_fraction", t.divergence_fraction},
        {"saturation", t.saturation},
        {"domain_edge", t.domain.edge},
        {"domain_smooth", t.domain.smooth},
    };
}

void apply_overrides(VerificationTolerances& t, const nlohmann::json& overrides) {
    if (!overrides.is_object()) throw Error(ErrorKind::Config, "tolerances must be an object");
    const std::pair<const char*, double*> fields[] = {
        {"hermiticity_conjugated", &t.hermiticity_conjugated},
        {"hermiticity_direct_coeff", &t.hermiticity_direct_coeff},
        {"boundary_relative", &t.boundary_relative},
        {"unitary_conjugated", &t.unitary_conjugated},
        {"unitary_direct_coeff", &t.unitary_direct_coeff},
        {"commutation", &t.commutation},
        {"cross_construction_coeff", &t.cross_construction_coeff},
        {"matrix_conjugated", &t.matrix_conjugated},
        {"matrix_direct_coeff", &t.matrix_direct_coeff},
        {"propagator_unitarity", &t.propagator_unitarity},
        {"propagator_unaligned", &t.propagator_unaligned},
        {"group_law", &t.group_law},
        {"round_trip", &t.round_trip},
        {"generator_order", &t.generator_order},
        {"divergence_fraction", &t.divergence_fraction},
        {"saturation", &t.saturation},
        {"domain_edge", &t.domain.edge},
        {"domain_smooth", &t.domain.smooth},
    };
    for (const auto& [key, value] : overrides.items()) {
        auto it = std::find_if(std::begin(fields), std::end(fields),
                               [&](const auto& f) { return key == f.first; });
        if (it == std::end(fields)) throw Error(ErrorKind::Config, "tolerances: unknown key '" + key + "'");
        if (!value.is_number() || value.get<double>() < 0.0) {
            throw Error(ErrorKind::Config, "tolerances." + key + " must be a non-negative number");
        }
        *it->second = value.get<double>();
    }
}

HermiticityResult hermiticity_residual(const WaveFunction& phi, const WaveFunction& psi, const Weight& w,
                                       const PhysicalConstants& c, StencilOrder order,
                                       Construction construction, const VerificationTolerances& tol) {
    if (!(phi.grid() == psi.grid())) {
        throw Error(ErrorKind::GridMismatch, "hermiticity: φ and ψ live on different grids");
    }
    const Grid& grid = psi.grid();
    const NodeWeights nw = sample_weight(w, grid);
    const QuadratureRule rule = make_trapezoid(grid);
    const WaveFunction t_phi = apply_Tw(phi, nw, c, order, construction);
    const WaveFunction t_psi = apply_Tw(psi, nw, c, order, construction);

    HermiticityResult out;
    out.difference = weighted_sum(phi, t_psi, nw.w, rule) - weighted_sum(t_phi, psi, nw.w, rule);
    out.diagonal_form = weighted_sum(psi, t_psi, nw.w, rule);
    const std::size_t last = grid.size() - 1;
    out.boundary_term = cplx{0.0, c.hbar} * (std::conj(phi[last]) * psi[last] * nw.w[last] -
                                             std::conj(phi[0]) * psi[0] * nw.w[0]);

    const double norms = std::sqrt(weighted_sum(phi, phi, nw.w, rule).real()) *
                         std::sqrt(weighted_sum(psi, psi, nw.w, rule).real());
    const double raw_tol = construction == Construction::Conjugated
                               ? tol.hermiticity_conjugated * norms
                               : tol.hermiticity_direct_coeff * resolution_factor(grid, order) * norms;

    nlohmann::json ctx = base_context(psi, w, c, order, construction);
    ctx["phi"] = phi.label();
    ctx["norm_product"] = norms;
    ctx["boundary_term"] = {{"re", out.boundary_term.real()}, {"im", out.boundary_term.imag()}};
    ctx["difference"] = {{"re", out.difference.real()}, {"im", out.difference.imag()}};

    out.raw = make_record("hermiticity.raw", std::abs(out.difference), raw_tol, ctx);
    const double corrected_tol = std::max(raw_tol, tol.boundary_relative * std::abs(out.boundary_term));
    out.corrected =
        make_record("hermiticity.corrected", std::abs(out.difference - out.boundary_term), corrected_tol, ctx);
    return out;
}

ResidualRecord unitary_equivalence_residual(const WaveFunction& f, const Weight& w, const PhysicalConstants& c,
                                            StencilOrder order, Construction construction,
                                            const VerificationTolerances& tol) {
    require_interior_supported(f, order);
    const NodeWeights nw = sample_weight(w, f.grid());
    const WaveFunction pulled = apply_Uw(f, w, Direction::Inverse);
    const WaveFunction mapped = apply_Uw(apply_Tw(pulled, nw, c, order, construction), w, Direction::Forward);
    const WaveFunction flat = apply_T0(f, c, order);
    std::vector<cplx> diff(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) diff[i] = mapped[i] - flat[i];
    const std::vector<double> ones(f.size(), 1.0);
    const double value = interior_norm(diff, ones, f.grid(), order);
    const double f_norm = norm_flat(f, make_trapezoid(f.grid()));
    const double tolerance = construction == Construction::Conjugated
                                 ? tol.unitary_conjugated
                                 : tol.unitary_direct_coeff * resolution_factor(f.grid(), order) * f_norm;
    nlohmann::json ctx = base_context(f, w, c, order, construction);
    ctx["flat_norm_f"] = f_norm;
    return make_record("unitary_equivalence", value, tolerance, ctx);
}

ResidualRecord commutation_residual(const WaveFunction& psi, const Weight& w, const PhysicalConstants& c,
                                    StencilOrder order, Construction construction,
                                    const VerificationTolerances& tol) {
    const WaveFunction comm = commutator_TH(psi, w, c, order, construction);
    const NodeWeights nw = sample_weight(w, psi.grid());
    const cplx ih{0.0, c.hbar};
    std::vector<cplx> diff(psi.size());
    for (std::size_t i = 0; i < psi.size(); ++i) diff[i] = comm[i] - ih * psi[i];
    const double numerator = interior_norm(diff, nw.w, psi.grid(), order);
    const double denominator = norm_w(psi, w, make_trapezoid(psi.grid()));
    const double value = denominator > 0.0 ? numerator / denominator : std::numeric_limits<double>::infinity();
    return make_record("commutation", value, tol.commutation, base_context(psi, w, c, order, construction));
}

ResidualRecord cross_construction_residual(const WaveFunction& psi, const Weight& w, const PhysicalConstants& c,
                                           StencilOrder order, const VerificationTolerances& tol) {
    require_interior_supported(psi, order);
    const NodeWeights nw = sample_weight(w, psi.grid());
    const WaveFunction direct = apply_Tw(psi, nw, c, order, Construction::Direct);
    const WaveFunction conjugated = apply_Tw(psi, nw, c, order, Construction::Conjugated);
    const auto [lo, hi] = interior_range(psi.size(), order);
    double diff = 0.0;
    double scale = 0.0;
    for (std::size_t i = lo; i < hi; ++i) {
        diff = std::max(diff, std::abs(direct[i] - conjugated[i]));
        scale = std::max(scale, std::abs(conjugated[i]));
    }
    const double value = scale > 0.0 ? diff / scale : diff;
    nlohmann::json ctx = base_context(psi, w, c, order, Construction::Direct);
    ctx["construction"] = "direct vs conjugated";
    ctx["max_abs_difference"] = diff;
    return make_record("cross_construction", value,
                       tol.cross_construction_coeff * resolution_factor(psi.grid(), order), ctx);
}

DomainReport domain_membership_check(const WaveFunction& psi, const Weight& w, const DomainTolerances& tol) {
    DomainReport r;
    const Grid& g = psi.grid();
    const std::size_t n = g.size();
    std::vector<double> wv(n);
    bool weight_ok = true;
    for (std::size_t i = 0; i < n; ++i) {
        wv[i] = w(g.node(i));
        if (!(wv[i] > 0.0) || !std::isfinite(wv[i])) weight_ok = false;
    }
    const auto strip = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(0.01 * static_cast<double>(n))));
    if (weight_ok) {
        for (std::size_t k = 0; k < std::min(strip, n); ++k) {
            r.edge_decay = std::max({r.edge_decay, std::sqrt(wv[k]) * std::abs(psi[k]),
                                     std::sqrt(wv[n - 1 - k]) * std::abs(psi[n - 1 - k])});
        }
        const std::vector<cplx> d = differentiate(psi.values(), g.spacing(), StencilOrder::Second);
        const QuadratureRule rule = make_trapezoid(g);
        double acc = 0.0;
        for (std::size_t i = 0; i < n; ++i) acc += rule.node_weights[i] * wv[i] * std::norm(d[i]);
        r.derivative_norm = std::sqrt(acc);
    } else {
        r.edge_decay = std::numeric_limits<double>::infinity();
        r.derivative_norm = std::numeric_limits<double>::infinity();
    }
    r.derivative_in_space = std::isfinite(r.derivative_norm);
    const double h2 = g.spacing() * g.spacing();
    for (std::size_t i = 1; i + 1 < n; ++i) {
        r.smoothness_proxy = std::max(r.smoothness_proxy, std::abs(psi[i + 1] - 2.0 * psi[i] + psi[i - 1]) / h2);
    }
    r.in_domain = r.edge_decay <= tol.edge && r.derivative_in_space && r.smoothness_proxy <= tol.smooth;
    return r;
}

nlohmann::json to_json(const DomainReport& r) {
    return {{"edge_decay", finite_or_string(r.edge_decay)},
            {"derivative_norm", finite_or_string(r.derivative_norm)},
            {"derivative_in_space", r.derivative_in_space},
            {"smoothness_proxy", finite_or_string(r.smoothness_proxy)},
            {"in_domain", r.in_domain}};
}

namespace {

double checked_log_weight(const Weight& w, double E) {
    const double value = w(E);
    if (!(value > 0.0) || !std::isfinite(value)) {
        throw Error(ErrorKind::InvalidWeight, "deficiency: weight '" + w.id + "' is not positive at E = " +
                                                  std::to_string(E));
    }
    return std::log(value);
}

double sign_of(DeficiencySign s) { return s == DeficiencySign::Plus ? 1.0 : -1.0; }

}  // namespace

DeficiencySolution deficiency_solution(DeficiencySign sign, const Weight& w, const PhysicalConstants& c,
                                       const Grid& grid, double kappa) {
    check_constants(c);
    constexpr double kMaxExponent = 700.0;
    std::vector<cplx> values(grid.size());
    bool overflow = false;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double E = grid.node(i);
        double exponent = -0.5 * checked_log_weight(w, E) + sign_of(sign) * kappa * E / c.hbar;
        if (exponent > kMaxExponent) {
            exponent = kMaxExponent;
            overflow = true;
        }
        values[i] = std::exp(exponent);
    }
    const std::string label = std::string("deficiency ") + (sign == DeficiencySign::Plus ? "+" : "-");
    return {WaveFunction(grid, std::move(values), label), overflow};
}

double deficiency_log_norm_sq(DeficiencySign sign, const Weight& w, const PhysicalConstants& c, const Grid& grid,
                              double kappa) {
    check_constants(c);
    const QuadratureRule rule = make_trapezoid(grid);
    std::vector<double> terms(grid.size());
    double peak = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double E = grid.node(i);
        const double lw = checked_log_weight(w, E);
        const double log_amp = -0.5 * lw + sign_of(sign) * kappa * E / c.hbar;
        terms[i] = std::log(rule.node_weights[i]) + lw + 2.0 * log_amp;
        peak = std::max(peak, terms[i]);
    }
    double acc = 0.0;
    for (double t : terms) acc += std::exp(t - peak);
    return peak + std::log(acc);
}

const char* to_string(IndexVerdict v) {
    switch (v) {
        case IndexVerdict::Zero: return "0";
        case IndexVerdict::AtLeastOne: return ">=1";
        case IndexVerdict::Inconclusive: return "inconclusive";
    }
    return "inconclusive";
}

DeficiencyVerdict deficiency_index_estimate(const Weight& w, const PhysicalConstants& c,
                                            const std::vector<double>& L_list, double nodes_per_unit,
                                            double kappa, const VerificationTolerances& tol) {
    check_constants(c);
    if (L_list.size() < 3) throw Error(ErrorKind::InvalidArgument, "deficiency: L_list needs at least 3 entries");
    for (std::size_t k = 0; k < L_list.size(); ++k) {
        if (!(L_list[k] > 0.0) || (k > 0 && !(L_list[k] > L_list[k - 1]))) {
            throw Error(ErrorKind::InvalidArgument, "deficiency: L_list must be positive and strictly increasing");
        }
    }
    if (!(nodes_per_unit > 0.0) || !(kappa > 0.0)) {
        throw Error(ErrorKind::InvalidArgument, "deficiency: nodes_per_unit and kappa must be positive");
    }

    DeficiencyVerdict v;
    v.L_values = L_list;
    const double L_max = L_list.back();
    const Grid probe(L_max, 2 * static_cast<std::size_t>(std::ceil(64.0 * L_max)) + 1);
    v.weight_admissible = validate_weight(w, probe).all_ok();
    if (!v.weight_admissible) return v;

    for (double L : L_list) {
        const Grid grid(L, 2 * static_cast<std::size_t>(std::ceil(nodes_per_unit * L)) + 1);
        v.nodes.push_back(grid.size());
        v.log_norm_sq_plus.push_back(deficiency_log_norm_sq(DeficiencySign::Plus, w, c, grid, kappa));
        v.log_norm_sq_minus.push_back(deficiency_log_norm_sq(DeficiencySign::Minus, w, c, grid, kappa));
    }
    for (std::size_t k = 0; k + 1 < L_list.size(); ++k) {
        v.growth_plus.push_back(v.log_norm_sq_plus[k + 1] - v.log_norm_sq_plus[k]);
        v.growth_minus.push_back(v.log_norm_sq_minus[k + 1] - v.log_norm_sq_minus[k]);
        v.thresholds.push_back(tol.divergence_fraction * 2.0 * kappa * (L_list[k + 1] - L_list[k]) / c.hbar);
    }
    auto classify = [&](const std::vector<double>& growth) {
        bool diverges = true;
        bool saturates = true;
        for (std::size_t k = 0; k < growth.size(); ++k) {
            if (!(growth[k] >= v.thresholds[k])) diverges = false;
            if (!(std::expm1(growth[k]) < tol.saturation)) saturates = false;
        }
        if (diverges) return IndexVerdict::Zero;
        if (saturates) return IndexVerdict::AtLeastOne;
        return IndexVerdict::Inconclusive;
    };
    v.n_plus = classify(v.growth_plus);
    v.n_minus = classify(v.growth_minus);
    return v;
}

nlohmann::json to_json(const DeficiencyVerdict& v) {
    return {{"n_plus", to_string(v.n_plus)},
            {"n_minus", to_string(v.n_minus)},
            {"weight_admissible", v.weight_admissible},
            {"L", v.L_values},
            {"nodes", v.nodes},
            {"log_norm_sq_plus", v.log_norm_sq_plus},
            {"log_norm_sq_minus", v.log_norm_sq_minus},
            {"growth_plus", v.growth_plus},
            {"growth_minus", v.growth_minus},
            {"thresholds", v.thresholds}};
}

SpectrumRecord spectrum_H(const Grid& grid) {
    SpectrumRecord s;
    s.eigenvalues = grid.nodes();
    s.lo = s.eigenvalues.front();
    s.hi = s.eigenvalues.back();
    return s;
}

ResidualRecord matrix_hermiticity_check(const OperatorMatrix& m, double tolerance) {
    const std::size_t n = m.dim();
    if (m.metric.size() != n) throw Error(ErrorKind::InvalidArgument, "matrix hermiticity: metric not populated");
    for (double g : m.metric) {
        if (!(g > 0.0)) throw Error(ErrorKind::InvalidArgument, "matrix hermiticity: zero or negative metric entry");
    }
    const auto& M = m.entries;
    double scale = 0.0;
    for (Eigen::Index j = 0; j < M.cols(); ++j) {
        for (Eigen::Index i = 0; i < M.rows(); ++i) {
            scale = std::max(scale, m.metric[static_cast<std::size_t>(i)] * std::abs(M(i, j)));
        }
    }
    const auto [lo, hi] = interior_range(n, m.order);
    double worst = 0.0;
    for (std::size_t j = lo; j < hi; ++j) {
        for (std::size_t i = lo; i < hi; ++i) {
            const auto ii = static_cast<Eigen::Index>(i);
            const auto jj = static_cast<Eigen::Index>(j);
            const cplx defect = m.metric[i] * M(ii, jj) - std::conj(M(jj, ii)) * m.metric[j];
            worst = std::max(worst, std::abs(defect));
        }
    }
    const double value = scale > 0.0 ? worst / scale : worst;
    nlohmann::json ctx = {{"operator", m.name},
                          {"weight", m.weight_id},
                          {"grid", grid_json(m.grid)},
                          {"order", to_int(m.order)},
                          {"construction", to_string(m.construction)},
                          {"scale", scale}};
    return make_record("matrix_hermiticity", value, tolerance, ctx);
}

double default_matrix_tolerance(const OperatorMatrix& m, const VerificationTolerances& tol) {
    if (m.name == "T_w" && m.construction == Construction::Direct) {
        return tol.matrix_direct_coeff * m.grid.spacing();
    }
    return tol.matrix_conjugated;
}

double observed_order(double coarse, double fine) { return std::log2(coarse / fine); }

}  // namespace wtime
