// Acceptance suite: one line per criterion, nonzero exit if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "wtime/error.hpp"
#include "wtime/propagator.hpp"
#include "wtime/verification.hpp"

using namespace wtime;

namespace {

const PhysicalConstants kUnit{1.0};
constexpr double kL = 20.0;
constexpr std::size_t kN = 4097;

const std::vector<std::string> kAdmissible{"flat", "shifted_gaussian", "sinusoidal"};
const StencilOrder kOrders[] = {StencilOrder::Second, StencilOrder::Fourth};

struct Outcome {
    bool passed = true;
    std::ostringstream detail;

    void require(bool ok, const std::string& what) {
        if (!ok) {
            passed = false;
            detail << " [" << what << "]";
        }
    }
};

WaveFunction bump(std::size_t N, double r, double mu = 0.0) {
    return sample_test_function("smooth_bump", {{"r", r}, {"mu", mu}}, Grid(kL, N));
}

double max_diff(const WaveFunction& a, const WaveFunction& b, std::size_t lo, std::size_t hi) {
    double m = 0.0;
    for (std::size_t i = lo; i < hi; ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

std::string fmt(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", x);
    return buf;
}

void flat_reduction(Outcome& out) {
    const Grid g(kL, kN);
    double worst = 0.0;
    for (const WaveFunction& psi : {sample_test_function("gaussian", {{"mu", 0.3}}, g), bump(kN, 5.0)}) {
        for (StencilOrder order : kOrders) {
            const WaveFunction t0 = apply_T0(psi, kUnit, order);
            for (Construction k : {Construction::Conjugated, Construction::Direct}) {
                const WaveFunction tw = apply_Tw(psi, make_builtin_weight("flat", {}), kUnit, order, k);
                worst = std::max(worst, max_diff(tw, t0, 0, g.size()) / t0.max_abs());
            }
        }
    }
    out.detail << "max relative difference " << fmt(worst);
    out.require(worst <= 1e-15, "exceeds 1e-15");
}

void symmetry(Outcome& out) {
    double worst_conj = 0.0;
    for (const auto& name : kAdmissible) {
        const Weight w = make_builtin_weight(name, {});
        for (StencilOrder order : kOrders) {
            const auto c = hermiticity_residual(bump(kN, 5.0), bump(kN, 4.0, 1.0), w, kUnit, order,
                                                Construction::Conjugated);
            worst_conj = std::max(worst_conj, c.raw.value);
            out.require(c.raw.value <= 1e-10, name + " conjugated raw");
            double raw[2];
            int k = 0;
            for (std::size_t N : {1025u, 2049u}) {
                const auto d = hermiticity_residual(bump(N, 5.0), bump(N, 4.0, 1.0), w, kUnit, order,
                                                    Construction::Direct);
                out.require(d.raw.passed, name + " direct raw above C h^p at N=" + std::to_string(N));
                raw[k++] = d.raw.value;
            }
            if (name == "flat") {
                out.require(raw[0] <= 1e-10 && raw[1] <= 1e-10, "flat direct raw");
                continue;
            }
            const double p = observed_order(raw[0], raw[1]);
            out.detail << " " << name << "/" << to_int(order) << ":p=" << fmt(p);
            out.require(std::abs(p - to_int(order)) <= 0.5, name + " direct order");
        }
    }
    out.detail << " conjugated max " << fmt(worst_conj);
}

void boundary_term(Outcome& out) {
    // even weights make w(L) - w(-L) vanish, which would make the comparison vacuous
    const Weight w = make_builtin_weight("sinusoidal", {});
    const WaveFunction one = sample_test_function("constant_one", {}, Grid(kL, kN));
    for (StencilOrder order : kOrders) {
        for (Construction k : {Construction::Conjugated, Construction::Direct}) {
            const auto r = hermiticity_residual(one, one, w, kUnit, order, k);
            const double rel = std::abs(r.difference - r.boundary_term) / std::abs(r.boundary_term);
            out.detail << " " << to_string(k) << "/" << to_int(order) << ":" << fmt(rel);
            out.require(std::abs(r.boundary_term) > 1.0, "boundary term unexpectedly small");
            out.require(rel <= 0.1, "mismatch above 10%");
        }
    }
}

void unitary_equivalence(Outcome& out) {
    for (const auto& name : {"shifted_gaussian", "sinusoidal"}) {
        const Weight w = make_builtin_weight(name, {});
        for (StencilOrder order : kOrders) {
            double res[2];
            int k = 0;
            for (std::size_t N : {1025u, 2049u}) {
                const WaveFunction f = sample_test_function("gaussian", {}, Grid(kL, N));
                res[k++] = unitary_equivalence_residual(f, w, kUnit, order).value;
            }
            const double p = observed_order(res[0], res[1]);
            out.detail << " " << name << "/" << to_int(order) << ":p=" << fmt(p);
            out.require(std::abs(p - to_int(order)) <= 0.5, std::string(name) + " direct order");
            for (std::size_t N : {1025u, 2049u, 4097u}) {
                const WaveFunction f = sample_test_function("gaussian", {}, Grid(kL, N));
                const double c = unitary_equivalence_residual(f, w, kUnit, order, Construction::Conjugated).value;
                out.require(c <= 1e-13, std::string(name) + " conjugated " + fmt(c));
            }
        }
    }
}

void canonical_conjugacy(Outcome& out) {
    const Weight flat = make_builtin_weight("flat", {});
    for (const auto& name : kAdmissible) {
        const Weight w = make_builtin_weight(name, {});
        double res[2];
        int k = 0;
        for (std::size_t N : {kN, 2 * kN - 1}) {
            res[k++] = commutation_residual(bump(N, 5.0), w, kUnit, StencilOrder::Second, Construction::Conjugated)
                           .value;
        }
        out.detail << " " << name << ":" << fmt(res[0]) << "/x" << fmt(res[0] / res[1]);
        out.require(res[0] <= 5e-4, name + " residual");
        out.require(std::abs(observed_order(res[0], res[1]) - 2.0) <= 0.5, name + " shrink");
        if (name == "flat") continue;
        double diff[2];
        k = 0;
        for (std::size_t N : {kN, 2 * kN - 1}) {
            const WaveFunction psi = bump(N, 5.0);
            const auto [lo, hi] = interior_range(N, StencilOrder::Second);
            diff[k++] = max_diff(commutator_TH(psi, w, kUnit, StencilOrder::Second),
                                 commutator_TH(psi, flat, kUnit, StencilOrder::Second), lo, hi);
        }
        out.require(std::abs(observed_order(diff[0], diff[1]) - 2.0) <= 0.5, name + " weight dependence");
    }
}

void self_adjointness(Outcome& out) {
    const std::vector<double> Ls{10.0, 20.0, 30.0};
    for (const auto& name : kAdmissible) {
        const DeficiencyVerdict v = deficiency_index_estimate(make_builtin_weight(name, {}), kUnit, Ls);
        out.detail << " " << name << ":(" << to_string(v.n_plus) << "," << to_string(v.n_minus) << ")";
        out.require(v.essentially_self_adjoint(), name + " indices");
        if (name != "flat") continue;
        double worst = 0.0;
        for (std::size_t i = 0; i < Ls.size(); ++i) {
            const double ln_exact = std::log(std::sinh(2.0 * Ls[i]));
            worst = std::max(worst, std::abs(std::expm1(v.log_norm_sq_plus[i] - ln_exact)));
            worst = std::max(worst, std::abs(std::expm1(v.log_norm_sq_minus[i] - ln_exact)));
        }
        out.detail << " sinh rel " << fmt(worst);
        out.require(worst <= 1e-8, "flat norms vs sinh(2L)");
    }
}

void spectrum(Outcome& out) {
    double prev = 0.0;
    for (double L : {10.0, 20.0, 40.0}) {
        const SpectrumRecord s = spectrum_H(Grid(L, kN));
        out.require(s.lo == -L && s.hi == L, "range at L=" + fmt(L));
        out.require(s.hi - s.lo > prev, "not growing at L=" + fmt(L));
        prev = s.hi - s.lo;
    }
    out.detail << "range [-L, L] for L in {10, 20, 40}";
}

void propagator(Outcome& out) {
    // h = 0.01 so the shifts below are aligned
    const WaveFunction b = sample_test_function("smooth_bump", {{"r", 5.0}}, Grid(kL, 4001));
    double unit = 0.0;
    double group = 0.0;
    for (const auto& name : kAdmissible) {
        const Weight w = make_builtin_weight(name, {});
        for (double sigma : {-5.0, -2.5, -1.0, 1.0, 2.5, 5.0}) {
            unit = std::max(unit, propagator_unitarity_residual(b, sigma, w, kUnit).value);
            group = std::max(group, group_property_residual(b, sigma / 2, sigma / 2, w, kUnit).value);
            group = std::max(group, group_property_residual(b, sigma, -2.0, w, kUnit).value);
        }
    }
    out.require(unit <= 1e-10, "unitarity");
    out.require(group <= 1e-12, "group law");
    const WaveFunction fine = bump(kN, 5.0);
    const GeneratorStudy s = generator_consistency(fine, 16.0 * fine.grid().spacing(), 4,
                                                   make_builtin_weight("shifted_gaussian", {}), kUnit,
                                                   StencilOrder::Fourth);
    out.detail << "unitarity " << fmt(unit) << " group " << fmt(group) << " generator order " << fmt(s.order);
    out.require(std::abs(s.order - 1.0) <= 0.3, "generator order");
}

void cross_construction(Outcome& out) {
    for (const auto& name : {"shifted_gaussian", "sinusoidal"}) {
        const Weight w = make_builtin_weight(name, {});
        for (StencilOrder order : kOrders) {
            double res[2];
            int k = 0;
            for (std::size_t N : {2049u, 4097u}) {
                const auto r = cross_construction_residual(bump(N, 5.0), w, kUnit, order);
                out.require(r.passed, std::string(name) + " above tolerance");
                res[k++] = r.value;
            }
            const double p = observed_order(res[0], res[1]);
            out.detail << " " << name << "/" << to_int(order) << ":p=" << fmt(p);
            out.require(std::abs(p - to_int(order)) <= 0.5, std::string(name) + " order");
        }
    }
}

void validator(Outcome& out) {
    const Grid g(kL, kN);
    for (const auto& name : kAdmissible) {
        const auto r = validate_weight(make_builtin_weight(name, {}), g);
        out.require(r.all_ok(), name + " rejected");
    }
    out.require(validate_weight(make_builtin_weight("sinusoidal", {{"c", 2.0}, {"a", 1.0}}), g).all_ok(),
                "sinusoidal(2,1) rejected");
    const auto gv = validate_weight(make_builtin_weight("gaussian_violating", {}), g);
    out.require(!gv.all_ok() && !gv.bounds_ok, "gaussian_violating not rejected on bounds");
    Weight dips{"dips", [](double E) { return std::cos(E); }, [](double E) { return -std::sin(E); }, {}};
    const auto d = validate_weight(dips, g);
    out.require(!d.all_ok() && !d.positivity_ok, "non-positive weight not rejected on positivity");
    out.detail << "3 accepted, gaussian_violating and cos rejected";
}

}  // namespace

int main() {
    using Check = std::pair<const char*, std::function<void(Outcome&)>>;
    const std::vector<Check> criteria{
        {"flat-weight reduction", flat_reduction},
        {"symmetry on smooth bumps", symmetry},
        {"boundary-term accounting", boundary_term},
        {"unitary equivalence", unitary_equivalence},
        {"canonical conjugacy", canonical_conjugacy},
        {"essential self-adjointness witness", self_adjointness},
        {"spectrum unboundedness", spectrum},
        {"propagator unitarity and group law", propagator},
        {"cross-construction agreement", cross_construction},
        {"validator discrimination", validator},
    };
    int failed = 0;
    const auto start = std::chrono::steady_clock::now();
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Outcome out;
        try {
            criteria[i].second(out);
        } catch (const std::exception& e) {
            out.passed = false;
            out.detail << " exception: " << e.what();
        }
        if (!out.passed) ++failed;
        std::printf("%s  %2zu  %-36s %s\n", out.passed ? "PASS" : "FAIL", i + 1, criteria[i].first,
                    out.detail.str().c_str());
        std::fflush(stdout);
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("%d/%zu criteria passed in %.1f s\n", static_cast<int>(criteria.size()) - failed, criteria.size(),
                secs);
    return failed == 0 ? 0 : 1;
}
