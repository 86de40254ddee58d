#include "wtime/propagator.hpp"

#include <cmath>
#include <sstream>

#include "wtime/error.hpp"

namespace wtime {

double support_radius(const WaveFunction& psi, double support_tol) {
    if (psi.support()) return std::max(std::abs(psi.support()->lo), std::abs(psi.support()->hi));
    const double cutoff = support_tol * psi.max_abs();
    double radius = 0.0;
    for (std::size_t i = 0; i < psi.size(); ++i) {
        if (std::abs(psi[i]) > cutoff) radius = std::max(radius, std::abs(psi.grid().node(i)));
    }
    return radius;
}

namespace {

// 4-point Lagrange interpolation at x (in node units); zero beyond the grid.
cplx cubic_lookup(const std::vector<cplx>& v, double x) {
    const auto n = static_cast<long>(v.size());
    const long j = static_cast<long>(std::floor(x));
    const double t = x - static_cast<double>(j);
    const double weights[4] = {-t * (t - 1.0) * (t - 2.0) / 6.0, (t + 1.0) * (t - 1.0) * (t - 2.0) / 2.0,
                               -(t + 1.0) * t * (t - 2.0) / 2.0, (t + 1.0) * t * (t - 1.0) / 6.0};
    cplx acc{0.0, 0.0};
    for (int k = 0; k < 4; ++k) {
        const long idx = j - 1 + k;
        if (idx >= 0 && idx < n) acc += weights[k] * v[static_cast<std::size_t>(idx)];
    }
    return acc;
}

}  // namespace

Propagated propagate(const WaveFunction& psi, double sigma, const Weight& w, const PhysicalConstants& c,
                     const PropagateOptions& options) {
    check_constants(c);
    if (!std::isfinite(sigma)) throw Error(ErrorKind::InvalidArgument, "propagate: sigma must be finite");
    const Grid& g = psi.grid();
    const double h = g.spacing();

    PropagationStep step;
    step.sigma = sigma;
    const double nodes_shift = sigma / h;
    step.shift_nodes = std::lround(nodes_shift);
    step.aligned = std::abs(nodes_shift - static_cast<double>(step.shift_nodes)) <= 1e-9 * std::max(1.0, std::abs(nodes_shift));
    step.support_radius = support_radius(psi, options.support_tol);
    step.margin_ok = std::abs(sigma) < g.half_width() - step.support_radius;
    if (!step.margin_ok) {
        std::ostringstream msg;
        msg << "propagate: margin violation, |sigma| = " << std::abs(sigma) << " but L - support radius = "
            << g.half_width() - step.support_radius;
        throw Error(ErrorKind::MarginViolation, msg.str());
    }
    if (!step.aligned && !options.allow_interpolation) {
        std::ostringstream msg;
        msg << "propagate: sigma = " << sigma << " is not a multiple of h = " << h
            << " and interpolation is disabled";
        throw Error(ErrorKind::Unaligned, msg.str());
    }

    const NodeWeights nw = sample_weight(w, g);
    const auto n = static_cast<long>(g.size());
    std::vector<cplx> out(g.size(), cplx{0.0, 0.0});
    if (step.aligned) {
        const long k = step.shift_nodes;
        for (long i = 0; i < n; ++i) {
            const long src = i + k;
            if (src < 0 || src >= n) continue;  // outside the support by the margin check
            const auto si = static_cast<std::size_t>(src);
            const auto ii = static_cast<std::size_t>(i);
            out[ii] = std::sqrt(nw.w[si] / nw.w[ii]) * psi[si];
        }
    } else {
        step.interpolated = true;
        for (long i = 0; i < n; ++i) {
            const auto ii = static_cast<std::size_t>(i);
            const double target = g.node(ii) + sigma;
            if (std::abs(target) > g.half_width()) continue;
            const double wt = w(target);
            if (!(wt > 0.0) || !std::isfinite(wt)) {
                throw Error(ErrorKind::InvalidWeight, "propagate: weight not positive at shifted node");
            }
            out[ii] = std::sqrt(wt / nw.w[ii]) * cubic_lookup(psi.values(), static_cast<double>(i) + nodes_shift);
        }
    }

    std::optional<Support> support;
    if (psi.support()) support = Support{psi.support()->lo - sigma, psi.support()->hi - sigma};
    std::ostringstream label;
    label << psi.label() << " |P(" << sigma << ")" << (step.interpolated ? " [interpolated]" : "");
    return {WaveFunction(g, std::move(out), label.str(), support), step};
}

namespace {

nlohmann::json prop_context(const WaveFunction& psi, const Weight& w, const PhysicalConstants& c) {
    return {{"grid", {{"L", psi.grid().half_width()}, {"N", psi.grid().size()}, {"h", psi.grid().spacing()}}},
            {"weight", weight_to_json(w)},
            {"hbar", c.hbar},
            {"input", psi.label()}};
}

double relative_distance(const WaveFunction& a, const WaveFunction& b, const Weight& w, double reference) {
    std::vector<cplx> diff(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) diff[i] = a[i] - b[i];
    const double d = norm_w(WaveFunction(a.grid(), std::move(diff)), w, make_trapezoid(a.grid()));
    return d / reference;
}

}  // namespace

ResidualRecord propagator_unitarity_residual(const WaveFunction& psi, double sigma, const Weight& w,
                                             const PhysicalConstants& c, const VerificationTolerances& tol,
                                             const PropagateOptions& options) {
    const Propagated p = propagate(psi, sigma, w, c, options);
    const QuadratureRule rule = make_trapezoid(psi.grid());
    const double before = norm_w(psi, w, rule);
    const double after = norm_w(p.psi, w, rule);
    nlohmann::json ctx = prop_context(psi, w, c);
    ctx["sigma"] = sigma;
    ctx["aligned"] = p.step.aligned;
    ctx["norm_before"] = before;
    ctx["norm_after"] = after;
    const double tolerance = p.step.interpolated ? tol.propagator_unaligned : tol.propagator_unitarity;
    return make_record("propagator.unitarity", std::abs(after - before) / before, tolerance, ctx);
}

ResidualRecord round_trip_residual(const WaveFunction& psi, double sigma, const Weight& w,
                                   const PhysicalConstants& c, const VerificationTolerances& tol) {
    const WaveFunction forward = propagate(psi, sigma, w, c).psi;
    const WaveFunction back = propagate(forward, -sigma, w, c).psi;
    const double reference = norm_w(psi, w, make_trapezoid(psi.grid()));
    nlohmann::json ctx = prop_context(psi, w, c);
    ctx["sigma"] = sigma;
    return make_record("propagator.round_trip", relative_distance(back, psi, w, reference), tol.round_trip, ctx);
}

ResidualRecord group_property_residual(const WaveFunction& psi, double sigma1, double sigma2, const Weight& w,
                                       const PhysicalConstants& c, const VerificationTolerances& tol) {
    const WaveFunction stepped = propagate(propagate(psi, sigma1, w, c).psi, sigma2, w, c).psi;
    const WaveFunction combined = propagate(psi, sigma1 + sigma2, w, c).psi;
    const double reference = norm_w(psi, w, make_trapezoid(psi.grid()));
    nlohmann::json ctx = prop_context(psi, w, c);
    ctx["sigma1"] = sigma1;
    ctx["sigma2"] = sigma2;
    return make_record("propagator.group_law", relative_distance(stepped, combined, w, reference), tol.group_law, ctx);
}

double generator_error(const WaveFunction& psi, double sigma, const Weight& w, const PhysicalConstants& c,
                       StencilOrder order) {
    const WaveFunction moved = propagate(psi, sigma, w, c).psi;
    const WaveFunction t = apply_Tw(psi, w, c, order, Construction::Conjugated);
    const cplx minus_i_over_hbar{0.0, -1.0 / c.hbar};
    const auto [lo, hi] = interior_range(psi.size(), order);
    double err = 0.0;
    double scale = 0.0;
    for (std::size_t i = lo; i < hi; ++i) {
        const cplx generator = minus_i_over_hbar * t[i];
        err = std::max(err, std::abs((moved[i] - psi[i]) / sigma - generator));
        scale = std::max(scale, std::abs(generator));
    }
    return scale > 0.0 ? err / scale : err;
}

GeneratorStudy generator_consistency(const WaveFunction& psi, double sigma0, int levels, const Weight& w,
                                     const PhysicalConstants& c, StencilOrder order) {
    if (levels < 2) throw Error(ErrorKind::InvalidArgument, "generator study needs at least 2 levels");
    GeneratorStudy s;
    double sigma = sigma0;
    for (int k = 0; k < levels; ++k, sigma *= 0.5) {
        s.sigmas.push_back(sigma);
        s.errors.push_back(generator_error(psi, sigma, w, c, order));
    }
    for (std::size_t k = 0; k + 1 < s.errors.size(); ++k) {
        s.orders.push_back(observed_order(s.errors[k], s.errors[k + 1]));
    }
    s.order = s.orders.back();
    return s;
}

}  // namespace wtime
