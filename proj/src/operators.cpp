#include "wtime/operators.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>

#include "wtime/error.hpp"

namespace wtime {

void check_constants(const PhysicalConstants& c) {
    if (!std::isfinite(c.hbar) || !(c.hbar > 0.0)) {
        throw Error(ErrorKind::InvalidArgument, "hbar must be finite and positive");
    }
}

StencilOrder stencil_order_from_int(int order) {
    if (order == 2) return StencilOrder::Second;
    if (order == 4) return StencilOrder::Fourth;
    throw Error(ErrorKind::InvalidArgument, "stencil order must be 2 or 4, got " + std::to_string(order));
}

const char* to_string(Construction c) {
    return c == Construction::Conjugated ? "conjugated" : "direct";
}

Construction construction_from_string(const std::string& s) {
    if (s == "conjugated") return Construction::Conjugated;
    if (s == "direct") return Construction::Direct;
    throw Error(ErrorKind::InvalidArgument, "construction must be 'conjugated' or 'direct', got '" + s + "'");
}

StencilRow stencil_row(std::size_t i, std::size_t n, StencilOrder order) {
    if (order == StencilOrder::Second) {
        if (n < 3) throw Error(ErrorKind::InvalidArgument, "order-2 stencil needs N >= 3");
        if (i == 0) return {0, {-1.5, 2.0, -0.5}};
        if (i == n - 1) return {n - 3, {0.5, -2.0, 1.5}};
        return {i - 1, {-0.5, 0.0, 0.5}};
    }
    if (n < 5) throw Error(ErrorKind::InvalidArgument, "order-4 stencil needs N >= 5");
    if (i == 0) return {0, {-25.0 / 12, 48.0 / 12, -36.0 / 12, 16.0 / 12, -3.0 / 12}};
    if (i == 1) return {0, {-3.0 / 12, -10.0 / 12, 18.0 / 12, -6.0 / 12, 1.0 / 12}};
    if (i == n - 2) return {n - 5, {-1.0 / 12, 6.0 / 12, -18.0 / 12, 10.0 / 12, 3.0 / 12}};
    if (i == n - 1) return {n - 5, {3.0 / 12, -16.0 / 12, 36.0 / 12, -48.0 / 12, 25.0 / 12}};
    return {i - 2, {1.0 / 12, -8.0 / 12, 0.0, 8.0 / 12, -1.0 / 12}};
}

std::pair<std::size_t, std::size_t> interior_range(std::size_t n, StencilOrder order) {
    const std::size_t pad = 2 * static_cast<std::size_t>(to_int(order));
    if (n <= 2 * pad) return {pad, pad};
    return {pad, n - pad};
}

std::vector<cplx> differentiate(std::span<const cplx> values, double h, StencilOrder order) {
    const std::size_t n = values.size();
    std::vector<cplx> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        const StencilRow row = stencil_row(i, n, order);
        cplx acc{0.0, 0.0};
        for (std::size_t k = 0; k < row.coeffs.size(); ++k) {
            acc += row.coeffs[k] * values[row.first + k];
        }
        out[i] = acc / h;
    }
    return out;
}

void require_interior_supported(const WaveFunction& psi, StencilOrder order, double edge_tol) {
    const std::size_t n = psi.size();
    const std::size_t pad = std::min(n, 2 * static_cast<std::size_t>(to_int(order)));
    const double peak = psi.max_abs();
    double edge = 0.0;
    for (std::size_t k = 0; k < pad; ++k) {
        edge = std::max({edge, std::abs(psi[k]), std::abs(psi[n - 1 - k])});
    }
    if (edge > edge_tol * peak) {
        throw Error(ErrorKind::DecayMargin,
                    "'" + psi.label() + "' is not numerically zero on the outermost " + std::to_string(pad) +
                        " nodes (max edge value " + std::to_string(edge) + ")");
    }
    double second = 0.0;
    for (std::size_t i = 1; i + 1 < n; ++i) {
        second = std::max(second, std::abs(psi[i + 1] - 2.0 * psi[i] + psi[i - 1]));
    }
    if (second > 0.5 * peak) {
        throw Error(ErrorKind::Unresolved, "'" + psi.label() + "' is not resolved by the grid (second difference " +
                                               std::to_string(second) + " vs peak " + std::to_string(peak) + ")");
    }
}

WaveFunction apply_T0(const WaveFunction& psi, const PhysicalConstants& c, StencilOrder order) {
    check_constants(c);
    std::vector<cplx> d = differentiate(psi.values(), psi.grid().spacing(), order);
    const cplx ih{0.0, c.hbar};
    for (auto& v : d) v = ih * v;
    return with_values(psi, std::move(d), psi.label() + " |T0 [boundary-degraded]");
}

WaveFunction apply_Tw(const WaveFunction& psi, const NodeWeights& nw, const PhysicalConstants& c,
                      StencilOrder order, Construction construction) {
    check_constants(c);
    const std::size_t n = psi.size();
    if (nw.w.size() != n) throw Error(ErrorKind::GridMismatch, "apply_Tw: weight samples do not match the grid");
    const cplx ih{0.0, c.hbar};
    std::vector<cplx> out;
    if (construction == Construction::Conjugated) {
        std::vector<cplx> scaled(n);
        for (std::size_t i = 0; i < n; ++i) scaled[i] = nw.sqrt_w[i] * psi[i];
        out = differentiate(scaled, psi.grid().spacing(), order);
        for (std::size_t i = 0; i < n; ++i) out[i] = (ih * out[i]) / nw.sqrt_w[i];
    } else {
        out = differentiate(psi.values(), psi.grid().spacing(), order);
        for (std::size_t i = 0; i < n; ++i) out[i] = ih * (out[i] + nw.half_log_derivative[i] * psi[i]);
    }
    return with_values(psi, std::move(out),
                       psi.label() + " |Tw(" + to_string(construction) + ") [boundary-degraded]");
}

WaveFunction apply_Tw(const WaveFunction& psi, const Weight& w, const PhysicalConstants& c,
                      StencilOrder order, Construction construction) {
    return apply_Tw(psi, sample_weight(w, psi.grid()), c, order, construction);
}

WaveFunction apply_H(const WaveFunction& psi) {
    std::vector<cplx> out(psi.size());
    for (std::size_t i = 0; i < psi.size(); ++i) out[i] = psi.grid().node(i) * psi[i];
    return with_values(psi, std::move(out), psi.label() + " |H");
}

WaveFunction apply_Uw(const WaveFunction& psi, const Weight& w, Direction direction) {
    const NodeWeights nw = sample_weight(w, psi.grid());
    std::vector<cplx> out(psi.size());
    for (std::size_t i = 0; i < psi.size(); ++i) {
        out[i] = direction == Direction::Forward ? psi[i] * nw.sqrt_w[i] : psi[i] / nw.sqrt_w[i];
    }
    return with_values(psi, std::move(out),
                       psi.label() + (direction == Direction::Forward ? " |U" : " |U^-1"));
}

WaveFunction commutator_TH(const WaveFunction& psi, const Weight& w, const PhysicalConstants& c,
                           StencilOrder order, Construction construction) {
    require_interior_supported(psi, order);
    const NodeWeights nw = sample_weight(w, psi.grid());
    const WaveFunction t_of_h = apply_Tw(apply_H(psi), nw, c, order, construction);
    const WaveFunction h_of_t = apply_H(apply_Tw(psi, nw, c, order, construction));
    std::vector<cplx> out(psi.size());
    for (std::size_t i = 0; i < psi.size(); ++i) out[i] = t_of_h[i] - h_of_t[i];
    return with_values(psi, std::move(out), psi.label() + " |[Tw,H]");
}

WaveFunction OperatorMatrix::apply(const WaveFunction& psi) const {
    if (!(psi.grid() == grid)) throw Error(ErrorKind::GridMismatch, "matrix apply: grid mismatch");
    Eigen::VectorXcd v(static_cast<Eigen::Index>(psi.size()));
    for (std::size_t i = 0; i < psi.size(); ++i) v(static_cast<Eigen::Index>(i)) = psi[i];
    const Eigen::VectorXcd r = entries * v;
    return with_values(psi, std::vector<cplx>(r.data(), r.data() + r.size()), psi.label() + " |" + name);
}

namespace {

std::vector<double> metric_for(const NodeWeights& nw, const Grid& grid) {
    const QuadratureRule rule = make_trapezoid(grid);
    std::vector<double> g(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) g[i] = rule.node_weights[i] * nw.w[i];
    return g;
}

void check_cap(const Grid& grid, std::size_t cap) {
    if (grid.size() > cap) {
        throw Error(ErrorKind::DenseCap, "dense matrix of dimension " + std::to_string(grid.size()) +
                                             " exceeds the cap " + std::to_string(cap));
    }
}

}  // namespace

OperatorMatrix build_Tw_matrix(const Weight& w, const Grid& grid, const PhysicalConstants& c,
                               StencilOrder order, Construction construction, std::size_t dense_cap) {
    check_cap(grid, dense_cap);
    check_constants(c);
    const NodeWeights nw = sample_weight(w, grid);
    const auto n = static_cast<Eigen::Index>(grid.size());
    OperatorMatrix m{"T_w", grid, w.id, Eigen::MatrixXcd::Zero(n, n), metric_for(nw, grid), order,
                     construction, c.hbar};
    const cplx ih{0.0, c.hbar};
    const double h = grid.spacing();
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const StencilRow row = stencil_row(i, grid.size(), order);
        for (std::size_t k = 0; k < row.coeffs.size(); ++k) {
            const std::size_t j = row.first + k;
            const double d = row.coeffs[k] / h;
            cplx entry = ih * d;
            if (construction == Construction::Conjugated) entry = entry * (nw.sqrt_w[j] / nw.sqrt_w[i]);
            m.entries(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) += entry;
        }
        if (construction == Construction::Direct) {
            m.entries(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) += ih * nw.half_log_derivative[i];
        }
    }
    return m;
}

OperatorMatrix build_H_matrix(const Weight& w, const Grid& grid, std::size_t dense_cap) {
    check_cap(grid, dense_cap);
    const NodeWeights nw = sample_weight(w, grid);
    const auto n = static_cast<Eigen::Index>(grid.size());
    OperatorMatrix m{"H", grid, w.id, Eigen::MatrixXcd::Zero(n, n), metric_for(nw, grid),
                     StencilOrder::Second, Construction::Conjugated, 1.0};
    for (std::size_t i = 0; i < grid.size(); ++i) {
        m.entries(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) = grid.node(i);
    }
    return m;
}

void write_matrix_csv(std::ostream& out, const OperatorMatrix& m) {
    out << "row,col,re,im\n";
    char buf[160];
    for (Eigen::Index i = 0; i < m.entries.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.entries.cols(); ++j) {
            const cplx v = m.entries(i, j);
            if (v == cplx{0.0, 0.0}) continue;
            std::snprintf(buf, sizeof buf, "%ld,%ld,%.17g,%.17g\n", static_cast<long>(i), static_cast<long>(j),
                          v.real(), v.imag());
            out << buf;
        }
    }
}

nlohmann::json matrix_metadata(const OperatorMatrix& m) {
    return {
        {"operator", m.name},
        {"weight", m.weight_id},
        {"grid", {{"L", m.grid.half_width()}, {"N", m.grid.size()}, {"h", m.grid.spacing()}}},
        {"order", to_int(m.order)},
        {"construction", to_string(m.construction)},
        {"hbar", m.hbar},
        {"storage", "nonzero entries only, row,col,re,im"},
    };
}

}  // namespace wtime
