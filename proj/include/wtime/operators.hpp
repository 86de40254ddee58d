#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "wtime/discretization.hpp"

namespace wtime {

struct PhysicalConstants {
    double hbar = 1.0;
};

/// Throws Error(InvalidArgument) unless hbar is finite and positive.
void check_constants(const PhysicalConstants& c);

enum class StencilOrder { Second = 2, Fourth = 4 };
enum class Construction { Conjugated, Direct };
enum class Direction { Forward, Inverse };

inline int to_int(StencilOrder order) { return static_cast<int>(order); }
StencilOrder stencil_order_from_int(int order);
const char* to_string(Construction c);
Construction construction_from_string(const std::string& s);

/// One row of the first-derivative stencil: D_{i, first + k} = coeffs[k] / h.
struct StencilRow {
    std::size_t first;
    std::vector<double> coeffs;
};

/// Central stencil in the interior, one-sided stencils of the same order at the edges.
StencilRow stencil_row(std::size_t i, std::size_t n, StencilOrder order);

/// Nodes whose stencil rows and columns are free of one-sided pollution: [2*order, N - 2*order).
std::pair<std::size_t, std::size_t> interior_range(std::size_t n, StencilOrder order);

/// D applied to raw samples.
std::vector<cplx> differentiate(std::span<const cplx> values, double h, StencilOrder order);

/**
 * Precondition shared by commutator and verification checks: ψ must be numerically
 * dead on the outermost 2*order nodes (relative to max|ψ|, 1e-12) and resolved by the
 * grid (max second difference at most half of max|ψ|).
 */
void require_interior_supported(const WaveFunction& psi, StencilOrder order, double edge_tol = 1e-12);

/// iħ D ψ; the label records that the edge rows use one-sided stencils.
WaveFunction apply_T0(const WaveFunction& psi, const PhysicalConstants& c, StencilOrder order);

/**
 * Discrete T_w = iħ(∂_E + ½ ∂_E ln w).
 *
 * Conjugated: W^{-1/2} (iħ D) W^{1/2}, exactly symmetric against the trapezoid
 * metric q_i w_i on interior nodes. Direct: iħ (D + diag(½ w'/w)).
 */
WaveFunction apply_Tw(const WaveFunction& psi, const Weight& w, const PhysicalConstants& c,
                      StencilOrder order, Construction construction = Construction::Conjugated);
WaveFunction apply_Tw(const WaveFunction& psi, const NodeWeights& nw, const PhysicalConstants& c,
                      StencilOrder order, Construction construction = Construction::Conjugated);

/// (Hψ)_i = E_i ψ_i
WaveFunction apply_H(const WaveFunction& psi);

/// Forward multiplies by w^{1/2}, inverse divides.
WaveFunction apply_Uw(const WaveFunction& psi, const Weight& w, Direction direction);

/// [T_w, H] ψ = T_w(Hψ) - H(T_w ψ). Throws if ψ fails require_interior_supported.
WaveFunction commutator_TH(const WaveFunction& psi, const Weight& w, const PhysicalConstants& c,
                           StencilOrder order, Construction construction = Construction::Conjugated);

/// Dense operator together with the diagonal metric g_i = q_i w(E_i) it is symmetric against.
struct OperatorMatrix {
    std::string name;  // "T_w" or "H"
    Grid grid;
    std::string weight_id;
    Eigen::MatrixXcd entries;
    std::vector<double> metric;
    StencilOrder order = StencilOrder::Fourth;
    Construction construction = Construction::Conjugated;
    double hbar = 1.0;

    std::size_t dim() const { return static_cast<std::size_t>(entries.rows()); }
    WaveFunction apply(const WaveFunction& psi) const;
};

inline constexpr std::size_t kDefaultDenseCap = 8193;

OperatorMatrix build_Tw_matrix(const Weight& w, const Grid& grid, const PhysicalConstants& c,
                               StencilOrder order, Construction construction = Construction::Conjugated,
                               std::size_t dense_cap = kDefaultDenseCap);

OperatorMatrix build_H_matrix(const Weight& w, const Grid& grid, std::size_t dense_cap = kDefaultDenseCap);

/// Nonzero entries as `row,col,re,im`.
void write_matrix_csv(std::ostream& out, const OperatorMatrix& m);
nlohmann::json matrix_metadata(const OperatorMatrix& m);

}  // namespace wtime
