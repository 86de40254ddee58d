#pragma once

#include <complex>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "wtime/grid.hpp"
#include "wtime/weights.hpp"

namespace wtime {

using cplx = std::complex<double>;

/// Closed interval outside of which a sampled function is known to vanish identically.
struct Support {
    double lo;
    double hi;
    bool contains(double E) const { return E > lo && E < hi; }
};

/// Complex samples ψ(E_i) on a Grid. Values must be finite and match grid.size().
class WaveFunction {
public:
    WaveFunction(Grid grid, std::vector<cplx> values, std::string label = {},
                 std::optional<Support> support = std::nullopt);

    const Grid& grid() const { return grid_; }
    const std::vector<cplx>& values() const { return values_; }
    std::size_t size() const { return values_.size(); }
    const cplx& operator[](std::size_t i) const { return values_[i]; }
    const std::string& label() const { return label_; }
    const std::optional<Support>& support() const { return support_; }

    double max_abs() const;

private:
    Grid grid_;
    std::vector<cplx> values_;
    std::string label_;
    std::optional<Support> support_;
};

enum class QuadratureKind { Trapezoid };

struct QuadratureRule {
    QuadratureKind kind = QuadratureKind::Trapezoid;
    std::vector<double> node_weights;
};

/// q_0 = q_{N-1} = h/2, q_i = h otherwise.
QuadratureRule make_trapezoid(const Grid& grid);

/// w(E_i), w^{1/2}(E_i) and ½(ln w)'(E_i) on every node.
struct NodeWeights {
    std::vector<double> w;
    std::vector<double> sqrt_w;
    std::vector<double> half_log_derivative;
};

/// Throws Error(InvalidWeight) if w is non-positive or non-finite at any node.
NodeWeights sample_weight(const Weight& w, const Grid& grid);

/// Σ q_i conj(φ_i) ψ_i g_i for explicit node metric g.
cplx weighted_sum(const WaveFunction& phi, const WaveFunction& psi, std::span<const double> node_metric,
                  const QuadratureRule& rule);

/// ⟨φ|ψ⟩_w = Σ q_i conj(φ_i) ψ_i w(E_i).
cplx inner_product_w(const WaveFunction& phi, const WaveFunction& psi, const Weight& w,
                     const QuadratureRule& rule);

double norm_w(const WaveFunction& psi, const Weight& w, const QuadratureRule& rule);

/// Norm with w ≡ 1.
double norm_flat(const WaveFunction& psi, const QuadratureRule& rule);

/**
 * Test functions:
 *   gaussian      {mu = 0, s = 1}      exp(-(E - mu)^2 / (2 s^2))
 *   hermite       {n = 0, s = 1}      H_n(E/s) exp(-E^2 / (2 s^2)), physicists' H_n
 *   smooth_bump   {r = 1, mu = 0}     exp(-1 / (1 - x^2)), x = (E - mu)/r, zero for |x| >= 1
 *   constant_one  {}                  1 everywhere; violates the edge decay condition
 *
 * smooth_bump declares its support; it must fit strictly inside (-L, L).
 */
WaveFunction sample_test_function(const std::string& kind, const ParamMap& params, const Grid& grid);

/// {"kind": ..., "params": {...}}
WaveFunction test_function_from_json(const nlohmann::json& spec, const Grid& grid);

/// CSV with a one-line JSON grid header: `# {"L":..,"N":..,"h":..}` then `E,re,im` rows.
void write_wavefunction_csv(std::ostream& out, const WaveFunction& psi);
WaveFunction read_wavefunction_csv(std::istream& in, std::string label = "csv");

/// Elementwise helpers used across modules.
WaveFunction with_values(const WaveFunction& like, std::vector<cplx> values, std::string label);

}  // namespace wtime
