#pragma once

#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "wtime/operators.hpp"

namespace wtime {

/// passed <=> value <= tolerance (NaN never passes).
struct ResidualRecord {
    std::string name;
    double value = 0.0;
    double tolerance = 0.0;
    bool passed = false;
    nlohmann::json context = nlohmann::json::object();
};

ResidualRecord make_record(std::string name, double value, double tolerance,
                           nlohmann::json context = nlohmann::json::object());
nlohmann::json to_json(const ResidualRecord& r);

struct DomainTolerances {
    double edge = 1e-10;
    double smooth = 1e3;
};

/**
 * Pinned tolerances. Entries named *_coeff multiply a resolution factor
 * (h^order or h) so that direct-construction checks scale with the grid.
 */
struct VerificationTolerances {
    double hermiticity_conjugated = 1e-10;  // x ||φ||_w ||ψ||_w
    double hermiticity_direct_coeff = 1.0;  // x h^order ||φ||_w ||ψ||_w
    double boundary_relative = 0.1;         // corrected residual vs |iħ[φ*ψw]|
    double unitary_conjugated = 1e-13;
    double unitary_direct_coeff = 1.0;      // x h^order ||f||
    double commutation = 5e-4;
    double cross_construction_coeff = 10.0; // x h^order
    double matrix_conjugated = 1e-12;
    double matrix_direct_coeff = 4.0;       // x h (entrywise defect is first order)
    double propagator_unitarity = 1e-10;
    double propagator_unaligned = 1e-6;
    double group_law = 1e-12;
    double round_trip = 1e-12;
    double generator_order = 0.3;           // |measured order - 1|
    double divergence_fraction = 0.5;       // of the analytic log-increment 2κΔL/ħ
    double saturation = 1e-6;
    DomainTolerances domain;
};

nlohmann::json to_json(const VerificationTolerances& t);
/// Overrides known keys; throws Error(Config) on unknown ones.
void apply_overrides(VerificationTolerances& t, const nlohmann::json& overrides);

struct HermiticityResult {
    ResidualRecord raw;        // |<φ|Tψ> - <Tφ|ψ>|
    ResidualRecord corrected;  // |(<φ|Tψ> - <Tφ|ψ>) - iħ[φ*ψw]_{-L}^{L}|
    cplx difference;
    cplx boundary_term;
    cplx diagonal_form;        // <ψ|Tψ>
};

HermiticityResult hermiticity_residual(const WaveFunction& phi, const WaveFunction& psi, const Weight& w,
                                       const PhysicalConstants& c, StencilOrder order,
                                       Construction construction, const VerificationTolerances& tol = {});

/// Flat norm (interior nodes) of U_w T_w U_w^{-1} f - iħ D f.
ResidualRecord unitary_equivalence_residual(const WaveFunction& f, const Weight& w, const PhysicalConstants& c,
                                            StencilOrder order, Construction construction = Construction::Direct,
                                            const VerificationTolerances& tol = {});

/// ||[T_w, H]ψ - iħψ||_w / ||ψ||_w on interior nodes.
ResidualRecord commutation_residual(const WaveFunction& psi, const Weight& w, const PhysicalConstants& c,
                                    StencilOrder order, Construction construction,
                                    const VerificationTolerances& tol = {});

/// max interior |T_direct ψ - T_conjugated ψ| / max|T_conjugated ψ|.
ResidualRecord cross_construction_residual(const WaveFunction& psi, const Weight& w, const PhysicalConstants& c,
                                           StencilOrder order, const VerificationTolerances& tol = {});

struct DomainReport {
    double edge_decay = 0.0;          // max |w^{1/2} ψ| on the outermost 1% of nodes
    double derivative_norm = 0.0;     // ||Dψ||_w
    bool derivative_in_space = false;
    double smoothness_proxy = 0.0;    // max |Δ²ψ| / h²
    bool in_domain = false;
};

DomainReport domain_membership_check(const WaveFunction& psi, const Weight& w, const DomainTolerances& tol = {});
nlohmann::json to_json(const DomainReport& r);

enum class DeficiencySign { Plus, Minus };

struct DeficiencySolution {
    WaveFunction psi;
    bool overflow = false;  // some log-amplitude exceeded 700 and was clamped
};

/// ψ±(E) = w(E)^{-1/2} exp(±κE/ħ), sampled in log space.
DeficiencySolution deficiency_solution(DeficiencySign sign, const Weight& w, const PhysicalConstants& c,
                                       const Grid& grid, double kappa = 1.0);

enum class IndexVerdict { Zero, AtLeastOne, Inconclusive };
const char* to_string(IndexVerdict v);

struct DeficiencyVerdict {
    IndexVerdict n_plus = IndexVerdict::Inconclusive;
    IndexVerdict n_minus = IndexVerdict::Inconclusive;
    bool weight_admissible = false;
    std::vector<double> L_values;
    std::vector<std::size_t> nodes;
    std::vector<double> log_norm_sq_plus;   // ln ||ψ+||²_w on [-L, L]
    std::vector<double> log_norm_sq_minus;
    std::vector<double> growth_plus;        // consecutive log increments
    std::vector<double> growth_minus;
    std::vector<double> thresholds;         // per increment

    bool essentially_self_adjoint() const {
        return n_plus == IndexVerdict::Zero && n_minus == IndexVerdict::Zero;
    }
};

/// ln Σ q_i w_i |ψ±_i|² on a grid of half-width L, computed by log-sum-exp.
double deficiency_log_norm_sq(DeficiencySign sign, const Weight& w, const PhysicalConstants& c,
                              const Grid& grid, double kappa = 1.0);

/**
 * Squared weighted norms of ψ± over growing truncations. A sign gets index 0 when
 * every log-increment reaches divergence_fraction * 2κΔL/ħ, index >= 1 when the
 * norms saturate. Weights failing validation are reported inconclusive.
 */
DeficiencyVerdict deficiency_index_estimate(const Weight& w, const PhysicalConstants& c,
                                            const std::vector<double>& L_list, double nodes_per_unit = 16384.0,
                                            double kappa = 1.0, const VerificationTolerances& tol = {});
nlohmann::json to_json(const DeficiencyVerdict& v);

struct SpectrumRecord {
    std::vector<double> eigenvalues;
    double lo = 0.0;
    double hi = 0.0;
};

SpectrumRecord spectrum_H(const Grid& grid);

/// max interior |G M - M† G| scaled by max |G M|.
ResidualRecord matrix_hermiticity_check(const OperatorMatrix& m, double tolerance);
double default_matrix_tolerance(const OperatorMatrix& m, const VerificationTolerances& tol = {});

/// log2(coarse / fine): observed order when h halves.
double observed_order(double coarse, double fine);

}  // namespace wtime
