#pragma once

#include <vector>

#include "wtime/verification.hpp"

namespace wtime {

// Unitary group generated by T_w, conjugated from flat translations:
//   (exp(-iσT_w/ħ) ψ)(E) = sqrt(w(E+σ) / w(E)) ψ(E+σ).
// σ is an energy shift, so ħ drops out of the closed form.

struct PropagateOptions {
    bool allow_interpolation = false;  // cubic Lagrange lookups for σ not a multiple of h
    double support_tol = 1e-12;        // |ψ| below this fraction of max|ψ| counts as outside the support
};

struct PropagationStep {
    double sigma = 0.0;
    long shift_nodes = 0;      // σ / h for aligned shifts
    bool aligned = false;
    bool interpolated = false;
    double support_radius = 0.0;
    bool margin_ok = false;    // |σ| < L - support_radius
};

struct Propagated {
    WaveFunction psi;
    PropagationStep step;
};

/// Declared support if present, otherwise the farthest node with |ψ| above support_tol * max|ψ|.
double support_radius(const WaveFunction& psi, double support_tol = 1e-12);

/// Throws Error(MarginViolation) or Error(Unaligned).
Propagated propagate(const WaveFunction& psi, double sigma, const Weight& w, const PhysicalConstants& c,
                     const PropagateOptions& options = {});

/// |‖Pψ‖_w - ‖ψ‖_w| / ‖ψ‖_w
ResidualRecord propagator_unitarity_residual(const WaveFunction& psi, double sigma, const Weight& w,
                                             const PhysicalConstants& c, const VerificationTolerances& tol = {},
                                             const PropagateOptions& options = {});

/// ‖P(-σ)P(σ)ψ - ψ‖_w / ‖ψ‖_w
ResidualRecord round_trip_residual(const WaveFunction& psi, double sigma, const Weight& w,
                                   const PhysicalConstants& c, const VerificationTolerances& tol = {});

/// ‖P(σ2)P(σ1)ψ - P(σ1+σ2)ψ‖_w / ‖ψ‖_w
ResidualRecord group_property_residual(const WaveFunction& psi, double sigma1, double sigma2, const Weight& w,
                                       const PhysicalConstants& c, const VerificationTolerances& tol = {});

/// max interior |(P(σ)ψ - ψ)/σ - (-i/ħ) T_w ψ| / max|T_w ψ / ħ|
double generator_error(const WaveFunction& psi, double sigma, const Weight& w, const PhysicalConstants& c,
                       StencilOrder order);

struct GeneratorStudy {
    std::vector<double> sigmas;
    std::vector<double> errors;
    std::vector<double> orders;  // between consecutive σ (each half the previous)
    double order = 0.0;          // last pairwise order (finest steps)
};

/// σ_k = sigma0 / 2^k, k = 0..levels-1; sigma0 should be a multiple of 2^(levels-1) h.
GeneratorStudy generator_consistency(const WaveFunction& psi, double sigma0, int levels, const Weight& w,
                                     const PhysicalConstants& c, StencilOrder order);

}  // namespace wtime
