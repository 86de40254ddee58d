#pragma once

#include <algorithm>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "wtime/grid.hpp"

namespace wtime {

using ParamMap = std::map<std::string, double>;

/**
 * The metric density w(E) of the weighted energy space.
 *
 * Immutable once built. `eval_dw` may be empty, in which case derivatives are
 * taken numerically (see weight_log_derivative).
 */
struct Weight {
    std::string id;
    std::function<double(double)> eval_w;
    std::function<double(double)> eval_dw;
    ParamMap params;

    double operator()(double E) const { return eval_w(E); }
    bool has_analytic_derivative() const { return static_cast<bool>(eval_dw); }
};

struct ValidationTolerances {
    double positivity_floor = 1e-12;
    double lower_bound_floor = 1e-6;
    // Bound on |d ln w / dE| difference quotients; a jump makes them grow like 1/h.
    double smoothness_bound = 1e3;
    // Finest/coarsest quotient ratio above which the sampled ln w is treated as jumping.
    double smoothness_growth = 2.0;
};

struct WeightValidationReport {
    bool positivity_ok = false;
    double worst_value = 0.0;     // min sampled w
    double worst_location = 0.0;

    bool smoothness_ok = false;
    double max_quotient = 0.0;    // max |Δ ln w / ΔE| over the three nested grids
    double quotient_growth = 0.0; // finest / coarsest max quotient

    bool bounds_ok = false;
    double m = 0.0;
    double M = 0.0;
    double E0 = 0.0;

    double probe_half_width = 0.0;
    std::size_t probe_nodes = 0;

    bool all_ok() const { return positivity_ok && smoothness_ok && bounds_ok; }
};

/// Registry: "flat" {c}, "shifted_gaussian" {a, s}, "sinusoidal" {c, a}, "gaussian_violating" {}.
/// Missing parameters take the defaults c = 1, a = 1, s = 1 (sinusoidal: c = 2, a = 1).
Weight make_builtin_weight(const std::string& name, const ParamMap& params = {});

/// Weight interpolated piecewise-linearly in ln w from (E, w) samples; constant beyond the table.
Weight make_tabulated_weight(std::vector<double> energies, std::vector<double> values,
                             std::string id = "tabulated");

/// {"name": ..., "params": {...}}
Weight weight_from_json(const nlohmann::json& spec);
nlohmann::json weight_to_json(const Weight& w);

/// Registered names, in a stable order.
const std::vector<std::string>& builtin_weight_names();

/// Central difference step used when no analytic derivative is available.
inline double numeric_derivative_step(double E) { return 1e-6 * std::max(1.0, E < 0 ? -E : E); }

/// w'(E), analytic when available.
double weight_derivative(const Weight& w, double E);

/// ½ d/dE ln w(E) = w'(E) / (2 w(E)).
double weight_log_derivative(const Weight& w, double E);

WeightValidationReport validate_weight(const Weight& w, const Grid& probe,
                                       const ValidationTolerances& tol = {});

nlohmann::json to_json(const WeightValidationReport& report);

}  // namespace wtime
