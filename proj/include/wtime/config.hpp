#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "wtime/verification.hpp"

namespace wtime {

/// Everything a CLI run needs. Unknown JSON keys are rejected.
struct RunConfig {
    nlohmann::json weight = {{"name", "shifted_gaussian"}, {"params", {{"a", 1.0}, {"s", 1.0}}}};
    std::optional<std::string> weight_samples;  // CSV of E,w; overrides `weight`
    double L = 20.0;
    long long N = 4097;
    double hbar = 1.0;
    int order = 4;
    std::string construction = "conjugated";
    std::vector<std::string> checks;  // empty: every check
    nlohmann::json tolerances = nlohmann::json::object();
    std::string output_dir = ".";
    bool force = false;

    // propagate
    double sigma = 0.0;
    std::optional<std::string> input_csv;
    nlohmann::json test_function = {{"kind", "gaussian"}, {"params", {{"mu", 0.0}, {"s", 1.0}}}};
    bool interpolate = false;

    // verify: propagator suite shift, rounded to the nearest multiple of h
    double propagator_sigma = 2.0;

    // verify: deficiency study
    std::vector<double> deficiency_L = {10.0, 20.0, 30.0};
    double nodes_per_unit = 16384.0;
    double kappa = 1.0;
};

RunConfig parse_run_config(const nlohmann::json& doc);
nlohmann::json to_json(const RunConfig& cfg);

struct ResolvedConfig {
    Grid grid;
    Weight weight;
    PhysicalConstants constants;
    StencilOrder order;
    Construction construction;
    VerificationTolerances tolerances;
};

/// Builds the typed objects; failures are Error(Config) naming the offending field,
/// except unreadable files which are Error(Io).
ResolvedConfig resolve(const RunConfig& cfg);

/// Reads a weight table: optional header line, then `E,w` rows.
Weight load_weight_samples(const std::string& path);

}  // namespace wtime
