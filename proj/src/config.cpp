#include "wtime/config.hpp"

#include <cstdio>
#include <fstream>
#include <set>

#include "wtime/error.hpp"

namespace wtime {

namespace {

template <typename T>
T field(const nlohmann::json& doc, const char* key) {
    try {
        return doc.at(key).get<T>();
    } catch (const nlohmann::json::exception&) {
        throw Error(ErrorKind::Config, std::string("config field '") + key + "' has the wrong type");
    }
}

double number(const nlohmann::json& doc, const char* key) {
    if (!doc.at(key).is_number()) throw Error(ErrorKind::Config, std::string("config field '") + key + "' must be a number");
    return doc.at(key).get<double>();
}

}  // namespace

RunConfig parse_run_config(const nlohmann::json& doc) {
    if (!doc.is_object()) throw Error(ErrorKind::Config, "config must be a JSON object");
    static const std::set<std::string> known = {
        "weight", "weight_samples", "L",     "N",           "hbar",          "order",
        "construction", "checks",   "tolerances", "output_dir", "force",     "sigma",
        "input_csv", "test_function", "interpolate", "propagator_sigma", "deficiency_L",
        "nodes_per_unit", "kappa"};
    for (const auto& [key, value] : doc.items()) {
        if (!known.count(key)) throw Error(ErrorKind::Config, "config: unknown key '" + key + "'");
    }
    RunConfig cfg;
    if (doc.contains("weight")) {
        if (!doc.at("weight").is_object()) throw Error(ErrorKind::Config, "config field 'weight' must be an object");
        cfg.weight = doc.at("weight");
    }
    if (doc.contains("weight_samples")) cfg.weight_samples = field<std::string>(doc, "weight_samples");
    if (doc.contains("L")) cfg.L = number(doc, "L");
    if (doc.contains("N")) {
        if (!doc.at("N").is_number_integer()) throw Error(ErrorKind::Config, "config field 'N' must be an integer");
        cfg.N = doc.at("N").get<long long>();
    }
    if (doc.contains("hbar")) cfg.hbar = number(doc, "hbar");
    if (doc.contains("order")) {
        if (!doc.at("order").is_number_integer()) throw Error(ErrorKind::Config, "config field 'order' must be 2 or 4");
        cfg.order = doc.at("order").get<int>();
    }
    if (doc.contains("construction")) cfg.construction = field<std::string>(doc, "construction");
    if (doc.contains("checks")) cfg.checks = field<std::vector<std::string>>(doc, "checks");
    if (doc.contains("tolerances")) cfg.tolerances = doc.at("tolerances");
    if (doc.contains("output_dir")) cfg.output_dir = field<std::string>(doc, "output_dir");
    if (doc.contains("force")) cfg.force = field<bool>(doc, "force");
    if (doc.contains("sigma")) cfg.sigma = number(doc, "sigma");
    if (doc.contains("input_csv")) cfg.input_csv = field<std::string>(doc, "input_csv");
    if (doc.contains("test_function")) cfg.test_function = doc.at("test_function");
    if (doc.contains("interpolate")) cfg.interpolate = field<bool>(doc, "interpolate");
    if (doc.contains("propagator_sigma")) cfg.propagator_sigma = number(doc, "propagator_sigma");
    if (doc.contains("deficiency_L")) cfg.deficiency_L = field<std::vector<double>>(doc, "deficiency_L");
    if (doc.contains("nodes_per_unit")) cfg.nodes_per_unit = number(doc, "nodes_per_unit");
    if (doc.contains("kappa")) cfg.kappa = number(doc, "kappa");
    return cfg;
}

nlohmann::json to_json(const RunConfig& cfg) {
    nlohmann::json out = {
        {"weight", cfg.weight},       {"L", cfg.L},
        {"N", cfg.N},                 {"hbar", cfg.hbar},
        {"order", cfg.order},         {"construction", cfg.construction},
        {"checks", cfg.checks},       {"tolerances", cfg.tolerances},
        {"force", cfg.force},         {"sigma", cfg.sigma},
        {"test_function", cfg.test_function}, {"interpolate", cfg.interpolate},
        {"propagator_sigma", cfg.propagator_sigma}, {"deficiency_L", cfg.deficiency_L},
        {"nodes_per_unit", cfg.nodes_per_unit}, {"kappa", cfg.kappa},
    };
    if (cfg.weight_samples) out["weight_samples"] = *cfg.weight_samples;
    if (cfg.input_csv) out["input_csv"] = *cfg.input_csv;
    return out;
}

Weight load_weight_samples(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::Io, "cannot read weight samples '" + path + "'");
    std::vector<double> energies;
    std::vector<double> values;
    std::string line;
    std::size_t row = 0;
    while (std::getline(in, line)) {
        ++row;
        if (line.empty() || line[0] == '#') continue;
        double E = 0;
        double w = 0;
        if (std::sscanf(line.c_str(), "%lf,%lf", &E, &w) != 2) {
            if (energies.empty()) continue;  // header line
            throw Error(ErrorKind::Config, "weight samples: malformed row " + std::to_string(row));
        }
        energies.push_back(E);
        values.push_back(w);
    }
    try {
        return make_tabulated_weight(std::move(energies), std::move(values), "samples:" + path);
    } catch (const Error& e) {
        throw Error(ErrorKind::Config, std::string("weight_samples: ") + e.what());
    }
}

ResolvedConfig resolve(const RunConfig& cfg) {
    auto rethrow = [](const char* name, const Error& e) -> Error {
        if (e.kind() == ErrorKind::Io) return e;
        return Error(ErrorKind::Config, std::string("config field '") + name + "': " + e.what());
    };
    if (cfg.N < 3) throw Error(ErrorKind::Config, "config field 'N': must be an odd integer >= 3");
    std::optional<Grid> grid;
    try {
        grid.emplace(cfg.L, static_cast<std::size_t>(cfg.N));
    } catch (const Error& e) {
        throw rethrow(cfg.N % 2 == 0 ? "N" : "L", e);
    }
    std::optional<Weight> weight;
    try {
        weight = cfg.weight_samples ? load_weight_samples(*cfg.weight_samples) : weight_from_json(cfg.weight);
    } catch (const Error& e) {
        throw rethrow(cfg.weight_samples ? "weight_samples" : "weight", e);
    }
    PhysicalConstants c{cfg.hbar};
    try {
        check_constants(c);
    } catch (const Error& e) {
        throw rethrow("hbar", e);
    }
    StencilOrder order;
    try {
        order = stencil_order_from_int(cfg.order);
    } catch (const Error& e) {
        throw rethrow("order", e);
    }
    Construction construction;
    try {
        construction = construction_from_string(cfg.construction);
    } catch (const Error& e) {
        throw rethrow("construction", e);
    }
    VerificationTolerances tol;
    apply_overrides(tol, cfg.tolerances);
    return {*grid, *weight, c, order, construction, tol};
}

}  // namespace wtime
