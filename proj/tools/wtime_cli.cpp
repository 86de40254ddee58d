// wtime: validate weights, verify the weighted time operator, propagate and export matrices.
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "wtime/commands.hpp"
#include "wtime/error.hpp"

namespace {

struct Flags {
    std::string config_path;
    std::optional<double> L;
    std::optional<long long> N;
    std::optional<double> hbar;
    std::optional<int> order;
    std::optional<std::string> construction;
    std::optional<std::string> weight;
    std::vector<std::string> params;
    std::optional<std::string> weight_samples;
    std::vector<std::string> checks;
    std::vector<std::string> tolerances;
    std::optional<std::string> out_dir;
    bool force = false;
    std::optional<double> sigma;
    std::optional<std::string> input;
    bool interpolate = false;
};

void add_common(CLI::App* cmd, Flags& f) {
    cmd->add_option("-c,--config", f.config_path, "JSON run configuration");
    cmd->add_option("--L", f.L, "grid half-width");
    cmd->add_option("--N", f.N, "node count (odd)");
    cmd->add_option("--hbar", f.hbar, "reduced Planck constant");
    cmd->add_option("--order", f.order, "stencil order (2 or 4)");
    cmd->add_option("--construction", f.construction, "conjugated | direct");
    cmd->add_option("--weight", f.weight, "builtin weight name");
    cmd->add_option("--param", f.params, "weight parameter key=value (repeatable)");
    cmd->add_option("--weight-samples", f.weight_samples, "CSV of E,w samples");
    cmd->add_option("--tolerance", f.tolerances, "tolerance override key=value (repeatable)");
    cmd->add_option("-o,--out-dir", f.out_dir, "output directory");
}

std::pair<std::string, double> split_kv(const std::string& kv) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw wtime::Error(wtime::ErrorKind::Config, "expected key=value, got '" + kv + "'");
    try {
        return {kv.substr(0, eq), std::stod(kv.substr(eq + 1))};
    } catch (const std::exception&) {
        throw wtime::Error(wtime::ErrorKind::Config, "value in '" + kv + "' is not a number");
    }
}

// precedence: flags > environment (output dir only) > file > defaults
wtime::RunConfig build_config(const Flags& f) {
    nlohmann::json doc = nlohmann::json::object();
    if (!f.config_path.empty()) {
        std::ifstream in(f.config_path);
        if (!in) throw wtime::Error(wtime::ErrorKind::Io, "cannot read config '" + f.config_path + "'");
        try {
            doc = nlohmann::json::parse(in);
        } catch (const nlohmann::json::exception& e) {
            throw wtime::Error(wtime::ErrorKind::Config, std::string("config is not valid JSON: ") + e.what());
        }
        if (!doc.is_object()) throw wtime::Error(wtime::ErrorKind::Config, "config must be a JSON object");
    }
    if (f.L) doc["L"] = *f.L;
    if (f.N) doc["N"] = *f.N;
    if (f.hbar) doc["hbar"] = *f.hbar;
    if (f.order) doc["order"] = *f.order;
    if (f.construction) doc["construction"] = *f.construction;
    if (f.weight) doc["weight"] = {{"name", *f.weight}, {"params", nlohmann::json::object()}};
    if (!f.params.empty()) {
        if (!doc.contains("weight")) throw wtime::Error(wtime::ErrorKind::Config, "--param needs --weight or a config weight");
        for (const auto& kv : f.params) {
            const auto [k, v] = split_kv(kv);
            doc["weight"]["params"][k] = v;
        }
    }
    if (f.weight_samples) doc["weight_samples"] = *f.weight_samples;
    if (!f.checks.empty()) doc["checks"] = f.checks;
    for (const auto& kv : f.tolerances) {
        const auto [k, v] = split_kv(kv);
        doc["tolerances"][k] = v;
    }
    if (const char* env = std::getenv("WTIME_OUTPUT_DIR"); env && *env) doc["output_dir"] = env;
    if (f.out_dir) doc["output_dir"] = *f.out_dir;
    if (f.force) doc["force"] = true;
    if (f.sigma) doc["sigma"] = *f.sigma;
    if (f.input) doc["input_csv"] = *f.input;
    if (f.interpolate) doc["interpolate"] = true;
    return wtime::parse_run_config(doc);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Weighted-energy-space time operator toolkit"};
    app.require_subcommand(1);
    Flags f;

    auto* validate = app.add_subcommand("validate", "check the weight admissibility constraints");
    add_common(validate, f);

    auto* verify = app.add_subcommand("verify", "run the operator verification suite");
    add_common(verify, f);
    verify->add_option("--checks", f.checks, "subset of checks to run")->delimiter(',');
    verify->add_flag("--force", f.force, "verify even if the weight fails validation");

    auto* prop = app.add_subcommand("propagate", "apply exp(-i sigma T_w / hbar) to a wavefunction");
    add_common(prop, f);
    prop->add_option("--sigma", f.sigma, "energy shift");
    prop->add_option("--input", f.input, "input wavefunction CSV");
    prop->add_flag("--interpolate", f.interpolate, "allow shifts that are not multiples of h");

    auto* exportm = app.add_subcommand("export-matrix", "write the dense T_w matrix as CSV + JSON");
    add_common(exportm, f);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return wtime::kExitConfig;
    }

    wtime::RunConfig cfg;
    try {
        cfg = build_config(f);
    } catch (const wtime::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return e.kind() == wtime::ErrorKind::Io ? wtime::kExitIo : wtime::kExitConfig;
    }

    if (validate->parsed()) return wtime::cmd_validate(cfg, std::cerr);
    if (verify->parsed()) return wtime::cmd_verify(cfg, std::cout);
    if (prop->parsed()) return wtime::cmd_propagate(cfg, std::cout);
    return wtime::cmd_export_matrix(cfg, std::cout);
}
