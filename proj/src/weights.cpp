#include "wtime/weights.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <sstream>

#include "wtime/error.hpp"

namespace wtime {

const char* to_string(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::InvalidArgument: return "invalid_argument";
        case ErrorKind::InvalidWeight: return "invalid_weight";
        case ErrorKind::GridMismatch: return "grid_mismatch";
        case ErrorKind::DecayMargin: return "decay_margin";
        case ErrorKind::Unresolved: return "unresolved";
        case ErrorKind::MarginViolation: return "margin_violation";
        case ErrorKind::Unaligned: return "unaligned_shift";
        case ErrorKind::DenseCap: return "dense_cap";
        case ErrorKind::Config: return "config";
        case ErrorKind::Io: return "io";
    }
    return "unknown";
}

namespace {

double param_or(const ParamMap& params, const std::string& key, double fallback) {
    auto it = params.find(key);
    return it == params.end() ? fallback : it->second;
}

void reject_unknown(const std::string& name, const ParamMap& params,
                    std::initializer_list<const char*> allowed) {
    std::set<std::string> ok(allowed.begin(), allowed.end());
    for (const auto& [key, value] : params) {
        if (!ok.count(key)) {
            throw Error(ErrorKind::InvalidArgument,
                        "weight '" + name + "': unknown parameter '" + key + "'");
        }
        if (!std::isfinite(value)) {
            throw Error(ErrorKind::InvalidArgument,
                        "weight '" + name + "': parameter '" + key + "' is not finite");
        }
    }
}

}  // namespace

const std::vector<std::string>& builtin_weight_names() {
    static const std::vector<std::string> names = {"flat", "shifted_gaussian", "sinusoidal",
                                                   "gaussian_violating"};
    return names;
}

Weight make_builtin_weight(const std::string& name, const ParamMap& params) {
    Weight w;
    w.id = name;
    if (name == "flat") {
        reject_unknown(name, params, {"c"});
        const double c = param_or(params, "c", 1.0);
        if (!(c > 0.0)) {
            throw Error(ErrorKind::InvalidWeight, "weight 'flat' requires c > 0");
        }
        w.eval_w = [c](double) { return c; };
        w.eval_dw = [](double) { return 0.0; };
        w.params = {{"c", c}};
    } else if (name == "shifted_gaussian") {
        reject_unknown(name, params, {"a", "s"});
        const double a = param_or(params, "a", 1.0);
        const double s = param_or(params, "s", 1.0);
        if (!(s > 0.0)) {
            throw Error(ErrorKind::InvalidArgument, "weight 'shifted_gaussian' requires s > 0");
        }
        // min over E is 1 + min(a, 0)
        if (!(a > -1.0)) {
            throw Error(ErrorKind::InvalidWeight,
                        "weight 'shifted_gaussian' requires a > -1 (w(0) = 1 + a must be positive)");
        }
        w.eval_w = [a, s](double E) { return 1.0 + a * std::exp(-(E * E) / (s * s)); };
        w.eval_dw = [a, s](double E) { return -2.0 * a * E / (s * s) * std::exp(-(E * E) / (s * s)); };
        w.params = {{"a", a}, {"s", s}};
    } else if (name == "sinusoidal") {
        reject_unknown(name, params, {"c", "a"});
        const double c = param_or(params, "c", 2.0);
        const double a = param_or(params, "a", 1.0);
        if (!(c > std::abs(a))) {
            throw Error(ErrorKind::InvalidWeight,
                        "weight 'sinusoidal' requires c > |a| (otherwise w reaches c - |a| <= 0)");
        }
        w.eval_w = [c, a](double E) { return c + a * std::sin(E); };
        w.eval_dw = [a](double E) { return a * std::cos(E); };
        w.params = {{"a", a}, {"c", c}};
    } else if (name == "gaussian_violating") {
        reject_unknown(name, params, {});
        w.eval_w = [](double E) { return std::exp(-E * E); };
        w.eval_dw = [](double E) { return -2.0 * E * std::exp(-E * E); };
    } else {
        throw Error(ErrorKind::InvalidArgument, "unknown weight '" + name + "'");
    }
    return w;
}

Weight make_tabulated_weight(std::vector<double> energies, std::vector<double> values, std::string id) {
    if (energies.size() != values.size() || energies.size() < 2) {
        throw Error(ErrorKind::InvalidArgument, "tabulated weight needs >= 2 matching (E, w) samples");
    }
    std::vector<double> logs(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (!std::isfinite(energies[i]) || !(values[i] > 0.0) || !std::isfinite(values[i])) {
            throw Error(ErrorKind::InvalidWeight, "tabulated weight sample " + std::to_string(i) +
                                                      " is non-positive or non-finite");
        }
        if (i > 0 && !(energies[i] > energies[i - 1])) {
            throw Error(ErrorKind::InvalidArgument, "tabulated weight energies must be strictly increasing");
        }
        logs[i] = std::log(values[i]);
    }
    Weight w;
    w.id = std::move(id);
    w.params = {{"samples", static_cast<double>(values.size())}};
    w.eval_w = [E = std::move(energies), lw = std::move(logs)](double x) {
        if (x <= E.front()) return std::exp(lw.front());
        if (x >= E.back()) return std::exp(lw.back());
        const auto hi = static_cast<std::size_t>(std::upper_bound(E.begin(), E.end(), x) - E.begin());
        const std::size_t lo = hi - 1;
        const double t = (x - E[lo]) / (E[hi] - E[lo]);
        return std::exp((1.0 - t) * lw[lo] + t * lw[hi]);
    };
    return w;
}

Weight weight_from_json(const nlohmann::json& spec) {
    if (!spec.is_object() || !spec.contains("name") || !spec.at("name").is_string()) {
        throw Error(ErrorKind::Config, "weight: expected {\"name\": string, \"params\": {...}}");
    }
    for (const auto& [key, value] : spec.items()) {
        if (key != "name" && key != "params") {
            throw Error(ErrorKind::Config, "weight: unknown key '" + key + "'");
        }
    }
    ParamMap params;
    if (spec.contains("params")) {
        const auto& p = spec.at("params");
        if (!p.is_object()) throw Error(ErrorKind::Config, "weight.params must be an object");
        for (const auto& [key, value] : p.items()) {
            if (!value.is_number()) {
                throw Error(ErrorKind::Config, "weight.params." + key + " must be a number");
            }
            params[key] = value.get<double>();
        }
    }
    return make_builtin_weight(spec.at("name").get<std::string>(), params);
}

nlohmann::json weight_to_json(const Weight& w) {
    nlohmann::json params = nlohmann::json::object();
    for (const auto& [key, value] : w.params) params[key] = value;
    return {{"name", w.id}, {"params", params}};
}

double weight_derivative(const Weight& w, double E) {
    if (w.eval_dw) return w.eval_dw(E);
    const double delta = numeric_derivative_step(E);
    return (w.eval_w(E + delta) - w.eval_w(E - delta)) / (2.0 * delta);
}

double weight_log_derivative(const Weight& w, double E) {
    const double value = w.eval_w(E);
    if (!(value > 0.0) || !std::isfinite(value)) {
        std::ostringstream msg;
        msg << "weight '" << w.id << "' is not positive at E = " << E << " (w = " << value << ")";
        throw Error(ErrorKind::InvalidWeight, msg.str());
    }
    const double dw = weight_derivative(w, E);
    if (!std::isfinite(dw)) {
        std::ostringstream msg;
        msg << "weight '" << w.id << "' has a non-finite derivative at E = " << E;
        throw Error(ErrorKind::InvalidWeight, msg.str());
    }
    return dw / (2.0 * value);
}

namespace {

// max |Δ ln w| / h over one grid; +inf if ln w is undefined somewhere.
double max_log_quotient(const Weight& w, const Grid& g) {
    double worst = 0.0;
    double prev = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        const double value = w(g.node(i));
        if (!(value > 0.0) || !std::isfinite(value)) {
            return std::numeric_limits<double>::infinity();
        }
        const double lw = std::log(value);
        if (i > 0) worst = std::max(worst, std::abs(lw - prev) / g.spacing());
        prev = lw;
    }
    return worst;
}

}  // namespace

WeightValidationReport validate_weight(const Weight& w, const Grid& probe, const ValidationTolerances& tol) {
    WeightValidationReport report;
    report.probe_half_width = probe.half_width();
    report.probe_nodes = probe.size();

    // positivity
    report.worst_value = std::numeric_limits<double>::infinity();
    bool finite = true;
    for (std::size_t i = 0; i < probe.size(); ++i) {
        const double E = probe.node(i);
        const double value = w(E);
        if (!std::isfinite(value)) finite = false;
        if (value < report.worst_value || std::isnan(value)) {
            report.worst_value = value;
            report.worst_location = E;
        }
    }
    report.positivity_ok = finite && report.worst_value > tol.positivity_floor;

    // local absolute continuity of ln w, sampled proxy on three nested grids
    const std::size_t intervals = probe.size() - 1;
    const double q0 = max_log_quotient(w, probe);
    const double q1 = max_log_quotient(w, Grid(probe.half_width(), 2 * intervals + 1));
    const double q2 = max_log_quotient(w, Grid(probe.half_width(), 4 * intervals + 1));
    report.max_quotient = std::max({q0, q1, q2});
    if (std::isfinite(report.max_quotient)) {
        report.quotient_growth = q0 > 0.0 ? q2 / q0 : (q2 > 0.0 ? std::numeric_limits<double>::infinity() : 1.0);
    } else {
        report.quotient_growth = std::numeric_limits<double>::infinity();
    }
    report.smoothness_ok = report.max_quotient <= tol.smoothness_bound &&
                           report.quotient_growth <= tol.smoothness_growth;

    // bounds outside a compact set: E0 candidates {0, L/4, L/2}
    const double L = probe.half_width();
    for (double E0 : {0.0, L / 4.0, L / 2.0}) {
        double lo = std::numeric_limits<double>::infinity();
        double hi = -std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < probe.size(); ++i) {
            const double E = probe.node(i);
            if (std::abs(E) <= E0) continue;
            const double value = w(E);
            lo = std::min(lo, value);
            hi = std::max(hi, value);
        }
        report.m = lo;
        report.M = hi;
        report.E0 = E0;
        if (std::isfinite(lo) && std::isfinite(hi) && lo >= tol.lower_bound_floor && lo > 0.0) {
            report.bounds_ok = true;
            break;
        }
    }
    return report;
}

nlohmann::json to_json(const WeightValidationReport& r) {
    auto num = [](double x) -> nlohmann::json {
        if (std::isfinite(x)) return x;
        return std::isnan(x) ? "nan" : (x > 0 ? "inf" : "-inf");
    };
    return {
        {"all_ok", r.all_ok()},
        {"positivity", {{"ok", r.positivity_ok}, {"worst_value", num(r.worst_value)},
                        {"worst_location", num(r.worst_location)}}},
        {"smoothness", {{"ok", r.smoothness_ok}, {"max_quotient", num(r.max_quotient)},
                        {"quotient_growth", num(r.quotient_growth)},
                        {"note", "sampled proxy for local absolute continuity of ln w"}}},
        {"bounds", {{"ok", r.bounds_ok}, {"m", num(r.m)}, {"M", num(r.M)}, {"E0", num(r.E0)}}},
        {"samples_used", {{"L", r.probe_half_width}, {"N", r.probe_nodes}}},
    };
}

}  // namespace wtime
