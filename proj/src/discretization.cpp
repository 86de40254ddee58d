#include "wtime/discretization.hpp"

#include <cmath>
#include <cstdio>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <set>
#include <sstream>

#include "wtime/error.hpp"

namespace wtime {

Grid::Grid(double half_width, std::size_t nodes) : L_(half_width), N_(nodes), h_(0.0) {
    if (!std::isfinite(half_width) || !(half_width > 0.0)) {
        throw Error(ErrorKind::InvalidArgument, "grid: L must be finite and positive");
    }
    if (nodes < 3) throw Error(ErrorKind::InvalidArgument, "grid: N must be >= 3");
    if (nodes % 2 == 0) throw Error(ErrorKind::InvalidArgument, "grid: N must be odd");
    h_ = 2.0 * half_width / static_cast<double>(nodes - 1);
}

double Grid::node(std::size_t i) const {
    if (i == 0) return -L_;
    if (i == N_ - 1) return L_;
    const auto c = static_cast<double>(center());
    return (static_cast<double>(i) - c) * h_;
}

std::vector<double> Grid::nodes() const {
    std::vector<double> out(N_);
    for (std::size_t i = 0; i < N_; ++i) out[i] = node(i);
    return out;
}

WaveFunction::WaveFunction(Grid grid, std::vector<cplx> values, std::string label,
                           std::optional<Support> support)
    : grid_(grid), values_(std::move(values)), label_(std::move(label)), support_(support) {
    if (values_.size() != grid_.size()) {
        throw Error(ErrorKind::InvalidArgument, "wavefunction: " + std::to_string(values_.size()) +
                                                    " samples for a grid of " +
                                                    std::to_string(grid_.size()) + " nodes");
    }
    for (std::size_t i = 0; i < values_.size(); ++i) {
        if (!std::isfinite(values_[i].real()) || !std::isfinite(values_[i].imag())) {
            throw Error(ErrorKind::InvalidArgument,
                        "wavefunction '" + label_ + "': non-finite sample at node " + std::to_string(i));
        }
    }
}

double WaveFunction::max_abs() const {
    double m = 0.0;
    for (const auto& v : values_) m = std::max(m, std::abs(v));
    return m;
}

WaveFunction with_values(const WaveFunction& like, std::vector<cplx> values, std::string label) {
    return WaveFunction(like.grid(), std::move(values), std::move(label), like.support());
}

QuadratureRule make_trapezoid(const Grid& grid) {
    QuadratureRule rule;
    rule.node_weights.assign(grid.size(), grid.spacing());
    rule.node_weights.front() = 0.5 * grid.spacing();
    rule.node_weights.back() = 0.5 * grid.spacing();
    return rule;
}

NodeWeights sample_weight(const Weight& w, const Grid& grid) {
    NodeWeights out;
    out.w.resize(grid.size());
    out.sqrt_w.resize(grid.size());
    out.half_log_derivative.resize(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double E = grid.node(i);
        out.half_log_derivative[i] = weight_log_derivative(w, E);  // throws on w <= 0
        out.w[i] = w(E);
        out.sqrt_w[i] = std::sqrt(out.w[i]);
    }
    return out;
}

cplx weighted_sum(const WaveFunction& phi, const WaveFunction& psi, std::span<const double> node_metric,
                  const QuadratureRule& rule) {
    if (!(phi.grid() == psi.grid())) {
        throw Error(ErrorKind::GridMismatch, "inner product: wavefunctions live on different grids");
    }
    if (rule.node_weights.size() != phi.size() || node_metric.size() != phi.size()) {
        throw Error(ErrorKind::GridMismatch, "inner product: quadrature rule does not match the grid");
    }
    cplx acc{0.0, 0.0};
    for (std::size_t i = 0; i < phi.size(); ++i) {
        acc += rule.node_weights[i] * node_metric[i] * (std::conj(phi[i]) * psi[i]);
    }
    return acc;
}

cplx inner_product_w(const WaveFunction& phi, const WaveFunction& psi, const Weight& w,
                     const QuadratureRule& rule) {
    const Grid& g = phi.grid();
    std::vector<double> metric(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
        metric[i] = w(g.node(i));
        if (!std::isfinite(metric[i])) {
            throw Error(ErrorKind::InvalidWeight, "inner product: weight '" + w.id +
                                                      "' is not finite at node " + std::to_string(i));
        }
    }
    return weighted_sum(phi, psi, metric, rule);
}

namespace {

double norm_from_self_product(cplx self) {
    const double scale = std::max(std::abs(self), std::numeric_limits<double>::min());
    if (std::abs(self.imag()) > 1e-14 * scale) {
        throw Error(ErrorKind::InvalidArgument, "norm: self inner product has an imaginary part");
    }
    if (self.real() < -1e-14 * scale) {
        throw Error(ErrorKind::InvalidWeight, "norm: negative self inner product (broken weight or quadrature)");
    }
    return std::sqrt(std::max(self.real(), 0.0));
}

}  // namespace

double norm_w(const WaveFunction& psi, const Weight& w, const QuadratureRule& rule) {
    return norm_from_self_product(inner_product_w(psi, psi, w, rule));
}

double norm_flat(const WaveFunction& psi, const QuadratureRule& rule) {
    const std::vector<double> ones(psi.size(), 1.0);
    return norm_from_self_product(weighted_sum(psi, psi, ones, rule));
}

namespace {

void check_params(const std::string& kind, const ParamMap& params, std::initializer_list<const char*> allowed) {
    std::set<std::string> ok(allowed.begin(), allowed.end());
    for (const auto& [key, value] : params) {
        if (!ok.count(key)) {
            throw Error(ErrorKind::InvalidArgument, "test function '" + kind + "': unknown parameter '" + key + "'");
        }
        if (!std::isfinite(value)) {
            throw Error(ErrorKind::InvalidArgument, "test function '" + kind + "': parameter '" + key + "' is not finite");
        }
    }
}

double get(const ParamMap& params, const char* key, double fallback) {
    auto it = params.find(key);
    return it == params.end() ? fallback : it->second;
}

double hermite_poly(int n, double x) {
    if (n == 0) return 1.0;
    double prev = 1.0;
    double cur = 2.0 * x;
    for (int k = 1; k < n; ++k) {
        const double next = 2.0 * x * cur - 2.0 * k * prev;
        prev = cur;
        cur = next;
    }
    return cur;
}

std::string describe(const std::string& kind, const ParamMap& params) {
    std::ostringstream s;
    s << kind;
    for (const auto& [k, v] : params) s << ' ' << k << '=' << v;
    return s.str();
}

}  // namespace

WaveFunction sample_test_function(const std::string& kind, const ParamMap& params, const Grid& grid) {
    std::vector<cplx> values(grid.size());
    std::optional<Support> support;
    if (kind == "gaussian") {
        check_params(kind, params, {"mu", "s"});
        const double mu = get(params, "mu", 0.0);
        const double s = get(params, "s", 1.0);
        if (!(s > 0.0)) throw Error(ErrorKind::InvalidArgument, "gaussian: s must be positive");
        for (std::size_t i = 0; i < grid.size(); ++i) {
            const double x = grid.node(i) - mu;
            values[i] = std::exp(-(x * x) / (2.0 * s * s));
        }
    } else if (kind == "hermite") {
        check_params(kind, params, {"n", "s"});
        const double n = get(params, "n", 0.0);
        const double s = get(params, "s", 1.0);
        if (n < 0.0 || n != std::floor(n) || n > 64.0) {
            throw Error(ErrorKind::InvalidArgument, "hermite: n must be an integer in [0, 64]");
        }
        if (!(s > 0.0)) throw Error(ErrorKind::InvalidArgument, "hermite: s must be positive");
        for (std::size_t i = 0; i < grid.size(); ++i) {
            const double x = grid.node(i) / s;
            values[i] = hermite_poly(static_cast<int>(n), x) * std::exp(-0.5 * x * x);
        }
    } else if (kind == "smooth_bump") {
        check_params(kind, params, {"r", "mu"});
        const double r = get(params, "r", 1.0);
        const double mu = get(params, "mu", 0.0);
        if (!(r > 0.0)) throw Error(ErrorKind::InvalidArgument, "smooth_bump: r must be positive");
        if (r >= grid.half_width() || std::abs(mu) + r >= grid.half_width()) {
            throw Error(ErrorKind::InvalidArgument, "smooth_bump: support must lie strictly inside (-L, L)");
        }
        for (std::size_t i = 0; i < grid.size(); ++i) {
            const double x = (grid.node(i) - mu) / r;
            values[i] = std::abs(x) < 1.0 ? std::exp(-1.0 / (1.0 - x * x)) : 0.0;
        }
        support = Support{mu - r, mu + r};
    } else if (kind == "constant_one") {
        check_params(kind, params, {});
        values.assign(grid.size(), cplx{1.0, 0.0});
    } else {
        throw Error(ErrorKind::InvalidArgument, "unknown test function '" + kind + "'");
    }
    return WaveFunction(grid, std::move(values), describe(kind, params), support);
}

WaveFunction test_function_from_json(const nlohmann::json& spec, const Grid& grid) {
    if (!spec.is_object() || !spec.contains("kind") || !spec.at("kind").is_string()) {
        throw Error(ErrorKind::Config, "test function: expected {\"kind\": string, \"params\": {...}}");
    }
    ParamMap params;
    for (const auto& [key, value] : spec.items()) {
        if (key == "kind") continue;
        if (key != "params") throw Error(ErrorKind::Config, "test function: unknown key '" + key + "'");
        for (const auto& [pk, pv] : value.items()) {
            if (!pv.is_number()) throw Error(ErrorKind::Config, "test function params." + pk + " must be a number");
            params[pk] = pv.get<double>();
        }
    }
    return sample_test_function(spec.at("kind").get<std::string>(), params, grid);
}

void write_wavefunction_csv(std::ostream& out, const WaveFunction& psi) {
    const Grid& g = psi.grid();
    nlohmann::json header = {{"L", g.half_width()}, {"N", g.size()}, {"h", g.spacing()}};
    out << "# " << header.dump() << '\n';
    out << "E,re,im\n";
    char buf[128];
    for (std::size_t i = 0; i < psi.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", g.node(i), psi[i].real(), psi[i].imag());
        out << buf;
    }
}

WaveFunction read_wavefunction_csv(std::istream& in, std::string label) {
    std::string line;
    if (!std::getline(in, line) || line.rfind("# ", 0) != 0) {
        throw Error(ErrorKind::Config, "wavefunction csv: missing '# {json}' grid header");
    }
    nlohmann::json header;
    try {
        header = nlohmann::json::parse(line.substr(2));
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::Config, std::string("wavefunction csv: bad header: ") + e.what());
    }
    if (!header.contains("L") || !header.contains("N")) {
        throw Error(ErrorKind::Config, "wavefunction csv: header needs L and N");
    }
    const Grid grid(header.at("L").get<double>(), header.at("N").get<std::size_t>());
    if (!std::getline(in, line) || line != "E,re,im") {
        throw Error(ErrorKind::Config, "wavefunction csv: expected column line 'E,re,im'");
    }
    std::vector<cplx> values;
    values.reserve(grid.size());
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        double E = 0, re = 0, im = 0;
        if (std::sscanf(line.c_str(), "%lf,%lf,%lf", &E, &re, &im) != 3) {
            throw Error(ErrorKind::Config, "wavefunction csv: malformed row " + std::to_string(values.size()));
        }
        const double expected = grid.node(values.size() < grid.size() ? values.size() : 0);
        if (values.size() < grid.size() && std::abs(E - expected) > 1e-9 * std::max(1.0, grid.half_width())) {
            throw Error(ErrorKind::Config, "wavefunction csv: row " + std::to_string(values.size()) +
                                               " energy does not match the header grid");
        }
        values.emplace_back(re, im);
    }
    return WaveFunction(grid, std::move(values), std::move(label));
}

}  // namespace wtime
