#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "wtime/discretization.hpp"
#include "wtime/error.hpp"

using namespace wtime;

namespace {

WaveFunction from_function(const Grid& g, auto f, std::string label = {}) {
    std::vector<cplx> v(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) v[i] = f(g.node(i));
    return WaveFunction(g, std::move(v), std::move(label));
}

WaveFunction random_wave(const Grid& g, std::mt19937_64& rng) {
    std::normal_distribution<double> n(0.0, 1.0);
    std::vector<cplx> v(g.size());
    for (auto& x : v) x = {n(rng), n(rng)};
    return WaveFunction(g, std::move(v), "random");
}

}  // namespace

TEST_CASE("make_grid") {
    const Grid g(10.0, 5);
    CHECK(g.spacing() == 5.0);
    CHECK(g.nodes() == std::vector<double>{-10.0, -5.0, 0.0, 5.0, 10.0});

    const Grid fine(20.0, 4097);
    CHECK(fine.spacing() == 40.0 / 4096.0);
    CHECK(fine.node(fine.center()) == 0.0);

    CHECK(Grid(1.0, 3).nodes() == std::vector<double>{-1.0, 0.0, 1.0});

    CHECK_THROWS_AS(Grid(1.0, 4), Error);
    CHECK_THROWS_AS(Grid(1.0, 1), Error);
    CHECK_THROWS_AS(Grid(std::nan(""), 5), Error);
    CHECK_THROWS_AS(Grid(-1.0, 5), Error);
}

TEST_CASE("property: grid nodes are increasing, symmetric and span 2L") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> half(0.1, 100.0);
    std::uniform_int_distribution<std::size_t> count(1, 3000);
    for (int trial = 0; trial < 50; ++trial) {
        const Grid g(half(rng), 2 * count(rng) + 1);
        const auto E = g.nodes();
        for (std::size_t i = 1; i < E.size(); ++i) CHECK(E[i] > E[i - 1]);
        for (std::size_t i = 0; i < E.size(); ++i) CHECK(E[i] == -E[E.size() - 1 - i]);
        const double span = g.spacing() * static_cast<double>(g.size() - 1);
        CHECK(std::abs(span - 2.0 * g.half_width()) <= std::nextafter(2.0 * g.half_width(), 1e300) - 2.0 * g.half_width());
        CHECK(E.front() == -g.half_width());
        CHECK(E.back() == g.half_width());
    }
}

TEST_CASE("trapezoid rule") {
    const Grid g(3.5, 71);
    const QuadratureRule rule = make_trapezoid(g);
    CHECK(rule.node_weights.front() == g.spacing() / 2);
    CHECK(rule.node_weights[1] == g.spacing());
    double total = 0.0;
    for (double q : rule.node_weights) total += q;
    CHECK(total == doctest::Approx(7.0).epsilon(1e-14));
}

TEST_CASE("inner_product_w against analytic Gaussian integrals") {
    const Grid g(20.0, 4097);
    const QuadratureRule rule = make_trapezoid(g);
    const WaveFunction gauss = sample_test_function("gaussian", {{"mu", 0.0}, {"s", 1.0}}, g);
    const Weight flat = make_builtin_weight("flat", {{"c", 1.0}});
    const Weight sg = make_builtin_weight("shifted_gaussian", {{"a", 1.0}, {"s", 1.0}});

    // ∫ e^{-E²} dE = √π
    const cplx flat_ip = inner_product_w(gauss, gauss, flat, rule);
    CHECK(std::abs(flat_ip - std::sqrt(std::numbers::pi)) <= 1e-10);
    // ∫ e^{-E²}(1 + e^{-E²}) dE = √π + √(π/2)
    const cplx sg_ip = inner_product_w(gauss, gauss, sg, rule);
    const double oracle = std::sqrt(std::numbers::pi) + std::sqrt(std::numbers::pi / 2);
    CHECK(oracle == doctest::Approx(3.025768).epsilon(1e-6));
    CHECK(std::abs(sg_ip - oracle) <= 1e-10);

    const WaveFunction odd = from_function(g, [](double E) { return E * std::exp(-E * E / 2); });
    CHECK(std::abs(inner_product_w(odd, gauss, sg, rule)) <= 1e-12);

    const Grid other(20.0, 4095);
    CHECK_THROWS_AS(inner_product_w(gauss, sample_test_function("gaussian", {}, other), flat, rule), Error);
}

TEST_CASE("quadrature exactness for constants and linear functions") {
    const Grid g(6.0, 301);
    const QuadratureRule rule = make_trapezoid(g);
    const Weight flat = make_builtin_weight("flat", {});
    const WaveFunction one = sample_test_function("constant_one", {}, g);
    const WaveFunction line = from_function(g, [](double E) { return 2.0 * E + 3.0; });
    // ∫ 1 dE = 12 and ∫ (2E + 3) dE = 36 on [-6, 6]
    CHECK(std::abs(inner_product_w(one, one, flat, rule) - 12.0) <= 1e-12 * 12.0);
    CHECK(std::abs(inner_product_w(one, line, flat, rule) - 36.0) <= 1e-12 * 36.0);
}

TEST_CASE("norm_w") {
    const Grid g(20.0, 4097);
    const QuadratureRule rule = make_trapezoid(g);
    const Weight flat = make_builtin_weight("flat", {});
    CHECK(norm_w(WaveFunction(g, std::vector<cplx>(g.size())), flat, rule) == 0.0);
    const WaveFunction gauss = sample_test_function("gaussian", {}, g);
    CHECK(norm_w(gauss, flat, rule) == doctest::Approx(std::pow(std::numbers::pi, 0.25)).epsilon(1e-12));
    std::vector<cplx> doubled(gauss.values());
    for (auto& v : doubled) v *= 2.0;
    const double n2 = norm_w(WaveFunction(g, doubled), flat, rule);
    CHECK(std::abs(n2 - 2.0 * norm_w(gauss, flat, rule)) <= 1e-14 * n2);

    Weight negative{"negative", [](double) { return -1.0; }, nullptr, {}};
    CHECK_THROWS_AS(norm_w(gauss, negative, rule), Error);
}

TEST_CASE("property: conjugate symmetry and sesquilinearity") {
    std::mt19937_64 rng(99);
    std::normal_distribution<double> n(0.0, 1.0);
    const Grid g(5.0, 201);
    const QuadratureRule rule = make_trapezoid(g);
    const Weight sg = make_builtin_weight("shifted_gaussian", {});
    for (int trial = 0; trial < 25; ++trial) {
        const WaveFunction phi = random_wave(g, rng);
        const WaveFunction p1 = random_wave(g, rng);
        const WaveFunction p2 = random_wave(g, rng);
        const cplx a{n(rng), n(rng)};
        const cplx b{n(rng), n(rng)};

        const cplx fwd = inner_product_w(phi, p1, sg, rule);
        const cplx rev = inner_product_w(p1, phi, sg, rule);
        CHECK(std::abs(fwd - std::conj(rev)) <= 1e-14 * std::max(1.0, std::abs(fwd)));

        std::vector<cplx> combo(g.size());
        for (std::size_t i = 0; i < g.size(); ++i) combo[i] = a * p1[i] + b * p2[i];
        const cplx lhs = inner_product_w(phi, WaveFunction(g, combo), sg, rule);
        const cplx rhs = a * fwd + b * inner_product_w(phi, p2, sg, rule);
        CHECK(std::abs(lhs - rhs) <= 1e-13 * std::max(1.0, std::abs(rhs)));
    }
}

TEST_CASE("quadrature error decreases monotonically under refinement") {
    const Weight sg = make_builtin_weight("shifted_gaussian", {});
    const double oracle = std::sqrt(std::numbers::pi) + std::sqrt(std::numbers::pi / 2);
    double previous = 1e300;
    for (std::size_t N : {41u, 81u, 161u}) {
        const Grid g(20.0, N);
        const WaveFunction gauss = sample_test_function("gaussian", {}, g);
        const double err = std::abs(inner_product_w(gauss, gauss, sg, make_trapezoid(g)) - oracle);
        CHECK(err < previous);
        previous = err;
    }
}

TEST_CASE("sample_test_function") {
    const Grid g(20.0, 4097);
    const WaveFunction gauss = sample_test_function("gaussian", {{"mu", 0.0}, {"s", 1.0}}, g);
    CHECK(gauss[g.center()] == cplx{1.0, 0.0});
    CHECK(gauss.max_abs() == 1.0);

    const WaveFunction bump = sample_test_function("smooth_bump", {{"r", 5.0}}, g);
    REQUIRE(bump.support().has_value());
    for (std::size_t i = 0; i < g.size(); ++i) {
        if (std::abs(g.node(i)) >= 5.0) CHECK(bump[i] == cplx{0.0, 0.0});
        else CHECK(bump[i].real() > 0.0);
    }
    CHECK(bump[g.center()].real() == doctest::Approx(std::exp(-1.0)));

    const WaveFunction h1 = sample_test_function("hermite", {{"n", 1.0}, {"s", 1.0}}, g);
    CHECK(h1[g.center()] == cplx{0.0, 0.0});
    for (std::size_t i = 0; i < g.size(); ++i) CHECK(h1[i] == -h1[g.size() - 1 - i]);
    // H_3(1) = 8 - 12 = -4; node 5 of this grid sits at E = 1
    const Grid unit(4.0, 9);
    CHECK(sample_test_function("hermite", {{"n", 3.0}}, unit)[5].real() == doctest::Approx(-4.0 * std::exp(-0.5)));

    const WaveFunction one = sample_test_function("constant_one", {}, g);
    CHECK(one[0] == cplx{1.0, 0.0});

    CHECK_THROWS_AS(sample_test_function("sawtooth", {}, g), Error);
    CHECK_THROWS_AS(sample_test_function("smooth_bump", {{"r", 20.0}}, g), Error);
    CHECK_THROWS_AS(sample_test_function("smooth_bump", {{"r", 5.0}, {"mu", 16.0}}, g), Error);
    CHECK_THROWS_AS(sample_test_function("gaussian", {{"width", 1.0}}, g), Error);
    CHECK_THROWS_AS(sample_test_function("hermite", {{"n", 1.5}}, g), Error);
}

TEST_CASE("wavefunction invariants") {
    const Grid g(1.0, 5);
    CHECK_THROWS_AS(WaveFunction(g, std::vector<cplx>(4)), Error);
    std::vector<cplx> bad(5);
    bad[2] = {std::nan(""), 0.0};
    CHECK_THROWS_AS(WaveFunction(g, bad), Error);
}

TEST_CASE("wavefunction CSV round trip") {
    const Grid g(3.0, 31);
    std::vector<cplx> v(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) v[i] = {std::sin(g.node(i)), 1.0 / 3.0 * g.node(i)};
    const WaveFunction psi(g, v);
    std::stringstream buf;
    write_wavefunction_csv(buf, psi);
    const std::string text = buf.str();
    CHECK(text.rfind("# {", 0) == 0);
    const WaveFunction back = read_wavefunction_csv(buf);
    CHECK(back.grid() == g);
    CHECK(back.values() == psi.values());
    std::stringstream again;
    write_wavefunction_csv(again, back);
    CHECK(again.str() == text);

    std::stringstream broken("E,re,im\n0,0,0\n");
    CHECK_THROWS_AS(read_wavefunction_csv(broken), Error);
}
