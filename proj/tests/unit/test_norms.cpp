#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "mre/norms.hpp"
#include "mre/ops.hpp"
#include "mre/phantoms.hpp"

using namespace mre;

namespace {

ScalarField random_zero_trace(const Grid& g, std::mt19937_64& rng, int modes = 4) {
    std::normal_distribution<double> gauss;
    std::vector<double> coef(std::size_t(modes) * modes);
    for (double& c : coef) c = gauss(rng);
    return ScalarField::from(g, [&](double x, double y, double) {
        double acc = 0.0;
        for (int a = 1; a <= modes; ++a)
            for (int b = 1; b <= modes; ++b)
                acc += coef[std::size_t((a - 1) * modes + b - 1)] / (a * a + b * b) *
                       std::sin(a * M_PI * x) * std::sin(b * M_PI * y);
        return acc;
    });
}

/// Fourth-order first-derivative stencil in the interior, second order
/// (central / one-sided) near and at the boundary. The boundary rows carry
/// half quadrature weight, so the normal slope there must be included for
/// the oracle to integrate |grad f|^2 correctly. Used as an independent H1
/// oracle.
std::vector<double> deriv4(const Grid& g, const std::vector<double>& v, int axis) {
    std::vector<double> out(v.size(), 0.0);
    const double h = g.h[axis];
    g.for_nodes([&](const Index3& ix, std::int64_t id) {
        Index3 m2 = ix, m1 = ix, p1 = ix, p2 = ix;
        m2[axis] -= 2; m1[axis] -= 1; p1[axis] += 1; p2[axis] += 2;
        if (ix[axis] >= 2 && ix[axis] <= g.cells[axis] - 2) {
            out[std::size_t(id)] = (v[std::size_t(g.id(m2))] - 8 * v[std::size_t(g.id(m1))] +
                                    8 * v[std::size_t(g.id(p1))] - v[std::size_t(g.id(p2))]) /
                                   (12 * h);
        } else if (ix[axis] >= 1 && ix[axis] <= g.cells[axis] - 1) {
            out[std::size_t(id)] =
                (v[std::size_t(g.id(p1))] - v[std::size_t(g.id(m1))]) / (2 * h);
        } else if (ix[axis] == 0) {
            out[std::size_t(id)] = (-3 * v[std::size_t(id)] + 4 * v[std::size_t(g.id(p1))] -
                                    v[std::size_t(g.id(p2))]) /
                                   (2 * h);
        } else {
            out[std::size_t(id)] = (3 * v[std::size_t(id)] - 4 * v[std::size_t(g.id(m1))] +
                                    v[std::size_t(g.id(m2))]) /
                                   (2 * h);
        }
    });
    return out;
}

}  // namespace

TEST_CASE("single-mode closed form") {
    Grid g = Grid::square(64);
    ScalarField f = ScalarField::from(
        g, [](double x, double y, double) { return std::sin(M_PI * x) * std::sin(M_PI * y); });
    for (double s : {-1.5, -1.0, 0.0, 0.5, 1.0, 1.5, 2.0}) {
        double exact = std::sqrt(std::pow(1.0 + 2 * M_PI * M_PI, s) * 0.25);
        CHECK(h_s_norm(f, s) == doctest::Approx(exact).epsilon(1e-10));
    }
    CHECK(h_s_norm(ScalarField(g), 0.7) == 0.0);
}

TEST_CASE("s=0 equals trapezoid quadrature") {
    Grid g = Grid::square(48);
    std::mt19937_64 rng(7);
    for (int t = 0; t < 5; ++t) {
        ScalarField f = random_zero_trace(g, rng);
        double l2 = ops::quad_l2_norm(f);
        CHECK(h_s_norm(f, 0.0) == doctest::Approx(l2).epsilon(1e-6));
    }
}

TEST_CASE("s=1 agrees with an independent H1 quadrature") {
    Grid g = Grid::square(96);
    std::mt19937_64 rng(11);
    ScalarField f = random_zero_trace(g, rng, 3);
    auto w = ops::trap_weights(g);
    double acc = 0.0;
    for (std::size_t i = 0; i < f.values.size(); ++i) acc += w[i] * f.values[i] * f.values[i];
    for (int a = 0; a < 2; ++a) {
        auto d = deriv4(g, f.values, a);
        for (std::size_t i = 0; i < d.size(); ++i) acc += w[i] * d[i] * d[i];
    }
    CHECK(h_s_norm(f, 1.0) == doctest::Approx(std::sqrt(acc)).epsilon(1e-4));
}

TEST_CASE("interpolation inequality") {
    Grid g = Grid::square(32);
    std::mt19937_64 rng(3);
    for (int t = 0; t < 20; ++t) {
        ScalarField f = random_zero_trace(g, rng);
        double n0 = h_s_norm(f, 0.0), nh = h_s_norm(f, 0.5), n1 = h_s_norm(f, 1.0);
        CHECK(nh <= std::sqrt(n0 * n1) * (1.0 + 1e-12));
    }
}

TEST_CASE("monotone in s") {
    Grid g = Grid::square(32);
    std::mt19937_64 rng(5);
    ScalarField f = random_zero_trace(g, rng);
    double n0 = h_s_norm(f, 0.0);
    for (double& v : f.values) v /= n0;
    double prev = 0.0;
    for (double s : {-1.0, -0.5, 0.0, 0.5, 1.0, 1.5}) {
        double n = h_s_norm(f, s);
        CHECK(n >= prev);
        prev = n;
    }
}

TEST_CASE("fractional order requires zero trace") {
    Grid g = Grid::square(16);
    ScalarField f(g, 1.0);
    CHECK_THROWS_AS(h_s_norm(f, 0.5), NonzeroTrace);
    CHECK_NOTHROW(h_s_norm(f, 1.0));
    ScalarField z(g);
    CHECK(h_s_norm(z, 0.5) == 0.0);
}

TEST_CASE("vector norm sums components") {
    Grid g = Grid::square(32);
    ScalarField f = ScalarField::from(
        g, [](double x, double y, double) { return std::sin(M_PI * x) * std::sin(M_PI * y); });
    VectorField v(g);
    const std::int64_t n = g.num_nodes();
    for (std::int64_t i = 0; i < n; ++i) {
        v.values[std::size_t(i)] = f.values[std::size_t(i)];
        v.values[std::size_t(n + i)] = f.values[std::size_t(i)];
    }
    CHECK(h_s_norm(v, 0.5) ==
          doctest::Approx(std::sqrt(2.0) * h_s_norm(f, 0.5)).epsilon(1e-12));
}

TEST_CASE("boundary weight shape") {
    Grid g = Grid::square(16);
    BoundaryWeight w = make_boundary_weight(g);
    g.for_nodes([&](const Index3& ix, std::int64_t id) {
        if (g.on_boundary(ix))
            CHECK(w.rho.values[std::size_t(id)] == 0.0);
        else
            CHECK(w.rho.values[std::size_t(id)] > 0.0);
    });
}

TEST_CASE("weighted norm cancellation and caps") {
    Grid g = Grid::square(48);
    BoundaryWeight w = make_boundary_weight(g);
    ScalarField gfun = ScalarField::from(
        g, [](double x, double y, double) { return std::cos(2 * x + y); });
    ScalarField f(g);
    for (std::size_t i = 0; i < f.values.size(); ++i)
        f.values[i] = w.rho.values[i] * w.rho.values[i] * gfun.values[i];

    // rho^-2 (rho^2 g) = g on the interior quadrature
    double lhs = weighted_norm(f, -2, w);
    auto qw = ops::trap_weights(g);
    double acc = 0.0;
    g.for_nodes([&](const Index3& ix, std::int64_t id) {
        if (g.on_boundary(ix)) return;
        double v = gfun.values[std::size_t(id)];
        acc += qw[std::size_t(id)] * v * v;
    });
    CHECK(lhs == doctest::Approx(std::sqrt(acc)).epsilon(1e-8));

    CHECK(weighted_norm(ScalarField(g), -2, w) == 0.0);
    ScalarField one(g, 1.0);
    CHECK_THROWS_AS(weighted_norm(one, -2, w, BaseNorm::L2, 10.0), UnboundedWeightedField);
}

TEST_CASE("stability experiment basics") {
    Grid g = Grid::square(24);
    ScalarField mu1(g, 1.0);
    PhantomSpec ps;
    ps.inclusions = {{{0.5, 0.5, 0}, 0.3, 0.1, 0.12}};
    ScalarField mu2 = make_phantom(ps, g);

    ExcitationSpec es;
    es.kind = ExcitationKind::RandomSolenoidal;
    es.seed = 9;
    VectorField bc = make_excitation(es, g);

    NormSpec spec;
    spec.s = 0.51;
    auto res = stability_experiment({{mu1, mu1}, {mu1, mu2}}, {bc}, 1.0, spec, {0.0, 0.1});
    REQUIRE(res.rows.size() == 2);
    CHECK(res.rows[0].degenerate);
    CHECK(!res.rows[1].degenerate);
    CHECK(res.rows[1].ratio > 0.0);
    CHECK(res.rows[1].cert_pass);
    CHECK(res.max_ratio == doctest::Approx(res.rows[1].ratio));

    CHECK_THROWS_AS(stability_experiment({}, {bc}, 1.0, spec), DegenerateInput);
    NormSpec bad;
    bad.s = 9.0;
    CHECK_THROWS_AS(stability_experiment({{mu1, mu2}}, {bc}, 1.0, bad), ConfigError);
}
