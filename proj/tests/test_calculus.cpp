#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "parnewt/calculus.hpp"

using namespace parnewt;

namespace {

SpaceTimeField random_field(GridPtr g, std::mt19937_64& rng) {
    SpaceTimeField f(g);
    for (int i = 0; i < g->node_count(); ++i)
        f(i) = 2.0 * (static_cast<double>(rng() >> 11) * 0x1p-53) - 1.0;
    return f;
}

}  // namespace

TEST_CASE("diff_x: exact on constants, affine and quadratic fields") {
    GridPtr g = build_grid(1.0, 11, 1.0, 5);
    const SpaceTimeField c = sample(g, [](const double*, double) { return 3.5; });
    const SpaceTimeField x = sample(g, [](const double* p, double) { return p[0]; });
    const SpaceTimeField x2 = sample(g, [](const double* p, double) { return p[0] * p[0]; });

    CHECK(sup_norm(diff_x(c, 0)) == doctest::Approx(0.0).epsilon(1e-14));

    const SpaceTimeField dx = diff_x(x, 0);
    for (int i = 0; i < g->node_count(); ++i) CHECK(dx(i) == doctest::Approx(1.0).epsilon(1e-12));

    // central difference is exact on quadratics at interior nodes
    const SpaceTimeField dx2 = diff_x(x2, 0);
    for (int k = 0; k < g->steps(); ++k)
        for (int i = 1; i < 10; ++i)
            CHECK(dx2.at(i, k) == doctest::Approx(2.0 * g->coord(0, i)).epsilon(1e-12));

    CHECK_THROWS_AS(diff_x(x, 1), std::invalid_argument);
}

TEST_CASE("diff_xx: 3-point stencil on quadratics, cross stencil on x*y") {
    GridPtr g1 = build_grid(1.0, 11, 1.0, 4);
    const SpaceTimeField x2 = sample(g1, [](const double* p, double) { return p[0] * p[0]; });
    const SpaceTimeField d2 = diff_xx(x2, 0, 0);
    for (int k = 0; k < g1->steps(); ++k)
        for (int i = 1; i < 10; ++i) CHECK(d2.at(i, k) == doctest::Approx(2.0).epsilon(1e-11));

    const SpaceTimeField c = sample(g1, [](const double*, double) { return -1.25; });
    CHECK(sup_norm(diff_xx(c, 0, 0)) == doctest::Approx(0.0).epsilon(1e-13));

    GridPtr g2 = build_grid(2, {1.0, 1.0}, {9, 9}, 1.0, 3);
    const SpaceTimeField xy = sample(g2, [](const double* p, double) { return p[0] * p[1]; });
    const SpaceTimeField mixed = diff_xx(xy, 0, 1);
    for (int node = 0; node < g2->node_count(); ++node)
        if (g2->classify(node) == NodeClass::Interior)
            CHECK(mixed(node) == doctest::Approx(1.0).epsilon(1e-11));
}

TEST_CASE("diff_t: backward difference by hand") {
    GridPtr g = build_grid(1.0, 5, 1.0, 11);  // dt = 0.1
    const SpaceTimeField lin = sample(g, [](const double*, double t) { return t; });
    const SpaceTimeField dlin = diff_t(lin);
    for (int k = 1; k < g->steps(); ++k)
        for (int s = 0; s < g->space_count(); ++s)
            CHECK(dlin.at(s, k) == doctest::Approx(1.0).epsilon(1e-12));

    const SpaceTimeField c = sample(g, [](const double*, double) { return 7.0; });
    CHECK(sup_norm(diff_t(c)) == doctest::Approx(0.0).epsilon(1e-13));

    const SpaceTimeField t2 = sample(g, [](const double*, double t) { return t * t; });
    // backward difference of t^2 at t = 0.5: (0.25 - 0.16)/0.1
    CHECK(diff_t(t2).at(2, 5) == doctest::Approx(0.9).epsilon(1e-12));
}

TEST_CASE("lp_norm: exact on constants, analytic for sin(pi x)") {
    GridPtr g = build_grid(1.0, 51, 1.0, 6);
    const SpaceTimeField one = sample(g, [](const double*, double) { return 1.0; });
    for (double p : {1.0, 2.0, 4.0}) CHECK(lp_norm(one, p) == doctest::Approx(1.0).epsilon(1e-13));

    GridPtr gq = build_grid(2.0, 41, 0.5, 6);  // |Q| = 1
    const SpaceTimeField c = sample(gq, [](const double*, double) { return -3.0; });
    CHECK(lp_norm(c, 3.0) == doctest::Approx(3.0 * std::pow(1.0, 1.0 / 3.0)).epsilon(1e-12));

    // ∫ sin²(pi x) dx = 1/2 on [0,1]
    const SpaceTimeField s = sample(g, [](const double* p, double) { return std::sin(M_PI * p[0]); });
    CHECK(lp_norm(s, 2.0) == doctest::Approx(std::sqrt(0.5)).epsilon(2e-3));

    CHECK_THROWS_AS(lp_norm(one, 0.5), std::invalid_argument);
}

TEST_CASE("sup, W1inf and W21p norms on closed-form fields") {
    GridPtr g = build_grid(1.0, 51, 1.0, 51);
    const SpaceTimeField zero(g);
    CHECK(sup_norm(zero) == 0.0);
    CHECK(w1inf_norm(zero) == 0.0);
    CHECK(w21p_norm(zero, 2.0) == 0.0);

    const SpaceTimeField c = sample(g, [](const double*, double) { return -2.0; });
    CHECK(w1inf_norm(c) == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(w21p_norm(c, 2.0) == doctest::Approx(2.0).epsilon(1e-12));

    // u = x(1-x)t on the unit cylinder, p = 2: closed-form constituents
    //   ||u||   = sqrt(1/90), ||Du|| = sqrt(1/9), ||D²u|| = sqrt(4/3), ||D_t u|| = sqrt(1/30)
    const SpaceTimeField u =
        sample(g, [](const double* p, double t) { return p[0] * (1.0 - p[0]) * t; });
    const double expected = std::sqrt(1.0 / 90.0) + std::sqrt(1.0 / 9.0) + std::sqrt(4.0 / 3.0) +
                            std::sqrt(1.0 / 30.0);
    CHECK(w21p_norm(u, 2.0) == doctest::Approx(expected).epsilon(2e-3));
    CHECK_THROWS_AS(w21p_norm(u, 1.0), std::invalid_argument);
}

TEST_CASE("x-continuity modulus: node-pair enumeration semantics") {
    GridPtr g = build_grid(1.0, 11, 1.0, 4);
    const SpaceTimeField c = sample(g, [](const double*, double) { return 4.0; });
    for (double r : {0.15, 0.25, 0.8}) CHECK(x_continuity_modulus(c, r) == 0.0);

    const SpaceTimeField x = sample(g, [](const double* p, double) { return p[0]; });
    CHECK(x_continuity_modulus(x, 0.25) == doctest::Approx(0.2).epsilon(1e-12));

    std::mt19937_64 rng(7);
    const SpaceTimeField f = random_field(g, rng);
    double prev = 0.0;
    for (double r : {0.1, 0.2, 0.4, 0.9}) {
        const double m = x_continuity_modulus(f, r);
        CHECK(m >= prev);
        prev = m;
    }
}

TEST_CASE("Hölder quotient: u = t g(x) attains the largest time gap") {
    GridPtr g = build_grid(1.0, 21, 1.0, 6);
    CHECK(holder_quotient(SpaceTimeField(g), 1.0) == 0.0);

    const SpaceTimeField u =
        sample(g, [](const double* p, double t) { return t * std::sin(M_PI * p[0]); });
    // slice C¹ norm of g, measured with the same discrete gradient
    const SpaceTimeField gx = sample(g, [](const double* p, double) { return std::sin(M_PI * p[0]); });
    const double g_c1 = sup_norm(gx) + sup_norm(gradient_magnitude(gx));
    CHECK(holder_quotient(u, 1.0) == doctest::Approx(g_c1 * std::sqrt(1.0)).epsilon(1e-10));

    CHECK(holder_quotient(3.0 * u, 1.0) == doctest::Approx(3.0 * holder_quotient(u, 1.0)).epsilon(1e-12));
    CHECK_THROWS_AS(holder_quotient(u, 0.0), std::invalid_argument);
    CHECK(default_holder_exponent(1, 4.0) == doctest::Approx(0.25));
}

TEST_CASE("property: norms are homogeneous and satisfy the triangle inequality") {
    GridPtr g = build_grid(2, {1.0, 1.0}, {7, 7}, 1.0, 5);
    std::mt19937_64 rng(123);
    for (int trial = 0; trial < 10; ++trial) {
        const SpaceTimeField u = random_field(g, rng);
        const SpaceTimeField v = random_field(g, rng);
        const double alpha = -2.0 + 4.0 * (static_cast<double>(rng() >> 11) * 0x1p-53);
        for (double p : {2.0, 4.0}) {
            CHECK(lp_norm(alpha * u, p) == doctest::Approx(std::abs(alpha) * lp_norm(u, p)).epsilon(1e-10));
            CHECK(lp_norm(u + v, p) <= lp_norm(u, p) + lp_norm(v, p) + 1e-12);
            CHECK(w21p_norm(alpha * u, p) ==
                  doctest::Approx(std::abs(alpha) * w21p_norm(u, p)).epsilon(1e-10));
            CHECK(w21p_norm(u + v, p) <= w21p_norm(u, p) + w21p_norm(v, p) + 1e-12);
            CHECK(w21p_norm(u, p) >= lp_norm(u, p));
        }
        CHECK(sup_norm(u + v) <= sup_norm(u) + sup_norm(v) + 1e-15);
    }
}

TEST_CASE("property: difference operators are linear to machine precision") {
    GridPtr g = build_grid(2, {1.0, 1.0}, {7, 7}, 1.0, 5);
    std::mt19937_64 rng(99);
    for (int trial = 0; trial < 5; ++trial) {
        const SpaceTimeField u = random_field(g, rng);
        const SpaceTimeField v = random_field(g, rng);
        const double a = 1.7, b = -0.3;
        SpaceTimeField combo = a * u + b * v;
        for (int axis : {0, 1}) {
            const SpaceTimeField lhs = diff_x(combo, axis);
            const SpaceTimeField rhs = a * diff_x(u, axis) + b * diff_x(v, axis);
            CHECK(sup_norm(lhs - rhs) <= 1e-11 * (1.0 + sup_norm(rhs)));
        }
        const SpaceTimeField lhs2 = diff_xx(combo, 0, 1);
        const SpaceTimeField rhs2 = a * diff_xx(u, 0, 1) + b * diff_xx(v, 0, 1);
        CHECK(sup_norm(lhs2 - rhs2) <= 1e-10 * (1.0 + sup_norm(rhs2)));
        CHECK(sup_norm(diff_t(combo) - (a * diff_t(u) + b * diff_t(v))) <= 1e-11 * (1.0 + sup_norm(u)));
    }
}

TEST_CASE("property: second-difference consistency order under refinement") {
    std::vector<double> hs, errs;
    for (int n : {11, 21, 41}) {
        GridPtr g = build_grid(1.0, n, 1.0, 3);
        const SpaceTimeField u =
            sample(g, [](const double* p, double) { return std::sin(M_PI * p[0]); });
        const SpaceTimeField d2 = diff_xx(u, 0, 0);
        double err = 0.0;
        for (int node = 0; node < g->node_count(); ++node) {
            if (g->classify(node) != NodeClass::Interior) continue;
            const double x = g->space_coords(g->space_of(node))[0];
            err = std::max(err, std::abs(d2(node) + M_PI * M_PI * std::sin(M_PI * x)));
        }
        hs.push_back(g->spacing(0));
        errs.push_back(err);
    }
    const double slope = std::log(errs[0] / errs[2]) / std::log(hs[0] / hs[2]);
    CHECK(slope >= 1.7);
    CHECK(slope <= 2.3);
}
