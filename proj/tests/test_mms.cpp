#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "parnewt/calculus.hpp"
#include "parnewt/mms.hpp"

using namespace parnewt;

namespace {

CoefficientSet set_1d(const std::string& a, const std::string& f, double lambda, double p = 4.0) {
    std::vector<CoefficientFn> av{parse_coefficient(a, 1)};
    return CoefficientSet(1, std::move(av), parse_coefficient(f, 1), lambda, p);
}

constexpr char kPi[] = "3.141592653589793";

}  // namespace

TEST_CASE("manufactured source for the heat equation matches the hand formula") {
    GridPtr g = build_grid(1.0, 21, 1.0, 11);
    const CoefficientSet base = set_1d("1", "0", 2.0);
    const ManufacturedProblem mp =
        manufacture(parse_coefficient(std::string("t*sin(") + kPi + "*x1)", 1), base, g);
    REQUIRE(mp.set.source.has_value());
    for (int node = 0; node < g->node_count(); ++node) {
        const double x = g->space_coords(g->space_of(node))[0];
        const double t = g->time(g->step_of(node));
        const double expected = std::sin(M_PI * x) + t * M_PI * M_PI * std::sin(M_PI * x);
        CHECK((*mp.set.source)(node) == doctest::Approx(expected).epsilon(1e-12));
    }
}

TEST_CASE("zero exact solution with zero base f manufactures the zero source") {
    GridPtr g = build_grid(1.0, 11, 1.0, 5);
    const ManufacturedProblem mp = manufacture(parse_coefficient("0", 1), set_1d("1", "0", 2.0), g);
    CHECK(sup_norm(*mp.set.source) == 0.0);
}

TEST_CASE("quasilinear manufactured source matches the closed form") {
    // u = t x(1-x), a = 1 + 0.5 sin(u): f = x(1-x) + 2t (1 + 0.5 sin(t x(1-x)))
    GridPtr g = build_grid(1.0, 21, 1.0, 11);
    const CoefficientSet base = set_1d("1 + 0.5*sin(u)", "0", 2.0);
    const ManufacturedProblem mp = manufacture(parse_coefficient("t*x1*(1 - x1)", 1), base, g);
    for (int node = 0; node < g->node_count(); ++node) {
        const double x = g->space_coords(g->space_of(node))[0];
        const double t = g->time(g->step_of(node));
        const double expected =
            x * (1 - x) + 2 * t * (1.0 + 0.5 * std::sin(t * x * (1 - x)));
        CHECK((*mp.set.source)(node) == doctest::Approx(expected).epsilon(1e-12));
    }
}

TEST_CASE("manufacture rejects bad exact solutions") {
    GridPtr g = build_grid(1.0, 11, 1.0, 5);
    const CoefficientSet base = set_1d("1", "0", 2.0);
    CHECK_THROWS_AS(manufacture(parse_coefficient("t*x1", 1), base, g),
                    std::invalid_argument);  // nonzero at x = 1
    CHECK_THROWS_AS(manufacture(parse_coefficient("t*abs(x1 - 0.5)", 1), base, g),
                    std::invalid_argument);  // kinked
    CHECK_THROWS_AS(manufacture(parse_coefficient("u*t", 1), base, g),
                    std::invalid_argument);  // depends on the state
}

TEST_CASE("newton reproduces a grid-exact manufactured solution at rounding level") {
    GridPtr g = build_grid(1.0, 21, 1.0, 11);
    const CoefficientSet base = set_1d("1", "0", 2.0);
    const ManufacturedProblem mp = manufacture(parse_coefficient("t*x1*(1 - x1)", 1), base, g);
    const NewtonResult res = newton_solve(mp.set, SpaceTimeField(g), {.tol = 1e-12, .max_iter = 5});
    REQUIRE(res.converged());
    CHECK(sup_norm(res.solution - mp.u_exact) <= 1e-10);
}

TEST_CASE("manufactured round trip converges from the zero start under refinement") {
    const CoefficientSet base = set_1d("1 + 0.5*sin(u)", "0", 2.0);
    const CoefficientFn u_exact = parse_coefficient(std::string("t*sin(") + kPi + "*x1)", 1);
    double prev = -1.0;
    for (int n : {11, 21}) {
        GridPtr g = build_grid(1.0, n, 1.0, 2 * n - 1);
        const ManufacturedProblem mp = manufacture(u_exact, base, g);
        const NewtonResult res = newton_solve(mp.set, SpaceTimeField(g), {.tol = 1e-10, .max_iter = 25});
        REQUIRE(res.converged());
        const double err = sup_norm(res.solution - mp.u_exact);
        if (prev > 0.0) CHECK(err < prev);
        prev = err;
    }
}

TEST_CASE("convergence study: spatial order two when dt scales like h^2") {
    const CoefficientSet base = set_1d("1", "0", 2.0);
    const CoefficientFn u_exact =
        parse_coefficient(std::string("t^2*sin(") + kPi + "*x1)", 1);
    const OrderTable table = convergence_study(u_exact, base, 1, {1.0, 0.0}, {11, 1}, 1.0, 26, 3,
                                               TimeRefinement::QuadraticInH);
    REQUIRE(table.rows.size() == 3);
    CHECK(table.order_lp >= 1.7);
    CHECK(table.order_lp <= 2.3);
    for (std::size_t i = 1; i < table.rows.size(); ++i) {
        CHECK(table.rows[i].err_lp < table.rows[i - 1].err_lp);
        CHECK(table.rows[i].h == doctest::Approx(table.rows[i - 1].h / 2));
        CHECK(table.rows[i].dt == doctest::Approx(table.rows[i - 1].dt / 4));
    }
    CHECK_THROWS_AS(convergence_study(u_exact, base, 1, {1.0, 0.0}, {11, 1}, 1.0, 26, 2,
                                      TimeRefinement::QuadraticInH),
                    std::invalid_argument);
}

TEST_CASE("order table CSV carries the footer row") {
    const CoefficientSet base = set_1d("1", "0", 2.0);
    const CoefficientFn u_exact = parse_coefficient("t*x1*(1 - x1)", 1);
    const OrderTable table = convergence_study(u_exact, base, 1, {1.0, 0.0}, {6, 1}, 1.0, 6, 3,
                                               TimeRefinement::QuadraticInH);
    write_order_csv(table, "order_test.csv");
    std::ifstream in("order_test.csv");
    std::string line;
    std::getline(in, line);
    CHECK(line == "grid_h,dt,err_lp,err_w1inf,err_w21p");
    std::string last;
    while (std::getline(in, line))
        if (!line.empty()) last = line;
    CHECK(last.substr(0, 6) == "order,");
}
