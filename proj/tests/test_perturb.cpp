#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <fstream>

#include "parnewt/calculus.hpp"
#include "parnewt/mms.hpp"
#include "parnewt/oscillation.hpp"
#include "parnewt/perturb.hpp"

using namespace parnewt;

namespace {

CoefficientSet set_1d(const std::string& a, const std::string& f, double lambda, double p = 4.0) {
    std::vector<CoefficientFn> av{parse_coefficient(a, 1)};
    return CoefficientSet(1, std::move(av), parse_coefficient(f, 1), lambda, p);
}

Perturbation f_perturbation(const std::string& f_tilde) {
    Perturbation p = zero_perturbation(1);
    p.f_tilde = parse_coefficient(f_tilde, 1);
    return p;
}

constexpr char kPi[] = "3.141592653589793";

struct QuasiBenchmark {
    GridPtr grid;
    CoefficientSet set;
    SpaceTimeField u0;
};

QuasiBenchmark quasilinear_benchmark(int nodes = 21) {
    const CoefficientSet base = set_1d("1 + 0.5*sin(u)", "0", 2.0);
    GridPtr g = build_grid(1.0, nodes, 1.0, nodes);
    ManufacturedProblem mp =
        manufacture(parse_coefficient(std::string("t*sin(") + kPi + "*x1)", 1), base, g);
    NewtonResult res = newton_solve(mp.set, SpaceTimeField(g), {.tol = 1e-11, .max_iter = 25});
    REQUIRE(res.converged());
    return {g, std::move(mp.set), std::move(res.solution)};
}

}  // namespace

TEST_CASE("perturbed set at epsilon 0 folds back to the base trees") {
    const CoefficientSet base = set_1d("1 + 0.5*sin(u)", "u*xi1", 2.0);
    const Perturbation pert = f_perturbation("sign(x1 - 0.5)");
    const CoefficientSet zero = perturbed_set(base, pert, 0.0);
    CHECK(expr::equal(zero.a[0].tree(), base.a[0].tree()));
    CHECK(expr::equal(zero.f.tree(), base.f.tree()));
}

TEST_CASE("perturbed set shifts the coefficient by epsilon") {
    const CoefficientSet base = set_1d("1", "0", 2.0);
    Perturbation pert = zero_perturbation(1);
    pert.a_tilde[0] = parse_coefficient("1", 1);
    const CoefficientSet shifted = perturbed_set(base, pert, 0.1);
    for (double u : {0.0, 0.5, -2.0})
        CHECK(shifted.a[0].value({0.3, 0}, 0.2, u, {0.1, 0}) == doctest::Approx(1.1));
}

TEST_CASE("perturbed set reports ellipticity loss at a destructive epsilon") {
    GridPtr g = build_grid(1.0, 9, 1.0, 5);
    const CoefficientSet base = set_1d("1", "0", 1.0);
    Perturbation pert = zero_perturbation(1);
    pert.a_tilde[0] = parse_coefficient("-1", 1);
    const SpaceTimeField u0(g);
    CHECK_THROWS_AS(perturbed_set(base, pert, 1.0, &u0), EllipticityError);
    CHECK_NOTHROW(perturbed_set(base, pert, 1.0));  // unchecked without a state
}

TEST_CASE("linearized sensitivity: zero direction and the affine route") {
    GridPtr g = build_grid(1.0, 17, 1.0, 9);
    const CoefficientSet base = set_1d("1", "0", 2.0);
    const NewtonResult res = newton_solve(base, SpaceTimeField(g), {.tol = 1e-11, .max_iter = 3});
    REQUIRE(res.converged());  // u0 = 0 for f = 0

    CHECK(sup_norm(linearized_sensitivity(base, zero_perturbation(1), res.solution)) == 0.0);

    // f-only perturbation of the heat equation: v solves the heat equation with source g
    const Perturbation pert = f_perturbation(std::string("sin(") + kPi + "*x1)*(1 + t)");
    const SpaceTimeField v = linearized_sensitivity(base, pert, res.solution);
    const CoefficientSet forced = set_1d("1", std::string("sin(") + kPi + "*x1)*(1 + t)", 2.0);
    const NewtonResult direct = newton_solve(forced, SpaceTimeField(g), {.tol = 1e-11, .max_iter = 3});
    REQUIRE(direct.converged());
    CHECK(sup_norm(v - direct.solution) <= 1e-11);
}

TEST_CASE("solution map at epsilon 0 returns u0 without extra iterations") {
    const QuasiBenchmark b = quasilinear_benchmark();
    const NewtonResult back = solution_map(b.set, f_perturbation("sign(x1 - 0.5)"), 0.0, b.u0,
                                           {.tol = 1e-10, .max_iter = 25});
    CHECK(back.converged());
    CHECK(back.iterations() == 0);
    CHECK(sup_norm(back.solution - b.u0) == 0.0);
}

TEST_CASE("solution map converges quickly for small epsilon, fails loudly beyond the basin") {
    const QuasiBenchmark b = quasilinear_benchmark();
    const NewtonResult small = solution_map(b.set, f_perturbation("sign(x1 - 0.5)"), 1e-2, b.u0,
                                            {.tol = 1e-10, .max_iter = 25});
    CHECK(small.converged());
    CHECK(small.iterations() <= 3);

    Perturbation destroy = zero_perturbation(1);
    destroy.a_tilde[0] = parse_coefficient("-1", 1);
    CHECK_THROWS_AS(solution_map(b.set, destroy, 10.0, b.u0, {.tol = 1e-10, .max_iter = 25}),
                    EllipticityError);
}

TEST_CASE("sensitivity error shrinks linearly in epsilon on the quasilinear benchmark") {
    const QuasiBenchmark b = quasilinear_benchmark();
    const Perturbation pert = f_perturbation("sign(x1 - 0.5)");
    const SpaceTimeField v = linearized_sensitivity(b.set, pert, b.u0);
    double prev = -1.0;
    for (double eps : {1e-2, 1e-3}) {
        const NewtonResult run = solution_map(b.set, pert, eps, b.u0, {.tol = 1e-11, .max_iter = 25});
        REQUIRE(run.converged());
        const double err = w21p_norm((1.0 / eps) * (run.solution - b.u0) - v, b.set.p);
        if (prev > 0.0) CHECK(err <= prev / 3.0);
        prev = err;
    }
}

TEST_CASE("stability sweep: zero direction gives zero deviations") {
    const QuasiBenchmark b = quasilinear_benchmark(11);
    const StabilityReport rep = stability_sweep(b.set, zero_perturbation(1), {1e-3, 1e-2, 1e-1},
                                                b.u0, {.tol = 1e-10, .max_iter = 25});
    for (std::size_t i = 0; i < rep.epsilons.size(); ++i) {
        CHECK(rep.converged[i]);
        CHECK(rep.deviations[i] <= 1e-10);
        CHECK(rep.iterations[i] == 0);
    }
}

TEST_CASE("stability sweep: f-perturbation of an affine problem is exactly first order") {
    GridPtr g = build_grid(1.0, 17, 1.0, 9);
    const CoefficientSet base = set_1d("1", std::string("sin(") + kPi + "*x1)*t", 2.0);
    const NewtonResult res = newton_solve(base, SpaceTimeField(g), {.tol = 1e-11, .max_iter = 3});
    REQUIRE(res.converged());
    const StabilityReport rep =
        stability_sweep(base, f_perturbation("sign(x1 - 0.5)"), {1e-3, 1e-2, 1e-1}, res.solution,
                        {.tol = 1e-11, .max_iter = 5});
    CHECK(rep.slope == doctest::Approx(1.0).epsilon(1e-4));
    for (std::size_t i = 0; i < rep.epsilons.size(); ++i) {
        CHECK(rep.converged[i]);
        CHECK(rep.sensitivity_errors[i] <= 1e-7);
    }
    CHECK_THROWS_AS(stability_sweep(base, f_perturbation("1"), {1e-2, 1e-3}, res.solution,
                                    {.tol = 1e-10, .max_iter = 5}),
                    std::invalid_argument);  // not increasing
}

TEST_CASE("stability sweep records per-epsilon failures without aborting") {
    GridPtr g = build_grid(1.0, 9, 1.0, 5);
    const CoefficientSet base = set_1d("1", "0", 1.2);
    const NewtonResult res = newton_solve(base, SpaceTimeField(g), {.tol = 1e-11, .max_iter = 3});
    REQUIRE(res.converged());
    Perturbation pert = zero_perturbation(1);
    pert.a_tilde[0] = parse_coefficient("-1", 1);
    const StabilityReport rep =
        stability_sweep(base, pert, {1e-2, 10.0}, res.solution, {.tol = 1e-10, .max_iter = 10});
    CHECK(rep.converged[0]);
    CHECK_FALSE(rep.converged[1]);  // ellipticity destroyed at eps = 10
}

TEST_CASE("directional consistency: direction 2d at eps/2 equals direction d at eps") {
    const QuasiBenchmark b = quasilinear_benchmark();
    const Perturbation d = f_perturbation("sign(x1 - 0.5)");
    const Perturbation d2 = f_perturbation("2*sign(x1 - 0.5)");
    const NewtonOptions opts{.tol = 1e-10, .max_iter = 25};
    const NewtonResult r1 = solution_map(b.set, d, 2e-2, b.u0, opts);
    const NewtonResult r2 = solution_map(b.set, d2, 1e-2, b.u0, opts);
    REQUIRE(r1.converged());
    REQUIRE(r2.converged());
    CHECK(w21p_norm(r1.solution - r2.solution, b.set.p) <= 2e-9);  // sum of tolerances in W21p
}

TEST_CASE("composed VMO modulus persists under small perturbations") {
    const QuasiBenchmark b = quasilinear_benchmark();
    const Perturbation pert = f_perturbation("sign(x1 - 0.5)");
    const double eps = 1e-2;
    const NewtonResult run = solution_map(b.set, pert, eps, b.u0, {.tol = 1e-10, .max_iter = 25});
    REQUIRE(run.converged());

    const std::vector<double> radii{0.1, 0.2, 0.3};
    const CoefficientSet pset = perturbed_set(b.set, pert, eps);
    const SpaceTimeField base_field = sample_composition(b.set.a[0], b.u0);
    const SpaceTimeField pert_field = sample_composition(pset.a[0], run.solution);
    const auto base_rep = vmo_modulus(base_field, radii);
    const auto pert_rep = vmo_modulus(pert_field, radii);

    // |osc(f) - osc(g)| <= 2 sup|f - g| holds exactly for the discrete means,
    // and the coefficient drift itself is O(eps)
    const double drift = sup_norm(pert_field - base_field);
    for (std::size_t j = 0; j < radii.size(); ++j)
        CHECK(std::abs(pert_rep.modulus[j] - base_rep.modulus[j]) <= 2.0 * drift + 1e-12);
    CHECK(drift <= 1.0 * eps);  // Lipschitz coefficient, O(eps) state change
}

TEST_CASE("measured c1 norm of the scaled perturbation is linear in epsilon") {
    GridPtr g = build_grid(1.0, 9, 1.0, 5);
    const CompactBox box = CompactBox::symmetric(1, 1.0, 5);
    const CoefficientFn f_tilde = parse_coefficient("sign(x1 - 0.5) + u*xi1", 1);
    const double base_norm = c1_norm(f_tilde, box, *g);
    for (double eps : {0.5, 0.1, 1e-3}) {
        const CoefficientFn scaled =
            CoefficientFn::from_tree(expr::mul(expr::constant(eps), f_tilde.tree()), 1);
        CHECK(c1_norm(scaled, box, *g) == doctest::Approx(eps * base_norm).epsilon(1e-12));
    }
}

TEST_CASE("stability CSV carries slope and c1 footers") {
    GridPtr g = build_grid(1.0, 9, 1.0, 5);
    const CoefficientSet base = set_1d("1", "0", 2.0);
    const NewtonResult res = newton_solve(base, SpaceTimeField(g), {.tol = 1e-11, .max_iter = 3});
    const StabilityReport rep = stability_sweep(base, f_perturbation("1"), {1e-2, 1e-1},
                                                res.solution, {.tol = 1e-11, .max_iter = 5});
    write_stability_csv(rep, "stability_test.csv");
    std::ifstream in("stability_test.csv");
    std::string line;
    std::getline(in, line);
    CHECK(line == "epsilon,deviation_w21p,sensitivity_error,converged");
    bool saw_slope = false, saw_c1 = false;
    while (std::getline(in, line)) {
        if (line.substr(0, 6) == "slope,") saw_slope = true;
        if (line.substr(0, 16) == "perturbation_c1,") saw_c1 = true;
    }
    CHECK(saw_slope);
    CHECK(saw_c1);
}
