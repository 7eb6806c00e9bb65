#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "parnewt/expression.hpp"

using namespace parnewt;
using expr::EvalPoint;
using expr::Var;

namespace {

double eval_at(const expr::NodePtr& n, double u, double xi1 = 0.0, double x1 = 0.0,
               double t = 0.0, double xi2 = 0.0, double x2 = 0.0) {
    EvalPoint p;
    p.x = {x1, x2};
    p.t = t;
    p.u = u;
    p.xi = {xi1, xi2};
    return expr::evaluate(n, p);
}

}  // namespace

TEST_CASE("parse and differentiate representative coefficients") {
    const auto a = expr::parse("1 + 0.5*sin(u)", 1);
    CHECK(eval_at(a, 0.0) == doctest::Approx(1.0));
    CHECK(eval_at(a, M_PI / 2.0) == doctest::Approx(1.5));
    CHECK(expr::to_string(expr::differentiate(a, Var::U)) == "0.5*cos(u)");

    const auto b = expr::parse("sign(x1 - 0.5) + 2", 1);
    CHECK(expr::to_string(expr::differentiate(b, Var::U)) == "0");
    CHECK(eval_at(b, 0.0, 0.0, 0.75) == doctest::Approx(3.0));
    CHECK(eval_at(b, 0.0, 0.0, 0.25) == doctest::Approx(1.0));
}

TEST_CASE("syntax error positions index the whitespace-stripped text") {
    try {
        expr::parse("u ++ 2", 1);
        FAIL("expected a parse error");
    } catch (const expr::ParseError& e) {
        CHECK(e.offset() == 2);
    }
    CHECK_THROWS_AS(expr::parse("", 1), expr::ParseError);
    CHECK_THROWS_AS(expr::parse("1*(2+3", 1), expr::ParseError);
    CHECK_THROWS_AS(expr::parse("(1)2", 1), expr::ParseError);
    CHECK_THROWS_AS(expr::parse("u^-2", 1), expr::ParseError);
}

TEST_CASE("unknown identifiers and arity mismatches are rejected") {
    CHECK_THROWS_AS(expr::parse("x2", 1), expr::ParseError);
    CHECK_THROWS_AS(expr::parse("xi2 + 1", 1), expr::ParseError);
    CHECK_NOTHROW(expr::parse("x2 + xi2", 2));
    CHECK_THROWS_AS(expr::parse("foo + 1", 1), expr::ParseError);
    CHECK_THROWS_AS(expr::parse("min(u)", 1), expr::ParseError);
    CHECK_THROWS_AS(expr::parse("sin(u, t)", 1), expr::ParseError);
    CHECK_THROWS_AS(expr::parse("sin + 1", 1), expr::ParseError);
}

TEST_CASE("evaluation guards report the offending subexpression") {
    const auto div = expr::parse("1/(u - 1)", 1);
    CHECK(eval_at(div, 3.0) == doctest::Approx(0.5));
    try {
        eval_at(div, 1.0);
        FAIL("expected an evaluation error");
    } catch (const expr::EvalError& e) {
        CHECK(e.subexpression() == "u - 1");
    }
    CHECK_THROWS_AS(eval_at(expr::parse("log(u)", 1), -1.0), expr::EvalError);
    CHECK_THROWS_AS(eval_at(expr::parse("log(u)", 1), 0.0), expr::EvalError);
    CHECK_THROWS_AS(eval_at(expr::parse("sqrt(u)", 1), -0.5), expr::EvalError);
    CHECK_THROWS_AS(eval_at(expr::parse("exp(u)", 1), 1000.0), expr::EvalError);  // overflow
    CHECK_THROWS_AS(eval_at(expr::parse("u^0.5", 1), -2.0), expr::EvalError);
}

TEST_CASE("print-parse round trip yields identical trees") {
    const char* corpus[] = {
        "1 + 0.5*sin(u)",
        "sign(x1 - 0.5) + 2",
        "min(u, xi1)",
        "max(abs(x1), 2)",
        "sqrt(u + 2)",
        "log(exp(t))",
        "(u + 1)^2",
        "-u^2",
        "u/xi1",
        "2*-3",
        "u - -t",
        "1/(u - 1)",
        "0.25*x1*(1 - x1)*t^2",
        "exp(0.5*u)*cos(3*xi1)",
    };
    for (const char* text : corpus) {
        const auto t1 = expr::parse(text, 1);
        const auto t2 = expr::parse(expr::to_string(t1), 1);
        CHECK_MESSAGE(expr::equal(t1, t2), text);
    }
    const auto t1 = expr::parse("x1*x2 + xi2^3 - u", 2);
    CHECK(expr::equal(t1, expr::parse(expr::to_string(t1), 2)));
}

TEST_CASE("symbolic partials match central finite differences") {
    const char* corpus[] = {
        "sin(u)",        "cos(u*xi1)",      "exp(0.3*u)",      "log(u + 2)",
        "sqrt(u + 2)",   "(u + xi1)^3",     "u/(xi1 + 3)",     "abs(u)",
        "min(u, 2 + xi1)", "max(u^2, xi1)", "sign(x1)*u + xi1", "u*xi1 - t*x1",
    };
    std::mt19937_64 rng(2024);
    auto uniform = [&](double lo, double hi) {
        return lo + (hi - lo) * (static_cast<double>(rng() >> 11) * 0x1p-53);
    };
    const double fd_h = 1e-6;
    for (const char* text : corpus) {
        const auto f = expr::parse(text, 1);
        const auto du = expr::differentiate(f, Var::U);
        const auto dxi = expr::differentiate(f, Var::Xi1);
        for (int trial = 0; trial < 8; ++trial) {
            EvalPoint p;
            p.x = {uniform(0.1, 0.9), 0.0};
            p.t = uniform(0.0, 1.0);
            p.u = uniform(0.2, 0.9);  // away from the kinks of abs/min/max above
            p.xi = {uniform(-0.9, -0.2), 0.0};

            EvalPoint pu = p;
            pu.u += fd_h;
            EvalPoint mu = p;
            mu.u -= fd_h;
            const double fd_du = (expr::evaluate(f, pu) - expr::evaluate(f, mu)) / (2 * fd_h);
            const double sym_du = expr::evaluate(du, p);
            CHECK_MESSAGE(std::abs(sym_du - fd_du) <= 1e-6 * (1.0 + std::abs(sym_du)), text);

            EvalPoint px = p;
            px.xi[0] += fd_h;
            EvalPoint mx = p;
            mx.xi[0] -= fd_h;
            const double fd_dxi = (expr::evaluate(f, px) - expr::evaluate(f, mx)) / (2 * fd_h);
            const double sym_dxi = expr::evaluate(dxi, p);
            CHECK_MESSAGE(std::abs(sym_dxi - fd_dxi) <= 1e-6 * (1.0 + std::abs(sym_dxi)), text);
        }
    }
}

TEST_CASE("kinked primitives follow the documented derivative conventions") {
    // sign' == 0 everywhere
    const auto s = expr::differentiate(expr::parse("sign(u)", 1), Var::U);
    CHECK(eval_at(s, 0.0) == 0.0);
    CHECK(eval_at(s, 5.0) == 0.0);
    // abs'(0) == 0 via sign(0) == 0
    const auto a = expr::differentiate(expr::parse("abs(u)", 1), Var::U);
    CHECK(eval_at(a, 0.0) == 0.0);
    CHECK(eval_at(a, -2.0) == -1.0);
    // min selects the branch derivative away from ties
    const auto m = expr::differentiate(expr::parse("min(u, 5 - u)", 1), Var::U);
    CHECK(eval_at(m, 1.0) == doctest::Approx(1.0));
    CHECK(eval_at(m, 4.0) == doctest::Approx(-1.0));
}

TEST_CASE("structure queries") {
    const auto f = expr::parse("u*xi1 + sin(t)", 1);
    CHECK(expr::depends_on(f, Var::U));
    CHECK(expr::depends_on(f, Var::Xi1));
    CHECK(expr::depends_on(f, Var::T));
    CHECK_FALSE(expr::depends_on(f, Var::X1));
    CHECK_FALSE(expr::has_kinked_primitive(f));
    CHECK(expr::has_kinked_primitive(expr::parse("abs(u) + 1", 1)));
    CHECK(expr::has_kinked_primitive(expr::parse("min(t, 1)", 1)));
}
