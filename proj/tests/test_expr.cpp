#include <doctest.h>

#include <cmath>
#include <random>

#include "qpf/expr.hpp"

using namespace qpf;

TEST_CASE("basic arithmetic and identifiers") {
    MapExpression e("x + 0.25", {});
    CHECK(e.eval(0.1, 0.5) == doctest::Approx(0.75));
    CHECK(e.depends_on_x());

    MapExpression t("theta * 2", {});
    CHECK(t.eval(0.3, 0.0) == doctest::Approx(0.6));
    CHECK_FALSE(t.depends_on_x());
}

TEST_CASE("forced Arnold expression evaluates like the formula") {
    MapExpression e("x + c + K/(2*pi)*sin(2*pi*x) + eps*sin(2*pi*theta)",
                    {{"c", 0.25}, {"K", 0.5}, {"eps", 0.3}});
    CHECK(e.eval(0.0, 0.0) == doctest::Approx(0.25));
    double theta = 0.37, x = 1.81;
    double want = x + 0.25 + 0.5 / (2 * M_PI) * std::sin(2 * M_PI * x) +
                  0.3 * std::sin(2 * M_PI * theta);
    CHECK(e.eval(theta, x) == doctest::Approx(want).epsilon(1e-15));
}

TEST_CASE("syntax and binding errors carry positions/names") {
    CHECK_THROWS_AS(MapExpression("x + + 1", {}), ParseError);
    try {
        MapExpression("x + + 1", {});
    } catch (const ParseError& e) {
        CHECK(e.position() == 4);
    }
    CHECK_THROWS_WITH_AS(MapExpression("x + alpha", {}),
                         doctest::Contains("alpha"), ParseError);
    CHECK_THROWS_AS(MapExpression("sin(x", {}), ParseError);
    CHECK_THROWS_AS(MapExpression("(x+1", {}), ParseError);
    CHECK_THROWS_AS(MapExpression("x 1", {}), ParseError);
}

TEST_CASE("division by zero reported at evaluation") {
    MapExpression e("1/(x - 1)", {});
    CHECK(e.eval(0.0, 0.0) == doctest::Approx(-1.0));
    CHECK_THROWS_AS(e.eval(0.0, 1.0), EvalError);
}

TEST_CASE("precedence and unary minus") {
    MapExpression e("2*3^2", {});
    CHECK(e.eval(0, 0) == doctest::Approx(18.0));
    MapExpression f("-x^2", {});
    CHECK(f.eval(0, 3.0) == doctest::Approx(-9.0));
    MapExpression g("2^3^2", {});  // right associative
    CHECK(g.eval(0, 0) == doctest::Approx(512.0));
    MapExpression h("exp(log(abs(-2.5)))", {});
    CHECK(h.eval(0, 0) == doctest::Approx(2.5));
}

TEST_CASE("symbolic x-derivative matches central differences") {
    std::mt19937 rng(5);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    const char* sources[] = {
        "x + c + K/(2*pi)*sin(2*pi*x) + eps*sin(2*pi*theta)",
        "x^3 + theta*x",
        "atan(x) + exp(0.3*x)",
        "x / (2 + cos(2*pi*x))",
        "tan(0.2*x) + log(2 + x)",
    };
    for (const char* src : sources) {
        MapExpression e(src, {{"c", 0.25}, {"K", 0.5}, {"eps", 0.3}});
        MapExpression d = e.derivative_x();
        for (int i = 0; i < 50; ++i) {
            double theta = u(rng), x = u(rng);
            double h = 1e-6;
            double fd = (e.eval(theta, x + h) - e.eval(theta, x - h)) / (2 * h);
            CHECK(d.eval(theta, x) == doctest::Approx(fd).epsilon(1e-5));
        }
    }
}
