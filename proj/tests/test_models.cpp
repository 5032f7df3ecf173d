#include <doctest.h>

#include <cmath>
#include <random>

#include "qpf/models.hpp"

using namespace qpf;

namespace {

const double kGolden = (std::sqrt(5.0) - 1.0) / 2.0;

MapExpression skew_expr(double mean, double amp) {
    return MapExpression("m + a*sin(2*pi*theta)", {{"m", mean}, {"a", amp}});
}

std::vector<LiftedSkewMap> zoo() {
    std::vector<LiftedSkewMap> maps;
    maps.push_back(make_rigid(0.25, kGolden));
    maps.push_back(make_skew(skew_expr(0.3, 0.1), kGolden));
    maps.push_back(make_arnold(0.25, 0.5, 0.3, kGolden));
    maps.push_back(make_attracting_graph(0.5, 0.1, kGolden));
    return maps;
}

}  // namespace

TEST_CASE("zoo lifts match their formulas") {
    LiftedSkewMap rigid = make_rigid(0.25, kGolden);
    CHECK(rigid.fibre_lift(0.3, 0.5) == doctest::Approx(0.75));

    LiftedSkewMap skew = make_skew(skew_expr(0.3, 0.1), kGolden);
    CHECK(skew.fibre_lift(0.25, 1.0) == doctest::Approx(1.0 + 0.3 + 0.1).epsilon(1e-12));

    LiftedSkewMap arnold = make_arnold(0.25, 0.5, 0.3, kGolden);
    CHECK(arnold.fibre_derivative(0.1, 0.0) == doctest::Approx(1.5));
    CHECK(arnold.fibre_derivative(0.1, 0.5) == doctest::Approx(0.5));
    CHECK_THROWS_AS(make_arnold(0.25, 1.0, 0.3, kGolden), Error);
    CHECK_THROWS_AS(make_arnold(0.25, 1.5, 0.3, kGolden), Error);
}

TEST_CASE("iterate walks the skew product") {
    LiftedSkewMap rigid = make_rigid(0.25, kGolden);
    OrbitPoint p = iterate(rigid, CirclePoint(0.0), 0.0, 4);
    CHECK(p.x_hat == doctest::Approx(1.0));
    CHECK(p.theta.value() == doctest::Approx(wrap(4 * kGolden)));

    LiftedSkewMap skew = make_skew(skew_expr(0.3, 0.1), kGolden);
    CHECK(iterate(skew, CirclePoint(0.0), 0.0, 1).x_hat == doctest::Approx(0.3));

    CHECK_THROWS_AS(iterate(rigid, CirclePoint(0.0), 0.0, -1), Error);

    // runaway fibre coordinates are reported, not silently overflowed
    MapExpression runaway("x + 10^14", {});
    CHECK_THROWS_WITH_AS(iterate(make_custom(runaway, kGolden), CirclePoint(0.0), 0.0, 100),
                         doctest::Contains("overflow"), Error);
}

TEST_CASE("long Arnold orbit regression value") {
    // frozen from a reference run of this implementation (double precision)
    LiftedSkewMap arnold = make_arnold(0.25, 0.5, 0.3, kGolden);
    OrbitPoint p = iterate(arnold, CirclePoint(0.0), 0.0, 1000000);
    CHECK(p.x_hat == doctest::Approx(244384.50501178863).epsilon(1e-9));
}

TEST_CASE("validate_homeomorphism") {
    CHECK(validate_homeomorphism(make_arnold(0.25, 0.5, 0.3, kGolden), 64, 64).pass);

    // K = 1.5 breaks monotonicity
    MapExpression bad("x + c + K/(2*pi)*sin(2*pi*x)", {{"c", 0.25}, {"K", 1.5}});
    HomeoValidation v = validate_homeomorphism(make_custom(bad, kGolden), 64, 64);
    CHECK_FALSE(v.pass);
    CHECK_FALSE(v.monotone_ok);
    CHECK(v.periodicity_ok);

    // non-periodic lift: defect 0.3
    MapExpression drift("x + 0.3*x", {});
    HomeoValidation v2 = validate_homeomorphism(make_custom(drift, kGolden), 64, 64);
    CHECK_FALSE(v2.pass);
    CHECK(v2.periodicity_defect == doctest::Approx(0.3).epsilon(1e-9));

    CHECK_THROWS_AS(validate_homeomorphism(make_rigid(0.25, kGolden), 8, 64), Error);
}

TEST_CASE("degree-one and monotonicity across the zoo") {
    std::mt19937 rng(17);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (const LiftedSkewMap& m : zoo()) {
        for (int i = 0; i < 1000; ++i) {
            double theta = u(rng), x = 4.0 * (u(rng) - 0.5);
            CHECK(std::abs(m.fibre_lift(theta, x + 1.0) - m.fibre_lift(theta, x) - 1.0) <
                  1e-9);
        }
        double theta = u(rng);
        double prev = m.fibre_lift(theta, 0.0);
        for (int j = 1; j <= 1000; ++j) {
            double v = m.fibre_lift(theta, j / 1000.0);
            CHECK(v > prev);
            prev = v;
        }
    }
}

TEST_CASE("analytic derivatives match finite differences") {
    std::mt19937 rng(23);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (const LiftedSkewMap& m :
         {make_arnold(0.25, 0.5, 0.3, kGolden), make_skew(skew_expr(0.3, 0.1), kGolden)}) {
        for (int i = 0; i < 1000; ++i) {
            double theta = u(rng), x = u(rng);
            double h = 1e-6;
            double fd = (m.fibre_lift(theta, x + h) - m.fibre_lift(theta, x - h)) / (2 * h);
            CHECK(std::abs(m.fibre_derivative(theta, x) - fd) < 1e-5);
        }
    }
}

TEST_CASE("iterate commutes with integer fibre shifts") {
    for (const LiftedSkewMap& m : zoo()) {
        OrbitPoint a = iterate(m, CirclePoint(0.2), 0.37, 10000);
        OrbitPoint b = iterate(m, CirclePoint(0.2), 1.37, 10000);
        CHECK(std::abs(b.x_hat - a.x_hat - 1.0) < 1e-8);
    }
}

TEST_CASE("fibre inverse inverts the lift") {
    std::mt19937 rng(31);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (const LiftedSkewMap& m : zoo()) {
        for (int i = 0; i < 50; ++i) {
            double theta = u(rng), x = 2.0 * (u(rng) - 0.5);
            double y = m.fibre_lift(theta, x);
            CHECK(std::abs(m.fibre_inverse(theta, y) - x) < 1e-9);
        }
    }
    LiftedSkewMap rigid = make_rigid(0.25, kGolden);
    OrbitPoint fwd = iterate(rigid, CirclePoint(0.1), 0.0, 7);
    OrbitPoint back = iterate_back(rigid, fwd.theta, fwd.x_hat, 7);
    CHECK(std::abs(back.x_hat) < 1e-9);
    CHECK(back.theta.value() == doctest::Approx(0.1).epsilon(1e-12));
}

TEST_CASE("conjugate by the identity leaves the map unchanged") {
    LiftedSkewMap arnold = make_arnold(0.25, 0.5, 0.3, kGolden);
    LiftedSkewMap same = conjugate(arnold, MapExpression("x", {}));
    std::mt19937 rng(37);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 100; ++i) {
        double theta = u(rng), x = 3.0 * (u(rng) - 0.5);
        CHECK(std::abs(same.fibre_lift(theta, x) - arnold.fibre_lift(theta, x)) < 1e-11);
    }
}

TEST_CASE("conjugate round trip through an invertible h") {
    // h_theta(x) = x + 0.1 sin(2 pi theta) has the expressible inverse
    LiftedSkewMap rigid = make_rigid(0.25, kGolden);
    MapExpression h("x + 0.1*sin(2*pi*theta)", {});
    MapExpression h_inv("x - 0.1*sin(2*pi*theta)", {});
    LiftedSkewMap once = conjugate(rigid, h);
    LiftedSkewMap back = conjugate(once, h_inv);
    std::mt19937 rng(41);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 100; ++i) {
        double theta = u(rng), x = 3.0 * (u(rng) - 0.5);
        CHECK(std::abs(back.fibre_lift(theta, x) - rigid.fibre_lift(theta, x)) < 1e-9);
    }
    CHECK_THROWS_AS(conjugate(rigid, MapExpression("x - 2*x", {})), Error);
}

TEST_CASE("variation functional") {
    CHECK(variation_V(make_rigid(0.25, kGolden), 64, 1024) == doctest::Approx(0.0));
    // variation of K cos(2 pi x) over one period is 4K
    CHECK(variation_V(make_arnold(0.25, 0.5, 0.3, kGolden), 256, 1 << 14) ==
          doctest::Approx(2.0).epsilon(1e-9));
    LiftedSkewMap no_deriv(kGolden, [](double, double x) { return x + 0.1; }, "bare");
    CHECK_THROWS_AS(variation_V(no_deriv, 64, 64), Error);
}

TEST_CASE("variation of a conjugated map converges under grid doubling") {
    LiftedSkewMap rigid = make_rigid(0.25, kGolden);
    MapExpression h("x + 0.1*sin(2*pi*(x+theta))", {});
    LiftedSkewMap conj = conjugate(rigid, h);
    double coarse = variation_V(conj, 256, 1 << 12);
    double fine = variation_V(conj, 512, 1 << 13);
    CHECK(std::abs(fine - coarse) < 2e-3);
    // frozen from the reference quadrature at theta_quadrature = 2^10, x_grid = 2^14
    CHECK(fine == doctest::Approx(4.3013444).epsilon(2e-3));
}
