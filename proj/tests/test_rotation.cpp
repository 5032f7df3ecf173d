#include <doctest.h>

#include <cmath>
#include <random>

#include "qpf/cocycle.hpp"
#include "qpf/rotation.hpp"

using namespace qpf;

namespace {
const double kGolden = (std::sqrt(5.0) - 1.0) / 2.0;
}

TEST_CASE("rigid rotation number is exact") {
    LiftedSkewMap rigid = make_rigid(0.25, kGolden);
    RotationEstimate est = rotation_number_orbit(rigid, CirclePoint(0.0), 0.0, 1000);
    CHECK(std::abs(est.value - 0.25) < 1e-12);
    CHECK(est.spread < 1e-12);
    CHECK_THROWS_AS(rotation_number_orbit(rigid, CirclePoint(0.0), 0.0, 0), Error);
}

TEST_CASE("skew mean law: the sin term integrates out") {
    MapExpression a("0.3 + 0.1*sin(2*pi*theta)", {});
    LiftedSkewMap skew = make_skew(a, kGolden);
    RotationEstimate est = rotation_number_orbit(skew, CirclePoint(0.0), 0.0, 100000);
    CHECK(std::abs(est.value - 0.3) < 1e-3);
    RotationEstimate favg = rotation_number_fibre_average(skew, 100000, 256);
    CHECK(std::abs(favg.value - 0.3) < 1e-3);
}

TEST_CASE("fibre average: rigid map has zero spread") {
    LiftedSkewMap rigid = make_rigid(0.25, kGolden);
    RotationEstimate est = rotation_number_fibre_average(rigid, 1000, 64);
    CHECK(est.value == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(est.spread < 1e-12);
    CHECK_THROWS_AS(rotation_number_fibre_average(rigid, 100, 8), Error);
}

TEST_CASE("projectivized constant diagonal cocycle has rotation number 0") {
    auto diag = [](double) { return Matrix2{2.0, 0.0, 0.0, 0.5}; };
    CocycleSpec spec(kGolden, diag, "diag");
    LiftedSkewMap proj = projectivize(spec);
    RotationEstimate est = rotation_number_fibre_average(proj, 10000, 64);
    CHECK(std::abs(est.value) < 1e-6);
    CHECK(est.spread < 1e-6);
}

TEST_CASE("forced Arnold rotation number: two-start reference value") {
    LiftedSkewMap arnold = make_arnold(0.25, 0.5, 0.3, kGolden);
    RotationEstimate a = rotation_number_orbit(arnold, CirclePoint(0.0), 0.0, 10000000);
    RotationEstimate b = rotation_number_orbit(arnold, CirclePoint(0.0), 0.5, 10000000);
    CHECK(std::abs(a.value - b.value) < 1e-5);
    // frozen from the reference run with two-start agreement
    CHECK(a.value == doctest::Approx(0.24438417).epsilon(1e-6));
}

TEST_CASE("two-start independence across the zoo") {
    std::vector<LiftedSkewMap> maps;
    maps.push_back(make_rigid(0.25, kGolden));
    maps.push_back(make_skew(MapExpression("0.3 + 0.1*sin(2*pi*theta)", {}), kGolden));
    maps.push_back(make_arnold(0.25, 0.5, 0.3, kGolden));
    maps.push_back(make_attracting_graph(0.5, 0.1, kGolden));
    for (const LiftedSkewMap& m : maps) {
        RotationEstimate a = rotation_number_orbit(m, CirclePoint(0.0), 0.0, 200000);
        RotationEstimate b = rotation_number_orbit(m, CirclePoint(0.37), 0.61, 200000);
        CHECK(std::abs(a.value - b.value) < 10.0 * std::max(a.spread, b.spread) + 1e-4);
    }
}

TEST_CASE("replacing the lift by lift + 1 shifts the estimate by 1") {
    LiftedSkewMap arnold = make_arnold(0.25, 0.5, 0.3, kGolden);
    LiftedSkewMap shifted(kGolden,
                          [arnold](double theta, double x) {
                              return arnold.fibre_lift(theta, x) + 1.0;
                          },
                          "arnold+1");
    RotationEstimate a = rotation_number_orbit(arnold, CirclePoint(0.0), 0.0, 10000);
    RotationEstimate b = rotation_number_orbit(shifted, CirclePoint(0.0), 0.0, 10000);
    CHECK(b.value - a.value == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("rational relation search: constructed golden identity") {
    double rho = (1.0 + kGolden) / 2.0;
    auto rel = rational_relation_search(kGolden, rho, 10, 10, 1e-9);
    REQUIRE(rel.has_value());
    CHECK(rel->l == -1);
    CHECK(rel->k == -1);
    CHECK(rel->q == 2);
    CHECK(rel->residual < 1e-12);
}

TEST_CASE("rational relation search: rho = 0 gives the trivial relation") {
    auto rel = rational_relation_search(kGolden, 0.0, 10, 10, 1e-9);
    REQUIRE(rel.has_value());
    CHECK(rel->l == 0);
    CHECK(rel->k == 0);
    CHECK(rel->q == 1);
}

TEST_CASE("rational relation search: independent pair comes back empty") {
    auto rel = rational_relation_search(std::sqrt(2.0) - 1.0, std::sqrt(3.0) - 1.0, 50, 50,
                                        1e-9);
    CHECK_FALSE(rel.has_value());
}

TEST_CASE("rational relation search: error paths") {
    // omega numerically rational trips the q = 0 guard
    CHECK_THROWS_WITH_AS(rational_relation_search(0.5, 0.3, 10, 10, 1e-9),
                         doctest::Contains("irrational"), Error);
    // sloppy tolerance admits inconsistent relations: at 0.045 both (0,-1,2)
    // and (-1,0,3) fire for rho = 0.33
    CHECK_THROWS_WITH_AS(rational_relation_search(kGolden, 0.33, 10, 7, 0.045),
                         doctest::Contains("inconsistent"), Error);
    CHECK_THROWS_AS(rational_relation_search(kGolden, 0.3, 0, 10, 1e-9), Error);
}

TEST_CASE("relation search recovers random planted relations") {
    std::mt19937 rng(99);
    std::uniform_int_distribution<long long> qd(1, 8), kd(-8, 8);
    for (int trial = 0; trial < 20; ++trial) {
        long long q = qd(rng), k = kd(rng);
        double raw = -(k * kGolden) / static_cast<double>(q);
        long long l = -static_cast<long long>(std::floor(raw)) * q;  // put rho in range
        double rho = -(static_cast<double>(l) + k * kGolden) / static_cast<double>(q);
        auto rel = rational_relation_search(kGolden, rho, 16, 16, 1e-9);
        REQUIRE(rel.has_value());
        // the found relation must be proportional to the planted one
        CHECK(rel->l * q == l * rel->q);
        CHECK(rel->k * q == k * rel->q);
        CHECK(rel->residual < 1e-9);
    }
}
