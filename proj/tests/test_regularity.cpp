#include <doctest.h>

#include <cmath>

#include "qpf/cocycle.hpp"
#include "qpf/regularity.hpp"
#include "qpf/rotation.hpp"

using namespace qpf;

namespace {

const double kGolden = (std::sqrt(5.0) - 1.0) / 2.0;

// closed-form solution of a(theta) - rho = eps sin(2 pi theta) as a coboundary
// phi(theta + omega) - phi(theta); used as an independent oracle
struct CoboundaryOracle {
    double A, B;
    explicit CoboundaryOracle(double eps, double omega) {
        double s = std::sin(M_PI * omega), c = std::cos(M_PI * omega);
        A = -eps / 2.0;
        B = -eps / 2.0 * c / s;
    }
    double phi(double theta) const {
        return A * std::sin(2 * M_PI * theta) + B * std::cos(2 * M_PI * theta);
    }
    double sup() const { return std::hypot(A, B); }
    double argmin(int grid = 1 << 18) const {
        double best = 1e300, arg = 0.0;
        for (int i = 0; i < grid; ++i) {
            double t = static_cast<double>(i) / grid;
            if (phi(t) < best) {
                best = phi(t);
                arg = t;
            }
        }
        return arg;
    }
};

}  // namespace

TEST_CASE("rigid map has identically zero deviations") {
    LiftedSkewMap rigid = make_rigid(0.25, kGolden);
    // from (0, 0) all steps are exact in binary
    DeviationProfile exact = deviation_profile(rigid, CirclePoint(0.0), 0.0, 0.25, 10000);
    CHECK(exact.sup_dev == 0.0);
    CHECK(exact.inf_dev == 0.0);
    CHECK(exact.growth_exponent == 0.0);
    // generic starts accumulate rounding noise only
    DeviationProfile prof = deviation_profile(rigid, CirclePoint(0.2), 0.3, 0.25, 10000);
    CHECK(prof.sup_dev < 1e-10);
    CHECK(-prof.inf_dev < 1e-10);
    CHECK(prof.growth_exponent == 0.0);
    CHECK(prof.bounded_above);
    CHECK(prof.bounded_below);
}

TEST_CASE("D_0 = 0: inf_dev <= 0 <= sup_dev always") {
    std::vector<LiftedSkewMap> maps;
    maps.push_back(make_arnold(0.25, 0.5, 0.3, kGolden));
    maps.push_back(make_attracting_graph(0.5, 0.1, kGolden));
    maps.push_back(make_skew(MapExpression("0.2 + 0.3*sin(2*pi*theta)", {}), kGolden));
    for (const auto& m : maps) {
        double rho = rotation_number_orbit(m, CirclePoint(0.1), 0.7, 100000).value;
        DeviationProfile prof = deviation_profile(m, CirclePoint(0.1), 0.7, rho, 20000);
        CHECK(prof.sup_dev >= 0.0);
        CHECK(prof.inf_dev <= 0.0);
    }
}

TEST_CASE("coboundary bound for the perturbed skew translation") {
    const double eps = 0.1, rho = std::sqrt(3.0) - 1.0;
    MapExpression a("r + e*sin(2*pi*theta)", {{"r", rho}, {"e", eps}});
    LiftedSkewMap skew = make_skew(a, kGolden);
    CoboundaryOracle oracle(eps, kGolden);
    double bound = eps / std::abs(std::sin(M_PI * kGolden));
    DeviationProfile prof = deviation_profile(skew, CirclePoint(0.0), 0.0, rho, 200000);
    // sup_n D_n = sup phi(theta_n) - phi(theta_0) <= sup phi - inf phi
    CHECK(prof.sup_dev <= bound + 1e-6);
    CHECK(-prof.inf_dev <= bound + 1e-6);
    // the full range is achieved along the dense base orbit
    CHECK(prof.sup_dev - prof.inf_dev == doctest::Approx(bound).epsilon(1e-3));
    CHECK(2.0 * oracle.sup() == doctest::Approx(bound).epsilon(1e-12));
}

TEST_CASE("deviation trace is decimated and starts at D_0 = 0") {
    LiftedSkewMap skew = make_skew(MapExpression("0.3 + 0.1*sin(2*pi*theta)", {}), kGolden);
    DeviationProfile prof = deviation_profile(skew, CirclePoint(0.0), 0.0, 0.3, 1000, 100);
    REQUIRE(prof.trace.size() == 11);
    CHECK(prof.trace.front().first == 0);
    CHECK(prof.trace.front().second == 0.0);
    CHECK(prof.trace.back().first == 1000);
}

TEST_CASE("regularity diagnostic: rigid is regular with C = 0") {
    LiftedSkewMap rigid = make_rigid(0.25, kGolden);
    RegularityVerdict v = regularity_diagnostic(rigid, 0.25, 4, 10000);
    CHECK(v.verdict == Regularity::Regular);
    CHECK(v.C_estimate < 1e-10);
    CHECK_THROWS_AS(regularity_diagnostic(rigid, 0.25, 2, 10000), Error);
    CHECK_THROWS_AS(regularity_diagnostic(rigid, 0.25, 4, 100), Error);
}

TEST_CASE("attracting-graph model is regular with modest C") {
    LiftedSkewMap m = make_attracting_graph(0.5, 0.1, kGolden);
    RegularityVerdict v = regularity_diagnostic(m, 0.0, 8, 50000);
    CHECK(v.verdict == Regularity::Regular);
    // the diagnostic seeds orbits up to half a period from the graph, so the
    // transient can contribute 1/2 on top of twice the graph amplitude
    CHECK(v.C_estimate <= 0.5 + 0.2 + 0.05);
    // an orbit started near the graph stays within the oscillation bound
    DeviationProfile prof = deviation_profile(m, CirclePoint(0.0), 0.05, 0.0, 50000);
    CHECK(std::max(prof.sup_dev, -prof.inf_dev) <= 0.5);
}

TEST_CASE("near-critical forced Arnold map shows deviation growth") {
    LiftedSkewMap m = make_arnold(0.25, 0.99, 1.0, kGolden);
    double rho = rotation_number_orbit(m, CirclePoint(0.0), 0.0, 200000).value;
    RegularityVerdict v = regularity_diagnostic(m, rho, 4, 100000);
    CHECK(v.verdict == Regularity::Irregular);
    // frozen from the reference run: diffusive-range growth exponent
    CHECK(v.evidence[0].growth_exponent == doctest::Approx(0.404).epsilon(0.25));
}

TEST_CASE("uniformity probe: C over 32 orbits within a factor 2 of C over 8") {
    LiftedSkewMap m = make_attracting_graph(0.5, 0.1, kGolden);
    double c8 = regularity_diagnostic(m, 0.0, 8, 20000).C_estimate;
    double c32 = regularity_diagnostic(m, 0.0, 32, 20000).C_estimate;
    CHECK(c32 <= 2.0 * c8);
    CHECK(c8 <= c32 + 1e-12);
}

TEST_CASE("shift consistency: rho + delta adds at most a linear drift") {
    const double delta = 1e-4;
    MapExpression a("0.3 + 0.1*sin(2*pi*theta)", {});
    LiftedSkewMap skew = make_skew(a, kGolden);
    const long long N = 20000;
    DeviationProfile base = deviation_profile(skew, CirclePoint(0.0), 0.0, 0.3, N);
    DeviationProfile shifted = deviation_profile(skew, CirclePoint(0.0), 0.0, 0.3 + delta, N);
    CHECK(shifted.sup_dev <= base.sup_dev + N * delta + 1e-9);
    CHECK(-shifted.inf_dev <= -base.inf_dev + N * delta + 1e-9);
}

TEST_CASE("positive-exponent cocycle with independent rotation numbers is never regular") {
    auto mat = [](double theta) {
        return Matrix2{0.5 - 4.0 * std::cos(2 * M_PI * theta), -1.0, 1.0, 0.0};
    };
    CocycleSpec spec(kGolden, mat, "herman-schrodinger");
    LiftedSkewMap proj = projectivize(spec);
    LyapunovEstimate lyap = lyapunov_exponent(spec, CirclePoint(0.0), 1.0, 0.3, 100000);
    CHECK(lyap.value > 0.5);
    RotationEstimate rot = rotation_number_orbit(proj, CirclePoint(0.0), 0.0, 1000000);
    auto rel = rational_relation_search(kGolden, rot.value, 64, 64,
                                        std::max(1e-7, 10.0 * rot.spread + 1e-12));
    CHECK_FALSE(rel.has_value());
    RegularityVerdict v = regularity_diagnostic(proj, rot.value, 6, 400000);
    CHECK(v.verdict != Regularity::Regular);
    // at this budget the growth is visible outright
    CHECK(v.verdict == Regularity::Irregular);
}
