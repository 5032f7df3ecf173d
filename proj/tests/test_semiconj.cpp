#include <doctest.h>

#include <cmath>
#include <sstream>

#include "qpf/cocycle.hpp"
#include "qpf/rotation.hpp"
#include "qpf/semiconj.hpp"

using namespace qpf;

namespace {

const double kGolden = (std::sqrt(5.0) - 1.0) / 2.0;
const double kRho = std::sqrt(3.0) - 1.0;  // rationally independent of kGolden

double h_lift(double theta, double x) {
    return x + 0.1 * std::sin(2.0 * M_PI * (x + theta));
}

// invert h_lift on the fibre over theta by bisection (test-side oracle)
double h_inverse(double theta, double y) {
    double lo = y - 0.2, hi = y + 0.2;
    for (int i = 0; i < 100; ++i) {
        double mid = 0.5 * (lo + hi);
        if (h_lift(theta, mid) < y)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

LiftedSkewMap conjugated_rigid() {
    LiftedSkewMap rigid = make_rigid(kRho, kGolden);
    return conjugate(rigid, MapExpression("x + 0.1*sin(2*pi*(x+theta))", {}));
}

StripFamilyOptions small_options() {
    StripFamilyOptions opt;
    opt.R = 128;
    opt.N = 6000;
    opt.G = 128;
    return opt;
}

}  // namespace

TEST_CASE("rigid independent family: B_r are the horizontal lines") {
    LiftedSkewMap rigid = make_rigid(kRho, kGolden);
    StripFamily fam = build_strip_family(rigid, kRho, small_options());
    CHECK(fam.max_strip_width < 1e-9);
    CHECK(fam.max_order_violation < 1e-12);
    for (int j = 0; j < fam.R; j += 16) {
        double r = fam.r_value(j);
        for (int i = 0; i < fam.G; i += 16)
            CHECK(fam.upper[j][i] == doctest::Approx(r).epsilon(1e-9));
    }
    SemiConjugacy H = build_semiconjugacy(fam);
    DefectReport def = semiconjugacy_defect(H, rigid, kRho);
    CHECK(def.defect < 1.0 / fam.R + 1e-6);
    CHECK(def.quantization == doctest::Approx(1.0 / fam.R));
    // H is the identity up to r-grid quantization
    for (int i = 0; i < H.G; i += 16)
        for (double x : {0.12, 0.5, 0.97, 1.3, -0.4})
            CHECK(std::abs(H.eval(i, x) - x) < 1.0 / fam.R + 1e-9);
}

TEST_CASE("conjugated rigid family matches the pulled-back lines") {
    LiftedSkewMap conj = conjugated_rigid();
    StripFamily fam = build_strip_family(conj, kRho, small_options());
    // B_r tracks h^{-1}(r + a) where a = 0.1 is the perturbation amplitude:
    // the union of iterated lines closes onto that curve family
    double max_err = 0.0;
    for (int j = 0; j < fam.R; j += 8) {
        double r = fam.r_value(j);
        for (int i = 0; i < fam.G; i += 8) {
            double theta = static_cast<double>(i) / fam.G;
            max_err = std::max(max_err,
                               std::abs(fam.upper[j][i] - h_inverse(theta, r + 0.1)));
        }
    }
    CHECK(max_err < 1e-2);
}

TEST_CASE("conjugated rigid semi-conjugacy: defect, monotonicity, degree one") {
    LiftedSkewMap conj = conjugated_rigid();
    StripFamily fam = build_strip_family(conj, kRho, small_options());
    SemiConjugacy H = build_semiconjugacy(fam);
    DefectReport def = semiconjugacy_defect(H, conj, kRho);
    CHECK(def.defect < 5e-3);
    for (int i = 0; i < H.G; ++i) {
        CHECK(H.fibre_monotone(i));
        // degree one holds exactly by construction of the family
        double x0 = H.xs[i][17];
        CHECK(H.eval(i, x0 + 1.0) - H.eval(i, x0) == doctest::Approx(1.0).epsilon(1e-12));
    }
    // H recovers h up to a global fibre constant
    double c = H.eval(0, h_inverse(0.0, 0.3)) - 0.3;
    double err = 0.0;
    for (int i = 0; i < H.G; i += 8) {
        double theta = static_cast<double>(i) / H.G;
        for (double r : {0.1, 0.45, 0.8}) {
            double x = h_inverse(theta, r);
            err = std::max(err, std::abs(H.eval(i, x) - r - c));
        }
    }
    CHECK(err < 1e-2 + 1.0 / fam.R);
}

TEST_CASE("skew translation family matches the Fourier coboundary oracle") {
    MapExpression a("r + 0.1*sin(2*pi*theta)", {{"r", kRho}});
    LiftedSkewMap skew = make_skew(a, kGolden);
    StripFamily fam = build_strip_family(skew, kRho, small_options());
    // oracle: a - rho = phi(theta+omega) - phi(theta) with a single harmonic
    double s = std::sin(M_PI * kGolden), co = std::cos(M_PI * kGolden);
    double A = -0.05, B = -0.05 * co / s;
    auto phi = [&](double th) {
        return A * std::sin(2 * M_PI * th) + B * std::cos(2 * M_PI * th);
    };
    double inf_phi = 1e300;
    for (int i = 0; i < 1 << 14; ++i)
        inf_phi = std::min(inf_phi, phi(static_cast<double>(i) / (1 << 14)));
    double err = 0.0;
    for (int j = 0; j < fam.R; j += 8)
        for (int i = 0; i < fam.G; ++i) {
            double theta = static_cast<double>(i) / fam.G;
            err = std::max(err, std::abs(fam.upper[j][i] -
                                         (fam.r_value(j) + phi(theta) - inf_phi)));
        }
    CHECK(err < 1e-2);
}

TEST_CASE("strict order certificate for well-separated family members") {
    LiftedSkewMap conj = conjugated_rigid();
    StripFamilyOptions opt = small_options();
    StripFamily fam = build_strip_family(conj, kRho, opt);
    auto strip_at = [&](int j) {
        StripApprox s;
        s.lower = GridGraph{fam.G, GraphKind::Lower, fam.lower[j]};
        s.upper = GridGraph{fam.G, GraphKind::Upper, fam.upper[j]};
        return s;
    };
    for (int j = 0; j + 8 < fam.R; j += 24) {
        StripOrderResult ord = strip_order(strip_at(j), strip_at(j + 8));
        CHECK(ord.order == StripOrder::Precedes);
    }
}

TEST_CASE("family builder rejects an irregular map") {
    auto mat = [](double theta) {
        return Matrix2{0.5 - 4.0 * std::cos(2 * M_PI * theta), -1.0, 1.0, 0.0};
    };
    CocycleSpec spec(kGolden, mat, "herman-schrodinger");
    LiftedSkewMap proj = projectivize(spec);
    double rho = rotation_number_orbit(proj, CirclePoint(0.0), 0.0, 200000).value;
    StripFamilyOptions opt;
    opt.R = 64;
    opt.N = 3000;
    opt.G = 64;
    CHECK_THROWS_WITH_AS(build_strip_family(proj, rho, opt),
                         doctest::Contains("ordering violated"), Error);
}

TEST_CASE("a corrupted fibre produces a visible defect") {
    LiftedSkewMap rigid = make_rigid(kRho, kGolden);
    StripFamilyOptions opt = small_options();
    StripFamily fam = build_strip_family(rigid, kRho, opt);
    SemiConjugacy H = build_semiconjugacy(fam);
    for (double& x : H.xs[37]) x += 0.1;  // shift one fibre table
    DefectReport def = semiconjugacy_defect(H, rigid, kRho);
    CHECK(def.defect >= 0.09);
}

TEST_CASE("semi-conjugacy CSV output") {
    LiftedSkewMap rigid = make_rigid(kRho, kGolden);
    StripFamilyOptions opt = small_options();
    opt.R = 32;
    opt.G = 32;
    opt.N = 2000;
    StripFamily fam = build_strip_family(rigid, kRho, opt);
    SemiConjugacy H = build_semiconjugacy(fam);
    std::ostringstream os;
    write_semiconjugacy_csv(os, H);
    std::istringstream is(os.str());
    std::string header;
    std::getline(is, header);
    CHECK(header == "theta,x_hat,H");
}
