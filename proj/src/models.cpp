#include "qpf/models.hpp"

#include <cmath>

namespace qpf {

namespace {

constexpr double kTwoPi = 2.0 * M_PI;
constexpr double kOverflowBound = 1e15;

double check_omega(double omega) {
    if (!(omega > 0.0 && omega < 1.0))
        throw Error("omega must lie in (0,1), got " + std::to_string(omega));
    return omega;
}

// Monotone bisection solve of lift(theta, x) = y. The degree-one property
// gives the initial bracket: x in [y - lift(theta,0) - 1, y - lift(theta,0) + 1].
double bisect_inverse(const FibreFn& lift, double theta, double y, double tol) {
    double shift = y - lift(theta, 0.0);
    double lo = shift - 1.0, hi = shift + 1.0;
    double flo = lift(theta, lo) - y;
    double fhi = lift(theta, hi) - y;
    int expand = 0;
    while (flo > 0.0 || fhi < 0.0) {
        if (++expand > 60) throw Error("fibre_inverse: failed to bracket the root");
        if (flo > 0.0) {
            lo -= 1.0;
            flo = lift(theta, lo) - y;
        }
        if (fhi < 0.0) {
            hi += 1.0;
            fhi = lift(theta, hi) - y;
        }
    }
    // stop at tol or at the double resolution of the bracket, whichever is coarser
    for (int it = 0; it < 200; ++it) {
        double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        if (hi - lo <= tol) break;
        if (lift(theta, mid) - y < 0.0)
            lo = mid;
        else
            hi = mid;
    }
    double res = std::max(tol, 8.0 * std::abs(lo) * std::numeric_limits<double>::epsilon());
    if (hi - lo > 4.0 * res) throw Error("fibre_inverse: bisection did not converge");
    return 0.5 * (lo + hi);
}

}  // namespace

LiftedSkewMap::LiftedSkewMap(double omega, FibreFn fibre_lift, std::string label)
    : omega_(check_omega(omega)), lift_(std::move(fibre_lift)), label_(std::move(label)) {
    if (!lift_) throw Error("LiftedSkewMap: missing fibre lift");
}

double LiftedSkewMap::fibre_derivative(double theta, double x) const {
    if (!derivative_)
        throw Error("map '" + label_ + "' has no fibre derivative evaluator");
    return derivative_(theta, x);
}

double LiftedSkewMap::fibre_inverse(double theta, double y_hat, double tol) const {
    if (inverse_) return inverse_(theta, y_hat);
    return bisect_inverse(lift_, theta, y_hat, tol);
}

OrbitPoint iterate(const LiftedSkewMap& map, CirclePoint theta, double x_hat, long long n) {
    if (n < 0) throw Error("iterate: n must be >= 0 (use iterate_back)");
    double th = theta.value();
    double x = x_hat;
    const double omega = map.omega();
    for (long long i = 0; i < n; ++i) {
        x = map.fibre_lift(th, x);
        if (!std::isfinite(x) || std::abs(x) > kOverflowBound)
            throw Error("iterate: fibre coordinate overflow at step " + std::to_string(i + 1));
        th = wrap(th + omega);
    }
    return {CirclePoint(th), x};
}

OrbitPoint iterate_back(const LiftedSkewMap& map, CirclePoint theta, double x_hat,
                        long long n, double tol) {
    if (n < 0) throw Error("iterate_back: n must be >= 0");
    double th = theta.value();
    double x = x_hat;
    const double omega = map.omega();
    for (long long i = 0; i < n; ++i) {
        th = wrap(th - omega);
        x = map.fibre_inverse(th, x, tol);
        if (!std::isfinite(x) || std::abs(x) > kOverflowBound)
            throw Error("iterate_back: fibre coordinate overflow at step " +
                        std::to_string(i + 1));
    }
    return {CirclePoint(th), x};
}

HomeoValidation validate_homeomorphism(const LiftedSkewMap& map, int theta_grid, int x_grid) {
    if (theta_grid < 16 || x_grid < 16)
        throw Error("validate_homeomorphism: grids must be >= 16");
    HomeoValidation rep;
    rep.min_increment = std::numeric_limits<double>::infinity();
    for (int i = 0; i < theta_grid; ++i) {
        double theta = static_cast<double>(i) / theta_grid;
        double prev = map.fibre_lift(theta, 0.0);
        for (int j = 0; j <= x_grid; ++j) {
            double x = static_cast<double>(j) / x_grid;
            double v = map.fibre_lift(theta, x);
            double defect = std::abs(map.fibre_lift(theta, x + 1.0) - v - 1.0);
            rep.periodicity_defect = std::max(rep.periodicity_defect, defect);
            if (j > 0) rep.min_increment = std::min(rep.min_increment, v - prev);
            prev = v;
        }
    }
    rep.periodicity_ok = rep.periodicity_defect < 1e-9;
    rep.monotone_ok = rep.min_increment > 0.0;
    rep.pass = rep.periodicity_ok && rep.monotone_ok;
    return rep;
}

LiftedSkewMap make_rigid(double rho, double omega) {
    LiftedSkewMap m(omega, [rho](double, double x) { return x + rho; },
                    "rigid(rho=" + std::to_string(rho) + ")");
    m.with_derivative([](double, double) { return 1.0; });
    m.with_inverse([rho](double, double y) { return y - rho; });
    return m;
}

LiftedSkewMap make_skew(const MapExpression& a, double omega) {
    if (a.depends_on_x())
        throw Error("make_skew: a(theta) must not depend on x");
    LiftedSkewMap m(omega, [a](double theta, double x) { return x + a.eval(theta, 0.0); },
                    "skew(a=" + a.source() + ")");
    m.with_derivative([](double, double) { return 1.0; });
    m.with_inverse([a](double theta, double y) { return y - a.eval(theta, 0.0); });
    return m;
}

LiftedSkewMap make_arnold(double c, double K, double eps, double omega) {
    if (!(K >= 0.0 && K < 1.0))
        throw Error("make_arnold: K must lie in [0,1) to keep fibre maps invertible, got " +
                    std::to_string(K));
    auto lift = [c, K, eps](double theta, double x) {
        return x + c + K / kTwoPi * std::sin(kTwoPi * x) + eps * std::sin(kTwoPi * theta);
    };
    LiftedSkewMap m(omega, lift,
                    "arnold(c=" + std::to_string(c) + ",K=" + std::to_string(K) +
                        ",eps=" + std::to_string(eps) + ")");
    m.with_derivative(
        [K](double, double x) { return 1.0 + K * std::cos(kTwoPi * x); });
    return m;
}

LiftedSkewMap make_attracting_graph(double b, double amp, double omega) {
    if (!(b >= 0.0 && b < 1.0))
        throw Error("make_attracting_graph: b must lie in [0,1), got " + std::to_string(b));
    auto gamma = [amp](double theta) { return amp * std::sin(kTwoPi * theta); };
    auto lift = [b, gamma, omega](double theta, double x) {
        double u = x - gamma(theta);
        return gamma(wrap(theta + omega)) + u - b / kTwoPi * std::sin(kTwoPi * u);
    };
    LiftedSkewMap m(omega, lift,
                    "attracting_graph(b=" + std::to_string(b) + ",amp=" +
                        std::to_string(amp) + ")");
    m.with_derivative([b, gamma](double theta, double x) {
        return 1.0 - b * std::cos(kTwoPi * (x - gamma(theta)));
    });
    return m;
}

LiftedSkewMap make_custom(const MapExpression& lift, double omega) {
    MapExpression d = lift.derivative_x();
    LiftedSkewMap m(omega, [lift](double theta, double x) { return lift.eval(theta, x); },
                    "custom(" + lift.source() + ")");
    m.with_derivative([d](double theta, double x) { return d.eval(theta, x); });
    return m;
}

LiftedSkewMap conjugate(const LiftedSkewMap& inner, const MapExpression& h_lift,
                        double bisect_tol) {
    auto h = [h_lift](double theta, double x) { return h_lift.eval(theta, x); };
    // validate the conjugacy on a coarse grid before accepting it
    {
        LiftedSkewMap probe(inner.omega(), h, "h-probe");
        HomeoValidation v = validate_homeomorphism(probe, 64, 64);
        if (!v.pass)
            throw Error("conjugate: h is not a degree-one strictly increasing lift "
                        "(periodicity defect " + std::to_string(v.periodicity_defect) +
                        ", min increment " + std::to_string(v.min_increment) + ")");
    }
    const double omega = inner.omega();
    const LiftedSkewMap inner_copy = inner;
    auto lift = [inner_copy, h, omega, bisect_tol](double theta, double x) {
        double y = inner_copy.fibre_lift(theta, h(theta, x));
        return bisect_inverse(h, wrap(theta + omega), y, bisect_tol);
    };
    LiftedSkewMap m(omega, lift, "conj(" + inner.label() + ", h=" + h_lift.source() + ")");
    if (inner.has_derivative()) {
        // chain rule through h, inner, h^{-1}
        MapExpression dh = h_lift.derivative_x();
        auto lift_copy = lift;
        m.with_derivative([inner_copy, h, dh, omega, lift_copy](double theta, double x) {
            double hx = h(theta, x);
            double th1 = wrap(theta + omega);
            double image = lift_copy(theta, x);
            double denom = dh.eval(th1, image);
            return dh.eval(theta, x) * inner_copy.fibre_derivative(theta, hx) / denom;
        });
    }
    if (inner.has_analytic_inverse()) {
        auto inner_copy2 = inner;
        m.with_inverse([inner_copy2, h, omega, bisect_tol](double theta, double y) {
            double hy = h(wrap(theta + omega), y);
            double z = inner_copy2.fibre_inverse(theta, hy);
            return bisect_inverse(h, theta, z, bisect_tol);
        });
    }
    return m;
}

double variation_V(const LiftedSkewMap& map, int theta_quadrature, int x_grid) {
    if (!map.has_derivative())
        throw Error("variation_V: map '" + map.label() + "' has no derivative evaluator");
    if (theta_quadrature < 1 || x_grid < 2)
        throw Error("variation_V: bad quadrature sizes");
    double total = 0.0;
    for (int i = 0; i < theta_quadrature; ++i) {
        double theta = static_cast<double>(i) / theta_quadrature;
        double var = 0.0;
        double first = map.fibre_derivative(theta, 0.0);
        double prev = first;
        for (int j = 1; j < x_grid; ++j) {
            double v = map.fibre_derivative(theta, static_cast<double>(j) / x_grid);
            var += std::abs(v - prev);
            prev = v;
        }
        var += std::abs(first - prev);  // wraparound: DT is 1-periodic in x
        total += var;
    }
    return total / theta_quadrature;
}

}  // namespace qpf
