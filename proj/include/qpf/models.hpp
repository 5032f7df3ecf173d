#ifndef QPF_MODELS_HPP
#define QPF_MODELS_HPP

#include <functional>
#include <memory>
#include <optional>
#include <string>

#include "qpf/circle.hpp"
#include "qpf/expr.hpp"

// Quasiperiodically forced circle maps (theta, x) -> (theta + omega, T_theta(x)),
// represented through a lift of the fibre maps: fibre_lift(theta, x_hat + 1) =
// fibre_lift(theta, x_hat) + 1 and fibre_lift(theta, .) strictly increasing.

namespace qpf {

using FibreFn = std::function<double(double theta, double x_hat)>;

class LiftedSkewMap {
public:
    LiftedSkewMap(double omega, FibreFn fibre_lift, std::string label);

    double omega() const { return omega_; }
    const std::string& label() const { return label_; }

    double fibre_lift(double theta, double x_hat) const { return lift_(theta, x_hat); }
    double fibre_lift(CirclePoint theta, double x_hat) const {
        return lift_(theta.value(), x_hat);
    }

    bool has_derivative() const { return static_cast<bool>(derivative_); }
    double fibre_derivative(double theta, double x) const;

    // Inverse fibre map on the lift. Uses the analytic inverse when one was
    // supplied at construction, otherwise bisection of the forward lift.
    double fibre_inverse(double theta, double y_hat, double tol = 1e-12) const;
    bool has_analytic_inverse() const { return static_cast<bool>(inverse_); }

    LiftedSkewMap& with_derivative(FibreFn d) {
        derivative_ = std::move(d);
        return *this;
    }
    LiftedSkewMap& with_inverse(FibreFn inv) {
        inverse_ = std::move(inv);
        return *this;
    }

private:
    double omega_;
    FibreFn lift_;
    FibreFn derivative_;  // dT_theta/dx, optional
    FibreFn inverse_;     // optional analytic inverse lift
    std::string label_;
};

struct OrbitPoint {
    CirclePoint theta;
    double x_hat;
};

// n >= 0 forward steps along the base orbit. Throws on |x_hat| overflow.
OrbitPoint iterate(const LiftedSkewMap& map, CirclePoint theta, double x_hat, long long n);

// One backward step via the fibre inverse.
OrbitPoint iterate_back(const LiftedSkewMap& map, CirclePoint theta, double x_hat,
                        long long n, double tol = 1e-12);

struct HomeoValidation {
    double periodicity_defect = 0.0;  // sup |lift(x+1) - lift(x) - 1| over the grid
    double min_increment = 0.0;       // min of lift over adjacent x grid points
    bool periodicity_ok = false;
    bool monotone_ok = false;
    bool pass = false;
};

HomeoValidation validate_homeomorphism(const LiftedSkewMap& map, int theta_grid = 256,
                                       int x_grid = 256);

// --- the model zoo ---

// x -> x + rho on every fibre.
LiftedSkewMap make_rigid(double rho, double omega);

// Skew translation x -> x + a(theta); a given as a DSL expression in theta.
LiftedSkewMap make_skew(const MapExpression& a, double omega);

// Forced Arnold map x -> x + c + K/(2 pi) sin(2 pi x) + eps sin(2 pi theta).
// Requires K < 1 so the fibre maps stay invertible.
LiftedSkewMap make_arnold(double c, double K, double eps, double omega);

// Model with an explicit attracting invariant graph gamma(theta) = amp sin(2 pi theta):
// x -> gamma(theta + omega) + u - b/(2 pi) sin(2 pi u), u = x - gamma(theta).
LiftedSkewMap make_attracting_graph(double b, double amp, double omega);

// Custom fibre lift from a DSL expression in theta and x. The degree-one and
// monotonicity contracts are the caller's to validate (validate_homeomorphism).
LiftedSkewMap make_custom(const MapExpression& lift, double omega);

// h^{-1}_{theta+omega} o inner_theta o h_theta, where h_lift defines per fibre a
// degree-one strictly increasing lift. h inverses are computed by bisection.
LiftedSkewMap conjugate(const LiftedSkewMap& inner, const MapExpression& h_lift,
                        double bisect_tol = 1e-12);

// V(T): theta-average (uniform quadrature) of the total variation of
// x -> DT_theta(x) on the x grid, wraparound segment included.
double variation_V(const LiftedSkewMap& map, int theta_quadrature, int x_grid);

}  // namespace qpf

#endif
