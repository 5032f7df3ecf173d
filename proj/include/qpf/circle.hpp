#ifndef QPF_CIRCLE_HPP
#define QPF_CIRCLE_HPP

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

// Circle and cover arithmetic: points on T^1 = R/Z, sampled lifted curves,
// winding numbers and the curve-intersection machinery.

namespace qpf {

class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// x mod 1, reduced to [0,1). Rejects non-finite input.
double wrap(double x_hat);

// Signed shortest displacement from a to b on the circle, in [-1/2, 1/2).
double circle_displacement(double a, double b);

// A point on T^1, always stored in [0,1).
class CirclePoint {
public:
    CirclePoint() : value_(0.0) {}
    explicit CirclePoint(double x_hat) : value_(wrap(x_hat)) {}
    double value() const { return value_; }
    CirclePoint operator+(double dx) const { return CirclePoint(value_ + dx); }
    friend bool operator==(const CirclePoint& a, const CirclePoint& b) {
        return a.value_ == b.value_;
    }

private:
    double value_;
};

// A continuous curve on the cover, represented by samples (theta_hat, x_hat)
// with strictly increasing theta_hat. All predicates are defined on the
// piecewise-linear interpolant of the samples.
class LiftedCurve {
public:
    LiftedCurve(std::vector<double> theta_hat, std::vector<double> x_hat);

    const std::vector<double>& theta() const { return theta_; }
    const std::vector<double>& x() const { return x_; }
    std::size_t size() const { return theta_.size(); }
    double domain_lo() const { return theta_.front(); }
    double domain_hi() const { return theta_.back(); }

    // Piecewise-linear evaluation; theta_hat must lie inside the domain.
    double value(double theta_hat) const;

    double min_x() const;
    double max_x() const;

    LiftedCurve shifted(double dx) const;  // lift + constant

private:
    std::vector<double> theta_;
    std::vector<double> x_;
};

// phi_hat(b) - phi_hat(a): endpoint drift of the lift.
double winding_number(const LiftedCurve& curve);

// max - min of the lift over its samples.
double oscillation(const LiftedCurve& curve);

// Continuous lift of circle-valued samples. Consecutive x-samples must be
// separated by less than 1/2 - tol on the circle so the lift is unambiguous;
// theta advances by the forward gap between consecutive base points.
// base_x_hat must project to the first x sample.
LiftedCurve lift_curve(const std::vector<std::pair<CirclePoint, CirclePoint>>& samples,
                       double base_x_hat, double ambiguity_tol = 1e-6);

struct IntersectionWitness {
    bool found = false;
    int offset = 0;          // integer m with psi - (phi + m) changing sign
    double theta_lo = 0.0;   // bracketing interval for the crossing
    double theta_hi = 0.0;
};

// Sign change of psi_hat - (phi_hat + m) on the common domain for some
// integer m in [offset_lo, offset_hi]. Domains must overlap in an interval.
IntersectionWitness curves_intersect(const LiftedCurve& phi, const LiftedCurve& psi,
                                     int offset_lo, int offset_hi);

// A closed curve wrapping the base q times and the fibre winding_k times:
// gamma_hat(theta_hat + q) = gamma_hat(theta_hat) + k. The lift spans one
// fundamental domain of length q.
class QCurve {
public:
    QCurve(int period_q, int winding_k, LiftedCurve lift, double tol = 1e-6);

    int period_q() const { return q_; }
    int winding_k() const { return k_; }
    const LiftedCurve& lift() const { return lift_; }

    // Projections of the q lift branches to one T^2 fibre.
    std::vector<double> fibre_points(CirclePoint theta) const;

private:
    int q_;
    int k_;
    LiftedCurve lift_;
};

// CSV with header "theta_hat,x_hat".
void write_curve_csv(std::ostream& os, const LiftedCurve& curve);
LiftedCurve read_curve_csv(std::istream& is);

}  // namespace qpf

#endif
