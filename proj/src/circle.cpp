#include "qpf/circle.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

namespace qpf {

double wrap(double x_hat) {
    if (!std::isfinite(x_hat)) throw Error("wrap: non-finite input");
    double r = x_hat - std::floor(x_hat);
    if (r >= 1.0) r -= 1.0;  // floor rounding can land exactly on 1
    return r;
}

double circle_displacement(double a, double b) {
    double d = wrap(b - a);
    return d < 0.5 ? d : d - 1.0;
}

LiftedCurve::LiftedCurve(std::vector<double> theta_hat, std::vector<double> x_hat)
    : theta_(std::move(theta_hat)), x_(std::move(x_hat)) {
    if (theta_.size() != x_.size()) throw Error("LiftedCurve: sample arrays differ in length");
    if (theta_.size() < 2) throw Error("LiftedCurve: need at least 2 samples");
    for (std::size_t i = 0; i < theta_.size(); ++i) {
        if (!std::isfinite(theta_[i]) || !std::isfinite(x_[i]))
            throw Error("LiftedCurve: non-finite sample at index " + std::to_string(i));
        if (i > 0 && theta_[i] <= theta_[i - 1])
            throw Error("LiftedCurve: theta_hat not strictly increasing at index " +
                        std::to_string(i));
    }
}

double LiftedCurve::value(double theta_hat) const {
    if (theta_hat < theta_.front() - 1e-12 || theta_hat > theta_.back() + 1e-12)
        throw Error("LiftedCurve::value: theta_hat outside domain");
    theta_hat = std::clamp(theta_hat, theta_.front(), theta_.back());
    auto it = std::upper_bound(theta_.begin(), theta_.end(), theta_hat);
    std::size_t hi = std::min<std::size_t>(theta_.size() - 1,
                                           static_cast<std::size_t>(it - theta_.begin()));
    if (hi == 0) hi = 1;
    std::size_t lo = hi - 1;
    double t = (theta_hat - theta_[lo]) / (theta_[hi] - theta_[lo]);
    return x_[lo] + t * (x_[hi] - x_[lo]);
}

double LiftedCurve::min_x() const { return *std::min_element(x_.begin(), x_.end()); }
double LiftedCurve::max_x() const { return *std::max_element(x_.begin(), x_.end()); }

LiftedCurve LiftedCurve::shifted(double dx) const {
    std::vector<double> x2(x_);
    for (double& v : x2) v += dx;
    return LiftedCurve(theta_, x2);
}

double winding_number(const LiftedCurve& curve) {
    return curve.x().back() - curve.x().front();
}

double oscillation(const LiftedCurve& curve) {
    return curve.max_x() - curve.min_x();
}

LiftedCurve lift_curve(const std::vector<std::pair<CirclePoint, CirclePoint>>& samples,
                       double base_x_hat, double ambiguity_tol) {
    if (samples.size() < 2) throw Error("lift_curve: need at least 2 samples");
    if (std::abs(circle_displacement(samples[0].second.value(), wrap(base_x_hat))) > 1e-9)
        throw Error("lift_curve: base_x_hat does not project to the first sample");

    std::vector<double> theta(samples.size()), x(samples.size());
    theta[0] = samples[0].first.value();
    x[0] = base_x_hat;
    for (std::size_t i = 1; i < samples.size(); ++i) {
        double dtheta = wrap(samples[i].first.value() - samples[i - 1].first.value());
        if (dtheta == 0.0) throw Error("lift_curve: repeated base point at index " +
                                       std::to_string(i));
        theta[i] = theta[i - 1] + dtheta;
        double dx = circle_displacement(samples[i - 1].second.value(),
                                        samples[i].second.value());
        if (std::abs(dx) >= 0.5 - ambiguity_tol)
            throw Error("lift_curve: ambiguous step (|displacement| >= 1/2 - tol) at index " +
                        std::to_string(i));
        x[i] = x[i - 1] + dx;
    }
    return LiftedCurve(std::move(theta), std::move(x));
}

IntersectionWitness curves_intersect(const LiftedCurve& phi, const LiftedCurve& psi,
                                     int offset_lo, int offset_hi) {
    double lo = std::max(phi.domain_lo(), psi.domain_lo());
    double hi = std::min(phi.domain_hi(), psi.domain_hi());
    if (lo >= hi) throw Error("curves_intersect: domains do not overlap in an interval");

    // merged sample grid on the overlap
    std::vector<double> grid;
    grid.push_back(lo);
    for (double t : phi.theta())
        if (t > lo && t < hi) grid.push_back(t);
    for (double t : psi.theta())
        if (t > lo && t < hi) grid.push_back(t);
    grid.push_back(hi);
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

    std::vector<double> diff(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i)
        diff[i] = psi.value(grid[i]) - phi.value(grid[i]);

    IntersectionWitness w;
    for (int m = offset_lo; m <= offset_hi; ++m) {
        double prev = diff[0] - m;
        if (prev == 0.0) {
            w.found = true;
            w.offset = m;
            w.theta_lo = w.theta_hi = grid[0];
            return w;
        }
        for (std::size_t i = 1; i < grid.size(); ++i) {
            double cur = diff[i] - m;
            if (cur == 0.0 || (prev < 0.0) != (cur < 0.0)) {
                w.found = true;
                w.offset = m;
                w.theta_lo = grid[i - 1];
                w.theta_hi = grid[i];
                return w;
            }
            prev = cur;
        }
    }
    return w;
}

QCurve::QCurve(int period_q, int winding_k, LiftedCurve lift, double tol)
    : q_(period_q), k_(winding_k), lift_(std::move(lift)) {
    if (q_ < 1) throw Error("QCurve: period q must be positive");
    double span = lift_.domain_hi() - lift_.domain_lo();
    if (std::abs(span - q_) > tol)
        throw Error("QCurve: lift domain length " + std::to_string(span) +
                    " does not match period " + std::to_string(q_));
    double closure = lift_.x().back() - lift_.x().front();
    if (std::abs(closure - k_) > tol)
        throw Error("QCurve: endpoint drift " + std::to_string(closure) +
                    " does not match winding " + std::to_string(k_));
    // gamma(theta + l) - gamma(theta) must avoid Z for l = 1..q-1
    for (int l = 1; l < q_; ++l) {
        for (double t : lift_.theta()) {
            if (t + l > lift_.domain_hi()) break;
            double d = lift_.value(t + l) - lift_.value(t);
            if (std::abs(d - std::round(d)) < tol)
                throw Error("QCurve: branch collision gamma(theta+" + std::to_string(l) +
                            ") - gamma(theta) in Z near theta_hat = " + std::to_string(t));
        }
    }
}

std::vector<double> QCurve::fibre_points(CirclePoint theta) const {
    std::vector<double> pts;
    double base = lift_.domain_lo() + wrap(theta.value() - lift_.domain_lo());
    for (int j = 0; j < q_; ++j) {
        double t = base + j;
        if (t > lift_.domain_hi()) t -= q_;
        pts.push_back(wrap(lift_.value(t)));
    }
    return pts;
}

void write_curve_csv(std::ostream& os, const LiftedCurve& curve) {
    os << "theta_hat,x_hat\n";
    os.precision(17);
    for (std::size_t i = 0; i < curve.size(); ++i)
        os << curve.theta()[i] << ',' << curve.x()[i] << '\n';
}

LiftedCurve read_curve_csv(std::istream& is) {
    std::string line;
    if (!std::getline(is, line)) throw Error("curve CSV: empty stream");
    // tolerate trailing \r from foreign line endings
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != "theta_hat,x_hat")
        throw Error("curve CSV: missing required header 'theta_hat,x_hat'");
    std::vector<double> theta, x;
    std::size_t lineno = 1;
    while (std::getline(is, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::istringstream row(line);
        double t, v;
        char comma;
        if (!(row >> t >> comma >> v) || comma != ',')
            throw Error("curve CSV: malformed row at line " + std::to_string(lineno));
        theta.push_back(t);
        x.push_back(v);
    }
    return LiftedCurve(std::move(theta), std::move(x));
}

}  // namespace qpf
