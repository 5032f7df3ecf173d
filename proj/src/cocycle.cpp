#include "qpf/cocycle.hpp"

#include <cmath>

namespace qpf {

namespace {

double principal_mod_pi(double y, double x) {
    double a = std::atan2(y, x);
    a = std::fmod(a, M_PI);
    if (a < 0.0) a += M_PI;
    return a;  // in [0, pi)
}

}  // namespace

CocycleSpec::CocycleSpec(double omega, MatrixFn matrix, std::string label, int branch_grid)
    : omega_(omega), matrix_(std::move(matrix)), label_(std::move(label)) {
    if (!(omega_ > 0.0 && omega_ < 1.0)) throw Error("CocycleSpec: omega must lie in (0,1)");
    if (!matrix_) throw Error("CocycleSpec: missing matrix evaluator");
    if (branch_grid < 64) throw Error("CocycleSpec: branch grid too coarse");

    branch_table_.resize(branch_grid + 1);
    double prev = 0.0;
    for (int i = 0; i <= branch_grid; ++i) {
        double theta = static_cast<double>(i) / branch_grid;
        Matrix2 m = matrix_(theta);
        double det = m[0] * m[3] - m[1] * m[2];
        validation_.max_det_defect =
            std::max(validation_.max_det_defect, std::abs(det - 1.0));
        double p = principal_mod_pi(m[2], m[0]);
        if (i == 0) {
            branch_table_[0] = p;
        } else {
            // unwrap: choose the representative of p (mod pi) nearest the
            // previous table value
            double k = std::round((prev - p) / M_PI);
            double v = p + k * M_PI;
            if (std::abs(v - prev) > M_PI / 2.0 - 1e-6)
                throw Error("CocycleSpec: column direction varies too fast for the branch "
                            "table near theta = " + std::to_string(theta) +
                            "; branch discontinuity beyond tolerance");
            branch_table_[i] = v;
        }
        prev = branch_table_[i];
    }
    double wind = (branch_table_[branch_grid] - branch_table_[0]) / M_PI;
    validation_.column_winding = static_cast<int>(std::lround(wind));
    validation_.det_ok = validation_.max_det_defect < 1e-9;
    validation_.homotopy_ok = (validation_.column_winding == 0);
    if (!validation_.det_ok)
        throw Error("CocycleSpec '" + label_ + "': det defect " +
                    std::to_string(validation_.max_det_defect) + " exceeds 1e-9");
}

double CocycleSpec::column_angle(double theta) const {
    const int n = static_cast<int>(branch_table_.size()) - 1;
    double t = wrap(theta) * n;
    int i = static_cast<int>(t);
    if (i >= n) i = n - 1;
    double interp = branch_table_[i] + (t - i) * (branch_table_[i + 1] - branch_table_[i]);
    // snap the interpolated anchor back onto the exact principal value
    Matrix2 m = matrix_(wrap(theta));
    double p = principal_mod_pi(m[2], m[0]);
    return p + M_PI * std::round((interp - p) / M_PI);
}

LiftedSkewMap projectivize(const CocycleSpec& cocycle) {
    CocycleSpec c = cocycle;
    auto lift = [c](double theta, double x_hat) {
        double n = std::floor(x_hat);
        double xf = x_hat - n;
        double phi = M_PI * xf;
        Matrix2 m = c.matrix(theta);
        double cs = std::cos(phi), sn = std::sin(phi);
        double w1 = m[0] * cs + m[1] * sn;
        double w2 = m[2] * cs + m[3] * sn;
        double p = principal_mod_pi(w2, w1);
        double anchor = c.column_angle(theta);
        // the image angle lies in [anchor, anchor + pi) because the projective
        // action is monotone and moves the base direction (x = 0) to anchor
        double d = p - anchor;
        d -= M_PI * std::floor(d / M_PI);
        return (anchor + d) / M_PI + n;
    };
    return LiftedSkewMap(c.omega(), lift, "projective(" + cocycle.label() + ")");
}

LyapunovEstimate lyapunov_exponent(const CocycleSpec& cocycle, CirclePoint theta0,
                                   double v1, double v2, long long N) {
    if (N < 1000) throw Error("lyapunov_exponent: N must be >= 10^3");
    double norm0 = std::hypot(v1, v2);
    if (!(norm0 > 1e-12)) throw Error("lyapunov_exponent: degenerate start vector");
    v1 /= norm0;
    v2 /= norm0;
    double theta = theta0.value();
    const double omega = cocycle.omega();
    double sum = 0.0;
    double sum_at_90 = 0.0;
    const long long n90 = N - N / 10;
    for (long long n = 1; n <= N; ++n) {
        Matrix2 m = cocycle.matrix(theta);
        double w1 = m[0] * v1 + m[1] * v2;
        double w2 = m[2] * v1 + m[3] * v2;
        double norm = std::hypot(w1, w2);
        if (!(norm > 0.0)) throw Error("lyapunov_exponent: zero image vector");
        sum += std::log(norm);
        v1 = w1 / norm;
        v2 = w2 / norm;
        theta = wrap(theta + omega);
        if (n == n90) sum_at_90 = sum;
    }
    LyapunovEstimate est;
    est.value = sum / static_cast<double>(N);
    est.n_iterates = N;
    est.drift = (n90 >= 1)
                    ? std::abs(est.value - sum_at_90 / static_cast<double>(n90))
                    : 0.0;
    return est;
}

double det_drift(const CocycleSpec& cocycle, CirclePoint theta0, long long N) {
    double theta = theta0.value();
    const double omega = cocycle.omega();
    double log_det = 0.0;
    for (long long n = 0; n < N; ++n) {
        Matrix2 m = cocycle.matrix(theta);
        double det = m[0] * m[3] - m[1] * m[2];
        if (!(det > 0.0)) throw Error("det_drift: non-positive determinant");
        log_det += std::log(det);
        theta = wrap(theta + omega);
    }
    return std::abs(std::expm1(log_det));
}

}  // namespace qpf
