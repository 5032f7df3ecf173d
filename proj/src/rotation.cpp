#include "qpf/rotation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace qpf {

RotationEstimate rotation_number_orbit(const LiftedSkewMap& map, CirclePoint theta,
                                       double x_hat, long long N) {
    if (N < 1) throw Error("rotation_number_orbit: N must be >= 1");
    double th = theta.value();
    double x = x_hat;
    const double omega = map.omega();
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    const long long tail_from = std::max<long long>(1, N - 9);
    for (long long n = 1; n <= N; ++n) {
        x = map.fibre_lift(th, x);
        if (!std::isfinite(x) || std::abs(x) > 1e15)
            throw Error("rotation_number_orbit: overflow at step " + std::to_string(n));
        th = wrap(th + omega);
        if (n >= tail_from) {
            double partial = (x - x_hat) / static_cast<double>(n);
            lo = std::min(lo, partial);
            hi = std::max(hi, partial);
        }
    }
    RotationEstimate est;
    est.value = (x - x_hat) / static_cast<double>(N);
    est.n_iterates = N;
    est.spread = hi - lo;
    est.method = RotationMethod::Orbit;
    return est;
}

RotationEstimate rotation_number_fibre_average(const LiftedSkewMap& map, long long N,
                                               int theta_grid) {
    if (N < 1) throw Error("rotation_number_fibre_average: N must be >= 1");
    if (theta_grid < 16) throw Error("rotation_number_fibre_average: theta_grid must be >= 16");
    double sum = 0.0;
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (int i = 0; i < theta_grid; ++i) {
        CirclePoint theta(static_cast<double>(i) / theta_grid);
        OrbitPoint p = iterate(map, theta, 0.0, N);
        double per_theta = p.x_hat / static_cast<double>(N);
        sum += per_theta;
        lo = std::min(lo, per_theta);
        hi = std::max(hi, per_theta);
    }
    RotationEstimate est;
    est.value = sum / theta_grid;
    est.n_iterates = N;
    est.spread = hi - lo;
    est.method = RotationMethod::FibreAverage;
    return est;
}

namespace {

long long gcd3(long long a, long long b, long long c) {
    return std::gcd(std::gcd(std::abs(a), std::abs(b)), std::abs(c));
}

RationalRelation normalized(long long l, long long k, long long q, double residual) {
    long long g = gcd3(l, k, q);
    if (g > 1) {
        l /= g;
        k /= g;
        q /= g;
    }
    return RationalRelation{l, k, q, residual};
}

}  // namespace

std::optional<RationalRelation> rational_relation_search(double omega, double rho,
                                                         long long max_q, long long max_k,
                                                         double tol) {
    if (max_q < 1 || max_k < 1) throw Error("rational_relation_search: max_q, max_k >= 1");
    if (!(tol > 0.0)) throw Error("rational_relation_search: tol must be positive");

    // q = 0 branch: l + k*omega = 0 would mean omega is (numerically) rational,
    // which contradicts the standing irrationality assumption.
    for (long long k = 1; k <= max_k; ++k) {
        double t = k * omega;
        double l = -std::round(t);
        if (std::abs(l + t) < tol)
            throw Error("rational_relation_search: omega satisfies " + std::to_string((long long)l) +
                        " + " + std::to_string(k) + "*omega = 0 within tol; omega must be irrational");
    }

    std::vector<RationalRelation> hits;
    for (long long q = 1; q <= max_q; ++q) {
        for (long long k = -max_k; k <= max_k; ++k) {
            double t = k * omega + q * rho;
            long long l = static_cast<long long>(-std::llround(t));
            double residual = std::abs(l + t);
            if (residual < tol) {
                RationalRelation r = normalized(l, k, q, residual);
                bool seen = false;
                for (const auto& h : hits)
                    if (h.l == r.l && h.k == r.k && h.q == r.q) {
                        seen = true;
                        break;
                    }
                if (!seen) hits.push_back(r);
            }
        }
    }
    if (hits.empty()) return std::nullopt;
    if (hits.size() > 1) {
        std::string msg = "rational_relation_search: tol admits inconsistent relations:";
        for (const auto& h : hits)
            msg += " (" + std::to_string(h.l) + "," + std::to_string(h.k) + "," +
                   std::to_string(h.q) + ")";
        throw Error(msg);
    }
    return hits.front();
}

}  // namespace qpf
