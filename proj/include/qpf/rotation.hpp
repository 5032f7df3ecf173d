#ifndef QPF_ROTATION_HPP
#define QPF_ROTATION_HPP

#include <optional>
#include <vector>

#include "qpf/models.hpp"

// Fibrewise rotation number estimation and rational-dependence detection.

namespace qpf {

enum class RotationMethod { Orbit, FibreAverage };

struct RotationEstimate {
    double value = 0.0;
    long long n_iterates = 0;
    double spread = 0.0;   // convergence proxy: max-min of trailing partial estimates
    RotationMethod method = RotationMethod::Orbit;
};

// (T^N_theta(x) - x) / N; spread from the final 10 partial estimates.
RotationEstimate rotation_number_orbit(const LiftedSkewMap& map, CirclePoint theta,
                                       double x_hat, long long N);

// (1/N) * mean over the theta grid of T^N_theta(0); spread = max-min across fibres.
RotationEstimate rotation_number_fibre_average(const LiftedSkewMap& map, long long N,
                                               int theta_grid);

// Integer relation l + k*omega + q*rho = 0 with q > 0 and gcd(|l|,|k|,q) = 1.
struct RationalRelation {
    long long l = 0;
    long long k = 0;
    long long q = 1;
    double residual = 0.0;
};

// Exhaustive scan over 1 <= q <= max_q, |k| <= max_k with l = -round(k*omega + q*rho).
// Returns the relation with smallest q (ties: smallest |k|) whose residual < tol,
// none otherwise. Distinct candidate relations surviving gcd normalization raise an
// ambiguity error (tol dominates the data). A numerically triggered q = 0 relation
// (omega looks rational) is reported as an error since omega is assumed irrational.
std::optional<RationalRelation> rational_relation_search(double omega, double rho,
                                                         long long max_q, long long max_k,
                                                         double tol);

}  // namespace qpf

#endif
