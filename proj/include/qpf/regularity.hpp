#ifndef QPF_REGULARITY_HPP
#define QPF_REGULARITY_HPP

#include <vector>

#include "qpf/models.hpp"

// Deviations from uniform rotation D_n = T^n_theta(x) - x - n*rho, the
// regular/irregular diagnostic and the one-sided boundedness flags.

namespace qpf {

struct DeviationProfile {
    double rho_used = 0.0;
    double theta0 = 0.0;
    double x0 = 0.0;
    long long n_max = 0;
    double sup_dev = 0.0;  // max_n D_n (D_0 = 0, so >= 0)
    double inf_dev = 0.0;  // min_n D_n (<= 0)
    // least-squares slope of log running-sup|D| vs log n over the second half
    double growth_exponent = 0.0;
    // running extrema stabilized over the last 10% of the run (< 1% growth)
    bool bounded_above = false;
    bool bounded_below = false;
    // decimated (n, D_n) trace, empty unless requested
    std::vector<std::pair<long long, double>> trace;
};

DeviationProfile deviation_profile(const LiftedSkewMap& map, CirclePoint theta, double x_hat,
                                   double rho, long long N, long long trace_decimate = 0);

enum class Regularity { Regular, Irregular, Undecided };

struct RegularityVerdict {
    Regularity verdict = Regularity::Undecided;
    double C_estimate = 0.0;  // sup over sampled orbits of max(|sup_dev|, |inf_dev|)
    std::vector<DeviationProfile> evidence;
    double exponent_threshold = 0.1;
};

// Samples n_orbits starting points from a stratified low-discrepancy (theta, x)
// set, profiles each for N steps against the supplied rho, and aggregates.
// Regular: all exponents below threshold and all running extrema stabilized.
// Irregular: some orbit with exponent > 2*threshold and still-growing extrema.
// Anything else: undecided.
RegularityVerdict regularity_diagnostic(const LiftedSkewMap& map, double rho, int n_orbits,
                                        long long N, double exponent_threshold = 0.1);

const char* to_string(Regularity r);

}  // namespace qpf

#endif
