#include "qpf/regularity.hpp"

#include <algorithm>
#include <cmath>

namespace qpf {

namespace {

// Running-sup checkpoints for the growth fit and the stabilization tests.
struct SupTracker {
    double sup_abs = 0.0;
    double sup_at_90pct = 0.0;
    std::vector<std::pair<double, double>> log_points;  // (log n, log running sup|D|)
};

double fit_slope(const std::vector<std::pair<double, double>>& pts) {
    if (pts.size() < 2) return 0.0;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (auto [x, y] : pts) {
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    double n = static_cast<double>(pts.size());
    double denom = n * sxx - sx * sx;
    if (denom == 0.0) return 0.0;
    return (n * sxy - sx * sy) / denom;
}

bool stabilized(double final_val, double val_at_90pct, double scale) {
    double growth = std::abs(final_val) - std::abs(val_at_90pct);
    return growth <= 0.01 * std::max(scale, 1e-9);
}

}  // namespace

DeviationProfile deviation_profile(const LiftedSkewMap& map, CirclePoint theta, double x_hat,
                                   double rho, long long N, long long trace_decimate) {
    if (N < 2) throw Error("deviation_profile: N must be >= 2");
    if (!std::isfinite(rho)) throw Error("deviation_profile: rho must be finite");

    DeviationProfile prof;
    prof.rho_used = rho;
    prof.theta0 = theta.value();
    prof.x0 = x_hat;
    prof.n_max = N;

    const long long n90 = N - N / 10;
    const long long checkpoint_stride = std::max<long long>(1, N / 512);
    double th = theta.value();
    double x = x_hat;
    const double omega = map.omega();

    double sup_abs = 0.0;
    double sup_dev = 0.0, inf_dev = 0.0;
    double sup_at90 = 0.0, inf_at90 = 0.0;
    std::vector<std::pair<double, double>> log_points;
    if (trace_decimate > 0) prof.trace.push_back({0, 0.0});

    for (long long n = 1; n <= N; ++n) {
        x = map.fibre_lift(th, x);
        if (!std::isfinite(x) || std::abs(x) > 1e15)
            throw Error("deviation_profile: overflow at step " + std::to_string(n));
        th = wrap(th + omega);
        double dev = x - x_hat - static_cast<double>(n) * rho;
        sup_dev = std::max(sup_dev, dev);
        inf_dev = std::min(inf_dev, dev);
        sup_abs = std::max(sup_abs, std::abs(dev));
        if (n == n90) {
            sup_at90 = sup_dev;
            inf_at90 = inf_dev;
        }
        if (n % checkpoint_stride == 0 && n >= N / 2)
            log_points.push_back({std::log(static_cast<double>(n)),
                                  std::log(std::max(sup_abs, 1e-300))});
        if (trace_decimate > 0 && n % trace_decimate == 0) prof.trace.push_back({n, dev});
    }

    prof.sup_dev = sup_dev;
    prof.inf_dev = inf_dev;
    // deviations at the rounding-noise floor carry no growth information
    prof.growth_exponent = (sup_abs < 1e-10) ? 0.0 : fit_slope(log_points);
    // stabilization is judged against the orbit's overall deviation scale; a
    // one-sided extremum can legitimately sit near zero
    prof.bounded_above = stabilized(sup_dev, sup_at90, sup_abs);
    prof.bounded_below = stabilized(inf_dev, inf_at90, sup_abs);
    return prof;
}

RegularityVerdict regularity_diagnostic(const LiftedSkewMap& map, double rho, int n_orbits,
                                        long long N, double exponent_threshold) {
    if (n_orbits < 4) throw Error("regularity_diagnostic: n_orbits must be >= 4");
    if (N < 10000) throw Error("regularity_diagnostic: N must be >= 10^4");

    RegularityVerdict verdict;
    verdict.exponent_threshold = exponent_threshold;

    // deviations this small cannot witness unboundedness at desk scale; they
    // are dominated by the caller's rho estimation error (N * drift)
    const double dev_floor = 1e-3;

    // stratified theta strata, golden-ratio offsets in x: deterministic and
    // well spread without a PRNG
    const double golden = 0.6180339887498949;
    bool all_regular_like = true;
    bool any_irregular_like = false;
    for (int i = 0; i < n_orbits; ++i) {
        double theta = (i + 0.5) / n_orbits;
        double x = wrap(0.5 + golden * i);
        DeviationProfile prof = deviation_profile(map, CirclePoint(theta), x, rho, N);
        double sup_abs = std::max(std::abs(prof.sup_dev), std::abs(prof.inf_dev));
        verdict.C_estimate = std::max(verdict.C_estimate, sup_abs);
        bool stab = prof.bounded_above && prof.bounded_below;
        bool negligible = sup_abs < dev_floor;
        if (!negligible && !(prof.growth_exponent < exponent_threshold && stab))
            all_regular_like = false;
        if (!negligible && prof.growth_exponent > 2.0 * exponent_threshold && !stab)
            any_irregular_like = true;
        verdict.evidence.push_back(std::move(prof));
    }
    if (all_regular_like)
        verdict.verdict = Regularity::Regular;
    else if (any_irregular_like)
        verdict.verdict = Regularity::Irregular;
    else
        verdict.verdict = Regularity::Undecided;
    return verdict;
}

const char* to_string(Regularity r) {
    switch (r) {
        case Regularity::Regular: return "regular";
        case Regularity::Irregular: return "irregular";
        default: return "undecided";
    }
}

}  // namespace qpf
