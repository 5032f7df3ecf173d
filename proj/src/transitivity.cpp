#include "qpf/transitivity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace qpf {

BoxScanResult box_transitivity_scan(const LiftedSkewMap& map, int G, int samples_per_box,
                                    long long N) {
    if (G < 4) throw Error("box_transitivity_scan: G must be >= 4");
    if (samples_per_box < 1) throw Error("box_transitivity_scan: need at least one sample");
    if (N < 1) throw Error("box_transitivity_scan: empty budget");

    const int boxes = G * G;
    BoxScanResult res;
    res.grid = G;
    res.budget = N;
    res.hit_time.assign(static_cast<std::size_t>(boxes) * boxes,
                        std::numeric_limits<uint32_t>::max());

    const int stencil = std::max(1, static_cast<int>(std::lround(std::sqrt(
                                    static_cast<double>(samples_per_box)))));
    const double omega = map.omega();

    auto box_of = [G](double theta, double x) {
        int bt = static_cast<int>(theta * G);
        int bx = static_cast<int>(x * G);
        if (bt >= G) bt = G - 1;
        if (bx >= G) bx = G - 1;
        return bt * G + bx;
    };

    for (int sb = 0; sb < boxes; ++sb) {
        const int st = sb / G, sx = sb % G;
        uint32_t* row = &res.hit_time[static_cast<std::size_t>(sb) * boxes];
        for (int a = 0; a < stencil; ++a) {
            for (int b = 0; b < stencil; ++b) {
                double theta = (st + (a + 0.5) / stencil) / G;
                double x = (sx + (b + 0.5) / stencil) / G;
                double xw = x;
                double th = theta;
                int here = box_of(th, wrap(xw));
                if (row[here] > 0) row[here] = 0;
                for (long long n = 1; n <= N; ++n) {
                    xw = map.fibre_lift(th, xw);
                    th = wrap(th + omega);
                    if (std::abs(xw) > 1e12)
                        throw Error("box_transitivity_scan: orbit overflow");
                    int t = box_of(th, wrap(xw));
                    if (static_cast<uint32_t>(n) < row[t]) row[t] = static_cast<uint32_t>(n);
                }
            }
        }
    }

    uint32_t latest_hit = 0;
    for (int sb = 0; sb < boxes; ++sb) {
        const uint32_t* row = &res.hit_time[static_cast<std::size_t>(sb) * boxes];
        for (int t = 0; t < boxes; ++t) {
            if (row[t] == std::numeric_limits<uint32_t>::max()) {
                ++res.unreached_pairs;
                if (res.witness_source < 0) {
                    res.witness_source = sb;
                    res.witness_target = t;
                }
            } else {
                latest_hit = std::max(latest_hit, row[t]);
            }
        }
    }

    if (res.unreached_pairs == 0) {
        res.verdict = TransitivityVerdict::TransitiveEvidence;
    } else if (latest_hit <= static_cast<uint32_t>(N / 2)) {
        // no pair was newly reached in the whole second half: the unreached
        // set has stabilized
        res.verdict = TransitivityVerdict::ObstructionFound;
    } else {
        res.verdict = TransitivityVerdict::Inconclusive;
    }
    return res;
}

const char* to_string(TransitivityVerdict v) {
    switch (v) {
        case TransitivityVerdict::TransitiveEvidence: return "transitive-evidence";
        case TransitivityVerdict::ObstructionFound: return "obstruction-found";
        default: return "inconclusive";
    }
}

std::vector<double> winding_growth(const LiftedSkewMap& map, double theta_lo,
                                   double theta_hi, double x0, int n_samples, int steps) {
    if (!(theta_hi > theta_lo)) throw Error("winding_growth: empty base interval");
    if (n_samples < 2 || steps < 0) throw Error("winding_growth: bad sampling");
    std::vector<double> theta(n_samples), x(n_samples);
    for (int i = 0; i < n_samples; ++i) {
        theta[i] = theta_lo + (theta_hi - theta_lo) * i / (n_samples - 1);
        x[i] = x0;
    }
    std::vector<double> windings;
    windings.push_back(0.0);
    const double omega = map.omega();
    for (int m = 1; m <= steps; ++m) {
        for (int i = 0; i < n_samples; ++i) {
            x[i] = map.fibre_lift(wrap(theta[i]), x[i]);
            theta[i] += omega;
        }
        windings.push_back(x[n_samples - 1] - x[0]);
    }
    return windings;
}

}  // namespace qpf
