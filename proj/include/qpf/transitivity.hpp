#ifndef QPF_TRANSITIVITY_HPP
#define QPF_TRANSITIVITY_HPP

#include <cstdint>
#include <vector>

#include "qpf/models.hpp"

// Empirical box-to-box reachability scan on T^2 and the winding-growth
// diagnostic behind the irregular-case transitivity argument.

namespace qpf {

enum class TransitivityVerdict { TransitiveEvidence, ObstructionFound, Inconclusive };

struct BoxScanResult {
    int grid = 0;  // G x G boxes
    TransitivityVerdict verdict = TransitivityVerdict::Inconclusive;
    // first-hit times, row = source box, col = target box, UINT32_MAX = never
    std::vector<uint32_t> hit_time;
    long long budget = 0;
    int unreached_pairs = 0;
    int witness_source = -1;  // an unreached (source, target) pair, if any
    int witness_target = -1;

    uint32_t hit(int source, int target) const {
        return hit_time[static_cast<std::size_t>(source) * grid * grid + target];
    }
};

// Seeds samples_per_box points per source box (square stencil), iterates each
// N steps and marks visited boxes. Transitive evidence requires every
// (source, target) pair realized; an obstruction requires an unreached pair
// whose unreached status survived the entire second half of the budget.
BoxScanResult box_transitivity_scan(const LiftedSkewMap& map, int G, int samples_per_box,
                                    long long N);

const char* to_string(TransitivityVerdict v);

// Winding numbers k(T^m psi) of the iterated images of the horizontal segment
// psi(theta) = x0 over [theta_lo, theta_hi], for m = 0..steps. Growth of the
// winding is the mechanism that forces intersections for irregular maps.
std::vector<double> winding_growth(const LiftedSkewMap& map, double theta_lo,
                                   double theta_hi, double x0, int n_samples, int steps);

}  // namespace qpf

#endif
