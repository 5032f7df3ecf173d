#ifndef QPF_STRIPS_HPP
#define QPF_STRIPS_HPP

#include <iosfwd>
#include <vector>

#include "qpf/models.hpp"
#include "qpf/rotation.hpp"

// Grid-based bounding graphs, filled-in sets, reflexive closure, strip
// ordering, pinched-set measurement, pullback approximation of invariant
// graphs and the q-cover strip construction.

namespace qpf {

enum class GraphKind { Upper, Lower };

// A sampled graph over the uniform grid theta_i = i * (q / G) on a q-cover
// (cover length 1 unless stated otherwise by the owning StripApprox).
struct GridGraph {
    int G = 0;
    GraphKind kind = GraphKind::Upper;
    std::vector<double> values;

    double theta(int i, double cover_len = 1.0) const {
        return cover_len * static_cast<double>(i) / G;
    }
};

struct StripApprox {
    GridGraph lower;
    GridGraph upper;
    int cover_q = 1;
    int winding_k = 0;

    int grid() const { return upper.G; }
    double width() const;       // max over bins of upper - lower
    double gap(int i) const { return upper.values[i] - lower.values[i]; }
};

// Per-bin extrema of a point cloud; every bin must receive at least one point.
StripApprox bounding_graphs(const std::vector<OrbitPoint>& points, int G);

// Grid surrogate of the closure-envelope operation: a 3-point min sweep for an
// upper graph (max sweep for a lower graph), iterated until unchanged, with the
// output kind flipped. max_sweeps = 0 iterates to the fixed point; max_sweeps = 1
// is the single dilation pass used when approximating minimal strips.
GridGraph reflexive_closure(const GridGraph& graph, int max_sweeps = 0);

enum class StripOrder { Precedes, Equal, Succeeds, Overlap };

struct StripOrderResult {
    StripOrder order = StripOrder::Overlap;
    std::vector<int> overlap_bins;  // populated for Overlap
};

StripOrderResult strip_order(const StripApprox& A, const StripApprox& B, double tol = 1e-9);

// Fraction of bins with upper - lower < gap_tol.
double pinched_measure(const StripApprox& strip, double gap_tol);

enum class PullbackDirection { Forward, Backward };

struct PullbackResult {
    StripApprox strip;       // bounding graphs of the last ceil(iterations/4) iterates
    GridGraph last;          // final iterate graph
    bool converged = false;  // successive graphs within 1e-6 sup norm
    double final_step = 0.0; // sup-norm distance between the last two iterates
};

// Fixed-point iteration of the graph transform phi(theta) <- T_{theta-omega}(phi(theta-omega)),
// theta-omega resolved to the nearest grid bin. Backward direction iterates the
// inverse transform phi(theta) <- T^{-1}_theta(phi(theta+omega)).
PullbackResult pullback_attractor(const LiftedSkewMap& map, const GridGraph& init,
                                  int iterations, PullbackDirection direction);

GridGraph constant_graph(int G, double value, GraphKind kind = GraphKind::Upper);

struct StripSearchResult {
    StripApprox strip;        // on the q-cover, G bins over [0, q)
    double max_half_width = 0.0;  // max |x - (k/q) theta| over all iterates
    bool contained = true;        // all iterates stayed within C_bound of the line
    double line_slope = 0.0;      // k/q of the reference line
    long long n_forward = 0;
    long long n_backward = 0;
};

// Explicit q-cover construction: lift T^q to the q-cover, iterate samples of
// the line x = (k/q) theta forward and backward N steps, and bin sup/inf of the
// deviation from the line. The relation supplies rho = -(k omega + l)/q.
StripSearchResult strip_search(const LiftedSkewMap& map, const RationalRelation& relation,
                               double C_bound, long long N, int G);

// CSV columns theta_hat,lower,upper.
void write_strip_csv(std::ostream& os, const StripApprox& strip);

}  // namespace qpf

#endif
