#include "qpf/strips.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <string>

namespace qpf {

namespace {

int nearest_bin(double theta, int G, double cover_len = 1.0) {
    double t = theta / cover_len;
    t -= std::floor(t);
    int b = static_cast<int>(std::lround(t * G)) % G;
    return b < 0 ? b + G : b;
}

void check_grid(int G) {
    if (G < 16) throw Error("grid graphs need G >= 16");
}

}  // namespace

double StripApprox::width() const {
    double w = 0.0;
    for (int i = 0; i < upper.G; ++i) w = std::max(w, upper.values[i] - lower.values[i]);
    return w;
}

StripApprox bounding_graphs(const std::vector<OrbitPoint>& points, int G) {
    check_grid(G);
    std::vector<double> hi(G, -std::numeric_limits<double>::infinity());
    std::vector<double> lo(G, std::numeric_limits<double>::infinity());
    for (const OrbitPoint& p : points) {
        int b = static_cast<int>(p.theta.value() * G);
        if (b >= G) b = G - 1;
        hi[b] = std::max(hi[b], p.x_hat);
        lo[b] = std::min(lo[b], p.x_hat);
    }
    std::string empty;
    for (int i = 0; i < G; ++i) {
        if (lo[i] > hi[i]) empty += (empty.empty() ? "" : ",") + std::to_string(i);
    }
    if (!empty.empty())
        throw Error("bounding_graphs: empty theta bins {" + empty + "}");
    for (int i = 0; i < G; ++i) {
        if (hi[i] - lo[i] >= 1.0)
            throw Error("bounding_graphs: bin " + std::to_string(i) +
                        " spans a full period; points not reduced to a common lift branch");
    }
    StripApprox s;
    s.upper = GridGraph{G, GraphKind::Upper, std::move(hi)};
    s.lower = GridGraph{G, GraphKind::Lower, std::move(lo)};
    return s;
}

GridGraph reflexive_closure(const GridGraph& graph, int max_sweeps) {
    check_grid(graph.G);
    const bool take_min = (graph.kind == GraphKind::Upper);
    std::vector<double> cur = graph.values;
    std::vector<double> next(cur.size());
    const int G = graph.G;
    int sweeps = 0;
    for (;;) {
        bool changed = false;
        for (int i = 0; i < G; ++i) {
            double a = cur[(i + G - 1) % G];
            double b = cur[i];
            double c = cur[(i + 1) % G];
            double v = take_min ? std::min({a, b, c}) : std::max({a, b, c});
            next[i] = v;
            if (v != b) changed = true;
        }
        cur.swap(next);
        ++sweeps;
        if (!changed) break;
        if (max_sweeps > 0 && sweeps >= max_sweeps) break;
        if (sweeps > 4 * G) break;  // erosion of a G-bin graph cannot take longer
    }
    GridGraph out;
    out.G = G;
    out.kind = take_min ? GraphKind::Lower : GraphKind::Upper;
    out.values = std::move(cur);
    return out;
}

StripOrderResult strip_order(const StripApprox& A, const StripApprox& B, double tol) {
    if (A.grid() != B.grid() || A.cover_q != B.cover_q)
        throw Error("strip_order: grid or cover mismatch");
    const int G = A.grid();
    bool equal = true;
    bool a_below = true, b_below = true;
    for (int i = 0; i < G; ++i) {
        if (std::abs(A.upper.values[i] - B.upper.values[i]) > tol ||
            std::abs(A.lower.values[i] - B.lower.values[i]) > tol)
            equal = false;
        if (!(A.upper.values[i] < B.lower.values[i])) a_below = false;
        if (!(B.upper.values[i] < A.lower.values[i])) b_below = false;
    }
    StripOrderResult res;
    if (equal) {
        res.order = StripOrder::Equal;
    } else if (a_below) {
        res.order = StripOrder::Precedes;
    } else if (b_below) {
        res.order = StripOrder::Succeeds;
    } else {
        res.order = StripOrder::Overlap;
        for (int i = 0; i < G; ++i) {
            bool disjoint_here =
                A.upper.values[i] < B.lower.values[i] || B.upper.values[i] < A.lower.values[i];
            if (!disjoint_here) res.overlap_bins.push_back(i);
        }
    }
    return res;
}

double pinched_measure(const StripApprox& strip, double gap_tol) {
    const int G = strip.grid();
    int pinched = 0;
    for (int i = 0; i < G; ++i)
        if (strip.gap(i) < gap_tol) ++pinched;
    return static_cast<double>(pinched) / G;
}

GridGraph constant_graph(int G, double value, GraphKind kind) {
    check_grid(G);
    return GridGraph{G, kind, std::vector<double>(static_cast<std::size_t>(G), value)};
}

PullbackResult pullback_attractor(const LiftedSkewMap& map, const GridGraph& init,
                                  int iterations, PullbackDirection direction) {
    check_grid(init.G);
    if (iterations < 4) throw Error("pullback_attractor: iterations must be >= 4");
    const int G = init.G;
    const double omega = map.omega();
    const int keep_from = iterations - (iterations + 3) / 4;  // last ceil(it/4) iterates

    std::vector<double> cur = init.values;
    std::vector<double> next(cur.size());
    std::vector<double> hi(cur.size(), -std::numeric_limits<double>::infinity());
    std::vector<double> lo(cur.size(), std::numeric_limits<double>::infinity());

    // source bin for each target bin, resolved once
    std::vector<int> src(G);
    for (int i = 0; i < G; ++i) {
        double theta = static_cast<double>(i) / G;
        double pre = (direction == PullbackDirection::Forward) ? theta - omega : theta + omega;
        src[i] = nearest_bin(pre, G);
    }

    double step_norm = std::numeric_limits<double>::infinity();
    for (int it = 1; it <= iterations; ++it) {
        step_norm = 0.0;
        for (int i = 0; i < G; ++i) {
            double theta_src = static_cast<double>(src[i]) / G;
            double v;
            if (direction == PullbackDirection::Forward) {
                v = map.fibre_lift(theta_src, cur[src[i]]);
            } else {
                double theta_here = static_cast<double>(i) / G;
                v = map.fibre_inverse(theta_here, cur[src[i]]);
            }
            if (!std::isfinite(v) || std::abs(v) > 1e12)
                throw Error("pullback_attractor: divergence at iteration " + std::to_string(it));
            next[i] = v;
            step_norm = std::max(step_norm, std::abs(v - cur[i]));
        }
        cur.swap(next);
        if (it > keep_from) {
            for (int i = 0; i < G; ++i) {
                hi[i] = std::max(hi[i], cur[i]);
                lo[i] = std::min(lo[i], cur[i]);
            }
        }
    }

    PullbackResult res;
    res.strip.upper = GridGraph{G, GraphKind::Upper, std::move(hi)};
    res.strip.lower = GridGraph{G, GraphKind::Lower, std::move(lo)};
    res.last = GridGraph{G, init.kind, cur};
    res.final_step = step_norm;
    res.converged = step_norm < 1e-6;
    return res;
}

StripSearchResult strip_search(const LiftedSkewMap& map, const RationalRelation& relation,
                               double C_bound, long long N, int G) {
    check_grid(G);
    if (N < 1) throw Error("strip_search: N must be >= 1");
    // accumulated drift of the line under the certified relation
    if (relation.residual * static_cast<double>(N) > 0.01)
        throw Error("strip_search: relation residual " + std::to_string(relation.residual) +
                    " too large for N = " + std::to_string(N) + "; the line would drift");

    // relation l + k omega + q rho = 0  =>  rho = (k_eff/q) omega + l_eff/q
    // with k_eff = -k, l_eff = -l; reference line gamma_0(theta) = (k_eff/q) theta.
    const int q = static_cast<int>(relation.q);
    const double k_eff = static_cast<double>(-relation.k);
    const double l_eff = static_cast<double>(-relation.l);
    const double slope = k_eff / q;
    const double omega = map.omega();

    // T^q lifted to the q-cover with fibre lift reduced by l_eff so the line
    // has zero average drift; the base moves by q*omega mod q.
    auto cover_step = [&](double theta_hat, double x_hat) {
        double th = theta_hat;
        double x = x_hat;
        for (int j = 0; j < q; ++j) {
            x = map.fibre_lift(wrap(th), x);
            th += omega;
        }
        return std::pair<double, double>{th, x - l_eff};
    };
    auto cover_step_back = [&](double theta_hat, double x_hat) {
        double th = theta_hat;
        double x = x_hat + l_eff;
        for (int j = 0; j < q; ++j) {
            th -= omega;
            x = map.fibre_inverse(wrap(th), x);
        }
        return std::pair<double, double>{th, x};
    };

    std::vector<double> hi(G, -std::numeric_limits<double>::infinity());
    std::vector<double> lo(G, std::numeric_limits<double>::infinity());
    StripSearchResult res;
    res.line_slope = slope;
    res.n_forward = N;
    res.n_backward = N;

    auto deposit = [&](double theta_hat, double dev) {
        int b = nearest_bin(theta_hat / q, G) ;
        hi[b] = std::max(hi[b], dev);
        lo[b] = std::min(lo[b], dev);
        res.max_half_width = std::max(res.max_half_width, std::abs(dev));
        if (std::abs(dev) > C_bound) res.contained = false;
    };

    const int seeds = G;
    for (int s = 0; s < seeds; ++s) {
        double theta0 = q * (static_cast<double>(s) + 0.5) / seeds;
        // forward sweep
        double th = theta0, x = slope * theta0;
        deposit(th, 0.0);
        for (long long n = 0; n < N; ++n) {
            auto [th2, x2] = cover_step(th, x);
            // wrap the cover coordinate, shifting x by the winding to keep
            // the deviation from the line continuous
            double dev = x2 - slope * th2;
            while (th2 >= q) {
                th2 -= q;
                x2 -= k_eff;
            }
            while (th2 < 0) {
                th2 += q;
                x2 += k_eff;
            }
            th = th2;
            x = x2;
            if (!std::isfinite(x) || std::abs(dev) > 1e12)
                throw Error("strip_search: forward orbit diverged");
            deposit(th, dev);
        }
        // backward sweep
        th = theta0;
        x = slope * theta0;
        for (long long n = 0; n < N; ++n) {
            auto [th2, x2] = cover_step_back(th, x);
            double dev = x2 - slope * th2;
            while (th2 >= q) {
                th2 -= q;
                x2 -= k_eff;
            }
            while (th2 < 0) {
                th2 += q;
                x2 += k_eff;
            }
            th = th2;
            x = x2;
            if (!std::isfinite(x) || std::abs(dev) > 1e12)
                throw Error("strip_search: backward orbit diverged");
            deposit(th, dev);
        }
    }

    // fill any bins the seeds missed from their neighbours (can only happen
    // at very small N); then add the line back in
    for (int i = 0; i < G; ++i) {
        if (lo[i] > hi[i]) {
            int left = (i + G - 1) % G, right = (i + 1) % G;
            if (lo[left] <= hi[left]) {
                lo[i] = lo[left];
                hi[i] = hi[left];
            } else if (lo[right] <= hi[right]) {
                lo[i] = lo[right];
                hi[i] = hi[right];
            } else {
                throw Error("strip_search: bin " + std::to_string(i) + " never visited");
            }
        }
    }
    for (int i = 0; i < G; ++i) {
        double line = slope * (q * static_cast<double>(i) / G);
        hi[i] += line;
        lo[i] += line;
    }
    res.strip.upper = GridGraph{G, GraphKind::Upper, std::move(hi)};
    res.strip.lower = GridGraph{G, GraphKind::Lower, std::move(lo)};
    res.strip.cover_q = q;
    res.strip.winding_k = static_cast<int>(k_eff);
    return res;
}

void write_strip_csv(std::ostream& os, const StripApprox& strip) {
    os << "theta_hat,lower,upper\n";
    os.precision(17);
    const double cover = strip.cover_q;
    for (int i = 0; i < strip.grid(); ++i)
        os << cover * static_cast<double>(i) / strip.grid() << ',' << strip.lower.values[i]
           << ',' << strip.upper.values[i] << '\n';
}

}  // namespace qpf
