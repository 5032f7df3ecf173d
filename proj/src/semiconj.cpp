#include "qpf/semiconj.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <thread>

namespace qpf {

namespace {

struct Sweep {
    // accumulated union of iterated lines, as bounding grid graphs
    std::vector<double> hi, lo;
};

// One pass of the union transform: push both bounding graphs through the
// map (source angle resolved by linear interpolation between grid bins) and
// merge in the horizontal line at the new seed height. Bins are independent,
// so the pass is data-parallel.
void advance(const LiftedSkewMap& map, Sweep& s, double new_height, bool forward,
             std::vector<double>& tmp_hi, std::vector<double>& tmp_lo) {
    const int G = static_cast<int>(s.hi.size());
    const double omega = map.omega();
    for (int i = 0; i < G; ++i) {
        double theta = static_cast<double>(i) / G;
        double pre = forward ? theta - omega : theta + omega;
        pre -= std::floor(pre);
        double pos = pre * G;
        int b0 = static_cast<int>(pos) % G;
        int b1 = (b0 + 1) % G;
        double t = pos - std::floor(pos);
        double src_hi = (1.0 - t) * s.hi[b0] + t * s.hi[b1];
        double src_lo = (1.0 - t) * s.lo[b0] + t * s.lo[b1];
        double vh, vl;
        if (forward) {
            vh = map.fibre_lift(pre, src_hi);
            vl = map.fibre_lift(pre, src_lo);
        } else {
            vh = map.fibre_inverse(theta, src_hi);
            vl = map.fibre_inverse(theta, src_lo);
        }
        if (!std::isfinite(vh) || !std::isfinite(vl) || std::abs(vh) > 1e12)
            throw Error("build_strip_family: sweep diverged");
        tmp_hi[i] = std::max(vh, new_height);
        tmp_lo[i] = std::min(vl, new_height);
    }
    s.hi.swap(tmp_hi);
    s.lo.swap(tmp_lo);
}

void sweep_family(const LiftedSkewMap& map, double rho, const StripFamilyOptions& opt,
                  bool forward, std::vector<std::vector<double>>& hi,
                  std::vector<std::vector<double>>& lo, std::vector<double>& best_dist) {
    const int G = opt.G, R = opt.R;
    Sweep s;
    s.hi.assign(G, 0.0);
    s.lo.assign(G, 0.0);
    std::vector<double> tmp_hi(G), tmp_lo(G);
    const double dir = forward ? 1.0 : -1.0;
    for (long long n = 1; n <= opt.N; ++n) {
        double height = dir * rho * static_cast<double>(n);
        advance(map, s, height, forward, tmp_hi, tmp_lo);
        if (n < opt.N / 2) continue;
        // harvest: the accumulated union approximates the family member at
        // r = height; assign it to the nearest r-grid bin, shifting vertically
        // by r_bin - height (exact in the integer part via A_{r+n} = A_r + n,
        // approximate in the fractional mismatch of at most 1/(2R))
        double f = height - std::floor(height);
        long long m = std::llround(f * R - opt.r_offset);
        long long bin = ((m % R) + R) % R;
        double frac_miss = std::abs((static_cast<double>(m) + opt.r_offset) / R - f);
        if (frac_miss < best_dist[bin]) {
            best_dist[bin] = frac_miss;
            double shift = (static_cast<double>(bin) + opt.r_offset) / R - height;
            for (int i = 0; i < G; ++i) {
                hi[bin][i] = s.hi[i] + shift;
                lo[bin][i] = s.lo[i] + shift;
            }
        }
    }
}

std::vector<double> sweep_min(const std::vector<double>& v) {
    const int G = static_cast<int>(v.size());
    std::vector<double> out(v.size());
    for (int i = 0; i < G; ++i)
        out[i] = std::min({v[(i + G - 1) % G], v[i], v[(i + 1) % G]});
    return out;
}

std::vector<double> sweep_max(const std::vector<double>& v) {
    const int G = static_cast<int>(v.size());
    std::vector<double> out(v.size());
    for (int i = 0; i < G; ++i)
        out[i] = std::max({v[(i + G - 1) % G], v[i], v[(i + 1) % G]});
    return out;
}

}  // namespace

StripFamily build_strip_family(const LiftedSkewMap& map, double rho,
                               const StripFamilyOptions& opt) {
    if (opt.R < 2 || opt.G < 16) throw Error("build_strip_family: R >= 2, G >= 16 required");
    if (opt.N < 100) throw Error("build_strip_family: N too small");
    if (!std::isfinite(rho)) throw Error("build_strip_family: rho must be finite");

    const int R = opt.R, G = opt.G;
    std::vector<std::vector<double>> hi(R, std::vector<double>(G));
    std::vector<std::vector<double>> lo(R, std::vector<double>(G));
    std::vector<double> best(R, std::numeric_limits<double>::infinity());

    // the backward sweep is independent of the forward one; run it alongside
    std::vector<std::vector<double>> bhi(R, std::vector<double>(G));
    std::vector<std::vector<double>> blo(R, std::vector<double>(G));
    std::vector<double> bbest(R, std::numeric_limits<double>::infinity());
    std::exception_ptr backward_failure;
    std::thread backward([&] {
        try {
            sweep_family(map, rho, opt, false, bhi, blo, bbest);
        } catch (...) {
            backward_failure = std::current_exception();
        }
    });
    try {
        sweep_family(map, rho, opt, true, hi, lo, best);
    } catch (...) {
        backward.join();
        throw;
    }
    backward.join();
    if (backward_failure) std::rethrow_exception(backward_failure);

    for (int j = 0; j < R; ++j) {
        if (!std::isfinite(best[j]) && !std::isfinite(bbest[j]))
            throw Error("build_strip_family: r-bin " + std::to_string(j) +
                        " never harvested; increase N");
        if (!std::isfinite(best[j])) {
            hi[j] = bhi[j];
            lo[j] = blo[j];
        } else if (std::isfinite(bbest[j])) {
            for (int i = 0; i < G; ++i) {
                hi[j][i] = std::max(hi[j][i], bhi[j][i]);
                lo[j][i] = std::min(lo[j][i], blo[j][i]);
            }
        }
    }

    StripFamily fam;
    fam.R = R;
    fam.G = G;
    fam.r_offset = opt.r_offset;
    fam.rho = rho;
    fam.upper.assign(R, {});
    fam.lower.assign(R, {});

    // B_r: one reflexive-closure pass on the upper bounding graph, then the
    // filled strip around the resulting reflexive graph
    for (int j = 0; j < R; ++j) {
        std::vector<double> psi = sweep_min(hi[j]);
        fam.upper[j] = sweep_max(psi);
        fam.lower[j] = sweep_min(psi);
    }

    // ordering invariant across the r-grid, including the wrap to r + 1
    double viol = 0.0;
    int worst_j = -1;
    auto check_pair = [&](const std::vector<double>& a, const std::vector<double>& b,
                          double lift_b, int j) {
        for (int i = 0; i < G; ++i) {
            double v = a[i] - (b[i] + lift_b);
            if (v > viol) {
                viol = v;
                worst_j = j;
            }
        }
    };
    for (int j = 0; j + 1 < R; ++j) {
        check_pair(fam.upper[j], fam.upper[j + 1], 0.0, j);
        check_pair(fam.lower[j], fam.lower[j + 1], 0.0, j);
    }
    check_pair(fam.upper[R - 1], fam.upper[0], 1.0, R - 1);
    check_pair(fam.lower[R - 1], fam.lower[0], 1.0, R - 1);
    fam.max_order_violation = std::max(viol, 0.0);
    if (fam.max_order_violation > opt.reject_tol)
        throw Error("build_strip_family: ordering violated by " +
                    std::to_string(fam.max_order_violation) + " between r-bins " +
                    std::to_string(worst_j) + " and " + std::to_string(worst_j + 1) +
                    "; irregularity or insufficient N");

    // enforce the (already nearly satisfied) ordering so downstream tables are
    // monotone by construction
    for (int j = 1; j < R; ++j)
        for (int i = 0; i < G; ++i) {
            fam.upper[j][i] = std::max(fam.upper[j][i], fam.upper[j - 1][i]);
            fam.lower[j][i] = std::max(fam.lower[j][i], fam.lower[j - 1][i]);
        }
    for (int i = 0; i < G; ++i) {
        fam.upper[R - 1][i] = std::min(fam.upper[R - 1][i], fam.upper[0][i] + 1.0);
        fam.lower[R - 1][i] = std::min(fam.lower[R - 1][i], fam.lower[0][i] + 1.0);
    }

    for (int j = 0; j < R; ++j) {
        double w = 0.0;
        for (int i = 0; i < G; ++i) w = std::max(w, fam.upper[j][i] - fam.lower[j][i]);
        fam.max_strip_width = std::max(fam.max_strip_width, w);
        if (opt.C_bound >= 0.0) {
            double r = fam.r_value(j);
            for (int i = 0; i < G; ++i) {
                double excess = std::max(std::abs(fam.upper[j][i] - r),
                                         std::abs(fam.lower[j][i] - r)) -
                                opt.C_bound;
                fam.containment_excess = std::max(fam.containment_excess, excess);
            }
        }
    }
    return fam;
}

double SemiConjugacy::eval(int theta_bin, double x_hat) const {
    const std::vector<double>& tab = xs[theta_bin];
    const int n = static_cast<int>(tab.size());
    // reduce into [tab[0], tab[0] + 1) using degree-one periodicity
    double m = std::floor(x_hat - tab[0]);
    double x = x_hat - m;
    // last virtual node: (tab[0] + 1, rs[0] + 1)
    auto it = std::upper_bound(tab.begin(), tab.end(), x);
    int hi_idx = static_cast<int>(it - tab.begin());
    double x0, x1, r0, r1;
    if (hi_idx == 0) {
        // x == tab[0] boundary case
        return rs[0] + m;
    }
    if (hi_idx == n) {
        x0 = tab[n - 1];
        x1 = tab[0] + 1.0;
        r0 = rs[n - 1];
        r1 = rs[0] + 1.0;
    } else {
        x0 = tab[hi_idx - 1];
        x1 = tab[hi_idx];
        r0 = rs[hi_idx - 1];
        r1 = rs[hi_idx];
    }
    double t = (x1 - x0 < 1e-15) ? 1.0 : (x - x0) / (x1 - x0);
    return r0 + t * (r1 - r0) + m;
}

bool SemiConjugacy::fibre_monotone(int theta_bin) const {
    const std::vector<double>& tab = xs[theta_bin];
    for (std::size_t j = 1; j < tab.size(); ++j)
        if (tab[j] < tab[j - 1]) return false;
    return true;
}

SemiConjugacy build_semiconjugacy(const StripFamily& family, int x_resolution) {
    (void)x_resolution;  // tables carry the full r-grid resolution
    SemiConjugacy H;
    H.G = family.G;
    H.R = family.R;
    H.rho = family.rho;
    H.rs.resize(family.R);
    for (int j = 0; j < family.R; ++j) H.rs[j] = family.r_value(j);
    H.xs.assign(family.G, std::vector<double>(family.R));
    for (int i = 0; i < family.G; ++i)
        for (int j = 0; j < family.R; ++j) H.xs[i][j] = family.upper[j][i];
    return H;
}

DefectReport semiconjugacy_defect(const SemiConjugacy& H, const LiftedSkewMap& map,
                                  double rho) {
    DefectReport rep;
    rep.quantization = 1.0 / H.R;
    const int G = H.G;
    const double omega = map.omega();
    for (int i = 0; i < G; ++i) {
        double theta = static_cast<double>(i) / G;
        int i_next = static_cast<int>(std::lround(wrap(theta + omega) * G)) % G;
        for (int j = 0; j < H.R; ++j) {
            double x = H.xs[i][j];
            double image = map.fibre_lift(theta, x);
            double d = std::abs(H.eval(i_next, image) - H.eval(i, x) - rho);
            rep.defect = std::max(rep.defect, d);
        }
    }
    return rep;
}

void write_semiconjugacy_csv(std::ostream& os, const SemiConjugacy& H) {
    os << "theta,x_hat,H\n";
    os.precision(17);
    for (int i = 0; i < H.G; ++i) {
        double theta = static_cast<double>(i) / H.G;
        for (int j = 0; j < H.R; ++j)
            os << theta << ',' << H.xs[i][j] << ',' << H.rs[j] << '\n';
    }
}

}  // namespace qpf
