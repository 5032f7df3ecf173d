#ifndef QPF_SEMICONJ_HPP
#define QPF_SEMICONJ_HPP

#include <iosfwd>
#include <vector>

#include "qpf/models.hpp"
#include "qpf/strips.hpp"

// Numerical realization of the semi-conjugacy construction for regular maps
// with rationally independent rotation numbers: an ordered family of strips
// B_r and the fibrewise monotone map H with H o T = R_{omega,rho} o H.

namespace qpf {

struct StripFamilyOptions {
    int R = 256;              // r-grid resolution over one period
    long long N = 10000;      // forward/backward sweep length
    int G = 256;              // theta grid
    double r_offset = 0.0;    // r_j = (j + r_offset) / R
    double reject_tol = 5e-3; // ordering violation beyond this rejects the family
    double C_bound = -1.0;    // if >= 0, check containment in [r - C, r + C]
};

struct StripFamily {
    int R = 0;
    int G = 0;
    double r_offset = 0.0;
    double rho = 0.0;
    // row j: bounding graphs of B_{r_j}, r_j = (j + r_offset)/R
    std::vector<std::vector<double>> upper;
    std::vector<std::vector<double>> lower;
    // diagnostics
    double max_order_violation = 0.0;  // worst raw ordering defect before enforcement
    double containment_excess = 0.0;   // max |value - r| beyond C_bound (if checked)
    double max_strip_width = 0.0;

    double r_value(int j) const { return (j + r_offset) / R; }
};

// Builds B_r for r on the grid by iterating horizontal lines of drifting
// height through the map (forward sweep through the lift, backward sweep
// through the fibre inverse), binning to bounding graphs, filling, and
// applying one reflexive-closure pass. Throws if the ordering invariant is
// violated beyond options.reject_tol (irregularity or insufficient N).
StripFamily build_strip_family(const LiftedSkewMap& map, double rho,
                               const StripFamilyOptions& options);

struct SemiConjugacy {
    int G = 0;
    int R = 0;
    double rho = 0.0;
    // per fibre: monotone table x -> H(x); xs[theta][j] maps to rs[j]
    std::vector<std::vector<double>> xs;
    std::vector<double> rs;

    // Piecewise-linear evaluation with the degree-one extension
    // H_theta(x + n) = H_theta(x) + n.
    double eval(int theta_bin, double x_hat) const;
    bool fibre_monotone(int theta_bin) const;
};

SemiConjugacy build_semiconjugacy(const StripFamily& family, int x_resolution = 0);

struct DefectReport {
    double defect = 0.0;        // max |H_{theta+omega}(T_theta(x)) - H_theta(x) - rho|
    double quantization = 0.0;  // 1/R, reported separately for attribution
};

DefectReport semiconjugacy_defect(const SemiConjugacy& H, const LiftedSkewMap& map,
                                  double rho);

// CSV columns theta,x_hat,H.
void write_semiconjugacy_csv(std::ostream& os, const SemiConjugacy& H);

}  // namespace qpf

#endif
