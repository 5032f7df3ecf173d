#ifndef QPF_COCYCLE_HPP
#define QPF_COCYCLE_HPP

#include <array>
#include <functional>
#include <string>

#include "qpf/models.hpp"

// SL(2,R) cocycles over the irrational rotation: validation, projectivization
// into a forced circle map, and Lyapunov exponent estimation.

namespace qpf {

using Matrix2 = std::array<double, 4>;  // row major: m11 m12 m21 m22
using MatrixFn = std::function<Matrix2(double theta)>;

struct CocycleValidation {
    double max_det_defect = 0.0;  // sup |det M(theta) - 1| on the grid
    int column_winding = 0;       // projective winding of the first column (half-turns)
    bool det_ok = false;
    bool homotopy_ok = false;     // column winding == 0
};

class CocycleSpec {
public:
    CocycleSpec(double omega, MatrixFn matrix, std::string label, int branch_grid = 8192);

    double omega() const { return omega_; }
    const std::string& label() const { return label_; }
    Matrix2 matrix(double theta) const { return matrix_(theta); }
    const CocycleValidation& validation() const { return validation_; }

    // Continuous lift of the first-column direction angle (the branch anchor
    // for the projective fibre maps).
    double column_angle(double theta) const;

private:
    double omega_;
    MatrixFn matrix_;
    std::string label_;
    CocycleValidation validation_;
    std::vector<double> branch_table_;  // unwrapped column angle on a uniform grid
};

// The action of M on P(R^2), with fibre coordinate x = angle / pi mod 1 so the
// projectivized map is a degree-one forced circle map.
LiftedSkewMap projectivize(const CocycleSpec& cocycle);

struct LyapunovEstimate {
    double value = 0.0;
    double drift = 0.0;  // |running estimate at N| - |at 0.9 N|, convergence proxy
    long long n_iterates = 0;
};

LyapunovEstimate lyapunov_exponent(const CocycleSpec& cocycle, CirclePoint theta0,
                                   double v1, double v2, long long N);

// |det of the orbit product - 1| accumulated in log space; stays below
// N * 1e-12 for honestly det-1 matrices.
double det_drift(const CocycleSpec& cocycle, CirclePoint theta0, long long N);

}  // namespace qpf

#endif
