#ifndef QPF_FOURIER_HPP
#define QPF_FOURIER_HPP

#include <complex>
#include <functional>
#include <vector>

// Truncated Fourier solution of the cohomological equation
//   a(theta) - mean(a) = phi(theta + omega) - phi(theta)
// for skew translations: phi_k = a_k / (e^{2 pi i k omega} - 1).

namespace qpf {

struct CoboundarySolution {
    double mean = 0.0;            // rotation number of the skew translation
    std::vector<double> phi;      // phi on a uniform grid
    double sup = 0.0;
    double inf = 0.0;
    int small_divisors = 0;       // modes with |e^{2 pi i k omega} - 1| < 1e-8
    double max_mode_amplitude = 0.0;
};

CoboundarySolution solve_coboundary(const std::function<double(double)>& a, double omega,
                                    int modes = 1024, int grid = 4096);

}  // namespace qpf

#endif
