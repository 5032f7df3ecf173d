#include "qpf/fourier.hpp"

#include <cmath>

#include "qpf/circle.hpp"

namespace qpf {

CoboundarySolution solve_coboundary(const std::function<double(double)>& a, double omega,
                                    int modes, int grid) {
    if (grid < 4 * modes) grid = 4 * modes;
    std::vector<double> samples(grid);
    double mean = 0.0;
    for (int j = 0; j < grid; ++j) {
        samples[j] = a(static_cast<double>(j) / grid);
        mean += samples[j];
    }
    mean /= grid;

    CoboundarySolution sol;
    sol.mean = mean;
    sol.phi.assign(grid, 0.0);

    const std::complex<double> I(0.0, 1.0);
    for (int k = 1; k <= modes; ++k) {
        // DFT coefficient a_k of the zero-mean part
        std::complex<double> ak(0.0, 0.0);
        for (int j = 0; j < grid; ++j) {
            double ang = -2.0 * M_PI * k * j / grid;
            ak += (samples[j] - mean) * std::exp(I * ang);
        }
        ak /= static_cast<double>(grid);
        std::complex<double> divisor = std::exp(I * (2.0 * M_PI * k * omega)) - 1.0;
        if (std::abs(divisor) < 1e-8) {
            ++sol.small_divisors;
            continue;
        }
        std::complex<double> phik = ak / divisor;
        sol.max_mode_amplitude = std::max(sol.max_mode_amplitude, std::abs(phik));
        for (int j = 0; j < grid; ++j) {
            double ang = 2.0 * M_PI * k * j / grid;
            sol.phi[j] += 2.0 * std::real(phik * std::exp(I * ang));
        }
    }
    sol.sup = sol.phi[0];
    sol.inf = sol.phi[0];
    for (double v : sol.phi) {
        sol.sup = std::max(sol.sup, v);
        sol.inf = std::min(sol.inf, v);
    }
    return sol;
}

}  // namespace qpf
