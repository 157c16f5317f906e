// Finite-difference marching for the characteristic Goursat problem. Kept
// apart from the Picard solver and shares none of its code paths so it can
// serve as an oracle in tests.

#include <cmath>

#include "bcinv/errors.hpp"
#include "bcinv/goursat.hpp"

namespace bcinv {

TriangularKernel goursat_fd_oracle(const PotentialSample& q, double T, double h) {
    if (T > q.grid.length() * (1.0 + 1e-12)) {
        throw ContractViolation("goursat", "oracle horizon exceeds the potential's interval");
    }
    const std::size_t M = step_count(2.0 * T, h);
    const std::size_t n = M + 1;
    TriangularKernel v(KernelKind::Characteristic, UniformGrid(n, 2.0 * T));

    // v(0, eta) = -1/2 int_0^{eta/2} q, trapezoid at step h/2.
    auto q_at = [&](double x) { return q.at(std::min(x, q.grid.length())); };
    double integral = 0.0;
    double prev = q_at(0.0);
    for (std::size_t j = 1; j < n; ++j) {
        const double cur = q_at(static_cast<double>(j) * h / 2.0);
        integral += 0.25 * h * (prev + cur);
        prev = cur;
        v(0, j) = -0.5 * integral;
    }

    // v_{xi eta} = -q v / 4 (from w_tt - w_xx + q w = 0). Over the cell
    // [i-1, i] x [j-1, j]: v_ij - v_{i-1,j} - v_{i,j-1} + v_{i-1,j-1}
    //   = -h^2/4 q(centre) * (mean of the four corners).
    for (std::size_t j = 2; j < n; ++j) {
        for (std::size_t i = 1; i < j; ++i) {
            const double x_centre = static_cast<double>(j - i) * h / 2.0;
            const double c = -0.25 * h * h * q_at(x_centre) * 0.25;
            const double known = v(i - 1, j) + v(i, j - 1) + v(i - 1, j - 1);
            v(i, j) = (v(i - 1, j) + v(i, j - 1) - v(i - 1, j - 1) + c * known) / (1.0 - c);
        }
    }
    return v;
}

}  // namespace bcinv
