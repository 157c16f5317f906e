#pragma once

#include <cstddef>

#include <Eigen/Dense>

#include "bcinv/grid.hpp"

namespace bcinv {

/// Which kernel a TriangularKernel holds.
///  - WaveKernel:      w(x, t) on 0 <= x <= t <= T
///  - Characteristic:  v(xi, eta) = w((eta - xi)/2, (eta + xi)/2) on 0 <= xi <= eta <= 2T
///  - ControlInverse:  V(y, t) on 0 <= y <= t <= T, kernel of (W^T)^{-1}
///
/// w is also the inverse transformation kernel read with swapped arguments,
/// w(x, t) = L(t, x).
enum class KernelKind { WaveKernel, Characteristic, ControlInverse };

const char* to_string(KernelKind kind) noexcept;

/// Kernel sampled on a triangle. Entry (i, j) with i <= j is the kernel at
/// (first argument = node i, second argument = node j). Storage is a lower
/// triangular matrix indexed [j, i]; the unused triangle is zero.
class TriangularKernel {
public:
    TriangularKernel(KernelKind kind, UniformGrid grid);
    TriangularKernel(KernelKind kind, UniformGrid grid, Eigen::MatrixXd lower);

    double operator()(std::size_t i, std::size_t j) const { return lower_(j, i); }
    double& operator()(std::size_t i, std::size_t j) { return lower_(j, i); }

    KernelKind kind() const noexcept { return kind_; }
    const UniformGrid& grid() const noexcept { return grid_; }
    std::size_t size() const noexcept { return grid_.size(); }
    const Eigen::MatrixXd& lower() const noexcept { return lower_; }

    /// The time horizon T the kernel was solved for.
    double horizon() const noexcept;

    /// w(x_a, t_b) read from a characteristic kernel; needs a <= b, a + b <= 2N.
    double wave(std::size_t a, std::size_t b) const;

    /// Converts a characteristic kernel to w on [0, T].
    TriangularKernel to_wave_kernel() const;

private:
    KernelKind kind_;
    UniformGrid grid_;
    Eigen::MatrixXd lower_;
};

struct PicardReport {
    int iterations = 0;
    double tail_bound = 0.0;   ///< analytic bound on the truncated tail
    double last_term = 0.0;    ///< sup norm of the last series term added
};

/// Solves the characteristic Goursat problem for v on 0 <= xi <= eta <= 2T by
/// the Picard series v = Q + sum (-1)^n K^n Q, stopping once the analytic
/// tail bound or the last term drops below `tol`. Step = q.grid.step().
/// Throws ConvergenceError after `max_iterations` terms.
TriangularKernel solve_goursat_picard(const PotentialSample& q, double T, double tol = 1e-12,
                                      PicardReport* report = nullptr, int max_iterations = 64);

/// Independent finite-difference solution of v_{xi eta} = -q((eta - xi)/2) v / 4
/// on a lattice of step h (midpoint rule per cell). Used as a test oracle.
TriangularKernel goursat_fd_oracle(const PotentialSample& q, double T, double h);

/// Pointwise a-priori envelope |v(xi, eta)| <= S(eta) exp(S(eta) xi / 2),
/// S(eta) = 1/2 int_0^{eta/2} |q|, on the same lattice as the Picard solution.
TriangularKernel goursat_bound_field(const PotentialSample& q, double T);

struct KernelDerivatives {
    TriangularKernel d_xi;
    TriangularKernel d_eta;
};

/// v_xi and v_eta from their closed integral expressions (no differencing of v).
KernelDerivatives kernel_derivatives(const TriangularKernel& v, const PotentialSample& q);

}  // namespace bcinv
