#pragma once

#include <vector>

#include <Eigen/Dense>

#include "bcinv/goursat.hpp"
#include "bcinv/grid.hpp"

namespace bcinv {

/// r(t_j) on [0, 2T] from the characteristic kernel v:
/// r(t) = -q(t/2)/2 - 1/2 int_0^t q((t - z)/2) v(z, t) dz.
ResponseSample response_from_kernel(const TriangularKernel& v, const PotentialSample& q);

/// Response function on [0, 2T] at the step of q's grid.
ResponseSample response_function(const PotentialSample& q, double T, double tol = 1e-12);

/// u^f(x_a, t_b) on the square [0, T]^2; zero above the characteristic x = t.
struct Wavefield {
    UniformGrid grid;
    Eigen::MatrixXd values;  ///< values(a, b) = u(x_a, t_b)

    double operator()(std::size_t a, std::size_t b) const { return values(a, b); }
    double horizon() const noexcept { return grid.length(); }
};

/// All of these take the wave kernel w on [0, T] (see TriangularKernel::to_wave_kernel)
/// and a control sampled on the same grid.
Wavefield wave_solve(const TriangularKernel& w, const Sample& f);
Wavefield wave_solve(const PotentialSample& q, const Sample& f, double T);

/// Final state z(x) = u^f(x, T) = f(T - x) + int_x^T w(x, s) f(T - s) ds.
std::vector<double> control_apply(const TriangularKernel& w, const Sample& f);
std::vector<double> control_apply(const PotentialSample& q, const Sample& f, double T);

struct ControlInversion {
    Sample control;
    double max_residual = 0.0;  ///< sup |W f - z| on the grid
};

/// Solves W^T f = z by marching the Volterra equation from x = T down to 0.
ControlInversion control_invert(const TriangularKernel& w, const Sample& z);
ControlInversion control_invert(const PotentialSample& q, const Sample& z, double T);

}  // namespace bcinv
