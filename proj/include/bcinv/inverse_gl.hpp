#pragma once

#include <vector>

#include <Eigen/Dense>

#include "bcinv/connecting.hpp"
#include "bcinv/goursat.hpp"
#include "bcinv/inverse_bc.hpp"

namespace bcinv {

/// V(y, t) on 0 <= y <= t <= T, zero for t < y.
struct GLKernel {
    TriangularKernel V;
    std::vector<double> diagonal;  ///< V(y, y)
    double max_residual = 0.0;
};

struct GLLocalResult {
    GLKernel kernel;
    RecoveryResult recovery;
};

/// For each grid y solves V(y,t) + c(y,t) + int_y^T c(t,s) V(y,s) ds = 0 on
/// [y, T] and recovers q(T - y) = -2 d/dy V(y, y).
GLLocalResult gl_local_solve(const ConnectingKernel& cT);

/// F(x, t) = c^T(T - x, T - t).
Eigen::MatrixXd F_from_connecting(const ConnectingKernel& cT);

struct GLClassicalRow {
    std::vector<double> K;  ///< K(x, t) for t in [0, x]
    double residual = 0.0;
};

/// K(x,t) + F(x,t) + int_0^x K(x,s) F(s,t) ds = 0 at the grid node x = x_index.
GLClassicalRow gl_classical_row(const Eigen::MatrixXd& F, const UniformGrid& grid, std::size_t x_index);

/// Every row, then q(x) = 2 d/dx K(x, x).
RecoveryResult gl_classical_solve(const Eigen::MatrixXd& F, const UniformGrid& grid);

/// A(t) = -2 r(2t) on [0, T]; its step is half the response step.
Sample amplitude_from_response(const ResponseSample& r);

/// Integrates A_x = A_t + int_0^t A(s,x) A(t-s,x) ds on the shrinking triangle
/// and returns q(x) = A(0+, x) on [0, a]. `h` must equal the step of A0.
RecoveryResult simon_flow(const Sample& A0, double a, double h);

/// max |D^{-1/2} (I+K)^T D (I + C D) (I+K) D^{-1/2} - I| with K assembled from V.
double operator_identity_deviation(const ConnectingKernel& cT, const GLKernel& gl);

}  // namespace bcinv
