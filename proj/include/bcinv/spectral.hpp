#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "bcinv/connecting.hpp"
#include "bcinv/grid.hpp"

namespace bcinv {

/// Dirichlet eigenpairs on [0, L] and the q = 0 reference pairs.
struct SpectralData {
    double L = 0.0;
    std::vector<double> lambda;
    std::vector<double> alpha;    ///< 1 / ||phi(., lambda_n)||^2
    std::vector<double> lambda0;  ///< (n pi / L)^2
    std::vector<double> alpha0;   ///< 2 lambda0 / L

    std::size_t count() const noexcept { return lambda.size(); }
};

/// First n_max eigenvalues of -y'' + q y = lambda y, y(0) = y(L) = 0, by
/// shooting phi(0) = 0, phi'(0) = 1 with exact piecewise-constant propagators,
/// zero counting and bisection to 1e-10 relative.
SpectralData dirichlet_eigs(const PotentialSample& q, double L, int n_max);

/// Number of sign changes of phi(., lambda) on (0, L].
int count_zeros(const PotentialSample& q, double L, double lambda);

/// c^T(t_i, s_j) from the sigma_d partial sum on `grid` (which spans [0, T]).
ConnectingKernel ct_from_sigma(const SpectralData& sd, const UniformGrid& grid);

/// F(x_i, t_j) = sum alpha sin(sqrt(l) x) sin(sqrt(l) t) / l minus the reference sum.
Eigen::MatrixXd f_kernel_from_sigma(const SpectralData& sd, const UniformGrid& grid);

/// t_i -> int_0^{2 t_i} r, as 2 c^T(T - t, T - t) from the spectral sum.
std::vector<double> r_from_sigma_integrated(const SpectralData& sd, const UniformGrid& grid);

struct MFunctionSample {
    std::vector<double> k;
    std::vector<double> m;  ///< m(-k^2)
    double L = 0.0;
    std::string boundary = "dirichlet";
};

/// m(-k^2) = psi'(0)/psi(0) with psi'' = (q + k^2) psi, psi(L) = 0, psi'(L) = -1.
MFunctionSample m_function(const PotentialSample& q, double L, const std::vector<double>& k_values);

struct AmplitudeCheck {
    std::vector<double> k;
    std::vector<double> rho;             ///< m(-k^2) + k + int_0^L A(t) e^{-2tk} dt
    std::vector<double> error_estimate;  ///< from the same pipeline at twice the step
    std::vector<bool> flagged;           ///< residual not resolved above the error floor
    double slope = 0.0;                  ///< least squares fit of log|rho| on unflagged k
    double intercept = 0.0;
    std::size_t fitted = 0;
};

AmplitudeCheck a_amplitude_check(const PotentialSample& q, double L, const std::vector<double>& k_values);

/// int_0^{t_end} A(t) e^{-2kt} dt with A piecewise linear between samples.
double laplace_piecewise_linear(const Sample& A, double k);

}  // namespace bcinv
