#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "bcinv/grid.hpp"

namespace bcinv {

/// p(t) = 1/2 int_0^{|t|} r, sampled at the response step for |t| <= 2T.
class EvenPrimitive {
public:
    EvenPrimitive() = default;
    EvenPrimitive(double step, std::vector<double> values) : h_(step), values_(std::move(values)) {}

    /// p at the node k*h; negative k mirror.
    double operator[](std::ptrdiff_t k) const { return values_.at(static_cast<std::size_t>(k < 0 ? -k : k)); }
    /// p(t) by linear interpolation.
    double at(double t) const;

    double step() const noexcept { return h_; }
    std::size_t size() const noexcept { return values_.size(); }
    const std::vector<double>& values() const noexcept { return values_; }

private:
    double h_ = 0.0;
    std::vector<double> values_;
};

EvenPrimitive build_p(const ResponseSample& r);

/// Symmetric samples c^T(t_i, s_j) on [0, T]^2.
class ConnectingKernel {
public:
    ConnectingKernel(UniformGrid grid, Eigen::MatrixXd values, EvenPrimitive p = {});

    double operator()(std::size_t i, std::size_t j) const { return c_(i, j); }
    const Eigen::MatrixXd& matrix() const noexcept { return c_; }
    const UniformGrid& grid() const noexcept { return grid_; }
    double horizon() const noexcept { return grid_.length(); }
    std::size_t size() const noexcept { return grid_.size(); }
    /// Empty when the kernel was not built from a response function.
    const EvenPrimitive& primitive() const noexcept { return p_; }

    /// Trapezoid weights on [0, T].
    std::vector<double> weights() const { return trapezoid_weights(size(), grid_.step()); }

    /// Nystrom matrix I + C diag(w) of the operator C^T.
    Eigen::MatrixXd nystrom() const;

private:
    UniformGrid grid_;
    Eigen::MatrixXd c_;
    EvenPrimitive p_;
};

/// c^T(t, s) = p(2T - t - s) - p(t - s) on the response grid restricted to [0, T].
ConnectingKernel build_connecting_kernel(const ResponseSample& r, double T);

/// (C^T f)(t_i) = f(t_i) + sum_j w_j c^T(t_i, s_j) f(s_j).
std::vector<double> apply_connecting(const ConnectingKernel& kernel, const Sample& f);

struct PositivityReport {
    double min_eig = 0.0;
    bool positive = false;
    std::size_t n = 0;
};

/// Smallest eigenvalue of I + D^{1/2} C D^{1/2} (D = trapezoid weights), the
/// symmetric matrix congruent to the discrete quadratic form of C^T.
PositivityReport positivity_margin(const ConnectingKernel& kernel);

}  // namespace bcinv
