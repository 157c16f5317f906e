#include "bcinv/connecting.hpp"

#include <cmath>
#include <string>

#include "bcinv/errors.hpp"

namespace bcinv {

double EvenPrimitive::at(double t) const {
    const double x = std::abs(t) / h_;
    const auto last = static_cast<double>(values_.size() - 1);
    if (x > last * (1.0 + 1e-12)) throw ContractViolation("connecting", "p evaluated outside [-2T, 2T]");
    const auto i = static_cast<std::size_t>(std::min(std::floor(x), last - 1.0));
    const double s = x - static_cast<double>(i);
    return (1.0 - s) * values_[i] + s * values_[i + 1];
}

EvenPrimitive build_p(const ResponseSample& r) {
    auto p = cumulative_trapezoid(r.values, r.grid.step());
    for (double& x : p) x *= 0.5;
    return EvenPrimitive(r.grid.step(), std::move(p));
}

ConnectingKernel::ConnectingKernel(UniformGrid grid, Eigen::MatrixXd values, EvenPrimitive p)
    : grid_(grid), c_(std::move(values)), p_(std::move(p)) {
    const auto n = static_cast<Eigen::Index>(grid_.size());
    if (c_.rows() != n || c_.cols() != n) throw ContractViolation("connecting", "kernel matrix does not match its grid");
}

Eigen::MatrixXd ConnectingKernel::nystrom() const {
    const auto w = weights();
    Eigen::MatrixXd m = c_ * Eigen::Map<const Eigen::VectorXd>(w.data(), static_cast<Eigen::Index>(w.size())).asDiagonal();
    m.diagonal().array() += 1.0;
    return m;
}

ConnectingKernel build_connecting_kernel(const ResponseSample& r, double T) {
    const double h = r.grid.step();
    const std::size_t N = step_count(T, h);
    if (2 * N + 1 > r.size()) {
        throw ContractViolation("connecting", "response covers [0, " + std::to_string(r.grid.length()) +
                                                  "] but horizon T=" + std::to_string(T) + " needs [0, 2T]");
    }
    auto p = build_p(r);
    const auto n = static_cast<Eigen::Index>(N + 1);
    Eigen::MatrixXd c(n, n);
    for (Eigen::Index j = 0; j < n; ++j) {
        for (Eigen::Index i = j; i < n; ++i) {
            const double v = p[static_cast<std::ptrdiff_t>(2 * N) - i - j] - p[i - j];
            c(i, j) = v;
            c(j, i) = v;
        }
    }
    return ConnectingKernel(UniformGrid(N + 1, static_cast<double>(N) * h), std::move(c), std::move(p));
}

std::vector<double> apply_connecting(const ConnectingKernel& kernel, const Sample& f) {
    if (!kernel.grid().same_as(f.grid)) throw ContractViolation("connecting", "control grid does not match kernel grid");
    const auto w = kernel.weights();
    Eigen::VectorXd wf(static_cast<Eigen::Index>(f.size()));
    for (std::size_t j = 0; j < f.size(); ++j) wf(static_cast<Eigen::Index>(j)) = w[j] * f.values[j];
    const Eigen::VectorXd cf = kernel.matrix() * wf;
    std::vector<double> out(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) out[i] = f.values[i] + cf(static_cast<Eigen::Index>(i));
    return out;
}

PositivityReport positivity_margin(const ConnectingKernel& kernel) {
    const auto w = kernel.weights();
    const auto n = static_cast<Eigen::Index>(kernel.size());
    Eigen::VectorXd sw(n);
    for (Eigen::Index i = 0; i < n; ++i) sw(i) = std::sqrt(w[static_cast<std::size_t>(i)]);
    Eigen::MatrixXd m = sw.asDiagonal() * kernel.matrix() * sw.asDiagonal();
    m.diagonal().array() += 1.0;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) throw NumericError("connecting", "symmetric eigensolver did not converge");
    const double lo = es.eigenvalues().minCoeff();
    return {lo, lo > 0.0, kernel.size()};
}

}  // namespace bcinv
