#include "bcinv/grid.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "bcinv/errors.hpp"

namespace bcinv {

UniformGrid::UniformGrid(std::size_t n_points, double length)
    : n_(n_points), length_(length), h_(0.0) {
    if (n_points < 3) {
        throw ContractViolation("grids_io", "uniform grid needs at least 3 points");
    }
    if (!(length > 0.0) || !std::isfinite(length)) {
        throw ContractViolation("grids_io", "uniform grid needs a positive finite length");
    }
    h_ = length / static_cast<double>(n_points - 1);
}

UniformGrid UniformGrid::with_step(double length, double h) {
    return UniformGrid(step_count(length, h) + 1, length);
}

std::size_t UniformGrid::index_of(double x) const {
    const double s = x / h_;
    const double k = std::round(s);
    if (k < 0 || k > static_cast<double>(n_ - 1) || std::abs(s - k) > 1e-9 * std::max(1.0, s)) {
        throw ContractViolation("grids_io", "coordinate " + std::to_string(x) + " is not a grid node");
    }
    return static_cast<std::size_t>(k);
}

bool UniformGrid::same_as(const UniformGrid& other) const noexcept {
    return n_ == other.n_ && std::abs(length_ - other.length_) <= 1e-12 * std::max(1.0, length_);
}

std::size_t step_count(double length, double h) {
    if (!(h > 0.0) || !(length > 0.0)) {
        throw ContractViolation("grids_io", "step and length must be positive");
    }
    const double s = length / h;
    const double k = std::round(s);
    if (k < 1 || std::abs(s - k) > 1e-9 * std::max(1.0, s)) {
        throw ContractViolation("grids_io", "length " + std::to_string(length) +
                                                " is not an integer multiple of step " + std::to_string(h));
    }
    return static_cast<std::size_t>(k);
}

Sample::Sample(UniformGrid g, std::vector<double> v) : grid(g), values(std::move(v)) {
    if (values.size() != grid.size()) {
        throw ContractViolation("grids_io", "sample length does not match its grid");
    }
}

double Sample::at(double x) const {
    const double L = grid.length();
    if (x < -1e-12 * L || x > L * (1.0 + 1e-12)) {
        throw ContractViolation("grids_io", "evaluation point " + std::to_string(x) + " outside [0, " +
                                                std::to_string(L) + "]");
    }
    const double s = std::clamp(x / grid.step(), 0.0, static_cast<double>(grid.size() - 1));
    const auto i = std::min(static_cast<std::size_t>(s), grid.size() - 2);
    const double frac = s - static_cast<double>(i);
    return values[i] + frac * (values[i + 1] - values[i]);
}

PotentialSample::PotentialSample(UniformGrid g, std::vector<double> v) : Sample(g, std::move(v)) {
    for (double q : values) {
        if (!std::isfinite(q)) throw ContractViolation("grids_io", "potential values must be finite");
    }
}

double PotentialSample::half_node(std::size_t k) const {
    const std::size_t i = k / 2;
    if (i >= values.size() || (k % 2 == 1 && i + 1 >= values.size())) {
        throw ContractViolation("grids_io", "half-node index outside the potential grid");
    }
    if (k % 2 == 0) return values[i];
    return 0.5 * (values[i] + values[i + 1]);
}

ResponseSample::ResponseSample(UniformGrid g, std::vector<double> v) : Sample(g, std::move(v)) {
    for (double r : values) {
        if (!std::isfinite(r)) throw ContractViolation("grids_io", "response values must be finite");
    }
}

double trapezoid(std::span<const double> values, double h) {
    if (values.size() < 2) throw ContractViolation("grids_io", "trapezoid needs at least 2 samples");
    double s = 0.5 * (values.front() + values.back());
    for (std::size_t i = 1; i + 1 < values.size(); ++i) s += values[i];
    return s * h;
}

std::vector<double> cumulative_trapezoid(std::span<const double> values, double h) {
    std::vector<double> out(values.size(), 0.0);
    for (std::size_t i = 1; i < values.size(); ++i) {
        out[i] = out[i - 1] + 0.5 * h * (values[i - 1] + values[i]);
    }
    return out;
}

std::vector<double> trapezoid_weights(std::size_t n, double h) {
    if (n == 0) return {};
    if (n == 1) return {0.0};
    std::vector<double> w(n, h);
    w.front() = w.back() = 0.5 * h;
    return w;
}

std::vector<double> second_derivative(std::span<const double> f, double h) {
    const std::size_t n = f.size();
    if (n < 3) throw ContractViolation("grids_io", "second derivative needs at least 3 samples");
    const double inv = 1.0 / (h * h);
    std::vector<double> d(n);
    for (std::size_t i = 1; i + 1 < n; ++i) d[i] = (f[i - 1] - 2.0 * f[i] + f[i + 1]) * inv;
    if (n == 3) {
        d[0] = d[2] = d[1];
    } else {
        d[0] = (2.0 * f[0] - 5.0 * f[1] + 4.0 * f[2] - f[3]) * inv;
        d[n - 1] = (2.0 * f[n - 1] - 5.0 * f[n - 2] + 4.0 * f[n - 3] - f[n - 4]) * inv;
    }
    return d;
}

std::vector<double> first_derivative(std::span<const double> f, double h) {
    const std::size_t n = f.size();
    if (n < 3) throw ContractViolation("grids_io", "first derivative needs at least 3 samples");
    std::vector<double> d(n);
    for (std::size_t i = 1; i + 1 < n; ++i) d[i] = (f[i + 1] - f[i - 1]) / (2.0 * h);
    d[0] = (-3.0 * f[0] + 4.0 * f[1] - f[2]) / (2.0 * h);
    d[n - 1] = (3.0 * f[n - 1] - 4.0 * f[n - 2] + f[n - 3]) / (2.0 * h);
    return d;
}

}  // namespace bcinv
