#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace bcinv {

/// Uniform nodes 0, h, 2h, ..., length with h = length / (n_points - 1).
class UniformGrid {
public:
    UniformGrid(std::size_t n_points, double length);

    /// Grid on [0, length] with the given step; length/h must be an integer.
    static UniformGrid with_step(double length, double h);

    std::size_t size() const noexcept { return n_; }
    double length() const noexcept { return length_; }
    double step() const noexcept { return h_; }
    double at(std::size_t i) const noexcept { return static_cast<double>(i) * h_; }

    /// Index of the node at coordinate x; x must sit on a node.
    std::size_t index_of(double x) const;

    bool same_as(const UniformGrid& other) const noexcept;

private:
    std::size_t n_;
    double length_;
    double h_;
};

/// Number of steps of size h in [0, length]; throws unless it is an integer
/// to 1e-9 relative tolerance.
std::size_t step_count(double length, double h);

/// A real function sampled on a uniform grid.
struct Sample {
    UniformGrid grid;
    std::vector<double> values;

    Sample(UniformGrid g, std::vector<double> v);

    /// Piecewise-linear interpolation; x must lie in [0, grid.length()].
    double at(double x) const;
    std::size_t size() const noexcept { return values.size(); }
};

/// Real potential q sampled on [0, L].
struct PotentialSample : Sample {
    PotentialSample(UniformGrid g, std::vector<double> v);

    /// q at x = k*h/2, i.e. on the half-step lattice. Odd k use the mean of
    /// the two neighbouring samples.
    double half_node(std::size_t k) const;
};

/// Response function r on [0, 2T].
struct ResponseSample : Sample {
    ResponseSample(UniformGrid g, std::vector<double> v);
    double horizon() const noexcept { return grid.length() / 2.0; }
};

double trapezoid(std::span<const double> values, double h);

/// out[i] = trapezoid of values[0..i]; out[0] = 0.
std::vector<double> cumulative_trapezoid(std::span<const double> values, double h);

/// Composite trapezoid weights for n nodes (n == 1 gives a single zero weight).
std::vector<double> trapezoid_weights(std::size_t n, double h);

/// Central second difference inside, second-order one-sided stencils at the
/// ends (first-order when only three points are available).
std::vector<double> second_derivative(std::span<const double> values, double h);

/// Central first difference inside, second-order one-sided at the ends.
std::vector<double> first_derivative(std::span<const double> values, double h);

}  // namespace bcinv
