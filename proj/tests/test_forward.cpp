#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "bcinv/errors.hpp"
#include "bcinv/forward.hpp"

using namespace bcinv;

namespace {

PotentialSample constant(double c, double L, std::size_t n) {
    return PotentialSample(UniformGrid(n, L), std::vector<double>(n, c));
}

Sample control(const UniformGrid& g, double (*f)(double)) {
    std::vector<double> v(g.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = f(g.at(i));
    return Sample(g, v);
}

double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

}  // namespace

TEST_CASE("response of the zero potential vanishes") {
    const auto r = response_function(constant(0.0, 1.0, 101), 1.0);
    CHECK(r.size() == 201);
    CHECK(r.horizon() == doctest::Approx(1.0));
    for (double v : r.values) CHECK(v == 0.0);
}

TEST_CASE("response at t = 0 is -q(0)/2") {
    const auto r = response_function(constant(2.0, 1.0, 51), 1.0);
    CHECK(r.values[0] == doctest::Approx(-1.0));
}

TEST_CASE("response for q = 1 matches the Bessel closed form") {
    // For q = 1 the kernel is known in closed form and r(t) = -J1(t)/t.
    const auto r = response_function(constant(1.0, 1.0, 201), 1.0);
    double gap = std::abs(r.values[0] + 0.5);
    for (std::size_t i = 1; i < r.size(); ++i) {
        const double t = r.grid.at(i);
        gap = std::max(gap, std::abs(r.values[i] + std::cyl_bessel_j(1.0, t) / t));
    }
    CHECK(gap < 1e-4);
}

TEST_CASE("response agrees with the x-derivative of the oracle kernel") {
    const auto q = constant(1.0, 1.0, 201);
    const auto r = response_function(q, 1.0);
    const double hf = 1.0 / 800.0;
    const auto oracle = goursat_fd_oracle(q, 1.0, hf);
    // w(hf/2, t) at t = (i + 1/2) hf sits at lattice node (i, i + 1).
    double gap = 0.0;
    for (std::size_t i = 0; i + 1 < oracle.size(); ++i) {
        const double t = (static_cast<double>(i) + 0.5) * hf;
        const double wx = oracle(i, i + 1) / (0.5 * hf);
        gap = std::max(gap, std::abs(wx - r.at(t)));
    }
    CHECK(gap <= 1e-2);
}

TEST_CASE("wave solution for q = 0 is a shifted control") {
    const auto q = constant(0.0, 1.0, 21);
    const auto f = control(UniformGrid(21, 1.0), [](double t) { return t; });
    const auto u = wave_solve(q, f, 1.0);
    for (std::size_t b = 0; b < 21; ++b) {
        for (std::size_t a = 0; a < 21; ++a) {
            const double expect = a <= b ? u.grid.at(b) - u.grid.at(a) : 0.0;
            CHECK(u(a, b) == doctest::Approx(expect).epsilon(1e-12));
        }
    }
}

TEST_CASE("wave solution is zero above the characteristic and equals f(0+) on it") {
    const auto q = constant(1.0, 1.0, 41);
    const auto f = control(UniformGrid(41, 1.0), [](double t) { return std::sin(3.0 * t); });
    const auto u = wave_solve(q, f, 1.0);
    for (std::size_t b = 0; b < 41; ++b) {
        CHECK(u(b, b) == doctest::Approx(f.values[0]));
        for (std::size_t a = b + 1; a < 41; ++a) CHECK(u(a, b) == 0.0);
    }
    const auto bad = control(UniformGrid(41, 1.0), [](double t) { return 1.0 + t; });
    CHECK_THROWS_AS(wave_solve(q, bad, 1.0), ContractViolation);
}

TEST_CASE("wave solution matches nested quadrature with the oracle kernel") {
    const auto q = constant(1.0, 1.0, 201);
    const auto f = control(UniformGrid(201, 1.0), [](double t) { return t * t; });
    const auto u = wave_solve(q, f, 1.0);
    const double x = 0.25, t = 0.75, hf = 1.0 / 800.0;
    const auto oracle = goursat_fd_oracle(q, 1.0, hf);
    // w(x, s) = v(s - x, s + x); s runs over [x, t] in steps of hf.
    const auto steps = static_cast<std::size_t>(std::lround((t - x) / hf));
    const auto shift = static_cast<std::size_t>(std::lround(2.0 * x / hf));
    std::vector<double> g;
    for (std::size_t k = 0; k <= steps; ++k) {
        const double s = x + static_cast<double>(k) * hf;
        g.push_back(oracle(k, k + shift) * (t - s) * (t - s));
    }
    const double expect = (t - x) * (t - x) + trapezoid(g, hf);
    CHECK(u(50, 150) == doctest::Approx(expect).epsilon(1e-3));
}

TEST_CASE("control operator examples") {
    const double T = 1.0;
    const UniformGrid g(51, T);
    const auto z = control_apply(constant(0.0, T, 51), control(g, [](double t) { return 1.0 - t; }), T);
    for (std::size_t a = 0; a < z.size(); ++a) CHECK(z[a] == doctest::Approx(g.at(a)).epsilon(1e-12));
    const auto z0 = control_apply(constant(1.0, T, 51), control(g, [](double) { return 0.0; }), T);
    for (double v : z0) CHECK(v == 0.0);

    const auto q1 = constant(1.0, T, 51);
    const auto f = control(g, [](double t) { return std::sin(std::numbers::pi * t); });
    const auto final_state = control_apply(q1, f, T);
    const auto u = wave_solve(q1, f, T);
    for (std::size_t a = 0; a < 51; ++a) CHECK(std::abs(final_state[a] - u(a, 50)) <= 1e-12);
}

TEST_CASE("control inversion") {
    const double T = 1.0;
    const UniformGrid g(101, T);
    const auto inv0 = control_invert(constant(0.0, T, 101), control(g, [](double x) { return x; }), T);
    for (std::size_t i = 0; i < g.size(); ++i) CHECK(inv0.control.values[i] == doctest::Approx(1.0 - g.at(i)));

    const auto q1 = constant(1.0, T, 101);
    const auto w = solve_goursat_picard(q1, T).to_wave_kernel();
    const auto zero = control_invert(w, control(g, [](double) { return 0.0; }));
    for (double v : zero.control.values) CHECK(v == 0.0);

    const auto f = control(g, [](double t) { return t * (1.0 - t); });
    const auto z = control_apply(w, f);
    const auto back = control_invert(w, Sample(g, z));
    CHECK(max_abs_diff(back.control.values, f.values) <= 1e-6);
    CHECK(back.max_residual <= 1e-12);

    // apply after invert is also the identity
    const auto target = control(g, [](double x) { return std::cos(x); });
    const auto fz = control_invert(w, target);
    CHECK(max_abs_diff(control_apply(w, fz.control), target.values) <= 1e-12);
}
