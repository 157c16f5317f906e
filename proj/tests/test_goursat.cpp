#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "bcinv/errors.hpp"
#include "bcinv/goursat.hpp"

using namespace bcinv;

namespace {

PotentialSample constant(double c, double L, std::size_t n) {
    return PotentialSample(UniformGrid(n, L), std::vector<double>(n, c));
}

PotentialSample linear(double L, std::size_t n) {
    UniformGrid g(n, L);
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = g.at(i);
    return PotentialSample(g, v);
}

/// max |a(i, j) - b(i*s, j*s)| over the coarse triangle.
double max_gap(const TriangularKernel& coarse, const TriangularKernel& fine) {
    const std::size_t s = (fine.size() - 1) / (coarse.size() - 1);
    double m = 0.0;
    for (std::size_t j = 0; j < coarse.size(); ++j) {
        for (std::size_t i = 0; i <= j; ++i) m = std::max(m, std::abs(coarse(i, j) - fine(i * s, j * s)));
    }
    return m;
}

}  // namespace

TEST_CASE("zero potential gives a zero kernel") {
    PicardReport rep;
    const auto v = solve_goursat_picard(constant(0.0, 1.0, 51), 1.0, 1e-12, &rep);
    CHECK(v.lower().cwiseAbs().maxCoeff() == 0.0);
    CHECK(rep.iterations == 0);
    CHECK(goursat_fd_oracle(constant(0.0, 1.0, 51), 1.0, 0.02).lower().cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("diagonal value for q = 2") {
    const auto w = solve_goursat_picard(constant(2.0, 1.0, 101), 1.0).to_wave_kernel();
    CHECK(w.kind() == KernelKind::WaveKernel);
    CHECK(w(50, 50) == doctest::Approx(-0.5).epsilon(1e-12));
}

TEST_CASE("boundary conditions of the solved kernel") {
    const auto q = linear(1.0, 101);
    const double tol = 1e-12;
    const auto w = solve_goursat_picard(q, 1.0, tol).to_wave_kernel();
    for (std::size_t b = 0; b < w.size(); ++b) CHECK(std::abs(w(0, b)) <= tol);
    for (std::size_t a = 0; a < w.size(); ++a) {
        const double x = w.grid().at(a);
        CHECK(w(a, a) == doctest::Approx(-0.25 * x * x).epsilon(1e-9));
    }
}

TEST_CASE("Picard matches the finite-difference oracle for q = 1") {
    const auto q200 = constant(1.0, 1.0, 201);
    const auto q100 = constant(1.0, 1.0, 101);
    const auto oracle = goursat_fd_oracle(q200, 1.0, 1.0 / 800.0);
    const double gap200 = max_gap(solve_goursat_picard(q200, 1.0), oracle);
    const double gap100 = max_gap(solve_goursat_picard(q100, 1.0), oracle);
    CHECK(gap200 <= 5e-3);
    CHECK(gap200 < gap100);
}

TEST_CASE("oracle edge value for q = 2") {
    const auto v = goursat_fd_oracle(constant(2.0, 1.0, 11), 1.0, 0.1);
    for (std::size_t j = 0; j < v.size(); ++j) CHECK(v(0, j) == doctest::Approx(-v.grid().at(j) / 2.0).epsilon(1e-12));
}

TEST_CASE("oracle self-convergence for q(x) = x is at least first order") {
    const auto q = linear(1.0, 801);
    const auto v1 = goursat_fd_oracle(q, 1.0, 0.05);
    const auto v2 = goursat_fd_oracle(q, 1.0, 0.025);
    const auto v4 = goursat_fd_oracle(q, 1.0, 0.0125);
    const double e1 = max_gap(v1, v2);
    const double e2 = max_gap(v2, v4);
    CHECK(e2 > 0.0);
    CHECK(e1 / e2 >= 1.8);
}

TEST_CASE("a priori bound holds pointwise") {
    for (double c : {1.0, -3.0}) {
        const auto q = constant(c, 1.0, 101);
        const auto v = solve_goursat_picard(q, 1.0);
        const auto bound = goursat_bound_field(q, 1.0);
        for (std::size_t j = 0; j < v.size(); ++j) {
            for (std::size_t i = 0; i <= j; ++i) CHECK(std::abs(v(i, j)) <= bound(i, j) * (1.0 + 1e-12) + 1e-15);
        }
    }
}

TEST_CASE("the map q -> w is not linear") {
    const auto vp = solve_goursat_picard(constant(1.0, 1.0, 51), 1.0);
    const auto vm = solve_goursat_picard(constant(-1.0, 1.0, 51), 1.0);
    CHECK((vp.lower() + vm.lower()).cwiseAbs().maxCoeff() > 1e-3);
}

TEST_CASE("iteration cap raises a convergence error") {
    const auto q = constant(40.0, 1.0, 51);
    try {
        solve_goursat_picard(q, 1.0, 1e-12, nullptr, 3);
        FAIL("expected a convergence error");
    } catch (const ConvergenceError& e) {
        CHECK(e.achieved_bound() > 1e-12);
    }
    CHECK_THROWS_AS(solve_goursat_picard(constant(1.0, 1.0, 51), 2.0), ContractViolation);
}

TEST_CASE("kernel derivatives") {
    const auto zero = solve_goursat_picard(constant(0.0, 1.0, 21), 1.0);
    const auto dz = kernel_derivatives(zero, constant(0.0, 1.0, 21));
    CHECK(dz.d_xi.lower().cwiseAbs().maxCoeff() == 0.0);
    CHECK(dz.d_eta.lower().cwiseAbs().maxCoeff() == 0.0);

    const auto q2 = constant(2.0, 1.0, 51);
    const auto d2 = kernel_derivatives(solve_goursat_picard(q2, 1.0), q2);
    for (std::size_t j = 0; j < d2.d_eta.size(); ++j) CHECK(d2.d_eta(0, j) == doctest::Approx(-0.5));

    const auto q1 = constant(1.0, 1.0, 201);
    const double h = 1.0 / 200.0;
    const auto d1 = kernel_derivatives(solve_goursat_picard(q1, 1.0), q1);
    const auto oracle = goursat_fd_oracle(q1, 1.0, h);
    double gap = 0.0;
    for (std::size_t j = 2; j + 1 < oracle.size(); ++j) {
        for (std::size_t i = 1; i + 1 < j; ++i) {
            const double fd_eta = (oracle(i, j + 1) - oracle(i, j - 1)) / (2.0 * h);
            const double fd_xi = (oracle(i + 1, j) - oracle(i - 1, j)) / (2.0 * h);
            gap = std::max({gap, std::abs(fd_eta - d1.d_eta(i, j)), std::abs(fd_xi - d1.d_xi(i, j))});
        }
    }
    CHECK(gap <= 1e-2);
}
