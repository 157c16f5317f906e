#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "bcinv/errors.hpp"
#include "bcinv/forward.hpp"
#include "bcinv/inverse_bc.hpp"

using namespace bcinv;

namespace {

PotentialSample sampled(std::size_t n, double L, double (*f)(double)) {
    const UniformGrid g(n, L);
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = f(g.at(i));
    return PotentialSample(g, v);
}

ResponseSample zero_response(std::size_t N, double T) {
    return ResponseSample(UniformGrid(2 * N + 1, 2.0 * T), std::vector<double>(2 * N + 1, 0.0));
}

double max_error(const RecoveryResult& rec, double (*q)(double), double lo, double hi) {
    double e = 0.0;
    for (std::size_t i = 0; i < rec.q_hat.size(); ++i) {
        const double x = rec.grid.at(i);
        if (x < lo - 1e-12 || x > hi + 1e-12) continue;
        e = std::max(e, std::abs(rec.q_hat[i] - q(x)));
    }
    return e;
}

double one(double) { return 1.0; }
double sine(double x) { return std::sin(std::numbers::pi * x) + 0.5; }

}  // namespace

TEST_CASE("Krein equations with zero data") {
    const auto r = zero_response(20, 1.0);
    const auto k0 = solve_krein(r, 1.0, 0);
    CHECK(k0.mu == doctest::Approx(1.0));
    for (std::size_t i = 0; i < k0.f.size(); ++i) CHECK(k0.f.values[i] == doctest::Approx(1.0 - k0.f.grid.at(i)));
    const auto k1 = solve_krein(r, 1.0, 1);
    CHECK(k1.mu == doctest::Approx(1.0));
    for (double v : k1.f.values) CHECK(v == doctest::Approx(1.0));
    CHECK(k1.residual <= 1e-14);
    CHECK_THROWS_AS(solve_krein(r, 1.0, 2), ContractViolation);
}

TEST_CASE("mu_0(1) for q = 1 is sinh(1)") {
    const auto r = response_function(sampled(201, 1.0, one), 1.0);
    const auto k0 = solve_krein(r, 1.0, 0);
    CHECK(k0.mu == doctest::Approx(std::sinh(1.0)).epsilon(0.01));
    CHECK(k0.positivity.positive);
}

TEST_CASE("BC recovery of the zero potential") {
    const auto rec = recover_q_bc(zero_response(50, 1.0), 1.0, 0.02);
    for (std::size_t i = 0; i < rec.q_hat.size(); ++i) {
        CHECK(rec.trace0[i] == doctest::Approx(rec.grid.at(i)));
        CHECK(std::abs(rec.q_hat[i]) <= 1e-8);
    }
    CHECK(rec.gaps.empty());
    CHECK(rec.branch[0] == "mu1");  // mu_0(0) = 0 forces the switch
    CHECK(rec.branch[1] == "mu0");
}

TEST_CASE("BC recovery round trips") {
    const double h = 1.0 / 200.0;
    const auto r1 = response_function(sampled(201, 1.0, one), 1.0);
    const auto rec1 = recover_q_bc(r1, 1.0, h);
    CHECK(max_error(rec1, one, 0.1, 1.0) <= 0.02);
    for (std::size_t i = 1; i < rec1.trace0.size(); ++i) {
        CHECK(rec1.trace0[i] == doctest::Approx(std::sinh(rec1.grid.at(i))).epsilon(0.01));
    }

    const auto rs = response_function(sampled(201, 1.0, sine), 1.0);
    const auto recs = recover_q_bc(rs, 1.0, h);
    CHECK(max_error(recs, sine, 0.0, 1.0) / 1.5 <= 0.02);
    CHECK(recs.positivity.has_value());
    CHECK(recs.max_residual <= 1e-10);
    CHECK_THROWS_AS(recover_q_bc(rs, 1.0, 2.0 * h), ContractViolation);
}

TEST_CASE("both Krein traces recover the same potential") {
    const auto r = response_function(sampled(101, 1.0, sine), 1.0);
    const auto rec = recover_q_bc(r, 1.0, 0.01);
    const auto from_mu1 = recover_from_traces("mu1", rec.grid, rec.trace1, {}, "mu1", "");
    for (std::size_t i = 10; i + 10 < rec.q_hat.size(); ++i) {
        CHECK(rec.q_hat[i] == doctest::Approx(from_mu1.q_hat[i]).epsilon(0.01));
    }
}

TEST_CASE("recovery formula is scale invariant and reports gaps") {
    const UniformGrid g(41, 1.0);
    std::vector<double> mu(41), scaled(41), other(41);
    for (std::size_t i = 0; i < 41; ++i) {
        mu[i] = std::sin(2.0 * g.at(i)) + 0.3;
        scaled[i] = -7.5 * mu[i];
    }
    const auto a = recover_from_traces("a", g, mu, {}, "mu", "");
    const auto b = recover_from_traces("b", g, scaled, {}, "mu", "");
    for (std::size_t i = 0; i < 41; ++i) CHECK(std::abs(a.q_hat[i] - b.q_hat[i]) <= 1e-10);

    mu.assign(41, 1.0);
    other.assign(41, 1.0);
    mu[20] = 0.0;
    other[20] = 0.0;
    const auto gapped = recover_from_traces("g", g, mu, other, "mu0", "mu1");
    REQUIRE(gapped.gaps.size() == 1);
    CHECK(gapped.gaps[0] == 20);
    CHECK(std::isnan(gapped.q_hat[20]));
    CHECK(gapped.branch[20] == "gap");
    CHECK_THROWS_AS(gapped.potential(), ContractViolation);
}

TEST_CASE("Krein solutions depend continuously on the horizon") {
    auto jump = [](std::size_t N) {
        const double h = 1.0 / static_cast<double>(N);
        const auto r = response_function(sampled(N + 1, 1.0, sine), 1.0);
        double worst = 0.0;
        for (std::size_t k = N / 2; k < N; ++k) {
            const auto a = solve_krein(r, static_cast<double>(k) * h, 0);
            const auto b = solve_krein(r, static_cast<double>(k + 1) * h, 0);
            for (std::size_t i = 0; i < a.f.size(); ++i) worst = std::max(worst, std::abs(a.f.values[i] - b.f.values[i]));
        }
        return worst;
    };
    CHECK(jump(40) < jump(20));
}

TEST_CASE("Remling equations") {
    const auto r0 = zero_response(20, 1.0);
    const auto y0 = remling_solve(r0, 1.0, RemlingUnknown::Y);
    const auto z0 = remling_solve(r0, 1.0, RemlingUnknown::Z);
    for (std::size_t i = 0; i < y0.diagonal.size(); ++i) {
        CHECK(y0.diagonal.values[i] == doctest::Approx(y0.diagonal.grid.at(i)));
        CHECK(z0.diagonal.values[i] == doctest::Approx(-1.0));
        CHECK(std::abs(z0.recovery.q_hat[i]) <= 1e-8);
    }
    CHECK(y0.recovery.gaps == std::vector<std::size_t>{0});

    const auto r = response_function(sampled(201, 1.0, one), 1.0);
    const auto y = remling_solve(r, 1.0, RemlingUnknown::Y);
    CHECK(max_error(y.recovery, one, 0.1, 1.0) <= 0.02);
    const auto bc = recover_q_bc(r, 1.0, 1.0 / 200.0);
    const auto z = remling_solve(r, 1.0, RemlingUnknown::Z);
    for (std::size_t i = 1; i < bc.trace0.size(); ++i) {
        CHECK(y.diagonal.values[i] == doctest::Approx(bc.trace0[i]).epsilon(0.01));
        CHECK(z.diagonal.values[i] == doctest::Approx(-bc.trace1[i]).epsilon(0.01));
    }
    const auto combined = recover_q_remling(r, 1.0);
    CHECK(combined.gaps.empty());
    for (std::size_t i = 20; i < bc.q_hat.size(); ++i) CHECK(combined.q_hat[i] == doctest::Approx(bc.q_hat[i]).epsilon(0.01));
}
