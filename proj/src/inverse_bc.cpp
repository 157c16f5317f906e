#include "bcinv/inverse_bc.hpp"

#include <cmath>
#include <limits>

#include <Eigen/Dense>

#include "bcinv/errors.hpp"

namespace bcinv {
namespace {

constexpr double kSingularRcond = 1e-14;

double max_abs(const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

Eigen::VectorXd trapezoid_vector(std::size_t n, double h) {
    const auto w = trapezoid_weights(n, h);
    return Eigen::Map<const Eigen::VectorXd>(w.data(), static_cast<Eigen::Index>(n));
}

Eigen::PartialPivLU<Eigen::MatrixXd> factor(const Eigen::MatrixXd& m, const std::string& module, double T,
                                             const std::optional<PositivityReport>& pos) {
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(m);
    if (!(lu.rcond() > kSingularRcond)) {
        std::string why = "discrete system singular at T=" + std::to_string(T);
        if (pos) why += " (positivity margin " + std::to_string(pos->min_eig) + ")";
        throw SolvabilityError(module, why);
    }
    return lu;
}

/// rhs of the second Krein equation on the local grid [0, T_k], k steps.
Eigen::VectorXd rhs_variant1(const ResponseSample& r, std::size_t k, double h) {
    Eigen::VectorXd rhs(static_cast<Eigen::Index>(k + 1));
    std::vector<double> g;
    for (std::size_t a = 0; a <= k; ++a) {
        double integral = 0.0;
        if (a < k) {
            g.resize(k - a + 1);
            for (std::size_t s = a; s <= k; ++s) g[s - a] = r.values[s - a] * static_cast<double>(k - s) * h;
            integral = trapezoid(g, h);
        }
        rhs(static_cast<Eigen::Index>(a)) = 1.0 - integral;
    }
    return rhs;
}

Eigen::VectorXd rhs_variant0(std::size_t k, double h) {
    Eigen::VectorXd rhs(static_cast<Eigen::Index>(k + 1));
    for (std::size_t a = 0; a <= k; ++a) rhs(static_cast<Eigen::Index>(a)) = static_cast<double>(k - a) * h;
    return rhs;
}

}  // namespace

PotentialSample RecoveryResult::potential() const {
    if (!gaps.empty()) throw ContractViolation("inverse_bc", "recovery has " + std::to_string(gaps.size()) + " gaps");
    return PotentialSample(grid, q_hat);
}

RecoveryResult recover_from_traces(std::string method, const UniformGrid& grid, const std::vector<double>& primary,
                                   const std::vector<double>& secondary, const std::string& primary_tag,
                                   const std::string& secondary_tag) {
    const double h = grid.step();
    if (primary.size() != grid.size() || (!secondary.empty() && secondary.size() != grid.size())) {
        throw ContractViolation("inverse_bc", "trace length does not match grid");
    }
    const auto d2p = second_derivative(primary, h);
    const auto d2s = secondary.empty() ? std::vector<double>{} : second_derivative(secondary, h);
    const double guard_p = kZeroGuard * max_abs(primary);
    const double guard_s = kZeroGuard * max_abs(secondary);

    RecoveryResult out{std::move(method), grid, {}, {}, {}, primary, secondary, std::nullopt, 0.0, {}};
    out.q_hat.resize(grid.size());
    out.branch.resize(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (std::abs(primary[i]) > guard_p) {
            out.q_hat[i] = d2p[i] / primary[i];
            out.branch[i] = primary_tag;
        } else if (!secondary.empty() && std::abs(secondary[i]) > guard_s) {
            out.q_hat[i] = d2s[i] / secondary[i];
            out.branch[i] = secondary_tag;
        } else {
            out.q_hat[i] = std::numeric_limits<double>::quiet_NaN();
            out.branch[i] = "gap";
            out.gaps.push_back(i);
        }
    }
    out.notes.push_back("endpoint values use one-sided stencils and are less accurate");
    return out;
}

KreinSolution solve_krein(const ResponseSample& r, double T, int variant) {
    if (variant != 0 && variant != 1) throw ContractViolation("inverse_bc", "Krein variant must be 0 or 1");
    const auto kernel = build_connecting_kernel(r, T);
    const auto pos = positivity_margin(kernel);
    const std::size_t k = kernel.size() - 1;
    const double h = kernel.grid().step();
    const Eigen::MatrixXd m = kernel.nystrom();
    const auto lu = factor(m, "inverse_bc", T, pos);
    const Eigen::VectorXd rhs = variant == 0 ? rhs_variant0(k, h) : rhs_variant1(r, k, h);
    const Eigen::VectorXd f = lu.solve(rhs);
    const double residual = (m * f - rhs).lpNorm<Eigen::Infinity>();
    return {kernel.horizon(), variant, Sample(kernel.grid(), std::vector<double>(f.data(), f.data() + f.size())),
            f(0), residual, pos};
}

RecoveryResult recover_q_bc(const ResponseSample& r, double T_max, double h) {
    if (std::abs(h - r.grid.step()) > 1e-12 * h) {
        throw ContractViolation("inverse_bc", "recovery step must equal the response step");
    }
    const auto kernel = build_connecting_kernel(r, T_max);
    const std::size_t N = kernel.size() - 1;
    // Compressions of a positive operator stay positive, so one check at
    // T_max covers every smaller horizon.
    const auto pos = positivity_margin(kernel);
    const Eigen::MatrixXd& c = kernel.matrix();

    std::vector<double> mu0(N + 1, 0.0);
    std::vector<double> mu1(N + 1, 1.0);
    double residual = 0.0;
    for (std::size_t k = 1; k <= N; ++k) {
        // c^{T_k} is the trailing (k+1)-block of c^{T_max}.
        const auto off = static_cast<Eigen::Index>(N - k);
        const auto n = static_cast<Eigen::Index>(k + 1);
        Eigen::MatrixXd m = c.block(off, off, n, n) * trapezoid_vector(k + 1, h).asDiagonal();
        m.diagonal().array() += 1.0;
        const auto lu = factor(m, "inverse_bc", static_cast<double>(k) * h, pos);
        Eigen::MatrixXd rhs(n, 2);
        rhs.col(0) = rhs_variant0(k, h);
        rhs.col(1) = rhs_variant1(r, k, h);
        const Eigen::MatrixXd f = lu.solve(rhs);
        residual = std::max(residual, (m * f - rhs).lpNorm<Eigen::Infinity>());
        mu0[k] = f(0, 0);
        mu1[k] = f(0, 1);
    }
    auto out = recover_from_traces("bc", kernel.grid(), mu0, mu1, "mu0", "mu1");
    out.positivity = pos;
    out.max_residual = residual;
    if (!pos.positive) out.notes.push_back("connecting operator is not positive definite; data may not be a response");
    return out;
}

namespace {

struct RemlingTraces {
    std::vector<double> y;
    std::vector<double> z;
    double residual = 0.0;
    UniformGrid grid;
};

RemlingTraces remling_traces(const ResponseSample& r, double T, bool want_y, bool want_z) {
    const double h = r.grid.step();
    const std::size_t N = step_count(T, h);
    if (2 * N + 1 > r.size()) throw ContractViolation("inverse_bc", "response does not cover [0, 2T]");
    const auto p = build_p(r);
    // k(t, s) = [phi(t - s) - phi(t + s)]/2 with phi = -2p.
    const auto n = static_cast<Eigen::Index>(N + 1);
    Eigen::MatrixXd kmat(n, n);
    for (Eigen::Index j = 0; j < n; ++j) {
        for (Eigen::Index i = 0; i < n; ++i) kmat(i, j) = p[i + j] - p[i - j];
    }
    // psi(t) = -1 - int_0^t phi = -1 + 2 int_0^t p.
    std::vector<double> p_nodes(N + 1);
    for (std::size_t i = 0; i <= N; ++i) p_nodes[i] = p[static_cast<std::ptrdiff_t>(i)];
    const auto int_p = cumulative_trapezoid(p_nodes, h);

    RemlingTraces out{std::vector<double>(N + 1, 0.0), std::vector<double>(N + 1, -1.0), 0.0,
                      UniformGrid(N + 1, static_cast<double>(N) * h)};
    for (std::size_t k = 1; k <= N; ++k) {
        const auto m_size = static_cast<Eigen::Index>(k + 1);
        Eigen::MatrixXd m = kmat.topLeftCorner(m_size, m_size) * trapezoid_vector(k + 1, h).asDiagonal();
        m.diagonal().array() += 1.0;
        const auto lu = factor(m, "inverse_bc", static_cast<double>(k) * h, std::nullopt);
        Eigen::MatrixXd rhs(m_size, 2);
        for (Eigen::Index a = 0; a < m_size; ++a) {
            rhs(a, 0) = static_cast<double>(a) * h;
            rhs(a, 1) = -1.0 + 2.0 * int_p[static_cast<std::size_t>(a)];
        }
        if (!want_y) rhs.col(0).setZero();
        if (!want_z) rhs.col(1).setZero();
        const Eigen::MatrixXd sol = lu.solve(rhs);
        out.residual = std::max(out.residual, (m * sol - rhs).lpNorm<Eigen::Infinity>());
        out.y[k] = sol(m_size - 1, 0);
        out.z[k] = sol(m_size - 1, 1);
    }
    return out;
}

}  // namespace

RemlingSolution remling_solve(const ResponseSample& r, double T, RemlingUnknown which) {
    const bool y = which == RemlingUnknown::Y;
    auto traces = remling_traces(r, T, y, !y);
    auto& diag = y ? traces.y : traces.z;
    auto rec = recover_from_traces(y ? "remling-y" : "remling-z", traces.grid, diag, {}, y ? "y" : "z", "");
    rec.max_residual = traces.residual;
    return {Sample(traces.grid, diag), std::move(rec), traces.residual};
}

RecoveryResult recover_q_remling(const ResponseSample& r, double T) {
    auto traces = remling_traces(r, T, true, true);
    auto rec = recover_from_traces("remling", traces.grid, traces.y, traces.z, "y", "z");
    rec.max_residual = traces.residual;
    return rec;
}

}  // namespace bcinv
