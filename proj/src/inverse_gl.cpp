#include "bcinv/inverse_gl.hpp"

#include <cmath>
#include <string>

#include "bcinv/errors.hpp"

namespace bcinv {
namespace {

constexpr double kSingularRcond = 1e-14;
constexpr double kBlowUp = 1e6;

Eigen::VectorXd weights_vector(std::size_t n, double h) {
    const auto w = trapezoid_weights(n, h);
    return Eigen::Map<const Eigen::VectorXd>(w.data(), static_cast<Eigen::Index>(n));
}

Eigen::VectorXd solve_checked(const Eigen::MatrixXd& m, const Eigen::VectorXd& rhs, double where, double& residual) {
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(m);
    if (!(lu.rcond() > kSingularRcond)) {
        throw SolvabilityError("inverse_gl", "restricted system singular at node " + std::to_string(where));
    }
    Eigen::VectorXd x = lu.solve(rhs);
    residual = std::max(residual, (m * x - rhs).lpNorm<Eigen::Infinity>());
    return x;
}

RecoveryResult tagged_result(std::string method, const UniformGrid& grid, std::vector<double> q, std::string tag) {
    std::vector<std::string> branch(q.size(), std::move(tag));
    return RecoveryResult{std::move(method), grid, std::move(q), std::move(branch), {}, {}, {}, std::nullopt, 0.0, {}};
}

}  // namespace

GLLocalResult gl_local_solve(const ConnectingKernel& cT) {
    const std::size_t n = cT.size();
    const std::size_t N = n - 1;
    const double h = cT.grid().step();
    const Eigen::MatrixXd& c = cT.matrix();

    TriangularKernel V(KernelKind::ControlInverse, cT.grid());
    std::vector<double> diag(n, 0.0);
    double residual = 0.0;
    for (std::size_t y = 0; y < N; ++y) {
        const auto len = static_cast<Eigen::Index>(n - y);
        const auto off = static_cast<Eigen::Index>(y);
        Eigen::MatrixXd m = c.block(off, off, len, len) * weights_vector(n - y, h).asDiagonal();
        m.diagonal().array() += 1.0;
        const Eigen::VectorXd rhs = -c.row(off).segment(off, len).transpose();
        const Eigen::VectorXd v = solve_checked(m, rhs, cT.grid().at(y), residual);
        for (Eigen::Index t = 0; t < len; ++t) V(y, y + static_cast<std::size_t>(t)) = v(t);
        diag[y] = v(0);
    }
    // y = T: the window is a point and V(T, T) = -c(T, T).
    V(N, N) = -c(static_cast<Eigen::Index>(N), static_cast<Eigen::Index>(N));
    diag[N] = V(N, N);

    const auto dV = first_derivative(diag, h);
    std::vector<double> q(n);
    for (std::size_t y = 0; y < n; ++y) q[N - y] = -2.0 * dV[y];
    auto rec = tagged_result("gl", cT.grid(), std::move(q), "V");
    rec.trace0 = diag;
    rec.max_residual = residual;
    rec.notes.push_back("q(T - y) = -2 dV(y,y)/dy; endpoint values use one-sided stencils");
    return {GLKernel{std::move(V), std::move(diag), residual}, std::move(rec)};
}

Eigen::MatrixXd F_from_connecting(const ConnectingKernel& cT) {
    return cT.matrix().reverse();
}

GLClassicalRow gl_classical_row(const Eigen::MatrixXd& F, const UniformGrid& grid, std::size_t x_index) {
    const auto n = static_cast<Eigen::Index>(grid.size());
    if (F.rows() != n || F.cols() != n) throw ContractViolation("inverse_gl", "F does not match the grid");
    if (x_index >= grid.size()) throw ContractViolation("inverse_gl", "x outside the grid");
    const auto len = static_cast<Eigen::Index>(x_index + 1);
    // K_t + sum_s w_s F(s, t) K_s = -F(x, t)
    Eigen::MatrixXd m = F.topLeftCorner(len, len).transpose() * weights_vector(x_index + 1, grid.step()).asDiagonal();
    m.diagonal().array() += 1.0;
    const Eigen::VectorXd rhs = -F.row(static_cast<Eigen::Index>(x_index)).head(len).transpose();
    GLClassicalRow row;
    const Eigen::VectorXd k = solve_checked(m, rhs, grid.at(x_index), row.residual);
    row.K.assign(k.data(), k.data() + k.size());
    return row;
}

RecoveryResult gl_classical_solve(const Eigen::MatrixXd& F, const UniformGrid& grid) {
    const std::size_t n = grid.size();
    std::vector<double> diag(n);
    double residual = 0.0;
    for (std::size_t x = 0; x < n; ++x) {
        const auto row = gl_classical_row(F, grid, x);
        diag[x] = row.K.back();
        residual = std::max(residual, row.residual);
    }
    auto q = first_derivative(diag, grid.step());
    for (double& v : q) v *= 2.0;
    auto rec = tagged_result("gl-classical", grid, std::move(q), "K");
    rec.trace0 = std::move(diag);
    rec.max_residual = residual;
    return rec;
}

Sample amplitude_from_response(const ResponseSample& r) {
    std::vector<double> A(r.size());
    for (std::size_t i = 0; i < r.size(); ++i) A[i] = -2.0 * r.values[i];
    return Sample(UniformGrid(r.size(), r.grid.length() / 2.0), std::move(A));
}

RecoveryResult simon_flow(const Sample& A0, double a, double h) {
    if (std::abs(h - A0.grid.step()) > 1e-12 * h) throw ContractViolation("inverse_gl", "step must equal the A step");
    const std::size_t M = step_count(a, h);
    if (M + 1 > A0.size()) throw ContractViolation("inverse_gl", "A0 does not cover [0, a]");

    std::vector<double> A(A0.values.begin(), A0.values.begin() + static_cast<std::ptrdiff_t>(M + 1));
    std::vector<double> q(M + 1);
    std::vector<double> conv(M + 1);
    q[0] = A[0];
    for (std::size_t step = 1; step <= M; ++step) {
        const std::size_t len = A.size();
        // conv(t_i) = trapezoid of A(s) A(t_i - s) over [0, t_i]
        for (std::size_t i = 0; i < len; ++i) {
            double s = 0.0;
            if (i > 0) {
                s = 0.5 * (A[0] * A[i] + A[i] * A[0]);
                for (std::size_t j = 1; j < i; ++j) s += A[j] * A[i - j];
                s *= h;
            }
            conv[i] = s;
        }
        // Unit-speed shift along characteristics plus an explicit source step.
        for (std::size_t i = 0; i + 1 < len; ++i) A[i] = A[i + 1] + h * conv[i + 1];
        A.pop_back();
        for (double v : A) {
            if (!(std::abs(v) <= kBlowUp)) {
                throw FlowError("A-amplitude blew up at x=" + std::to_string(static_cast<double>(step) * h),
                                static_cast<double>(step) * h);
            }
        }
        q[step] = A[0];
    }
    auto rec = tagged_result("simon", UniformGrid(M + 1, static_cast<double>(M) * h), std::move(q), "A(0+,x)");
    rec.notes.push_back("explicit first order in x; accuracy degrades toward x = a");
    return rec;
}

double operator_identity_deviation(const ConnectingKernel& cT, const GLKernel& gl) {
    const std::size_t n = cT.size();
    if (gl.V.size() != n) throw ContractViolation("inverse_gl", "kernel sizes differ");
    const double h = cT.grid().step();
    // (K f)(t) = int_0^t V(y, t) f(y) dy, trapezoid on [0, t].
    Eigen::MatrixXd IK = Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (std::size_t t = 1; t < n; ++t) {
        const auto w = trapezoid_weights(t + 1, h);
        for (std::size_t y = 0; y <= t; ++y) {
            IK(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(y)) += gl.V(y, t) * w[y];
        }
    }
    const Eigen::VectorXd w = weights_vector(n, h);
    const Eigen::MatrixXd C = cT.nystrom();
    Eigen::MatrixXd G = IK.transpose() * w.asDiagonal() * C * IK;
    const Eigen::VectorXd s = w.cwiseSqrt().cwiseInverse();
    G = s.asDiagonal() * G * s.asDiagonal();
    G.diagonal().array() -= 1.0;
    return G.cwiseAbs().maxCoeff();
}

}  // namespace bcinv
