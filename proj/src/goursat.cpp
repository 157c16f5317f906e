#include "bcinv/goursat.hpp"

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "bcinv/errors.hpp"

namespace bcinv {

const char* to_string(KernelKind kind) noexcept {
    switch (kind) {
        case KernelKind::WaveKernel: return "w";
        case KernelKind::Characteristic: return "v";
        case KernelKind::ControlInverse: return "V";
    }
    return "?";
}

TriangularKernel::TriangularKernel(KernelKind kind, UniformGrid grid)
    : kind_(kind), grid_(grid), lower_(Eigen::MatrixXd::Zero(grid.size(), grid.size())) {}

TriangularKernel::TriangularKernel(KernelKind kind, UniformGrid grid, Eigen::MatrixXd lower)
    : kind_(kind), grid_(grid), lower_(std::move(lower)) {
    const auto n = static_cast<Eigen::Index>(grid_.size());
    if (lower_.rows() != n || lower_.cols() != n) {
        throw ContractViolation("goursat", "kernel matrix does not match its grid");
    }
}

double TriangularKernel::horizon() const noexcept {
    return kind_ == KernelKind::Characteristic ? grid_.length() / 2.0 : grid_.length();
}

double TriangularKernel::wave(std::size_t a, std::size_t b) const {
    if (kind_ != KernelKind::Characteristic) {
        throw ContractViolation("goursat", "wave() reads a characteristic kernel");
    }
    if (a > b || a + b >= size()) throw ContractViolation("goursat", "w index outside the solved triangle");
    return (*this)(b - a, b + a);
}

TriangularKernel TriangularKernel::to_wave_kernel() const {
    const std::size_t N = (size() - 1) / 2;
    TriangularKernel w(KernelKind::WaveKernel, UniformGrid(N + 1, horizon()));
    for (std::size_t b = 0; b <= N; ++b) {
        for (std::size_t a = 0; a <= b; ++a) w(a, b) = wave(a, b);
    }
    return w;
}

namespace {

/// Lattice data shared by the Picard solver and the derivative formulas.
struct Lattice {
    std::size_t n = 0;          // nodes per axis, 2N + 1
    double h = 0.0;
    std::vector<double> q_half;  // q(k h / 2), k = 0 .. 2N
};

Lattice make_lattice(const PotentialSample& q, double T) {
    const double h = q.grid.step();
    const std::size_t N = step_count(T, h);
    if (N + 1 > q.size()) {
        throw ContractViolation("goursat", "horizon T=" + std::to_string(T) + " exceeds the potential's interval");
    }
    Lattice lat;
    lat.n = 2 * N + 1;
    lat.h = h;
    lat.q_half.resize(lat.n);
    for (std::size_t k = 0; k < lat.n; ++k) lat.q_half[k] = q.half_node(k);
    return lat;
}

// The iterate is held in an upper-triangular matrix u(i, j), i = xi index,
// j = eta index, i <= j.
using Upper = Eigen::MatrixXd;

/// (K u)(xi, eta) = 1/4 int_0^xi dxi1 int_xi^eta deta1 q((eta1 - xi1)/2) u(xi1, eta1),
/// using per-row cumulative trapezoids in eta1 and prefix sums over xi1.
Upper apply_picard_operator(const Lattice& lat, const Upper& u) {
    const std::size_t n = lat.n;
    const double h = lat.h;
    // C(i1, j): trapezoid of g(i1, .) over [i1, j].
    Upper C = Upper::Zero(n, n);
    for (std::size_t i1 = 0; i1 < n; ++i1) {
        double prev = lat.q_half[0] * u(i1, i1);
        for (std::size_t j = i1 + 1; j < n; ++j) {
            const double g = lat.q_half[j - i1] * u(i1, j);
            C(i1, j) = C(i1, j - 1) + 0.5 * h * (prev + g);
            prev = g;
        }
    }
    // S(i, j) = sum_{i1 <= i} C(i1, j); the trapezoid over [0, xi_i] in xi1 is
    // h * (S(i, j) - C(0, j)/2 - C(i, j)/2).
    Upper out = Upper::Zero(n, n);
    std::vector<double> running(n, 0.0);
    std::vector<double> diag_trap(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i; j < n; ++j) running[j] += C(i, j);
        if (i == 0) continue;
        diag_trap[i] = h * (running[i] - 0.5 * C(0, i) - 0.5 * C(i, i));
        for (std::size_t j = i; j < n; ++j) {
            const double trap = h * (running[j] - 0.5 * C(0, j) - 0.5 * C(i, j));
            out(i, j) = 0.25 * (trap - diag_trap[i]);
        }
    }
    return out;
}

double sup_norm_upper(const Upper& u) {
    double m = 0.0;
    for (Eigen::Index j = 0; j < u.cols(); ++j) {
        for (Eigen::Index i = 0; i <= j; ++i) m = std::max(m, std::abs(u(i, j)));
    }
    return m;
}

TriangularKernel from_upper(KernelKind kind, const UniformGrid& grid, const Upper& u) {
    Eigen::MatrixXd lower = u.transpose();
    lower.triangularView<Eigen::StrictlyUpper>().setZero();
    return TriangularKernel(kind, grid, std::move(lower));
}

}  // namespace

TriangularKernel solve_goursat_picard(const PotentialSample& q, double T, double tol, PicardReport* report,
                                      int max_iterations) {
    if (!(tol > 0.0)) throw ContractViolation("goursat", "tolerance must be positive");
    const Lattice lat = make_lattice(q, T);
    const std::size_t n = lat.n;

    // Q(xi, eta) = -1/2 int_{xi/2}^{eta/2} q, from a half-step primitive of q.
    const auto primitive = cumulative_trapezoid(lat.q_half, lat.h / 2.0);
    Upper Q = Upper::Zero(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t i = 0; i <= j; ++i) Q(i, j) = -0.5 * (primitive[j] - primitive[i]);
    }

    // Tail bound |K^m Q| <= S (S xi / 2)^m / m! with S = S(2T), xi <= 2T.
    std::vector<double> abs_half(n);
    for (std::size_t k = 0; k < n; ++k) abs_half[k] = std::abs(lat.q_half[k]);
    const double S = 0.5 * trapezoid(abs_half, lat.h / 2.0);
    const double a = S * T;
    auto tail_after = [&](int m) {
        // sum_{k > m} S a^k / k!
        double b = S;
        for (int k = 1; k <= m + 1; ++k) b *= a / k;
        const double ratio = a / (m + 2);
        return ratio < 1.0 ? b / (1.0 - ratio) : std::numeric_limits<double>::infinity();
    };

    Upper v = Q;
    Upper term = Q;
    int m = 0;
    double last = sup_norm_upper(Q);
    double tail = tail_after(0);
    while (!(tail < tol || last < tol)) {
        if (m >= max_iterations) {
            throw ConvergenceError("goursat",
                                   "Picard series did not reach tol=" + std::to_string(tol) + " in " +
                                       std::to_string(max_iterations) + " terms; achieved " +
                                       std::to_string(std::min(tail, last)),
                                   std::min(tail, last));
        }
        term = -apply_picard_operator(lat, term);
        v += term;
        ++m;
        last = sup_norm_upper(term);
        tail = tail_after(m);
    }
    if (report) *report = PicardReport{m, tail, last};
    return from_upper(KernelKind::Characteristic, UniformGrid(n, 2.0 * T), v);
}

TriangularKernel goursat_bound_field(const PotentialSample& q, double T) {
    const Lattice lat = make_lattice(q, T);
    std::vector<double> abs_half(lat.n);
    for (std::size_t k = 0; k < lat.n; ++k) {
        const std::size_t i = k / 2;
        abs_half[k] = (k % 2 == 0) ? std::abs(q.values[i])
                                   : 0.5 * (std::abs(q.values[i]) + std::abs(q.values[i + 1]));
    }
    const auto prim = cumulative_trapezoid(abs_half, lat.h / 2.0);
    TriangularKernel bound(KernelKind::Characteristic, UniformGrid(lat.n, 2.0 * T));
    for (std::size_t j = 0; j < lat.n; ++j) {
        const double S = 0.5 * prim[j];
        for (std::size_t i = 0; i <= j; ++i) bound(i, j) = S * std::exp(S * lat.h * static_cast<double>(i) / 2.0);
    }
    return bound;
}

KernelDerivatives kernel_derivatives(const TriangularKernel& v, const PotentialSample& q) {
    if (v.kind() != KernelKind::Characteristic) {
        throw ContractViolation("goursat", "kernel_derivatives expects a characteristic kernel");
    }
    const Lattice lat = make_lattice(q, v.horizon());
    if (lat.n != v.size()) throw ContractViolation("goursat", "kernel and potential use different steps");
    const std::size_t n = lat.n;
    const double h = lat.h;
    const auto& qh = lat.q_half;

    // P(zeta_end, eta): trapezoid over zeta in [0, zeta_end] of q((eta - zeta)/2) v(zeta, eta).
    Eigen::MatrixXd P = Eigen::MatrixXd::Zero(n, n);  // P(i, j)
    for (std::size_t j = 0; j < n; ++j) {
        double prev = qh[j] * v(0, j);
        for (std::size_t i = 1; i <= j; ++i) {
            const double g = qh[j - i] * v(i, j);
            P(i, j) = P(i - 1, j) + 0.5 * h * (prev + g);
            prev = g;
        }
    }
    TriangularKernel d_xi(KernelKind::Characteristic, v.grid());
    TriangularKernel d_eta(KernelKind::Characteristic, v.grid());
    for (std::size_t i = 0; i < n; ++i) {
        // R(i, j): trapezoid over zeta in [xi_i, eta_j] of q((zeta - xi)/2) v(xi, zeta).
        double R = 0.0;
        double prev = qh[0] * v(i, i);
        for (std::size_t j = i; j < n; ++j) {
            if (j > i) {
                const double g = qh[j - i] * v(i, j);
                R += 0.5 * h * (prev + g);
                prev = g;
            }
            d_eta(i, j) = -0.25 * qh[j] - 0.25 * P(i, j);
            d_xi(i, j) = 0.25 * qh[i] - 0.25 * R + 0.25 * P(i, i);
        }
    }
    return {std::move(d_xi), std::move(d_eta)};
}

}  // namespace bcinv
