#include "bcinv/spectral.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "bcinv/errors.hpp"
#include "bcinv/forward.hpp"

namespace bcinv {
namespace {

/// Transfer matrix of phi'' = x phi over a length d: [phi; phi'](d) = [[c, s], [dc, c]] [phi; phi'](0).
struct Transfer {
    double c;
    double s;
    double dc;
};

Transfer transfer(double x, double d) {
    const double z = x * d * d;
    if (std::abs(z) < 1e-6) {
        const double c = 1.0 + z / 2.0 + z * z / 24.0;
        const double s = d * (1.0 + z / 6.0 + z * z / 120.0);
        return {c, s, x * s};
    }
    if (x > 0.0) {
        const double k = std::sqrt(x);
        return {std::cosh(k * d), std::sinh(k * d) / k, k * std::sinh(k * d)};
    }
    const double k = std::sqrt(-x);
    return {std::cos(k * d), std::sin(k * d) / k, -k * std::sin(k * d)};
}

/// Cell-wise constant potential (mean of the endpoint samples) on [0, L].
struct Cells {
    double h;
    std::vector<double> q;
};

Cells cells_on(const PotentialSample& q, double L, const char* module) {
    const double h = q.grid.step();
    const std::size_t N = step_count(L, h);
    if (N + 1 > q.size()) throw ContractViolation(module, "interval length exceeds the potential's grid");
    Cells c{h, std::vector<double>(N)};
    for (std::size_t i = 0; i < N; ++i) c.q[i] = 0.5 * (q.values[i] + q.values[i + 1]);
    return c;
}

std::size_t substeps(double lambda, double qc, double h) {
    return std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(std::sqrt(std::abs(lambda - qc)) * h)));
}

int zeros_on_cells(const Cells& cells, double lambda) {
    double phi = 0.0;
    double dphi = 1.0;
    int count = 0;
    int sign = 1;  // phi > 0 just after 0
    for (double qc : cells.q) {
        const std::size_t m = substeps(lambda, qc, cells.h);
        const Transfer t = transfer(qc - lambda, cells.h / static_cast<double>(m));
        for (std::size_t k = 0; k < m; ++k) {
            const double p = t.c * phi + t.s * dphi;
            dphi = t.dc * phi + t.c * dphi;
            phi = p;
            if (phi * sign < 0.0) {
                ++count;
                sign = -sign;
            }
        }
        if (!std::isfinite(phi)) return -1;
    }
    if (phi == 0.0) ++count;
    return count;
}

double inverse_norm_squared(const Cells& cells, double lambda) {
    static constexpr std::array<double, 5> nodes{-0.9061798459386640, -0.5384693101056831, 0.0, 0.5384693101056831,
                                                 0.9061798459386640};
    static constexpr std::array<double, 5> weights{0.2369268850561891, 0.4786286704993665, 0.5688888888888889,
                                                   0.4786286704993665, 0.2369268850561891};
    double phi = 0.0;
    double dphi = 1.0;
    double integral = 0.0;
    for (double qc : cells.q) {
        const std::size_t m = substeps(lambda, qc, cells.h);
        const double d = cells.h / static_cast<double>(m);
        const Transfer t = transfer(qc - lambda, d);
        for (std::size_t k = 0; k < m; ++k) {
            double part = 0.0;
            for (std::size_t g = 0; g < nodes.size(); ++g) {
                const Transfer tg = transfer(qc - lambda, 0.5 * d * (1.0 + nodes[g]));
                const double v = tg.c * phi + tg.s * dphi;
                part += weights[g] * v * v;
            }
            integral += 0.5 * d * part;
            const double p = t.c * phi + t.s * dphi;
            dphi = t.dc * phi + t.c * dphi;
            phi = p;
        }
    }
    return 1.0 / integral;
}

/// sin(sqrt(l) a) / sqrt(l), continued to l <= 0.
double sine_over_root(double l, double a) {
    if (l > 0.0) {
        const double k = std::sqrt(l);
        return std::sin(k * a) / k;
    }
    if (l < 0.0) {
        const double k = std::sqrt(-l);
        return std::sinh(k * a) / k;
    }
    return a;
}

/// Columns s_n(a_i) for the spectral and the reference pairs.
Eigen::MatrixXd partial_sum(const SpectralData& sd, const std::vector<double>& a, const std::vector<double>& b) {
    const auto n = static_cast<Eigen::Index>(sd.count());
    Eigen::MatrixXd Sa(static_cast<Eigen::Index>(a.size()), 2 * n);
    Eigen::MatrixXd Sb(static_cast<Eigen::Index>(b.size()), 2 * n);
    for (Eigen::Index j = 0; j < n; ++j) {
        const auto idx = static_cast<std::size_t>(j);
        const double wa = std::sqrt(sd.alpha[idx]);
        const double w0 = std::sqrt(sd.alpha0[idx]);
        for (std::size_t i = 0; i < a.size(); ++i) {
            Sa(static_cast<Eigen::Index>(i), j) = wa * sine_over_root(sd.lambda[idx], a[i]);
            Sa(static_cast<Eigen::Index>(i), n + j) = w0 * sine_over_root(sd.lambda0[idx], a[i]);
        }
        for (std::size_t i = 0; i < b.size(); ++i) {
            Sb(static_cast<Eigen::Index>(i), j) = wa * sine_over_root(sd.lambda[idx], b[i]);
            Sb(static_cast<Eigen::Index>(i), n + j) = -w0 * sine_over_root(sd.lambda0[idx], b[i]);
        }
    }
    return Sa * Sb.transpose();
}

}  // namespace

int count_zeros(const PotentialSample& q, double L, double lambda) {
    return zeros_on_cells(cells_on(q, L, "spectral"), lambda);
}

SpectralData dirichlet_eigs(const PotentialSample& q, double L, int n_max) {
    if (n_max < 1) throw ContractViolation("spectral", "n_max must be at least 1");
    const Cells cells = cells_on(q, L, "spectral");
    const auto [qmin_it, qmax_it] = std::minmax_element(cells.q.begin(), cells.q.end());
    const double floor_lambda = *qmin_it - 1.0;
    const double qmax = *qmax_it;

    SpectralData sd;
    sd.L = L;
    double lo_prev = floor_lambda;
    for (int n = 1; n <= n_max; ++n) {
        const double l0 = std::pow(n * std::numbers::pi / L, 2);
        double lo = lo_prev;
        if (zeros_on_cells(cells, lo) >= n) lo = floor_lambda;
        double hi = std::max(lo + 1.0, l0 + qmax + 1.0);
        int expansions = 0;
        for (int z = zeros_on_cells(cells, hi); z < n; z = zeros_on_cells(cells, hi)) {
            if (z < 0 || ++expansions > 60) throw EigenSolverError("could not bracket eigenvalue " + std::to_string(n), n);
            hi += hi - lo;
        }
        for (int it = 0; it < 400 && hi - lo > 1e-10 * std::max(1.0, std::abs(hi)); ++it) {
            const double mid = 0.5 * (lo + hi);
            const int z = zeros_on_cells(cells, mid);
            if (z < 0) throw EigenSolverError("overflow while shooting for eigenvalue " + std::to_string(n), n);
            (z >= n ? hi : lo) = mid;
        }
        const double lambda = 0.5 * (lo + hi);
        if (!sd.lambda.empty() && !(lambda > sd.lambda.back())) {
            throw EigenSolverError("eigenvalue " + std::to_string(n) + " not separated from its predecessor", n);
        }
        sd.lambda.push_back(lambda);
        sd.alpha.push_back(inverse_norm_squared(cells, lambda));
        sd.lambda0.push_back(l0);
        sd.alpha0.push_back(2.0 * l0 / L);
        lo_prev = lambda;
    }
    return sd;
}

ConnectingKernel ct_from_sigma(const SpectralData& sd, const UniformGrid& grid) {
    const double T = grid.length();
    if (T > sd.L * (1.0 + 1e-12)) throw ContractViolation("spectral", "ct_from_sigma needs T <= L");
    std::vector<double> a(grid.size());
    for (std::size_t i = 0; i < a.size(); ++i) a[i] = T - grid.at(i);
    a.back() = 0.0;
    Eigen::MatrixXd c = partial_sum(sd, a, a);
    c = 0.5 * (c + c.transpose()).eval();
    return ConnectingKernel(grid, std::move(c));
}

Eigen::MatrixXd f_kernel_from_sigma(const SpectralData& sd, const UniformGrid& grid) {
    if (grid.length() > sd.L * (1.0 + 1e-12)) throw ContractViolation("spectral", "F kernel needs T <= L");
    std::vector<double> x(grid.size());
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = grid.at(i);
    Eigen::MatrixXd F = partial_sum(sd, x, x);
    return 0.5 * (F + F.transpose());
}

std::vector<double> r_from_sigma_integrated(const SpectralData& sd, const UniformGrid& grid) {
    if (grid.length() > sd.L * (1.0 + 1e-12)) throw ContractViolation("spectral", "integrated response needs T <= L");
    std::vector<double> out(grid.size(), 0.0);
    for (std::size_t i = 1; i < grid.size(); ++i) {
        const double t = grid.at(i);
        double s = 0.0;
        for (std::size_t n = 0; n < sd.count(); ++n) {
            const double a = sine_over_root(sd.lambda[n], t);
            const double b = sine_over_root(sd.lambda0[n], t);
            s += sd.alpha[n] * a * a - sd.alpha0[n] * b * b;
        }
        out[i] = 2.0 * s;
    }
    return out;
}

MFunctionSample m_function(const PotentialSample& q, double L, const std::vector<double>& k_values) {
    const double h = q.grid.step();
    const std::size_t N = step_count(L, h);
    if (N + 1 > q.size()) throw ContractViolation("spectral", "m-function interval exceeds the potential's grid");
    MFunctionSample out;
    out.L = L;
    for (double k : k_values) {
        if (!(k > 0.0)) throw ContractViolation("spectral", "k values must be positive");
        const double k2 = k * k;
        // Substeps never straddle a sample of q, so the piecewise-linear q is smooth within each RK4 step.
        const auto m = std::max<std::size_t>(4, static_cast<std::size_t>(std::ceil(k * h / 0.0025)));
        const double d = h / static_cast<double>(m);
        double psi = 0.0;
        double dpsi = -1.0;
        double biggest = 0.0;
        auto rhs = [&](double x, double p) { return (q.at(std::clamp(x, 0.0, L)) + k2) * p; };
        for (std::size_t cell = N; cell-- > 0;) {
            for (std::size_t j = m; j-- > 0;) {
                const double x = q.grid.at(cell) + static_cast<double>(j + 1) * d;
                const double hs = -d;
                const double k1p = dpsi, k1d = rhs(x, psi);
                const double k2p = dpsi + 0.5 * hs * k1d, k2d = rhs(x + 0.5 * hs, psi + 0.5 * hs * k1p);
                const double k3p = dpsi + 0.5 * hs * k2d, k3d = rhs(x + 0.5 * hs, psi + 0.5 * hs * k2p);
                const double k4p = dpsi + hs * k3d, k4d = rhs(x + hs, psi + hs * k3p);
                psi += hs / 6.0 * (k1p + 2.0 * k2p + 2.0 * k3p + k4p);
                dpsi += hs / 6.0 * (k1d + 2.0 * k2d + 2.0 * k3d + k4d);
                biggest = std::max(biggest, std::abs(psi));
                if (biggest > 1e150) {
                    psi /= biggest;
                    dpsi /= biggest;
                    biggest = 1.0;
                }
            }
        }
        if (!(std::abs(psi) >= 1e-12 * biggest)) {
            throw PoleProximityError("psi(0) vanishes near k=" + std::to_string(k) + "; -k^2 is close to a pole", k);
        }
        out.k.push_back(k);
        out.m.push_back(dpsi / psi);
    }
    return out;
}

double laplace_piecewise_linear(const Sample& A, double k) {
    const double a = 2.0 * k;
    const double hs = A.grid.step();
    const double x = a * hs;
    double e0;
    double e1;  // int_0^hs e^{-a s} ds and int_0^hs s e^{-a s} ds / hs
    if (std::abs(x) < 1e-6) {
        e0 = hs * (1.0 - x / 2.0 + x * x / 6.0);
        e1 = hs * (0.5 - x / 3.0 + x * x / 8.0);
    } else {
        e0 = -std::expm1(-x) / a;
        e1 = (-std::expm1(-x) - x * std::exp(-x)) / (a * x);
    }
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < A.size(); ++i) {
        total += std::exp(-a * A.grid.at(i)) * (A.values[i] * e0 + (A.values[i + 1] - A.values[i]) * e1);
    }
    return total;
}

namespace {

std::vector<double> amplitude_residuals(const PotentialSample& q, double L, const std::vector<double>& k_values,
                                        const std::vector<double>& m) {
    const auto r = response_function(q, L);
    std::vector<double> A(r.size());
    for (std::size_t i = 0; i < r.size(); ++i) A[i] = -2.0 * r.values[i];
    const Sample amplitude(UniformGrid(r.size(), L), std::move(A));
    std::vector<double> rho(k_values.size());
    for (std::size_t i = 0; i < k_values.size(); ++i) {
        rho[i] = m[i] + k_values[i] + laplace_piecewise_linear(amplitude, k_values[i]);
    }
    return rho;
}

}  // namespace

AmplitudeCheck a_amplitude_check(const PotentialSample& q, double L, const std::vector<double>& k_values) {
    const auto mf = m_function(q, L, k_values);
    AmplitudeCheck out;
    out.k = k_values;
    out.rho = amplitude_residuals(q, L, k_values, mf.m);

    // Rerun the time-domain half on every other sample; the difference
    // estimates the discretization error of rho.
    const std::size_t N = step_count(L, q.grid.step());
    out.error_estimate.assign(k_values.size(), 0.0);
    if (N % 2 == 0 && N >= 4) {
        std::vector<double> coarse(N / 2 + 1);
        for (std::size_t i = 0; i < coarse.size(); ++i) coarse[i] = q.values[2 * i];
        const UniformGrid coarse_grid(coarse.size(), L);
        const PotentialSample qc(coarse_grid, std::move(coarse));
        const auto rho_c = amplitude_residuals(qc, L, k_values, mf.m);
        for (std::size_t i = 0; i < k_values.size(); ++i) out.error_estimate[i] = std::abs(out.rho[i] - rho_c[i]) / 3.0;
    }

    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    out.flagged.resize(k_values.size());
    for (std::size_t i = 0; i < k_values.size(); ++i) {
        const double rounding = 64.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(mf.m[i]));
        const double floor = std::max(10.0 * out.error_estimate[i], rounding);
        out.flagged[i] = !(std::abs(out.rho[i]) > floor);
        if (out.flagged[i]) continue;
        const double x = k_values[i];
        const double y = std::log(std::abs(out.rho[i]));
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        ++out.fitted;
    }
    if (out.fitted >= 2) {
        const double n = static_cast<double>(out.fitted);
        out.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
        out.intercept = (sy - out.slope * sx) / n;
    } else {
        out.slope = out.intercept = std::numeric_limits<double>::quiet_NaN();
    }
    return out;
}

}  // namespace bcinv
