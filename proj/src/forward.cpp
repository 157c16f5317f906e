#include "bcinv/forward.hpp"

#include <cmath>

#include "bcinv/errors.hpp"

namespace bcinv {
namespace {

TriangularKernel wave_kernel_for(const PotentialSample& q, double T) {
    return solve_goursat_picard(q, T).to_wave_kernel();
}

void require_wave_kernel(const TriangularKernel& w, const Sample& f) {
    if (w.kind() != KernelKind::WaveKernel) throw ContractViolation("forward", "expected the wave kernel w");
    if (!w.grid().same_as(f.grid)) throw ContractViolation("forward", "control grid does not match the kernel grid");
}

}  // namespace

ResponseSample response_from_kernel(const TriangularKernel& v, const PotentialSample& q) {
    if (v.kind() != KernelKind::Characteristic) {
        throw ContractViolation("forward", "response_from_kernel expects the characteristic kernel v");
    }
    const std::size_t n = v.size();
    const double h = q.grid.step();
    if (std::abs(v.grid().step() - h) > 1e-12 * h) {
        throw ContractViolation("forward", "kernel and potential use different steps");
    }
    std::vector<double> r(n);
    std::vector<double> g;
    for (std::size_t j = 0; j < n; ++j) {
        g.resize(j + 1);
        for (std::size_t i = 0; i <= j; ++i) g[i] = q.half_node(j - i) * v(i, j);
        const double integral = j == 0 ? 0.0 : trapezoid(g, h);
        r[j] = -0.5 * q.half_node(j) - 0.5 * integral;
    }
    return ResponseSample(v.grid(), std::move(r));
}

ResponseSample response_function(const PotentialSample& q, double T, double tol) {
    return response_from_kernel(solve_goursat_picard(q, T, tol), q);
}

Wavefield wave_solve(const TriangularKernel& w, const Sample& f) {
    require_wave_kernel(w, f);
    const std::size_t n = w.size();
    double scale = 1.0;
    for (double x : f.values) scale = std::max(scale, std::abs(x));
    const double tol = 1e-8 * scale;
    if (std::abs(f.values[0]) > tol) {
        throw ContractViolation("forward", "control must vanish at t = 0 (Dirichlet compatibility)");
    }
    const double h = w.grid().step();
    Wavefield u{w.grid(), Eigen::MatrixXd::Zero(n, n)};
    std::vector<double> g;
    for (std::size_t b = 0; b < n; ++b) {
        for (std::size_t a = 0; a <= b; ++a) {
            double integral = 0.0;
            if (b > a) {
                g.resize(b - a + 1);
                for (std::size_t s = a; s <= b; ++s) g[s - a] = w(a, s) * f.values[b - s];
                integral = trapezoid(g, h);
            }
            u.values(a, b) = f.values[b - a] + integral;
        }
    }
    return u;
}

Wavefield wave_solve(const PotentialSample& q, const Sample& f, double T) {
    return wave_solve(wave_kernel_for(q, T), f);
}

std::vector<double> control_apply(const TriangularKernel& w, const Sample& f) {
    require_wave_kernel(w, f);
    const std::size_t n = w.size();
    const std::size_t N = n - 1;
    const double h = w.grid().step();
    std::vector<double> z(n);
    std::vector<double> g;
    for (std::size_t a = 0; a < n; ++a) {
        double integral = 0.0;
        if (a < N) {
            g.resize(N - a + 1);
            for (std::size_t s = a; s <= N; ++s) g[s - a] = w(a, s) * f.values[N - s];
            integral = trapezoid(g, h);
        }
        z[a] = f.values[N - a] + integral;
    }
    return z;
}

std::vector<double> control_apply(const PotentialSample& q, const Sample& f, double T) {
    return control_apply(wave_kernel_for(q, T), f);
}

ControlInversion control_invert(const TriangularKernel& w, const Sample& z) {
    require_wave_kernel(w, z);
    const std::size_t n = w.size();
    const std::size_t N = n - 1;
    const double h = w.grid().step();
    // g[a] = f(T - x_a); row a reads g on [a, N].
    std::vector<double> g(n, 0.0);
    g[N] = z.values[N];
    for (std::size_t a = N; a-- > 0;) {
        double known = 0.5 * h * w(a, N) * g[N];
        for (std::size_t s = a + 1; s < N; ++s) known += h * w(a, s) * g[s];
        g[a] = (z.values[a] - known) / (1.0 + 0.5 * h * w(a, a));
    }
    std::vector<double> f(n);
    for (std::size_t i = 0; i < n; ++i) f[i] = g[N - i];
    Sample control(w.grid(), std::move(f));

    const auto back = control_apply(w, control);
    double residual = 0.0;
    for (std::size_t a = 0; a < n; ++a) residual = std::max(residual, std::abs(back[a] - z.values[a]));
    return {std::move(control), residual};
}

ControlInversion control_invert(const PotentialSample& q, const Sample& z, double T) {
    return control_invert(wave_kernel_for(q, T), z);
}

}  // namespace bcinv
