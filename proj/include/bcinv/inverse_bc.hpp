#pragma once

#include <optional>
#include <string>
#include <vector>

#include "bcinv/connecting.hpp"
#include "bcinv/grid.hpp"

namespace bcinv {

/// Recovered potential on [0, T_max] plus what the solver saw on the way.
/// Nodes where no trace could be used are gaps: their value is NaN and their
/// index is listed in `gaps`.
struct RecoveryResult {
    std::string method;
    UniformGrid grid;
    std::vector<double> q_hat;
    std::vector<std::string> branch;  ///< per node: which trace or equation produced it
    std::vector<std::size_t> gaps;
    std::vector<double> trace0;  ///< mu_0 / y(x,x) / diagonal of V or K
    std::vector<double> trace1;  ///< mu_1 / z(x,x); empty when unused
    std::optional<PositivityReport> positivity;
    double max_residual = 0.0;
    std::vector<std::string> notes;

    /// q_hat as a sample; throws if there are gaps.
    PotentialSample potential() const;
};

/// Relative zero-guard used when dividing by a trace.
inline constexpr double kZeroGuard = 1e-6;

/// q = trace''/trace, preferring `primary` and switching to `secondary` where
/// |primary| < kZeroGuard * max|primary|. Both below their guards gives a gap.
RecoveryResult recover_from_traces(std::string method, const UniformGrid& grid, const std::vector<double>& primary,
                                   const std::vector<double>& secondary, const std::string& primary_tag,
                                   const std::string& secondary_tag);

struct KreinSolution {
    double T = 0.0;
    int variant = 0;
    Sample f;
    double mu = 0.0;        ///< f(0+)
    double residual = 0.0;  ///< sup norm of (I + C)f - rhs
    PositivityReport positivity;
};

/// Nystrom solve of (I + C^T) f = rhs with rhs = T - t (variant 0) or
/// 1 - int_t^T r(s - t)(T - s) ds (variant 1).
KreinSolution solve_krein(const ResponseSample& r, double T, int variant);

/// Solves both Krein equations for every grid horizon in (0, T_max] and
/// recovers q(T) = mu''(T) / mu(T). `h` must equal the step of r.
RecoveryResult recover_q_bc(const ResponseSample& r, double T_max, double h);

enum class RemlingUnknown { Y, Z };

struct RemlingSolution {
    Sample diagonal;  ///< y(x, x) or z(x, x)
    RecoveryResult recovery;
    double max_residual = 0.0;
};

/// Solves y(x,t) + int_0^x k(t,s) y(x,s) ds = t (or = psi(t) for z) for each
/// grid x, with k built from A(t) = -2 r(2t).
RemlingSolution remling_solve(const ResponseSample& r, double T, RemlingUnknown which);

/// Both Remling traces, y preferred, z where y is near zero.
RecoveryResult recover_q_remling(const ResponseSample& r, double T);

}  // namespace bcinv
