#pragma once

#include <limits>
#include <string>
#include <vector>

#include "parnewt/coeff.hpp"
#include "parnewt/linpar.hpp"

namespace parnewt {

/// Nonlinear residual 𝒫(u) = D_t u − a^{ij}(x,t,u,Du) D_ij u − f(x,t,u,Du)
/// (plus the set's sampled source, when present) at interior nodes with
/// t-index ≥ 1; zero on the parabolic-boundary rows. The boundary condition
/// u = 0 on ∂_p Q is enforced on a copy before differencing.
SpaceTimeField residual(const CoefficientSet& set, const SpaceTimeField& u);

/// 𝒫'(u)v = D_t v − a^{ij}(u) D_ij v − [a^{ij}_u D_ij u + f_u] v
///          − Σ_l [D_{ξl}a^{ij} D_ij u + D_{ξl}f] D_l v,
/// with all derivative terms kept in the operator.
SpaceTimeField frechet_apply(const CoefficientSet& set, const SpaceTimeField& u,
                             const SpaceTimeField& v);

/// The frozen-coefficient problem 𝒫'(u) δ = rhs with δ = 0 on ∂_p Q.
/// Construction validates ellipticity of a^{ij}(·,u,Du) against set.lambda.
LinearParabolicProblem linearized_problem(const CoefficientSet& set, const SpaceTimeField& u,
                                          const SpaceTimeField& rhs);

/// One undamped update: u + δ where 𝒫'(u) δ = −𝒫(u).
SpaceTimeField newton_step(const CoefficientSet& set, const SpaceTimeField& u);

struct NewtonOptions {
    double tol = 1e-10;  // absolute bound on ‖𝒫(u_k)‖_{p,Q}
    int max_iter = 25;
    bool damping = false;  // backtracking halving on residual increase
};

enum class NewtonOutcome {
    Converged,
    MaxIter,
    Diverged,
    Stalled,
    EllipticityLost,
    SolverFailure,
};
const char* outcome_name(NewtonOutcome o);

struct NewtonTrace {
    std::vector<SpaceTimeField> iterates;
    std::vector<double> residual_norms;   // ‖𝒫(u_k)‖_{p,Q}, one per iterate
    std::vector<double> increment_norms;  // ‖u_{k+1} − u_k‖_{W^{2,1}_p}, one shorter
    double estimated_order = std::numeric_limits<double>::quiet_NaN();
};

struct NewtonResult {
    SpaceTimeField solution;
    NewtonTrace trace;
    NewtonOutcome outcome = NewtonOutcome::MaxIter;
    std::string message;

    bool converged() const { return outcome == NewtonOutcome::Converged; }
    int iterations() const { return static_cast<int>(trace.increment_norms.size()); }
};

/// Iterates 𝒫'(u_k)(u_{k+1} − u_k) = −𝒫(u_k) until ‖𝒫(u_k)‖_{p,Q} ≤ tol.
/// Non-convergence is a diagnosis on the result, not an exception.
NewtonResult newton_solve(const CoefficientSet& set, const SpaceTimeField& start,
                          const NewtonOptions& opts = {});

/// Least-squares slope of log‖δ_{k+1}‖ against log‖δ_k‖ over increments above
/// `floor`. Requires at least 3 usable increments.
double convergence_order(const NewtonTrace& trace, double floor = 1e-12);

/// Columns k,residual_p,increment_w21p (the last row's increment is nan).
void write_trace_csv(const NewtonTrace& trace, const std::string& path);

}  // namespace parnewt
