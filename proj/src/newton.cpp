#include "parnewt/newton.hpp"

#include <cmath>
#include <limits>

#include "parnewt/calculus.hpp"
#include "parnewt/csv.hpp"

namespace parnewt {

namespace {

struct Jets {
    SpaceTimeField ub;                 // u with enforced zero boundary
    std::vector<SpaceTimeField> d1;    // D_l u
    std::vector<SpaceTimeField> d2;    // D_ij u, row-major
    SpaceTimeField dt;
};

Jets jets_of(const SpaceTimeField& u) {
    const int n = u.grid().dim();
    Jets j{u.with_zero_boundary(), {}, {}, SpaceTimeField()};
    for (int i = 0; i < n; ++i) j.d1.push_back(diff_x(j.ub, i));
    for (int i = 0; i < n; ++i)
        for (int l = 0; l < n; ++l) j.d2.push_back(diff_xx(j.ub, i, l));
    j.dt = diff_t(j.ub);
    return j;
}

std::string node_location(const Grid& g, int node) {
    const auto x = g.space_coords(g.space_of(node));
    std::string s = "x1=" + format_double(x[0]);
    if (g.dim() > 1) s += ", x2=" + format_double(x[1]);
    return s + ", t=" + format_double(g.time(g.step_of(node)));
}

}  // namespace

SpaceTimeField residual(const CoefficientSet& set, const SpaceTimeField& u) {
    const Grid& g = u.grid();
    if (set.dim != g.dim()) throw std::invalid_argument("residual: set/grid dimension mismatch");
    const Jets j = jets_of(u);
    const int n = set.dim;
    SpaceTimeField out(u.grid_ptr());

    for (int node = 0; node < g.node_count(); ++node) {
        if (g.classify(node) != NodeClass::Interior) continue;
        const auto x = g.space_coords(g.space_of(node));
        const double t = g.time(g.step_of(node));
        const double uv = j.ub(node);
        const std::array<double, 2> xi{j.d1[0](node), n > 1 ? j.d1[1](node) : 0.0};
        try {
            double acc = j.dt(node);
            for (int i = 0; i < n; ++i)
                for (int l = 0; l < n; ++l)
                    acc -= set.a_at(i, l).value(x, t, uv, xi) * j.d2[static_cast<std::size_t>(i * n + l)](node);
            acc -= set.f.value(x, t, uv, xi) + set.source_at(node);
            out(node) = acc;
        } catch (const expr::EvalError& e) {
            throw CoefficientDomainError(std::string(e.what()) + " (at node " +
                                         node_location(g, node) + ")");
        }
    }
    return out;
}

namespace {

struct Linearization {
    Eigen::ArrayXXd A;  // a^{ij}(x,t,u,Du), all nodes
    Eigen::ArrayXXd c;  // Σ_ij D_{ξl}a^{ij} D_ij u + D_{ξl}f
    Eigen::ArrayXd b;   // Σ_ij a_u^{ij} D_ij u + f_u
};

Linearization linearize(const CoefficientSet& set, const Jets& j, const Grid& g) {
    const int n = set.dim;
    Linearization lin;
    lin.A.resize(g.node_count(), n * n);
    lin.c = Eigen::ArrayXXd::Zero(g.node_count(), n);
    lin.b = Eigen::ArrayXd::Zero(g.node_count());

    for (int node = 0; node < g.node_count(); ++node) {
        const auto x = g.space_coords(g.space_of(node));
        const double t = g.time(g.step_of(node));
        const double uv = j.ub(node);
        const std::array<double, 2> xi{j.d1[0](node), n > 1 ? j.d1[1](node) : 0.0};
        try {
            for (int i = 0; i < n; ++i) {
                for (int l = 0; l < n; ++l) {
                    const auto& fn = set.a_at(i, l);
                    const double d2 = j.d2[static_cast<std::size_t>(i * n + l)](node);
                    lin.A(node, i * n + l) = fn.value(x, t, uv, xi);
                    const auto parts = fn.partials(x, t, uv, xi);
                    lin.b(node) += parts.du * d2;
                    for (int m = 0; m < n; ++m) lin.c(node, m) += parts.dxi[m] * d2;
                }
            }
            const auto fparts = set.f.partials(x, t, uv, xi);
            lin.b(node) += fparts.du;
            for (int m = 0; m < n; ++m) lin.c(node, m) += fparts.dxi[m];
        } catch (const expr::EvalError& e) {
            throw CoefficientDomainError(std::string(e.what()) + " (at node " +
                                         node_location(g, node) + ")");
        }
    }
    return lin;
}

}  // namespace

SpaceTimeField frechet_apply(const CoefficientSet& set, const SpaceTimeField& u,
                             const SpaceTimeField& v) {
    const Grid& g = u.grid();
    const Jets j = jets_of(u);
    Linearization lin = linearize(set, j, g);
    LinearParabolicProblem p{u.grid_ptr(), std::move(lin.A), std::move(lin.c), std::move(lin.b),
                             Eigen::ArrayXd::Zero(g.node_count()), set.lambda};
    return apply_linear_operator(p, v.with_zero_boundary());
}

LinearParabolicProblem linearized_problem(const CoefficientSet& set, const SpaceTimeField& u,
                                          const SpaceTimeField& rhs) {
    const Grid& g = u.grid();
    const Jets j = jets_of(u);
    Linearization lin = linearize(set, j, g);
    return make_linear_problem(u.grid_ptr(), std::move(lin.A), std::move(lin.c),
                               std::move(lin.b), rhs.values(), set.lambda);
}

SpaceTimeField newton_step(const CoefficientSet& set, const SpaceTimeField& u) {
    SpaceTimeField r = residual(set, u);
    r *= -1.0;
    const SpaceTimeField delta = solve_linear_parabolic(linearized_problem(set, u, r));
    return u.with_zero_boundary() + delta;
}

const char* outcome_name(NewtonOutcome o) {
    switch (o) {
        case NewtonOutcome::Converged: return "converged";
        case NewtonOutcome::MaxIter: return "max_iter";
        case NewtonOutcome::Diverged: return "diverged";
        case NewtonOutcome::Stalled: return "stalled";
        case NewtonOutcome::EllipticityLost: return "ellipticity_lost";
        case NewtonOutcome::SolverFailure: return "solver_failure";
    }
    return "?";
}

NewtonResult newton_solve(const CoefficientSet& set, const SpaceTimeField& start,
                          const NewtonOptions& opts) {
    NewtonResult res;
    res.solution = start.with_zero_boundary();
    res.trace.iterates.push_back(res.solution);

    auto residual_norm = [&](const SpaceTimeField& u) { return lp_norm(residual(set, u), set.p); };

    double rn;
    try {
        rn = residual_norm(res.solution);
    } catch (const CoefficientDomainError& e) {
        res.outcome = NewtonOutcome::Diverged;
        res.message = std::string("start is outside the coefficient domain: ") + e.what();
        return res;
    }
    res.trace.residual_norms.push_back(rn);
    const double r0 = rn;

    for (int k = 0;; ++k) {
        if (!std::isfinite(rn)) {
            res.outcome = NewtonOutcome::Diverged;
            res.message = "non-finite residual norm";
            break;
        }
        if (rn <= opts.tol) {
            res.outcome = NewtonOutcome::Converged;
            break;
        }
        if (rn > 1e6 * (r0 + 1.0)) {
            res.outcome = NewtonOutcome::Diverged;
            res.message = "residual grew beyond 1e6 x initial";
            break;
        }
        if (k >= opts.max_iter) {
            res.outcome = NewtonOutcome::MaxIter;
            res.message = "residual " + format_double(rn) + " above tol after " +
                          std::to_string(opts.max_iter) + " iterations";
            break;
        }

        SpaceTimeField delta;
        try {
            SpaceTimeField rhs = residual(set, res.solution);
            rhs *= -1.0;
            delta = solve_linear_parabolic(linearized_problem(set, res.solution, rhs));
        } catch (const EllipticityError& e) {
            res.outcome = NewtonOutcome::EllipticityLost;
            res.message = e.what();
            break;
        } catch (const LinearSolveError& e) {
            res.outcome = NewtonOutcome::SolverFailure;
            res.message = e.what();
            break;
        } catch (const CoefficientDomainError& e) {
            res.outcome = NewtonOutcome::Diverged;
            res.message = std::string("iterate left the coefficient domain: ") + e.what();
            break;
        }

        double step_scale = 1.0;
        SpaceTimeField next = res.solution + delta;
        double rn_next;
        const auto try_norm = [&](const SpaceTimeField& u, double& out_norm) {
            try {
                out_norm = residual_norm(u);
                return std::isfinite(out_norm);
            } catch (const CoefficientDomainError&) {
                return false;
            }
        };
        bool ok = try_norm(next, rn_next);
        if (opts.damping) {
            int halvings = 0;
            while ((!ok || rn_next > rn) && halvings < 8) {
                step_scale *= 0.5;
                next = res.solution + step_scale * delta;
                ok = try_norm(next, rn_next);
                ++halvings;
            }
            if (!ok || rn_next > rn) {
                res.outcome = NewtonOutcome::Stalled;
                res.message = "backtracking failed to reduce the residual";
                break;
            }
        } else if (!ok) {
            res.outcome = NewtonOutcome::Diverged;
            res.message = "iterate left the coefficient domain";
            break;
        }

        res.trace.increment_norms.push_back(w21p_norm(step_scale * delta, set.p));
        res.solution = next;
        res.trace.iterates.push_back(res.solution);
        rn = rn_next;
        res.trace.residual_norms.push_back(rn);
    }

    try {
        res.trace.estimated_order = convergence_order(res.trace);
    } catch (const std::invalid_argument&) {
        res.trace.estimated_order = std::numeric_limits<double>::quiet_NaN();
    }
    return res;
}

double convergence_order(const NewtonTrace& trace, double floor) {
    const auto& inc = trace.increment_norms;
    int usable = 0;
    for (double d : inc)
        if (d >= floor) ++usable;
    if (usable < 3)
        throw std::invalid_argument("convergence_order: need at least 3 increments above the floor");

    // least squares on pairs (log δ_k, log δ_{k+1}) with both above the floor
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int m = 0;
    for (std::size_t k = 0; k + 1 < inc.size(); ++k) {
        if (inc[k] < floor || inc[k + 1] < floor) continue;
        const double x = std::log(inc[k]);
        const double y = std::log(inc[k + 1]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        ++m;
    }
    if (m < 2) throw std::invalid_argument("convergence_order: need at least 2 usable pairs");
    const double denom = m * sxx - sx * sx;
    if (denom == 0.0) throw std::invalid_argument("convergence_order: degenerate fit");
    return (m * sxy - sx * sy) / denom;
}

void write_trace_csv(const NewtonTrace& trace, const std::string& path) {
    CsvWriter csv(path);
    csv.header({"k", "residual_p", "increment_w21p"});
    for (std::size_t k = 0; k < trace.residual_norms.size(); ++k) {
        const double inc = k < trace.increment_norms.size()
                               ? trace.increment_norms[k]
                               : std::numeric_limits<double>::quiet_NaN();
        csv.row({static_cast<long>(k), trace.residual_norms[k], inc});
    }
}

}  // namespace parnewt
