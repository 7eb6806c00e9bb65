#include "parnewt/linpar.hpp"

#include <Eigen/SparseLU>
#include <cmath>
#include <vector>

#include "parnewt/calculus.hpp"
#include "parnewt/csv.hpp"

namespace parnewt {

namespace {

// Eigenvalue range of the symmetric part of the per-node matrix.
std::pair<double, double> sym_eig_range(const LinearParabolicProblem& p, int node) {
    const int n = p.grid->dim();
    if (n == 1) {
        const double a = p.A(node, 0);
        return {a, a};
    }
    const double a = p.A(node, 0);
    const double d = p.A(node, 3);
    const double off = 0.5 * (p.A(node, 1) + p.A(node, 2));
    const double mid = 0.5 * (a + d);
    const double rad = std::hypot(0.5 * (a - d), off);
    return {mid - rad, mid + rad};
}

}  // namespace

LinearParabolicProblem make_linear_problem(GridPtr grid, Eigen::ArrayXXd A, Eigen::ArrayXXd c,
                                           Eigen::ArrayXd b, Eigen::ArrayXd g, double lambda) {
    const int n = grid->dim();
    const int total = grid->node_count();
    if (A.rows() != total || A.cols() != n * n)
        throw std::invalid_argument("linpar: A samples do not conform to the grid");
    if (c.rows() != total || c.cols() != n)
        throw std::invalid_argument("linpar: c samples do not conform to the grid");
    if (b.size() != total || g.size() != total)
        throw std::invalid_argument("linpar: b/g samples do not conform to the grid");
    if (!(lambda > 0.0)) throw std::invalid_argument("linpar: lambda must be positive");

    LinearParabolicProblem p{std::move(grid), std::move(A), std::move(c), std::move(b),
                             std::move(g), lambda};
    const double tol = 1e-9 * std::max(1.0, lambda);
    for (int node = 0; node < total; ++node) {
        const auto [lo, hi] = sym_eig_range(p, node);
        if (lo < 1.0 / lambda - tol || hi > lambda + tol) {
            const auto x = p.grid->space_coords(p.grid->space_of(node));
            throw EllipticityError(
                "ellipticity bounds [1/lambda, lambda] = [" + format_double(1.0 / lambda) + ", " +
                format_double(lambda) + "] violated at node x1=" + format_double(x[0]) +
                (p.grid->dim() > 1 ? ", x2=" + format_double(x[1]) : "") +
                ", t=" + format_double(p.grid->time(p.grid->step_of(node))) +
                ": eigenvalue range [" + format_double(lo) + ", " + format_double(hi) + "]");
        }
    }
    return p;
}

StepSystem assemble_step(const LinearParabolicProblem& p, int k, const Eigen::VectorXd& prev) {
    const Grid& g = *p.grid;
    if (k < 1 || k >= g.steps())
        throw std::invalid_argument("assemble_step: time index must lie in [1, steps)");
    const int nsp = g.space_count();
    const int n = g.dim();
    const double inv_dt = 1.0 / g.dt();

    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(static_cast<std::size_t>(nsp) * (n == 1 ? 3 : 9));
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(nsp);

    for (int s = 0; s < nsp; ++s) {
        if (g.space_on_boundary(s)) {
            trip.emplace_back(s, s, 1.0);
            continue;  // rhs stays 0
        }
        const int node = g.index(s, k);
        double diag = inv_dt - p.b(node);
        for (int i = 0; i < n; ++i) {
            const double hi = g.spacing(i);
            const int stride_i = i == 0 ? 1 : g.nodes(0);
            const double aii = p.A(node, i * n + i);
            diag += 2.0 * aii / (hi * hi);
            const double ci = p.c(node, i);
            trip.emplace_back(s, s + stride_i, -aii / (hi * hi) - ci / (2.0 * hi));
            trip.emplace_back(s, s - stride_i, -aii / (hi * hi) + ci / (2.0 * hi));
            for (int j = 0; j < n; ++j) {
                if (j == i) continue;
                const int stride_j = j == 0 ? 1 : g.nodes(0);
                const double w = p.A(node, i * n + j) / (4.0 * hi * g.spacing(j));
                trip.emplace_back(s, s + stride_i + stride_j, -w);
                trip.emplace_back(s, s - stride_i - stride_j, -w);
                trip.emplace_back(s, s + stride_i - stride_j, w);
                trip.emplace_back(s, s - stride_i + stride_j, w);
            }
        }
        trip.emplace_back(s, s, diag);
        rhs(s) = p.g(node) + prev(s) * inv_dt;
    }

    StepSystem sys;
    sys.matrix.resize(nsp, nsp);
    sys.matrix.setFromTriplets(trip.begin(), trip.end());
    sys.rhs = std::move(rhs);
    return sys;
}

SpaceTimeField solve_linear_parabolic(const LinearParabolicProblem& p) {
    const Grid& g = *p.grid;
    const int nsp = g.space_count();
    SpaceTimeField v(p.grid);

    Eigen::VectorXd prev = Eigen::VectorXd::Zero(nsp);  // zero initial data
    for (int k = 1; k < g.steps(); ++k) {
        StepSystem sys = assemble_step(p, k, prev);
        sys.matrix.makeCompressed();
        Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
        lu.compute(sys.matrix);
        if (lu.info() != Eigen::Success)
            throw LinearSolveError("singular or ill-conditioned step system at time index " +
                                       std::to_string(k),
                                   k);
        Eigen::VectorXd x = lu.solve(sys.rhs);
        const double denom = std::max(sys.rhs.norm(), 1e-300);
        const double rel = (sys.matrix * x - sys.rhs).norm() / denom;
        if (!(rel <= 1e-12))
            throw LinearSolveError("step solve at time index " + std::to_string(k) +
                                       " reached relative residual " + format_double(rel) +
                                       " (limit 1e-12)",
                                   k);
        // Dirichlet rows must come back exactly zero, not at LU roundoff:
        // Newton iterates inherit their boundary values from these solves.
        for (int s = 0; s < nsp; ++s)
            if (g.space_on_boundary(s)) x(s) = 0.0;
        for (int s = 0; s < nsp; ++s) v(g.index(s, k)) = x(s);
        prev = std::move(x);
    }
    return v;
}

SpaceTimeField apply_linear_operator(const LinearParabolicProblem& p, const SpaceTimeField& v) {
    const Grid& g = *p.grid;
    if (v.grid().node_count() != g.node_count())
        throw std::invalid_argument("apply_linear_operator: field does not conform");
    const int n = g.dim();
    SpaceTimeField out(v.grid_ptr());
    const SpaceTimeField dt_v = diff_t(v);
    std::vector<SpaceTimeField> d1;
    for (int i = 0; i < n; ++i) d1.push_back(diff_x(v, i));
    std::vector<SpaceTimeField> d2;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) d2.push_back(diff_xx(v, i, j));

    for (int node = 0; node < g.node_count(); ++node) {
        if (g.classify(node) != NodeClass::Interior) continue;
        double acc = dt_v(node) - p.b(node) * v(node);
        for (int i = 0; i < n; ++i) {
            acc -= p.c(node, i) * d1[static_cast<std::size_t>(i)](node);
            for (int j = 0; j < n; ++j)
                acc -= p.A(node, i * n + j) * d2[static_cast<std::size_t>(i * n + j)](node);
        }
        out(node) = acc;
    }
    return out;
}

}  // namespace parnewt
