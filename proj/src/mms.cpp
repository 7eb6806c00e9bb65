#include "parnewt/mms.hpp"

#include <cmath>

#include "parnewt/calculus.hpp"
#include "parnewt/csv.hpp"

namespace parnewt {

namespace {

double eval_xt(const expr::NodePtr& tree, const std::array<double, 2>& x, double t) {
    expr::EvalPoint p;
    p.x = x;
    p.t = t;
    return expr::evaluate(tree, p);
}

double fit_order(const std::vector<double>& h, const std::vector<double>& err) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int m = 0;
    for (std::size_t i = 0; i < h.size(); ++i) {
        if (!(err[i] > 0.0)) continue;  // rounding-level errors carry no order information
        const double x = std::log(h[i]);
        const double y = std::log(err[i]);
        sx += x; sy += y; sxx += x * x; sxy += x * y;
        ++m;
    }
    if (m < 2) return 0.0;
    return (m * sxy - sx * sy) / (m * sxx - sx * sx);
}

}  // namespace

ManufacturedProblem manufacture(const CoefficientFn& u_exact, const CoefficientSet& base,
                                GridPtr grid) {
    using expr::Var;
    const int n = base.dim;
    if (expr::depends_on(u_exact.tree(), Var::U) || expr::depends_on(u_exact.tree(), Var::Xi1) ||
        expr::depends_on(u_exact.tree(), Var::Xi2))
        throw std::invalid_argument("manufacture: u_exact must depend on (x,t) only");
    if (expr::has_kinked_primitive(u_exact.tree()))
        throw std::invalid_argument(
            "manufacture: u_exact contains a non-differentiable primitive (abs/sign/min/max)");

    // exact jets of u_exact
    const expr::NodePtr dt_tree = expr::differentiate(u_exact.tree(), Var::T);
    std::array<expr::NodePtr, 2> dx_tree;
    std::array<std::array<expr::NodePtr, 2>, 2> dxx_tree;
    for (int i = 0; i < n; ++i) {
        const Var vi = i == 0 ? Var::X1 : Var::X2;
        dx_tree[i] = expr::differentiate(u_exact.tree(), vi);
        for (int j = 0; j < n; ++j)
            dxx_tree[i][j] = expr::differentiate(dx_tree[i], j == 0 ? Var::X1 : Var::X2);
    }

    const Grid& g = *grid;
    SpaceTimeField u_samples(grid);
    SpaceTimeField source(grid);
    for (int node = 0; node < g.node_count(); ++node) {
        const auto x = g.space_coords(g.space_of(node));
        const double t = g.time(g.step_of(node));
        const double uv = eval_xt(u_exact.tree(), x, t);
        u_samples(node) = uv;

        std::array<double, 2> xi{eval_xt(dx_tree[0], x, t), n > 1 ? eval_xt(dx_tree[1], x, t) : 0.0};
        double acc = eval_xt(dt_tree, x, t);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                acc -= base.a_at(i, j).value(x, t, uv, xi) * eval_xt(dxx_tree[i][j], x, t);
        acc -= base.f.value(x, t, uv, xi);
        source(node) = acc;
    }

    const double bmax = u_samples.boundary_max_abs();
    if (bmax > 1e-14)
        throw std::invalid_argument("manufacture: u_exact violates the boundary condition, max |u| = " +
                                    format_double(bmax) + " on the parabolic boundary");

    ManufacturedProblem mp{base, std::move(u_samples), u_exact};
    mp.set.source = std::move(source);
    return mp;
}

OrderTable convergence_study(const CoefficientFn& u_exact, const CoefficientSet& base,
                             int dim, std::array<double, 2> extent, std::array<int, 2> base_nodes,
                             double horizon, int base_steps, int levels, TimeRefinement refinement,
                             const NewtonOptions& opts) {
    if (levels < 3) throw std::invalid_argument("convergence_study: need at least 3 grids");

    OrderTable table;
    std::vector<double> hs, e_lp, e_w1inf, e_w21p;
    const double dt0 = horizon / (base_steps - 1);
    for (int level = 0; level < levels; ++level) {
        const int factor = 1 << level;
        std::array<int, 2> nodes{(base_nodes[0] - 1) * factor + 1,
                                 dim > 1 ? (base_nodes[1] - 1) * factor + 1 : 1};
        const double dt = refinement == TimeRefinement::LinearInH
                              ? dt0 / factor
                              : dt0 / (static_cast<double>(factor) * factor);
        const int steps = static_cast<int>(std::lround(horizon / dt)) + 1;

        GridPtr grid = build_grid(dim, extent, nodes, horizon, steps);
        ManufacturedProblem mp = manufacture(u_exact, base, grid);
        NewtonResult run = newton_solve(mp.set, SpaceTimeField(grid), opts);
        if (!run.converged())
            throw std::runtime_error("convergence_study: Newton failed on grid h=" +
                                     format_double(grid->spacing(0)) + " (" +
                                     outcome_name(run.outcome) + ")");

        const SpaceTimeField err = run.solution - mp.u_exact;
        OrderTable::Row row;
        row.h = grid->spacing(0);
        row.dt = grid->dt();
        row.err_lp = lp_norm(err, base.p);
        row.err_w1inf = w1inf_norm(err);
        row.err_w21p = w21p_norm_interior(err, base.p);
        table.rows.push_back(row);
        hs.push_back(row.h);
        e_lp.push_back(row.err_lp);
        e_w1inf.push_back(row.err_w1inf);
        e_w21p.push_back(row.err_w21p);
    }
    table.order_lp = fit_order(hs, e_lp);
    table.order_w1inf = fit_order(hs, e_w1inf);
    table.order_w21p = fit_order(hs, e_w21p);
    return table;
}

void write_order_csv(const OrderTable& table, const std::string& path) {
    CsvWriter csv(path);
    csv.header({"grid_h", "dt", "err_lp", "err_w1inf", "err_w21p"});
    for (const auto& r : table.rows) csv.row({r.h, r.dt, r.err_lp, r.err_w1inf, r.err_w21p});
    csv.row({std::string("order"), std::string("nan"), table.order_lp, table.order_w1inf,
             table.order_w21p});
}

}  // namespace parnewt
