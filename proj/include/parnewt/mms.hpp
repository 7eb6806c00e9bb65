#pragma once

#include <string>
#include <vector>

#include "parnewt/coeff.hpp"
#include "parnewt/newton.hpp"

namespace parnewt {

/// A problem whose exact solution is known by construction: the source
/// g = D_t u_e − a^{ij}(x,t,u_e,Du_e) D_ij u_e − f_base(x,t,u_e,Du_e) is
/// sampled at the nodes (exact symbolic derivatives of u_exact, never finite
/// differences) and carried on the coefficient set, so u_exact solves
/// D_t u − a^{ij}(u) D_ij u = f_base(u) + g.
struct ManufacturedProblem {
    CoefficientSet set;
    SpaceTimeField u_exact;
    CoefficientFn u_exact_fn;
};

/// u_exact must depend on (x,t) only, contain no kinked primitives, and
/// vanish on the parabolic boundary (checked to 1e-14).
ManufacturedProblem manufacture(const CoefficientFn& u_exact, const CoefficientSet& base,
                                GridPtr grid);

enum class TimeRefinement {
    QuadraticInH,  // dt ∝ h² (isolates the spatial order)
    LinearInH,     // dt ∝ h  (exposes the backward-Euler temporal order)
};

struct OrderTable {
    struct Row {
        double h;
        double dt;
        double err_lp;
        double err_w1inf;
        double err_w21p;  // interior surrogate
    };
    std::vector<Row> rows;
    double order_lp = 0.0;
    double order_w1inf = 0.0;
    double order_w21p = 0.0;
};

/// Solves the manufactured problem on `levels` grids refined by 2x from the
/// base parameters and fits error orders against h. Aborts (AnalysisError via
/// std::runtime_error) when Newton fails on any grid.
OrderTable convergence_study(const CoefficientFn& u_exact, const CoefficientSet& base,
                             int dim, std::array<double, 2> extent, std::array<int, 2> base_nodes,
                             double horizon, int base_steps, int levels, TimeRefinement refinement,
                             const NewtonOptions& opts = {});

/// Columns grid_h,dt,err_lp,err_w1inf,err_w21p plus a footer row labeled
/// "order" carrying the fitted orders.
void write_order_csv(const OrderTable& table, const std::string& path);

}  // namespace parnewt
