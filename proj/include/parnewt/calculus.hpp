#pragma once

#include "parnewt/field.hpp"

namespace parnewt {

/// First spatial derivative along `axis`: central differences at interior
/// nodes, second-order one-sided stencils at spatial boundary nodes.
SpaceTimeField diff_x(const SpaceTimeField& u, int axis);

/// Second derivative D_ij. For i == j the 3-point stencil (one-sided fallback
/// at spatial boundaries); for i != j the 4-point cross stencil, realized as
/// diff_x(diff_x(u, j), i) so that boundary handling is inherited.
SpaceTimeField diff_xx(const SpaceTimeField& u, int i, int j);

/// Backward difference in t at steps >= 1; forward difference at the initial
/// slice (diagnostic only, the solver never reads it there).
SpaceTimeField diff_t(const SpaceTimeField& u);

/// Pointwise Euclidean magnitude of the spatial gradient.
SpaceTimeField gradient_magnitude(const SpaceTimeField& u);
/// Pointwise Frobenius magnitude of the spatial Hessian.
SpaceTimeField hessian_magnitude(const SpaceTimeField& u);

/// (∫_Q |u|^p)^{1/p} with trapezoidal weights in every axis. Requires p >= 1.
double lp_norm(const SpaceTimeField& u, double p);
/// Same sum restricted to interior nodes (used by convergence studies, where
/// one-sided boundary stencils would pollute the measured order).
double lp_norm_interior(const SpaceTimeField& u, double p);

double sup_norm(const SpaceTimeField& u);

/// ||u||_inf + || |Du| ||_inf.
double w1inf_norm(const SpaceTimeField& u);

/// ||u||_p + || |Du| ||_p + || |D^2 u| ||_p + ||D_t u||_p, the last term
/// integrated over the slabs t > 0 (the t = 0 slice is excluded).
double w21p_norm(const SpaceTimeField& u, double p);
double w21p_norm_interior(const SpaceTimeField& u, double p);

/// omega^x_u(r): sup over time slices of sup over node pairs with |y-z| < r
/// of |u(y,t) - u(z,t)|.
double x_continuity_modulus(const SpaceTimeField& u, double r);

/// max over time pairs s != s' of ||u(.,s) - u(.,s')||_{C^1} / |s-s'|^{alpha/2},
/// with the slice C^1 norm sup|u| + sup|Du|. Requires 0 < alpha <= 1.
double holder_quotient(const SpaceTimeField& u, double alpha);

/// The embedding exponent 1 - (n+2)/p (positive exactly when p > n+2).
double default_holder_exponent(int dim, double p);

namespace detail {
/// Trapezoid weight of a spatial node (product over axes of h_a, halved at
/// domain-boundary indices).
double space_weight(const Grid& g, int space);
/// Trapezoid weight of a time level.
double time_weight(const Grid& g, int step);
}  // namespace detail

}  // namespace parnewt
