#include "parnewt/calculus.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace parnewt {

namespace detail {

double space_weight(const Grid& g, int space) {
    const auto m = g.space_multi_index(space);
    double w = 1.0;
    for (int a = 0; a < g.dim(); ++a) {
        const bool edge = (m[a] == 0 || m[a] == g.nodes(a) - 1);
        w *= g.spacing(a) * (edge ? 0.5 : 1.0);
    }
    return w;
}

double time_weight(const Grid& g, int step) {
    const bool edge = (step == 0 || step == g.steps() - 1);
    return g.dt() * (edge ? 0.5 : 1.0);
}

namespace {

// Weighted p-sum helpers shared by the norm implementations.
enum class TimeRule { Trapezoid, SlabFromOne };  // SlabFromOne: weight dt for k>=1, 0 at k=0

double weighted_p_sum(const SpaceTimeField& u, double p, TimeRule rule, bool interior_only) {
    const Grid& g = u.grid();
    double acc = 0.0;
    for (int k = 0; k < g.steps(); ++k) {
        const double wt = rule == TimeRule::Trapezoid ? time_weight(g, k)
                                                      : (k >= 1 ? g.dt() : 0.0);
        if (wt == 0.0) continue;
        for (int s = 0; s < g.space_count(); ++s) {
            if (interior_only && g.classify(s, k) != NodeClass::Interior) continue;
            acc += wt * space_weight(g, s) * std::pow(std::abs(u.at(s, k)), p);
        }
    }
    return acc;
}

void check_p(double p) {
    if (!(p >= 1.0)) throw std::invalid_argument("norm: p must satisfy p >= 1, got " + std::to_string(p));
}

}  // namespace
}  // namespace detail

SpaceTimeField diff_x(const SpaceTimeField& u, int axis) {
    const Grid& g = u.grid();
    if (axis < 0 || axis >= g.dim())
        throw std::invalid_argument("diff_x: axis out of range");
    SpaceTimeField out(u.grid_ptr());
    const double h = g.spacing(axis);
    const int n = g.nodes(axis);
    // stride of one index step along `axis` in the flat spatial index
    const int stride = axis == 0 ? 1 : g.nodes(0);
    for (int k = 0; k < g.steps(); ++k) {
        for (int s = 0; s < g.space_count(); ++s) {
            const int i = g.space_multi_index(s)[axis];
            const int node = g.index(s, k);
            if (i == 0)
                out(node) = (-3.0 * u(node) + 4.0 * u(node + stride) - u(node + 2 * stride)) / (2.0 * h);
            else if (i == n - 1)
                out(node) = (3.0 * u(node) - 4.0 * u(node - stride) + u(node - 2 * stride)) / (2.0 * h);
            else
                out(node) = (u(node + stride) - u(node - stride)) / (2.0 * h);
        }
    }
    return out;
}

SpaceTimeField diff_xx(const SpaceTimeField& u, int i, int j) {
    const Grid& g = u.grid();
    if (i < 0 || i >= g.dim() || j < 0 || j >= g.dim())
        throw std::invalid_argument("diff_xx: axis out of range");
    if (i != j) return diff_x(diff_x(u, j), i);

    SpaceTimeField out(u.grid_ptr());
    const double h2 = g.spacing(i) * g.spacing(i);
    const int n = g.nodes(i);
    const int stride = i == 0 ? 1 : g.nodes(0);
    for (int k = 0; k < g.steps(); ++k) {
        for (int s = 0; s < g.space_count(); ++s) {
            const int ia = g.space_multi_index(s)[i];
            const int node = g.index(s, k);
            if (ia >= 1 && ia <= n - 2) {
                out(node) = (u(node - stride) - 2.0 * u(node) + u(node + stride)) / h2;
            } else if (n >= 4) {
                // second-order one-sided second difference
                const int d = ia == 0 ? stride : -stride;
                out(node) = (2.0 * u(node) - 5.0 * u(node + d) + 4.0 * u(node + 2 * d) - u(node + 3 * d)) / h2;
            } else {
                // 3-node axis: only the first-order one-sided stencil exists
                const int d = ia == 0 ? stride : -stride;
                out(node) = (u(node) - 2.0 * u(node + d) + u(node + 2 * d)) / h2;
            }
        }
    }
    return out;
}

SpaceTimeField diff_t(const SpaceTimeField& u) {
    const Grid& g = u.grid();
    SpaceTimeField out(u.grid_ptr());
    const double dt = g.dt();
    const int nsp = g.space_count();
    for (int k = 0; k < g.steps(); ++k) {
        for (int s = 0; s < nsp; ++s) {
            const int node = g.index(s, k);
            out(node) = k == 0 ? (u(node + nsp) - u(node)) / dt
                               : (u(node) - u(node - nsp)) / dt;
        }
    }
    return out;
}

SpaceTimeField gradient_magnitude(const SpaceTimeField& u) {
    const Grid& g = u.grid();
    SpaceTimeField d0 = diff_x(u, 0);
    if (g.dim() == 1) {
        d0.values() = d0.values().abs();
        return d0;
    }
    SpaceTimeField d1 = diff_x(u, 1);
    d0.values() = (d0.values().square() + d1.values().square()).sqrt();
    return d0;
}

SpaceTimeField hessian_magnitude(const SpaceTimeField& u) {
    const Grid& g = u.grid();
    SpaceTimeField acc(u.grid_ptr());
    for (int i = 0; i < g.dim(); ++i)
        for (int j = 0; j < g.dim(); ++j)
            acc.values() += diff_xx(u, i, j).values().square();
    acc.values() = acc.values().sqrt();
    return acc;
}

double lp_norm(const SpaceTimeField& u, double p) {
    detail::check_p(p);
    return std::pow(detail::weighted_p_sum(u, p, detail::TimeRule::Trapezoid, false), 1.0 / p);
}

double lp_norm_interior(const SpaceTimeField& u, double p) {
    detail::check_p(p);
    return std::pow(detail::weighted_p_sum(u, p, detail::TimeRule::Trapezoid, true), 1.0 / p);
}

double sup_norm(const SpaceTimeField& u) { return u.values().abs().maxCoeff(); }

double w1inf_norm(const SpaceTimeField& u) {
    return sup_norm(u) + sup_norm(gradient_magnitude(u));
}

namespace {

double w21p_impl(const SpaceTimeField& u, double p, bool interior) {
    using parnewt::detail::TimeRule;
    using parnewt::detail::weighted_p_sum;
    const auto norm_of = [&](const SpaceTimeField& f, TimeRule rule) {
        return std::pow(weighted_p_sum(f, p, rule, interior), 1.0 / p);
    };
    double total = norm_of(u, TimeRule::Trapezoid);
    total += norm_of(gradient_magnitude(u), TimeRule::Trapezoid);
    total += norm_of(hessian_magnitude(u), TimeRule::Trapezoid);
    total += norm_of(diff_t(u), TimeRule::SlabFromOne);
    return total;
}

}  // namespace

double w21p_norm(const SpaceTimeField& u, double p) {
    if (!(p > 1.0)) throw std::invalid_argument("w21p_norm: requires p > 1");
    return w21p_impl(u, p, false);
}

double w21p_norm_interior(const SpaceTimeField& u, double p) {
    if (!(p > 1.0)) throw std::invalid_argument("w21p_norm: requires p > 1");
    return w21p_impl(u, p, true);
}

double x_continuity_modulus(const SpaceTimeField& u, double r) {
    const Grid& g = u.grid();
    double best = 0.0;
    const int nsp = g.space_count();
    for (int k = 0; k < g.steps(); ++k) {
        for (int a = 0; a < nsp; ++a) {
            const auto xa = g.space_coords(a);
            const double va = u.at(a, k);
            for (int b = a + 1; b < nsp; ++b) {
                const auto xb = g.space_coords(b);
                const double d = std::hypot(xa[0] - xb[0], xa[1] - xb[1]);
                if (d < r) best = std::max(best, std::abs(va - u.at(b, k)));
            }
        }
    }
    return best;
}

double holder_quotient(const SpaceTimeField& u, double alpha) {
    if (!(alpha > 0.0) || alpha > 1.0)
        throw std::invalid_argument("holder_quotient: requires 0 < alpha <= 1");
    const Grid& g = u.grid();
    const SpaceTimeField d0 = diff_x(u, 0);
    const SpaceTimeField d1 = g.dim() > 1 ? diff_x(u, 1) : SpaceTimeField(u.grid_ptr());
    const int nsp = g.space_count();

    // slice C^1 norms of pairwise differences, gradient compared componentwise
    double best = 0.0;
    for (int k1 = 0; k1 < g.steps(); ++k1) {
        for (int k2 = k1 + 1; k2 < g.steps(); ++k2) {
            double sup_u = 0.0, sup_du = 0.0;
            for (int s = 0; s < nsp; ++s) {
                sup_u = std::max(sup_u, std::abs(u.at(s, k1) - u.at(s, k2)));
                const double g0 = d0.at(s, k1) - d0.at(s, k2);
                const double g1 = d1.at(s, k1) - d1.at(s, k2);
                sup_du = std::max(sup_du, std::hypot(g0, g1));
            }
            const double gap = g.time(k2) - g.time(k1);
            best = std::max(best, (sup_u + sup_du) / std::pow(gap, alpha / 2.0));
        }
    }
    return best;
}

double default_holder_exponent(int dim, double p) { return 1.0 - (dim + 2.0) / p; }

}  // namespace parnewt
