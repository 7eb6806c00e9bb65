#include "parnewt/coeff.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "parnewt/calculus.hpp"
#include "parnewt/csv.hpp"
#include "parnewt/sampling.hpp"

namespace parnewt {

CoefficientFn CoefficientFn::from_tree(expr::NodePtr tree, int dim) {
    CoefficientFn fn;
    fn.dim_ = dim;
    fn.tree_ = std::move(tree);
    fn.du_ = expr::differentiate(fn.tree_, expr::Var::U);
    fn.dxi_[0] = expr::differentiate(fn.tree_, expr::Var::Xi1);
    fn.dxi_[1] = dim > 1 ? expr::differentiate(fn.tree_, expr::Var::Xi2) : expr::constant(0.0);
    return fn;
}

CoefficientFn parse_coefficient(const std::string& text, int dim) {
    return CoefficientFn::from_tree(expr::parse(text, dim), dim);
}

bool CoefficientFn::state_independent() const {
    using expr::Var;
    return !expr::depends_on(tree_, Var::U) && !expr::depends_on(tree_, Var::Xi1) &&
           !expr::depends_on(tree_, Var::Xi2);
}

bool CoefficientFn::x_independent() const {
    using expr::Var;
    return !expr::depends_on(tree_, Var::X1) && !expr::depends_on(tree_, Var::X2);
}

double CoefficientFn::value(const std::array<double, 2>& x, double t, double u,
                            const std::array<double, 2>& xi) const {
    return expr::evaluate(tree_, {x, t, u, xi});
}

CoefficientFn::Partials CoefficientFn::partials(const std::array<double, 2>& x, double t,
                                                double u, const std::array<double, 2>& xi) const {
    const expr::EvalPoint p{x, t, u, xi};
    Partials out;
    out.du = expr::evaluate(du_, p);
    out.dxi[0] = expr::evaluate(dxi_[0], p);
    if (dim_ > 1) out.dxi[1] = expr::evaluate(dxi_[1], p);
    return out;
}

CoefficientSet::CoefficientSet(int d, std::vector<CoefficientFn> a_in, CoefficientFn f_in,
                               double lambda_in, double p_in)
    : dim(d), a(std::move(a_in)), f(std::move(f_in)), lambda(lambda_in), p(p_in) {
    if (dim != 1 && dim != 2) throw std::invalid_argument("coefficient set: dim must be 1 or 2");
    if (a.size() != static_cast<std::size_t>(dim * dim))
        throw std::invalid_argument("coefficient set: expected dim*dim principal coefficients");
    if (!(lambda > 0.0))
        throw std::invalid_argument("coefficient set: ellipticity constant lambda must be positive");
    if (!(p > dim + 2))
        throw std::invalid_argument("coefficient set: p must exceed n+2 = " +
                                    std::to_string(dim + 2) + ", got " + format_double(p));
}

CompactBox CompactBox::symmetric(int dim, double m, int density) {
    CompactBox box;
    box.u_min = -m;
    box.u_max = m;
    for (int l = 0; l < 2; ++l) {
        box.xi_min[l] = l < dim ? -m : 0.0;
        box.xi_max[l] = l < dim ? m : 0.0;
    }
    box.density = density;
    return box;
}

namespace {

std::string node_location(const Grid& g, int node) {
    const auto x = g.space_coords(g.space_of(node));
    std::string s = "x1=" + format_double(x[0]);
    if (g.dim() > 1) s += ", x2=" + format_double(x[1]);
    s += ", t=" + format_double(g.time(g.step_of(node)));
    return s;
}

}  // namespace

SpaceTimeField sample_composition(const CoefficientFn& fn, const SpaceTimeField& u) {
    const Grid& g = u.grid();
    SpaceTimeField out(u.grid_ptr());
    const SpaceTimeField d0 = diff_x(u, 0);
    const SpaceTimeField d1 = g.dim() > 1 ? diff_x(u, 1) : SpaceTimeField(u.grid_ptr());
    for (int node = 0; node < g.node_count(); ++node) {
        const auto x = g.space_coords(g.space_of(node));
        const double t = g.time(g.step_of(node));
        const std::array<double, 2> xi{d0(node), g.dim() > 1 ? d1(node) : 0.0};
        try {
            out(node) = fn.value(x, t, u(node), xi);
        } catch (const expr::EvalError& e) {
            throw CoefficientDomainError(std::string(e.what()) + " (at node " +
                                         node_location(g, node) + ")");
        }
    }
    return out;
}

EllipticityReport check_ellipticity(const CoefficientSet& set, const SpaceTimeField& u0,
                                    int extra_directions, std::uint64_t seed) {
    const Grid& g = u0.grid();
    const int n = set.dim;
    EllipticityReport rep;
    rep.min_lower_margin = std::numeric_limits<double>::infinity();
    rep.min_upper_margin = std::numeric_limits<double>::infinity();

    // coefficient samples along u0
    std::vector<SpaceTimeField> aij;
    aij.reserve(static_cast<std::size_t>(n * n));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) aij.push_back(sample_composition(set.a_at(i, j), u0));

    if (n == 2) {
        for (int node = 0; node < g.node_count(); ++node)
            rep.max_asymmetry = std::max(rep.max_asymmetry, std::abs(aij[1](node) - aij[2](node)));
        const double scale = 1.0 + std::max(sup_norm(aij[0]), sup_norm(aij[3]));
        rep.symmetric = rep.max_asymmetry <= 1e-9 * scale;
    }

    std::mt19937_64 rng(seed);
    const auto dirs = sampling::unit_directions(n, extra_directions, rng);
    const double inv_lambda = 1.0 / set.lambda;

    for (int node = 0; node < g.node_count(); ++node) {
        for (const auto& eta : dirs) {
            double q = 0.0;
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) q += aij[static_cast<std::size_t>(i * n + j)](node) * eta[i] * eta[j];
            const double lower = q - inv_lambda;
            const double upper = set.lambda - q;
            if (std::min(lower, upper) < std::min(rep.min_lower_margin, rep.min_upper_margin)) {
                rep.worst_node = node;
                rep.worst_x = g.space_coords(g.space_of(node));
                rep.worst_t = g.time(g.step_of(node));
            }
            rep.min_lower_margin = std::min(rep.min_lower_margin, lower);
            rep.min_upper_margin = std::min(rep.min_upper_margin, upper);
        }
    }
    return rep;
}

namespace {

struct BoxLattice {
    std::vector<double> u;
    std::array<std::vector<double>, 2> xi;
};

BoxLattice box_lattice(const CompactBox& box, int dim, std::mt19937_64& rng) {
    BoxLattice lat;
    lat.u = sampling::axis_samples(box.u_min, box.u_max, box.density, rng);
    for (int l = 0; l < 2; ++l)
        lat.xi[l] = l < dim ? sampling::axis_samples(box.xi_min[l], box.xi_max[l], box.density, rng)
                            : std::vector<double>{0.0};
    return lat;
}

struct XtSample {
    std::array<double, 2> x;
    double t;
};

std::vector<XtSample> xt_samples(const Grid& grid, int max_count) {
    std::vector<XtSample> out;
    for (int node : sampling::node_subsample(grid, max_count))
        out.push_back({grid.space_coords(grid.space_of(node)), grid.time(grid.step_of(node))});
    return out;
}

}  // namespace

double c1_norm(const CoefficientFn& fn, const CompactBox& box, const Grid& grid,
               std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    const BoxLattice lat = box_lattice(box, fn.dim(), rng);
    const auto xts = xt_samples(grid, 256);

    double best = 0.0;
    for (double u : lat.u) {
        for (double xi1 : lat.xi[0]) {
            for (double xi2 : lat.xi[1]) {
                const std::array<double, 2> xi{xi1, xi2};
                for (const auto& s : xts) {
                    const double v = std::abs(fn.value(s.x, s.t, u, xi));
                    const auto d = fn.partials(s.x, s.t, u, xi);
                    double total = v + std::abs(d.du) + std::abs(d.dxi[0]);
                    if (fn.dim() > 1) total += std::abs(d.dxi[1]);
                    best = std::max(best, total);
                }
            }
        }
    }
    return best;
}

double lipschitz_estimate(const CoefficientFn& fn, const CompactBox& box, const Grid& grid,
                          LipschitzVary vary, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    const BoxLattice lat = box_lattice(box, fn.dim(), rng);
    const auto xts = xt_samples(grid, 64);

    struct Point {
        double u;
        std::array<double, 2> xi;
    };
    std::vector<Point> pts;
    for (double u : lat.u)
        for (double xi1 : lat.xi[0])
            for (double xi2 : lat.xi[1]) pts.push_back({u, {xi1, xi2}});

    const auto quotient = [&](const Point& a, const Point& b) -> double {
        const double du = std::abs(a.u - b.u);
        const double dxi1 = std::abs(a.xi[0] - b.xi[0]);
        const double dxi2 = std::abs(a.xi[1] - b.xi[1]);
        double denom = 0.0;
        switch (vary) {
            case LipschitzVary::UAndXi:
                denom = du + std::hypot(a.xi[0] - b.xi[0], a.xi[1] - b.xi[1]);
                break;
            case LipschitzVary::XiOnly:
                if (du != 0.0) return 0.0;
                denom = dxi1 + dxi2;
                break;
            case LipschitzVary::UOnly:
                if (dxi1 != 0.0 || dxi2 != 0.0) return 0.0;
                denom = du;
                break;
        }
        if (denom <= 0.0) return 0.0;
        double diff = 0.0;
        for (const auto& s : xts)
            diff = std::max(diff, std::abs(fn.value(s.x, s.t, a.u, a.xi) -
                                           fn.value(s.x, s.t, b.u, b.xi)));
        return diff / denom;
    };

    double best = 0.0;
    for (std::size_t i = 0; i < pts.size(); ++i)
        for (std::size_t j = i + 1; j < pts.size(); ++j)
            best = std::max(best, quotient(pts[i], pts[j]));

    // Micro-gap pairs along each varying axis: the sup of the difference
    // quotient of a smooth function is approached on the diagonal, which
    // wide lattice pairs miss.
    const double du_step = 1e-6 * std::max(box.u_max - box.u_min, 1e-6);
    const std::array<double, 2> dxi_step{
        1e-6 * std::max(box.xi_max[0] - box.xi_min[0], 1e-6),
        1e-6 * std::max(box.xi_max[1] - box.xi_min[1], 1e-6)};
    for (const Point& a : pts) {
        if (vary != LipschitzVary::XiOnly) {
            Point b = a;
            b.u += (a.u + du_step <= box.u_max ? du_step : -du_step);
            best = std::max(best, quotient(a, b));
        }
        if (vary != LipschitzVary::UOnly) {
            for (int l = 0; l < fn.dim(); ++l) {
                Point b = a;
                b.xi[l] += (a.xi[l] + dxi_step[l] <= box.xi_max[l] ? dxi_step[l] : -dxi_step[l]);
                best = std::max(best, quotient(a, b));
            }
        }
    }
    return best;
}

double c11_constant(const CoefficientFn& fn, const CompactBox& box, const Grid& grid,
                    std::uint64_t seed) {
    double total = lipschitz_estimate(fn, box, grid, LipschitzVary::UAndXi, seed);
    total += lipschitz_estimate(CoefficientFn::from_tree(fn.du_tree(), fn.dim()), box, grid,
                                LipschitzVary::UAndXi, seed);
    for (int l = 0; l < fn.dim(); ++l)
        total += lipschitz_estimate(CoefficientFn::from_tree(fn.dxi_tree(l), fn.dim()), box, grid,
                                    LipschitzVary::UAndXi, seed);
    return total;
}

double MuTable::operator()(double gap) const {
    if (eta.empty() || gap <= 0.0) return 0.0;
    if (gap >= eta.back()) return value.back();
    // first bin boundary >= gap; linear between (previous, this)
    auto it = std::lower_bound(eta.begin(), eta.end(), gap);
    const std::size_t hi = static_cast<std::size_t>(it - eta.begin());
    const double e1 = eta[hi], v1 = value[hi];
    const double e0 = hi == 0 ? 0.0 : eta[hi - 1];
    const double v0 = hi == 0 ? 0.0 : value[hi - 1];
    return e1 == e0 ? v1 : v0 + (v1 - v0) * (gap - e0) / (e1 - e0);
}

MuTable mu_table(const CoefficientFn& fn, const CompactBox& box, const Grid& grid, int bins,
                 std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    const BoxLattice lat = box_lattice(box, fn.dim(), rng);
    const auto xts = xt_samples(grid, 64);

    const double span = box.u_max - box.u_min;
    MuTable table;
    table.eta.resize(static_cast<std::size_t>(bins));
    table.value.assign(static_cast<std::size_t>(bins), 0.0);
    for (int b = 0; b < bins; ++b) table.eta[static_cast<std::size_t>(b)] = span * (b + 1) / bins;
    if (span <= 0.0) return table;

    const auto pair_diff = [&](double ua, double ub, const std::array<double, 2>& xi) {
        double diff = 0.0;
        for (const auto& s : xts)
            diff = std::max(diff, std::abs(fn.value(s.x, s.t, ua, xi) - fn.value(s.x, s.t, ub, xi)));
        return diff;
    };

    for (double xi1 : lat.xi[0]) {
        for (double xi2 : lat.xi[1]) {
            const std::array<double, 2> xi{xi1, xi2};
            // lattice pairs land in their gap's bin
            for (std::size_t i = 0; i < lat.u.size(); ++i) {
                for (std::size_t j = i + 1; j < lat.u.size(); ++j) {
                    const double gap = std::abs(lat.u[i] - lat.u[j]);
                    if (gap == 0.0) continue;
                    std::size_t bin = static_cast<std::size_t>(std::ceil(gap / span * bins)) - 1;
                    bin = std::min(bin, static_cast<std::size_t>(bins - 1));
                    table.value[bin] = std::max(table.value[bin], pair_diff(lat.u[i], lat.u[j], xi));
                }
            }
            // every bin also gets pairs at exactly its gap, so small-eta bins
            // are never left empty by a coarse lattice
            for (int b = 0; b < bins; ++b) {
                const double gap = table.eta[static_cast<std::size_t>(b)];
                for (double ua : lat.u) {
                    const double ub = ua + gap <= box.u_max ? ua + gap : ua - gap;
                    if (ub < box.u_min || ub > box.u_max) continue;
                    table.value[static_cast<std::size_t>(b)] =
                        std::max(table.value[static_cast<std::size_t>(b)], pair_diff(ua, ub, xi));
                }
            }
        }
    }
    // nondecreasing by construction of the bound: a pair with gap g also
    // witnesses every eta >= g
    for (std::size_t b = 1; b < table.value.size(); ++b)
        table.value[b] = std::max(table.value[b], table.value[b - 1]);
    return table;
}

}  // namespace parnewt
