#include "parnewt/perturb.hpp"

#include <cmath>

#include "parnewt/calculus.hpp"
#include "parnewt/csv.hpp"

namespace parnewt {

Perturbation zero_perturbation(int dim) {
    Perturbation p;
    for (int i = 0; i < dim * dim; ++i) p.a_tilde.push_back(parse_coefficient("0", dim));
    p.f_tilde = parse_coefficient("0", dim);
    return p;
}

CoefficientSet perturbed_set(const CoefficientSet& base, const Perturbation& pert, double eps,
                             const SpaceTimeField* u0) {
    const int n = base.dim;
    if (pert.a_tilde.size() != static_cast<std::size_t>(n * n) || !pert.f_tilde.valid())
        throw std::invalid_argument("perturbed_set: perturbation does not match the set dimension");

    std::vector<CoefficientFn> a;
    a.reserve(static_cast<std::size_t>(n * n));
    for (int i = 0; i < n * n; ++i)
        a.push_back(CoefficientFn::from_tree(
            expr::add(base.a[static_cast<std::size_t>(i)].tree(),
                      expr::mul(expr::constant(eps), pert.a_tilde[static_cast<std::size_t>(i)].tree())),
            n));
    CoefficientFn f = CoefficientFn::from_tree(
        expr::add(base.f.tree(), expr::mul(expr::constant(eps), pert.f_tilde.tree())), n);

    CoefficientSet out(n, std::move(a), std::move(f), base.lambda, base.p);
    out.source = base.source;

    if (u0 != nullptr) {
        const EllipticityReport rep = check_ellipticity(out, *u0);
        if (!rep.bounds_ok())
            throw EllipticityError(
                "ellipticity lost at epsilon = " + format_double(eps) + ": margins [" +
                format_double(rep.min_lower_margin) + ", " + format_double(rep.min_upper_margin) +
                "] at node x1=" + format_double(rep.worst_x[0]) +
                (n > 1 ? ", x2=" + format_double(rep.worst_x[1]) : "") +
                ", t=" + format_double(rep.worst_t));
    }
    return out;
}

NewtonResult solution_map(const CoefficientSet& base, const Perturbation& pert, double eps,
                          const SpaceTimeField& u0, const NewtonOptions& opts) {
    const CoefficientSet set = perturbed_set(base, pert, eps, &u0);
    return newton_solve(set, u0, opts);
}

SpaceTimeField linearized_sensitivity(const CoefficientSet& base, const Perturbation& pert,
                                      const SpaceTimeField& u0) {
    const Grid& g = u0.grid();
    const int n = base.dim;
    const SpaceTimeField ub = u0.with_zero_boundary();
    std::vector<SpaceTimeField> d2;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) d2.push_back(diff_xx(ub, i, j));
    const SpaceTimeField d0 = diff_x(ub, 0);
    const SpaceTimeField d1 = n > 1 ? diff_x(ub, 1) : SpaceTimeField(u0.grid_ptr());

    SpaceTimeField rhs(u0.grid_ptr());
    for (int node = 0; node < g.node_count(); ++node) {
        if (g.classify(node) != NodeClass::Interior) continue;
        const auto x = g.space_coords(g.space_of(node));
        const double t = g.time(g.step_of(node));
        const std::array<double, 2> xi{d0(node), n > 1 ? d1(node) : 0.0};
        double acc = pert.f_tilde.value(x, t, ub(node), xi);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                acc += pert.a_at(i, j, n).value(x, t, ub(node), xi) *
                       d2[static_cast<std::size_t>(i * n + j)](node);
        rhs(node) = acc;
    }
    return solve_linear_parabolic(linearized_problem(base, u0, rhs));
}

StabilityReport stability_sweep(const CoefficientSet& base, const Perturbation& pert,
                                const std::vector<double>& epsilons, const SpaceTimeField& u0,
                                const NewtonOptions& opts) {
    for (std::size_t i = 0; i < epsilons.size(); ++i) {
        if (!(epsilons[i] > 0.0))
            throw std::invalid_argument("stability_sweep: epsilons must be positive");
        if (i > 0 && epsilons[i] <= epsilons[i - 1])
            throw std::invalid_argument("stability_sweep: epsilons must be increasing");
    }

    StabilityReport rep;
    rep.epsilons = epsilons;
    const SpaceTimeField v = linearized_sensitivity(base, pert, u0);

    const Grid& g = u0.grid();
    const CompactBox box = CompactBox::symmetric(g.dim(), std::max(1.0, w1inf_norm(u0)), 3);
    rep.perturbation_c1_norm = c1_norm(pert.f_tilde, box, g);
    for (const auto& entry : pert.a_tilde) rep.perturbation_c1_norm += c1_norm(entry, box, g);

    for (double eps : epsilons) {
        double deviation = std::numeric_limits<double>::quiet_NaN();
        double sens_err = std::numeric_limits<double>::quiet_NaN();
        bool ok = false;
        int iters = 0;
        try {
            const NewtonResult run = solution_map(base, pert, eps, u0, opts);
            ok = run.converged();
            iters = run.iterations();
            if (ok) {
                const SpaceTimeField diff = run.solution - u0;
                deviation = w21p_norm(diff, base.p);
                sens_err = w21p_norm((1.0 / eps) * diff - v, base.p);
            }
        } catch (const EllipticityError&) {
            ok = false;
        }
        rep.deviations.push_back(deviation);
        rep.sensitivity_errors.push_back(sens_err);
        rep.converged.push_back(ok);
        rep.iterations.push_back(iters);
    }

    // deviation slope over the converged entries
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int m = 0;
    for (std::size_t i = 0; i < epsilons.size(); ++i) {
        if (!rep.converged[i] || !(rep.deviations[i] > 0.0)) continue;
        const double x = std::log(epsilons[i]);
        const double y = std::log(rep.deviations[i]);
        sx += x; sy += y; sxx += x * x; sxy += x * y;
        ++m;
    }
    rep.slope = m >= 2 ? (m * sxy - sx * sy) / (m * sxx - sx * sx) : 0.0;
    return rep;
}

void write_stability_csv(const StabilityReport& rep, const std::string& path) {
    CsvWriter csv(path);
    csv.header({"epsilon", "deviation_w21p", "sensitivity_error", "converged"});
    for (std::size_t i = 0; i < rep.epsilons.size(); ++i)
        csv.row({rep.epsilons[i], rep.deviations[i], rep.sensitivity_errors[i],
                 static_cast<long>(rep.converged[i] ? 1 : 0)});
    csv.row({std::string("slope"), rep.slope, std::string("nan"), std::string("nan")});
    csv.row({std::string("perturbation_c1"), rep.perturbation_c1_norm, std::string("nan"),
             std::string("nan")});
}

}  // namespace parnewt
