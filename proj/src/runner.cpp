#include "parnewt/runner.hpp"

#include <cmath>
#include <filesystem>

#include "parnewt/calculus.hpp"
#include "parnewt/csv.hpp"
#include "parnewt/mms.hpp"
#include "parnewt/oscillation.hpp"

namespace parnewt {

namespace {

struct Context {
    const ProblemSpec& spec;
    std::string out;
    std::uint64_t seed;

    std::string path(const std::string& name) const { return out + "/" + name; }
};

void write_status(const Context& ctx, const std::string& cmd, int code,
                  const std::string& outcome, const std::string& detail) {
    CsvWriter csv(ctx.path("status.csv"));
    csv.header({"key", "value"});
    csv.row({std::string("subcommand"), cmd});
    csv.row({std::string("exit_code"), static_cast<long>(code)});
    csv.row({std::string("outcome"), outcome});
    csv.row({std::string("detail"), detail});
}

NewtonResult solve_base(const Context& ctx, const GridPtr& grid, const CoefficientSet& set) {
    return newton_solve(set, ctx.spec.make_start(grid), ctx.spec.newton_options());
}

int run_solve(const Context& ctx, bool write_solution) {
    const GridPtr grid = ctx.spec.make_grid();
    const CoefficientSet set = ctx.spec.make_set();
    const NewtonResult res = solve_base(ctx, grid, set);
    write_trace_csv(res.trace, ctx.path("newton_trace.csv"));
    if (write_solution) write_field_csv(res.solution, ctx.path("solution.csv"));
    const int code = res.converged() ? kOk : kAnalysisFailure;
    write_status(ctx, write_solution ? "solve" : "newton-trace", code, outcome_name(res.outcome),
                 res.message.empty() ? "residual " + format_double(res.trace.residual_norms.back())
                                     : res.message);
    return code;
}

int run_vmo(const Context& ctx) {
    const GridPtr grid = ctx.spec.make_grid();
    const CoefficientSet set = ctx.spec.make_set();
    const NewtonResult res = solve_base(ctx, grid, set);
    if (!res.converged()) {
        write_status(ctx, "vmo", kAnalysisFailure, outcome_name(res.outcome), res.message);
        return kAnalysisFailure;
    }
    const auto radii = ctx.spec.effective_radii(*grid);
    const SpaceTimeField& u = res.solution;
    const double m = ctx.spec.vmo.m > 0.0 ? ctx.spec.vmo.m : w1inf_norm(u);

    OscillationReport raw;
    raw.kind = OscillationReport::Kind::RawCoefficient;
    raw.radii = radii;
    raw.modulus.assign(radii.size(), 0.0);
    for (const auto& entry : set.a) {
        const auto rep = boxed_raw_modulus(entry, u, m, radii, ctx.spec.vmo.sample_density, ctx.seed);
        for (std::size_t j = 0; j < radii.size(); ++j) raw.modulus[j] += rep.modulus[j];
    }

    std::vector<OscillationReport> reports;
    reports.push_back(std::move(raw));
    reports.push_back(composed_vmo_modulus(set, u, radii));
    reports.push_back(gradient_vmo_modulus(u, radii));
    reports.push_back(continuity_report(u, radii));
    write_oscillation_csv(reports, ctx.path("vmo.csv"));
    write_status(ctx, "vmo", kOk, "ok", "M=" + format_double(m));
    return kOk;
}

int run_perturb_sweep(const Context& ctx) {
    if (!ctx.spec.perturbation.present || ctx.spec.perturbation.epsilons.empty()) {
        write_status(ctx, "perturb-sweep", kSpecError, "spec_error",
                     "[perturbation] section with epsilons is required");
        return kSpecError;
    }
    const GridPtr grid = ctx.spec.make_grid();
    const CoefficientSet set = ctx.spec.make_set();
    const NewtonResult base = solve_base(ctx, grid, set);
    if (!base.converged()) {
        write_status(ctx, "perturb-sweep", kAnalysisFailure, outcome_name(base.outcome),
                     "base problem did not converge: " + base.message);
        return kAnalysisFailure;
    }
    const StabilityReport rep =
        stability_sweep(set, ctx.spec.make_perturbation(), ctx.spec.perturbation.epsilons,
                        base.solution, ctx.spec.newton_options());
    write_stability_csv(rep, ctx.path("stability.csv"));
    write_status(ctx, "perturb-sweep", kOk, "ok", "slope=" + format_double(rep.slope));
    return kOk;
}

int run_mms_verify(const Context& ctx) {
    if (!ctx.spec.mms.present) {
        write_status(ctx, "mms-verify", kSpecError, "spec_error", "[mms] section is required");
        return kSpecError;
    }
    const GridPtr grid = ctx.spec.make_grid();
    const CoefficientSet base = ctx.spec.make_set();
    const CoefficientFn u_exact = parse_coefficient(ctx.spec.mms.u_exact_text, ctx.spec.grid.dim);
    const ManufacturedProblem mp = manufacture(u_exact, base, grid);

    const double bmax = mp.u_exact.boundary_max_abs();
    const double res_norm = lp_norm(residual(mp.set, mp.u_exact), base.p);
    const NewtonResult run = newton_solve(mp.set, ctx.spec.make_start(grid), ctx.spec.newton_options());

    CsvWriter csv(ctx.path("mms_report.csv"));
    csv.header({"quantity", "value", "status"});
    csv.row({std::string("boundary_max_abs"), bmax, std::string(bmax <= 1e-14 ? "pass" : "fail")});
    csv.row({std::string("residual_p_of_u_exact"), res_norm, std::string("info")});
    csv.row({std::string("newton_iterations"), static_cast<long>(run.iterations()),
             std::string(run.converged() ? "pass" : "fail")});
    if (run.converged()) {
        const SpaceTimeField err = run.solution - mp.u_exact;
        csv.row({std::string("error_sup"), sup_norm(err), std::string("info")});
        csv.row({std::string("error_lp"), lp_norm(err, base.p), std::string("info")});
    }
    write_trace_csv(run.trace, ctx.path("newton_trace.csv"));
    const int code = run.converged() ? kOk : kAnalysisFailure;
    write_status(ctx, "mms-verify", code, outcome_name(run.outcome), run.message);
    return code;
}

int run_convergence(const Context& ctx) {
    if (!ctx.spec.mms.present) {
        write_status(ctx, "convergence", kSpecError, "spec_error", "[mms] section is required");
        return kSpecError;
    }
    const CoefficientSet base = ctx.spec.make_set();
    const CoefficientFn u_exact = parse_coefficient(ctx.spec.mms.u_exact_text, ctx.spec.grid.dim);
    const TimeRefinement refinement = ctx.spec.mms.dt_scaling == "h"
                                          ? TimeRefinement::LinearInH
                                          : TimeRefinement::QuadraticInH;
    try {
        const OrderTable table = convergence_study(
            u_exact, base, ctx.spec.grid.dim, ctx.spec.grid.extent, ctx.spec.grid.nodes,
            ctx.spec.grid.horizon, ctx.spec.grid.steps, ctx.spec.mms.levels, refinement,
            ctx.spec.newton_options());
        write_order_csv(table, ctx.path("convergence.csv"));
        write_status(ctx, "convergence", kOk, "ok", "order_lp=" + format_double(table.order_lp));
        return kOk;
    } catch (const std::runtime_error& e) {
        write_status(ctx, "convergence", kAnalysisFailure, "aborted", e.what());
        return kAnalysisFailure;
    }
}

int run_check_hypotheses(const Context& ctx) {
    const GridPtr grid = ctx.spec.make_grid();
    const CoefficientSet set = ctx.spec.make_set();
    const int n = set.dim;
    const NewtonResult res = solve_base(ctx, grid, set);
    const SpaceTimeField& state = res.solution;  // start field when not converged

    const double m_state = std::max(1.0, w1inf_norm(state));
    const CompactBox box = CompactBox::symmetric(n, m_state, ctx.spec.vmo.sample_density);

    CsvWriter csv(ctx.path("hypotheses.csv"));
    csv.header({"hypothesis", "status", "detail"});
    bool all_pass = true;

    {  // H1: finite sampled c1 norms and Lipschitz constants
        std::string detail;
        bool ok = true;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                const double c1 = c1_norm(set.a_at(i, j), box, *grid, ctx.seed);
                const double l = c11_constant(set.a_at(i, j), box, *grid, ctx.seed);
                ok = ok && std::isfinite(c1) && std::isfinite(l);
                detail += "c1(a" + std::to_string(i + 1) + std::to_string(j + 1) + ")=" +
                          format_double(c1) + ";L=" + format_double(l) + ";";
            }
        const double c1f = c1_norm(set.f, box, *grid, ctx.seed);
        const double lf = c11_constant(set.f, box, *grid, ctx.seed);
        ok = ok && std::isfinite(c1f) && std::isfinite(lf);
        detail += "c1(f)=" + format_double(c1f) + ";L(f)=" + format_double(lf);
        csv.row({std::string("H1"), std::string(ok ? "pass" : "fail"), detail});
        all_pass = all_pass && ok;
    }
    {  // H2: a strong solution exists (constructively: Newton converged)
        const bool ok = res.converged();
        csv.row({std::string("H2"), std::string(ok ? "pass" : "fail"),
                 "outcome=" + std::string(outcome_name(res.outcome)) +
                     ";iterations=" + std::to_string(res.iterations()) +
                     ";residual=" + format_double(res.trace.residual_norms.back())});
        all_pass = all_pass && ok;
    }
    {  // H3: symmetry and two-sided ellipticity along the computed state
        const EllipticityReport rep = check_ellipticity(set, state, 16, ctx.seed);
        const bool ok = rep.pass();
        csv.row({std::string("H3"), std::string(ok ? "pass" : "fail"),
                 "lower_margin=" + format_double(rep.min_lower_margin) +
                     ";upper_margin=" + format_double(rep.min_upper_margin) +
                     ";max_asymmetry=" + format_double(rep.max_asymmetry)});
        all_pass = all_pass && ok;
    }
    {  // H4: p > n+2 (enforced at load), f along the state in L^p, VMO trend
        const SpaceTimeField fcomp = sample_composition(set.f, state);
        const double flp = lp_norm(fcomp, set.p);
        const auto radii = ctx.spec.effective_radii(*grid);
        const auto vmo = composed_vmo_modulus(set, state, radii);
        const bool ok = std::isfinite(flp);
        csv.row({std::string("H4"), std::string(ok ? "pass" : "fail"),
                 "p=" + format_double(set.p) + ";lp_f=" + format_double(flp) +
                     ";vmo_first=" + format_double(vmo.modulus.front()) +
                     ";vmo_last=" + format_double(vmo.modulus.back())});
        all_pass = all_pass && ok;
    }
    {  // embedding diagnostic: Hölder quotient of the state at the default exponent
        const double alpha = default_holder_exponent(n, set.p);
        csv.row({std::string("embedding"), std::string("info"),
                 "alpha=" + format_double(alpha) +
                     ";holder_quotient=" + format_double(holder_quotient(state, alpha))});
    }
    {  // C3-style boundedness at the zero state, reported alongside H4
        double sup_a0 = 0.0, sup_f0 = 0.0;
        bool ok = true;
        try {
            const SpaceTimeField zero(grid);
            for (const auto& entry : set.a) sup_a0 = std::max(sup_a0, sup_norm(sample_composition(entry, zero)));
            sup_f0 = sup_norm(sample_composition(set.f, zero));
        } catch (const CoefficientDomainError&) {
            ok = false;
        }
        csv.row({std::string("C3"), std::string(ok ? "pass" : "fail"),
                 "sup_a(x,t,0,0)=" + format_double(sup_a0) +
                     ";sup_f(x,t,0,0)=" + format_double(sup_f0)});
        all_pass = all_pass && ok;
    }

    const int code = all_pass ? kOk : kAnalysisFailure;
    write_status(ctx, "check-hypotheses", code, all_pass ? "pass" : "fail", "");
    return code;
}

}  // namespace

int run_subcommand(const std::string& command, const ProblemSpec& spec,
                   const std::string& out_dir, std::optional<std::uint64_t> seed_override) {
    Context ctx{spec, out_dir.empty() ? spec.output.dir : out_dir,
                seed_override.value_or(spec.seed)};
    std::filesystem::create_directories(ctx.out);

    try {
        if (command == "solve") return run_solve(ctx, true);
        if (command == "newton-trace") return run_solve(ctx, false);
        if (command == "vmo") return run_vmo(ctx);
        if (command == "perturb-sweep") return run_perturb_sweep(ctx);
        if (command == "mms-verify") return run_mms_verify(ctx);
        if (command == "convergence") return run_convergence(ctx);
        if (command == "check-hypotheses") return run_check_hypotheses(ctx);
    } catch (const SpecError& e) {
        write_status(ctx, command, kSpecError, "spec_error", e.what());
        return kSpecError;
    } catch (const std::invalid_argument& e) {
        write_status(ctx, command, kSpecError, "spec_error", e.what());
        return kSpecError;
    } catch (const std::exception& e) {
        write_status(ctx, command, kAnalysisFailure, "error", e.what());
        return kAnalysisFailure;
    }
    write_status(ctx, command, kSpecError, "spec_error", "unknown subcommand '" + command + "'");
    return kSpecError;
}

}  // namespace parnewt
