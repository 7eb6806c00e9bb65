#include "parnewt/oscillation.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "parnewt/calculus.hpp"
#include "parnewt/csv.hpp"
#include "parnewt/sampling.hpp"

namespace parnewt {

const char* kind_name(OscillationReport::Kind k) {
    switch (k) {
        case OscillationReport::Kind::RawCoefficient: return "raw_coefficient";
        case OscillationReport::Kind::Composed: return "composed";
        case OscillationReport::Kind::Gradient: return "gradient";
        case OscillationReport::Kind::Continuity: return "continuity";
    }
    return "?";
}

namespace {

constexpr double kSlop = 1e-12;

// Weighted mean pairwise absolute difference over one slice of a ball:
//   sum_{y,z} w_y w_z |v_y - v_z| / (sum w)^2
// computed from the sorted values via gaps: sum_m d_m W_{<m} (W - W_{<m})
// with d_m the sorted-value gaps (the O(N log N) route; the O(N^2)
// enumeration of the same sum is the test oracle). The gap form returns
// exactly 0 for x-independent slices, which the VMO_x defining property
// requires.
double slice_mean_osc(std::vector<std::pair<double, double>>& vw) {
    if (vw.size() < 2) return 0.0;
    std::sort(vw.begin(), vw.end());
    double wtot = 0.0;
    for (const auto& [v, w] : vw) wtot += w;
    double acc = 0.0, wleft = vw.front().second;
    for (std::size_t m = 1; m < vw.size(); ++m) {
        const double gap = vw[m].first - vw[m - 1].first;
        acc += gap * wleft * (wtot - wleft);
        wleft += vw[m].second;
    }
    return 2.0 * acc / (wtot * wtot);
}

}  // namespace

double mean_osc_x(const SpaceTimeField& a, const ParabolicCylinder& cyl) {
    if (cyl.space_nodes.empty() || cyl.time_steps.empty())
        throw std::invalid_argument("mean_osc_x: empty cylinder");
    const Grid& g = a.grid();
    std::vector<std::pair<double, double>> vw;
    vw.reserve(cyl.space_nodes.size());
    double acc = 0.0;
    for (int k : cyl.time_steps) {
        vw.clear();
        for (int s : cyl.space_nodes) vw.emplace_back(a.at(s, k), detail::space_weight(g, s));
        acc += slice_mean_osc(vw);
    }
    return acc / static_cast<double>(cyl.time_steps.size());
}

namespace {

// Sample radii: integer multiples of the min spacing (starting at the max
// spacing, the smallest admissible cylinder), plus the requested radii.
std::vector<double> radius_samples(const Grid& g, const std::vector<double>& radii) {
    const double r_max = radii.back() * (1.0 + kSlop);
    const double step = g.min_spacing();
    std::vector<double> samples;
    for (int m = 1; m * step <= r_max; ++m)
        if (m * step >= g.max_spacing() * (1.0 - kSlop)) samples.push_back(m * step);
    samples.insert(samples.end(), radii.begin(), radii.end());
    std::sort(samples.begin(), samples.end());
    samples.erase(std::unique(samples.begin(), samples.end(),
                              [](double x, double y) { return std::abs(x - y) <= kSlop * std::max(1.0, x); }),
                  samples.end());
    return samples;
}

void validate_radii(const Grid& g, const std::vector<double>& radii) {
    if (radii.empty()) throw std::invalid_argument("vmo_modulus: need at least one radius");
    for (std::size_t i = 0; i < radii.size(); ++i) {
        if (radii[i] < g.max_spacing() * (1.0 - kSlop))
            throw std::invalid_argument("vmo_modulus: radius " + format_double(radii[i]) +
                                        " is below the grid spacing");
        if (i > 0 && radii[i] <= radii[i - 1])
            throw std::invalid_argument("vmo_modulus: radii must be strictly increasing");
    }
}

// sup over all centers of the cylinder mean oscillation at one fixed radius
double sup_over_centers(const SpaceTimeField& a, double r) {
    const Grid& g = a.grid();
    const int nsp = g.space_count();
    const int nt = g.steps();

    std::vector<std::pair<double, double>> vw;
    std::vector<double> prefix(static_cast<std::size_t>(nt), 0.0);
    double best = 0.0;

    for (int s = 0; s < nsp; ++s) {
        const auto ball = detail::ball_nodes(g, s, r);
        // per-slice oscillation, accumulated so window means are O(1)
        for (int k = 1; k < nt; ++k) {
            vw.clear();
            for (int y : ball) vw.emplace_back(a.at(y, k), detail::space_weight(g, y));
            prefix[static_cast<std::size_t>(k)] =
                prefix[static_cast<std::size_t>(k - 1)] + slice_mean_osc(vw);
        }
        for (int it = 0; it + 1 < nt; ++it) {
            const auto w = detail::time_window(g, it, r);
            const double sum = prefix[static_cast<std::size_t>(w[1])] - prefix[static_cast<std::size_t>(w[0] - 1)];
            best = std::max(best, sum / static_cast<double>(w[1] - w[0] + 1));
        }
    }
    return best;
}

}  // namespace

OscillationReport vmo_modulus(const SpaceTimeField& a, const std::vector<double>& radii,
                              OscillationReport::Kind kind) {
    const Grid& g = a.grid();
    validate_radii(g, radii);
    const auto samples = radius_samples(g, radii);

    std::vector<double> per_sample(samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i) per_sample[i] = sup_over_centers(a, samples[i]);

    OscillationReport rep;
    rep.kind = kind;
    rep.radii = radii;
    rep.modulus.resize(radii.size());
    double running = 0.0;
    std::size_t si = 0;
    for (std::size_t j = 0; j < radii.size(); ++j) {
        while (si < samples.size() && samples[si] <= radii[j] * (1.0 + kSlop))
            running = std::max(running, per_sample[si++]);
        rep.modulus[j] = running;
    }
    return rep;
}

OscillationReport composed_vmo_modulus(const CoefficientFn& a, const SpaceTimeField& u,
                                       const std::vector<double>& radii) {
    return vmo_modulus(sample_composition(a, u), radii, OscillationReport::Kind::Composed);
}

OscillationReport composed_vmo_modulus(const CoefficientSet& set, const SpaceTimeField& u,
                                       const std::vector<double>& radii) {
    OscillationReport total;
    total.kind = OscillationReport::Kind::Composed;
    total.radii = radii;
    total.modulus.assign(radii.size(), 0.0);
    for (const auto& entry : set.a) {
        const auto rep = composed_vmo_modulus(entry, u, radii);
        for (std::size_t j = 0; j < radii.size(); ++j) total.modulus[j] += rep.modulus[j];
    }
    return total;
}

OscillationReport gradient_vmo_modulus(const SpaceTimeField& u, const std::vector<double>& radii) {
    OscillationReport total;
    total.kind = OscillationReport::Kind::Gradient;
    total.radii = radii;
    total.modulus.assign(radii.size(), 0.0);
    for (int i = 0; i < u.grid().dim(); ++i) {
        const auto rep = vmo_modulus(diff_x(u, i), radii, OscillationReport::Kind::Gradient);
        for (std::size_t j = 0; j < radii.size(); ++j) total.modulus[j] += rep.modulus[j];
    }
    return total;
}

OscillationReport continuity_report(const SpaceTimeField& u, const std::vector<double>& radii) {
    OscillationReport rep;
    rep.kind = OscillationReport::Kind::Continuity;
    rep.radii = radii;
    rep.modulus.resize(radii.size());
    for (std::size_t j = 0; j < radii.size(); ++j) rep.modulus[j] = x_continuity_modulus(u, radii[j]);
    return rep;
}

OscillationReport boxed_raw_modulus(const CoefficientFn& a, const SpaceTimeField& u_for_grid,
                                    double m, const std::vector<double>& radii,
                                    int lattice_density, std::uint64_t seed) {
    OscillationReport rep;
    rep.kind = OscillationReport::Kind::RawCoefficient;
    rep.radii = radii;
    rep.modulus.assign(radii.size(), 0.0);
    const GridPtr grid = u_for_grid.grid_ptr();

    if (a.x_independent()) return rep;  // frozen-state fields are constant per slice

    std::mt19937_64 rng(seed);
    const auto u_samples = sampling::axis_samples(-m, m, lattice_density, rng);
    const auto xi1_samples = sampling::axis_samples(-m, m, lattice_density, rng);
    const auto xi2_samples = grid->dim() > 1 ? sampling::axis_samples(-m, m, lattice_density, rng)
                                             : std::vector<double>{0.0};

    for (double uu : u_samples) {
        for (double x1 : xi1_samples) {
            for (double x2 : xi2_samples) {
                const std::array<double, 2> xi{x1, x2};
                SpaceTimeField frozen = sample(grid, [&](const double* x, double t) {
                    return a.value({x[0], x[1]}, t, uu, xi);
                });
                const auto r = vmo_modulus(frozen, radii);
                for (std::size_t j = 0; j < radii.size(); ++j)
                    rep.modulus[j] = std::max(rep.modulus[j], r.modulus[j]);
            }
        }
    }
    return rep;
}

CompositionBoundReport composition_bound_check(const CoefficientFn& a, const SpaceTimeField& u,
                                               const std::vector<double>& radii,
                                               const CompositionBoundOptions& opts) {
    CompositionBoundReport rep;
    rep.radii = radii;
    rep.state_bound = w1inf_norm(u);

    const Grid& g = u.grid();
    const CompactBox box = CompactBox::symmetric(g.dim(), rep.state_bound, opts.lattice_density);

    const SpaceTimeField composed_field = sample_composition(a, u);
    const auto composed = vmo_modulus(composed_field, radii, OscillationReport::Kind::Composed);
    const auto boxed = boxed_raw_modulus(a, u, rep.state_bound, radii, opts.lattice_density, opts.seed);
    const auto grad = gradient_vmo_modulus(u, radii);
    const MuTable mu = mu_table(a, box, g, opts.mu_bins, opts.seed);
    rep.lipschitz_xi = lipschitz_estimate(a, box, g, LipschitzVary::XiOnly, opts.seed);
    rep.slack = opts.slack_factor * sup_norm(composed_field);

    rep.composed = composed.modulus;
    rep.boxed_raw = boxed.modulus;
    rep.mu_term.resize(radii.size());
    rep.gradient_term.resize(radii.size());
    rep.margins.resize(radii.size());
    for (std::size_t j = 0; j < radii.size(); ++j) {
        rep.mu_term[j] = mu(x_continuity_modulus(u, radii[j]));
        rep.gradient_term[j] = rep.lipschitz_xi * grad.modulus[j];
        const double rhs = rep.boxed_raw[j] + rep.mu_term[j] + rep.gradient_term[j] + rep.slack;
        rep.margins[j] = rhs - rep.composed[j];
        if (rep.margins[j] < 0.0) rep.holds = false;
    }
    return rep;
}

std::vector<CompositionBoundReport> composition_bound_check(const CoefficientSet& set,
                                                            const SpaceTimeField& u,
                                                            const std::vector<double>& radii,
                                                            const CompositionBoundOptions& opts) {
    std::vector<CompositionBoundReport> reports;
    reports.reserve(set.a.size());
    for (const auto& entry : set.a)
        reports.push_back(composition_bound_check(entry, u, radii, opts));
    return reports;
}

void write_oscillation_csv(const std::vector<OscillationReport>& reports, const std::string& path) {
    CsvWriter csv(path);
    csv.header({"R", "modulus", "kind"});
    for (const auto& rep : reports)
        for (std::size_t j = 0; j < rep.radii.size(); ++j)
            csv.row({rep.radii[j], rep.modulus[j], std::string(kind_name(rep.kind))});
}

}  // namespace parnewt
