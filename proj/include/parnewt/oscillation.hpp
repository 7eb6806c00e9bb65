#pragma once

#include <string>
#include <vector>

#include "parnewt/coeff.hpp"
#include "parnewt/field.hpp"

namespace parnewt {

/// Sampled map R ↦ oscillation modulus. `modulus` is nonnegative and
/// nondecreasing in R (it is a sup over nested radius sets).
struct OscillationReport {
    enum class Kind { RawCoefficient, Composed, Gradient, Continuity };

    std::vector<double> radii;
    std::vector<double> modulus;
    Kind kind = Kind::RawCoefficient;
};

const char* kind_name(OscillationReport::Kind k);

/// Discrete mean oscillation of `a` in x over one parabolic cylinder:
/// the average over the cylinder's time steps of the quadrature-weighted
/// mean |a(y,τ) − a(z,τ)| over spatial node pairs of the (clipped) ball.
double mean_osc_x(const SpaceTimeField& a, const ParabolicCylinder& cyl);

/// a^{#(x)}(R) for each requested R: sup over all grid-node centers and all
/// sampled r ≤ R (integer multiples of the spacing, plus the requested radii
/// themselves) of mean_osc_x. radii must be increasing and ≥ the spacing.
OscillationReport vmo_modulus(const SpaceTimeField& a, const std::vector<double>& radii,
                              OscillationReport::Kind kind = OscillationReport::Kind::RawCoefficient);

/// Modulus of the composition a(x,t,u(x,t),Du(x,t)).
OscillationReport composed_vmo_modulus(const CoefficientFn& a, const SpaceTimeField& u,
                                       const std::vector<double>& radii);
/// Σ_{ij} modulus of a^{ij}(x,t,u,Du) (the (H4) aggregate).
OscillationReport composed_vmo_modulus(const CoefficientSet& set, const SpaceTimeField& u,
                                       const std::vector<double>& radii);

/// Du^{#(x)}(R) = Σ_i modulus of D_i u.
OscillationReport gradient_vmo_modulus(const SpaceTimeField& u, const std::vector<double>& radii);

/// ω^x_u(R) per radius, reported as kind Continuity.
OscillationReport continuity_report(const SpaceTimeField& u, const std::vector<double>& radii);

/// a^{#(x)}_M(R): sup over a lattice of frozen states |u|,|ξ| ≤ M of the raw
/// modulus of (x,t) ↦ a(x,t,u,ξ).
OscillationReport boxed_raw_modulus(const CoefficientFn& a, const SpaceTimeField& u_for_grid,
                                    double m, const std::vector<double>& radii,
                                    int lattice_density = 3, std::uint64_t seed = 42);

struct CompositionBoundOptions {
    int lattice_density = 3;   // (u,ξ) lattice for a^{#}_M and C_K
    int mu_bins = 32;
    double slack_factor = 0.05;  // slack = factor * sup|a(.,u,Du)|
    std::uint64_t seed = 42;
};

/// Per-radius comparison of the composed modulus against its decomposition:
/// composed(R) ≤ a^{#}_M(R) + μ_K(ω^x_u(R)) + C_K·Du^{#}(R) + slack.
struct CompositionBoundReport {
    std::vector<double> radii;
    std::vector<double> composed;
    std::vector<double> boxed_raw;
    std::vector<double> mu_term;
    std::vector<double> gradient_term;  // C_K · Du^{#}(R)
    std::vector<double> margins;        // rhs + slack − composed
    double lipschitz_xi = 0.0;          // C_K
    double state_bound = 0.0;           // M
    double slack = 0.0;
    bool holds = true;
};

CompositionBoundReport composition_bound_check(const CoefficientFn& a, const SpaceTimeField& u,
                                               const std::vector<double>& radii,
                                               const CompositionBoundOptions& opts = {});
/// One report per principal-coefficient entry.
std::vector<CompositionBoundReport> composition_bound_check(const CoefficientSet& set,
                                                            const SpaceTimeField& u,
                                                            const std::vector<double>& radii,
                                                            const CompositionBoundOptions& opts = {});

void write_oscillation_csv(const std::vector<OscillationReport>& reports, const std::string& path);

}  // namespace parnewt
