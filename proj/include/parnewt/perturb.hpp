#pragma once

#include <string>
#include <vector>

#include "parnewt/newton.hpp"

namespace parnewt {

/// Perturbation directions (ã^{ij}, f̃) in the same expression language as the
/// base data; the magnitude ε is supplied where the perturbation is applied.
struct Perturbation {
    std::vector<CoefficientFn> a_tilde;  // dim*dim entries (zero fns allowed)
    CoefficientFn f_tilde;

    const CoefficientFn& a_at(int i, int j, int dim) const {
        return a_tilde[static_cast<std::size_t>(i * dim + j)];
    }
};

Perturbation zero_perturbation(int dim);

/// Coefficient set with entries a^{ij} + ε·ã^{ij}, f + ε·f̃ (tree-level, so
/// ε = 0 folds back to the base trees exactly). When u0 is given, ellipticity
/// of the perturbed matrix along u0 is re-validated against the base λ
/// (EllipticityError on loss, with the worst node).
CoefficientSet perturbed_set(const CoefficientSet& base, const Perturbation& pert, double eps,
                             const SpaceTimeField* u0 = nullptr);

/// Φ(ε): Newton solve of the perturbed problem warm-started at u0.
NewtonResult solution_map(const CoefficientSet& base, const Perturbation& pert, double eps,
                          const SpaceTimeField& u0, const NewtonOptions& opts = {});

/// v solving 𝒫'(u0) v = ã^{ij}(·,u0,Du0) D_ij u0 + f̃(·,u0,Du0), v = 0 on
/// ∂_p Q — the ε-derivative of Φ at 0, so Φ(ε) ≈ u0 + εv.
SpaceTimeField linearized_sensitivity(const CoefficientSet& base, const Perturbation& pert,
                                      const SpaceTimeField& u0);

struct StabilityReport {
    std::vector<double> epsilons;
    std::vector<double> deviations;          // ‖Φ(ε) − u0‖_{W^{2,1}_p}
    std::vector<double> sensitivity_errors;  // ‖(Φ(ε)−u0)/ε − v‖_{W^{2,1}_p}
    std::vector<bool> converged;
    std::vector<int> iterations;
    double slope = 0.0;                 // log-log fit of deviations vs ε (converged entries)
    double perturbation_c1_norm = 0.0;  // measured 𝔠¹ scale of (ã, f̃) at ε = 1
};

/// Runs solution_map per ε (failures are report entries, not aborts) and fits
/// the deviation slope.
StabilityReport stability_sweep(const CoefficientSet& base, const Perturbation& pert,
                                const std::vector<double>& epsilons, const SpaceTimeField& u0,
                                const NewtonOptions& opts = {});

/// Columns epsilon,deviation_w21p,sensitivity_error,converged, then footer
/// rows labeled "slope" and "perturbation_c1".
void write_stability_csv(const StabilityReport& report, const std::string& path);

}  // namespace parnewt
