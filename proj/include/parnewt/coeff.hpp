#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "parnewt/expression.hpp"
#include "parnewt/field.hpp"

namespace parnewt {

/// Evaluation failed at a concrete grid node; carries the location and the
/// offending subexpression (from the underlying EvalError).
class CoefficientDomainError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A Carathéodory datum a(x,t,u,ξ) as a parsed expression together with its
/// exact symbolic partial derivatives in u and ξ. Immutable; evaluation is
/// reentrant.
class CoefficientFn {
public:
    CoefficientFn() = default;

    static CoefficientFn from_tree(expr::NodePtr tree, int dim);

    int dim() const { return dim_; }
    const expr::NodePtr& tree() const { return tree_; }
    const expr::NodePtr& du_tree() const { return du_; }
    const expr::NodePtr& dxi_tree(int l) const { return dxi_[l]; }
    std::string text() const { return expr::to_string(tree_); }

    bool valid() const { return tree_ != nullptr; }
    bool state_independent() const;  // no u or ξ dependence
    bool x_independent() const;      // no x dependence (may vary in t)

    double value(const std::array<double, 2>& x, double t, double u,
                 const std::array<double, 2>& xi) const;

    struct Partials {
        double du = 0.0;
        std::array<double, 2> dxi{0.0, 0.0};
    };
    Partials partials(const std::array<double, 2>& x, double t, double u,
                      const std::array<double, 2>& xi) const;

private:
    expr::NodePtr tree_;
    expr::NodePtr du_;
    std::array<expr::NodePtr, 2> dxi_;
    int dim_ = 0;
};

/// Parses `text` against the expression grammar and derives the (u,ξ)
/// partials. Throws expr::ParseError with the offset of the defect.
CoefficientFn parse_coefficient(const std::string& text, int dim);

/// The problem data {a^{ij}}, f with ellipticity constant λ and exponent p.
/// `source`, when present, is an additive per-node (x,t) sample added to f
/// (how manufactured right-hand sides are carried).
struct CoefficientSet {
    CoefficientSet(int dim, std::vector<CoefficientFn> a, CoefficientFn f,
                   double lambda, double p);

    int dim;
    std::vector<CoefficientFn> a;  // dim*dim entries, row-major
    CoefficientFn f;
    double lambda;
    double p;
    std::optional<SpaceTimeField> source;

    const CoefficientFn& a_at(int i, int j) const { return a[static_cast<std::size_t>(i * dim + j)]; }
    double source_at(int node) const { return source ? (*source)(node) : 0.0; }
};

/// Compact box K in (u,ξ)-space with a sampling density per axis.
struct CompactBox {
    double u_min = -1.0, u_max = 1.0;
    std::array<double, 2> xi_min{-1.0, -1.0}, xi_max{1.0, 1.0};
    int density = 5;

    static CompactBox symmetric(int dim, double m, int density);
};

/// Samples the composition a(x, t, u(x,t), Du(x,t)) at every node. Domain
/// errors are rethrown as CoefficientDomainError with the node coordinates.
SpaceTimeField sample_composition(const CoefficientFn& fn, const SpaceTimeField& u);

struct EllipticityReport {
    bool symmetric = true;
    double max_asymmetry = 0.0;
    double min_lower_margin = 0.0;  // min over nodes/directions of a^{ij}η_iη_j − λ⁻¹
    double min_upper_margin = 0.0;  // min of λ − a^{ij}η_iη_j
    std::array<double, 2> worst_x{0.0, 0.0};
    double worst_t = 0.0;
    int worst_node = -1;

    bool bounds_ok(double tol = 1e-12) const {
        return min_lower_margin >= -tol && min_upper_margin >= -tol;
    }
    bool pass(double tol = 1e-12) const { return symmetric && bounds_ok(tol); }
};

/// (H3) check along the state u0: for every node and a set of unit directions
/// (axes plus `extra_directions` seeded ones), λ⁻¹|η|² ≤ a^{ij}η_iη_j ≤ λ|η|².
/// Violations are report content, never exceptions.
EllipticityReport check_ellipticity(const CoefficientSet& set, const SpaceTimeField& u0,
                                    int extra_directions = 16, std::uint64_t seed = 42);

/// Sampled lower bound for the 𝔠¹(Q×K) norm: max over (x,t) node samples and
/// the box lattice of |a| + |a_u| + Σ_l |D_{ξl} a|.
double c1_norm(const CoefficientFn& fn, const CompactBox& box, const Grid& grid,
               std::uint64_t seed = 42);

enum class LipschitzVary { UAndXi, XiOnly, UOnly };

/// Sampled lower bound for the Lipschitz constant of the function values
/// alone. Denominators: |Δu|+|Δξ|₂ (UAndXi), Σ_l|Δξ_l| (XiOnly), |Δu| (UOnly).
double lipschitz_estimate(const CoefficientFn& fn, const CompactBox& box, const Grid& grid,
                          LipschitzVary vary = LipschitzVary::UAndXi, std::uint64_t seed = 42);

/// Sampled lower bound for the 𝔠^{1,1} constant L_{a,K}: the sum of the
/// function-only estimates for a, a_u and each D_{ξl} a.
double c11_constant(const CoefficientFn& fn, const CompactBox& box, const Grid& grid,
                    std::uint64_t seed = 42);

/// Nondecreasing table η ↦ sup |a(..,u,ξ) − a(..,ū,ξ)| over |u−ū| ≤ η,
/// sampled over the box lattice and node subsamples; evaluated by monotone
/// piecewise-linear interpolation.
struct MuTable {
    std::vector<double> eta;
    std::vector<double> value;
    double operator()(double gap) const;
};
MuTable mu_table(const CoefficientFn& fn, const CompactBox& box, const Grid& grid,
                 int bins = 32, std::uint64_t seed = 42);

}  // namespace parnewt
