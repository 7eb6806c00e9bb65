#pragma once

#include <Eigen/Core>
#include <Eigen/SparseCore>
#include <stdexcept>

#include "parnewt/field.hpp"

namespace parnewt {

class EllipticityError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

class LinearSolveError : public std::runtime_error {
public:
    LinearSolveError(const std::string& msg, int time_index)
        : std::runtime_error(msg), time_index_(time_index) {}
    int time_index() const { return time_index_; }

private:
    int time_index_ = -1;
};

/// Frozen-coefficient linear parabolic problem
///   D_t v − A^{ij}(x,t) D_ij v − c(x,t)·Dv − b(x,t) v = g,  v = 0 on ∂_p Q.
/// Per-node samples: A has dim² columns (row-major i*dim+j), c has dim
/// columns, b and g one value per node.
struct LinearParabolicProblem {
    GridPtr grid;
    Eigen::ArrayXXd A;
    Eigen::ArrayXXd c;
    Eigen::ArrayXd b;
    Eigen::ArrayXd g;
    double lambda = 1.0;
};

/// Validates shapes and checks the declared ellipticity bounds
/// λ⁻¹ ≤ eig(sym A) ≤ λ at every node (throws EllipticityError).
LinearParabolicProblem make_linear_problem(GridPtr grid, Eigen::ArrayXXd A, Eigen::ArrayXXd c,
                                           Eigen::ArrayXd b, Eigen::ArrayXd g, double lambda);

struct StepSystem {
    Eigen::SparseMatrix<double> matrix;
    Eigen::VectorXd rhs;
};

/// Backward-Euler system (I/dt − L_h) v^k = g^k + v^{k−1}/dt at time slice k.
/// Rows of lateral-boundary nodes enforce v = 0.
StepSystem assemble_step(const LinearParabolicProblem& problem, int time_index,
                         const Eigen::VectorXd& prev_slice);

/// Marches k = 1..n_t−1 with a sparse direct solve per step; every step is
/// checked to relative residual ≤ 1e−12 (LinearSolveError otherwise).
/// Deterministic: repeated solves are bitwise identical.
SpaceTimeField solve_linear_parabolic(const LinearParabolicProblem& problem);

/// D_t v − A^{ij} D_ij v − c·Dv − b v at interior nodes (t-index ≥ 1),
/// zero elsewhere; uses the same stencils as the assembled systems.
SpaceTimeField apply_linear_operator(const LinearParabolicProblem& problem,
                                     const SpaceTimeField& v);

}  // namespace parnewt
