#pragma once

#include <Eigen/Core>
#include <functional>
#include <string>

#include "parnewt/grid.hpp"

namespace parnewt {

/// A scalar grid function u(x,t): one value per space-time node, flat-indexed
/// like the grid (time-major, x1 fastest).
class SpaceTimeField {
public:
    SpaceTimeField() = default;
    explicit SpaceTimeField(GridPtr grid)
        : grid_(std::move(grid)), values_(Eigen::ArrayXd::Zero(grid_->node_count())) {}
    SpaceTimeField(GridPtr grid, Eigen::ArrayXd values);

    const Grid& grid() const { return *grid_; }
    const GridPtr& grid_ptr() const { return grid_; }
    const Eigen::ArrayXd& values() const { return values_; }
    Eigen::ArrayXd& values() { return values_; }

    double operator()(int node) const { return values_[node]; }
    double& operator()(int node) { return values_[node]; }
    double at(int space, int step) const { return values_[grid_->index(space, step)]; }

    /// Copy with the parabolic-boundary nodes set to zero.
    SpaceTimeField with_zero_boundary() const;
    /// Largest |u| over the parabolic boundary.
    double boundary_max_abs() const;

    bool all_finite() const { return values_.allFinite(); }
    bool same_grid(const SpaceTimeField& other) const { return grid_ == other.grid_; }

    SpaceTimeField& operator+=(const SpaceTimeField& o);
    SpaceTimeField& operator-=(const SpaceTimeField& o);
    SpaceTimeField& operator*=(double s);
    friend SpaceTimeField operator+(SpaceTimeField a, const SpaceTimeField& b) { return a += b; }
    friend SpaceTimeField operator-(SpaceTimeField a, const SpaceTimeField& b) { return a -= b; }
    friend SpaceTimeField operator*(double s, SpaceTimeField a) { return a *= s; }

private:
    GridPtr grid_;
    Eigen::ArrayXd values_;
};

/// Sample f(x,t) at every node.
SpaceTimeField sample(GridPtr grid, const std::function<double(const double*, double)>& f);

/// Node coordinates + value columns: x1[,x2],t,u. Floats at 17 significant digits.
void write_field_csv(const SpaceTimeField& field, const std::string& path);

}  // namespace parnewt
