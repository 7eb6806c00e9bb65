#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <vector>

namespace parnewt {

/// Classification of a space-time node relative to the parabolic boundary.
/// Initial: t-index 0. Lateral: spatial boundary with t-index > 0.
/// The union of Initial and Lateral is the discrete parabolic boundary.
enum class NodeClass : std::uint8_t { Interior = 0, Lateral = 1, Initial = 2 };

/// Uniform tensor grid on the cylinder Q = Ω × (0,T), Ω = Π_a (0, L_a),
/// with n ∈ {1,2} spatial axes. Immutable after construction; share freely.
class Grid {
public:
    Grid(int dim,
         std::array<double, 2> extent,
         std::array<int, 2> nodes,
         double horizon,
         int steps);

    int dim() const { return dim_; }
    double extent(int axis) const { return extent_[axis]; }
    int nodes(int axis) const { return nodes_[axis]; }
    double spacing(int axis) const { return h_[axis]; }
    double horizon() const { return horizon_; }
    int steps() const { return steps_; }
    double dt() const { return dt_; }

    double max_spacing() const;
    double min_spacing() const;

    /// Number of spatial nodes per time slice.
    int space_count() const { return space_count_; }
    /// Total number of space-time nodes.
    int node_count() const { return space_count_ * steps_; }

    /// Flat spatial index from per-axis indices (x1 fastest).
    int space_index(int i1, int i2 = 0) const { return i1 + nodes_[0] * i2; }
    /// Flat space-time index.
    int index(int space, int step) const { return step * space_count_ + space; }
    int index(int i1, int i2, int step) const { return index(space_index(i1, i2), step); }

    std::array<int, 2> space_multi_index(int space) const {
        return {space % nodes_[0], space / nodes_[0]};
    }
    int step_of(int node) const { return node / space_count_; }
    int space_of(int node) const { return node % space_count_; }

    double coord(int axis, int i) const { return h_[axis] * i; }
    double time(int step) const { return dt_ * step; }
    /// Spatial coordinates of a flat spatial index; unused axes are 0.
    std::array<double, 2> space_coords(int space) const {
        auto m = space_multi_index(space);
        return {coord(0, m[0]), dim_ > 1 ? coord(1, m[1]) : 0.0};
    }

    NodeClass classify(int node) const { return mask_[node]; }
    NodeClass classify(int space, int step) const { return mask_[index(space, step)]; }
    bool on_parabolic_boundary(int node) const { return mask_[node] != NodeClass::Interior; }
    bool space_on_boundary(int space) const;

    const std::vector<NodeClass>& boundary_mask() const { return mask_; }

private:
    int dim_;
    std::array<double, 2> extent_;
    std::array<int, 2> nodes_;
    std::array<double, 2> h_;
    double horizon_;
    int steps_;
    double dt_;
    int space_count_;
    std::vector<NodeClass> mask_;
};

using GridPtr = std::shared_ptr<const Grid>;

/// Validates arguments and builds the grid with its boundary mask.
/// dim must be 1 or 2; nodes ≥ 3 per used axis; steps ≥ 2; extents, horizon > 0.
GridPtr build_grid(int dim,
                   std::array<double, 2> extent,
                   std::array<int, 2> nodes,
                   double horizon,
                   int steps);
GridPtr build_grid(double extent, int nodes, double horizon, int steps);  // 1D shorthand

/// Discrete parabolic cylinder 𝓘_r(x,t) = ℬ_r(x) × (t, t+r²), clipped to Q.
/// space_nodes: spatial indices with |y − x| ≤ r; time_steps: steps k ≥ 1 with
/// t_k ∈ (t, t+r²], or the first step after t when that set would be empty.
struct ParabolicCylinder {
    std::array<double, 2> center_x;
    double center_t = 0.0;
    double radius = 0.0;
    std::vector<int> space_nodes;
    std::vector<int> time_steps;
};

/// Cylinder centered at the grid node with spatial indices `ix` and time index `it`.
/// Throws std::invalid_argument when r < max spacing or the time window misses (0,T).
ParabolicCylinder cylinder_at(const Grid& grid, std::array<int, 2> ix, int it, double r);

namespace detail {
/// Spatial flat indices within Euclidean distance r of the node `center_space`.
std::vector<int> ball_nodes(const Grid& grid, int center_space, double r);
/// Inclusive step range [first, last] for the window (t_it, t_it + r²] ∩ (0,T),
/// with the fallback step when the window is shorter than dt. Returns {-1,-1}
/// when the window does not intersect (0, T).
std::array<int, 2> time_window(const Grid& grid, int it, double r);
}  // namespace detail

}  // namespace parnewt
