#include "parnewt/grid.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace parnewt {

namespace {
// Inclusion tolerance for "distance exactly r" node sets; keeps ball
// membership stable under roundoff in r = m*h sampling.
constexpr double kRadiusSlop = 1e-12;
}  // namespace

Grid::Grid(int dim, std::array<double, 2> extent, std::array<int, 2> nodes,
           double horizon, int steps)
    : dim_(dim), extent_(extent), nodes_(nodes), horizon_(horizon), steps_(steps) {
    if (dim != 1 && dim != 2)
        throw std::invalid_argument("grid: dim must be 1 or 2, got " + std::to_string(dim));
    if (steps < 2)
        throw std::invalid_argument("grid: need at least 2 time steps");
    if (!(horizon > 0.0))
        throw std::invalid_argument("grid: horizon must be positive");
    for (int a = 0; a < dim; ++a) {
        if (!(extent[a] > 0.0))
            throw std::invalid_argument("grid: extent must be positive on axis " + std::to_string(a + 1));
        if (nodes[a] < 3)
            throw std::invalid_argument("grid: need at least 3 nodes per axis, axis " + std::to_string(a + 1));
    }
    if (dim == 1) {
        nodes_[1] = 1;
        extent_[1] = 0.0;
    }
    h_[0] = extent_[0] / (nodes_[0] - 1);
    h_[1] = dim == 2 ? extent_[1] / (nodes_[1] - 1) : h_[0];
    dt_ = horizon_ / (steps_ - 1);
    space_count_ = nodes_[0] * nodes_[1];

    mask_.resize(static_cast<std::size_t>(node_count()));
    for (int k = 0; k < steps_; ++k) {
        for (int s = 0; s < space_count_; ++s) {
            NodeClass c = NodeClass::Interior;
            if (k == 0)
                c = NodeClass::Initial;
            else if (space_on_boundary(s))
                c = NodeClass::Lateral;
            mask_[static_cast<std::size_t>(index(s, k))] = c;
        }
    }
}

bool Grid::space_on_boundary(int space) const {
    auto m = space_multi_index(space);
    for (int a = 0; a < dim_; ++a)
        if (m[a] == 0 || m[a] == nodes_[a] - 1) return true;
    return false;
}

double Grid::max_spacing() const { return dim_ == 2 ? std::max(h_[0], h_[1]) : h_[0]; }
double Grid::min_spacing() const { return dim_ == 2 ? std::min(h_[0], h_[1]) : h_[0]; }

GridPtr build_grid(int dim, std::array<double, 2> extent, std::array<int, 2> nodes,
                   double horizon, int steps) {
    return std::make_shared<Grid>(dim, extent, nodes, horizon, steps);
}

GridPtr build_grid(double extent, int nodes, double horizon, int steps) {
    return build_grid(1, {extent, 0.0}, {nodes, 1}, horizon, steps);
}

namespace detail {

std::vector<int> ball_nodes(const Grid& grid, int center_space, double r) {
    const auto c = grid.space_multi_index(center_space);
    const double rr = r * (1.0 + kRadiusSlop);
    std::vector<int> out;
    const int reach0 = static_cast<int>(std::floor(rr / grid.spacing(0)));
    const int lo0 = std::max(0, c[0] - reach0);
    const int hi0 = std::min(grid.nodes(0) - 1, c[0] + reach0);
    if (grid.dim() == 1) {
        out.reserve(static_cast<std::size_t>(hi0 - lo0 + 1));
        for (int i = lo0; i <= hi0; ++i) out.push_back(grid.space_index(i));
        return out;
    }
    const int reach1 = static_cast<int>(std::floor(rr / grid.spacing(1)));
    const int lo1 = std::max(0, c[1] - reach1);
    const int hi1 = std::min(grid.nodes(1) - 1, c[1] + reach1);
    for (int j = lo1; j <= hi1; ++j) {
        const double dy = (j - c[1]) * grid.spacing(1);
        for (int i = lo0; i <= hi0; ++i) {
            const double dx = (i - c[0]) * grid.spacing(0);
            if (std::hypot(dx, dy) <= rr) out.push_back(grid.space_index(i, j));
        }
    }
    return out;
}

std::array<int, 2> time_window(const Grid& grid, int it, double r) {
    if (it >= grid.steps() - 1) return {-1, -1};  // window (T, ...) misses (0,T)
    const double t0 = grid.time(it);
    const double t1 = t0 + r * r;
    int first = it + 1;  // smallest k with t_k > t0
    int last = static_cast<int>(std::floor(t1 / grid.dt() * (1.0 + kRadiusSlop)));
    last = std::min(last, grid.steps() - 1);
    if (last < first) last = first;  // window shorter than dt: keep one step
    return {first, last};
}

}  // namespace detail

ParabolicCylinder cylinder_at(const Grid& grid, std::array<int, 2> ix, int it, double r) {
    if (r < grid.max_spacing() * (1.0 - kRadiusSlop))
        throw std::invalid_argument("cylinder_at: radius " + std::to_string(r) +
                                    " is below the grid spacing");
    for (int a = 0; a < grid.dim(); ++a)
        if (ix[a] < 0 || ix[a] >= grid.nodes(a))
            throw std::invalid_argument("cylinder_at: center is not a grid node");
    if (it < 0 || it >= grid.steps())
        throw std::invalid_argument("cylinder_at: center is not a grid node");

    auto window = detail::time_window(grid, it, r);
    if (window[0] < 0)
        throw std::invalid_argument("cylinder_at: time window (t, t+r^2) does not intersect (0,T)");

    ParabolicCylinder cyl;
    cyl.center_x = {grid.coord(0, ix[0]), grid.dim() > 1 ? grid.coord(1, ix[1]) : 0.0};
    cyl.center_t = grid.time(it);
    cyl.radius = r;
    cyl.space_nodes = detail::ball_nodes(grid, grid.space_index(ix[0], grid.dim() > 1 ? ix[1] : 0), r);
    cyl.time_steps.reserve(static_cast<std::size_t>(window[1] - window[0] + 1));
    for (int k = window[0]; k <= window[1]; ++k) cyl.time_steps.push_back(k);
    return cyl;
}

}  // namespace parnewt
