#include "parnewt/sampling.hpp"

#include <algorithm>
#include <cmath>

namespace parnewt::sampling {

std::vector<double> axis_samples(double lo, double hi, int density, std::mt19937_64& rng) {
    std::vector<double> out;
    if (hi <= lo) {
        out.push_back(lo);
        return out;
    }
    const int n = std::max(2, density);
    out.reserve(static_cast<std::size_t>(2 * n - 1));
    for (int i = 0; i < n; ++i)
        out.push_back(lo + (hi - lo) * static_cast<double>(i) / (n - 1));
    for (int i = 0; i < n - 1; ++i)
        out.push_back(lo + (hi - lo) * unit_double(rng));
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<std::array<double, 2>> unit_directions(int dim, int extra, std::mt19937_64& rng) {
    std::vector<std::array<double, 2>> dirs;
    if (dim == 1) {
        dirs.push_back({1.0, 0.0});
        return dirs;
    }
    dirs.push_back({1.0, 0.0});
    dirs.push_back({0.0, 1.0});
    for (int i = 0; i < extra; ++i) {
        const double theta = 2.0 * M_PI * unit_double(rng);
        dirs.push_back({std::cos(theta), std::sin(theta)});
    }
    return dirs;
}

std::vector<int> node_subsample(const Grid& grid, int max_count) {
    const int total = grid.node_count();
    std::vector<int> out;
    if (total <= max_count) {
        out.resize(static_cast<std::size_t>(total));
        for (int i = 0; i < total; ++i) out[static_cast<std::size_t>(i)] = i;
        return out;
    }
    const double stride = static_cast<double>(total - 1) / (max_count - 1);
    out.reserve(static_cast<std::size_t>(max_count));
    for (int i = 0; i < max_count; ++i)
        out.push_back(static_cast<int>(std::llround(i * stride)));
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

}  // namespace parnewt::sampling
