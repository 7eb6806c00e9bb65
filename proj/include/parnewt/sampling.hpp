#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "parnewt/grid.hpp"

namespace parnewt::sampling {

/// Uniform double in [0,1) from the top 53 bits of the engine output.
/// (std::uniform_real_distribution is implementation-defined; this is not.)
inline double unit_double(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1p-53;
}

/// Axis sample set: linspace(lo, hi, density) plus density-1 seeded interior
/// points, sorted. Endpoints are always included so lattice sups see the
/// extremes of the box.
std::vector<double> axis_samples(double lo, double hi, int density, std::mt19937_64& rng);

/// Unit directions for quadratic-form checks: coordinate axes first, then
/// `extra` seeded random directions. dim must be 1 or 2.
std::vector<std::array<double, 2>> unit_directions(int dim, int extra, std::mt19937_64& rng);

/// Up to max_count space-time node indices, strided deterministically,
/// always covering the first and last node.
std::vector<int> node_subsample(const Grid& grid, int max_count);

}  // namespace parnewt::sampling
