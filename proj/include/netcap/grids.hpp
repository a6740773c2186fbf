// Simplex grids used to discharge "for all p(...)" quantifiers at desk scale.
#pragma once

#include <cstddef>
#include <vector>

namespace netcap {

// All probability vectors of length `dims` whose entries are multiples of
// 1/(points_per_dim - 1).  points_per_dim >= 2; the grid includes all vertices.
std::vector<std::vector<double>> simplex_grid(std::size_t dims, std::size_t points_per_dim);

// Evenly spaced values covering [0,1].
std::vector<double> unit_grid(std::size_t points);

// The refinement used by certification passes (doubled resolution).
inline std::size_t refined(std::size_t points_per_dim) { return 2 * points_per_dim - 1; }

inline constexpr std::size_t kDefaultGridPoints = 33;

}  // namespace netcap
