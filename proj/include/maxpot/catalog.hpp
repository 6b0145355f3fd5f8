#pragma once

#include <map>
#include <string>
#include <vector>

#include "maxpot/grid.hpp"

namespace maxpot {

using CatalogParams = std::map<std::string, double>;

/// Samples a named test function at the grid nodes.
///
/// Catalog:
///   gaussian            exp(-|x - c|^2 / sigma^2); params sigma (1), cx, cy, cz (0)
///   ball_indicator      1 on |x| < R, else 0; params R (1)
///   smooth_bump         C^inf plateau bump: 1 on |x| <= r0, smooth decay to 0 at R;
///                       params r0 (0.5), R (1.5)
///   truncated_power     |x|^{-a} clipped to h^{-a} at nodes with |x| < h; params a, 0 < a < n
///   half_space          indicator of x_axis > offset; params axis (0), offset (0)
///   random_bandlimited  seeded low-mode trigonometric noise under a smooth window;
///                       params seed (1), kmax (3)
///   affine              c0 + cx*x1 + cy*x2 + cz*x3; params c0, cx, cy, cz
Field sample_catalog(const std::string& name, const CatalogParams& params, const Grid& grid);

std::vector<std::string> catalog_names();

/// Smooth transition equal to 1 for s <= 0 and 0 for s >= 1 (C^inf in between).
double smooth_step_down(double s);

}  // namespace maxpot
