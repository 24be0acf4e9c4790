#pragma once

#include <span>
#include <vector>

#include "mgsr/grid.hpp"

namespace mgsr {

/// Periodic interpolating cubic spline through `values` (unit knot spacing),
/// sampled at `factor` equally spaced points per knot interval. Sample
/// factor*i reproduces values[i] exactly.
std::vector<double> periodic_cubic_upsample(std::span<const double> values, int factor);

/// Tensor-product periodic bicubic spline prolongation. Output side is
/// coarse.n() * factor with spacing coarse.h() / factor.
Grid spline_prolong(const Grid& coarse, int factor);

}  // namespace mgsr
