#pragma once

// Overlapping-window decomposition of a coarse grid and central-tile
// reassembly of the per-window fine outputs.

#include <utility>
#include <vector>

#include "mgsr/grid.hpp"

namespace mgsr {

struct WindowOffset {
  int row = 0;
  int col = 0;
  bool operator==(const WindowOffset&) const = default;
};

struct WindowSet {
  int n_s = 6;
  int stride = 2;
  int coarse_n = 0;
  std::vector<WindowOffset> offsets;       ///< row-major over the offset lattice
  std::vector<std::vector<double>> windows; ///< n_s*n_s values each, row-major

  /// Offsets per dimension, (coarse_n - n_s) / stride + 1.
  int per_dim() const { return (coarse_n - n_s) / stride + 1; }
};

/// Copies every n_s x n_s window at offsets {0, stride, ..., n - n_s} per
/// dimension. Throws ShapeError if n < n_s or (n - n_s) % stride != 0.
WindowSet window_decompose(const Grid& coarse, int n_s = 6, int stride = 2);

/// Ownership of fine cells along one dimension. Window k writes its local
/// indices [local_begin[k], local_end[k]) to fine indices starting at
/// base_factor * stride * k + local_begin[k]. Interior windows own their
/// central block; the first and last windows also own the domain edges.
class StitchPlan {
 public:
  /// Throws ConfigError unless the central blocks tile exactly, i.e.
  /// (n_s + 2) * base_factor - n_s * base_factor == stride * base_factor.
  StitchPlan(int coarse_n, int n_s, int stride, int base_factor);

  int coarse_n() const { return coarse_n_; }
  int fine_n() const { return coarse_n_ * base_factor_; }
  int window_fine() const { return n_s_ * base_factor_; }
  int per_dim() const { return per_dim_; }
  int fine_origin(int k) const { return base_factor_ * stride_ * k; }
  int local_begin(int k) const { return ranges_[k].first; }
  int local_end(int k) const { return ranges_[k].second; }

 private:
  int coarse_n_, n_s_, stride_, base_factor_, per_dim_;
  std::vector<std::pair<int, int>> ranges_;
};

/// Assembles the fine grid from per-window outputs of side n_s*base_factor.
/// Each fine cell is written by exactly one window; a violation throws
/// Error. `fine_h` is the spacing of the output grid.
Grid window_stitch(const std::vector<std::vector<double>>& fine_windows,
                   const std::vector<WindowOffset>& offsets, int coarse_n, int base_factor,
                   double fine_h, int n_s = 6, int stride = 2);

}  // namespace mgsr
