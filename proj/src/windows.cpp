#include "mgsr/windows.hpp"

#include <cstdint>

#include "mgsr/error.hpp"

namespace mgsr {

WindowSet window_decompose(const Grid& coarse, int n_s, int stride) {
  const int n = coarse.n();
  if (n_s < 1 || stride < 1) throw ConfigError("window_decompose: n_s and stride must be positive");
  if (n < n_s || (n - n_s) % stride != 0) {
    throw ShapeError("window_decompose: (n - n_s) must be a non-negative multiple of the stride (n=" +
                     std::to_string(n) + ")");
  }
  WindowSet set;
  set.n_s = n_s;
  set.stride = stride;
  set.coarse_n = n;
  const int per = set.per_dim();
  set.offsets.reserve(static_cast<std::size_t>(per) * per);
  set.windows.reserve(static_cast<std::size_t>(per) * per);
  for (int a = 0; a < per; ++a) {
    for (int b = 0; b < per; ++b) {
      const WindowOffset off{a * stride, b * stride};
      std::vector<double> w(static_cast<std::size_t>(n_s) * n_s);
      for (int i = 0; i < n_s; ++i)
        for (int j = 0; j < n_s; ++j) w[static_cast<std::size_t>(i) * n_s + j] = coarse(off.row + i, off.col + j);
      set.offsets.push_back(off);
      set.windows.push_back(std::move(w));
    }
  }
  return set;
}

StitchPlan::StitchPlan(int coarse_n, int n_s, int stride, int base_factor)
    : coarse_n_(coarse_n), n_s_(n_s), stride_(stride), base_factor_(base_factor) {
  if (coarse_n < n_s || (coarse_n - n_s) % stride != 0) {
    throw ShapeError("StitchPlan: coarse grid is not tiled by the window lattice");
  }
  const int n_l = n_s * base_factor;
  const int central = (n_s + 2) * base_factor - n_l;
  if (central != stride * base_factor || central > n_l) {
    throw ConfigError("StitchPlan: central blocks do not tile the fine grid for this stride/factor");
  }
  per_dim_ = (coarse_n - n_s) / stride + 1;
  const int c_begin = (n_l - central) / 2;
  const int c_end = c_begin + central;
  ranges_.resize(per_dim_);
  for (int k = 0; k < per_dim_; ++k) {
    ranges_[k] = {k == 0 ? 0 : c_begin, k == per_dim_ - 1 ? n_l : c_end};
  }
}

Grid window_stitch(const std::vector<std::vector<double>>& fine_windows, const std::vector<WindowOffset>& offsets,
                   int coarse_n, int base_factor, double fine_h, int n_s, int stride) {
  const StitchPlan plan(coarse_n, n_s, stride, base_factor);
  const int per = plan.per_dim();
  const int n_l = plan.window_fine();
  if (fine_windows.size() != offsets.size() || offsets.size() != static_cast<std::size_t>(per) * per) {
    throw ShapeError("window_stitch: window count does not match the offset lattice");
  }
  Grid fine(plan.fine_n(), fine_h);
  std::vector<std::uint8_t> writes(fine.size(), 0);
  for (std::size_t w = 0; w < offsets.size(); ++w) {
    const auto& block = fine_windows[w];
    if (block.size() != static_cast<std::size_t>(n_l) * n_l) throw ShapeError("window_stitch: bad window size");
    const int kr = offsets[w].row / stride;
    const int kc = offsets[w].col / stride;
    if (offsets[w].row % stride != 0 || offsets[w].col % stride != 0 || kr >= per || kc >= per) {
      throw ShapeError("window_stitch: offset not on the window lattice");
    }
    for (int a = plan.local_begin(kr); a < plan.local_end(kr); ++a) {
      const int fr = plan.fine_origin(kr) + a;
      for (int b = plan.local_begin(kc); b < plan.local_end(kc); ++b) {
        const int fc = plan.fine_origin(kc) + b;
        fine(fr, fc) = block[static_cast<std::size_t>(a) * n_l + b];
        ++writes[static_cast<std::size_t>(fr) * fine.n() + fc];
      }
    }
  }
  for (auto count : writes) {
    if (count != 1) throw Error("window_stitch: fine cell not owned by exactly one window");
  }
  return fine;
}

}  // namespace mgsr
