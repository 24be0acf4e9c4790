#pragma once

// Least-squares fitted affine 4x upsampling stencil: every output of a
// 24x24 window is an affine combination of the 36 values of its 6x6 input.

#include <span>
#include <vector>

#include "mgsr/symlog.hpp"
#include "mgsr/weights.hpp"

namespace mgsr {

struct WindowPair {
  std::vector<double> input;   ///< 36 normalised coarse values
  std::vector<double> target;  ///< 576 normalised fine values
};

/// Ridge-regularised least squares, one problem per output position,
/// sharing one factorisation. The bias column is not penalised. Result is a
/// "linear_stencil" container holding tensor "stencil" of shape 576 x 37
/// (36 weights then bias). Throws InputError for fewer than 36 samples and
/// NumericalError when ridge == 0 and the normal equations are singular.
WeightsContainer fit_linear_stencil(std::span<const WindowPair> samples, double ridge,
                                    const NormalizationSpec& spec = {});

class LinearStencil {
 public:
  explicit LinearStencil(const WeightsContainer& weights);

  static constexpr int kInputSide = 6;
  static constexpr int kOutputSide = 24;

  std::vector<double> apply(std::span<const double> window) const;

  /// Evaluates only outputs with local row in [r0, r1) and column in
  /// [c0, c1); other entries of `out` are left untouched.
  void apply_block(std::span<const double> window, int r0, int r1, int c0, int c1, std::span<double> out) const;

 private:
  std::vector<double> coeffs_;  // 576 x 37
};

/// Mean squared error of `predict` over the samples' targets.
template <typename Predict>
double window_mse(std::span<const WindowPair> samples, Predict&& predict) {
  double sum = 0.0;
  std::size_t count = 0;
  for (const auto& s : samples) {
    const std::vector<double> out = predict(s.input);
    for (std::size_t k = 0; k < out.size(); ++k) {
      const double d = out[k] - s.target[k];
      sum += d * d;
    }
    count += out.size();
  }
  return count ? sum / static_cast<double>(count) : 0.0;
}

}  // namespace mgsr
