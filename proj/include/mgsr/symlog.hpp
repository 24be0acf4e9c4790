#pragma once

#include "mgsr/grid.hpp"

namespace mgsr {

/// Magnitude bounds of the symmetric-log map. Magnitudes at or below
/// p_min map to 0, magnitudes at or above p_max map to +/-1.
struct NormalizationSpec {
  double p_min = 1e-10;
  double p_max = 1e-3;

  /// Throws ConfigError unless 0 < p_min < p_max, both finite.
  void validate() const;

  /// Spec rescaled so its ceiling equals max|g| while keeping the
  /// p_max / p_min dynamic range. An all-zero grid yields {0, 0}, which
  /// is not a valid spec; callers must check p_max > 0.
  NormalizationSpec rescaled_to(const Grid& g) const;

  bool operator==(const NormalizationSpec&) const = default;
};

double symlog_normalize(double v, const NormalizationSpec& spec);
double symlog_denormalize(double y, const NormalizationSpec& spec);

/// Elementwise sign(v) * clamp(ln(|v|/p_min) / ln(p_max/p_min), 0, 1).
/// Throws InputError on non-finite values.
Grid symlog_normalize(const Grid& g, const NormalizationSpec& spec);

/// Elementwise sign(y) * p_min * (p_max/p_min)^|y|, with 0 -> 0.
/// Throws InputError for values outside [-1, 1].
Grid symlog_denormalize(const Grid& g, const NormalizationSpec& spec);

}  // namespace mgsr
