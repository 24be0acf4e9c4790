#include "mgsr/symlog.hpp"

#include <algorithm>
#include <cmath>

#include "mgsr/error.hpp"

namespace mgsr {

void NormalizationSpec::validate() const {
  if (!(std::isfinite(p_min) && std::isfinite(p_max) && p_min > 0.0 && p_min < p_max)) {
    throw ConfigError("normalization spec requires 0 < p_min < p_max");
  }
}

NormalizationSpec NormalizationSpec::rescaled_to(const Grid& g) const {
  double peak = 0.0;
  for (double v : g.values()) peak = std::max(peak, std::abs(v));
  if (peak == 0.0) return {0.0, 0.0};
  return {peak * (p_min / p_max), peak};
}

double symlog_normalize(double v, const NormalizationSpec& spec) {
  if (!std::isfinite(v)) throw InputError("symlog_normalize: non-finite input");
  const double mag = std::abs(v);
  if (mag <= spec.p_min) return 0.0;
  if (mag >= spec.p_max) return std::copysign(1.0, v);
  const double y = std::log(mag / spec.p_min) / std::log(spec.p_max / spec.p_min);
  return std::copysign(std::clamp(y, 0.0, 1.0), v);
}

double symlog_denormalize(double y, const NormalizationSpec& spec) {
  if (!(y >= -1.0 && y <= 1.0)) throw InputError("symlog_denormalize: value outside [-1, 1]");
  if (y == 0.0) return 0.0;
  const double mag = spec.p_min * std::pow(spec.p_max / spec.p_min, std::abs(y));
  return std::copysign(mag, y);
}

Grid symlog_normalize(const Grid& g, const NormalizationSpec& spec) {
  spec.validate();
  Grid out = g;
  for (double& v : out.values()) v = symlog_normalize(v, spec);
  return out;
}

Grid symlog_denormalize(const Grid& g, const NormalizationSpec& spec) {
  spec.validate();
  Grid out = g;
  for (double& v : out.values()) v = symlog_denormalize(v, spec);
  return out;
}

}  // namespace mgsr
