#include "mgsr/prolongation.hpp"

#include <algorithm>

#include "mgsr/error.hpp"
#include "mgsr/spline.hpp"
#include "mgsr/windows.hpp"

namespace mgsr {

namespace {

constexpr int kWindow = 6;
constexpr int kStride = 2;
constexpr int kBase = 4;

std::variant<LinearStencil, Generator> load_model(const WeightsContainer& w) {
  const std::string kind = w.kind();
  if (kind == "linear_stencil") return LinearStencil(w);
  if (kind == "generator") {
    Generator g(w);
    if (g.input_side() != kWindow || g.base_factor() != kBase) {
      throw WeightsError("generator must map 6x6 windows to 24x24");
    }
    return g;
  }
  throw WeightsError("unknown weights kind '" + kind + "'");
}

}  // namespace

SplineProlongation::SplineProlongation(int factor) : factor_(factor) {
  if (factor < 2) throw ConfigError("spline factor must be >= 2");
}

Grid SplineProlongation::apply(const Grid& coarse) const { return spline_prolong(coarse, factor_); }

std::optional<NormalizationSpec> descriptor_spec(const WeightsContainer& weights) {
  const auto& arch = weights.architecture();
  if (!arch.contains("normalization")) return std::nullopt;
  NormalizationSpec spec{arch["normalization"].at("p_min").get<double>(), arch["normalization"].at("p_max").get<double>()};
  spec.validate();
  return spec;
}

LearnedProlongation::LearnedProlongation(const WeightsContainer& weights, int compositions, NormalizationMode mode,
                                         std::optional<NormalizationSpec> spec_override)
    : model_(load_model(weights)), compositions_(compositions), mode_(mode) {
  if (compositions < 1) throw ConfigError("learned prolongation needs at least one composition");
  spec_ = spec_override.value_or(descriptor_spec(weights).value_or(NormalizationSpec{}));
  spec_.validate();
}

int LearnedProlongation::total_factor() const {
  int f = 1;
  for (int c = 0; c < compositions_; ++c) f *= kBase;
  return f;
}

std::string LearnedProlongation::label() const {
  return std::holds_alternative<LinearStencil>(model_) ? "linear" : "gan";
}

Grid LearnedProlongation::apply_stage(const Grid& coarse) const {
  if (coarse.n() < kWindow) throw ShapeError("learned prolongation needs n >= 6");
  const double fine_h = coarse.h() / kBase;

  NormalizationSpec spec = spec_;
  if (mode_ == NormalizationMode::PerGrid) {
    spec = spec_.rescaled_to(coarse);
    if (spec.p_max == 0.0) return Grid(coarse.n() * kBase, fine_h);
  }

  const WindowSet set = window_decompose(symlog_normalize(coarse, spec), kWindow, kStride);
  const StitchPlan plan(coarse.n(), kWindow, kStride, kBase);
  const int n_l = plan.window_fine();
  std::vector<std::vector<double>> blocks(set.windows.size());
  for (std::size_t w = 0; w < set.windows.size(); ++w) {
    if (const auto* stencil = std::get_if<LinearStencil>(&model_)) {
      const int kr = set.offsets[w].row / kStride;
      const int kc = set.offsets[w].col / kStride;
      blocks[w].assign(static_cast<std::size_t>(n_l) * n_l, 0.0);
      stencil->apply_block(set.windows[w], plan.local_begin(kr), plan.local_end(kr), plan.local_begin(kc),
                           plan.local_end(kc), blocks[w]);
    } else {
      blocks[w] = std::get<Generator>(model_).infer(set.windows[w]);
    }
    for (double& v : blocks[w]) v = std::clamp(v, -1.0, 1.0);
  }
  Grid fine = window_stitch(blocks, set.offsets, coarse.n(), kBase, fine_h, kWindow, kStride);
  return symlog_denormalize(fine, spec);
}

Grid LearnedProlongation::apply(const Grid& coarse) const {
  Grid g = coarse;
  for (int c = 0; c < compositions_; ++c) g = apply_stage(g);
  return g;
}

Grid learned_prolong(const Grid& coarse, const WeightsContainer& weights, int compositions, NormalizationMode mode) {
  return LearnedProlongation(weights, compositions, mode).apply(coarse);
}

std::shared_ptr<const ProlongationOperator> make_operator(const std::string& description, int total_factor,
                                                          NormalizationMode mode) {
  if (description == "spline") return std::make_shared<SplineProlongation>(total_factor);
  const auto colon = description.find(':');
  if (colon == std::string::npos) throw ConfigError("unknown operator '" + description + "'");
  const std::string kind = description.substr(0, colon);
  const std::string path = description.substr(colon + 1);
  if (kind != "linear" && kind != "gan") throw ConfigError("unknown operator kind '" + kind + "'");

  int compositions = 0;
  int f = 1;
  while (f < total_factor) {
    f *= kBase;
    ++compositions;
  }
  if (f != total_factor || compositions == 0) {
    throw ConfigError("learned operators need a total factor that is a power of 4, got " + std::to_string(total_factor));
  }
  WeightsContainer w = read_srwt(path);
  const std::string expected = kind == "linear" ? "linear_stencil" : "generator";
  if (w.kind() != expected) throw WeightsError(path + ": expected " + expected + " weights, found '" + w.kind() + "'");
  return std::make_shared<LearnedProlongation>(w, compositions, mode);
}

}  // namespace mgsr
