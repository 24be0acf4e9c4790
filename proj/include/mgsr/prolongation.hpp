#pragma once

// Coarse-to-fine transfer operators plugged into the multigrid cycle.

#include <memory>
#include <optional>
#include <string>
#include <variant>

#include "mgsr/generator.hpp"
#include "mgsr/grid.hpp"
#include "mgsr/linear_stencil.hpp"
#include "mgsr/symlog.hpp"
#include "mgsr/weights.hpp"

namespace mgsr {

/// Immutable after construction; apply() is const and thread-safe.
class ProlongationOperator {
 public:
  virtual ~ProlongationOperator() = default;

  /// Maps an n x n grid to an (n * total_factor())^2 grid.
  virtual Grid apply(const Grid& coarse) const = 0;
  virtual int base_factor() const = 0;
  virtual int total_factor() const = 0;
  /// Short tag recorded in convergence traces ("spline", "linear", "gan").
  virtual std::string label() const = 0;
};

class SplineProlongation final : public ProlongationOperator {
 public:
  explicit SplineProlongation(int factor);
  Grid apply(const Grid& coarse) const override;
  int base_factor() const override { return factor_; }
  int total_factor() const override { return factor_; }
  std::string label() const override { return "spline"; }

 private:
  int factor_;
};

enum class NormalizationMode {
  Global,  ///< the fixed spec stored with the weights (or the default bounds)
  PerGrid  ///< spec rescaled to max|g| of each grid, same dynamic range
};

/// Window-based learned 4x operator, composed `compositions` times. Each
/// stage: symlog normalise, decompose into overlapping 6x6 windows
/// (stride 2), infer a 24x24 block per window, clamp to [-1, 1], stitch the
/// owned blocks, denormalise.
class LearnedProlongation final : public ProlongationOperator {
 public:
  LearnedProlongation(const WeightsContainer& weights, int compositions,
                      NormalizationMode mode = NormalizationMode::PerGrid,
                      std::optional<NormalizationSpec> spec_override = std::nullopt);

  Grid apply(const Grid& coarse) const override;
  /// One 4x stage.
  Grid apply_stage(const Grid& coarse) const;

  int base_factor() const override { return 4; }
  int total_factor() const override;
  int compositions() const { return compositions_; }
  std::string label() const override;
  const NormalizationSpec& spec() const { return spec_; }

 private:
  std::variant<LinearStencil, Generator> model_;
  int compositions_;
  NormalizationMode mode_;
  NormalizationSpec spec_;
};

/// Normalisation bounds stored in a weights descriptor, if any.
std::optional<NormalizationSpec> descriptor_spec(const WeightsContainer& weights);

/// Free-function form of LearnedProlongation::apply.
Grid learned_prolong(const Grid& coarse, const WeightsContainer& weights, int compositions,
                     NormalizationMode mode = NormalizationMode::PerGrid);

/// Builds an operator from "spline", "linear:PATH" or "gan:PATH" for the
/// requested total factor. Learned operators need a power of 4.
std::shared_ptr<const ProlongationOperator> make_operator(const std::string& description, int total_factor,
                                                          NormalizationMode mode = NormalizationMode::PerGrid);

}  // namespace mgsr
