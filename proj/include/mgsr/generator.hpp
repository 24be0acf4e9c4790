#pragma once

// Convolutional super-resolution generator (inference only).
//
// The network is described by the "layers" array of a WeightsContainer
// descriptor and interpreted layer by layer. Supported layer types:
//   conv        3x3 (or k x k) convolution with circular padding + activation
//   res_block   conv -> activation -> conv, added to the block input
//   global_skip adds the saved output of an earlier named conv layer
//   upsample    conv to scale^2 * C channels, sub-pixel shuffle, activation
// Arithmetic is single precision.

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "mgsr/weights.hpp"

namespace mgsr {

/// The pinned architecture: 6x6x1 input, conv 1->32 (leaky 0.2), four
/// 32-channel residual blocks, global skip from the first conv, two 2x
/// sub-pixel upsample stages (conv 32->128), conv 32->1, tanh.
nlohmann::json pinned_generator_architecture();

/// Weights for the pinned architecture drawn from N(0, stddev^2) (biases
/// zero) with a seeded Mersenne twister. stddev = 0 gives the zero network.
WeightsContainer random_generator_weights(std::uint64_t seed, double stddev);

class Generator {
 public:
  /// Validates every layer against its tensors. Throws WeightsError.
  explicit Generator(const WeightsContainer& weights);

  int input_side() const { return n_s_; }
  int output_side() const { return n_s_ * base_factor_; }
  int base_factor() const { return base_factor_; }

  /// Forward pass for one n_s x n_s window, row-major. Returns
  /// output_side()^2 values.
  std::vector<double> infer(std::span<const double> window) const;

 private:
  struct Conv {
    int in = 0, out = 0, kernel = 3;
    std::vector<float> weight;  // [out][in][k][k]
    std::vector<float> bias;    // [out]
  };
  enum class Act { None, Leaky, Tanh };
  struct Layer {
    std::string type;
    std::string name;
    Conv conv;
    Conv conv2;  // res_block only
    Act act = Act::None;
    float slope = 0.2f;
    int scale = 1;
    int skip_from = -1;  // index of the saved layer for global_skip
  };

  int n_s_ = 6;
  int base_factor_ = 4;
  std::vector<Layer> layers_;
};

/// Convenience wrapper around Generator::infer.
std::vector<double> generator_infer(std::span<const double> window, const WeightsContainer& weights);

}  // namespace mgsr
