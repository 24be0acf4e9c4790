#pragma once

// Training windows for the learned prolongation operators.
//
// MGDS layout, little-endian:
//   "MGDS" | u32 version (1) | u32 count | per sample: u32 field id,
//   u8 level, u16 row, u16 col, 36 f32 inputs, 576 f32 targets

#include <cstdint>
#include <filesystem>
#include <vector>

#include <json.hpp>

#include "mgsr/grid.hpp"
#include "mgsr/linear_stencil.hpp"
#include "mgsr/symlog.hpp"

namespace mgsr {

struct TrainingSample {
  std::uint32_t field_id = 0;
  std::uint8_t level = 0;  ///< input grid is the field restricted l times
  std::uint16_t row = 0;   ///< window offset on the level-l grid
  std::uint16_t col = 0;
  std::vector<float> input;   ///< 6x6, normalised
  std::vector<float> target;  ///< 24x24 from level l-2, normalised

  WindowPair as_pair() const;
};

struct SourceField {
  int id = 0;
  Grid pressure;
};

struct SamplingOptions {
  int count = 1000;
  std::uint64_t seed = 0;
  int min_level = 2;
  int max_level = 5;
  int window = 6;
  int stride = 2;  ///< window offsets are multiples of the stride
};

/// Draws `count` samples: a field uniformly, a level l uniformly from
/// [min_level, max_level], an aligned window on the level-l grid, and the
/// matching 24x24 window of the level-(l-2) grid. Levels are built by
/// even-index injection. Throws InputError for count <= 0 or no fields.
std::vector<TrainingSample> sample_training_windows(const std::vector<SourceField>& fields,
                                                    const SamplingOptions& options, const NormalizationSpec& spec);

/// Spline reference for each sample: the level-l field prolonged 4x with the
/// periodic cubic spline over the whole grid, cut to the sample's 24x24
/// target window and normalised with `spec`. Fields are looked up by id.
std::vector<std::vector<double>> spline_window_predictions(const std::vector<TrainingSample>& samples,
                                                           const std::vector<SourceField>& fields,
                                                           const NormalizationSpec& spec);

/// Window-only spline baseline: the 6x6 input treated as a periodic grid
/// and upsampled 4x with the cubic spline, in normalised space.
std::vector<double> spline_window_upsample(std::span<const double> window);

/// Size of the distinct-window space for `field_count` fields of side n.
std::uint64_t count_window_space(int field_count, int n, const SamplingOptions& options);

/// Spec from corpus statistics: p_max = max|p| over all fields, p_min keeps
/// the dynamic range of `reference`.
NormalizationSpec corpus_spec(const std::vector<SourceField>& fields, const NormalizationSpec& reference = {});

void write_mgds(const std::vector<TrainingSample>& samples, const std::filesystem::path& path);
std::vector<TrainingSample> read_mgds(const std::filesystem::path& path);

struct DatasetManifest {
  std::uint32_t format_version = 1;
  std::uint64_t count = 0;
  std::uint64_t seed = 0;
  NormalizationSpec spec;
  std::vector<int> source_fields;
  std::string split;  ///< "train", "heldout" or "all"
  std::uint64_t window_space = 0;

  nlohmann::json to_json() const;
  static DatasetManifest from_json(const nlohmann::json& j);
};

void write_manifest(const DatasetManifest& m, const std::filesystem::path& path);
DatasetManifest read_manifest(const std::filesystem::path& path);

/// Samples are i.i.d., so the trailing `holdout_fraction` of them is held out.
void split_samples(const std::vector<TrainingSample>& samples, double holdout_fraction,
                   std::vector<WindowPair>& train, std::vector<WindowPair>& heldout);

}  // namespace mgsr
