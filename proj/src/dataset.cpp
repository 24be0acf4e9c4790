#include "mgsr/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <random>

#include "binary_io.hpp"
#include "mgsr/error.hpp"
#include "mgsr/multigrid.hpp"
#include "mgsr/spline.hpp"

namespace mgsr {

namespace {
constexpr std::uint32_t kMgdsVersion = 1;
constexpr int kUpFactor = 4;  // level l -> level l - 2
constexpr std::size_t kInputSize = 36;
constexpr std::size_t kTargetSize = 576;

Grid level_grid(const Grid& field, int level) { return level == 0 ? field : restrict_k(field, level); }
}  // namespace

WindowPair TrainingSample::as_pair() const {
  return {std::vector<double>(input.begin(), input.end()), std::vector<double>(target.begin(), target.end())};
}

std::vector<TrainingSample> sample_training_windows(const std::vector<SourceField>& fields,
                                                    const SamplingOptions& options, const NormalizationSpec& spec) {
  if (options.count <= 0) throw InputError("sample_training_windows: count must be positive");
  if (fields.empty()) throw InputError("sample_training_windows: no source fields");
  if (options.min_level < 2 || options.max_level < options.min_level) {
    throw ConfigError("sample_training_windows: level range must satisfy 2 <= min <= max");
  }
  if (options.window * kUpFactor != 24) throw ConfigError("sample_training_windows: window must be 6");
  spec.validate();
  for (const auto& f : fields) {
    const int n = f.pressure.n();
    if (n % (1 << options.max_level) != 0 || (n >> options.max_level) < options.window) {
      throw ShapeError("sample_training_windows: field side " + std::to_string(n) + " too small for the level range");
    }
  }

  std::mt19937_64 rng(options.seed);
  std::uniform_int_distribution<std::size_t> pick_field(0, fields.size() - 1);
  std::uniform_int_distribution<int> pick_level(options.min_level, options.max_level);

  std::vector<TrainingSample> samples;
  samples.reserve(static_cast<std::size_t>(options.count));
  const int w = options.window;
  const int wt = w * kUpFactor;
  for (int s = 0; s < options.count; ++s) {
    const SourceField& field = fields[pick_field(rng)];
    const int level = pick_level(rng);
    const Grid coarse = level_grid(field.pressure, level);
    const Grid fine = level_grid(field.pressure, level - 2);
    const int per = (coarse.n() - w) / options.stride + 1;
    std::uniform_int_distribution<int> pick_offset(0, per - 1);
    const int row = pick_offset(rng) * options.stride;
    const int col = pick_offset(rng) * options.stride;

    TrainingSample t;
    t.field_id = static_cast<std::uint32_t>(field.id);
    t.level = static_cast<std::uint8_t>(level);
    t.row = static_cast<std::uint16_t>(row);
    t.col = static_cast<std::uint16_t>(col);
    t.input.resize(kInputSize);
    t.target.resize(kTargetSize);
    for (int i = 0; i < w; ++i)
      for (int j = 0; j < w; ++j)
        t.input[static_cast<std::size_t>(i) * w + j] = static_cast<float>(symlog_normalize(coarse(row + i, col + j), spec));
    for (int i = 0; i < wt; ++i)
      for (int j = 0; j < wt; ++j)
        t.target[static_cast<std::size_t>(i) * wt + j] =
            static_cast<float>(symlog_normalize(fine(kUpFactor * row + i, kUpFactor * col + j), spec));
    samples.push_back(std::move(t));
  }
  return samples;
}

std::vector<std::vector<double>> spline_window_predictions(const std::vector<TrainingSample>& samples,
                                                           const std::vector<SourceField>& fields,
                                                           const NormalizationSpec& spec) {
  std::map<std::pair<std::uint32_t, int>, Grid> cache;
  auto prolonged = [&](std::uint32_t id, int level) -> const Grid& {
    const auto key = std::make_pair(id, level);
    if (auto it = cache.find(key); it != cache.end()) return it->second;
    const auto f = std::find_if(fields.begin(), fields.end(), [&](const SourceField& s) { return s.id == static_cast<int>(id); });
    if (f == fields.end()) throw InputError("spline_window_predictions: unknown field id " + std::to_string(id));
    return cache.emplace(key, spline_prolong(level_grid(f->pressure, level), kUpFactor)).first->second;
  };
  std::vector<std::vector<double>> out;
  out.reserve(samples.size());
  const int wt = 24;
  for (const auto& s : samples) {
    const Grid& fine = prolonged(s.field_id, s.level);
    std::vector<double> block(kTargetSize);
    for (int i = 0; i < wt; ++i)
      for (int j = 0; j < wt; ++j)
        block[static_cast<std::size_t>(i) * wt + j] =
            symlog_normalize(fine(kUpFactor * s.row + i, kUpFactor * s.col + j), spec);
    out.push_back(std::move(block));
  }
  return out;
}

std::vector<double> spline_window_upsample(std::span<const double> window) {
  if (window.size() != kInputSize) throw ShapeError("spline_window_upsample: expected 36 values");
  const Grid fine = spline_prolong(Grid(6, 1.0, std::vector<double>(window.begin(), window.end())), kUpFactor);
  return {fine.values().begin(), fine.values().end()};
}

std::uint64_t count_window_space(int field_count, int n, const SamplingOptions& options) {
  std::uint64_t per_field = 0;
  for (int l = options.min_level; l <= options.max_level; ++l) {
    const int nc = n >> l;
    if (nc < options.window) continue;
    const std::uint64_t per = static_cast<std::uint64_t>((nc - options.window) / options.stride + 1);
    per_field += per * per;
  }
  return per_field * static_cast<std::uint64_t>(field_count);
}

NormalizationSpec corpus_spec(const std::vector<SourceField>& fields, const NormalizationSpec& reference) {
  double peak = 0.0;
  for (const auto& f : fields)
    for (double v : f.pressure.values()) peak = std::max(peak, std::abs(v));
  if (peak == 0.0) throw InputError("corpus_spec: all fields are zero");
  NormalizationSpec spec{peak * (reference.p_min / reference.p_max), peak};
  spec.validate();
  return spec;
}

void write_mgds(const std::vector<TrainingSample>& samples, const std::filesystem::path& path) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw IoError("cannot open " + path.string() + " for writing");
  os.write("MGDS", 4);
  detail::put_u32(os, kMgdsVersion);
  detail::put_u32(os, static_cast<std::uint32_t>(samples.size()));
  for (const auto& s : samples) {
    if (s.input.size() != kInputSize || s.target.size() != kTargetSize) throw ShapeError("write_mgds: bad sample size");
    detail::put_u32(os, s.field_id);
    detail::put_u8(os, s.level);
    detail::put_u16(os, s.row);
    detail::put_u16(os, s.col);
    for (float v : s.input) detail::put_f32(os, v);
    for (float v : s.target) detail::put_f32(os, v);
  }
  if (!os) throw IoError("write failed: " + path.string());
}

std::vector<TrainingSample> read_mgds(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open " + path.string());
  detail::expect_magic(is, "MGDS", path.string());
  if (const auto v = detail::get_u32(is); v != kMgdsVersion) {
    throw IoError(path.string() + ": unsupported MGDS version " + std::to_string(v));
  }
  const auto count = detail::get_u32(is);
  std::vector<TrainingSample> samples(count);
  for (auto& s : samples) {
    s.field_id = detail::get_u32(is);
    s.level = detail::get_u8(is);
    s.row = detail::get_u16(is);
    s.col = detail::get_u16(is);
    s.input.resize(kInputSize);
    s.target.resize(kTargetSize);
    for (float& v : s.input) v = detail::get_f32(is);
    for (float& v : s.target) v = detail::get_f32(is);
  }
  return samples;
}

nlohmann::json DatasetManifest::to_json() const {
  return {{"format_version", format_version},
          {"count", count},
          {"seed", seed},
          {"normalization", {{"p_min", spec.p_min}, {"p_max", spec.p_max}}},
          {"source_fields", source_fields},
          {"split", split},
          {"window_space", window_space}};
}

DatasetManifest DatasetManifest::from_json(const nlohmann::json& j) {
  DatasetManifest m;
  m.format_version = j.at("format_version");
  m.count = j.at("count");
  m.seed = j.at("seed");
  m.spec = {j.at("normalization").at("p_min"), j.at("normalization").at("p_max")};
  m.source_fields = j.at("source_fields").get<std::vector<int>>();
  m.split = j.value("split", std::string{"all"});
  m.window_space = j.value("window_space", std::uint64_t{0});
  return m;
}

void write_manifest(const DatasetManifest& m, const std::filesystem::path& path) {
  std::ofstream os(path);
  if (!os) throw IoError("cannot write " + path.string());
  os << m.to_json().dump(2) << '\n';
}

DatasetManifest read_manifest(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open " + path.string());
  try {
    return DatasetManifest::from_json(nlohmann::json::parse(is));
  } catch (const nlohmann::json::exception& e) {
    throw IoError(path.string() + ": " + e.what());
  }
}

void split_samples(const std::vector<TrainingSample>& samples, double holdout_fraction, std::vector<WindowPair>& train,
                   std::vector<WindowPair>& heldout) {
  if (!(holdout_fraction >= 0.0 && holdout_fraction < 1.0)) throw InputError("holdout fraction must be in [0, 1)");
  const auto n_hold = static_cast<std::size_t>(std::llround(holdout_fraction * static_cast<double>(samples.size())));
  const std::size_t n_train = samples.size() - n_hold;
  train.clear();
  heldout.clear();
  for (std::size_t k = 0; k < samples.size(); ++k) (k < n_train ? train : heldout).push_back(samples[k].as_pair());
}

}  // namespace mgsr
