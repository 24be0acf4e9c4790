#pragma once

// Batch experiments: many solves per schedule, trace aggregation, iteration
// snapshots and radial power spectra.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "mgsr/grid.hpp"
#include "mgsr/multigrid.hpp"
#include "mgsr/prolongation.hpp"

namespace mgsr {

/// Radially binned power |FFT(g)|^2, averaged over the modes of each integer
/// shell round(|k|) = 0..n/2. Corner modes beyond n/2 are not binned.
struct SpectrumRecord {
  std::vector<double> power;       ///< index = shell
  std::vector<std::uint64_t> modes;

  std::size_t shells() const { return power.size(); }
  /// Sum of shell powers (mean per mode) over shells > k.
  double power_above(int k) const;
};

SpectrumRecord power_spectrum(const Grid& g);
/// CSV: shell,modes,power
void write_spectrum_csv(const SpectrumRecord& s, std::ostream& os);

struct ScheduleSpec {
  std::string name;
  std::string kind = "single";  ///< single | alternate | gs-only
  std::string op = "spline";    ///< spline | linear:PATH | gan:PATH
  std::string op_odd;           ///< second operator for alternate

  nlohmann::json to_json() const;
  static ScheduleSpec from_json(const nlohmann::json& j);
};

struct RunSpec {
  std::filesystem::path manifest;  ///< fields.json written by datagen
  std::string split = "heldout";
  int count = 100;
  MultigridConfig config;
  std::vector<ScheduleSpec> schedules;
  std::string p0 = "random";  ///< zero | random
  std::uint64_t seed = 0;
  std::filesystem::path out_dir = "bench_out";
  int workers = 1;
  NormalizationMode normalization = NormalizationMode::PerGrid;

  nlohmann::json to_json() const;
  /// Relative paths are resolved against `base_dir`.
  static RunSpec from_json(const nlohmann::json& j, const std::filesystem::path& base_dir = {});
  static RunSpec load(const std::filesystem::path& path);
};

nlohmann::json config_to_json(const MultigridConfig& cfg);
MultigridConfig config_from_json(const nlohmann::json& j);

struct Problem {
  int id = 0;
  Grid source;
};

/// Loads the first `count` fields of the split named by the run spec.
std::vector<Problem> load_problems(const RunSpec& spec);

/// "zero" or "random" (uniform(-1, 1), mean removed). Random guesses are
/// seeded from (seed, problem id).
Grid initial_guess(const std::string& kind, int n, double h, std::uint64_t seed, int problem_id);

struct ProblemResult {
  int problem_id = 0;
  std::string schedule;
  ConvergenceTrace trace;
};

struct AggregateRow {
  std::string schedule;
  int iteration = 0;
  int count = 0;  ///< problems with a record at this iteration
  double mean_norm_dp = 0.0;
  double mean_log10 = 0.0;
  double std_log10 = 0.0;
};

struct BatchReport {
  std::vector<std::string> schedules;
  std::vector<ProblemResult> results;  ///< sorted by (problem id, schedule order)
  std::vector<AggregateRow> aggregate;

  const ProblemResult* find(int problem_id, const std::string& schedule) const;
  std::vector<int> problem_ids() const;
};

/// Runs every schedule on every problem. Schedule construction errors are
/// thrown; non-convergence is recorded.
BatchReport run_problems(const RunSpec& spec, const std::vector<Problem>& problems);
BatchReport run_batch(const RunSpec& spec);

/// Log-aggregates traces: zero norms enter as log10(1e-300).
std::vector<AggregateRow> aggregate_traces(const std::vector<ProblemResult>& results,
                                           const std::vector<std::string>& schedules);

/// Writes traces/{schedule}/problem_{id}.csv, aggregate.csv,
/// iterations.csv and ratios.csv under `out_dir`.
void write_batch_outputs(const BatchReport& report, const std::filesystem::path& out_dir);

/// Parses "1..15", "3" or "1,2,5" (and mixtures such as "1..3,8").
std::vector<int> parse_iteration_list(const std::string& text);

/// Solves one problem per schedule and writes the solution after each
/// listed iteration to snapshots/problem_{id}/{schedule}/iter_{k}.pgrd, plus
/// spectra.csv (iter,shell,modes,power). Returns the written grid files.
std::vector<std::filesystem::path> snapshot_series(const RunSpec& spec, int problem_id,
                                                   const std::vector<int>& iterations);

}  // namespace mgsr
