// mgsr command-line driver.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "mgsr/bench.hpp"
#include "mgsr/datagen.hpp"
#include "mgsr/dataset.hpp"
#include "mgsr/error.hpp"
#include "mgsr/linear_stencil.hpp"
#include "mgsr/multigrid.hpp"
#include "mgsr/spline.hpp"

namespace fs = std::filesystem;
using namespace mgsr;

namespace {

constexpr int kNotConverged = 3;

struct DatagenArgs {
  DatagenOptions opt;
  std::string out;
};

int run_datagen(const DatagenArgs& a) {
  const auto manifest = generate_fields(a.opt, a.out);
  std::printf("wrote %zu fields (%s train, %s heldout) to %s\n", manifest["fields"].size(),
              std::to_string(manifest["split"]["train"].size()).c_str(),
              std::to_string(manifest["split"]["heldout"].size()).c_str(), a.out.c_str());
  return 0;
}

std::vector<SourceField> load_fields(const fs::path& dir, const std::string& split) {
  std::ifstream is(dir / "fields.json");
  if (!is) throw IoError("cannot open " + (dir / "fields.json").string());
  const auto manifest = nlohmann::json::parse(is);
  std::vector<SourceField> fields;
  for (int id : manifest_field_ids(manifest, split)) fields.push_back({id, read_pgrd(field_path(dir, id, 'p'))});
  return fields;
}

fs::path sidecar(const fs::path& dataset) { return fs::path(dataset.string() + ".json"); }

struct SampleArgs {
  std::string fields;
  std::string out;
  std::string split = "train";
  SamplingOptions opt;
};

int run_sample(const SampleArgs& a) {
  const auto fields = load_fields(a.fields, a.split);
  const NormalizationSpec spec = corpus_spec(fields);
  const auto samples = sample_training_windows(fields, a.opt, spec);
  write_mgds(samples, a.out);

  DatasetManifest m;
  m.count = samples.size();
  m.seed = a.opt.seed;
  m.spec = spec;
  for (const auto& f : fields) m.source_fields.push_back(f.id);
  m.split = a.split;
  m.window_space = count_window_space(static_cast<int>(fields.size()), fields.front().pressure.n(), a.opt);
  write_manifest(m, sidecar(a.out));
  std::printf("wrote %zu samples from %zu fields (window space %llu) to %s\n", samples.size(), fields.size(),
              static_cast<unsigned long long>(m.window_space), a.out.c_str());
  return 0;
}

struct FitArgs {
  std::string dataset;
  std::string out;
  std::string fields;
  double ridge = 1e-6;
  double holdout = 0.2;
};

int run_fit_linear(const FitArgs& a) {
  const auto samples = read_mgds(a.dataset);
  NormalizationSpec spec;
  if (fs::exists(sidecar(a.dataset))) spec = read_manifest(sidecar(a.dataset)).spec;

  std::vector<WindowPair> train;
  std::vector<WindowPair> heldout;
  split_samples(samples, a.holdout, train, heldout);
  const WeightsContainer weights = fit_linear_stencil(train, a.ridge, spec);
  write_srwt(weights, a.out);

  const LinearStencil stencil(weights);
  auto predict = [&](const std::vector<double>& in) { return stencil.apply(in); };
  std::printf("train windows %zu, train mse %.6e\n", train.size(), window_mse<decltype(predict)&>(train, predict));
  if (!heldout.empty()) {
    std::printf("heldout windows %zu, heldout mse %.6e\n", heldout.size(),
                window_mse<decltype(predict)&>(heldout, predict));
    std::printf("heldout window spline mse %.6e\n", window_mse(std::span<const WindowPair>(heldout), spline_window_upsample));
    if (!a.fields.empty()) {
      const std::vector<TrainingSample> tail(samples.end() - static_cast<std::ptrdiff_t>(heldout.size()), samples.end());
      const auto reference = spline_window_predictions(tail, load_fields(a.fields, "all"), spec);
      double sum = 0.0;
      for (std::size_t k = 0; k < heldout.size(); ++k)
        for (std::size_t i = 0; i < reference[k].size(); ++i) {
          const double d = reference[k][i] - heldout[k].target[i];
          sum += d * d;
        }
      std::printf("heldout field spline mse %.6e\n", sum / static_cast<double>(heldout.size() * reference.front().size()));
    }
  }
  std::printf("wrote %s\n", a.out.c_str());
  return 0;
}

struct SolveArgs {
  std::string p0 = "zero";
  std::string source;
  std::string op = "spline";
  std::string schedule = "single";
  std::string mode = "correction";
  std::string restriction = "full-weighting";
  std::string normalization = "per-grid";
  std::string trace;
  std::string out;
  bool absolute = false;
  MultigridConfig cfg;
};

int run_solve(SolveArgs a) {
  a.cfg.cycle_mode = parse_cycle_mode(a.mode);
  a.cfg.restriction = parse_restriction(a.restriction);
  a.cfg.tol_relative = !a.absolute;
  a.cfg.validate();
  const Grid f = read_pgrd(a.source);
  a.cfg.validate_for(f.n());

  Grid p0(f.n(), f.h());
  if (a.p0.rfind("random:", 0) == 0) {
    std::uint64_t seed = 0;
    try {
      seed = std::stoull(a.p0.substr(7));
    } catch (const std::exception&) {
      throw ConfigError("bad --p0 seed in '" + a.p0 + "'");
    }
    p0 = initial_guess("random", f.n(), f.h(), seed, 0);
  } else if (a.p0 != "zero") {
    throw ConfigError("--p0 must be zero or random:SEED");
  }

  const auto norm_mode = a.normalization == "per-grid" ? NormalizationMode::PerGrid : NormalizationMode::Global;
  const int factor = a.cfg.coarsening_factor();
  Schedule schedule = a.schedule == "alternate"
                          ? Schedule::alternate(make_operator(a.op, factor, norm_mode), make_operator("spline", factor))
                          : Schedule::single(make_operator(a.op, factor, norm_mode));
  const SolveResult res = solve(std::move(p0), f, a.cfg, schedule);

  if (!a.trace.empty()) {
    std::ofstream os(a.trace);
    if (!os) throw IoError("cannot write " + a.trace);
    write_trace_csv(res.trace, os);
  }
  if (!a.out.empty()) write_pgrd(res.solution, a.out);
  const double last = res.trace.records.empty() ? 0.0 : res.trace.records.back().norm_dp;
  std::printf("%s after %d iterations, norm_dp %.3e, threshold %.3e, residual %.3e\n",
              res.trace.converged ? "converged" : "not converged", res.trace.iterations, last, res.trace.threshold,
              norm(residual(res.solution, subtract_mean(f))));
  return res.trace.converged ? 0 : kNotConverged;
}

int run_bench(const std::string& spec_path, int workers) {
  RunSpec spec = RunSpec::load(spec_path);
  if (workers > 0) spec.workers = workers;
  const BatchReport report = run_batch(spec);
  for (const auto& name : report.schedules) {
    int converged = 0;
    int total = 0;
    std::vector<int> iters;
    for (const auto& r : report.results) {
      if (r.schedule != name) continue;
      ++total;
      if (r.trace.converged) {
        ++converged;
        iters.push_back(r.trace.iterations);
      }
    }
    std::sort(iters.begin(), iters.end());
    const int median = iters.empty() ? 0 : iters[iters.size() / 2];
    std::printf("%-16s converged %d/%d, median iterations %d\n", name.c_str(), converged, total, median);
  }
  std::printf("outputs in %s\n", spec.out_dir.string().c_str());
  return 0;
}

int run_spectrum(const std::string& grid, const std::string& out) {
  const SpectrumRecord s = power_spectrum(read_pgrd(grid));
  if (out.empty() || out == "-") {
    write_spectrum_csv(s, std::cout);
    return 0;
  }
  std::ofstream os(out);
  if (!os) throw IoError("cannot write " + out);
  write_spectrum_csv(s, os);
  return 0;
}

int run_snapshots(const std::string& spec_path, const std::string& iters, int problem) {
  const RunSpec spec = RunSpec::load(spec_path);
  if (problem < 0) {
    std::ifstream is(spec.manifest);
    if (!is) throw IoError("cannot open field manifest " + spec.manifest.string());
    const auto ids = manifest_field_ids(nlohmann::json::parse(is), spec.split);
    if (ids.empty()) throw IoError("split '" + spec.split + "' is empty");
    problem = ids.front();
  }
  const auto files = snapshot_series(spec, problem, parse_iteration_list(iters));
  std::printf("wrote %zu snapshots for problem %d\n", files.size(), problem);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Two-level multigrid Poisson solver with learned prolongation"};
  app.require_subcommand(1);
  std::function<int()> action;

  DatagenArgs dg;
  auto* datagen = app.add_subcommand("datagen", "Generate decaying-turbulence pressure/source fields");
  datagen->add_option("--n", dg.opt.n, "Grid side")->capture_default_str();
  datagen->add_option("--fields", dg.opt.fields, "Number of snapshots")->capture_default_str();
  datagen->add_option("--seed", dg.opt.seed, "Random seed")->required();
  datagen->add_option("--out", dg.out, "Output directory")->required();
  datagen->add_option("--k-peak", dg.opt.k_peak, "Peak wavenumber of the initial spectrum")->capture_default_str();
  datagen->add_option("--nu", dg.opt.nu, "Kinematic viscosity")->capture_default_str();
  datagen->add_option("--snapshot-every", dg.opt.snapshot_every, "Steps between snapshots")->capture_default_str();
  datagen->add_option("--heldout-fraction", dg.opt.heldout_fraction, "Trailing fraction reserved for benchmarks")
      ->capture_default_str();
  datagen->callback([&] { action = [&] { return run_datagen(dg); }; });

  SampleArgs sa;
  auto* sample = app.add_subcommand("sample", "Sample training windows into an MGDS dataset");
  sample->add_option("--fields", sa.fields, "Directory written by datagen")->required();
  sample->add_option("--count", sa.opt.count, "Number of samples")->capture_default_str();
  sample->add_option("--seed", sa.opt.seed, "Random seed")->required();
  sample->add_option("--out", sa.out, "Output dataset")->required();
  sample->add_option("--split", sa.split, "train, heldout or all")->capture_default_str();
  sample->add_option("--min-level", sa.opt.min_level)->capture_default_str();
  sample->add_option("--max-level", sa.opt.max_level)->capture_default_str();
  sample->callback([&] { action = [&] { return run_sample(sa); }; });

  FitArgs fa;
  auto* fit = app.add_subcommand("fit-linear", "Fit the linear 4x stencil by ridge least squares");
  fit->add_option("--dataset", fa.dataset, "MGDS dataset")->required();
  fit->add_option("--ridge", fa.ridge, "Ridge penalty")->capture_default_str();
  fit->add_option("--out", fa.out, "Output weights")->required();
  fit->add_option("--holdout", fa.holdout, "Trailing fraction of samples held out")->capture_default_str();
  fit->add_option("--fields", fa.fields, "Field directory, enables the whole-field spline MSE");
  fit->callback([&] { action = [&] { return run_fit_linear(fa); }; });

  SolveArgs so;
  auto* solve_cmd = app.add_subcommand("solve", "Solve one Poisson problem");
  solve_cmd->add_option("--p0", so.p0, "zero or random:SEED")->capture_default_str();
  solve_cmd->add_option("--source", so.source, "Source grid (PGRD)")->required();
  solve_cmd->add_option("--op", so.op, "spline, linear:PATH or gan:PATH")->capture_default_str();
  solve_cmd->add_option("--schedule", so.schedule, "single or alternate (op, spline, op, ...)")
      ->check(CLI::IsMember({"single", "alternate"}))
      ->capture_default_str();
  solve_cmd->add_option("--npre", so.cfg.n_smooth_pre)->capture_default_str();
  solve_cmd->add_option("--nsmooth", so.cfg.n_smooth)->capture_default_str();
  solve_cmd->add_option("--nstep", so.cfg.n_step)->capture_default_str();
  solve_cmd->add_option("--rmin", so.cfg.r_min)->capture_default_str();
  solve_cmd->add_option("--mode", so.mode)->check(CLI::IsMember({"correction", "solution"}))->capture_default_str();
  solve_cmd->add_option("--restriction", so.restriction)
      ->check(CLI::IsMember({"full-weighting", "injection"}))
      ->capture_default_str();
  solve_cmd->add_option("--tol", so.cfg.tol)->capture_default_str();
  solve_cmd->add_flag("--absolute-tol", so.absolute, "Treat --tol as an absolute threshold");
  solve_cmd->add_option("--max-iter", so.cfg.max_iter)->capture_default_str();
  solve_cmd->add_option("--normalization", so.normalization)
      ->check(CLI::IsMember({"global", "per-grid"}))
      ->capture_default_str();
  solve_cmd->add_option("--trace", so.trace, "Trace CSV output");
  solve_cmd->add_option("--out", so.out, "Solution grid output (PGRD)");
  solve_cmd->callback([&] { action = [&] { return run_solve(so); }; });

  std::string bench_spec;
  int bench_workers = 0;
  auto* bench = app.add_subcommand("bench", "Run a batch of solves described by a run spec");
  bench->add_option("--spec", bench_spec, "Run spec JSON")->required();
  bench->add_option("--workers", bench_workers, "Override the worker count");
  bench->callback([&] { action = [&] { return run_bench(bench_spec, bench_workers); }; });

  std::string grid_path;
  std::string spectrum_out;
  auto* spectrum = app.add_subcommand("spectrum", "Radial power spectrum of a grid");
  spectrum->add_option("--grid", grid_path, "PGRD grid")->required();
  spectrum->add_option("--out", spectrum_out, "CSV output (stdout if omitted)");
  spectrum->callback([&] { action = [&] { return run_spectrum(grid_path, spectrum_out); }; });

  std::string snap_spec;
  std::string snap_iters = "1..15";
  int snap_problem = -1;
  auto* snapshots = app.add_subcommand("snapshots", "Dump solutions after selected iterations");
  snapshots->add_option("--spec", snap_spec, "Run spec JSON")->required();
  snapshots->add_option("--iters", snap_iters, "Iterations, e.g. 1..15 or 1,5,10")->capture_default_str();
  snapshots->add_option("--problem", snap_problem, "Field id (first of the split if omitted)");
  snapshots->callback([&] { action = [&] { return run_snapshots(snap_spec, snap_iters, snap_problem); }; });

  CLI11_PARSE(app, argc, argv);
  try {
    return action();
  } catch (const mgsr::Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
