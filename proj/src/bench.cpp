#include "mgsr/bench.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <thread>

#include "mgsr/datagen.hpp"
#include "mgsr/error.hpp"
#include "mgsr/spectral.hpp"

namespace mgsr {

// ---------------------------------------------------------------- spectra

double SpectrumRecord::power_above(int k) const {
  double sum = 0.0;
  for (std::size_t s = static_cast<std::size_t>(std::max(k + 1, 0)); s < power.size(); ++s) sum += power[s];
  return sum;
}

SpectrumRecord power_spectrum(const Grid& g) {
  const int n = g.n();
  const auto spec = full_spectrum(g);
  SpectrumRecord rec;
  rec.power.assign(static_cast<std::size_t>(n / 2) + 1, 0.0);
  rec.modes.assign(rec.power.size(), 0);
  auto wavenumber = [n](int idx) { return idx <= n / 2 ? idx : idx - n; };
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < n; ++c) {
      const long shell = std::lround(std::hypot(static_cast<double>(wavenumber(r)), static_cast<double>(wavenumber(c))));
      if (shell > n / 2) continue;
      rec.power[static_cast<std::size_t>(shell)] += std::norm(spec[static_cast<std::size_t>(r) * n + c]);
      ++rec.modes[static_cast<std::size_t>(shell)];
    }
  }
  for (std::size_t s = 0; s < rec.power.size(); ++s) {
    if (rec.modes[s] > 0) rec.power[s] /= static_cast<double>(rec.modes[s]);
  }
  return rec;
}

void write_spectrum_csv(const SpectrumRecord& s, std::ostream& os) {
  os << "shell,modes,power\n";
  char buf[96];
  for (std::size_t k = 0; k < s.shells(); ++k) {
    std::snprintf(buf, sizeof(buf), "%zu,%llu,%.17g\n", k, static_cast<unsigned long long>(s.modes[k]), s.power[k]);
    os << buf;
  }
}

// ---------------------------------------------------------------- run spec

nlohmann::json ScheduleSpec::to_json() const {
  nlohmann::json j = {{"name", name}, {"kind", kind}};
  if (kind != "gs-only") j["op"] = op;
  if (kind == "alternate") j["op_odd"] = op_odd;
  return j;
}

ScheduleSpec ScheduleSpec::from_json(const nlohmann::json& j) {
  ScheduleSpec s;
  s.kind = j.value("kind", std::string{"single"});
  s.op = j.value("op", std::string{"spline"});
  s.op_odd = j.value("op_odd", std::string{});
  s.name = j.value("name", s.kind == "gs-only" ? std::string{"gs-only"} : s.op);
  if (s.kind != "single" && s.kind != "alternate" && s.kind != "gs-only") {
    throw ConfigError("unknown schedule kind '" + s.kind + "'");
  }
  if (s.kind == "alternate" && s.op_odd.empty()) throw ConfigError("alternate schedule '" + s.name + "' needs op_odd");
  return s;
}

nlohmann::json config_to_json(const MultigridConfig& c) {
  return {{"n_smooth_pre", c.n_smooth_pre},
          {"n_smooth", c.n_smooth},
          {"n_step", c.n_step},
          {"r_min", c.r_min},
          {"coarse_tol", c.coarse_tol},
          {"coarse_max_sweeps", c.coarse_max_sweeps},
          {"mode", to_string(c.cycle_mode)},
          {"restriction", to_string(c.restriction)},
          {"tol", c.tol},
          {"tol_relative", c.tol_relative},
          {"max_iter", c.max_iter},
          {"norm", c.norm_kind == NormKind::L2 ? "l2" : "l2-mean"}};
}

MultigridConfig config_from_json(const nlohmann::json& j) {
  MultigridConfig c;
  c.n_smooth_pre = j.value("n_smooth_pre", c.n_smooth_pre);
  c.n_smooth = j.value("n_smooth", c.n_smooth);
  c.n_step = j.value("n_step", c.n_step);
  c.r_min = j.value("r_min", c.r_min);
  c.coarse_tol = j.value("coarse_tol", c.coarse_tol);
  c.coarse_max_sweeps = j.value("coarse_max_sweeps", c.coarse_max_sweeps);
  c.cycle_mode = parse_cycle_mode(j.value("mode", std::string{"correction"}));
  c.restriction = parse_restriction(j.value("restriction", std::string{"full-weighting"}));
  c.tol = j.value("tol", c.tol);
  c.tol_relative = j.value("tol_relative", c.tol_relative);
  c.max_iter = j.value("max_iter", c.max_iter);
  const std::string nk = j.value("norm", std::string{"l2"});
  if (nk == "l2") {
    c.norm_kind = NormKind::L2;
  } else if (nk == "l2-mean") {
    c.norm_kind = NormKind::L2MeanNormalized;
  } else {
    throw ConfigError("unknown norm '" + nk + "'");
  }
  c.validate();
  return c;
}

nlohmann::json RunSpec::to_json() const {
  nlohmann::json sched = nlohmann::json::array();
  for (const auto& s : schedules) sched.push_back(s.to_json());
  return {{"problems", {{"manifest", manifest.string()}, {"split", split}, {"count", count}}},
          {"config", config_to_json(config)},
          {"schedules", sched},
          {"p0", p0},
          {"seed", seed},
          {"out_dir", out_dir.string()},
          {"workers", workers},
          {"normalization", normalization == NormalizationMode::Global ? "global" : "per-grid"}};
}

RunSpec RunSpec::from_json(const nlohmann::json& j, const std::filesystem::path& base_dir) {
  auto resolve = [&](const std::string& p) {
    std::filesystem::path path(p);
    return path.is_relative() && !base_dir.empty() ? base_dir / path : path;
  };
  auto resolve_op = [&](const std::string& op) {
    const auto colon = op.find(':');
    if (colon == std::string::npos) return op;
    return op.substr(0, colon + 1) + resolve(op.substr(colon + 1)).string();
  };
  RunSpec s;
  try {
    const auto& probs = j.at("problems");
    s.manifest = resolve(probs.at("manifest").get<std::string>());
    s.split = probs.value("split", s.split);
    s.count = probs.value("count", s.count);
    if (j.contains("config")) s.config = config_from_json(j["config"]);
    for (const auto& sj : j.at("schedules")) {
      ScheduleSpec ss = ScheduleSpec::from_json(sj);
      ss.op = resolve_op(ss.op);
      if (!ss.op_odd.empty()) ss.op_odd = resolve_op(ss.op_odd);
      s.schedules.push_back(std::move(ss));
    }
    s.p0 = j.value("p0", s.p0);
    s.seed = j.value("seed", s.seed);
    s.out_dir = resolve(j.value("out_dir", s.out_dir.string()));
    s.workers = std::max(1, j.value("workers", 1));
    const std::string norm_mode = j.value("normalization", std::string{"per-grid"});
    if (norm_mode == "global") {
      s.normalization = NormalizationMode::Global;
    } else if (norm_mode == "per-grid") {
      s.normalization = NormalizationMode::PerGrid;
    } else {
      throw ConfigError("unknown normalization mode '" + norm_mode + "'");
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed run spec: ") + e.what());
  }
  if (s.schedules.empty()) throw ConfigError("run spec lists no schedules");
  std::set<std::string> names;
  for (const auto& ss : s.schedules) {
    if (!names.insert(ss.name).second) throw ConfigError("duplicate schedule name '" + ss.name + "'");
  }
  return s;
}

RunSpec RunSpec::load(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open run spec " + path.string());
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(is);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  return from_json(j, path.parent_path());
}

// ---------------------------------------------------------------- problems

std::vector<Problem> load_problems(const RunSpec& spec) {
  std::ifstream is(spec.manifest);
  if (!is) throw IoError("cannot open field manifest " + spec.manifest.string());
  const auto manifest = nlohmann::json::parse(is);
  const auto ids = manifest_field_ids(manifest, spec.split);
  if (static_cast<int>(ids.size()) < spec.count) {
    throw IoError("split '" + spec.split + "' has " + std::to_string(ids.size()) + " fields, " +
                  std::to_string(spec.count) + " requested");
  }
  const auto dir = spec.manifest.parent_path();
  std::vector<Problem> problems;
  for (int k = 0; k < spec.count; ++k) problems.push_back({ids[k], read_pgrd(field_path(dir, ids[k], 'f'))});
  return problems;
}

Grid initial_guess(const std::string& kind, int n, double h, std::uint64_t seed, int problem_id) {
  if (kind == "zero") return Grid(n, h);
  if (kind != "random") throw ConfigError("unknown initial guess '" + kind + "'");
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(problem_id)};
  std::mt19937_64 rng(seq);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  Grid g(n, h);
  for (double& v : g.values()) v = uni(rng);
  return subtract_mean(std::move(g));
}

// ---------------------------------------------------------------- batches

namespace {

struct BuiltSchedule {
  std::string name;
  bool relaxation = false;
  Schedule schedule;
};

std::vector<BuiltSchedule> build_schedules(const RunSpec& spec) {
  std::map<std::string, Schedule::OperatorPtr> cache;
  auto op = [&](const std::string& desc) {
    auto& slot = cache[desc];
    if (!slot) slot = make_operator(desc, spec.config.coarsening_factor(), spec.normalization);
    return slot;
  };
  std::vector<BuiltSchedule> out;
  for (const auto& s : spec.schedules) {
    BuiltSchedule b;
    b.name = s.name;
    if (s.kind == "gs-only") {
      b.relaxation = true;
    } else if (s.kind == "alternate") {
      b.schedule = Schedule::alternate(op(s.op), op(s.op_odd));
    } else {
      b.schedule = Schedule::single(op(s.op));
    }
    out.push_back(std::move(b));
  }
  return out;
}

SolveResult run_one(const BuiltSchedule& b, const RunSpec& spec, const Problem& p, const IterationObserver& observer) {
  Grid p0 = initial_guess(spec.p0, p.source.n(), p.source.h(), spec.seed, p.id);
  if (b.relaxation) return solve_relaxation(std::move(p0), p.source, spec.config, observer);
  return solve(std::move(p0), p.source, spec.config, b.schedule, observer);
}

}  // namespace

const ProblemResult* BatchReport::find(int problem_id, const std::string& schedule) const {
  for (const auto& r : results)
    if (r.problem_id == problem_id && r.schedule == schedule) return &r;
  return nullptr;
}

std::vector<int> BatchReport::problem_ids() const {
  std::vector<int> ids;
  for (const auto& r : results)
    if (ids.empty() || ids.back() != r.problem_id) ids.push_back(r.problem_id);
  return ids;
}

BatchReport run_problems(const RunSpec& spec, const std::vector<Problem>& problems_in) {
  const auto schedules = build_schedules(spec);
  std::vector<Problem> problems = problems_in;
  std::sort(problems.begin(), problems.end(), [](const Problem& a, const Problem& b) { return a.id < b.id; });

  const std::size_t jobs = problems.size() * schedules.size();
  std::vector<ProblemResult> results(jobs);
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(spec.workers));
  auto worker = [&](std::size_t slot) {
    try {
      for (std::size_t k = next++; k < jobs; k = next++) {
        const Problem& p = problems[k / schedules.size()];
        const BuiltSchedule& b = schedules[k % schedules.size()];
        results[k] = {p.id, b.name, run_one(b, spec, p, {}).trace};
      }
    } catch (...) {
      errors[slot] = std::current_exception();
    }
  };
  if (spec.workers <= 1) {
    worker(0);
  } else {
    std::vector<std::jthread> pool;
    for (int w = 0; w < spec.workers; ++w) pool.emplace_back(worker, static_cast<std::size_t>(w));
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);

  BatchReport report;
  for (const auto& b : schedules) report.schedules.push_back(b.name);
  report.results = std::move(results);
  report.aggregate = aggregate_traces(report.results, report.schedules);
  return report;
}

BatchReport run_batch(const RunSpec& spec) {
  BatchReport report = run_problems(spec, load_problems(spec));
  write_batch_outputs(report, spec.out_dir);
  return report;
}

std::vector<AggregateRow> aggregate_traces(const std::vector<ProblemResult>& results_in,
                                           const std::vector<std::string>& schedules) {
  std::vector<ProblemResult> results = results_in;
  std::stable_sort(results.begin(), results.end(),
                   [](const ProblemResult& a, const ProblemResult& b) { return a.problem_id < b.problem_id; });
  std::vector<AggregateRow> rows;
  for (const auto& name : schedules) {
    int longest = 0;
    for (const auto& r : results)
      if (r.schedule == name) longest = std::max(longest, static_cast<int>(r.trace.records.size()));
    for (int k = 0; k < longest; ++k) {
      std::vector<double> logs;
      double sum = 0.0;
      for (const auto& r : results) {
        if (r.schedule != name || static_cast<int>(r.trace.records.size()) <= k) continue;
        const double v = r.trace.records[static_cast<std::size_t>(k)].norm_dp;
        sum += v;
        logs.push_back(std::log10(std::max(v, 1e-300)));
      }
      AggregateRow row;
      row.schedule = name;
      row.iteration = k + 1;
      row.count = static_cast<int>(logs.size());
      row.mean_norm_dp = sum / row.count;
      row.mean_log10 = std::accumulate(logs.begin(), logs.end(), 0.0) / row.count;
      double var = 0.0;
      for (double l : logs) var += (l - row.mean_log10) * (l - row.mean_log10);
      row.std_log10 = std::sqrt(var / row.count);
      rows.push_back(row);
    }
  }
  return rows;
}

void write_batch_outputs(const BatchReport& report, const std::filesystem::path& out_dir) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  char buf[256];
  for (const auto& r : report.results) {
    const fs::path dir = out_dir / "traces" / r.schedule;
    fs::create_directories(dir);
    std::ofstream os(dir / ("problem_" + std::to_string(r.problem_id) + ".csv"));
    if (!os) throw IoError("cannot write trace for problem " + std::to_string(r.problem_id));
    write_trace_csv(r.trace, os);
  }
  {
    std::ofstream os(out_dir / "aggregate.csv");
    if (!os) throw IoError("cannot write aggregate.csv");
    os << "schedule,iter,count,mean_norm_dp,mean_log10_norm_dp,std_log10_norm_dp\n";
    for (const auto& a : report.aggregate) {
      std::snprintf(buf, sizeof(buf), ",%d,%d,%.17g,%.17g,%.17g\n", a.iteration, a.count, a.mean_norm_dp, a.mean_log10,
                    a.std_log10);
      os << a.schedule << buf;
    }
  }
  {
    std::ofstream os(out_dir / "iterations.csv");
    if (!os) throw IoError("cannot write iterations.csv");
    os << "problem,schedule,converged,iterations\n";
    for (const auto& r : report.results) {
      os << r.problem_id << ',' << r.schedule << ',' << (r.trace.converged ? 1 : 0) << ',' << r.trace.iterations << '\n';
    }
  }
  {
    std::ofstream os(out_dir / "ratios.csv");
    if (!os) throw IoError("cannot write ratios.csv");
    os << "problem,numerator,denominator,ratio\n";
    for (int id : report.problem_ids()) {
      for (std::size_t a = 0; a < report.schedules.size(); ++a) {
        for (std::size_t b = a + 1; b < report.schedules.size(); ++b) {
          const auto* ra = report.find(id, report.schedules[a]);
          const auto* rb = report.find(id, report.schedules[b]);
          if (!ra || !rb || rb->trace.iterations == 0) continue;
          std::snprintf(buf, sizeof(buf), "%.17g",
                        static_cast<double>(ra->trace.iterations) / static_cast<double>(rb->trace.iterations));
          os << id << ',' << report.schedules[a] << ',' << report.schedules[b] << ',' << buf << '\n';
        }
      }
    }
  }
}

std::vector<int> parse_iteration_list(const std::string& text) {
  std::vector<int> out;
  std::size_t pos = 0;
  auto to_int = [&](const std::string& s) {
    try {
      std::size_t used = 0;
      const int v = std::stoi(s, &used);
      if (used != s.size() || v < 1) throw InputError("");
      return v;
    } catch (const std::exception&) {
      throw InputError("bad iteration list '" + text + "'");
    }
  };
  while (pos < text.size()) {
    std::size_t comma = text.find(',', pos);
    if (comma == std::string::npos) comma = text.size();
    const std::string item = text.substr(pos, comma - pos);
    if (const auto dots = item.find(".."); dots != std::string::npos) {
      const int lo = to_int(item.substr(0, dots));
      const int hi = to_int(item.substr(dots + 2));
      if (hi < lo) throw InputError("bad iteration range '" + item + "'");
      for (int k = lo; k <= hi; ++k) out.push_back(k);
    } else if (!item.empty()) {
      out.push_back(to_int(item));
    }
    pos = comma + 1;
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<std::filesystem::path> snapshot_series(const RunSpec& spec, int problem_id,
                                                   const std::vector<int>& iterations) {
  namespace fs = std::filesystem;
  std::vector<fs::path> written;
  if (iterations.empty()) return written;
  const int last = *std::max_element(iterations.begin(), iterations.end());
  if (last > spec.config.max_iter) throw ConfigError("snapshot iteration beyond max_iter");

  const Problem problem{problem_id, read_pgrd(field_path(spec.manifest.parent_path(), problem_id, 'f'))};

  RunSpec local = spec;
  local.config.max_iter = last;
  const std::set<int> wanted(iterations.begin(), iterations.end());
  for (const auto& b : build_schedules(local)) {
    const fs::path dir = spec.out_dir / "snapshots" / ("problem_" + std::to_string(problem_id)) / b.name;
    fs::create_directories(dir);
    std::ofstream spectra(dir / "spectra.csv");
    if (!spectra) throw IoError("cannot write " + (dir / "spectra.csv").string());
    spectra << "iter,shell,modes,power\n";
    char buf[128];
    run_one(b, local, problem, [&](int k, const Grid& g) {
      if (!wanted.count(k)) return;
      const fs::path file = dir / ("iter_" + std::to_string(k) + ".pgrd");
      write_pgrd(g, file);
      written.push_back(file);
      const auto s = power_spectrum(g);
      for (std::size_t shell = 0; shell < s.shells(); ++shell) {
        std::snprintf(buf, sizeof(buf), "%d,%zu,%llu,%.17g\n", k, shell, static_cast<unsigned long long>(s.modes[shell]),
                      s.power[shell]);
        spectra << buf;
      }
    });
  }
  return written;
}

}  // namespace mgsr
