#include <doctest.h>

#include <cmath>
#include <fstream>
#include <iterator>
#include <numbers>
#include <sstream>

#include "mgsr/bench.hpp"
#include "mgsr/datagen.hpp"
#include "mgsr/error.hpp"
#include "test_support.hpp"

using namespace mgsr;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(is), std::istreambuf_iterator<char>()};
}

// Small corpus shared by the batch tests.
const fs::path& corpus() {
  static testing::TempDir dir("bench_corpus");
  static const bool made = [] {
    DatagenOptions opt;
    opt.n = 48;
    opt.fields = 6;
    opt.seed = 3;
    opt.snapshot_every = 2;
    generate_fields(opt, dir.path());
    return true;
  }();
  (void)made;
  return dir.path();
}

RunSpec small_spec(const fs::path& out) {
  RunSpec spec;
  spec.manifest = corpus() / "fields.json";
  spec.split = "heldout";
  spec.count = 3;
  spec.config.n_step = 2;
  spec.config.r_min = 12;
  spec.config.max_iter = 60;
  spec.schedules = {ScheduleSpec{"spline", "single", "spline", ""}, ScheduleSpec{"gs", "gs-only", "spline", ""}};
  spec.out_dir = out;
  spec.seed = 5;
  return spec;
}

}  // namespace

TEST_SUITE("spectrum") {
  TEST_CASE("single Fourier mode lands in its shell") {
    const int n = 64;
    const int k0 = 5;
    Grid g(n, 1.0);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) g(i, j) = std::cos(2.0 * std::numbers::pi * k0 * j / n);
    const SpectrumRecord s = power_spectrum(g);
    REQUIRE(s.shells() == 33);
    std::uint64_t shell_modes = 0;
    for (int a = -n / 2 + 1; a <= n / 2; ++a)
      for (int b = -n / 2 + 1; b <= n / 2; ++b)
        if (std::lround(std::hypot(a, b)) == k0) ++shell_modes;
    CHECK(s.modes[k0] == shell_modes);
    const double amplitude = 0.5 * n * n;
    CHECK(s.power[k0] == doctest::Approx(2.0 * amplitude * amplitude / static_cast<double>(shell_modes)).epsilon(1e-12));
    for (std::size_t k = 0; k < s.shells(); ++k)
      if (static_cast<int>(k) != k0) CHECK(s.power[k] <= 1e-20);
    CHECK(s.power_above(k0) <= 1e-18);
    CHECK(s.power_above(k0 - 1) == doctest::Approx(s.power[k0]));
  }

  TEST_CASE("constant grid only has the mean shell") {
    const SpectrumRecord s = power_spectrum(Grid::constant(16, 1.0, 2.0));
    CHECK(s.modes[0] == 1);
    CHECK(s.power[0] == doctest::Approx(std::pow(2.0 * 256, 2)));
    for (std::size_t k = 1; k < s.shells(); ++k) CHECK(s.power[k] <= 1e-20);
  }

  TEST_CASE("white noise has a flat spectrum") {
    const int n = 32;
    std::vector<double> mean(n / 2 + 1, 0.0);
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
      const auto s = power_spectrum(testing::random_grid(n, 1.0, seed));
      for (std::size_t k = 0; k < mean.size(); ++k) mean[k] += s.power[k] / 50.0;
    }
    const double expected = n * n / 3.0;
    for (std::size_t k = 2; k < mean.size(); ++k) CHECK(std::abs(mean[k] / expected - 1.0) < 0.2);
  }

  TEST_CASE("spectrum csv") {
    std::ostringstream os;
    write_spectrum_csv(power_spectrum(Grid::constant(4, 1.0, 1.0)), os);
    CHECK(os.str().rfind("shell,modes,power\n0,1,256\n", 0) == 0);
  }
}

TEST_SUITE("bench") {
  TEST_CASE("iteration lists") {
    CHECK(parse_iteration_list("1..4") == std::vector<int>{1, 2, 3, 4});
    CHECK(parse_iteration_list("5,2,2") == std::vector<int>{2, 5});
    CHECK(parse_iteration_list("1..3,8") == std::vector<int>{1, 2, 3, 8});
    CHECK(parse_iteration_list("").empty());
    CHECK_THROWS_AS(parse_iteration_list("4..2"), InputError);
    CHECK_THROWS_AS(parse_iteration_list("0"), InputError);
    CHECK_THROWS_AS(parse_iteration_list("x"), InputError);
  }

  TEST_CASE("run spec json round trip") {
    RunSpec spec = small_spec("/tmp/out");
    spec.schedules.push_back({"mix", "alternate", "linear:/w/lin.srwt", "spline"});
    spec.config.cycle_mode = CycleMode::Solution;
    spec.config.restriction = Restriction::Injection;
    spec.normalization = NormalizationMode::Global;
    spec.workers = 3;
    const RunSpec back = RunSpec::from_json(spec.to_json());
    CHECK(back.to_json() == spec.to_json());
    CHECK(back.config.restriction == Restriction::Injection);

    nlohmann::json j = spec.to_json();
    j["schedules"].push_back(j["schedules"][0]);
    CHECK_THROWS_AS(RunSpec::from_json(j), ConfigError);

    const nlohmann::json rel = {{"problems", {{"manifest", "data/fields.json"}, {"split", "heldout"}, {"count", 2}}},
                                {"schedules", {{{"kind", "single"}, {"op", "linear:w.srwt"}}}}};
    const RunSpec r = RunSpec::from_json(rel, "/base");
    CHECK(r.manifest == fs::path("/base/data/fields.json"));
    CHECK(r.schedules[0].op == "linear:/base/w.srwt");
    CHECK(r.schedules[0].name == "linear:w.srwt");
  }

  TEST_CASE("initial guesses") {
    CHECK(testing::max_abs(initial_guess("zero", 8, 1.0, 1, 2)) == 0.0);
    const Grid a = initial_guess("random", 8, 1.0, 1, 2);
    CHECK(a == initial_guess("random", 8, 1.0, 1, 2));
    CHECK_FALSE(a == initial_guess("random", 8, 1.0, 1, 3));
    CHECK(std::abs(a.mean()) <= 1e-15);
    CHECK_THROWS_AS(initial_guess("ones", 8, 1.0, 1, 2), ConfigError);
  }

  TEST_CASE("zero problems converge immediately") {
    RunSpec spec = small_spec("unused");
    spec.p0 = "zero";
    const std::vector<Problem> problems{{7, Grid(48, 0.1)}, {2, Grid(48, 0.1)}};
    const BatchReport r = run_problems(spec, problems);
    CHECK(r.problem_ids() == std::vector<int>{2, 7});
    for (const auto& res : r.results) {
      CHECK(res.trace.converged);
      CHECK(res.trace.iterations == 1);
    }
    REQUIRE(r.aggregate.size() == 2);
    CHECK(r.aggregate[0].mean_log10 == doctest::Approx(-300.0));
  }

  TEST_CASE("results do not depend on problem order or worker count") {
    testing::TempDir out_a("bench_a"), out_b("bench_b");
    RunSpec spec = small_spec(out_a.path());
    auto problems = load_problems(spec);
    REQUIRE(problems.size() == 3);
    CHECK(problems[0].id == 3);
    const BatchReport a = run_problems(spec, problems);
    std::reverse(problems.begin(), problems.end());
    spec.workers = 3;
    const BatchReport b = run_problems(spec, problems);
    REQUIRE(a.results.size() == b.results.size());
    for (std::size_t k = 0; k < a.results.size(); ++k) {
      CHECK(a.results[k].problem_id == b.results[k].problem_id);
      CHECK(a.results[k].trace.records.size() == b.results[k].trace.records.size());
      CHECK(a.results[k].trace.records.back().norm_dp == b.results[k].trace.records.back().norm_dp);
    }
    const auto* s = a.find(3, "spline");
    REQUIRE(s != nullptr);
    CHECK(s->trace.converged);
    CHECK_FALSE(a.find(3, "gs")->trace.converged);

    write_batch_outputs(a, out_a.path());
    write_batch_outputs(b, out_b.path());
    for (const char* f : {"aggregate.csv", "iterations.csv", "ratios.csv", "traces/spline/problem_4.csv"}) {
      CAPTURE(f);
      CHECK(slurp(out_a / f) == slurp(out_b / f));
    }
    CHECK(slurp(out_a / "iterations.csv").rfind("problem,schedule,converged,iterations\n3,spline,1,", 0) == 0);
  }

  TEST_CASE("batch run from a spec file") {
    testing::TempDir dir("bench_file");
    RunSpec spec = small_spec(dir / "out");
    spec.count = 1;
    {
      std::ofstream os(dir / "run.json");
      os << spec.to_json().dump(2);
    }
    const BatchReport r = run_batch(RunSpec::load(dir / "run.json"));
    CHECK(r.results.size() == 2);
    CHECK(fs::exists(dir / "out" / "traces" / "gs" / "problem_3.csv"));
    CHECK_THROWS_AS(RunSpec::load(dir / "missing.json"), IoError);
    spec.count = 10;
    CHECK_THROWS_AS(load_problems(spec), IoError);
  }

  TEST_CASE("snapshot series") {
    testing::TempDir dir("snaps");
    RunSpec spec = small_spec(dir.path());
    spec.schedules = {ScheduleSpec{"gs", "gs-only", "spline", ""}};
    const auto files = snapshot_series(spec, 4, parse_iteration_list("1..15"));
    REQUIRE(files.size() == 15);
    CHECK(files.back() == dir / "snapshots" / "problem_4" / "gs" / "iter_15.pgrd");
    CHECK(snapshot_series(spec, 4, {}).empty());

    MultigridConfig cfg = spec.config;
    cfg.max_iter = 7;
    const Grid f = read_pgrd(field_path(corpus(), 4, 'f'));
    const auto direct = solve_relaxation(initial_guess(spec.p0, 48, f.h(), spec.seed, 4), f, cfg);
    CHECK(read_pgrd(dir / "snapshots" / "problem_4" / "gs" / "iter_7.pgrd") == direct.solution);

    std::ifstream is(dir / "snapshots" / "problem_4" / "gs" / "spectra.csv");
    std::string line;
    int rows = 0;
    while (std::getline(is, line)) ++rows;
    CHECK(rows == 1 + 15 * 25);
    spec.config.max_iter = 10;
    CHECK_THROWS_AS(snapshot_series(spec, 4, {12}), ConfigError);
  }
}
