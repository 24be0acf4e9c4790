#include "mgsr/multigrid.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>

#include "mgsr/error.hpp"

namespace mgsr {

void MultigridConfig::validate() const {
  if (n_smooth_pre < 0 || n_smooth < 0) throw ConfigError("smoothing counts must be non-negative");
  if (n_step < 1 || n_step > 20) throw ConfigError("n_step must be a positive integer");
  if (r_min < 2) throw ConfigError("r_min must be at least 2");
  if (!(coarse_tol > 0.0)) throw ConfigError("coarse_tol must be positive");
  if (coarse_max_sweeps < 1) throw ConfigError("coarse_max_sweeps must be positive");
  if (!(tol > 0.0)) throw ConfigError("tol must be positive");
  if (max_iter < 1) throw ConfigError("max_iter must be positive");
}

void MultigridConfig::validate_for(int fine_n) const {
  validate();
  if (fine_n % coarsening_factor() != 0 || fine_n / coarsening_factor() != r_min) {
    throw ConfigError("fine size " + std::to_string(fine_n) + " / 2^" + std::to_string(n_step) + " does not equal r_min = " +
                      std::to_string(r_min));
  }
}

Schedule Schedule::single(OperatorPtr op) {
  if (!op) throw ConfigError("schedule needs an operator");
  Schedule s;
  s.even_ = std::move(op);
  return s;
}

Schedule Schedule::alternate(OperatorPtr even, OperatorPtr odd) {
  if (!even || !odd) throw ConfigError("alternating schedule needs two operators");
  Schedule s;
  s.even_ = std::move(even);
  s.odd_ = std::move(odd);
  return s;
}

const ProlongationOperator& Schedule::at(int iteration) const {
  if (odd_ && (iteration % 2) == 1) return *odd_;
  return *even_;
}

Grid restrict_grid(const Grid& fine) {
  if (fine.n() % 2 != 0) throw ShapeError("restrict: fine side must be even, got " + std::to_string(fine.n()));
  const int nc = fine.n() / 2;
  Grid coarse(nc, 2.0 * fine.h());
  for (int i = 0; i < nc; ++i)
    for (int j = 0; j < nc; ++j) coarse(i, j) = fine(2 * i, 2 * j);
  return coarse;
}

namespace {
void check_restrict_k(int n, int k) {
  if (k < 1) throw ShapeError("restrict_k: k must be positive");
  if (k >= 31 || n % (1 << k) != 0 || n / (1 << k) < 2) {
    throw ShapeError("restrict_k: side " + std::to_string(n) + " not divisible by 2^" + std::to_string(k));
  }
}
}  // namespace

Grid restrict_k(const Grid& fine, int k) {
  check_restrict_k(fine.n(), k);
  Grid g = restrict_grid(fine);
  for (int s = 1; s < k; ++s) g = restrict_grid(g);
  return g;
}

Grid restrict_full_weighting(const Grid& fine) {
  if (fine.n() % 2 != 0) throw ShapeError("restrict: fine side must be even, got " + std::to_string(fine.n()));
  const int nc = fine.n() / 2;
  Grid coarse(nc, 2.0 * fine.h());
  for (int i = 0; i < nc; ++i) {
    for (int j = 0; j < nc; ++j) {
      const int r = 2 * i;
      const int c = 2 * j;
      const double centre = fine(r, c);
      const double edges = fine.wrapped(r - 1, c) + fine.wrapped(r + 1, c) + fine.wrapped(r, c - 1) + fine.wrapped(r, c + 1);
      const double corners = fine.wrapped(r - 1, c - 1) + fine.wrapped(r - 1, c + 1) + fine.wrapped(r + 1, c - 1) +
                             fine.wrapped(r + 1, c + 1);
      coarse(i, j) = 0.25 * centre + 0.125 * edges + 0.0625 * corners;
    }
  }
  return coarse;
}

Grid restrict_k(const Grid& fine, int k, Restriction kind) {
  if (kind == Restriction::Injection) return restrict_k(fine, k);
  check_restrict_k(fine.n(), k);
  Grid g = restrict_full_weighting(fine);
  for (int s = 1; s < k; ++s) g = restrict_full_weighting(g);
  return g;
}

Grid coarse_solve(Grid p, const Grid& f, double tol, int max_sweeps, CoarseSolveStats* stats) {
  const double f_norm = norm(f);
  // Absolute residual when f == 0.
  const double scale = f_norm > 0.0 ? f_norm : 1.0;
  CoarseSolveStats local;
  local.relative_residual = norm(residual(p, f)) / scale;
  while (local.relative_residual > tol && local.sweeps < max_sweeps) {
    gauss_seidel_sweeps(p, f, 1);
    ++local.sweeps;
    local.relative_residual = norm(residual(p, f)) / scale;
  }
  if (stats) *stats = local;
  return subtract_mean(std::move(p));
}

Grid vcycle(Grid p, const Grid& f, const MultigridConfig& cfg, const ProlongationOperator& op) {
  if (!p.same_shape(f)) throw ShapeError("vcycle: p and f shapes differ");
  cfg.validate_for(p.n());
  if (op.total_factor() != cfg.coarsening_factor()) {
    throw ConfigError("operator factor " + std::to_string(op.total_factor()) + " does not match 2^n_step = " +
                      std::to_string(cfg.coarsening_factor()));
  }

  gauss_seidel_sweeps(p, f, cfg.n_smooth);
  p = subtract_mean(std::move(p));
  const Grid r = residual(p, f);

  Grid correction;
  if (cfg.cycle_mode == CycleMode::Correction) {
    const Grid r_c = subtract_mean(restrict_k(r, cfg.n_step, cfg.restriction));
    const Grid e_c = coarse_solve(Grid(r_c.n(), r_c.h()), r_c, cfg.coarse_tol, cfg.coarse_max_sweeps);
    correction = op.apply(e_c);
  } else {
    const Grid p_c0 = restrict_k(p, cfg.n_step, cfg.restriction);
    const Grid f_c = subtract_mean(restrict_k(f, cfg.n_step, cfg.restriction));
    Grid p_c = coarse_solve(p_c0, f_c, cfg.coarse_tol, cfg.coarse_max_sweeps);
    const double offset = p_c0.mean();
    for (double& v : p_c.values()) v += offset;
    correction = op.apply(p_c - p_c0);
  }
  if (correction.n() != p.n()) throw ShapeError("vcycle: prolongation produced the wrong size");
  for (std::size_t k = 0; k < p.size(); ++k) p.values()[k] += correction.values()[k];
  return subtract_mean(std::move(p));
}

namespace {

// Shared outer loop for solve() and solve_relaxation().
template <typename Step>
SolveResult iterate(Grid p, const Grid& f, const MultigridConfig& cfg, Step&& step, const IterationObserver& observer) {
  SolveResult result;
  ConvergenceTrace& trace = result.trace;
  trace.threshold = cfg.tol_relative ? 0.0 : cfg.tol;
  for (int k = 0; k < cfg.max_iter; ++k) {
    std::string label;
    Grid next = step(p, k, label);
    const double dp = norm(next - p, cfg.norm_kind);
    p = std::move(next);
    if (!p.all_finite()) break;
    const double res = norm(residual(p, f), cfg.norm_kind);
    if (k == 0 && cfg.tol_relative) trace.threshold = cfg.tol * dp;
    trace.records.push_back({k + 1, dp, res, std::move(label)});
    trace.iterations = k + 1;
    if (observer) observer(k + 1, p);
    if (dp == 0.0 || dp < trace.threshold) {
      trace.converged = true;
      break;
    }
  }
  result.solution = std::move(p);
  return result;
}

}  // namespace

SolveResult solve(Grid p0, const Grid& f_in, const MultigridConfig& cfg, const Schedule& schedule,
                  const IterationObserver& observer) {
  if (!p0.same_shape(f_in)) throw ShapeError("solve: p0 and f shapes differ");
  cfg.validate_for(p0.n());
  const Grid f = subtract_mean(f_in);
  Grid p = gauss_seidel(std::move(p0), f, cfg.n_smooth_pre);
  return iterate(
      std::move(p), f, cfg,
      [&](const Grid& cur, int k, std::string& label) {
        const ProlongationOperator& op = schedule.at(k);
        label = op.label();
        return vcycle(cur, f, cfg, op);
      },
      observer);
}

SolveResult solve_relaxation(Grid p0, const Grid& f_in, const MultigridConfig& cfg, const IterationObserver& observer) {
  if (!p0.same_shape(f_in)) throw ShapeError("solve_relaxation: p0 and f shapes differ");
  cfg.validate();
  const Grid f = subtract_mean(f_in);
  return iterate(
      subtract_mean(std::move(p0)), f, cfg,
      [&](const Grid& cur, int, std::string& label) {
        label = "gs";
        return gauss_seidel(cur, f, 1);
      },
      observer);
}

void write_trace_csv(const ConvergenceTrace& trace, std::ostream& os) {
  os << "iter,norm_dp,norm_residual,operator\n";
  char buf[128];
  for (const auto& r : trace.records) {
    std::snprintf(buf, sizeof(buf), "%d,%.17g,%.17g,", r.iteration, r.norm_dp, r.norm_residual);
    os << buf << r.op << '\n';
  }
}

std::string to_string(CycleMode mode) { return mode == CycleMode::Correction ? "correction" : "solution"; }

CycleMode parse_cycle_mode(const std::string& s) {
  if (s == "correction") return CycleMode::Correction;
  if (s == "solution") return CycleMode::Solution;
  throw ConfigError("unknown cycle mode '" + s + "'");
}

}  // namespace mgsr

namespace mgsr {

std::string to_string(Restriction kind) {
  return kind == Restriction::FullWeighting ? "full-weighting" : "injection";
}

Restriction parse_restriction(const std::string& s) {
  if (s == "full-weighting") return Restriction::FullWeighting;
  if (s == "injection") return Restriction::Injection;
  throw ConfigError("unknown restriction '" + s + "' (expected full-weighting or injection)");
}

}  // namespace mgsr
