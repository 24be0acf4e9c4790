#pragma once

// Two-level multigrid for the biperiodic Poisson problem.
//
// One outer iteration smooths on the fine grid, transfers to the coarsest
// grid (composed factor 2^n_step), solves there with Gauss-Seidel, and
// prolongs the correction back with a pluggable operator.

#include <functional>
#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include "mgsr/grid.hpp"
#include "mgsr/prolongation.hpp"

namespace mgsr {

enum class CycleMode {
  Correction,  ///< coarse problem for the error, source = restricted residual
  Solution     ///< full-approximation form, prolongs coarse solutions
};

/// Fine-to-coarse transfer used inside the cycle.
enum class Restriction {
  FullWeighting,  ///< 3x3 tensor-product (1 2 1)/4 stencil, then even-index sampling
  Injection       ///< even-index sampling only
};

struct MultigridConfig {
  int n_smooth_pre = 10;
  int n_smooth = 20;
  int n_step = 4;
  int r_min = 12;
  double coarse_tol = 1e-12;
  int coarse_max_sweeps = 10000;
  CycleMode cycle_mode = CycleMode::Correction;
  Restriction restriction = Restriction::FullWeighting;
  /// Outer stopping threshold on norm(p_k - p_{k-1}). When tol_relative is
  /// set the threshold is tol * norm(p_1 - p_0).
  double tol = 1e-13;
  bool tol_relative = true;
  int max_iter = 500;
  NormKind norm_kind = NormKind::L2;

  /// Throws ConfigError on invalid values.
  void validate() const;
  /// Throws ConfigError unless fine_n / 2^n_step == r_min exactly.
  void validate_for(int fine_n) const;
  int coarsening_factor() const { return 1 << n_step; }
};

/// Operator choice per outer iteration. Iterations are counted from 0.
class Schedule {
 public:
  using OperatorPtr = std::shared_ptr<const ProlongationOperator>;

  static Schedule single(OperatorPtr op);
  /// `even` on iterations 0, 2, 4, ...; `odd` on 1, 3, 5, ...
  static Schedule alternate(OperatorPtr even, OperatorPtr odd);

  const ProlongationOperator& at(int iteration) const;
  bool alternating() const { return odd_ != nullptr; }

 private:
  OperatorPtr even_;
  OperatorPtr odd_;
};

struct TraceRecord {
  int iteration = 0;  ///< 1-based
  double norm_dp = 0.0;
  double norm_residual = 0.0;
  std::string op;
};

struct ConvergenceTrace {
  std::vector<TraceRecord> records;
  bool converged = false;
  int iterations = 0;
  double threshold = 0.0;  ///< absolute stopping threshold actually used
};

/// Even-index injection: coarse(i, j) = fine(2i, 2j), h doubled.
Grid restrict_grid(const Grid& fine);
/// restrict_grid applied k times.
Grid restrict_k(const Grid& fine, int k);
/// Full-weighting restriction: weights 1/16 (corners), 1/8 (edges), 1/4
/// (centre) around fine(2i, 2j). Preserves constants and the grid mean.
Grid restrict_full_weighting(const Grid& fine);
/// k stages of the given restriction.
Grid restrict_k(const Grid& fine, int k, Restriction kind);

struct CoarseSolveStats {
  int sweeps = 0;
  double relative_residual = 0.0;
};

/// Gauss-Seidel on a small grid until norm(residual)/norm(f) <= tol or
/// max_sweeps. Returns the mean-anchored solution.
Grid coarse_solve(Grid p, const Grid& f, double tol, int max_sweeps, CoarseSolveStats* stats = nullptr);

/// One outer iteration (without the pre-smoothing of solve()).
Grid vcycle(Grid p, const Grid& f, const MultigridConfig& cfg, const ProlongationOperator& op);

/// Called after every outer iteration with (iteration, current solution).
using IterationObserver = std::function<void(int, const Grid&)>;

struct SolveResult {
  Grid solution;
  ConvergenceTrace trace;
};

/// Pre-smooths p0 with n_smooth_pre sweeps, then iterates vcycle until
/// norm(p_k - p_{k-1}) falls below the threshold or max_iter is reached.
/// The source is mean-subtracted on entry. Non-convergence is reported in
/// the trace, not thrown.
SolveResult solve(Grid p0, const Grid& f, const MultigridConfig& cfg, const Schedule& schedule,
                  const IterationObserver& observer = {});

/// Plain red-black Gauss-Seidel baseline: one sweep per iteration, same
/// stopping rule and trace format (operator label "gs").
SolveResult solve_relaxation(Grid p0, const Grid& f, const MultigridConfig& cfg,
                             const IterationObserver& observer = {});

/// CSV with header iter,norm_dp,norm_residual,operator; 17 significant digits.
void write_trace_csv(const ConvergenceTrace& trace, std::ostream& os);

std::string to_string(CycleMode mode);
CycleMode parse_cycle_mode(const std::string& s);
std::string to_string(Restriction kind);
Restriction parse_restriction(const std::string& s);

}  // namespace mgsr
