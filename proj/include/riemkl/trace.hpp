#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "riemkl/manifold.hpp"

namespace riemkl {

enum class SolveStatus { kConverged, kMaxIters, kSubproblemFailure };

const char* to_string(SolveStatus s);

/// One recorded step x^k -> x^{k+1}.
struct TraceStep {
  double f = 0.0;          // f(x^k)
  double grad_norm = 0.0;  // ||grad f(x^k)||
  double step = 0.0;       // t_k (steepest descent) or lambda_k (prox)
  double qd_step = 0.0;    // D(x^{k+1}, x^k)
  double dist_step = 0.0;  // Riemannian d(x^{k+1}, x^k)
  double w_norm = 0.0;     // ||w^{k+1}|| = ||grad f(x^{k+1})||
};

/// Full per-iteration record of a solver run. `steps` has one entry per
/// iteration performed; the terminal point's value and gradient norm are kept
/// separately so that f(x^{k+1}) is always available to the monitors.
struct DescentTrace {
  std::vector<TraceStep> steps;
  double final_f = 0.0;
  double final_grad_norm = 0.0;
  SolveStatus status = SolveStatus::kMaxIters;
  std::string failure_reason;  // set for kSubproblemFailure

  std::optional<Point> final_point;  // set by solvers, absent on CSV reload
  std::vector<std::pair<int, Point>> snapshots;

  int iterations() const { return static_cast<int>(steps.size()); }

  /// f(x^k) for k in [0, iterations()]; k == iterations() is the final point.
  double f_at(int k) const;
  /// ||grad f(x^k)|| for k in [0, iterations()].
  double grad_norm_at(int k) const;

  double sum_qd_steps() const;
};

/// Trace CSV: header `iter,f,grad_norm,step,qd_step,dist_step,w_norm,cum_qd`,
/// one row per iteration plus a terminal row for the final point (step and
/// qd_step zero). Doubles are written with 17 significant digits.
void write_trace_csv(std::ostream& os, const DescentTrace& trace);
DescentTrace read_trace_csv(std::istream& is);

}  // namespace riemkl
