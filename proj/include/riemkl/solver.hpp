#pragma once

#include <limits>
#include <optional>
#include <stdexcept>
#include <string>

#include "riemkl/manifold.hpp"
#include "riemkl/objective.hpp"
#include "riemkl/quasimetric.hpp"
#include "riemkl/trace.hpp"

namespace riemkl {

enum class SolverVariant { kSdArmijo, kSdFixed, kProxInexact };

enum class StepPolicy { kMidpoint, kLow, kHighMinusMargin };

enum class LambdaSchedule { kConstant, kGeometric };

struct ArmijoParams {
  double alpha = 0.5;    // sufficient-decrease fraction, in (0,1)
  double t_init = 1.0;   // initial trial step
  int max_halvings = 60; // J
};

struct FixedStepParams {
  double delta1 = 0.1;
  double delta2 = 0.1;
  double lipschitz = 1.0;  // L, with L*delta1 + delta2 < 1
  StepPolicy policy = StepPolicy::kMidpoint;
};

struct ProxParams {
  double lambda_bar = 1.0;    // lower bound for lambda_k (default value)
  double lambda_tilde = 1.0;  // upper bound
  double theta = 1.0;         // in (0,1]
  double b = 2.0;             // relative-error constant, must satisfy b > s2
  LambdaSchedule schedule = LambdaSchedule::kConstant;
  double lambda_growth = 1.5;  // geometric schedule factor
  int inner_max_iters = 500;
  // Extra absolute tolerance on ||grad h||; 0 disables it and the inexact
  // threshold (b-1) lambda D(y,x) alone drives termination.
  double inner_grad_tol = 0.0;
  ArmijoParams inner_armijo;
};

struct SolverConfig {
  SolverVariant variant = SolverVariant::kSdArmijo;
  ArmijoParams armijo;
  FixedStepParams fixed;
  ProxParams prox;
  int max_iters = 1000;
  double grad_tol = 1e-8;
  // Cap on the geodesic step length t_k ||grad f|| for positively curved
  // manifolds, keeping the geodesic segment minimal (sphere injectivity
  // radius is pi).
  double sphere_step_cap = 1.5707963267948966;
  int snapshot_stride = 0;  // 0 = no point snapshots
};

/// Thrown when a line search or a proximal subproblem cannot be completed.
class SolverError : public std::runtime_error {
 public:
  explicit SolverError(const std::string& what) : std::runtime_error(what) {}
};

struct ArmijoResult {
  double t = 0.0;
  Point x_next;
  double f_next = 0.0;
  int halvings = 0;
};

/// Backtracking search: the largest t_init 2^{-j}, j <= J, with
/// f(exp_x(-t grad f)) <= f(x) - alpha t ||grad f||^2. Trial steps whose
/// geodesic length exceeds `step_cap` are skipped. Throws SolverError if no
/// admissible j exists and std::invalid_argument at a critical point.
ArmijoResult armijo_step(const Objective& obj, const Point& x, const ArmijoParams& params,
                         double step_cap = std::numeric_limits<double>::infinity());

/// Deterministic point of the fixed-step interval (delta1, 2(1-delta2)/L).
/// Requires L*delta1 + delta2 < 1 (otherwise the interval is empty).
double fixed_step(double lipschitz, double delta1, double delta2,
                  StepPolicy policy = StepPolicy::kMidpoint);

/// Riemannian steepest descent x^{k+1} = exp_{x^k}(-t_k grad f(x^k)) with the
/// Armijo or fixed step rule. The quasi distance is only used for trace
/// bookkeeping (D(x^{k+1}, x^k) column).
DescentTrace steepest_descent(const Objective& obj, const Point& x0, const SolverConfig& config,
                              const QuasiDistance& qdist = QuasiDistance::riemannian());

struct ProxStepResult {
  Point x_next;
  double w_norm = 0.0;  // ||grad f(x_next)||, a valid subgradient bound for C^1 f
  double f_next = 0.0;
  double qd_step = 0.0;
  double dist_step = 0.0;
  int inner_iters = 0;
};

/// One inexact proximal step: finds x_next with
///   (i)  f(x_next) + (theta lambda / 2) D^2(x_next, x) <= f(x),
///   (ii) ||grad f(x_next)|| <= b lambda D(x_next, x),
/// by Armijo descent on h(y) = f(y) + (lambda/2) D^2(y, x) started at a small
/// perturbation of x. Both acceptance tests are verified directly. Throws
/// SolverError when the inner budget runs out.
ProxStepResult prox_inexact_step(const Objective& obj, const QuasiDistance& qdist, const Point& x,
                                 double lambda, const ProxParams& params,
                                 double step_cap = std::numeric_limits<double>::infinity());

/// Inexact proximal point method with lambda_k in [lambda_bar, lambda_tilde].
DescentTrace run_prox(const Objective& obj, const QuasiDistance& qdist, const Point& x0,
                      const SolverConfig& config);

/// Runs the configured solver.
DescentTrace solve(const Objective& obj, const QuasiDistance& qdist, const Point& x0,
                   const SolverConfig& config);

/// Constants under which the produced traces satisfy H1/H2 by construction:
/// sd-armijo  -> a = alpha / (s2^2 max(1, t_max)),    b = (L + 1/t_min)/s1;
/// sd-fixed   -> a = beta / s2^2, beta = delta2 L / (2(1-delta2)), same b;
/// prox       -> a = theta lambda_bar / 2,            b = b lambda_tilde.
/// `lipschitz` is required for the steepest-descent b.
double constructive_h1_constant(const SolverConfig& config, const QuasiDistance& qdist,
                                const DescentTrace& trace);
double constructive_h2_constant(const SolverConfig& config, const QuasiDistance& qdist,
                                const DescentTrace& trace,
                                std::optional<double> lipschitz = std::nullopt);

}  // namespace riemkl
