#include "riemkl/solver.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

namespace riemkl {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

bool capped(const Manifold& m) { return m.kind() == ManifoldKind::kSphere; }

struct BacktrackResult {
  double t = 0.0;
  Point x_next;
  double f_next = 0.0;
  int halvings = 0;
};

// Armijo backtracking for an arbitrary smooth function given by value/gradient
// callables; shared by the outer solver and the proximal inner solver.
BacktrackResult armijo_backtrack(const Manifold& m,
                                 const std::function<double(const Point&)>& value, const Point& x,
                                 double fx, const Tangent& grad, double grad_norm_sq,
                                 const ArmijoParams& params, double step_cap) {
  if (!(params.alpha > 0.0 && params.alpha < 1.0)) {
    throw std::invalid_argument("armijo: alpha must lie in (0,1)");
  }
  if (params.t_init <= 0.0) throw std::invalid_argument("armijo: t_init must be positive");
  const double grad_norm = std::sqrt(grad_norm_sq);
  for (int j = 0; j <= params.max_halvings; ++j) {
    const double t = params.t_init * std::pow(2.0, -j);
    if (t * grad_norm > step_cap) continue;  // keep the geodesic segment minimal
    const Point x_next = m.exp(x, -t * grad);
    const double f_next = value(x_next);
    if (f_next <= fx - params.alpha * t * grad_norm_sq) {
      return BacktrackResult{t, x_next, f_next, j};
    }
  }
  throw SolverError("armijo: no step of the form t_init 2^-j (j <= " +
                    std::to_string(params.max_halvings) +
                    ") satisfies the sufficient-decrease test");
}

double schedule_lambda(const ProxParams& p, int k) {
  switch (p.schedule) {
    case LambdaSchedule::kConstant:
      return p.lambda_bar;
    case LambdaSchedule::kGeometric:
      return std::min(p.lambda_bar * std::pow(p.lambda_growth, k), p.lambda_tilde);
  }
  return p.lambda_bar;
}

void maybe_snapshot(DescentTrace& trace, const SolverConfig& cfg, int k, const Point& x) {
  if (cfg.snapshot_stride > 0 && k % cfg.snapshot_stride == 0) {
    trace.snapshots.emplace_back(k, x);
  }
}

}  // namespace

ArmijoResult armijo_step(const Objective& obj, const Point& x, const ArmijoParams& params,
                         double step_cap) {
  const Manifold& m = obj.manifold();
  const Tangent g = obj.gradient(x);
  const double gn2 = m.inner(x, g, g);
  if (gn2 == 0.0) {
    throw std::invalid_argument("armijo_step: gradient vanishes at x (critical point)");
  }
  const double fx = obj.value(x);
  const BacktrackResult r = armijo_backtrack(
      m, [&obj](const Point& y) { return obj.value(y); }, x, fx, g, gn2, params, step_cap);
  return ArmijoResult{r.t, r.x_next, r.f_next, r.halvings};
}

double fixed_step(double lipschitz, double delta1, double delta2, StepPolicy policy) {
  if (lipschitz <= 0.0 || delta1 <= 0.0 || delta2 <= 0.0) {
    throw std::invalid_argument("fixed_step: L, delta1, delta2 must be positive");
  }
  if (lipschitz * delta1 + delta2 >= 1.0) {
    throw std::invalid_argument("fixed_step: requires L*delta1 + delta2 < 1");
  }
  const double hi = 2.0 * (1.0 - delta2) / lipschitz;
  const double width = hi - delta1;
  switch (policy) {
    case StepPolicy::kMidpoint:
      return 0.5 * (delta1 + hi);
    case StepPolicy::kLow:
      return delta1 + 0.1 * width;
    case StepPolicy::kHighMinusMargin:
      return hi - 0.1 * width;
  }
  throw std::logic_error("fixed_step: unknown policy");
}

DescentTrace steepest_descent(const Objective& obj, const Point& x0, const SolverConfig& config,
                              const QuasiDistance& qdist) {
  if (config.variant != SolverVariant::kSdArmijo && config.variant != SolverVariant::kSdFixed) {
    throw std::invalid_argument("steepest_descent: config variant is not a descent rule");
  }
  const Manifold& m = obj.manifold();
  const double cap = capped(m) ? config.sphere_step_cap : kInf;

  double t_fixed = 0.0;
  if (config.variant == SolverVariant::kSdFixed) {
    t_fixed = fixed_step(config.fixed.lipschitz, config.fixed.delta1, config.fixed.delta2,
                         config.fixed.policy);
  }

  DescentTrace trace;
  Point x = x0;
  double fx = obj.value(x);
  Tangent g = obj.gradient(x);
  double gn = m.norm(x, g);

  for (int k = 0;; ++k) {
    if (gn <= config.grad_tol) {
      trace.status = SolveStatus::kConverged;
      break;
    }
    if (k >= config.max_iters) {
      trace.status = SolveStatus::kMaxIters;
      break;
    }
    maybe_snapshot(trace, config, k, x);

    double t = 0.0;
    Point x_next = x;
    double f_next = fx;
    if (config.variant == SolverVariant::kSdArmijo) {
      ArmijoResult r;
      try {
        r = armijo_step(obj, x, config.armijo, cap);
      } catch (const SolverError& e) {
        trace.status = SolveStatus::kSubproblemFailure;
        trace.failure_reason = e.what();
        break;
      }
      t = r.t;
      x_next = std::move(r.x_next);
      f_next = r.f_next;
    } else {
      t = t_fixed;
      if (t * gn > cap) t = cap / gn;
      x_next = m.exp(x, -t * g);
      f_next = obj.value(x_next);
      if (f_next >= fx) {
        trace.status = SolveStatus::kSubproblemFailure;
        trace.failure_reason = "fixed_step: objective did not decrease; Lipschitz bound invalid";
        break;
      }
    }

    const Tangent g_next = obj.gradient(x_next);
    const double gn_next = m.norm(x_next, g_next);
    trace.steps.push_back(TraceStep{fx, gn, t, qdist(m, x_next, x), m.dist(x_next, x), gn_next});

    x = std::move(x_next);
    fx = f_next;
    g = g_next;
    gn = gn_next;
  }

  trace.final_f = fx;
  trace.final_grad_norm = gn;
  trace.final_point = x;
  if (config.snapshot_stride > 0) trace.snapshots.emplace_back(trace.iterations(), x);
  return trace;
}

ProxStepResult prox_inexact_step(const Objective& obj, const QuasiDistance& qdist, const Point& x,
                                 double lambda, const ProxParams& params, double step_cap) {
  if (lambda <= 0.0) throw std::invalid_argument("prox_inexact_step: lambda must be positive");
  if (params.b <= 1.0) throw std::invalid_argument("prox_inexact_step: requires b > 1");
  if (!(params.theta > 0.0 && params.theta <= 1.0)) {
    throw std::invalid_argument("prox_inexact_step: theta must lie in (0,1]");
  }
  const double s2 = qdist.equivalence_constants().second;
  if (params.b <= s2) {
    // At a near-minimizer of h, ||grad f|| ~ lambda s2 D, so the relative-error
    // test b lambda D is unreachable unless b > s2.
    throw std::invalid_argument("prox_inexact_step: requires b > s2 of the quasi distance");
  }

  const Manifold& m = obj.manifold();
  const Tangent gx = obj.gradient(x);
  const double gxn = m.norm(x, gx);
  if (gxn == 0.0) {
    throw std::invalid_argument("prox_inexact_step: gradient vanishes at x (critical point)");
  }
  const double fx = obj.value(x);

  const auto h_value = [&](const Point& y) {
    const double qd = qdist(m, y, x);
    return obj.value(y) + 0.5 * lambda * qd * qd;
  };

  // Starting exactly at x stalls test (ii) (D(y,x) = 0), so nudge along the
  // steepest-descent direction first.
  const double sigma = std::min(1.0 / lambda, 0.1) / std::max(1.0, gxn);
  Point y = m.exp(x, -sigma * gx);

  for (int i = 0;; ++i) {
    const double fy = obj.value(y);
    const double qd = qdist(m, y, x);
    const Tangent gy = obj.gradient(y);
    const double gyn = m.norm(y, gy);
    const Tangent gh = gy + 0.5 * lambda * qdist.sq_grad_y(m, x, y);
    const double ghn = m.norm(y, gh);

    const bool test_descent = fy + 0.5 * params.theta * lambda * qd * qd <= fx;
    const bool test_relative = gyn <= params.b * lambda * qd;
    double threshold = (params.b - 1.0) * lambda * qd;
    if (params.inner_grad_tol > 0.0) threshold = std::min(threshold, params.inner_grad_tol);
    if (test_descent && test_relative && ghn <= threshold) {
      return ProxStepResult{y, gyn, fy, qd, m.dist(y, x), i};
    }
    if (i >= params.inner_max_iters) {
      throw SolverError(
          "prox subproblem: inner budget exhausted (iters=" + std::to_string(i) +
          ", ||grad h||=" + std::to_string(ghn) + ", D=" + std::to_string(qd) +
          ", descent=" + std::string(test_descent ? "ok" : "fail") +
          ", relative=" + std::string(test_relative ? "ok" : "fail") + ")");
    }
    const double hy = fy + 0.5 * lambda * qd * qd;
    const double ghn2 = m.inner(y, gh, gh);
    if (ghn2 == 0.0) {
      throw SolverError("prox subproblem: inner solver stalled at a critical point of h "
                        "that fails the acceptance tests");
    }
    const BacktrackResult r =
        armijo_backtrack(m, h_value, y, hy, gh, ghn2, params.inner_armijo, step_cap);
    y = r.x_next;
  }
}

DescentTrace run_prox(const Objective& obj, const QuasiDistance& qdist, const Point& x0,
                      const SolverConfig& config) {
  if (config.variant != SolverVariant::kProxInexact) {
    throw std::invalid_argument("run_prox: config variant is not prox-inexact");
  }
  const ProxParams& p = config.prox;
  if (!(0.0 < p.lambda_bar && p.lambda_bar <= p.lambda_tilde)) {
    throw std::invalid_argument("run_prox: requires 0 < lambda_bar <= lambda_tilde");
  }
  const Manifold& m = obj.manifold();
  const double cap = capped(m) ? config.sphere_step_cap : kInf;

  DescentTrace trace;
  Point x = x0;
  double fx = obj.value(x);
  double gn = m.norm(x, obj.gradient(x));

  for (int k = 0;; ++k) {
    if (gn <= config.grad_tol) {
      trace.status = SolveStatus::kConverged;
      break;
    }
    if (k >= config.max_iters) {
      trace.status = SolveStatus::kMaxIters;
      break;
    }
    maybe_snapshot(trace, config, k, x);

    const double lambda = schedule_lambda(p, k);
    ProxStepResult r;
    try {
      r = prox_inexact_step(obj, qdist, x, lambda, p, cap);
    } catch (const SolverError& e) {
      trace.status = SolveStatus::kSubproblemFailure;
      trace.failure_reason = e.what();
      break;
    }
    trace.steps.push_back(TraceStep{fx, gn, lambda, r.qd_step, r.dist_step, r.w_norm});
    x = std::move(r.x_next);
    fx = r.f_next;
    gn = r.w_norm;
  }

  trace.final_f = fx;
  trace.final_grad_norm = gn;
  trace.final_point = x;
  if (config.snapshot_stride > 0) trace.snapshots.emplace_back(trace.iterations(), x);
  return trace;
}

DescentTrace solve(const Objective& obj, const QuasiDistance& qdist, const Point& x0,
                   const SolverConfig& config) {
  if (config.variant == SolverVariant::kProxInexact) return run_prox(obj, qdist, x0, config);
  return steepest_descent(obj, x0, config, qdist);
}

double constructive_h1_constant(const SolverConfig& config, const QuasiDistance& qdist,
                                const DescentTrace& trace) {
  const double s2 = qdist.equivalence_constants().second;
  switch (config.variant) {
    case SolverVariant::kSdArmijo: {
      double t_max = 0.0;
      for (const TraceStep& s : trace.steps) t_max = std::max(t_max, s.step);
      return config.armijo.alpha / (s2 * s2 * std::max(1.0, t_max));
    }
    case SolverVariant::kSdFixed: {
      const double beta =
          config.fixed.delta2 * config.fixed.lipschitz / (2.0 * (1.0 - config.fixed.delta2));
      return beta / (s2 * s2);
    }
    case SolverVariant::kProxInexact:
      return 0.5 * config.prox.theta * config.prox.lambda_bar;
  }
  throw std::logic_error("constructive_h1_constant: unknown variant");
}

double constructive_h2_constant(const SolverConfig& config, const QuasiDistance& qdist,
                                const DescentTrace& trace, std::optional<double> lipschitz) {
  const double s1 = qdist.equivalence_constants().first;
  switch (config.variant) {
    case SolverVariant::kSdArmijo:
    case SolverVariant::kSdFixed: {
      double lip = 0.0;
      if (config.variant == SolverVariant::kSdFixed) lip = config.fixed.lipschitz;
      if (lipschitz) lip = *lipschitz;
      if (lip <= 0.0) {
        throw std::invalid_argument("constructive_h2_constant: needs a Lipschitz constant");
      }
      double t_min = kInf;
      for (const TraceStep& s : trace.steps) t_min = std::min(t_min, s.step);
      if (!(t_min > 0.0) || !std::isfinite(t_min)) {
        throw std::invalid_argument("constructive_h2_constant: trace has no positive steps");
      }
      return (lip + 1.0 / t_min) / s1;
    }
    case SolverVariant::kProxInexact:
      return config.prox.b * config.prox.lambda_tilde;
  }
  throw std::logic_error("constructive_h2_constant: unknown variant");
}

}  // namespace riemkl
