#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "oracles.hpp"
#include "riemkl/diagnostics.hpp"
#include "riemkl/solver.hpp"

using namespace riemkl;
using Eigen::Matrix2d;
using Eigen::MatrixXd;
using Eigen::Vector2d;
using Eigen::Vector3d;
using Eigen::VectorXd;

namespace {

constexpr double kPi = std::numbers::pi;

SolverConfig armijo_config(double alpha = 0.5, int max_iters = 2000, double tol = 1e-10) {
  SolverConfig cfg;
  cfg.variant = SolverVariant::kSdArmijo;
  cfg.armijo.alpha = alpha;
  cfg.max_iters = max_iters;
  cfg.grad_tol = tol;
  return cfg;
}

SolverConfig fixed_config(double lipschitz, double delta1, double delta2, int max_iters = 2000,
                          double tol = 1e-10) {
  SolverConfig cfg;
  cfg.variant = SolverVariant::kSdFixed;
  cfg.fixed = FixedStepParams{delta1, delta2, lipschitz, StepPolicy::kMidpoint};
  cfg.max_iters = max_iters;
  cfg.grad_tol = tol;
  return cfg;
}

SolverConfig prox_config(double lambda, double b = 2.0, double theta = 1.0,
                         double inner_tol = 0.0, int max_iters = 500, double tol = 1e-8) {
  SolverConfig cfg;
  cfg.variant = SolverVariant::kProxInexact;
  cfg.prox.lambda_bar = lambda;
  cfg.prox.lambda_tilde = lambda;
  cfg.prox.b = b;
  cfg.prox.theta = theta;
  cfg.prox.inner_grad_tol = inner_tol;
  cfg.max_iters = max_iters;
  cfg.grad_tol = tol;
  return cfg;
}

void check_monotone(const DescentTrace& trace) {
  for (int k = 0; k < trace.iterations(); ++k) {
    CHECK(trace.f_at(k + 1) < trace.f_at(k));
    CHECK(trace.steps[static_cast<std::size_t>(k)].qd_step > 0.0);
  }
}

}  // namespace

TEST_CASE("armijo step matches the worked examples and the brute-force oracle") {
  EuclideanQuadratic half_sq(Matrix2d::Identity(), Vector2d::Zero());
  const Manifold& e = half_sq.manifold();
  const Point x = e.make_point(Vector2d(1, 0));

  const ArmijoResult r1 = armijo_step(half_sq, x, ArmijoParams{0.5, 1.0, 60});
  CHECK(r1.t == 1.0);
  CHECK(r1.x_next.coords.norm() == 0.0);

  const ArmijoResult r2 = armijo_step(half_sq, x, ArmijoParams{0.9, 1.0, 60});
  CHECK(r2.t == doctest::Approx(0.125));
  const auto oracle = oracles::armijo_bruteforce(
      [&](const VectorXd& y) { return 0.5 * y.squaredNorm(); }, x.coords,
      half_sq.gradient(x).components, 0.9, 1.0, 60);
  REQUIRE(oracle.has_value());
  CHECK(r2.t == doctest::Approx(*oracle));

  const Point critical = e.make_point(Vector2d(0, 0));
  CHECK_THROWS_AS(armijo_step(half_sq, critical, ArmijoParams{}), std::invalid_argument);

  // random quadratics against the oracle
  for (uint64_t i = 0; i < 20; ++i) {
    const Manifold e3 = Manifold::euclidean(3);
    const Point c = e3.random_point(900 + i);
    VectorXd d(3);
    d << 0.5 + (i % 5), 1.0 + (i % 3), 2.0 + (i % 7);
    EuclideanQuadratic q(d.asDiagonal(), c.coords);
    const Point x0 = e3.random_point(800 + i);
    if (q.manifold().norm(x0, q.gradient(x0)) < 1e-12) continue;
    const double alpha = 0.1 + 0.2 * (i % 4);
    const ArmijoResult r = armijo_step(q, x0, ArmijoParams{alpha, 1.0, 60});
    const auto want = oracles::armijo_bruteforce(
        [&](const VectorXd& y) {
          return 0.5 * (y - c.coords).dot(d.asDiagonal() * (y - c.coords));
        },
        x0.coords, q.gradient(x0).components, alpha, 1.0, 60);
    REQUIRE(want.has_value());
    CHECK(r.t == doctest::Approx(*want));
  }
}

TEST_CASE("fixed step picks deterministic points of the admissible interval") {
  CHECK(fixed_step(1.0, 0.1, 0.4) == doctest::Approx(0.65));
  CHECK(fixed_step(4.0, 0.1, 0.5) == doctest::Approx(0.175));
  CHECK_THROWS_AS(fixed_step(1.0, 0.5, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(fixed_step(10.0, 0.2, 0.1), std::invalid_argument);

  const double lo = fixed_step(2.0, 0.05, 0.2, StepPolicy::kLow);
  const double mid = fixed_step(2.0, 0.05, 0.2, StepPolicy::kMidpoint);
  const double hi = fixed_step(2.0, 0.05, 0.2, StepPolicy::kHighMinusMargin);
  CHECK(lo > 0.05);
  CHECK(hi < 2.0 * (1.0 - 0.2) / 2.0);
  CHECK(lo < mid);
  CHECK(mid < hi);
}

TEST_CASE("steepest descent on the rayleigh objective reaches the minimal eigenvector") {
  RayleighSphere obj((Vector3d(1, 2, 3)).asDiagonal());
  const Manifold& s = obj.manifold();
  const Point x0 = s.make_point(Vector3d(1, 1, 1) / std::sqrt(3.0));
  const DescentTrace trace = steepest_descent(obj, x0, armijo_config(0.5));
  CHECK(trace.status == SolveStatus::kConverged);
  REQUIRE(trace.final_point.has_value());
  CHECK(std::abs(trace.final_point->coords.dot(Vector3d(1, 0, 0))) >= 1.0 - 1e-8);
  check_monotone(trace);

  // Armijo stepsize floor t_k >= min(1, (1-alpha)/L); L = 2 (lambda_max - lambda_min)
  const double floor = std::min(1.0, 0.5 / 4.0);
  for (const TraceStep& st : trace.steps) CHECK(st.step >= floor - 1e-12);
}

TEST_CASE("fixed-step descent on a quadratic converges linearly at the predicted rate") {
  VectorXd d(2);
  d << 1.0, 4.0;
  EuclideanQuadratic obj(d.asDiagonal(), Vector2d(0.3, -0.7));
  const double L = 4.0;
  const SolverConfig cfg = fixed_config(L, 0.05, 0.3);
  const double t = fixed_step(L, 0.05, 0.3);
  const double r = oracles::quadratic_contraction(d, t);
  REQUIRE(r < 1.0);

  const Point x0 = obj.manifold().make_point(Vector2d(2.0, 1.5));
  const DescentTrace trace = steepest_descent(obj, x0, cfg);
  CHECK(trace.status == SolveStatus::kConverged);
  check_monotone(trace);
  const double f0 = trace.f_at(0);
  for (int k = 0; k <= trace.iterations(); ++k) {
    CHECK(trace.f_at(k) <= f0 * std::pow(r * r, k) * (1.0 + 1e-12) + 1e-300);
  }
}

TEST_CASE("a critical start yields an empty converged trace") {
  EuclideanQuadratic obj(Matrix2d::Identity(), Vector2d(1, 2));
  const DescentTrace trace =
      steepest_descent(obj, *obj.known_minimizer(), armijo_config(0.5, 100, 1e-10));
  CHECK(trace.status == SolveStatus::kConverged);
  CHECK(trace.iterations() == 0);
  CHECK(trace.final_grad_norm <= 1e-10);
}

TEST_CASE("fixed step with an invalid lipschitz constant fails as a subproblem failure") {
  VectorXd d(2);
  d << 1.0, 4.0;
  EuclideanQuadratic obj(d.asDiagonal(), Vector2d::Zero());
  // claimed L far below the true value makes the step expansive
  const DescentTrace trace =
      steepest_descent(obj, obj.manifold().make_point(Vector2d(1, 1)), fixed_config(0.5, 0.1, 0.4));
  CHECK(trace.status == SolveStatus::kSubproblemFailure);
  CHECK(!trace.failure_reason.empty());
}

TEST_CASE("sphere steps respect the minimality cap") {
  VectorXd d(2);
  d << 0.0, 40.0;
  RayleighSphere obj(d.asDiagonal());
  const Manifold& s = obj.manifold();
  const Point x0 = s.make_point(Vector2d(std::sqrt(0.5), std::sqrt(0.5)));
  const DescentTrace trace = steepest_descent(obj, x0, armijo_config(0.5, 400, 1e-9));
  CHECK(trace.status == SolveStatus::kConverged);
  for (const TraceStep& st : trace.steps) {
    CHECK(st.step * st.grad_norm <= kPi / 2 + 1e-12);
    CHECK(st.dist_step <= kPi / 2 + 1e-12);
  }
  check_monotone(trace);
}

TEST_CASE("prox step on a quadratic reproduces the closed-form proximal map") {
  EuclideanQuadratic obj(Matrix2d::Identity(), Vector2d(2, 0));
  const Manifold& e = obj.manifold();
  const Point x = e.make_point(Vector2d(0, 0));
  const QuasiDistance qd = QuasiDistance::riemannian();

  ProxParams params;
  params.b = 2.0;
  params.theta = 1.0;
  params.inner_grad_tol = 1e-9;
  const ProxStepResult r = prox_inexact_step(obj, qd, x, 1.0, params);
  CHECK((r.x_next.coords - oracles::quadratic_prox(Vector2d(2, 0), x.coords, 1.0)).norm() <=
        1e-6);
  CHECK(r.w_norm <= params.b * 1.0 * r.qd_step);
  CHECK(r.f_next + 0.5 * params.theta * 1.0 * r.qd_step * r.qd_step <= obj.value(x));

  CHECK_THROWS_AS(prox_inexact_step(obj, qd, *obj.known_minimizer(), 1.0, params),
                  std::invalid_argument);
}

TEST_CASE("the exact method is recovered as b -> 1+ (relative-error slack shrinks)") {
  EuclideanQuadratic obj(Matrix2d::Identity(), Vector2d(2, 0));
  const Manifold& e = obj.manifold();
  const Point x = e.make_point(Vector2d(0, 0));
  const QuasiDistance qd = QuasiDistance::riemannian();
  const VectorXd exact = oracles::quadratic_prox(Vector2d(2, 0), x.coords, 1.0);

  double prev_bound = 0.0;
  for (double b : {1.1, 1.5, 2.0}) {
    ProxParams params;
    params.b = b;
    params.theta = 1.0;
    params.inner_grad_tol = 0.0;  // only the (b-1) lambda D rule stops the inner solver
    const ProxStepResult r = prox_inexact_step(obj, qd, x, 1.0, params);
    const double err = (r.x_next.coords - exact).norm();
    // strong convexity of h bounds the error by the accepted residual
    const double bound = (b - 1.0) * 1.0 * r.qd_step / (1.0 + 1.0);
    CHECK(err <= bound + 1e-12);
    CHECK(prev_bound <= bound + 1e-12);  // the admissible slack grows with b
    prev_bound = bound;
  }
}

TEST_CASE("prox run on a quadratic tracks the exact iterate map per step") {
  for (double lambda : {0.5, 1.0, 5.0}) {
    EuclideanQuadratic obj(Matrix2d::Identity(), Vector2d(1.5, -0.5));
    SolverConfig cfg = prox_config(lambda, 2.0, 1.0, 1e-10, 400, 1e-7);
    cfg.snapshot_stride = 1;
    const Point x0 = obj.manifold().make_point(Vector2d(-1, 1));
    const DescentTrace trace = run_prox(obj, QuasiDistance::riemannian(), x0, cfg);
    CHECK(trace.status == SolveStatus::kConverged);
    check_monotone(trace);
    REQUIRE(trace.snapshots.size() >= 2);
    for (std::size_t i = 0; i + 1 < trace.snapshots.size(); ++i) {
      const VectorXd want = oracles::quadratic_prox(Vector2d(1.5, -0.5),
                                                    trace.snapshots[i].second.coords, lambda);
      CHECK((trace.snapshots[i + 1].second.coords - want).norm() <= 1e-6);
    }
  }
}

TEST_CASE("prox run on the two-anchor karcher objective finds the geodesic midpoint") {
  const Manifold spd = Manifold::spd(3);
  const MatrixXd c1 = Manifold::as_matrix(spd.random_point(61).coords, 3);
  const MatrixXd c2 = Manifold::as_matrix(spd.random_point(62).coords, 3);
  KarcherSpd obj(3, {c1, c2}, VectorXd::Constant(2, 0.5));

  const DescentTrace trace =
      run_prox(obj, QuasiDistance::riemannian(), spd.random_point(63), prox_config(1.0));
  CHECK(trace.status == SolveStatus::kConverged);
  REQUIRE(trace.final_point.has_value());
  const Point mid = spd.make_point(Manifold::as_vector(oracles::spd_midpoint(c1, c2)));
  CHECK(spd.dist(*trace.final_point, mid) <= 1e-6);
  check_monotone(trace);
}

TEST_CASE("prox run on the sphere converges to an eigenvector (beyond Hadamard)") {
  RayleighSphere obj((Vector3d(1, 2, 3)).asDiagonal());
  const Manifold& s = obj.manifold();
  const Point x0 = s.make_point(Vector3d(0.2, 0.5, 0.6).normalized());
  const DescentTrace trace = run_prox(obj, QuasiDistance::riemannian(), x0, prox_config(1.0));
  CHECK(trace.status == SolveStatus::kConverged);
  REQUIRE(trace.final_point.has_value());
  double best = 0.0;
  for (int i = 0; i < 3; ++i) {
    best = std::max(best, std::abs(trace.final_point->coords[i]));
  }
  CHECK(best >= 1.0 - 1e-6);  // aligned with a coordinate axis = eigenvector of diag A
  check_monotone(trace);
}

TEST_CASE("gauge quasi-distance prox converges and records asymmetric steps") {
  EuclideanQuadratic obj(Matrix2d::Identity(), Vector2d(2, 1));
  const QuasiDistance qd = QuasiDistance::gauge(Vector2d(1.2, 1.2), Vector2d(1, 1));
  SolverConfig cfg = prox_config(1.0, 2.0, 1.0, 1e-10, 400, 1e-7);
  const Point x0 = obj.manifold().make_point(Vector2d(0, 0));
  const DescentTrace trace = run_prox(obj, qd, x0, cfg);
  CHECK(trace.status == SolveStatus::kConverged);
  REQUIRE(trace.final_point.has_value());
  CHECK((trace.final_point->coords - Vector2d(2, 1)).norm() <= 1e-6);
  check_monotone(trace);

  // moving componentwise upward toward the center costs w+ = 1.2 per unit
  double max_rel_gap = 0.0;
  for (const TraceStep& st : trace.steps) {
    if (st.dist_step > 1e-12) {
      max_rel_gap = std::max(max_rel_gap, std::abs(st.qd_step - st.dist_step) / st.dist_step);
    }
  }
  CHECK(max_rel_gap >= 0.19);  // 1.2x vs 1x is visibly asymmetric

  // relative-error test needs b > s2
  SolverConfig bad = prox_config(1.0, 1.15);
  CHECK_THROWS_AS(run_prox(obj, qd, x0, bad), std::invalid_argument);
}

TEST_CASE("produced traces satisfy H1/H2 with the constructive constants") {
  // sd-armijo on a quadratic with D = dist and t_init = 1: a = alpha
  VectorXd d(2);
  d << 1.0, 3.0;
  EuclideanQuadratic quad(d.asDiagonal(), Vector2d(0.5, 0.5));
  const QuasiDistance rd = QuasiDistance::riemannian();
  const SolverConfig acfg = armijo_config(0.5, 400, 1e-9);
  const DescentTrace at = steepest_descent(quad, quad.manifold().make_point(Vector2d(3, -2)), acfg);
  CHECK(at.status == SolveStatus::kConverged);
  CHECK(check_h1(at, constructive_h1_constant(acfg, rd, at)).pass);
  CHECK(check_h1(at, 0.5).pass);  // the spec's literal a = alpha claim
  CHECK(check_h2(at, constructive_h2_constant(acfg, rd, at, 3.0)).pass);

  // sd-fixed
  const SolverConfig fcfg = fixed_config(3.0, 0.05, 0.3, 400, 1e-9);
  const DescentTrace ft = steepest_descent(quad, quad.manifold().make_point(Vector2d(3, -2)), fcfg);
  CHECK(ft.status == SolveStatus::kConverged);
  CHECK(check_h1(ft, constructive_h1_constant(fcfg, rd, ft)).pass);
  CHECK(check_h2(ft, constructive_h2_constant(fcfg, rd, ft)).pass);

  // prox: acceptance tests (i) and (ii) are the H1/H2 certificates
  const SolverConfig pcfg = prox_config(2.0);
  const DescentTrace pt = run_prox(quad, rd, quad.manifold().make_point(Vector2d(3, -2)), pcfg);
  CHECK(pt.status == SolveStatus::kConverged);
  CHECK(check_h1(pt, constructive_h1_constant(pcfg, rd, pt)).pass);
  CHECK(check_h1(pt, 0.5 * pcfg.prox.theta * pcfg.prox.lambda_bar).pass);
  CHECK(check_h2(pt, constructive_h2_constant(pcfg, rd, pt)).pass);
  CHECK(check_h2(pt, pcfg.prox.b * pcfg.prox.lambda_tilde).pass);
}

TEST_CASE("armijo floor holds across solver runs with a known lipschitz constant") {
  VectorXd d(3);
  d << 0.5, 2.0, 5.0;
  EuclideanQuadratic obj(d.asDiagonal(), Vector3d(0, 1, -1));
  for (double alpha : {0.1, 0.5, 0.9}) {
    const DescentTrace trace = steepest_descent(
        obj, obj.manifold().make_point(Vector3d(2, 2, 2)), armijo_config(alpha, 400, 1e-9));
    const double floor = std::min(1.0, (1.0 - alpha) / 5.0);
    for (const TraceStep& st : trace.steps) CHECK(st.step >= floor - 1e-12);
  }
}

TEST_CASE("lambda schedules stay inside [lambda_bar, lambda_tilde]") {
  EuclideanQuadratic obj(Matrix2d::Identity(), Vector2d(1, 1));
  SolverConfig cfg = prox_config(0.5);
  cfg.prox.lambda_tilde = 4.0;
  cfg.prox.schedule = LambdaSchedule::kGeometric;
  cfg.prox.lambda_growth = 2.0;
  const DescentTrace trace =
      run_prox(obj, QuasiDistance::riemannian(), obj.manifold().make_point(Vector2d(-2, 3)), cfg);
  CHECK(trace.iterations() >= 2);
  for (const TraceStep& st : trace.steps) {
    CHECK(st.step >= 0.5);
    CHECK(st.step <= 4.0);
  }
  CHECK(trace.steps[0].step == 0.5);
  CHECK(trace.steps[1].step == 1.0);
}
