#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "riemkl/objective.hpp"
#include "riemkl/trace.hpp"

namespace riemkl {

/// Desingularization certificate: phi(s) = c s^{1-theta} (power form) or
/// phi(s) = s/delta (linear form), valid on the ball of radius rho with level
/// height eta. phi(0) = 0, phi' > 0 on (0, eta), phi concave.
struct KLCertificate {
  enum class Form { kPower, kLinear };
  enum class Provenance { kMorse, kNoncritical, kAssumed };

  Form form = Form::kPower;
  double c = 1.0;        // power form coefficient
  double theta = 0.5;    // power form exponent, in [0,1)
  double delta = 1.0;    // linear form slope is 1/delta
  double rho = 0.0;      // validity radius
  double eta = 0.0;      // level height
  Provenance provenance = Provenance::kAssumed;

  double phi(double s) const;
  double phi_prime(double s) const;
};

struct CheckResult {
  bool pass = false;
  double max_violation = 0.0;
};

/// H1: f(x^{k+1}) + a D^2(x^{k+1}, x^k) <= f(x^k) + 1e-12 at every k.
CheckResult check_h1(const DescentTrace& trace, double a);

/// H2: ||w^{k+1}|| <= b D(x^{k+1}, x^k) + 1e-12 at every k.
CheckResult check_h2(const DescentTrace& trace, double b);

/// min over k with D > 0 of (f(x^k) - f(x^{k+1})) / D^2(x^{k+1}, x^k).
double best_feasible_h1_constant(const DescentTrace& trace);
/// max over k of ||w^{k+1}|| / D(x^{k+1}, x^k).
double best_feasible_h2_constant(const DescentTrace& trace);

struct SummabilityResult {
  std::vector<double> partial_sums;   // cumulative sum of D-steps
  std::vector<double> window_ratios;  // per-iteration ratio from window sums
  double tail_ratio = 0.0;            // geometric-tail estimate
  bool is_cauchy_estimate = false;    // ratio < 1 over the last three windows
};

SummabilityResult summability(const DescentTrace& trace);

struct Lemma51Result {
  double lhs = 0.0;  // (sum_{k=1..j} a_{k-1})^{1/2} at the last prefix
  double rhs = 0.0;  // sqrt(a_0) + (sum a_k^2/a_{k-1})^{1/2} at the last prefix
  bool pass = false;
  int first_violation = -1;  // prefix index, -1 when none
};

/// Checks the positive-sequence bound
/// (sum_{k=1}^j a_{k-1})^{1/2} <= sqrt(a_0) + (sum_{k=1}^j a_k^2/a_{k-1})^{1/2}
/// on every prefix j. A proved inequality: failure means an implementation bug.
Lemma51Result lemma51_bound(std::span<const double> a_seq);

struct ExponentEstimate {
  double alpha_hat = 0.0;
  double residual = 0.0;  // RMS residual of the log-log fit
  int points_used = 0;
};

struct ExponentOptions {
  double gap_floor = 1e-12;
  double decades = 1.0;  // fit window: gaps within this many decades of the smallest
  int min_points = 10;
};

/// Least-squares slope of log ||grad f(x^k)|| against log(f(x^k) - f_star).
/// Fits the last decade of gaps by default, widening until `min_points` are
/// available; throws if the whole trace has fewer usable points.
ExponentEstimate estimate_kl_exponent(const DescentTrace& trace, double f_star,
                                      const ExponentOptions& opts = {});

/// Morse certificate phi(s) = 2 sqrt(delta1 s)/delta2 with the safety factors
/// delta1 = 0.75 max|lambda_i|, delta2 = 0.5 min|lambda_i|; eta = rho = radius.
/// Throws for a degenerate (zero-eigenvalue) critical point.
KLCertificate morse_certificate(std::span<const double> hessian_eigenvalues, double radius);

/// Noncritical-point certificate phi(t) = t/delta with delta = ||grad f(xbar)||,
/// rho = eta = delta/2. Throws at a critical point.
KLCertificate noncritical_certificate(const Objective& obj, const Point& xbar);

struct PointwiseKLResult {
  double pass_rate = 1.0;
  int samples_kept = 0;
  int samples_drawn = 0;
};

/// Samples the pointwise KL inequality phi'(f - f(xbar)) ||grad f|| >= 1 over
/// B(xbar, rho) intersected with the level window (f(xbar), f(xbar) + eta).
PointwiseKLResult sample_pointwise_kl(const Objective& obj, const Point& xbar,
                                      const KLCertificate& cert, int num_samples,
                                      std::uint64_t seed);

struct MorseCalibration {
  KLCertificate cert;
  HessianSpectrum spectrum;
  int shrinks = 0;
  PointwiseKLResult check;
};

/// Builds a Morse certificate at xbar and halves the radius until the sampled
/// pointwise KL check passes at `target_rate`.
MorseCalibration calibrated_morse_certificate(const Objective& obj, const Point& xbar,
                                              double initial_radius, std::uint64_t seed,
                                              int check_samples = 2000, double target_rate = 0.99,
                                              int max_shrinks = 60);

struct Lemma52Result {
  int first_valid_k = -1;        // first k from which the inequality holds onward
  std::vector<int> ks;           // monitored indices (k >= 1 with a predecessor step)
  std::vector<double> margins;   // lhs - rhs per monitored k
  std::vector<int> excluded_ks;  // phi undefined (f - f_star outside [0, eta))
};

/// Desingularized descent inequality
///   (b/a) [phi(f(x^k)-f_star) - phi(f(x^{k+1})-f_star)]
///     >= D^2(x^{k+1},x^k) / D(x^k,x^{k-1}) - 1e-10.
Lemma52Result lemma52_monitor(const DescentTrace& trace, const KLCertificate& cert, double a,
                              double b, double f_star);

/// Aggregated monitor verdicts for one trace; fields are populated only for
/// the monitors that were run (see DiagnosticsToggles in the harness).
struct DiagnosticsReport {
  std::optional<CheckResult> h1;
  std::optional<double> h1_constant;
  std::optional<double> best_a;
  std::optional<CheckResult> h2;
  std::optional<double> h2_constant;
  std::optional<double> best_b;
  std::optional<SummabilityResult> summ;
  std::optional<Lemma51Result> lemma51;
  std::optional<ExponentEstimate> exponent;
  std::optional<Lemma52Result> lemma52;
};

}  // namespace riemkl
