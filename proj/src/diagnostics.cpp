#include "riemkl/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

namespace riemkl {

namespace {
constexpr double kH12Tol = 1e-12;
constexpr double kLemma52Tol = 1e-10;
constexpr double kInf = std::numeric_limits<double>::infinity();
}  // namespace

double KLCertificate::phi(double s) const {
  if (s < 0.0) throw std::domain_error("KLCertificate: phi argument must be nonnegative");
  if (form == Form::kLinear) return s / delta;
  return c * std::pow(s, 1.0 - theta);
}

double KLCertificate::phi_prime(double s) const {
  if (s <= 0.0) throw std::domain_error("KLCertificate: phi' argument must be positive");
  if (form == Form::kLinear) return 1.0 / delta;
  return c * (1.0 - theta) * std::pow(s, -theta);
}

CheckResult check_h1(const DescentTrace& trace, double a) {
  if (a < 0.0) throw std::invalid_argument("check_h1: a must be nonnegative");
  if (trace.iterations() == 0) {
    throw std::invalid_argument("check_h1: empty trace");
  }
  CheckResult res{true, -kInf};
  for (int k = 0; k < trace.iterations(); ++k) {
    const TraceStep& s = trace.steps[static_cast<std::size_t>(k)];
    const double violation = trace.f_at(k + 1) + a * s.qd_step * s.qd_step - s.f;
    res.max_violation = std::max(res.max_violation, violation);
  }
  res.pass = res.max_violation <= kH12Tol;
  return res;
}

CheckResult check_h2(const DescentTrace& trace, double b) {
  if (b < 0.0) throw std::invalid_argument("check_h2: b must be nonnegative");
  if (trace.iterations() == 0) {
    throw std::invalid_argument("check_h2: empty trace");
  }
  CheckResult res{true, -kInf};
  for (const TraceStep& s : trace.steps) {
    const double violation = s.w_norm - b * s.qd_step;
    res.max_violation = std::max(res.max_violation, violation);
  }
  res.pass = res.max_violation <= kH12Tol;
  return res;
}

double best_feasible_h1_constant(const DescentTrace& trace) {
  double best = kInf;
  for (int k = 0; k < trace.iterations(); ++k) {
    const TraceStep& s = trace.steps[static_cast<std::size_t>(k)];
    if (s.qd_step > 0.0) {
      best = std::min(best, (s.f - trace.f_at(k + 1)) / (s.qd_step * s.qd_step));
    }
  }
  return best;
}

double best_feasible_h2_constant(const DescentTrace& trace) {
  double worst = 0.0;
  for (const TraceStep& s : trace.steps) {
    if (s.qd_step > 0.0) {
      worst = std::max(worst, s.w_norm / s.qd_step);
    } else if (s.w_norm > 0.0) {
      return kInf;  // stationary step with nonzero subgradient: H2 unsatisfiable
    }
  }
  return worst;
}

SummabilityResult summability(const DescentTrace& trace) {
  SummabilityResult res;
  res.partial_sums.reserve(trace.steps.size());
  double cum = 0.0;
  for (const TraceStep& s : trace.steps) {
    cum += s.qd_step;
    res.partial_sums.push_back(cum);
  }

  const int n = trace.iterations();
  if (n == 0) {
    res.tail_ratio = 0.0;
    res.is_cauchy_estimate = true;
    return res;
  }
  // Split the step sequence into windows and fit the per-iteration ratio from
  // successive window sums: for D_k ~ C r^k, S_{w+1}/S_w = r^m exactly.
  const int window = std::max(1, n / 8);
  std::vector<double> sums;
  for (int start = 0; start + window <= n; start += window) {
    double s = 0.0;
    for (int k = start; k < start + window; ++k) {
      s += trace.steps[static_cast<std::size_t>(k)].qd_step;
    }
    sums.push_back(s);
  }
  for (std::size_t w = 0; w + 1 < sums.size(); ++w) {
    if (sums[w] > 0.0) {
      res.window_ratios.push_back(std::pow(sums[w + 1] / sums[w], 1.0 / window));
    }
  }
  if (res.window_ratios.empty()) {
    res.tail_ratio = 0.0;
    res.is_cauchy_estimate = cum == 0.0 || trace.status == SolveStatus::kConverged;
    return res;
  }
  const std::size_t tail = std::min<std::size_t>(3, res.window_ratios.size());
  double acc = 0.0;
  bool all_below_one = true;
  for (std::size_t i = res.window_ratios.size() - tail; i < res.window_ratios.size(); ++i) {
    acc += res.window_ratios[i];
    all_below_one = all_below_one && res.window_ratios[i] < 1.0;
  }
  res.tail_ratio = acc / static_cast<double>(tail);
  res.is_cauchy_estimate = all_below_one;
  return res;
}

Lemma51Result lemma51_bound(std::span<const double> a_seq) {
  if (a_seq.empty()) throw std::invalid_argument("lemma51_bound: empty sequence");
  for (double a : a_seq) {
    if (!(a > 0.0)) throw std::invalid_argument("lemma51_bound: entries must be positive");
  }
  Lemma51Result res;
  res.pass = true;
  double sum_prev = 0.0;   // sum_{k=1..j} a_{k-1}
  double sum_ratio = 0.0;  // sum_{k=1..j} a_k^2 / a_{k-1}
  for (std::size_t j = 1; j < a_seq.size(); ++j) {
    sum_prev += a_seq[j - 1];
    sum_ratio += a_seq[j] * a_seq[j] / a_seq[j - 1];
    res.lhs = std::sqrt(sum_prev);
    res.rhs = std::sqrt(a_seq[0]) + std::sqrt(sum_ratio);
    if (res.lhs > res.rhs * (1.0 + 1e-12) + 1e-15 && res.pass) {
      res.pass = false;
      res.first_violation = static_cast<int>(j);
    }
  }
  return res;
}

ExponentEstimate estimate_kl_exponent(const DescentTrace& trace, double f_star,
                                      const ExponentOptions& opts) {
  struct Sample {
    double log_gap;
    double log_grad;
  };
  std::vector<double> gaps, grads;
  for (int k = 0; k <= trace.iterations(); ++k) {
    const double gap = trace.f_at(k) - f_star;
    const double gn = trace.grad_norm_at(k);
    if (gap > opts.gap_floor && gn > 0.0) {
      gaps.push_back(gap);
      grads.push_back(gn);
    }
  }
  if (static_cast<int>(gaps.size()) < opts.min_points) {
    throw std::invalid_argument("estimate_kl_exponent: insufficient points above the gap floor");
  }
  const double g_min = *std::min_element(gaps.begin(), gaps.end());

  std::vector<Sample> sel;
  for (double decades = opts.decades;; decades += 1.0) {
    sel.clear();
    const double cutoff = g_min * std::pow(10.0, decades);
    for (std::size_t i = 0; i < gaps.size(); ++i) {
      if (gaps[i] <= cutoff) sel.push_back(Sample{std::log(gaps[i]), std::log(grads[i])});
    }
    if (static_cast<int>(sel.size()) >= opts.min_points) break;
    if (sel.size() == gaps.size()) break;  // widened to everything already
  }

  // least-squares line log||grad|| = alpha * log(gap) + const
  const double n = static_cast<double>(sel.size());
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (const Sample& s : sel) {
    sx += s.log_gap;
    sy += s.log_grad;
    sxx += s.log_gap * s.log_gap;
    sxy += s.log_gap * s.log_grad;
  }
  const double denom = n * sxx - sx * sx;
  if (std::abs(denom) < 1e-30) {
    throw std::invalid_argument("estimate_kl_exponent: degenerate abscissa (constant gaps)");
  }
  ExponentEstimate est;
  est.alpha_hat = (n * sxy - sx * sy) / denom;
  const double intercept = (sy - est.alpha_hat * sx) / n;
  double rss = 0.0;
  for (const Sample& s : sel) {
    const double r = s.log_grad - (est.alpha_hat * s.log_gap + intercept);
    rss += r * r;
  }
  est.residual = std::sqrt(rss / n);
  est.points_used = static_cast<int>(sel.size());
  return est;
}

KLCertificate morse_certificate(std::span<const double> hessian_eigenvalues, double radius) {
  if (hessian_eigenvalues.empty()) {
    throw std::invalid_argument("morse_certificate: empty spectrum");
  }
  if (radius <= 0.0) throw std::invalid_argument("morse_certificate: radius must be positive");
  double abs_min = kInf, abs_max = 0.0;
  for (double lam : hessian_eigenvalues) {
    abs_min = std::min(abs_min, std::abs(lam));
    abs_max = std::max(abs_max, std::abs(lam));
  }
  if (abs_min <= 1e-12 * std::max(1.0, abs_max)) {
    throw std::invalid_argument("morse_certificate: degenerate critical point (zero eigenvalue)");
  }
  const double delta1 = 0.75 * abs_max;  // 1.5 safety over max|lambda|/2
  const double delta2 = 0.5 * abs_min;   // 0.5 safety under min|lambda|
  KLCertificate cert;
  cert.form = KLCertificate::Form::kPower;
  cert.c = 2.0 * std::sqrt(delta1) / delta2;
  cert.theta = 0.5;
  cert.rho = radius;
  cert.eta = radius;
  cert.provenance = KLCertificate::Provenance::kMorse;
  return cert;
}

KLCertificate noncritical_certificate(const Objective& obj, const Point& xbar) {
  const double delta = obj.manifold().norm(xbar, obj.gradient(xbar));
  if (delta <= 0.0) {
    throw std::invalid_argument("noncritical_certificate: xbar is a critical point");
  }
  KLCertificate cert;
  cert.form = KLCertificate::Form::kLinear;
  cert.delta = delta;
  cert.rho = 0.5 * delta;
  cert.eta = 0.5 * delta;
  cert.provenance = KLCertificate::Provenance::kNoncritical;
  return cert;
}

PointwiseKLResult sample_pointwise_kl(const Objective& obj, const Point& xbar,
                                      const KLCertificate& cert, int num_samples,
                                      std::uint64_t seed) {
  const Manifold& m = obj.manifold();
  const double f_bar = obj.value(xbar);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);

  PointwiseKLResult res;
  res.samples_drawn = num_samples;
  int passes = 0;
  for (int s = 0; s < num_samples; ++s) {
    Tangent dir = m.random_tangent(xbar, rng());
    const double dn = m.norm(xbar, dir);
    if (dn < 1e-12) continue;
    const double r = cert.rho * unif(rng);
    const Point y = m.exp(xbar, (r / dn) * dir);
    const double gap = obj.value(y) - f_bar;
    if (gap <= 1e-14 * std::max(1.0, std::abs(f_bar)) || gap >= cert.eta) continue;
    ++res.samples_kept;
    if (cert.phi_prime(gap) * m.norm(y, obj.gradient(y)) >= 1.0) ++passes;
  }
  res.pass_rate = res.samples_kept == 0 ? 1.0 : static_cast<double>(passes) / res.samples_kept;
  return res;
}

MorseCalibration calibrated_morse_certificate(const Objective& obj, const Point& xbar,
                                              double initial_radius, std::uint64_t seed,
                                              int check_samples, double target_rate,
                                              int max_shrinks) {
  MorseCalibration out;
  out.spectrum = hessian_spectrum(obj, xbar);
  std::vector<double> eigs(out.spectrum.eigenvalues.data(),
                           out.spectrum.eigenvalues.data() + out.spectrum.eigenvalues.size());
  double radius = initial_radius;
  for (int i = 0;; ++i) {
    out.cert = morse_certificate(eigs, radius);
    out.check = sample_pointwise_kl(obj, xbar, out.cert, check_samples, seed + i);
    out.shrinks = i;
    if (out.check.pass_rate >= target_rate) return out;
    if (i >= max_shrinks) {
      throw std::runtime_error(
          "calibrated_morse_certificate: pointwise KL check keeps failing after radius shrink");
    }
    radius *= 0.5;
  }
}

Lemma52Result lemma52_monitor(const DescentTrace& trace, const KLCertificate& cert, double a,
                              double b, double f_star) {
  if (a <= 0.0 || b <= 0.0) {
    throw std::invalid_argument("lemma52_monitor: a and b must be positive");
  }
  Lemma52Result res;
  for (int k = 1; k < trace.iterations(); ++k) {
    const double d_prev = trace.steps[static_cast<std::size_t>(k - 1)].qd_step;
    const double d_cur = trace.steps[static_cast<std::size_t>(k)].qd_step;
    const double gap_k = trace.f_at(k) - f_star;
    const double gap_next = trace.f_at(k + 1) - f_star;
    if (d_prev <= 0.0 || gap_k < 0.0 || gap_next < 0.0 || gap_k >= cert.eta ||
        gap_next >= cert.eta) {
      res.excluded_ks.push_back(k);
      continue;
    }
    const double lhs = (b / a) * (cert.phi(gap_k) - cert.phi(gap_next));
    const double rhs = d_cur * d_cur / d_prev;
    res.ks.push_back(k);
    res.margins.push_back(lhs - rhs);
  }
  // First monitored index from which every later monitored step passes.
  int first_valid = -1;
  for (int i = static_cast<int>(res.ks.size()) - 1; i >= 0; --i) {
    if (res.margins[static_cast<std::size_t>(i)] >= -kLemma52Tol) {
      first_valid = res.ks[static_cast<std::size_t>(i)];
    } else {
      break;
    }
  }
  res.first_valid_k = first_valid;
  return res;
}

}  // namespace riemkl
