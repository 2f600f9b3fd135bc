// Independent test oracles: everything here recomputes expected values through
// a different route than the library code it checks.
#pragma once

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <cmath>
#include <functional>
#include <optional>

namespace oracles {

using Eigen::MatrixXd;
using Eigen::VectorXd;

// Parallel transport along the great circle from x to y on the unit sphere by
// RK4 integration of the transport ODE V' = -<V, gamma'> gamma.
inline VectorXd sphere_transport_ode(const VectorXd& x, const VectorXd& y, const VectorXd& v0,
                                     int steps = 4000) {
  const double c = std::min(1.0, std::max(-1.0, x.dot(y)));
  const double theta = std::acos(c);
  if (theta < 1e-14) return v0;
  const VectorXd u = (y - c * x).normalized();
  const auto gamma = [&](double t) { return std::cos(theta * t) * x + std::sin(theta * t) * u; };
  const auto dgamma = [&](double t) {
    return theta * (-std::sin(theta * t) * x + std::cos(theta * t) * u);
  };
  const auto rhs = [&](double t, const VectorXd& v) -> VectorXd {
    return -v.dot(dgamma(t)) * gamma(t);
  };
  VectorXd v = v0;
  const double h = 1.0 / steps;
  for (int i = 0; i < steps; ++i) {
    const double t = i * h;
    const VectorXd k1 = rhs(t, v);
    const VectorXd k2 = rhs(t + 0.5 * h, v + 0.5 * h * k1);
    const VectorXd k3 = rhs(t + 0.5 * h, v + 0.5 * h * k2);
    const VectorXd k4 = rhs(t + h, v + h * k3);
    v += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  return v;
}

// Largest step t_init 2^-j accepted by the Armijo test, evaluated by direct
// scalar enumeration (Euclidean).
inline std::optional<double> armijo_bruteforce(const std::function<double(const VectorXd&)>& f,
                                               const VectorXd& x, const VectorXd& grad,
                                               double alpha, double t_init, int max_halvings) {
  const double fx = f(x);
  const double gn2 = grad.squaredNorm();
  for (int j = 0; j <= max_halvings; ++j) {
    const double t = t_init * std::pow(2.0, -j);
    if (f(x - t * grad) <= fx - alpha * t * gn2) return t;
  }
  return std::nullopt;
}

// Exact proximal map of f(y) = 1/2 ||y - c||^2 with weight lambda at x.
inline VectorXd quadratic_prox(const VectorXd& c, const VectorXd& x, double lambda) {
  return (c + lambda * x) / (1.0 + lambda);
}

// Per-iteration contraction factor of fixed-step descent on 1/2 (x-c)'Q(x-c).
inline double quadratic_contraction(const VectorXd& q_eigenvalues, double t) {
  double r = 0.0;
  for (Eigen::Index i = 0; i < q_eigenvalues.size(); ++i) {
    r = std::max(r, std::abs(1.0 - t * q_eigenvalues[i]));
  }
  return r;
}

inline MatrixXd spd_pow(const MatrixXd& a, double p) {
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(a);
  VectorXd d = es.eigenvalues();
  for (Eigen::Index i = 0; i < d.size(); ++i) d[i] = std::pow(d[i], p);
  return es.eigenvectors() * d.asDiagonal() * es.eigenvectors().transpose();
}

// Geodesic midpoint of two SPD matrices under the affine-invariant metric,
// assembled directly from eigendecompositions.
inline MatrixXd spd_midpoint(const MatrixXd& c1, const MatrixXd& c2) {
  const MatrixXd r = spd_pow(c1, 0.5);
  const MatrixXd ri = spd_pow(c1, -0.5);
  return r * spd_pow(ri * c2 * ri, 0.5) * r;
}

// Directional derivative of f along the geodesic with initial velocity v,
// one-sided difference at step t.
inline double geodesic_directional_fd(const std::function<double(double)>& f_along, double t) {
  return (f_along(t) - f_along(0.0)) / t;
}

}  // namespace oracles
