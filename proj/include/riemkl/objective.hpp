#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "riemkl/manifold.hpp"

namespace riemkl {

/// A C^1 objective on a manifold with an exact Riemannian gradient. Instances
/// are immutable after construction and evaluation is pure.
class Objective {
 public:
  virtual ~Objective() = default;

  const Manifold& manifold() const { return manifold_; }
  const std::string& name() const { return name_; }

  virtual double value(const Point& x) const = 0;
  virtual Tangent gradient(const Point& x) const = 0;

  /// Finite lower bound of f on the manifold.
  virtual double lower_bound() const = 0;

  virtual std::optional<double> analytic_lipschitz() const { return std::nullopt; }
  virtual std::optional<Point> known_minimizer() const { return std::nullopt; }
  virtual std::optional<double> known_minimum_value() const;

  /// Riemannian distance from x to the nearest known minimizer, when one is
  /// available.
  virtual std::optional<double> distance_to_minimizer(const Point& x) const;

 protected:
  Objective(Manifold manifold, std::string name)
      : manifold_(std::move(manifold)), name_(std::move(name)) {}
  void check_point(const Point& x) const;

  Manifold manifold_;
  std::string name_;
};

/// f(x) = 1/2 (x-c)^T Q (x-c) on Euclidean space, Q symmetric PSD.
class EuclideanQuadratic : public Objective {
 public:
  EuclideanQuadratic(Eigen::MatrixXd q, Eigen::VectorXd center);

  double value(const Point& x) const override;
  Tangent gradient(const Point& x) const override;
  double lower_bound() const override { return 0.0; }
  std::optional<double> analytic_lipschitz() const override { return lambda_max_; }
  std::optional<Point> known_minimizer() const override;
  std::optional<double> known_minimum_value() const override { return 0.0; }

  const Eigen::MatrixXd& q() const { return q_; }
  const Eigen::VectorXd& center() const { return center_; }
  const Eigen::VectorXd& q_eigenvalues() const { return eigenvalues_; }

 private:
  Eigen::MatrixXd q_;
  Eigen::VectorXd center_;
  Eigen::VectorXd eigenvalues_;
  double lambda_max_;
};

/// f(x) = ||x||_2^p on Euclidean space, p >= 2. The gradient at the origin is
/// the analytic limit 0 for p > 2. KL exponent is (p-1)/p at the minimizer.
class PowerNorm : public Objective {
 public:
  PowerNorm(int dim, double p);

  double value(const Point& x) const override;
  Tangent gradient(const Point& x) const override;
  double lower_bound() const override { return 0.0; }
  std::optional<double> analytic_lipschitz() const override;
  std::optional<Point> known_minimizer() const override;
  std::optional<double> known_minimum_value() const override { return 0.0; }

  double p() const { return p_; }

 private:
  double p_;
};

/// f(x) = x^T A x on the unit sphere. Critical points are the eigenvectors of
/// A; for distinct eigenvalues this is a Morse function on the sphere.
class RayleighSphere : public Objective {
 public:
  explicit RayleighSphere(Eigen::MatrixXd a);

  double value(const Point& x) const override;
  Tangent gradient(const Point& x) const override;
  double lower_bound() const override { return lambda_min_; }
  std::optional<Point> known_minimizer() const override;
  std::optional<double> known_minimum_value() const override { return lambda_min_; }
  std::optional<double> distance_to_minimizer(const Point& x) const override;

  const Eigen::MatrixXd& a() const { return a_; }
  const Eigen::VectorXd& a_eigenvalues() const { return eigenvalues_; }

 private:
  Eigen::MatrixXd a_;
  Eigen::VectorXd eigenvalues_;
  Eigen::MatrixXd eigenvectors_;
  double lambda_min_;
};

/// f(X) = 1/2 sum_i w_i dist^2(X, C_i) on SPD(m): the weighted Karcher-mean
/// objective. Gradient uses the exact log-map formula -sum_i w_i log_X(C_i).
class KarcherSpd : public Objective {
 public:
  KarcherSpd(int side, std::vector<Eigen::MatrixXd> anchors, Eigen::VectorXd weights);

  double value(const Point& x) const override;
  Tangent gradient(const Point& x) const override;
  double lower_bound() const override { return 0.0; }
  std::optional<Point> known_minimizer() const override;

  /// Closed-form geodesic midpoint C1^{1/2}(C1^{-1/2} C2 C1^{-1/2})^{1/2} C1^{1/2}.
  static Eigen::MatrixXd geodesic_midpoint(const Eigen::MatrixXd& c1, const Eigen::MatrixXd& c2);

  const std::vector<Eigen::MatrixXd>& anchors() const { return anchors_; }
  const Eigen::VectorXd& weights() const { return weights_; }

 private:
  std::vector<Eigen::MatrixXd> anchors_;
  std::vector<Point> anchor_points_;
  Eigen::VectorXd weights_;
};

/// Sampling region for gradient-Lipschitz estimation: a geodesic ball.
struct RegionSpec {
  Point center;
  double radius = 1.0;
  int num_samples = 200;
};

/// Upper estimate of the gradient's Lipschitz constant over the region:
/// analytic value when the instance provides one, otherwise 1.5 times the
/// largest sampled transport-difference quotient.
double lipschitz_estimate(const Objective& obj, const RegionSpec& region, std::uint64_t seed);

/// Sampled quotient estimate regardless of any analytic constant (test hook).
double sampled_lipschitz_estimate(const Objective& obj, const RegionSpec& region,
                                  std::uint64_t seed);

struct HessianSpectrum {
  Eigen::VectorXd eigenvalues;  // ascending
  double grad_norm = 0.0;
  bool critical = true;  // false = warning, the point was not near-critical
};

/// Spectrum of the geodesic finite-difference Hessian at x over an orthonormal
/// tangent basis. `h <= 0` selects the default step 1e-4 * max(1, ||x||).
HessianSpectrum hessian_spectrum(const Objective& obj, const Point& x, double h = 0.0);

}  // namespace riemkl
