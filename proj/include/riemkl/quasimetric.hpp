#pragma once

#include <Eigen/Dense>

#include <utility>

#include "riemkl/manifold.hpp"

namespace riemkl {

enum class QuasiDistanceVariant { kRiemannian, kScaled, kGauge };

/// A quasi distance D: nonnegative, D(x,y)=D(y,x)=0 iff x=y, triangular, not
/// necessarily symmetric. Every variant is sandwiched by the Riemannian
/// distance: s1 d(x,y) <= D(x,y) <= s2 d(x,y).
///
/// The asymmetric gauge variant rho(y-x), with
///   rho(u)^2 = sum_i (w_i^+ max(u_i,0))^2 + (w_i^- max(-u_i,0))^2,
/// is restricted to Euclidean manifolds (its subadditivity relies on the
/// linear structure).
class QuasiDistance {
 public:
  static QuasiDistance riemannian();
  static QuasiDistance scaled(double c);
  static QuasiDistance gauge(Eigen::VectorXd w_plus, Eigen::VectorXd w_minus);

  QuasiDistanceVariant variant() const { return variant_; }
  double scale() const { return scale_; }
  const Eigen::VectorXd& w_plus() const { return w_plus_; }
  const Eigen::VectorXd& w_minus() const { return w_minus_; }

  double operator()(const Manifold& m, const Point& x, const Point& y) const;

  /// (s1, s2) with s1 d <= D <= s2 d.
  std::pair<double, double> equivalence_constants() const;

  /// Gradient of y -> D^2(y, x) as a tangent at y. The squared gauge is C^1
  /// (the two branch terms never overlap), so no subgradients are needed.
  Tangent sq_grad_y(const Manifold& m, const Point& x, const Point& y) const;

 private:
  QuasiDistance(QuasiDistanceVariant v, double c, Eigen::VectorXd wp, Eigen::VectorXd wm)
      : variant_(v), scale_(c), w_plus_(std::move(wp)), w_minus_(std::move(wm)) {}

  QuasiDistanceVariant variant_;
  double scale_ = 1.0;
  Eigen::VectorXd w_plus_, w_minus_;
};

}  // namespace riemkl
