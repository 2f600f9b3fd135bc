#include "riemkl/quasimetric.hpp"

#include <cmath>
#include <stdexcept>

namespace riemkl {

namespace {
using Eigen::VectorXd;

void check_gauge_applicable(const Manifold& m) {
  if (m.kind() != ManifoldKind::kEuclidean) {
    throw std::invalid_argument("quasidistance: gauge variant requires a Euclidean manifold");
  }
}
}  // namespace

QuasiDistance QuasiDistance::riemannian() {
  return QuasiDistance(QuasiDistanceVariant::kRiemannian, 1.0, {}, {});
}

QuasiDistance QuasiDistance::scaled(double c) {
  if (c <= 0.0) throw std::invalid_argument("quasidistance: scale must be positive");
  return QuasiDistance(QuasiDistanceVariant::kScaled, c, {}, {});
}

QuasiDistance QuasiDistance::gauge(VectorXd w_plus, VectorXd w_minus) {
  if (w_plus.size() != w_minus.size() || w_plus.size() == 0) {
    throw std::invalid_argument("quasidistance: gauge weight vectors must match and be nonempty");
  }
  if (w_plus.minCoeff() <= 0.0 || w_minus.minCoeff() <= 0.0) {
    throw std::invalid_argument("quasidistance: gauge weights must be positive");
  }
  return QuasiDistance(QuasiDistanceVariant::kGauge, 1.0, std::move(w_plus), std::move(w_minus));
}

double QuasiDistance::operator()(const Manifold& m, const Point& x, const Point& y) const {
  switch (variant_) {
    case QuasiDistanceVariant::kRiemannian:
      return m.dist(x, y);
    case QuasiDistanceVariant::kScaled:
      return scale_ * m.dist(x, y);
    case QuasiDistanceVariant::kGauge: {
      check_gauge_applicable(m);
      if (y.coords.size() != w_plus_.size()) {
        throw std::invalid_argument("quasidistance: gauge weight dimension mismatch");
      }
      const VectorXd u = y.coords - x.coords;
      double s = 0.0;
      for (Eigen::Index i = 0; i < u.size(); ++i) {
        const double up = std::max(u[i], 0.0);
        const double un = std::max(-u[i], 0.0);
        s += w_plus_[i] * w_plus_[i] * up * up + w_minus_[i] * w_minus_[i] * un * un;
      }
      return std::sqrt(s);
    }
  }
  throw std::logic_error("quasidistance: unknown variant");
}

std::pair<double, double> QuasiDistance::equivalence_constants() const {
  switch (variant_) {
    case QuasiDistanceVariant::kRiemannian:
      return {1.0, 1.0};
    case QuasiDistanceVariant::kScaled:
      return {scale_, scale_};
    case QuasiDistanceVariant::kGauge: {
      const double lo = std::min(w_plus_.minCoeff(), w_minus_.minCoeff());
      const double hi = std::max(w_plus_.maxCoeff(), w_minus_.maxCoeff());
      return {lo, hi};
    }
  }
  throw std::logic_error("quasidistance: unknown variant");
}

Tangent QuasiDistance::sq_grad_y(const Manifold& m, const Point& x, const Point& y) const {
  switch (variant_) {
    case QuasiDistanceVariant::kRiemannian:
      return -2.0 * m.log(y, x);
    case QuasiDistanceVariant::kScaled:
      return (-2.0 * scale_ * scale_) * m.log(y, x);
    case QuasiDistanceVariant::kGauge: {
      check_gauge_applicable(m);
      const VectorXd u = y.coords - x.coords;
      VectorXd g(u.size());
      for (Eigen::Index i = 0; i < u.size(); ++i) {
        g[i] = u[i] >= 0.0 ? 2.0 * w_plus_[i] * w_plus_[i] * u[i]
                           : 2.0 * w_minus_[i] * w_minus_[i] * u[i];
      }
      return Tangent{y, std::move(g)};
    }
  }
  throw std::logic_error("quasidistance: unknown variant");
}

}  // namespace riemkl
