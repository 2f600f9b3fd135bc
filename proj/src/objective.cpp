#include "riemkl/objective.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <random>
#include <stdexcept>

namespace riemkl {

namespace {
using Eigen::MatrixXd;
using Eigen::VectorXd;

MatrixXd require_symmetric(MatrixXd m, const char* what) {
  if (m.rows() != m.cols()) throw std::invalid_argument(std::string(what) + ": matrix not square");
  if ((m - m.transpose()).norm() > 1e-9 * std::max(1.0, m.norm())) {
    throw std::invalid_argument(std::string(what) + ": matrix not symmetric");
  }
  return 0.5 * (m + m.transpose());
}
}  // namespace

void Objective::check_point(const Point& x) const {
  if (!(x.desc == manifold_.descriptor())) {
    throw std::invalid_argument(name_ + ": point from a different manifold");
  }
}

std::optional<double> Objective::known_minimum_value() const {
  if (auto m = known_minimizer()) return value(*m);
  return std::nullopt;
}

std::optional<double> Objective::distance_to_minimizer(const Point& x) const {
  if (auto m = known_minimizer()) return manifold_.dist(x, *m);
  return std::nullopt;
}

EuclideanQuadratic::EuclideanQuadratic(MatrixXd q, VectorXd center)
    : Objective(Manifold::euclidean(static_cast<int>(center.size())), "euclidean_quadratic"),
      q_(require_symmetric(std::move(q), "EuclideanQuadratic")),
      center_(std::move(center)) {
  if (q_.rows() != center_.size()) {
    throw std::invalid_argument("EuclideanQuadratic: Q and center dimension mismatch");
  }
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(q_);
  eigenvalues_ = es.eigenvalues();
  if (eigenvalues_.minCoeff() < -1e-12) {
    throw std::invalid_argument("EuclideanQuadratic: Q must be positive semidefinite");
  }
  lambda_max_ = eigenvalues_.maxCoeff();
}

double EuclideanQuadratic::value(const Point& x) const {
  check_point(x);
  const VectorXd d = x.coords - center_;
  return 0.5 * d.dot(q_ * d);
}

Tangent EuclideanQuadratic::gradient(const Point& x) const {
  check_point(x);
  return Tangent{x, q_ * (x.coords - center_)};
}

std::optional<Point> EuclideanQuadratic::known_minimizer() const {
  return manifold_.make_point(center_);
}

PowerNorm::PowerNorm(int dim, double p)
    : Objective(Manifold::euclidean(dim), "power_norm"), p_(p) {
  if (p < 2.0) throw std::invalid_argument("PowerNorm: exponent must be >= 2");
}

double PowerNorm::value(const Point& x) const {
  check_point(x);
  return std::pow(x.coords.norm(), p_);
}

Tangent PowerNorm::gradient(const Point& x) const {
  check_point(x);
  const double n = x.coords.norm();
  if (n == 0.0) {
    // p = 2: grad = 2x = 0 here anyway; p > 2: the analytic limit is 0.
    return Tangent{x, VectorXd::Zero(x.coords.size())};
  }
  return Tangent{x, p_ * std::pow(n, p_ - 2.0) * x.coords};
}

std::optional<double> PowerNorm::analytic_lipschitz() const {
  if (p_ == 2.0) return 2.0;
  return std::nullopt;  // not globally Lipschitz for p > 2
}

std::optional<Point> PowerNorm::known_minimizer() const {
  return manifold_.make_point(VectorXd::Zero(manifold_.ambient_dim()));
}

RayleighSphere::RayleighSphere(MatrixXd a)
    : Objective(Manifold::sphere(static_cast<int>(a.rows())), "rayleigh_sphere"),
      a_(require_symmetric(std::move(a), "RayleighSphere")) {
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(a_);
  eigenvalues_ = es.eigenvalues();
  eigenvectors_ = es.eigenvectors();
  lambda_min_ = eigenvalues_.minCoeff();
}

double RayleighSphere::value(const Point& x) const {
  check_point(x);
  return x.coords.dot(a_ * x.coords);
}

Tangent RayleighSphere::gradient(const Point& x) const {
  check_point(x);
  const VectorXd ax = a_ * x.coords;
  const double f = x.coords.dot(ax);
  return Tangent{x, 2.0 * (ax - f * x.coords)};
}

std::optional<Point> RayleighSphere::known_minimizer() const {
  return manifold_.make_point(eigenvectors_.col(0));
}

std::optional<double> RayleighSphere::distance_to_minimizer(const Point& x) const {
  // Minimizers come in antipodal pairs +-v; report the closer one.
  const Point plus = manifold_.make_point(eigenvectors_.col(0));
  const Point minus = manifold_.make_point(-eigenvectors_.col(0));
  return std::min(manifold_.dist(x, plus), manifold_.dist(x, minus));
}

KarcherSpd::KarcherSpd(int side, std::vector<MatrixXd> anchors, VectorXd weights)
    : Objective(Manifold::spd(side), "karcher_spd"),
      anchors_(std::move(anchors)),
      weights_(std::move(weights)) {
  if (anchors_.empty()) throw std::invalid_argument("KarcherSpd: needs at least one anchor");
  if (static_cast<int>(anchors_.size()) != weights_.size()) {
    throw std::invalid_argument("KarcherSpd: anchor/weight count mismatch");
  }
  if (weights_.minCoeff() < 0.0 || std::abs(weights_.sum() - 1.0) > 1e-9) {
    throw std::invalid_argument("KarcherSpd: weights must be nonnegative and sum to 1");
  }
  anchor_points_.reserve(anchors_.size());
  for (const MatrixXd& c : anchors_) {
    if (c.rows() != side || c.cols() != side) {
      throw std::invalid_argument("KarcherSpd: anchor size mismatch");
    }
    anchor_points_.push_back(manifold_.make_point(Manifold::as_vector(c)));
  }
}

double KarcherSpd::value(const Point& x) const {
  check_point(x);
  double sum = 0.0;
  for (std::size_t i = 0; i < anchor_points_.size(); ++i) {
    const double d = manifold_.dist(x, anchor_points_[i]);
    sum += weights_[static_cast<Eigen::Index>(i)] * d * d;
  }
  return 0.5 * sum;
}

Tangent KarcherSpd::gradient(const Point& x) const {
  check_point(x);
  VectorXd g = VectorXd::Zero(manifold_.ambient_dim());
  for (std::size_t i = 0; i < anchor_points_.size(); ++i) {
    g -= weights_[static_cast<Eigen::Index>(i)] * manifold_.log(x, anchor_points_[i]).components;
  }
  return Tangent{x, std::move(g)};
}

std::optional<Point> KarcherSpd::known_minimizer() const {
  if (anchors_.size() == 1) return anchor_points_[0];
  if (anchors_.size() == 2 && std::abs(weights_[0] - weights_[1]) < 1e-12) {
    return manifold_.make_point(Manifold::as_vector(geodesic_midpoint(anchors_[0], anchors_[1])));
  }
  return std::nullopt;
}

Eigen::MatrixXd KarcherSpd::geodesic_midpoint(const MatrixXd& c1, const MatrixXd& c2) {
  const Manifold m = Manifold::spd(static_cast<int>(c1.rows()));
  const Point p1 = m.make_point(Manifold::as_vector(c1));
  const Point p2 = m.make_point(Manifold::as_vector(c2));
  const Tangent half = 0.5 * m.log(p1, p2);
  return Manifold::as_matrix(m.exp(p1, half).coords, static_cast<int>(c1.rows()));
}

double sampled_lipschitz_estimate(const Objective& obj, const RegionSpec& region,
                                  std::uint64_t seed) {
  if (region.radius <= 0.0) {
    throw std::invalid_argument("lipschitz_estimate: region radius must be positive");
  }
  const Manifold& m = obj.manifold();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  // Keep geodesics on the sphere well inside a normal neighborhood.
  const double max_len =
      (m.kind() == ManifoldKind::kSphere) ? std::min(region.radius, 1.0) : region.radius;

  double best = 0.0;
  for (int s = 0; s < region.num_samples; ++s) {
    Tangent dir = m.random_tangent(region.center, rng());
    const double dn = m.norm(region.center, dir);
    if (dn < 1e-12) continue;
    const Point x = m.exp(region.center, (region.radius * unif(rng) / dn) * dir);

    Tangent step = m.random_tangent(x, rng());
    const double sn = m.norm(x, step);
    if (sn < 1e-12) continue;
    const double t = std::max(1e-6, max_len * 0.5 * unif(rng));
    const Point y = m.exp(x, (t / sn) * step);

    const double den = m.dist(x, y);
    if (den < 1e-10) continue;
    const Tangent moved = m.transport(x, y, obj.gradient(x));
    const Tangent diff = obj.gradient(y) - moved;
    best = std::max(best, m.norm(y, diff) / den);
  }
  return 1.5 * best;
}

double lipschitz_estimate(const Objective& obj, const RegionSpec& region, std::uint64_t seed) {
  if (auto analytic = obj.analytic_lipschitz()) return *analytic;
  return sampled_lipschitz_estimate(obj, region, seed);
}

HessianSpectrum hessian_spectrum(const Objective& obj, const Point& x, double h) {
  const Manifold& m = obj.manifold();
  if (h <= 0.0) h = 1e-4 * std::max(1.0, x.coords.norm());

  HessianSpectrum out;
  out.grad_norm = m.norm(x, obj.gradient(x));
  out.critical = out.grad_norm <= 1e-6;

  const std::vector<Tangent> basis = m.tangent_basis(x);
  const int d = static_cast<int>(basis.size());
  MatrixXd hess(d, d);
  for (int j = 0; j < d; ++j) {
    const Point yp = m.exp(x, h * basis[j]);
    const Point ym = m.exp(x, -h * basis[j]);
    const Tangent gp = obj.gradient(yp);
    const Tangent gm = obj.gradient(ym);
    for (int i = 0; i < d; ++i) {
      const double fp = m.inner(yp, gp, m.transport(x, yp, basis[i]));
      const double fm = m.inner(ym, gm, m.transport(x, ym, basis[i]));
      hess(i, j) = (fp - fm) / (2.0 * h);
    }
  }
  hess = 0.5 * (hess + hess.transpose()).eval();
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(hess);
  out.eigenvalues = es.eigenvalues();
  return out;
}

}  // namespace riemkl
