#include "riemkl/manifold.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <random>
#include <stdexcept>
#include <string>

namespace riemkl {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

constexpr double kAntipodalTol = 1e-12;
constexpr double kSphereNormTol = 1e-9;
constexpr double kSymmetryTol = 1e-9;

MatrixXd symmetrize(const MatrixXd& a) { return 0.5 * (a + a.transpose()); }

// phi applied to the spectrum of a symmetric matrix.
template <typename F>
MatrixXd sym_matrix_function(const MatrixXd& a, F phi, const char* what) {
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(a);
  if (es.info() != Eigen::Success) {
    throw std::runtime_error(std::string("manifold: eigendecomposition failed in ") + what);
  }
  VectorXd d = es.eigenvalues();
  for (Eigen::Index i = 0; i < d.size(); ++i) {
    d[i] = phi(d[i]);
  }
  return es.eigenvectors() * d.asDiagonal() * es.eigenvectors().transpose();
}

MatrixXd spd_sqrt(const MatrixXd& a) {
  return sym_matrix_function(a, [](double t) { return std::sqrt(std::max(t, 0.0)); }, "sqrt");
}

MatrixXd spd_inv_sqrt(const MatrixXd& a) {
  return sym_matrix_function(
      a,
      [](double t) {
        if (t <= 0.0) throw std::domain_error("manifold: matrix not positive definite");
        return 1.0 / std::sqrt(t);
      },
      "inv_sqrt");
}

MatrixXd sym_exp(const MatrixXd& a) {
  return sym_matrix_function(a, [](double t) { return std::exp(t); }, "exp");
}

MatrixXd spd_log(const MatrixXd& a) {
  return sym_matrix_function(
      a,
      [](double t) {
        if (t <= 0.0) throw std::domain_error("manifold: log of non-positive-definite matrix");
        return std::log(t);
      },
      "log");
}

double clamp_unit(double t) { return std::min(1.0, std::max(-1.0, t)); }

void check_same_base(const Point& x, const Tangent& v, const char* where) {
  if (!(x.desc == v.base.desc) || x.coords.size() != v.base.coords.size() ||
      (x.coords - v.base.coords).squaredNorm() != 0.0) {
    throw std::invalid_argument(std::string(where) + ": tangent base point mismatch");
  }
}

}  // namespace

Tangent operator+(const Tangent& u, const Tangent& v) {
  check_same_base(u.base, v, "tangent+");
  return Tangent{u.base, u.components + v.components};
}

Tangent operator-(const Tangent& u, const Tangent& v) {
  check_same_base(u.base, v, "tangent-");
  return Tangent{u.base, u.components - v.components};
}

Tangent operator*(double s, const Tangent& v) { return Tangent{v.base, s * v.components}; }

Manifold Manifold::euclidean(int n) {
  if (n < 1) throw std::invalid_argument("manifold: dimension must be positive");
  return Manifold({ManifoldKind::kEuclidean, n, 0, n, CurvatureSign::kZero});
}

Manifold Manifold::sphere(int ambient_n) {
  if (ambient_n < 2) throw std::invalid_argument("manifold: sphere needs ambient dimension >= 2");
  return Manifold({ManifoldKind::kSphere, ambient_n, 0, ambient_n - 1, CurvatureSign::kPositive});
}

Manifold Manifold::spd(int m) {
  if (m < 1) throw std::invalid_argument("manifold: matrix side must be positive");
  return Manifold({ManifoldKind::kSpd, m * m, m, m * (m + 1) / 2, CurvatureSign::kNonpositive});
}

Manifold Manifold::from_descriptor(const ManifoldDescriptor& desc) {
  switch (desc.kind) {
    case ManifoldKind::kEuclidean:
      return euclidean(desc.ambient_dim);
    case ManifoldKind::kSphere:
      return sphere(desc.ambient_dim);
    case ManifoldKind::kSpd:
      return spd(desc.matrix_side);
  }
  throw std::invalid_argument("manifold: unknown kind");
}

Eigen::MatrixXd Manifold::as_matrix(const VectorXd& coords, int m) {
  return Eigen::Map<const MatrixXd>(coords.data(), m, m);
}

Eigen::VectorXd Manifold::as_vector(const MatrixXd& mat) {
  return Eigen::Map<const VectorXd>(mat.data(), mat.size());
}

void Manifold::check_point(const Point& x, const char* where) const {
  if (!(x.desc == desc_)) {
    throw std::invalid_argument(std::string(where) + ": point from a different manifold");
  }
}

Point Manifold::make_point(VectorXd coords) const {
  if (coords.size() != desc_.ambient_dim) {
    throw std::invalid_argument("make_point: coordinate size mismatch");
  }
  switch (desc_.kind) {
    case ManifoldKind::kEuclidean:
      break;
    case ManifoldKind::kSphere: {
      const double n = coords.norm();
      if (std::abs(n - 1.0) > 1e-6) {
        throw std::invalid_argument("make_point: sphere point is far from unit norm");
      }
      coords /= n;  // keep the invariant tight over long runs
      break;
    }
    case ManifoldKind::kSpd: {
      const int m = desc_.matrix_side;
      MatrixXd M = as_matrix(coords, m);
      const double scale = std::max(1.0, M.norm());
      if ((M - M.transpose()).norm() > kSymmetryTol * scale) {
        throw std::invalid_argument("make_point: SPD coordinates are not symmetric");
      }
      M = symmetrize(M);
      Eigen::SelfAdjointEigenSolver<MatrixXd> es(M);
      if (es.eigenvalues().minCoeff() <= 0.0) {
        throw std::invalid_argument("make_point: matrix is not positive definite");
      }
      coords = as_vector(M);
      break;
    }
  }
  return Point{desc_, std::move(coords)};
}

Tangent Manifold::make_tangent(const Point& x, VectorXd components) const {
  check_point(x, "make_tangent");
  if (components.size() != desc_.ambient_dim) {
    throw std::invalid_argument("make_tangent: component size mismatch");
  }
  switch (desc_.kind) {
    case ManifoldKind::kEuclidean:
      break;
    case ManifoldKind::kSphere: {
      const double vn = components.norm();
      if (vn > 0 && std::abs(x.coords.dot(components)) > kSphereNormTol * vn) {
        throw std::invalid_argument("make_tangent: vector is not tangent to the sphere");
      }
      break;
    }
    case ManifoldKind::kSpd: {
      const int m = desc_.matrix_side;
      MatrixXd V = as_matrix(components, m);
      const double scale = std::max(1.0, V.norm());
      if ((V - V.transpose()).norm() > kSymmetryTol * scale) {
        throw std::invalid_argument("make_tangent: SPD tangent must be symmetric");
      }
      components = as_vector(symmetrize(V));
      break;
    }
  }
  return Tangent{x, std::move(components)};
}

Tangent Manifold::zero_tangent(const Point& x) const {
  check_point(x, "zero_tangent");
  return Tangent{x, VectorXd::Zero(desc_.ambient_dim)};
}

double Manifold::inner(const Point& x, const Tangent& u, const Tangent& v) const {
  check_point(x, "inner");
  check_same_base(x, u, "inner");
  check_same_base(x, v, "inner");
  switch (desc_.kind) {
    case ManifoldKind::kEuclidean:
    case ManifoldKind::kSphere:
      return u.components.dot(v.components);
    case ManifoldKind::kSpd: {
      const int m = desc_.matrix_side;
      const MatrixXd X = as_matrix(x.coords, m);
      Eigen::LLT<MatrixXd> llt(X);
      const MatrixXd A = llt.solve(as_matrix(u.components, m));
      const MatrixXd B = llt.solve(as_matrix(v.components, m));
      return (A * B).trace();
    }
  }
  return 0.0;
}

double Manifold::norm(const Point& x, const Tangent& v) const {
  return std::sqrt(std::max(0.0, inner(x, v, v)));
}

Point Manifold::exp(const Point& x, const Tangent& v) const {
  check_point(x, "exp");
  check_same_base(x, v, "exp");
  switch (desc_.kind) {
    case ManifoldKind::kEuclidean:
      return Point{desc_, x.coords + v.components};
    case ManifoldKind::kSphere: {
      const double theta = v.components.norm();
      if (theta == 0.0) return x;
      VectorXd y = std::cos(theta) * x.coords + (std::sin(theta) / theta) * v.components;
      y /= y.norm();
      return Point{desc_, std::move(y)};
    }
    case ManifoldKind::kSpd: {
      const int m = desc_.matrix_side;
      const MatrixXd X = as_matrix(x.coords, m);
      const MatrixXd Xh = spd_sqrt(X);
      const MatrixXd Xih = spd_inv_sqrt(X);
      const MatrixXd S = symmetrize(Xih * as_matrix(v.components, m) * Xih);
      const MatrixXd Y = symmetrize(Xh * sym_exp(S) * Xh);
      return Point{desc_, as_vector(Y)};
    }
  }
  throw std::logic_error("exp: unknown manifold kind");
}

Tangent Manifold::log(const Point& x, const Point& y) const {
  check_point(x, "log");
  check_point(y, "log");
  if (x.coords == y.coords) return zero_tangent(x);
  switch (desc_.kind) {
    case ManifoldKind::kEuclidean:
      return Tangent{x, y.coords - x.coords};
    case ManifoldKind::kSphere: {
      const double c = clamp_unit(x.coords.dot(y.coords));
      if (c <= -1.0 + kAntipodalTol) {
        throw std::domain_error("log: antipodal points on the sphere have no unique geodesic");
      }
      VectorXd w = y.coords - c * x.coords;
      const double wn = w.norm();
      if (wn < 1e-15) return zero_tangent(x);
      const double theta = std::acos(c);
      return Tangent{x, (theta / wn) * w};
    }
    case ManifoldKind::kSpd: {
      const int m = desc_.matrix_side;
      const MatrixXd X = as_matrix(x.coords, m);
      const MatrixXd Xh = spd_sqrt(X);
      const MatrixXd Xih = spd_inv_sqrt(X);
      const MatrixXd S = symmetrize(Xih * as_matrix(y.coords, m) * Xih);
      const MatrixXd V = symmetrize(Xh * spd_log(S) * Xh);
      return Tangent{x, as_vector(V)};
    }
  }
  throw std::logic_error("log: unknown manifold kind");
}

double Manifold::dist(const Point& x, const Point& y) const {
  check_point(x, "dist");
  check_point(y, "dist");
  if (x.coords == y.coords) return 0.0;
  switch (desc_.kind) {
    case ManifoldKind::kEuclidean:
      return (x.coords - y.coords).norm();
    case ManifoldKind::kSphere:
      return std::acos(clamp_unit(x.coords.dot(y.coords)));
    case ManifoldKind::kSpd: {
      const int m = desc_.matrix_side;
      const MatrixXd Xih = spd_inv_sqrt(as_matrix(x.coords, m));
      const MatrixXd S = symmetrize(Xih * as_matrix(y.coords, m) * Xih);
      Eigen::SelfAdjointEigenSolver<MatrixXd> es(S);
      double sum = 0.0;
      for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
        const double lam = es.eigenvalues()[i];
        if (lam <= 0.0) throw std::domain_error("dist: matrix not positive definite");
        const double l = std::log(lam);
        sum += l * l;
      }
      return std::sqrt(sum);
    }
  }
  throw std::logic_error("dist: unknown manifold kind");
}

Tangent Manifold::transport(const Point& x, const Point& y, const Tangent& v) const {
  check_point(x, "transport");
  check_point(y, "transport");
  check_same_base(x, v, "transport");
  if (x.coords == y.coords) return Tangent{y, v.components};
  switch (desc_.kind) {
    case ManifoldKind::kEuclidean:
      return Tangent{y, v.components};
    case ManifoldKind::kSphere: {
      const double c = clamp_unit(x.coords.dot(y.coords));
      if (c <= -1.0 + kAntipodalTol) {
        throw std::domain_error("transport: antipodal points on the sphere");
      }
      const Tangent dir = log(x, y);
      const double theta = dir.components.norm();
      if (theta < 1e-15) return Tangent{y, v.components};
      const VectorXd u = dir.components / theta;
      const double a = u.dot(v.components);
      // Rotation in span{x, u}; the orthogonal complement rides along unchanged.
      VectorXd w = v.components + a * ((std::cos(theta) - 1.0) * u - std::sin(theta) * x.coords);
      return Tangent{y, std::move(w)};
    }
    case ManifoldKind::kSpd: {
      const int m = desc_.matrix_side;
      const MatrixXd X = as_matrix(x.coords, m);
      const MatrixXd Y = as_matrix(y.coords, m);
      const MatrixXd Xh = spd_sqrt(X);
      const MatrixXd Xih = spd_inv_sqrt(X);
      // E = (Y X^{-1})^{1/2} computed through the symmetric similarity
      // X^{-1/2} Y X^{-1/2}.
      const MatrixXd S = symmetrize(Xih * Y * Xih);
      const MatrixXd E = Xh * spd_sqrt(S) * Xih;
      const MatrixXd W = symmetrize(E * as_matrix(v.components, m) * E.transpose());
      return Tangent{y, as_vector(W)};
    }
  }
  throw std::logic_error("transport: unknown manifold kind");
}

Tangent Manifold::project_tangent(const Point& x, const VectorXd& ambient_grad) const {
  check_point(x, "project_tangent");
  if (ambient_grad.size() != desc_.ambient_dim) {
    throw std::invalid_argument("project_tangent: gradient size mismatch");
  }
  switch (desc_.kind) {
    case ManifoldKind::kEuclidean:
      return Tangent{x, ambient_grad};
    case ManifoldKind::kSphere:
      return Tangent{x, ambient_grad - x.coords.dot(ambient_grad) * x.coords};
    case ManifoldKind::kSpd: {
      const int m = desc_.matrix_side;
      const MatrixXd X = as_matrix(x.coords, m);
      const MatrixXd G = symmetrize(as_matrix(ambient_grad, m));
      return Tangent{x, as_vector(symmetrize(X * G * X))};
    }
  }
  throw std::logic_error("project_tangent: unknown manifold kind");
}

Point Manifold::random_point(std::uint64_t seed) const {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  switch (desc_.kind) {
    case ManifoldKind::kEuclidean: {
      VectorXd x(desc_.ambient_dim);
      for (Eigen::Index i = 0; i < x.size(); ++i) x[i] = gauss(rng);
      return Point{desc_, std::move(x)};
    }
    case ManifoldKind::kSphere: {
      VectorXd x(desc_.ambient_dim);
      do {
        for (Eigen::Index i = 0; i < x.size(); ++i) x[i] = gauss(rng);
      } while (x.norm() < 1e-6);
      x /= x.norm();
      return Point{desc_, std::move(x)};
    }
    case ManifoldKind::kSpd: {
      const int m = desc_.matrix_side;
      MatrixXd A(m, m);
      for (int j = 0; j < m; ++j)
        for (int i = 0; i < m; ++i) A(i, j) = gauss(rng);
      const MatrixXd X = A * A.transpose() + 1e-3 * MatrixXd::Identity(m, m);
      return Point{desc_, as_vector(X)};
    }
  }
  throw std::logic_error("random_point: unknown manifold kind");
}

Tangent Manifold::random_tangent(const Point& x, std::uint64_t seed) const {
  check_point(x, "random_tangent");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  VectorXd g(desc_.ambient_dim);
  for (Eigen::Index i = 0; i < g.size(); ++i) g[i] = gauss(rng);
  switch (desc_.kind) {
    case ManifoldKind::kEuclidean:
      return Tangent{x, std::move(g)};
    case ManifoldKind::kSphere:
      return Tangent{x, g - x.coords.dot(g) * x.coords};
    case ManifoldKind::kSpd: {
      const int m = desc_.matrix_side;
      return Tangent{x, as_vector(symmetrize(as_matrix(g, m)))};
    }
  }
  throw std::logic_error("random_tangent: unknown manifold kind");
}

std::vector<Tangent> Manifold::tangent_basis(const Point& x) const {
  check_point(x, "tangent_basis");
  std::vector<Tangent> basis;
  basis.reserve(desc_.intrinsic_dim);
  switch (desc_.kind) {
    case ManifoldKind::kEuclidean: {
      for (int i = 0; i < desc_.ambient_dim; ++i) {
        VectorXd e = VectorXd::Zero(desc_.ambient_dim);
        e[i] = 1.0;
        basis.push_back(Tangent{x, std::move(e)});
      }
      break;
    }
    case ManifoldKind::kSphere: {
      // Gram-Schmidt of the projected coordinate axes, dropping whichever one
      // degenerates.
      const int n = desc_.ambient_dim;
      std::vector<VectorXd> ortho;
      for (int i = 0; i < n && static_cast<int>(ortho.size()) < n - 1; ++i) {
        VectorXd e = VectorXd::Zero(n);
        e[i] = 1.0;
        VectorXd w = e - x.coords.dot(e) * x.coords;
        for (const VectorXd& b : ortho) w -= b.dot(w) * b;
        const double wn = w.norm();
        if (wn > 1e-8) ortho.push_back(w / wn);
      }
      for (VectorXd& b : ortho) basis.push_back(Tangent{x, std::move(b)});
      break;
    }
    case ManifoldKind::kSpd: {
      // Frobenius-orthonormal symmetric basis pushed through X^{1/2} . X^{1/2},
      // which is orthonormal in the affine-invariant metric at X.
      const int m = desc_.matrix_side;
      const MatrixXd Xh = spd_sqrt(as_matrix(x.coords, m));
      const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
      for (int i = 0; i < m; ++i) {
        for (int j = i; j < m; ++j) {
          MatrixXd B = MatrixXd::Zero(m, m);
          if (i == j) {
            B(i, i) = 1.0;
          } else {
            B(i, j) = inv_sqrt2;
            B(j, i) = inv_sqrt2;
          }
          basis.push_back(Tangent{x, as_vector(symmetrize(Xh * B * Xh))});
        }
      }
      break;
    }
  }
  return basis;
}

}  // namespace riemkl
