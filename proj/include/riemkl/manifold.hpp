#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <vector>

namespace riemkl {

enum class ManifoldKind { kEuclidean, kSphere, kSpd };

enum class CurvatureSign { kZero, kPositive, kNonpositive };

/// Static description of a supported manifold. `ambient_dim` is the length of
/// the coordinate vector carried by points and tangents; SPD matrices store
/// the full m*m entry block (column-major) so that solver code is uniform
/// across manifolds.
struct ManifoldDescriptor {
  ManifoldKind kind = ManifoldKind::kEuclidean;
  int ambient_dim = 0;
  int matrix_side = 0;  // SPD only, 0 otherwise
  int intrinsic_dim = 0;
  CurvatureSign curvature = CurvatureSign::kZero;

  bool operator==(const ManifoldDescriptor&) const = default;
};

/// A manifold element. Immutable after construction; invariants (unit norm on
/// the sphere, symmetry and positive definiteness for SPD) are checked by
/// Manifold::make_point.
struct Point {
  ManifoldDescriptor desc;
  Eigen::VectorXd coords;
};

/// A tangent vector in ambient coordinates, attached to its base point.
struct Tangent {
  Point base;
  Eigen::VectorXd components;
};

// Componentwise arithmetic for tangents sharing a base point.
Tangent operator+(const Tangent& u, const Tangent& v);
Tangent operator-(const Tangent& u, const Tangent& v);
Tangent operator*(double s, const Tangent& v);

/// Exact differential-geometric primitives for Euclidean space, the unit
/// sphere S^{n-1} embedded in R^n, and SPD(m) with the affine-invariant
/// metric. All operations are pure and safe to share across threads.
///
/// SPD matrix functions (sqrt, log, exp of symmetric matrices) go through a
/// symmetric eigendecomposition; intended scale is m <= 20.
class Manifold {
 public:
  static Manifold euclidean(int n);
  static Manifold sphere(int ambient_n);  // S^{ambient_n - 1}
  static Manifold spd(int m);
  static Manifold from_descriptor(const ManifoldDescriptor& desc);

  const ManifoldDescriptor& descriptor() const { return desc_; }
  ManifoldKind kind() const { return desc_.kind; }
  int ambient_dim() const { return desc_.ambient_dim; }
  int intrinsic_dim() const { return desc_.intrinsic_dim; }

  /// Validates invariants and returns a Point (sphere coordinates are
  /// renormalized, SPD blocks resymmetrized before the check).
  Point make_point(Eigen::VectorXd coords) const;
  Tangent make_tangent(const Point& x, Eigen::VectorXd components) const;
  Tangent zero_tangent(const Point& x) const;

  /// Riemannian metric at x. Throws on base-point mismatch.
  double inner(const Point& x, const Tangent& u, const Tangent& v) const;
  double norm(const Point& x, const Tangent& v) const;

  /// Geodesic through x with initial velocity v, evaluated at time 1.
  Point exp(const Point& x, const Tangent& v) const;

  /// Inverse of exp within a normal neighborhood; ||log(x,y)|| = dist(x,y).
  /// Sphere: throws for antipodal pairs (<x,y> <= -1 + 1e-12).
  Tangent log(const Point& x, const Point& y) const;

  double dist(const Point& x, const Point& y) const;

  /// Parallel transport of v along the minimal geodesic from x to y.
  Tangent transport(const Point& x, const Point& y, const Tangent& v) const;

  /// Converts an ambient Euclidean gradient into a Riemannian gradient:
  /// sphere projects out the radial component, SPD applies X sym(g) X.
  Tangent project_tangent(const Point& x, const Eigen::VectorXd& ambient_grad) const;

  /// Deterministic in `seed`. Sphere: normalized Gaussian; SPD: A A^T + 1e-3 I.
  Point random_point(std::uint64_t seed) const;
  Tangent random_tangent(const Point& x, std::uint64_t seed) const;

  /// Orthonormal basis of T_x M (in the metric at x), deterministic in x.
  std::vector<Tangent> tangent_basis(const Point& x) const;

  /// Matrix view helpers for SPD coordinates.
  static Eigen::MatrixXd as_matrix(const Eigen::VectorXd& coords, int m);
  static Eigen::VectorXd as_vector(const Eigen::MatrixXd& mat);

 private:
  explicit Manifold(ManifoldDescriptor desc) : desc_(desc) {}
  void check_point(const Point& x, const char* where) const;

  ManifoldDescriptor desc_;
};

}  // namespace riemkl
