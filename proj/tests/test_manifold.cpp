#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "oracles.hpp"
#include "riemkl/manifold.hpp"

using namespace riemkl;
using Eigen::MatrixXd;
using Eigen::Vector2d;
using Eigen::Vector3d;
using Eigen::VectorXd;

namespace {

constexpr double kPi = std::numbers::pi;

Point sphere_point(const Manifold& m, std::initializer_list<double> v) {
  VectorXd x(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double c : v) x[i++] = c;
  return m.make_point(x);
}

// scales a random tangent to the requested norm
Tangent random_tangent_with_norm(const Manifold& m, const Point& x, double norm, uint64_t seed) {
  Tangent v = m.random_tangent(x, seed);
  const double n = m.norm(x, v);
  REQUIRE(n > 0.0);
  return (norm / n) * v;
}

}  // namespace

TEST_CASE("descriptors carry intrinsic dimension and curvature sign") {
  CHECK(Manifold::euclidean(4).descriptor().intrinsic_dim == 4);
  CHECK(Manifold::euclidean(4).descriptor().curvature == CurvatureSign::kZero);
  CHECK(Manifold::sphere(3).descriptor().intrinsic_dim == 2);
  CHECK(Manifold::sphere(3).descriptor().curvature == CurvatureSign::kPositive);
  CHECK(Manifold::spd(3).descriptor().intrinsic_dim == 6);
  CHECK(Manifold::spd(3).descriptor().ambient_dim == 9);
  CHECK(Manifold::spd(3).descriptor().curvature == CurvatureSign::kNonpositive);
}

TEST_CASE("point invariants are enforced") {
  const Manifold s = Manifold::sphere(3);
  CHECK_THROWS_AS(s.make_point(Vector3d(2.0, 0.0, 0.0)), std::invalid_argument);

  const Manifold p = Manifold::spd(2);
  MatrixXd asym(2, 2);
  asym << 1.0, 0.5, -0.5, 1.0;
  CHECK_THROWS_AS(p.make_point(Manifold::as_vector(asym)), std::invalid_argument);
  MatrixXd indef(2, 2);
  indef << 1.0, 0.0, 0.0, -1.0;
  CHECK_THROWS_AS(p.make_point(Manifold::as_vector(indef)), std::invalid_argument);

  const Manifold e = Manifold::euclidean(2);
  const Point x = e.make_point(Vector2d(0.0, 0.0));
  CHECK_THROWS_AS(s.inner(sphere_point(s, {1, 0, 0}), Tangent{x, Vector2d(1, 0)},
                          Tangent{x, Vector2d(0, 1)}),
                  std::invalid_argument);
}

TEST_CASE("inner products match the spec examples") {
  const Manifold e = Manifold::euclidean(2);
  const Point x = e.make_point(Vector2d(0.3, -1.0));
  CHECK(e.inner(x, Tangent{x, Vector2d(1, 0)}, Tangent{x, Vector2d(0, 1)}) == 0.0);

  const Manifold p = Manifold::spd(2);
  const Point id = p.make_point(Manifold::as_vector(MatrixXd::Identity(2, 2)));
  const Tangent i_tan = p.make_tangent(id, Manifold::as_vector(MatrixXd::Identity(2, 2)));
  CHECK(p.inner(id, i_tan, i_tan) == doctest::Approx(2.0));

  const Manifold s = Manifold::sphere(3);
  const Point e1 = sphere_point(s, {1, 0, 0});
  const Tangent v = s.make_tangent(e1, Vector3d(0, 2, 0));
  CHECK(s.inner(e1, v, v) == doctest::Approx(4.0));
}

TEST_CASE("exponential map on the three manifolds") {
  const Manifold s = Manifold::sphere(3);
  const Point e1 = sphere_point(s, {1, 0, 0});
  const Point quarter = s.exp(e1, s.make_tangent(e1, Vector3d(0, kPi / 2, 0)));
  CHECK(quarter.coords.isApprox(Vector3d(0, 1, 0), 1e-12));

  const Manifold e = Manifold::euclidean(2);
  const Point x = e.make_point(Vector2d(1.0, 2.0));
  CHECK(e.exp(x, Tangent{x, Vector2d(0.5, -1.0)}).coords.isApprox(Vector2d(1.5, 1.0)));

  const Manifold p = Manifold::spd(2);
  const Point id = p.make_point(Manifold::as_vector(MatrixXd::Identity(2, 2)));
  MatrixXd v(2, 2);
  v << 1.0, 0.0, 0.0, 0.0;
  const Point y = p.exp(id, p.make_tangent(id, Manifold::as_vector(v)));
  MatrixXd expected(2, 2);
  expected << std::exp(1.0), 0.0, 0.0, 1.0;
  CHECK(Manifold::as_matrix(y.coords, 2).isApprox(expected, 1e-12));
}

TEST_CASE("log map inverts exp and flags antipodes") {
  const Manifold s = Manifold::sphere(3);
  const Point e1 = sphere_point(s, {1, 0, 0});
  const Point e2 = sphere_point(s, {0, 1, 0});
  CHECK(s.log(e1, e1).components.norm() == 0.0);
  CHECK(s.log(e1, e2).components.isApprox(Vector3d(0, kPi / 2, 0), 1e-12));
  CHECK_THROWS_AS(s.log(e1, sphere_point(s, {-1, 0, 0})), std::domain_error);
  CHECK_THROWS_AS(
      s.transport(e1, sphere_point(s, {-1, 0, 0}), s.make_tangent(e1, Vector3d(0, 1, 0))),
      std::domain_error);

  const Manifold p = Manifold::spd(2);
  const Point id = p.make_point(Manifold::as_vector(MatrixXd::Identity(2, 2)));
  MatrixXd ym(2, 2);
  ym << std::exp(1.0), 0.0, 0.0, 1.0;
  const Tangent v = p.log(id, p.make_point(Manifold::as_vector(ym)));
  MatrixXd expected(2, 2);
  expected << 1.0, 0.0, 0.0, 0.0;
  CHECK(Manifold::as_matrix(v.components, 2).isApprox(expected, 1e-12));
}

TEST_CASE("distances match the spec examples") {
  const Manifold s = Manifold::sphere(3);
  CHECK(s.dist(sphere_point(s, {1, 0, 0}), sphere_point(s, {0, 1, 0})) ==
        doctest::Approx(kPi / 2));

  const Manifold p = Manifold::spd(2);
  const Point id = p.make_point(Manifold::as_vector(MatrixXd::Identity(2, 2)));
  MatrixXd ym(2, 2);
  ym << std::exp(1.0), 0.0, 0.0, 1.0;
  CHECK(p.dist(id, p.make_point(Manifold::as_vector(ym))) == doctest::Approx(1.0));

  const Manifold e = Manifold::euclidean(2);
  CHECK(e.dist(e.make_point(Vector2d(0, 0)), e.make_point(Vector2d(3, 4))) ==
        doctest::Approx(5.0));
}

TEST_CASE("sphere transport agrees with the closed form and the ODE oracle") {
  const Manifold s = Manifold::sphere(3);
  const Point e1 = sphere_point(s, {1, 0, 0});
  const Point e2 = sphere_point(s, {0, 1, 0});
  const Tangent v = s.make_tangent(e1, Vector3d(0, kPi / 2, 0));
  const Tangent moved = s.transport(e1, e2, v);
  CHECK(moved.components.isApprox(Vector3d(-kPi / 2, 0, 0), 1e-12));

  // random cases against the numerically integrated transport ODE
  for (int n : {3, 6}) {
    const Manifold sn = Manifold::sphere(n);
    for (uint64_t seed = 0; seed < 10; ++seed) {
      const Point x = sn.random_point(100 + seed);
      const Point y = sn.exp(x, random_tangent_with_norm(sn, x, 1.3, 200 + seed));
      const Tangent w = sn.random_tangent(x, 300 + seed);
      const VectorXd expect = oracles::sphere_transport_ode(x.coords, y.coords, w.components);
      CHECK((sn.transport(x, y, w).components - expect).norm() <= 1e-8);
    }
  }
}

TEST_CASE("transport is the identity on zero-length geodesics and in flat space") {
  const Manifold e = Manifold::euclidean(3);
  const Point a = e.random_point(1);
  const Point b = e.random_point(2);
  const Tangent v = e.random_tangent(a, 3);
  CHECK(e.transport(a, b, v).components.isApprox(v.components));

  const Manifold s = Manifold::sphere(4);
  const Point x = s.random_point(4);
  const Tangent w = s.random_tangent(x, 5);
  CHECK(s.transport(x, x, w).components.isApprox(w.components));
}

TEST_CASE("tangent projection") {
  const Manifold s = Manifold::sphere(3);
  const Point e1 = sphere_point(s, {1, 0, 0});
  CHECK(s.project_tangent(e1, Vector3d(1, 0, 0)).components.norm() == 0.0);
  CHECK(s.project_tangent(e1, Vector3d(0.5, 1, 0)).components.isApprox(Vector3d(0, 1, 0)));

  const Manifold p = Manifold::spd(2);
  const Point id = p.make_point(Manifold::as_vector(MatrixXd::Identity(2, 2)));
  MatrixXd g(2, 2);
  g << 0.7, -0.2, -0.2, 1.4;
  CHECK(p.project_tangent(id, Manifold::as_vector(g)).components.isApprox(Manifold::as_vector(g)));
}

TEST_CASE("random points are deterministic in the seed and satisfy invariants") {
  for (const Manifold& m : {Manifold::euclidean(3), Manifold::sphere(4), Manifold::spd(3)}) {
    const Point a = m.random_point(42);
    const Point b = m.random_point(42);
    CHECK(a.coords == b.coords);
    const Point c = m.random_point(43);
    CHECK(a.coords != c.coords);
  }
  const Point x = Manifold::sphere(5).random_point(7);
  CHECK(std::abs(x.coords.norm() - 1.0) <= 1e-12);

  const Point y = Manifold::spd(4).random_point(8);
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(Manifold::as_matrix(y.coords, 4));
  CHECK(es.eigenvalues().minCoeff() > 0.0);
}

TEST_CASE("exp/log roundtrip and distance consistency") {
  for (const Manifold& m : {Manifold::euclidean(4), Manifold::sphere(4), Manifold::spd(3)}) {
    const double max_norm = m.kind() == ManifoldKind::kSphere ? kPi - 0.1 : 1.0;
    for (uint64_t i = 0; i < 30; ++i) {
      const Point x = m.random_point(1000 + i);
      const Tangent v =
          random_tangent_with_norm(m, x, max_norm * (0.05 + 0.95 * (i / 30.0)), 2000 + i);
      const Point y = m.exp(x, v);
      CHECK(m.norm(x, m.log(x, y) - v) <= 1e-8);
      CHECK(std::abs(m.dist(x, y) - m.norm(x, v)) <= 1e-8);
    }
  }
}

TEST_CASE("transport preserves norms and inner products") {
  for (const Manifold& m : {Manifold::euclidean(4), Manifold::sphere(4), Manifold::spd(3)}) {
    for (uint64_t i = 0; i < 20; ++i) {
      const Point x = m.random_point(3000 + i);
      const Point y = m.exp(x, random_tangent_with_norm(m, x, 0.8, 4000 + i));
      const Tangent u = m.random_tangent(x, 5000 + i);
      const Tangent v = m.random_tangent(x, 6000 + i);
      const Tangent tu = m.transport(x, y, u);
      const Tangent tv = m.transport(x, y, v);
      CHECK(std::abs(m.norm(y, tu) - m.norm(x, u)) <= 1e-10 * std::max(1.0, m.norm(x, u)));
      CHECK(std::abs(m.inner(y, tu, tv) - m.inner(x, u, v)) <=
            1e-9 * std::max(1.0, std::abs(m.inner(x, u, v))));
    }
  }
}

TEST_CASE("geodesics have constant speed") {
  for (const Manifold& m : {Manifold::euclidean(3), Manifold::sphere(3), Manifold::spd(2)}) {
    for (uint64_t i = 0; i < 10; ++i) {
      const Point x = m.random_point(7000 + i);
      const Tangent v = random_tangent_with_norm(m, x, 1.0, 8000 + i);
      const double speed = m.norm(x, v);
      for (int k = 0; k + 1 < 10; ++k) {
        const double t0 = k / 10.0, t1 = (k + 1) / 10.0;
        const double chord = m.dist(m.exp(x, t0 * v), m.exp(x, t1 * v));
        CHECK(std::abs(chord - (t1 - t0) * speed) <= 1e-6);
      }
    }
  }
}

TEST_CASE("triangle inequality for dist on random triples") {
  for (const Manifold& m : {Manifold::euclidean(3), Manifold::sphere(3), Manifold::spd(2)}) {
    for (uint64_t i = 0; i < 50; ++i) {
      const Point x = m.random_point(3 * i);
      const Point y = m.random_point(3 * i + 1);
      const Point z = m.random_point(3 * i + 2);
      CHECK(m.dist(x, z) <= m.dist(x, y) + m.dist(y, z) + 1e-12);
    }
  }
}
