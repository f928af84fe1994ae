// Copyright 2026 The linfcurves Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "linfcurves/manifold.hpp"

using namespace linf;

namespace {

Vec v3(double a, double b, double c) {
  Vec v(3);
  v << a, b, c;
  return v;
}

Vec v2(double a, double b) {
  Vec v(2);
  v << a, b;
  return v;
}

}  // namespace

TEST_CASE("inner products are euclidean dot products in ambient coords") {
  CHECK(inner(ManifoldId::sphere(2), v3(1, 0, 0), v3(0, 1, 0), v3(0, 1, 0)) ==
        doctest::Approx(1.0));
  CHECK(inner(ManifoldId::euclidean(2), v2(0, 0), v2(1, 2), v2(3, -1)) ==
        doctest::Approx(1.0));
  CHECK(inner(ManifoldId::so3(), v3(0, 0, 0), v3(1, 2, 3), v3(1, 2, 3)) ==
        doctest::Approx(14.0));
}

TEST_CASE("inner is symmetric and positive definite") {
  std::mt19937 rng(7);
  std::normal_distribution<double> g;
  for (int k = 0; k < 20; ++k) {
    const Vec a = v3(g(rng), g(rng), g(rng));
    const Vec b = v3(g(rng), g(rng), g(rng));
    const ManifoldId m = ManifoldId::euclidean(3);
    CHECK(inner(m, a, a, b) == doctest::Approx(inner(m, a, b, a)));
    if (a.norm() > 0) CHECK(inner(m, b, a, a) > 0);
  }
  CHECK_THROWS_AS(inner(ManifoldId::euclidean(3), v3(0, 0, 0), v2(1, 0),
                        v3(1, 0, 0)),
                  std::invalid_argument);
}

TEST_CASE("sphere curvature action matches its formula") {
  CHECK((sphere_curvature_action(v3(0, 1, 0), v3(0, 0, 1), v3(0, 0, 1)) -
         v3(0, 1, 0))
            .norm() == doctest::Approx(0.0));
  CHECK(sphere_curvature_action(v3(0, 1, 0), v3(0, 1, 0), v3(1, 2, 3))
            .norm() == doctest::Approx(0.0));
  CHECK((sphere_curvature_action(v3(0, 1, 0), v3(0, 0, 1), v3(0, 1, 0)) -
         v3(0, 0, -1))
            .norm() == doctest::Approx(0.0));
}

TEST_CASE("curvature symmetries hold on random quadruples") {
  std::mt19937 rng(11);
  std::normal_distribution<double> g;
  for (int k = 0; k < 30; ++k) {
    const Vec X = v3(g(rng), g(rng), g(rng));
    const Vec Y = v3(g(rng), g(rng), g(rng));
    const Vec Z = v3(g(rng), g(rng), g(rng));
    const Vec W = v3(g(rng), g(rng), g(rng));
    // antisymmetry in the first two slots
    CHECK((sphere_curvature_action(X, Y, Z) + sphere_curvature_action(Y, X, Z))
              .norm() < 1e-12 * (1 + X.norm() * Y.norm() * Z.norm()));
    // pair-swap symmetry <R(X,Y)Z, W> = <R(Z,W)X, Y>
    const double lhs = sphere_curvature_action(X, Y, Z).dot(W);
    const double rhs = sphere_curvature_action(Z, W, X).dot(Y);
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-10));
  }
}

TEST_CASE("so3 curvature is -1/4 [[X,Y],Z]") {
  const Vec3 X(1, 0, 0), Y(0, 1, 0), Z(0, 1, 0);
  // [X,Y] = X x Y = e3; [[X,Y],Z] = e3 x e2 = -e1
  const Vec got = curvature_action(ManifoldId::so3(), X, Y, Z);
  CHECK((got - v3(0.25, 0, 0)).norm() == doctest::Approx(0.0));
  CHECK(curvature_action(ManifoldId::euclidean(3), X, Y, Z).norm() == 0.0);
}

TEST_CASE("project_tangent removes the normal component, idempotently") {
  const ManifoldId S2 = ManifoldId::sphere(2);
  CHECK((project_tangent(S2, v3(1, 0, 0), v3(1, 1, 0)) - v3(0, 1, 0)).norm() ==
        doctest::Approx(0.0));
  CHECK(project_tangent(S2, v3(0, 0, 1), v3(0, 0, 5)).norm() ==
        doctest::Approx(0.0));
  CHECK((project_tangent(ManifoldId::euclidean(3), v3(0, 0, 0), v3(1, 2, 3)) -
         v3(1, 2, 3))
            .norm() == doctest::Approx(0.0));

  std::mt19937 rng(3);
  std::normal_distribution<double> g;
  for (int k = 0; k < 20; ++k) {
    Vec base = v3(g(rng), g(rng), g(rng));
    base.normalize();
    const Vec v = v3(g(rng), g(rng), g(rng));
    const Vec p = project_tangent(S2, base, v);
    CHECK(std::abs(p.dot(base)) < 1e-14 * (1 + v.norm()));
    CHECK((project_tangent(S2, base, p) - p).norm() < 1e-14 * (1 + v.norm()));
  }
}

namespace {

struct GridField {
  std::vector<Vec> pos, vel, field;
  double dt;
};

// samples of a great circle x(t) = (cos t, sin t, 0) with a chosen field
GridField circle_field(int n, double dt, int which) {
  GridField g;
  g.dt = dt;
  for (int i = 0; i < n; ++i) {
    const double t = i * dt;
    g.pos.push_back(v3(std::cos(t), std::sin(t), 0));
    g.vel.push_back(v3(-std::sin(t), std::cos(t), 0));
    if (which == 0) g.field.push_back(g.vel.back());     // Z = velocity
    if (which == 1) g.field.push_back(v3(0, 0, 1));      // constant normal
  }
  return g;
}

}  // namespace

TEST_CASE("covariant derivative along curves: known-zero cases") {
  const ManifoldId S2 = ManifoldId::sphere(2);

  // Euclidean constant field
  std::vector<Vec> pos, vel, field;
  for (int i = 0; i < 9; ++i) {
    pos.push_back(v3(i * 0.1, 0, 0));
    vel.push_back(v3(1, 0, 0));
    field.push_back(v3(2, -1, 5));
  }
  CHECK(covariant_derivative_fd(ManifoldId::euclidean(3), pos, vel, 0.1, field,
                                4)
            .norm() < 1e-12);

  // geodesic velocity field: nabla_t x' = 0
  const GridField a = circle_field(41, 0.05, 0);
  for (std::size_t i : {std::size_t(0), std::size_t(20), std::size_t(40)})
    CHECK(covariant_derivative_fd(S2, a.pos, a.vel, a.dt, a.field, i).norm() <
          1e-3);

  // constant field normal to the circle plane stays parallel
  const GridField b = circle_field(41, 0.05, 1);
  CHECK(covariant_derivative_fd(S2, b.pos, b.vel, b.dt, b.field, 20).norm() <
        1e-12);
}

TEST_CASE("so3-reduced covariant derivative uses the half-bracket") {
  // constant field Z with V constant: nabla_t Z = (1/2) V x Z
  std::vector<Vec> pos, vel, field;
  const Vec3 V(0.3, -1.0, 2.0), Z(1.0, 1.0, 0.0);
  for (int i = 0; i < 9; ++i) {
    pos.push_back(Vec(Vec3::Zero()));
    vel.push_back(Vec(V));
    field.push_back(Vec(Z));
  }
  const Vec got =
      covariant_derivative_fd(ManifoldId::so3(), pos, vel, 0.1, field, 4);
  CHECK((got - Vec(Vec3(0.5 * V.cross(Z)))).norm() < 1e-12);
}

TEST_CASE("L residual: affine fields along straight lines vanish") {
  std::vector<Vec> pos, vel, X;
  const int n = 21;
  const double h = 0.05;
  for (int i = 0; i < n; ++i) {
    const double t = i * h;
    pos.push_back(v2(t, 2 * t));
    vel.push_back(v2(1, 2));
    X.push_back(v2(1 + 3 * t, -2 + t));
  }
  const auto res = l_residual(ManifoldId::euclidean(2), pos, vel, h, X);
  for (double r : res) CHECK(r < 1e-10);

  std::vector<Vec> zeros(n, v2(0, 0));
  for (double r : l_residual(ManifoldId::euclidean(2), pos, vel, h, zeros))
    CHECK(r == 0.0);
}

TEST_CASE("L residual converges at order >= 2 under grid refinement") {
  // along a great circle, the field X(t) = sin(t) * (0,0,1) satisfies
  // nabla_t^2 X = -sin(t) e3 and R(X, x')x' = sin(t) e3: L(X) = 0
  auto build = [](int n, double h) {
    std::vector<Vec> pos, vel, X;
    for (int i = 0; i < n; ++i) {
      const double t = i * h;
      pos.push_back(v3(std::cos(t), std::sin(t), 0));
      vel.push_back(v3(-std::sin(t), std::cos(t), 0));
      X.push_back(v3(0, 0, std::sin(t) + 2 * std::cos(t)));
    }
    return std::tuple{pos, vel, X};
  };
  auto max_res = [&](int n, double h) {
    auto [pos, vel, X] = build(n, h);
    const auto res = l_residual(ManifoldId::sphere(2), pos, vel, h, X);
    double worst = 0;
    for (double r : res) worst = std::max(worst, r);
    return worst;
  };
  const double coarse = max_res(41, 0.05);
  const double fine = max_res(81, 0.025);
  CHECK(fine < coarse / 3.5);  // ~4x for a 2nd-order stencil
}

TEST_CASE("rotation helpers") {
  const Vec3 v(0.3, -0.2, 0.9);
  const Mat3 H = hat(v);
  CHECK((H.transpose() + H).norm() == doctest::Approx(0.0));
  CHECK((vee(H) - v).norm() == doctest::Approx(0.0));
  const Vec3 w(1, 2, 3);
  CHECK((H * w - Vec3(v.cross(w))).norm() == doctest::Approx(0.0));

  const Mat3 R = so3_exp(Vec3(0, 0, M_PI / 2));
  CHECK(is_rotation(R));
  CHECK((R * Vec3(1, 0, 0) - Vec3(0, 1, 0)).norm() < 1e-12);
  CHECK(is_rotation(so3_exp(Vec3(1e-12, 0, 0))));  // small-angle path

  Mat3 noisy = R;
  noisy(0, 1) += 1e-4;
  CHECK_FALSE(is_rotation(noisy));
  const Mat3 fixed = nearest_rotation(noisy);
  CHECK(is_rotation(fixed));
  CHECK((fixed - R).norm() < 1e-3);
}
