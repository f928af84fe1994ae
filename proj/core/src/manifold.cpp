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

#include "linfcurves/manifold.hpp"

#include <cmath>

namespace linf {

bool is_rotation(const Mat3& R, double tol) {
  const double ortho = (R.transpose() * R - Mat3::Identity()).norm();
  return ortho <= tol && std::abs(R.determinant() - 1.0) <= tol;
}

Mat3 nearest_rotation(const Mat3& M) {
  Eigen::JacobiSVD<Mat3> svd(M, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Mat3 R = svd.matrixU() * svd.matrixV().transpose();
  if (R.determinant() < 0) {
    Mat3 D = Mat3::Identity();
    D(2, 2) = -1.0;
    R = svd.matrixU() * D * svd.matrixV().transpose();
  }
  return R;
}

Mat3 hat(const Vec3& v) {
  Mat3 M;
  M << 0, -v.z(), v.y(), v.z(), 0, -v.x(), -v.y(), v.x(), 0;
  return M;
}

Vec3 vee(const Mat3& M) { return Vec3(M(2, 1), M(0, 2), M(1, 0)); }

Mat3 so3_exp(const Vec3& v) {
  const double th = v.norm();
  const Mat3 K = hat(v);
  if (th < 1e-12) return Mat3::Identity() + K + 0.5 * K * K;
  return Mat3::Identity() + (std::sin(th) / th) * K +
         ((1.0 - std::cos(th)) / (th * th)) * K * K;
}

double inner(const ManifoldId& manifold, const Vec& /*base*/, const Vec& a,
             const Vec& b) {
  require(a.size() == manifold.ambient_dim() &&
              b.size() == manifold.ambient_dim(),
          "inner: dimension mismatch");
  // In ambient/embedded coordinates all three metrics are Euclidean.
  return a.dot(b);
}

Vec sphere_curvature_action(const Vec& X, const Vec& Y, const Vec& Z) {
  require(X.size() == Y.size() && Y.size() == Z.size(),
          "sphere_curvature_action: dimension mismatch");
  return Y.dot(Z) * X - X.dot(Z) * Y;
}

Vec curvature_action(const ManifoldId& manifold, const Vec& X, const Vec& Y,
                     const Vec& Z) {
  switch (manifold.kind) {
    case ManifoldKind::Euclidean:
      return Vec::Zero(X.size());
    case ManifoldKind::Sphere:
      return sphere_curvature_action(X, Y, Z);
    case ManifoldKind::SO3: {
      const Vec3 x = X.head<3>(), y = Y.head<3>(), z = Z.head<3>();
      return -0.25 * Vec3(x.cross(y).cross(z));
    }
  }
  return Vec::Zero(X.size());
}

Vec project_tangent(const ManifoldId& manifold, const Vec& base,
                    const Vec& v) {
  if (manifold.kind == ManifoldKind::Sphere) return v - v.dot(base) * base;
  return v;
}

namespace {

// d/dt of a sampled field by finite differences; 2nd order everywhere.
Vec fd_time_derivative(const std::vector<Vec>& f, double dt,
                       std::size_t i) {
  const std::size_t n = f.size();
  if (i == 0) return (-3.0 * f[0] + 4.0 * f[1] - f[2]) / (2.0 * dt);
  if (i == n - 1)
    return (3.0 * f[n - 1] - 4.0 * f[n - 2] + f[n - 3]) / (2.0 * dt);
  return (f[i + 1] - f[i - 1]) / (2.0 * dt);
}

Vec correction(const ManifoldId& manifold, const Vec& x, const Vec& vel,
               const Vec& z) {
  switch (manifold.kind) {
    case ManifoldKind::Euclidean:
      return Vec::Zero(z.size());
    case ManifoldKind::Sphere:
      return vel.dot(z) * x;
    case ManifoldKind::SO3:
      // vel carries the Lie reduction V; bi-invariant connection term.
      return 0.5 * Vec3(Vec3(vel.head<3>()).cross(Vec3(z.head<3>())));
  }
  return Vec::Zero(z.size());
}

}  // namespace

Vec covariant_derivative_fd(const ManifoldId& manifold,
                            const std::vector<Vec>& positions,
                            const std::vector<Vec>& velocities, double dt,
                            const std::vector<Vec>& field,
                            std::size_t index) {
  require(field.size() >= 3, "covariant_derivative_fd: grid too short");
  require(velocities.size() == field.size(),
          "covariant_derivative_fd: sample count mismatch");
  const Vec dz = fd_time_derivative(field, dt, index);
  const Vec x = manifold.kind == ManifoldKind::Sphere ? positions[index]
                                                      : Vec::Zero(dz.size());
  return dz + correction(manifold, x, velocities[index], field[index]);
}

std::vector<double> l_residual(const ManifoldId& manifold,
                               const std::vector<Vec>& positions,
                               const std::vector<Vec>& velocities, double dt,
                               const std::vector<Vec>& X_samples) {
  const std::size_t n = X_samples.size();
  require(n >= 5, "l_residual: grid too short");
  require(velocities.size() == n, "l_residual: sample count mismatch");

  std::vector<Vec> d1(n);
  for (std::size_t i = 0; i < n; ++i)
    d1[i] = covariant_derivative_fd(manifold, positions, velocities, dt,
                                    X_samples, i);

  std::vector<double> out(n, 0.0);
  for (std::size_t i = 2; i + 2 < n; ++i) {
    const Vec d2 =
        covariant_derivative_fd(manifold, positions, velocities, dt, d1, i);
    const Vec r = d2 + curvature_action(manifold, X_samples[i], velocities[i],
                                        velocities[i]);
    out[i] = r.norm();
  }
  return out;
}

}  // namespace linf
