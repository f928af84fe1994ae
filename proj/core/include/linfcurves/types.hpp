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

#ifndef LINFCURVES_TYPES_HPP_
#define LINFCURVES_TYPES_HPP_

#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace linf {

/// Coordinate vector in ambient space: E^m for Euclidean(m), E^{m+1} for
/// Sphere(m), E^3 for so(3) (identified with E^3 via the cross product).
using Vec = Eigen::VectorXd;

using Mat3 = Eigen::Matrix3d;
using Vec3 = Eigen::Vector3d;

enum class ManifoldKind { Euclidean, Sphere, SO3 };

struct ManifoldId {
  ManifoldKind kind = ManifoldKind::Euclidean;
  int dim = 3;

  static ManifoldId euclidean(int m) { return {ManifoldKind::Euclidean, m}; }
  static ManifoldId sphere(int m) { return {ManifoldKind::Sphere, m}; }
  static ManifoldId so3() { return {ManifoldKind::SO3, 3}; }

  /// Length of the coordinate vectors this manifold works with.
  int ambient_dim() const {
    switch (kind) {
      case ManifoldKind::Euclidean: return dim;
      case ManifoldKind::Sphere: return dim + 1;
      case ManifoldKind::SO3: return 3;
    }
    return dim;
  }

  bool operator==(const ManifoldId&) const = default;
};

inline std::string to_string(ManifoldKind k) {
  switch (k) {
    case ManifoldKind::Euclidean: return "euclidean";
    case ManifoldKind::Sphere: return "sphere";
    case ManifoldKind::SO3: return "so3";
  }
  return "?";
}

inline constexpr double kRotationTol = 1e-9;

/// True when R is orthogonal with determinant +1, both within tol.
bool is_rotation(const Mat3& R, double tol = kRotationTol);

/// Nearest rotation matrix in the Frobenius sense (polar decomposition).
Mat3 nearest_rotation(const Mat3& M);

/// hat: E^3 -> so(3), hat(v) w = v x w.
Mat3 hat(const Vec3& v);

/// Inverse of hat.
Vec3 vee(const Mat3& M);

/// Matrix exponential of hat(v) (Rodrigues).
Mat3 so3_exp(const Vec3& v);

inline void require(bool cond, const std::string& what) {
  if (!cond) throw std::invalid_argument(what);
}

}  // namespace linf

#endif  // LINFCURVES_TYPES_HPP_
