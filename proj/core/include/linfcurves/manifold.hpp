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

#ifndef LINFCURVES_MANIFOLD_HPP_
#define LINFCURVES_MANIFOLD_HPP_

#include <cstddef>
#include <vector>

#include "linfcurves/types.hpp"

namespace linf {

// Ambient-coordinate geometry for the three supported manifolds. In the
// chosen coordinates (sphere embedded in E^{m+1}, so(3) identified with E^3)
// the Riemannian inner product is the Euclidean dot product everywhere, and
// covariant derivatives along curves are plain time derivatives plus a
// manifold correction term.

/// Riemannian inner product of tangent vectors a, b at `base`.
double inner(const ManifoldId& manifold, const Vec& base, const Vec& a,
             const Vec& b);

/// Unit-sphere curvature action R(X,Y)Z = <Y,Z>X - <X,Z>Y.
Vec sphere_curvature_action(const Vec& X, const Vec& Y, const Vec& Z);

/// Curvature action R(X,Y)Z for the given manifold. Euclidean: zero.
/// SO(3) with the bi-invariant metric: -1/4 [[X,Y],Z].
Vec curvature_action(const ManifoldId& manifold, const Vec& X, const Vec& Y,
                     const Vec& Z);

/// Orthogonal projection of v onto the tangent space at `base`.
/// Sphere: v - <v,base> base. Euclidean and so(3) coordinates: identity.
Vec project_tangent(const ManifoldId& manifold, const Vec& base, const Vec& v);

/// Covariant derivative of a sampled field along a uniformly sampled curve,
/// by finite differences: central 3-point interior, one-sided 2nd order at
/// the ends.
///
/// `positions` are curve samples x(t_i) and `velocities` their velocities;
/// for SO(3)-reduced fields `velocities` carries V(t_i) (positions are
/// ignored) and the correction term is (1/2) V x Z.
Vec covariant_derivative_fd(const ManifoldId& manifold,
                            const std::vector<Vec>& positions,
                            const std::vector<Vec>& velocities, double dt,
                            const std::vector<Vec>& field, std::size_t index);

/// Per-interior-gridpoint Riemannian norm of
///   L(X) = nabla_t^2 X + R(X, x') x'
/// computed by nested finite differences on a uniform grid.
/// Returns one value per grid point; the two samples at each end are 0
/// placeholders (the nested stencil does not reach them).
std::vector<double> l_residual(const ManifoldId& manifold,
                               const std::vector<Vec>& positions,
                               const std::vector<Vec>& velocities, double dt,
                               const std::vector<Vec>& X_samples);

}  // namespace linf

#endif  // LINFCURVES_MANIFOLD_HPP_
