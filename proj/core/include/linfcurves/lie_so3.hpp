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

#ifndef LINFCURVES_LIE_SO3_HPP_
#define LINFCURVES_LIE_SO3_HPP_

#include <vector>

#include "linfcurves/ode.hpp"
#include "linfcurves/types.hpp"

namespace linf {

// SO(3)-specific machinery on top of the reduced (V, W) system:
// conserved quantities, reconstruction of the group trajectory by
// integrating R' = R hat(V), and null-curve classification.

/// Conserved quantities of the reduced system:
///   c = |W'|^2 = |W x V + C|^2,   a = z|W| - <C, V>.
std::pair<double, double> conserved(const So3ReducedState& s);

struct ConservedSeries {
  std::vector<double> c, a, phi;     // sampled along the trajectory
  double c_drift_rel = 0.0;          // (max - min) / max(|median|, eps)
  double a_drift_rel = 0.0;
  double phi_min = 0.0;
};

ConservedSeries conserved_series(const Trajectory& reduced);

struct GroupTrajectory {
  std::vector<double> times;
  std::vector<Mat3> rotations;
};

/// Reconstruct the group trajectory from the reduced solution by solving
/// R' = R hat(V) with classical RK4 on the dense grid (V at stage times by
/// cubic Hermite using V' = z W/|W|), re-orthonormalizing by polar
/// decomposition after each step.
GroupTrajectory reconstruct(const Trajectory& reduced, const Mat3& R0);

/// Left Lie reduction of the numerical derivative of a group trajectory:
/// V_i = vee(R_i^T R'_i) with R' by central differences.
std::vector<Vec3> reduce_group_velocity(const GroupTrajectory& g);

enum class NullVerdict { Null, NonNull };

struct NullReport {
  NullVerdict verdict = NullVerdict::NonNull;
  double phi_drift_rel = 0.0;        // meaningful for Null only
  // max pointwise deviation of V from the reduced Riemannian-cubic
  // integration (V''' = -V x V'' with matched initial data)
  double cubic_residual_max = 0.0;
};

/// Null iff |C| <= tol. For null solutions also measures phi constancy and
/// how far V deviates from the reduced Riemannian-cubic equation.
NullReport classify_null(const Trajectory& reduced, double tol = 1e-12);

/// Max over interior grid points of |V''' + V x V''| (the reduced
/// Riemannian cubic equation on a bi-invariant SO(3)); 4th-order stencils.
double reduced_cubic_residual_max(const std::vector<double>& times,
                                  const std::vector<Vec3>& V);

}  // namespace linf

#endif  // LINFCURVES_LIE_SO3_HPP_
