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

#ifndef LINFCURVES_SHOOTING_HPP_
#define LINFCURVES_SHOOTING_HPP_

#include <vector>

#include "linfcurves/diagnostics.hpp"
#include "linfcurves/euclid.hpp"
#include "linfcurves/ode.hpp"

namespace linf {

// Boundary-value recovery by shooting over the extremal systems. Unknowns
// are (X(t0), X'(t0), z) with the scale gauge removed by the normalization
// |X0|^2 + |X0dot|^2 = 1 (the multiplier is determined only up to positive
// scale). Position residuals on the sphere use ambient (chordal)
// coordinates.

enum class BvpVariant { FullVelocities, FreeEndVelocity };

struct ShootingProblem {
  ManifoldId manifold;
  BvpVariant variant = BvpVariant::FullVelocities;
  BoundaryData boundary;            // v1 required for FullVelocities
  int max_iterations = 80;
  int restarts = 32;
  double residual_tol = 1e-8;
  IntegrateOptions ode;
};

struct ShootingUnknowns {
  Vec X0, X0dot;                    // ambient coordinates, normalized
  double z = 0.0;
};

struct ShootingResult {
  Trajectory solution;
  ShootingUnknowns unknowns;
  double residual = 0.0;
  int iterations = 0;
  bool converged = false;
  int seed_index = -1;
  DiagnosticsReport diagnostics;
};

/// Boundary residual of one forward integration from the given unknowns.
/// FullVelocities: [x(t1)-x1; v(t1)-v1]. FreeEndVelocity: [x(t1)-x1; X(t1)].
/// A mid-span |X| -> 0 event is returned as a penalized residual.
Vec shooting_residual(const ShootingProblem& problem,
                      const ShootingUnknowns& unknowns);

/// Damped Gauss-Newton over deterministic seeded restarts. Converged
/// candidates are ranked by z (then residual); never claims optimality.
ShootingResult solve(const ShootingProblem& problem);

/// Normalize (X0, X0dot) to the unit gauge sphere.
ShootingUnknowns normalize_unknowns(const ShootingUnknowns& u);

struct SegmentReport {
  double t_begin = 0, t_end = 0;
  double z_mean = 0;
  double z_drift_rel = 0;           // (max-min)/mean of |acc|
  double l_residual_rel = 0;        // scale-free L(phi*acc) residual
  double phi_begin = 0, phi_end = 0;  // recovered, max-normalized
  bool z_constant = false;
  bool l_ok = false;
  bool pass = false;
};

struct MultipointReport {
  std::vector<SegmentReport> segments;
  bool any_segment_passes = false;
  bool first_segment_phi0_zero = false;  // Phi(t_0) = 0 on segment 1
  bool last_segment_phi1_zero = false;   // Phi(t_n) = 0 on segment n
};

struct MultipointOptions {
  double z_drift_rel_tol = 1e-3;
  double l_residual_rel_tol = 1e-2;
  double phi_zero_tol = 1e-3;       // relative to the segment's max phi
};

/// Per-segment necessary-condition check between consecutive knot times:
/// constancy of |acc| and least-squares recovery of phi with L(phi*acc)=0.
MultipointReport check_multipoint(const Trajectory& traj,
                                  const std::vector<double>& knot_times,
                                  const MultipointOptions& opts = {});

}  // namespace linf

#endif  // LINFCURVES_SHOOTING_HPP_
