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

#ifndef LINFCURVES_DIAGNOSTICS_HPP_
#define LINFCURVES_DIAGNOSTICS_HPP_

#include <map>
#include <string>
#include <vector>

#include "linfcurves/ode.hpp"

namespace linf {

// Quantitative verification: invariant drift, extremality residuals,
// conserved quantities and J_infinity, aggregated into a report with
// pass/fail verdicts at configurable thresholds.

struct DiagnosticsThresholds {
  double z_drift = 1e-6;
  double conserved_rel = 1e-6;
  double l_residual = 1e-3;       // at grid step ~1e-3 (stencil-dominated)
  double sphere_constraint = 1e-9;
  double tangency = 1e-8;
  double phi_zero = 1e-6;         // relative to max phi, for zero detection
};

struct DiagnosticsReport {
  double z_drift = 0.0;
  std::map<std::string, double> constraint_drifts;
  double l_residual_max = 0.0;
  double j_inf = 0.0;
  double phi_min = 0.0;
  std::vector<double> phi_zero_times;
  std::map<std::string, bool> verdicts;
  DiagnosticsThresholds thresholds;

  bool all_pass() const;
  /// Stable JSON shape; keys are documented in the README.
  std::string to_json(int indent = 2) const;
};

/// Compute every metric applicable to the trajectory's system.
DiagnosticsReport analyze(const Trajectory& traj,
                          const DiagnosticsThresholds& thresholds = {});

/// Max over the grid of the Riemannian norm of covariant acceleration,
/// by 4th-order finite differences of the sampled velocity.
double j_infinity(const Trajectory& traj);

/// Covariant acceleration samples (finite-difference, 4th order interior).
std::vector<Vec> covariant_acceleration(const Trajectory& traj);

enum class CompareMetric { Endpoint, PointwiseMax };

/// Discrepancy between two trajectories of the same system after aligning
/// grids by cubic Hermite interpolation (derivatives from the system RHS).
double compare(const Trajectory& a, const Trajectory& b, CompareMetric metric);

}  // namespace linf

#endif  // LINFCURVES_DIAGNOSTICS_HPP_
