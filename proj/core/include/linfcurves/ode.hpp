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

#ifndef LINFCURVES_ODE_HPP_
#define LINFCURVES_ODE_HPP_

#include <array>
#include <optional>
#include <vector>

#include "linfcurves/types.hpp"

namespace linf {

// Extremal ODE systems and their adaptive integration.
//
// SphereExtremal  state [x, xdot, X, Xdot], each of length m+1:
//   x''  = z X/|X| - <x',x'> x
//   X''  = -<x',x'> X - (<x'',X> + 2<x',X'>) x
// So3Reduced      state [V, W] in E^3:
//   V' = z W/|W|,   W' = W x V + C
// EuclidExtremal  state [x, xdot, X, Xdot] in E^m:
//   x'' = z X/|X|,  X'' = 0
// RiemannianCubic state [x, xdot, W1, W2] (W1 = covariant acceleration,
//   W2 = its covariant derivative); comparison baseline, J_2 criticality.
// EuclidSampled   not integrable; positions+velocities sampled from a
//   closed-form curve for diagnostics.

enum class SystemKind {
  SphereExtremal,
  So3Reduced,
  EuclidExtremal,
  RiemannianCubic,
  EuclidSampled,
};

struct SphereExtremalState {
  Vec x, xdot, X, Xdot;
  double z = 0.0;
};

struct So3ReducedState {
  Vec3 V, W;
  double z = 0.0;
  Vec3 C = Vec3::Zero();
};

inline constexpr double kZeroFieldThreshold = 1e-10;

/// Right-hand side of the sphere extremal system. Throws when |X| is at or
/// below `zero_threshold` (callers see the event through integrate()).
SphereExtremalState sphere_rhs(const SphereExtremalState& s,
                               double zero_threshold = kZeroFieldThreshold);

/// Right-hand side of the SO(3)-reduced system (derivatives of V, W).
So3ReducedState so3_reduced_rhs(const So3ReducedState& s,
                                double zero_threshold = kZeroFieldThreshold);

/// Flattened Riemannian cubic right-hand side (Sphere or Euclidean).
Vec riemannian_cubic_rhs(const ManifoldId& manifold, const Vec& state);

enum class IntegrationOutcome { Complete, FieldZeroEvent, StepUnderflow };

struct IntegrateOptions {
  double rtol = 1e-10;
  double atol = 1e-12;
  int samples = 2048;           // uniform dense-output grid size
  double zero_threshold = kZeroFieldThreshold;
  double initial_step = 0.0;    // 0 = automatic
};

struct Trajectory {
  SystemKind system = SystemKind::EuclidSampled;
  ManifoldId manifold;
  double z = 0.0;
  Vec3 C = Vec3::Zero();        // So3Reduced only

  std::vector<double> times;    // uniform, strictly increasing
  std::vector<Vec> states;      // aligned flat states

  IntegrationOutcome outcome = IntegrationOutcome::Complete;
  std::optional<double> event_time;  // |X| (or |W|) threshold crossing
  std::size_t steps_accepted = 0;
  std::size_t steps_rejected = 0;

  double dt() const { return times.size() > 1 ? times[1] - times[0] : 0.0; }

  // State-layout accessors (segments of the flat state).
  Vec position(std::size_t i) const;
  Vec velocity(std::size_t i) const;
  Vec field_X(std::size_t i) const;      // X, W, or W1 depending on system
  Vec field_Xdot(std::size_t i) const;
  /// phi(t_i) = |X|/z (sphere, euclid) or |W|/z (so3); 0 when z = 0.
  double phi(std::size_t i) const;
};

/// Pack/unpack helpers for the flat state layout.
Vec pack_sphere_state(const SphereExtremalState& s);
SphereExtremalState unpack_sphere_state(const Vec& y, int ambient, double z);
Vec pack_so3_state(const So3ReducedState& s);
So3ReducedState unpack_so3_state(const Vec& y, double z, const Vec3& C);

/// Flat right-hand side of an integrable system (EuclidSampled has none).
Vec system_rhs(SystemKind system, const ManifoldId& manifold, double z,
               const Vec3& C, const Vec& state,
               double zero_threshold = kZeroFieldThreshold);

/// Integrate one of the systems with an embedded Runge-Kutta 5(4) pair
/// (Dormand-Prince), PI step control and dense output on a uniform grid.
/// Sphere states are re-projected after each accepted step. Integration
/// halts with FieldZeroEvent when |X| (or |W|) falls below the threshold.
Trajectory integrate(SystemKind system, const ManifoldId& manifold,
                     const Vec& y0, double z, const Vec3& C,
                     std::array<double, 2> span,
                     const IntegrateOptions& opts = {});

/// Sample a closed-form Euclidean curve into an EuclidSampled trajectory.
struct EuclidBranch;  // from euclid.hpp
Trajectory sample_branch_trajectory(const EuclidBranch& branch,
                                    std::array<double, 2> span, int samples);

struct PiecewisePoly;  // from euclid.hpp
Trajectory sample_poly_trajectory(const PiecewisePoly& poly, int samples);

}  // namespace linf

#endif  // LINFCURVES_ODE_HPP_
