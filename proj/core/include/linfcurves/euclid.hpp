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

#ifndef LINFCURVES_EUCLID_HPP_
#define LINFCURVES_EUCLID_HPP_

#include <optional>
#include <vector>

#include "linfcurves/types.hpp"

namespace linf {

// Closed-form minimum-max-acceleration curves in E^m. Three branches:
//   Geodesic         x(t) = Ct + D, acceleration zero.
//   QuadraticSpline  acceleration z sign(t - t2) B/|B|; C^1 at t2.
//   Generic          acceleration z (A + Bt)/sqrt(a^2 + b^2 t^2) after the
//                    internal time shift that makes <A,B> = 0.
// In every branch with z > 0 the acceleration has constant norm z, and
// phi(t) = |A + Bt|/z satisfies d^2/dt^2 (phi * acceleration) = 0.

enum class BranchTag { Geodesic, QuadraticSpline, Generic };

struct EuclidBranch {
  BranchTag tag = BranchTag::Geodesic;
  Vec A, B, C, D;
  double z = 0.0;
  double t2 = 0.0;  // QuadraticSpline kink time
};

struct BranchSample {
  Vec position, velocity, acceleration;
};

/// Position, velocity and acceleration of a branch at time t.
/// QuadraticSpline acceleration at exactly t = t2 is the right limit.
BranchSample eval_branch(const EuclidBranch& branch, double t);

/// phi(t) = |A + Bt| / z, the multiplier gauge carried by the branch.
double branch_phi(const EuclidBranch& branch, double t);

struct BoundaryData {
  Vec x0, x1, v0;
  std::optional<Vec> v1;
  double t0 = 0.0, t1 = 1.0;
};

struct EuclidBvpOptions {
  int restarts = 16;
  int max_iterations = 200;
  double boundary_tol = 1e-9;
};

struct EuclidBvpResult {
  EuclidBranch branch;       // smallest-z converged branch
  double residual = 0.0;     // boundary residual of `branch`
  bool converged = false;
  std::vector<EuclidBranch> candidates;  // all converged branches
};

/// Fit a branch to two-point position+velocity boundary data. Tries the
/// Geodesic consistency check first, then damped least-squares fits of the
/// Generic and QuadraticSpline parameterizations; ties go to smaller z.
EuclidBvpResult solve_euclid_bvp(const BoundaryData& data,
                                 const EuclidBvpOptions& opts = {});

/// Piecewise polynomial curve in E^m, coefficients local to each piece.
struct PiecewisePoly {
  std::vector<double> breaks;              // size n+1, strictly increasing
  std::vector<Eigen::MatrixXd> coefs;      // n pieces, dim x (degree+1)

  Vec eval(double t, int derivative = 0) const;
  int dimension() const;
  double t_begin() const { return breaks.front(); }
  double t_end() const { return breaks.back(); }
};

/// Natural cubic spline through the given knots (zero second derivative at
/// both ends). Standard tridiagonal construction.
PiecewisePoly natural_cubic_spline(const std::vector<double>& times,
                                   const std::vector<Vec>& points);

/// Hermite cubic matching the boundary positions and velocities.
PiecewisePoly hermite_cubic(const BoundaryData& data);

/// Max acceleration norm. Exact per-piece maximization for degree <= 3
/// (|x''|^2 convex in t there), dense sampling for higher degrees.
double j_infinity(const PiecewisePoly& curve, int samples_per_piece = 256);

/// Mean squared acceleration norm, exact for degree <= 3.
double j2(const PiecewisePoly& curve);

/// J_infinity of a closed-form branch: z (0 for geodesics).
double j_infinity(const EuclidBranch& branch);

}  // namespace linf

#endif  // LINFCURVES_EUCLID_HPP_
