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

#include "linfcurves/lie_so3.hpp"

#include <algorithm>
#include <cmath>

namespace linf {

std::pair<double, double> conserved(const So3ReducedState& s) {
  const Vec3 Wdot = s.W.cross(s.V) + s.C;
  const double c = Wdot.squaredNorm();
  const double a = s.z * s.W.norm() - s.C.dot(s.V);
  return {c, a};
}

namespace {

double rel_spread(const std::vector<double>& v) {
  if (v.empty()) return 0.0;
  const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
  std::vector<double> sorted(v);
  std::nth_element(sorted.begin(), sorted.begin() + sorted.size() / 2,
                   sorted.end());
  const double med = std::abs(sorted[sorted.size() / 2]);
  return (*hi - *lo) / std::max(med, 1e-300);
}

}  // namespace

ConservedSeries conserved_series(const Trajectory& reduced) {
  require(reduced.system == SystemKind::So3Reduced,
          "conserved_series: not a reduced trajectory");
  ConservedSeries out;
  const std::size_t n = reduced.states.size();
  out.c.reserve(n);
  out.a.reserve(n);
  out.phi.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const So3ReducedState s =
        unpack_so3_state(reduced.states[i], reduced.z, reduced.C);
    const auto [c, a] = conserved(s);
    out.c.push_back(c);
    out.a.push_back(a);
    out.phi.push_back(reduced.phi(i));
  }
  out.c_drift_rel = rel_spread(out.c);
  out.a_drift_rel = rel_spread(out.a);
  out.phi_min = *std::min_element(out.phi.begin(), out.phi.end());
  return out;
}

GroupTrajectory reconstruct(const Trajectory& reduced, const Mat3& R0) {
  require(reduced.system == SystemKind::So3Reduced,
          "reconstruct: not a reduced trajectory");
  require(reduced.times.size() >= 2, "reconstruct: degenerate grid");
  require(is_rotation(R0), "reconstruct: R0 is not a rotation");

  const std::size_t n = reduced.times.size();
  std::vector<Vec3> V(n), Vdot(n);
  for (std::size_t i = 0; i < n; ++i) {
    const So3ReducedState s =
        unpack_so3_state(reduced.states[i], reduced.z, reduced.C);
    V[i] = s.V;
    const double Wn = s.W.norm();
    Vdot[i] = (reduced.z != 0.0 && Wn > 0) ? Vec3(reduced.z * s.W / Wn)
                                           : Vec3::Zero();
  }

  // cubic Hermite interpolation of V inside [t_i, t_{i+1}]
  auto v_at = [&](std::size_t i, double theta, double h) -> Vec3 {
    const double t2 = theta * theta, t3 = t2 * theta;
    return (2 * t3 - 3 * t2 + 1) * V[i] + (t3 - 2 * t2 + theta) * h * Vdot[i] +
           (-2 * t3 + 3 * t2) * V[i + 1] + (t3 - t2) * h * Vdot[i + 1];
  };

  GroupTrajectory g;
  g.times = reduced.times;
  g.rotations.resize(n);
  g.rotations[0] = R0;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double h = reduced.times[i + 1] - reduced.times[i];
    const Mat3& R = g.rotations[i];
    const Vec3 vm = v_at(i, 0.5, h);
    const Mat3 K1 = R * hat(V[i]);
    const Mat3 K2 = (R + 0.5 * h * K1) * hat(vm);
    const Mat3 K3 = (R + 0.5 * h * K2) * hat(vm);
    const Mat3 K4 = (R + h * K3) * hat(V[i + 1]);
    g.rotations[i + 1] =
        nearest_rotation(R + h / 6.0 * (K1 + 2.0 * K2 + 2.0 * K3 + K4));
  }
  return g;
}

std::vector<Vec3> reduce_group_velocity(const GroupTrajectory& g) {
  const std::size_t n = g.times.size();
  require(n >= 3, "reduce_group_velocity: grid too short");
  std::vector<Vec3> V(n);
  auto deriv = [&](std::size_t i) -> Mat3 {
    const double dt = g.times[1] - g.times[0];
    if (i == 0)
      return (-3.0 * g.rotations[0] + 4.0 * g.rotations[1] - g.rotations[2]) /
             (2.0 * dt);
    if (i == n - 1)
      return (3.0 * g.rotations[n - 1] - 4.0 * g.rotations[n - 2] +
              g.rotations[n - 3]) /
             (2.0 * dt);
    return (g.rotations[i + 1] - g.rotations[i - 1]) / (2.0 * dt);
  };
  for (std::size_t i = 0; i < n; ++i) {
    const Mat3 Omega = g.rotations[i].transpose() * deriv(i);
    // antisymmetrize away the finite-difference noise
    V[i] = vee(0.5 * (Omega - Omega.transpose()));
  }
  return V;
}

double reduced_cubic_residual_max(const std::vector<double>& times,
                                  const std::vector<Vec3>& V) {
  require(V.size() >= 9, "reduced_cubic_residual_max: grid too short");
  // Third derivatives amplify interpolation noise like 1/h^3; subsample to a
  // coarser effective step before differencing. The target balances that
  // noise against the 4th-order stencil truncation error.
  const double span = times.back() - times.front();
  const double target = span / 2000.0;
  std::size_t stride = 1;
  while ((V.size() - 1) / (stride + 1) + 1 >= 9 &&
         stride * (times[1] - times[0]) < target)
    ++stride;
  std::vector<Vec3> Vs;
  for (std::size_t i = 0; i < V.size(); i += stride) Vs.push_back(V[i]);
  const std::vector<Vec3>& Vu = stride == 1 ? V : Vs;
  const std::size_t n = Vu.size();
  const double h = stride * (times[1] - times[0]);

  // 4th-order central stencils for V'' and then V''' = d/dt V''.
  std::vector<Vec3> d2(n, Vec3::Zero());
  for (std::size_t i = 2; i + 2 < n; ++i)
    d2[i] = (-Vu[i - 2] + 16.0 * Vu[i - 1] - 30.0 * Vu[i] + 16.0 * Vu[i + 1] -
             Vu[i + 2]) /
            (12.0 * h * h);
  double worst = 0.0;
  for (std::size_t i = 4; i + 4 < n; ++i) {
    const Vec3 d3 =
        (d2[i - 2] - 8.0 * d2[i - 1] + 8.0 * d2[i + 1] - d2[i + 2]) /
        (12.0 * h);
    const Vec3 r = d3 + Vu[i].cross(d2[i]);
    worst = std::max(worst, r.norm());
  }
  return worst;
}

NullReport classify_null(const Trajectory& reduced, double tol) {
  require(reduced.system == SystemKind::So3Reduced,
          "classify_null: not a reduced trajectory");
  NullReport rep;
  if (reduced.C.norm() > tol) {
    rep.verdict = NullVerdict::NonNull;
    return rep;
  }
  rep.verdict = NullVerdict::Null;

  const ConservedSeries cs = conserved_series(reduced);
  const auto [lo, hi] = std::minmax_element(cs.phi.begin(), cs.phi.end());
  const double phi0 = cs.phi.front();
  rep.phi_drift_rel = phi0 > 0 ? (*hi - *lo) / phi0 : (*hi - *lo);

  // Null solutions must coincide with a Riemannian cubic: integrate the
  // reduced cubic equation V''' = -V x V'' from the same initial data
  // (V' = z W/|W|, V'' = z (W x V)/|W| when C = 0) and compare V pointwise.
  if (reduced.states.size() >= 2 && reduced.z > 0) {
    const Vec3 V0 = reduced.states[0].segment<3>(0);
    const Vec3 W0 = reduced.states[0].segment<3>(3);
    const double Wn = W0.norm();
    if (Wn > 0) {
      using State9 = Eigen::Matrix<double, 9, 1>;
      const auto rhs9 = [](const State9& u) {
        State9 f;
        const Vec3 V = u.segment<3>(0), d2 = u.segment<3>(6);
        f.segment<3>(0) = u.segment<3>(3);
        f.segment<3>(3) = d2;
        f.segment<3>(6) = -V.cross(d2);
        return f;
      };
      State9 u;
      u.segment<3>(0) = V0;
      u.segment<3>(3) = reduced.z * W0 / Wn;
      u.segment<3>(6) = reduced.z * W0.cross(V0) / Wn;
      const double h = reduced.dt();
      constexpr int sub = 4;  // RK4 substeps keep truncation negligible
      const double hs = h / sub;
      double worst = 0.0;
      for (std::size_t i = 1; i < reduced.states.size(); ++i) {
        for (int s = 0; s < sub; ++s) {
          const State9 k1 = rhs9(u);
          const State9 k2 = rhs9(State9(u + 0.5 * hs * k1));
          const State9 k3 = rhs9(State9(u + 0.5 * hs * k2));
          const State9 k4 = rhs9(State9(u + hs * k3));
          u += hs / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        }
        const Vec3 Vi = reduced.states[i].segment<3>(0);
        worst = std::max(worst, (u.segment<3>(0) - Vi).norm());
      }
      rep.cubic_residual_max = worst;
    }
  }
  return rep;
}

}  // namespace linf
