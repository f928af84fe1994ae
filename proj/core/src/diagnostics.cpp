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

#include "linfcurves/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "linfcurves/lie_so3.hpp"
#include "linfcurves/manifold.hpp"

namespace linf {

bool DiagnosticsReport::all_pass() const {
  for (const auto& [k, v] : verdicts)
    if (!v) return false;
  return true;
}

std::string DiagnosticsReport::to_json(int indent) const {
  // hand-rolled for stable key ordering and 17-digit round-trips
  std::ostringstream os;
  os.precision(17);
  const std::string pad(indent, ' ');
  os << "{\n";
  os << pad << "\"schema_version\": 1,\n";
  os << pad << "\"z_drift\": " << z_drift << ",\n";
  os << pad << "\"constraint_drifts\": {";
  bool first = true;
  for (const auto& [k, v] : constraint_drifts) {
    os << (first ? "" : ",") << "\n" << pad << pad << "\"" << k << "\": " << v;
    first = false;
  }
  os << (constraint_drifts.empty() ? "" : "\n" + pad) << "},\n";
  os << pad << "\"l_residual_max\": " << l_residual_max << ",\n";
  os << pad << "\"j_inf\": " << j_inf << ",\n";
  os << pad << "\"phi_min\": " << phi_min << ",\n";
  os << pad << "\"phi_zero_times\": [";
  for (std::size_t i = 0; i < phi_zero_times.size(); ++i)
    os << (i ? ", " : "") << phi_zero_times[i];
  os << "],\n";
  os << pad << "\"verdicts\": {";
  first = true;
  for (const auto& [k, v] : verdicts) {
    os << (first ? "" : ",") << "\n"
       << pad << pad << "\"" << k << "\": " << (v ? "true" : "false");
    first = false;
  }
  os << (verdicts.empty() ? "" : "\n" + pad) << "}\n";
  os << "}";
  return os.str();
}

namespace {

// 4th-order first derivative of a sampled sequence, one-sided at the ends.
Vec fd4(const std::vector<Vec>& f, double h, std::size_t i) {
  const std::size_t n = f.size();
  if (i >= 2 && i + 2 < n)
    return (f[i - 2] - 8.0 * f[i - 1] + 8.0 * f[i + 1] - f[i + 2]) / (12.0 * h);
  if (i == 0)
    return (-25.0 * f[0] + 48.0 * f[1] - 36.0 * f[2] + 16.0 * f[3] -
            3.0 * f[4]) /
           (12.0 * h);
  if (i == 1)
    return (-3.0 * f[0] - 10.0 * f[1] + 18.0 * f[2] - 6.0 * f[3] + f[4]) /
           (12.0 * h);
  if (i == n - 2)
    return (-f[n - 5] + 6.0 * f[n - 4] - 18.0 * f[n - 3] + 10.0 * f[n - 2] +
            3.0 * f[n - 1]) /
           (12.0 * h);
  return (25.0 * f[n - 1] - 48.0 * f[n - 2] + 36.0 * f[n - 3] -
          16.0 * f[n - 4] + 3.0 * f[n - 5]) /
         (12.0 * h);
}

double spread(const std::vector<double>& v) {
  const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
  return *hi - *lo;
}

}  // namespace

std::vector<Vec> covariant_acceleration(const Trajectory& traj) {
  const std::size_t n = traj.states.size();
  require(n >= 5, "covariant_acceleration: insufficient samples");
  const double h = traj.dt();

  // When the state carries the forcing field the covariant acceleration is
  // available exactly: z X/|X| (or W1 for cubics). Differentiating the
  // sampled velocity instead would just amplify dense-output interpolation
  // error by 1/h^2.
  const bool carried =
      (traj.z > 0 && (traj.system == SystemKind::SphereExtremal ||
                      traj.system == SystemKind::EuclidExtremal ||
                      traj.system == SystemKind::So3Reduced ||
                      (traj.system == SystemKind::EuclidSampled &&
                       traj.states[0].size() >=
                           3 * traj.manifold.ambient_dim()))) ||
      traj.system == SystemKind::RiemannianCubic;

  std::vector<Vec> acc(n);
  if (carried) {
    std::vector<std::size_t> zeros;
    for (std::size_t i = 0; i < n; ++i) {
      const Vec X = traj.field_X(i);
      if (traj.system == SystemKind::RiemannianCubic) {
        acc[i] = X;  // W1 is the covariant acceleration itself
      } else {
        const double nm = X.norm();
        if (nm > 0) {
          acc[i] = traj.z / nm * X;
        } else {
          acc[i] = Vec::Zero(X.size());
          zeros.push_back(i);
        }
      }
    }
    // A sample can land exactly on a field zero (a phi kink). |acc| is still
    // z in the limit there; borrow the nearest nonzero direction.
    for (std::size_t i : zeros) {
      for (std::size_t off = 1; off < n; ++off) {
        const std::size_t lo = i >= off ? i - off : n, hi = i + off;
        if (lo < n && acc[lo].norm() > 0) {
          acc[i] = acc[lo];
          break;
        }
        if (hi < n && acc[hi].norm() > 0) {
          acc[i] = acc[hi];
          break;
        }
      }
    }
    return acc;
  }

  std::vector<Vec> vel(n);
  for (std::size_t i = 0; i < n; ++i) vel[i] = traj.velocity(i);
  for (std::size_t i = 0; i < n; ++i) {
    Vec a = fd4(vel, h, i);
    if (traj.manifold.kind == ManifoldKind::Sphere &&
        traj.system != SystemKind::So3Reduced) {
      const Vec x = traj.position(i);
      a += vel[i].squaredNorm() * x;  // nabla_t v = v' + <v,v> x
    }
    // So3Reduced: nabla_t of the velocity reduction is plain V' (the
    // (1/2)[V,V] correction vanishes).
    acc[i] = a;
  }
  return acc;
}

double j_infinity(const Trajectory& traj) {
  const auto acc = covariant_acceleration(traj);
  double best = 0.0;
  for (const auto& a : acc) best = std::max(best, a.norm());
  return best;
}

namespace {

// Locate kink minima of a nonnegative sampled function: extrapolate the
// secant lines from both sides of a local minimum and accept when they
// intersect at (numerically) zero.
std::vector<double> kink_zeros(const std::vector<double>& t,
                               const std::vector<double>& phi, double tol_abs) {
  std::vector<double> zeros;
  const std::size_t n = phi.size();
  for (std::size_t i = 2; i + 2 < n; ++i) {
    if (!(phi[i] <= phi[i - 1] && phi[i] <= phi[i + 1])) continue;
    const double h = t[1] - t[0];
    const double sl = (phi[i - 1] - phi[i - 2]) / h;
    const double sr = (phi[i + 2] - phi[i + 1]) / h;
    if (sl >= 0 || sr <= 0) continue;
    // lines through (t[i-1], phi[i-1]) and (t[i+1], phi[i+1])
    const double ts = (phi[i + 1] - phi[i - 1] + sl * t[i - 1] - sr * t[i + 1]) /
                      (sl - sr);
    const double vs = phi[i - 1] + sl * (ts - t[i - 1]);
    if (std::abs(vs) <= tol_abs && ts >= t.front() && ts <= t.back())
      zeros.push_back(ts);
  }
  return zeros;
}

}  // namespace

DiagnosticsReport analyze(const Trajectory& traj,
                          const DiagnosticsThresholds& th) {
  require(traj.states.size() >= 5, "analyze: insufficient samples");
  DiagnosticsReport rep;
  rep.thresholds = th;
  const std::size_t n = traj.states.size();
  const double h = traj.dt();

  // covariant acceleration, z drift, J_inf
  const auto acc = covariant_acceleration(traj);
  std::vector<double> accn(n);
  for (std::size_t i = 0; i < n; ++i) accn[i] = acc[i].norm();
  rep.j_inf = *std::max_element(accn.begin(), accn.end());
  if (traj.z > 0) {
    double worst = 0.0;
    for (double a : accn) worst = std::max(worst, std::abs(a - traj.z));
    rep.z_drift = worst;
  } else {
    rep.z_drift = spread(accn);
  }
  rep.verdicts["z_constant"] = rep.z_drift <= th.z_drift;

  // phi series
  std::vector<double> phi(n);
  bool has_phi = false;
  if (traj.z > 0 &&
      (traj.system == SystemKind::SphereExtremal ||
       traj.system == SystemKind::So3Reduced ||
       traj.system == SystemKind::EuclidExtremal ||
       (traj.system == SystemKind::EuclidSampled &&
        traj.states[0].size() >= 3 * traj.manifold.ambient_dim()))) {
    for (std::size_t i = 0; i < n; ++i) phi[i] = traj.phi(i);
    has_phi = true;
  }
  if (has_phi) {
    rep.phi_min = *std::min_element(phi.begin(), phi.end());
    const double phimax = *std::max_element(phi.begin(), phi.end());
    rep.phi_zero_times = kink_zeros(traj.times, phi, th.phi_zero * phimax);
    if (traj.event_time) rep.phi_zero_times.push_back(*traj.event_time);
  }

  // L residual on the carried field X (or W)
  if (has_phi) {
    std::vector<Vec> pos(n), vel(n), X(n);
    double Xmax = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      vel[i] = traj.velocity(i);
      X[i] = traj.field_X(i);
      Xmax = std::max(Xmax, X[i].norm());
      pos[i] = traj.system == SystemKind::So3Reduced ? Vec(Vec3::Zero())
                                                     : traj.position(i);
    }
    // phi (and so X) carries a free positive scale; normalize so the
    // residual is gauge-invariant.
    if (Xmax > 0)
      for (std::size_t i = 0; i < n; ++i) X[i] /= Xmax;
    const ManifoldId lman = traj.system == SystemKind::So3Reduced
                                ? ManifoldId::so3()
                                : traj.manifold;
    const auto res = l_residual(lman, pos, vel, h, X);
    rep.l_residual_max = *std::max_element(res.begin(), res.end());
    // stencil error grows ~h^2; verdict is pinned to the 1e-3 reference grid
    const double scale = std::max(1.0, (h / 1e-3) * (h / 1e-3));
    rep.verdicts["l_residual"] = rep.l_residual_max <= th.l_residual * scale;
  }

  // system-specific constraint drifts
  switch (traj.system) {
    case SystemKind::SphereExtremal: {
      double dnorm = 0, dtan = 0, dXtan = 0, dXrate = 0;
      for (std::size_t i = 0; i < n; ++i) {
        const Vec x = traj.position(i), v = traj.velocity(i);
        const Vec X = traj.field_X(i), Xd = traj.field_Xdot(i);
        dnorm = std::max(dnorm, std::abs(x.norm() - 1.0));
        dtan = std::max(dtan, std::abs(x.dot(v)));
        dXtan = std::max(dXtan, std::abs(x.dot(X)));
        dXrate = std::max(dXrate, std::abs(v.dot(X) + x.dot(Xd)));
      }
      rep.constraint_drifts["sphere_norm"] = dnorm;
      rep.constraint_drifts["velocity_tangency"] = dtan;
      rep.constraint_drifts["field_tangency"] = dXtan;
      rep.constraint_drifts["field_tangency_rate"] = dXrate;
      rep.verdicts["sphere_constraints"] =
          dnorm <= th.sphere_constraint && dtan <= th.sphere_constraint;
      rep.verdicts["field_tangency"] = dXtan <= th.tangency;
      break;
    }
    case SystemKind::So3Reduced: {
      const ConservedSeries cs = conserved_series(traj);
      rep.constraint_drifts["c_rel"] = cs.c_drift_rel;
      rep.constraint_drifts["a_rel"] = cs.a_drift_rel;
      // a is z|W| - <C,V> = z^2 phi - <C,V>; same series, same verdict
      rep.constraint_drifts["zphi_minus_CV_rel"] = cs.a_drift_rel;
      rep.verdicts["conserved_c"] = cs.c_drift_rel <= th.conserved_rel;
      rep.verdicts["conserved_a"] = cs.a_drift_rel <= th.conserved_rel;
      break;
    }
    case SystemKind::RiemannianCubic: {
      if (traj.manifold.kind == ManifoldKind::Sphere) {
        double dnorm = 0;
        for (std::size_t i = 0; i < n; ++i)
          dnorm = std::max(dnorm, std::abs(traj.position(i).norm() - 1.0));
        rep.constraint_drifts["sphere_norm"] = dnorm;
        rep.verdicts["sphere_constraints"] = dnorm <= th.sphere_constraint;
      }
      // cubics are J_2 critical, not J_inf extremal: no z verdict
      rep.verdicts.erase("z_constant");
      break;
    }
    case SystemKind::EuclidExtremal:
    case SystemKind::EuclidSampled:
      break;
  }

  return rep;
}

namespace {

Vec hermite_state(const Trajectory& tr, std::size_t i, double t) {
  const double h = tr.times[i + 1] - tr.times[i];
  const double s = (t - tr.times[i]) / h;
  const Vec& y0 = tr.states[i];
  const Vec& y1 = tr.states[i + 1];
  if (tr.system == SystemKind::EuclidSampled &&
      y0.size() < 4 * tr.manifold.ambient_dim()) {
    return (1.0 - s) * y0 + s * y1;  // no RHS available
  }
  const Vec f0 = system_rhs(tr.system, tr.manifold, tr.z, tr.C, y0);
  const Vec f1 = system_rhs(tr.system, tr.manifold, tr.z, tr.C, y1);
  const double s2 = s * s, s3 = s2 * s;
  return (2 * s3 - 3 * s2 + 1) * y0 + (s3 - 2 * s2 + s) * h * f0 +
         (-2 * s3 + 3 * s2) * y1 + (s3 - s2) * h * f1;
}

Vec eval_at(const Trajectory& tr, double t) {
  const auto it =
      std::upper_bound(tr.times.begin(), tr.times.end(), t);
  std::size_t i = it == tr.times.begin()
                      ? 0
                      : static_cast<std::size_t>(it - tr.times.begin()) - 1;
  i = std::min(i, tr.times.size() - 2);
  return hermite_state(tr, i, t);
}

}  // namespace

double compare(const Trajectory& a, const Trajectory& b,
               CompareMetric metric) {
  const double lo = std::max(a.times.front(), b.times.front());
  const double hi = std::min(a.times.back(), b.times.back());
  require(hi > lo, "compare: disjoint spans");
  // Measure the curve itself (position and velocity); the forcing-field
  // blocks carry a large scale of their own and would swamp the metric.
  const int d = a.manifold.ambient_dim();
  const bool curve_only = a.system != SystemKind::So3Reduced;
  auto diff = [&](const Vec& u, const Vec& v) {
    if (curve_only && u.size() >= 2 * d && v.size() >= 2 * d)
      return (u.head(2 * d) - v.head(2 * d)).norm();
    return (u - v).norm();
  };
  if (metric == CompareMetric::Endpoint) {
    return diff(eval_at(a, hi), eval_at(b, hi));
  }
  double worst = 0.0;
  for (std::size_t i = 0; i < a.times.size(); ++i) {
    const double t = a.times[i];
    if (t < lo || t > hi) continue;
    worst = std::max(worst, diff(a.states[i], eval_at(b, t)));
  }
  return worst;
}

}  // namespace linf
