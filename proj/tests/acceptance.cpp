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

// End-to-end acceptance checks. Each criterion prints exactly one
// PASS/FAIL line; the process exits nonzero if any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <string>

#include "linfcurves/config.hpp"
#include "linfcurves/diagnostics.hpp"
#include "linfcurves/euclid.hpp"
#include "linfcurves/lie_so3.hpp"
#include "linfcurves/shooting.hpp"

using namespace linf;

namespace {

int failures = 0;

void report(int criterion, const char* name, bool ok,
            const std::string& detail) {
  std::printf("criterion %d [%s]: %s — %s\n", criterion,
              ok ? "PASS" : "FAIL", name, detail.c_str());
  if (!ok) ++failures;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

Vec sphere_example_y0() {
  Vec y(12);
  y << 1, 0, 0, 0, 1, 0, 0, 1, 200, -1, 2, 1;
  return y;
}

Trajectory sphere_example_run(int samples = 8001, double rtol = 1e-10,
                              double atol = 1e-12) {
  IntegrateOptions opts;
  opts.samples = samples;
  opts.rtol = rtol;
  opts.atol = atol;
  return integrate(SystemKind::SphereExtremal, ManifoldId::sphere(2),
                   sphere_example_y0(), 1.2, Vec3::Zero(), {0, 8}, opts);
}

Trajectory so3_run(const Vec3& C, double t1, int samples, double rtol = 1e-10,
                   double atol = 1e-12) {
  Vec y0(6);
  y0 << 1, 2, 3, -1, -4, 6;
  IntegrateOptions opts;
  opts.samples = samples;
  opts.rtol = rtol;
  opts.atol = atol;
  return integrate(SystemKind::So3Reduced, ManifoldId::so3(), y0, 1.2, C,
                   {0, t1}, opts);
}

// ---------------------------------------------------------------------------

void criterion1() {
  const auto t0 = std::chrono::steady_clock::now();
  const Trajectory traj = sphere_example_run();
  const double elapsed = seconds_since(t0);
  const Vec x8 = traj.position(traj.states.size() - 1);
  const double e0 = std::abs(x8[0] - (-0.433207));
  const double e1 = std::abs(x8[1] - 0.898726);
  const double e2 = std::abs(x8[2] - 0.0679917);
  const bool ok = traj.outcome == IntegrationOutcome::Complete && e0 <= 1e-3 &&
                  e1 <= 1e-3 && e2 <= 1e-3 && elapsed < 1.0;
  char d[160];
  std::snprintf(d, sizeof(d),
                "x(8) errors (%.2e, %.2e, %.2e) vs 1e-3, %.2fs", e0, e1, e2,
                elapsed);
  report(1, "sphere endpoint reproduction", ok, d);
}

void criterion2() {
  const auto t0 = std::chrono::steady_clock::now();
  const Trajectory traj = so3_run(Vec3(-2, -1, 0), 700.0, 70001);
  const double elapsed = seconds_since(t0);
  const Vec V = traj.velocity(traj.states.size() - 1);
  const double e0 = std::abs(V[0] - 2.36765);
  const double e1 = std::abs(V[1] - 4.69752);
  const double e2 = std::abs(V[2] - 8.40276);
  const ConservedSeries cs = conserved_series(traj);
  const bool ok = e0 <= 5e-3 && e1 <= 5e-3 && e2 <= 5e-3 &&
                  cs.c_drift_rel <= 1e-6 && cs.a_drift_rel <= 1e-6 &&
                  elapsed < 10.0;
  char d[200];
  std::snprintf(d, sizeof(d),
                "V(700) errors (%.2e, %.2e, %.2e) vs 5e-3, c drift %.2e, "
                "a drift %.2e, %.2fs",
                e0, e1, e2, cs.c_drift_rel, cs.a_drift_rel, elapsed);
  report(2, "so3 long-run reproduction with conservation", ok, d);
}

void criterion3() {
  const auto t0 = std::chrono::steady_clock::now();
  const Trajectory traj = so3_run(Vec3(2, 1, 0), 5.0, 5001);
  const double elapsed = seconds_since(t0);
  const Vec V = traj.velocity(traj.states.size() - 1);
  const double e0 = std::abs(V[0] - 1.77133);
  const double e1 = std::abs(V[1] - 4.50895);
  const double e2 = std::abs(V[2] - 7.05963);
  const bool ok =
      e0 <= 1e-4 && e1 <= 1e-4 && e2 <= 1e-4 && elapsed < 1.0;
  char d[160];
  std::snprintf(d, sizeof(d),
                "V(5) errors (%.2e, %.2e, %.2e) vs 1e-4, %.2fs", e0, e1, e2,
                elapsed);
  report(3, "so3 short-run reproduction", ok, d);
}

void criterion4() {
  EuclidBranch b;
  b.tag = BranchTag::Generic;
  b.z = 1.3;
  b.A = Vec(Vec::Zero(3));
  b.A << 1, 0.5, 0;
  b.B = Vec(Vec::Zero(3));
  b.B << -0.2, 1, 0.4;
  b.C = Vec(Vec::Zero(3));
  b.C << 0.1, 0, -0.3;
  b.D = Vec(Vec::Zero(3));

  // closed form vs ODE re-integration, pointwise
  const BranchSample s0 = eval_branch(b, 0.0);
  Vec y0(12);
  y0 << s0.position, s0.velocity, b.A, b.B;
  IntegrateOptions opts;
  opts.samples = 2001;
  const Trajectory ode =
      integrate(SystemKind::EuclidExtremal, ManifoldId::euclidean(3), y0, b.z,
                Vec3::Zero(), {0, 2}, opts);
  double ode_err = 0;
  for (std::size_t i = 0; i < ode.states.size(); ++i) {
    const BranchSample s = eval_branch(b, ode.times[i]);
    ode_err = std::max(ode_err, (ode.position(i) - s.position).norm());
    ode_err = std::max(ode_err, (ode.velocity(i) - s.velocity).norm());
  }

  // finite-difference second derivative of the closed-form position
  // against the acceleration display at 100 random times
  std::mt19937 rng(2718);
  std::uniform_real_distribution<double> uni(-3.0, 3.0);
  const double h = 1e-4;
  double fd_err = 0;
  for (int k = 0; k < 100; ++k) {
    const double t = uni(rng);
    const Vec fd = (eval_branch(b, t + h).position -
                    2.0 * eval_branch(b, t).position +
                    eval_branch(b, t - h).position) /
                   (h * h);
    fd_err = std::max(fd_err, (fd - eval_branch(b, t).acceleration).norm());
  }

  const bool ok = ode_err <= 1e-8 && fd_err <= 1e-6;
  char d[160];
  std::snprintf(d, sizeof(d),
                "ODE agreement %.2e vs 1e-8, FD acceleration %.2e vs 1e-6",
                ode_err, fd_err);
  report(4, "euclidean closed-form / ODE equivalence", ok, d);
}

void criterion5() {
  bool ok = true;
  std::string detail;

  // forward extremal runs on all three systems pass the theorem verdicts
  const Trajectory runs[] = {
      sphere_example_run(),
      so3_run(Vec3(2, 1, 0), 5.0, 5001),
  };
  double worst_z = 0, worst_l = 0;
  for (const Trajectory& traj : runs) {
    const DiagnosticsReport rep = analyze(traj);
    worst_z = std::max(worst_z, rep.z_drift);
    worst_l = std::max(worst_l, rep.l_residual_max);
    ok = ok && rep.verdicts.at("z_constant") && rep.verdicts.at("l_residual");
  }

  // a natural cubic through 3 noncollinear points must fail z-constancy
  std::vector<Vec> pts(3, Vec(Vec::Zero(2)));
  pts[1] << 1, 1;
  pts[2] << 2, 0;
  const Trajectory cubic =
      sample_poly_trajectory(natural_cubic_spline({0, 1, 2}, pts), 2001);
  const DiagnosticsReport crep = analyze(cubic);
  const bool cubic_fails = !crep.verdicts.at("z_constant");
  ok = ok && cubic_fails;

  char d[200];
  std::snprintf(d, sizeof(d),
                "extremal z drift %.2e, L residual %.2e (grid 1e-3); cubic "
                "z-verdict fails: %s",
                worst_z, worst_l, cubic_fails ? "yes" : "no");
  report(5, "extremality necessary-condition suite", ok, d);
}

void criterion6() {
  const Trajectory null_run = so3_run(Vec3::Zero(), 10.0, 10001);
  const NullReport nr = classify_null(null_run);
  const bool ok = nr.verdict == NullVerdict::Null &&
                  nr.phi_drift_rel <= 1e-8 &&
                  nr.cubic_residual_max <= 1e-4;
  char d[160];
  std::snprintf(d, sizeof(d),
                "phi drift %.2e vs 1e-8, cubic residual %.2e vs 1e-4",
                nr.phi_drift_rel, nr.cubic_residual_max);
  report(6, "null-curve corollary (C = 0)", ok, d);
}

void criterion7() {
  const auto t0 = std::chrono::steady_clock::now();

  // manufacture boundary data from a forward sphere run
  Vec y0(12);
  y0 << 1, 0, 0, 0, 1, 0, 0, 1, 20, -1, 2, 1;
  IntegrateOptions gopts;
  gopts.samples = 2001;
  const Trajectory gen =
      integrate(SystemKind::SphereExtremal, ManifoldId::sphere(2), y0, 1.2,
                Vec3::Zero(), {0, 2}, gopts);

  ShootingProblem p;
  p.manifold = ManifoldId::sphere(2);
  p.variant = BvpVariant::FullVelocities;
  p.restarts = 32;
  const std::size_t last = gen.states.size() - 1;
  p.boundary.x0 = gen.position(0);
  p.boundary.v0 = gen.velocity(0);
  p.boundary.x1 = gen.position(last);
  p.boundary.v1 = gen.velocity(last);
  p.boundary.t0 = 0;
  p.boundary.t1 = 2;
  p.ode.samples = 2001;
  const ShootingResult res = solve(p);

  double agree = 0;
  if (res.converged) {
    for (int k = 0; k <= 100; ++k) {
      const std::size_t i = k * last / 100;
      agree = std::max(agree,
                       (res.solution.position(i) - gen.position(i)).norm());
    }
  }

  ShootingProblem pf = p;
  pf.variant = BvpVariant::FreeEndVelocity;
  pf.boundary.v1.reset();
  const ShootingResult fres = solve(pf);
  const double Xend =
      fres.converged
          ? fres.solution.field_X(fres.solution.states.size() - 1).norm()
          : 1.0;

  const double elapsed = seconds_since(t0);
  const bool ok = res.converged && res.residual <= 1e-6 && agree <= 1e-5 &&
                  fres.converged && Xend <= 1e-8 && elapsed < 60.0;
  char d[200];
  std::snprintf(d, sizeof(d),
                "residual %.2e vs 1e-6, agreement %.2e vs 1e-5, free-end "
                "|X(t1)| %.2e vs 1e-8, %.1fs",
                res.residual, agree, Xend, elapsed);
  report(7, "boundary-value round-trip by shooting", ok, d);
}

void criterion8() {
  // sphere constraint drifts over [0,8]
  const Trajectory sph = sphere_example_run();
  const DiagnosticsReport srep = analyze(sph);
  const double dnorm = srep.constraint_drifts.at("sphere_norm");
  const double dtan = srep.constraint_drifts.at("velocity_tangency");

  // conserved a = z|W| - <C,V> (equivalently z^2 phi - <C,V>) over [0,700]
  const Trajectory so3 = so3_run(Vec3(-2, -1, 0), 700.0, 70001);
  const ConservedSeries cs = conserved_series(so3);

  // self-convergence: halving tolerances moves endpoints by less than half
  // the acceptance tolerances used above
  const Trajectory sph2 = sphere_example_run(8001, 5e-11, 5e-13);
  const double sph_move =
      (sph.position(sph.states.size() - 1) -
       sph2.position(sph2.states.size() - 1))
          .norm();
  const Trajectory so32 = so3_run(Vec3(-2, -1, 0), 700.0, 70001, 5e-11, 5e-13);
  const double so3_move =
      (so3.velocity(so3.states.size() - 1) -
       so32.velocity(so32.states.size() - 1))
          .norm();

  const bool ok = dnorm <= 1e-9 && dtan <= 1e-9 &&
                  cs.a_drift_rel <= 1e-6 && sph_move < 0.5e-3 &&
                  so3_move < 2.5e-3;
  char d[220];
  std::snprintf(d, sizeof(d),
                "sphere drifts (%.2e, %.2e) vs 1e-9, z·phi−<C,V> drift %.2e "
                "vs 1e-6, endpoint moves (%.2e, %.2e) under halved tols",
                dnorm, dtan, cs.a_drift_rel, sph_move, so3_move);
  report(8, "conservation and self-convergence suite", ok, d);
}

}  // namespace

int main() {
  criterion1();
  criterion2();
  criterion3();
  criterion4();
  criterion5();
  criterion6();
  criterion7();
  criterion8();
  if (failures == 0) {
    std::printf("acceptance: all 8 criteria passed\n");
    return 0;
  }
  std::printf("acceptance: %d criteria FAILED\n", failures);
  return 1;
}
