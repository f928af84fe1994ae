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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "linfcurves/diagnostics.hpp"
#include "linfcurves/euclid.hpp"

using namespace linf;

namespace {

Trajectory sphere_example_run(int samples = 8001, double rtol = 1e-10) {
  Vec y0(12);
  y0 << 1, 0, 0, 0, 1, 0, 0, 1, 200, -1, 2, 1;
  IntegrateOptions opts;
  opts.samples = samples;
  opts.rtol = rtol;
  return integrate(SystemKind::SphereExtremal, ManifoldId::sphere(2), y0, 1.2,
                   Vec3::Zero(), {0, 8}, opts);
}

Vec v2(double a, double b) {
  Vec v(2);
  v << a, b;
  return v;
}

}  // namespace

TEST_CASE("forward sphere run passes every verdict") {
  const Trajectory traj = sphere_example_run();
  const DiagnosticsReport rep = analyze(traj);
  CHECK(rep.z_drift <= 1e-8);
  CHECK(rep.l_residual_max <= 1e-3);  // grid step 1e-3
  CHECK(rep.constraint_drifts.at("sphere_norm") <= 1e-9);
  CHECK(rep.constraint_drifts.at("velocity_tangency") <= 1e-9);
  CHECK(rep.constraint_drifts.at("field_tangency") <= 1e-8);
  CHECK(rep.j_inf == doctest::Approx(1.2).epsilon(1e-6));
  CHECK(rep.phi_min > 0);
  CHECK(rep.phi_zero_times.empty());
  CHECK(rep.all_pass());
}

TEST_CASE("so3 run reports conserved-quantity drifts") {
  Vec y0(6);
  y0 << 1, 2, 3, -1, -4, 6;
  IntegrateOptions opts;
  opts.samples = 5001;
  const Trajectory traj = integrate(SystemKind::So3Reduced, ManifoldId::so3(),
                                    y0, 1.2, Vec3(2, 1, 0), {0, 5}, opts);
  const DiagnosticsReport rep = analyze(traj);
  CHECK(rep.constraint_drifts.at("c_rel") <= 1e-6);
  CHECK(rep.constraint_drifts.at("a_rel") <= 1e-6);
  CHECK(rep.constraint_drifts.at("zphi_minus_CV_rel") <= 1e-6);
  CHECK(rep.verdicts.at("conserved_c"));
  CHECK(rep.verdicts.at("conserved_a"));
  CHECK(rep.j_inf == doctest::Approx(1.2).epsilon(1e-6));
}

TEST_CASE("straight line: J_inf and residuals vanish") {
  const PiecewisePoly line =
      natural_cubic_spline({0, 2}, {v2(0, 0), v2(2, 1)});
  const Trajectory traj = sample_poly_trajectory(line, 501);
  const DiagnosticsReport rep = analyze(traj);
  CHECK(rep.j_inf <= 1e-10);
  CHECK(rep.z_drift <= 1e-10);
  CHECK(rep.l_residual_max == 0.0);
}

TEST_CASE("natural cubic on noncollinear points fails z-constancy") {
  const PiecewisePoly spline =
      natural_cubic_spline({0, 1, 2}, {v2(0, 0), v2(1, 1), v2(2, 0)});
  const Trajectory traj = sample_poly_trajectory(spline, 2001);
  const DiagnosticsReport rep = analyze(traj);
  CHECK_FALSE(rep.verdicts.at("z_constant"));
  CHECK_FALSE(rep.all_pass());
}

TEST_CASE("quadratic spline branch: phi zero set is exactly the kink") {
  EuclidBranch b;
  b.tag = BranchTag::QuadraticSpline;
  b.z = 1.2;
  b.B = v2(0, 2);
  b.t2 = 0.73;
  b.A = -b.t2 * b.B;
  b.C = v2(1, 0);
  b.D = v2(0, 0);
  const Trajectory traj = sample_branch_trajectory(b, {0, 2}, 4001);
  const DiagnosticsReport rep = analyze(traj);
  REQUIRE(rep.phi_zero_times.size() == 1);
  CHECK(rep.phi_zero_times[0] == doctest::Approx(0.73).epsilon(1e-6));
  CHECK(rep.verdicts.at("z_constant"));  // |acc| = z on both sides
  CHECK(rep.j_inf == doctest::Approx(1.2).epsilon(1e-9));
}

TEST_CASE("cubic baseline never has smaller J_inf than the extremal") {
  BoundaryData d;
  d.x0 = v2(0, 0);
  d.x1 = v2(0, 0);
  d.v0 = v2(1, 0);
  d.v1 = v2(-1, 0);
  d.t0 = 0;
  d.t1 = 2;
  const EuclidBvpResult r = solve_euclid_bvp(d);
  REQUIRE(r.converged);
  CHECK(j_infinity(hermite_cubic(d)) >= j_infinity(r.branch) - 1e-9);
}

TEST_CASE("compare: identity, self-convergence, closed-form oracle") {
  const Trajectory a = sphere_example_run(2001);
  CHECK(compare(a, a, CompareMetric::Endpoint) == 0.0);
  CHECK(compare(a, a, CompareMetric::PointwiseMax) == 0.0);

  // rtol 1e-8 vs 1e-10 endpoint discrepancy stays below 1e-6
  const Trajectory loose = sphere_example_run(2001, 1e-8);
  CHECK(compare(a, loose, CompareMetric::Endpoint) < 1e-6);

  // closed-form generic branch vs its ODE re-integration
  EuclidBranch b;
  b.tag = BranchTag::Generic;
  b.z = 1.0;
  b.A = v2(1, 0);
  b.B = v2(0, 1);
  b.C = v2(0, 0);
  b.D = v2(0, 0);
  const Trajectory closed = sample_branch_trajectory(b, {0, 2}, 2001);
  Vec y0(8);
  y0 << eval_branch(b, 0).position, eval_branch(b, 0).velocity, b.A, b.B;
  IntegrateOptions opts;
  opts.samples = 2001;
  const Trajectory ode =
      integrate(SystemKind::EuclidExtremal, ManifoldId::euclidean(2), y0, b.z,
                Vec3::Zero(), {0, 2}, opts);
  CHECK(compare(closed, ode, CompareMetric::PointwiseMax) <= 1e-8);
}

TEST_CASE("analyze rejects undersampled trajectories") {
  Trajectory tiny;
  tiny.system = SystemKind::EuclidSampled;
  tiny.manifold = ManifoldId::euclidean(2);
  for (int i = 0; i < 3; ++i) {
    tiny.times.push_back(i * 0.1);
    tiny.states.push_back(Vec(Vec::Zero(4)));
  }
  CHECK_THROWS_AS(analyze(tiny), std::invalid_argument);
}

TEST_CASE("riemannian cubic trajectory: no z verdict, sphere constraint") {
  // start on a great circle with a gentle covariant acceleration
  Vec y0(12);
  y0 << 1, 0, 0, /* x */ 0, 1, 0, /* v */ 0, 0, 0.5, /* W1 */ 0, 0, 0;
  IntegrateOptions opts;
  opts.samples = 4001;
  const Trajectory traj =
      integrate(SystemKind::RiemannianCubic, ManifoldId::sphere(2), y0, 0.0,
                Vec3::Zero(), {0, 4}, opts);
  REQUIRE(traj.outcome == IntegrationOutcome::Complete);
  const DiagnosticsReport rep = analyze(traj);
  CHECK(rep.verdicts.count("z_constant") == 0);
  CHECK(rep.constraint_drifts.at("sphere_norm") <= 1e-9);
}
