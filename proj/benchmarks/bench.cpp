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

#include <benchmark/benchmark.h>

#include "linfcurves/diagnostics.hpp"
#include "linfcurves/euclid.hpp"
#include "linfcurves/ode.hpp"

namespace {

using namespace linf;

Vec sphere_y0() {
  Vec y(12);
  y << 1, 0, 0, 0, 1, 0, 0, 1, 200, -1, 2, 1;
  return y;
}

void BM_SphereIntegrate(benchmark::State& state) {
  IntegrateOptions opts;
  opts.samples = static_cast<int>(state.range(0));
  for (auto _ : state) {
    const Trajectory t =
        integrate(SystemKind::SphereExtremal, ManifoldId::sphere(2),
                  sphere_y0(), 1.2, Vec3::Zero(), {0, 8}, opts);
    benchmark::DoNotOptimize(t.states.back());
  }
}
BENCHMARK(BM_SphereIntegrate)->Arg(2048)->Arg(8001);

void BM_So3Integrate(benchmark::State& state) {
  Vec y0(6);
  y0 << 1, 2, 3, -1, -4, 6;
  IntegrateOptions opts;
  opts.samples = 4096;
  const double t1 = static_cast<double>(state.range(0));
  for (auto _ : state) {
    const Trajectory t = integrate(SystemKind::So3Reduced, ManifoldId::so3(),
                                   y0, 1.2, Vec3(-2, -1, 0), {0, t1}, opts);
    benchmark::DoNotOptimize(t.states.back());
  }
}
BENCHMARK(BM_So3Integrate)->Arg(5)->Arg(700);

void BM_Analyze(benchmark::State& state) {
  IntegrateOptions opts;
  opts.samples = 8001;
  const Trajectory traj =
      integrate(SystemKind::SphereExtremal, ManifoldId::sphere(2),
                sphere_y0(), 1.2, Vec3::Zero(), {0, 8}, opts);
  for (auto _ : state) {
    const DiagnosticsReport rep = analyze(traj);
    benchmark::DoNotOptimize(rep.l_residual_max);
  }
}
BENCHMARK(BM_Analyze);

void BM_EuclidBvp(benchmark::State& state) {
  BoundaryData d;
  d.x0 = Vec(Vec::Zero(2));
  d.x1 = Vec(Vec::Zero(2));
  d.v0 = Vec(Vec::Zero(2));
  d.v1 = Vec(Vec::Zero(2));
  d.v0[0] = 1;
  (*d.v1)[0] = -1;
  d.t0 = 0;
  d.t1 = 2;
  for (auto _ : state) {
    const EuclidBvpResult r = solve_euclid_bvp(d);
    benchmark::DoNotOptimize(r.residual);
  }
}
BENCHMARK(BM_EuclidBvp);

}  // namespace
