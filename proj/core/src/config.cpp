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

#include "linfcurves/config.hpp"

#include <cstdio>
#include <stdexcept>

#include <json.hpp>

#include "linfcurves/diagnostics.hpp"
#include "linfcurves/euclid.hpp"
#include "linfcurves/lie_so3.hpp"

namespace linf {

namespace {

using ordered_json = nlohmann::ordered_json;

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

const std::map<std::string, RunMode> kModeNames = {
    {"ivp", RunMode::Ivp},
    {"bvp", RunMode::Bvp},
    {"check", RunMode::Check},
    {"baseline", RunMode::Baseline},
};

const std::map<std::string, SystemKind> kSystemNames = {
    {"sphere_extremal", SystemKind::SphereExtremal},
    {"so3_reduced", SystemKind::So3Reduced},
    {"euclid_extremal", SystemKind::EuclidExtremal},
    {"riemannian_cubic", SystemKind::RiemannianCubic},
    {"euclid_closed_form", SystemKind::EuclidSampled},
};

template <typename T>
T parse_enum(const std::map<std::string, T>& names, const std::string& s,
             const char* what) {
  const auto it = names.find(s);
  require(it != names.end(), std::string("unknown ") + what + ": " + s);
  return it->second;
}

ManifoldKind parse_kind(const std::string& s) {
  if (s == "euclidean") return ManifoldKind::Euclidean;
  if (s == "sphere") return ManifoldKind::Sphere;
  if (s == "so3") return ManifoldKind::SO3;
  throw std::invalid_argument("unknown manifold kind: " + s);
}

ordered_json vec_json(const Vec& v) {
  ordered_json a = ordered_json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

Vec json_vec(const ordered_json& a) {
  require(a.is_array(), "expected a numeric array");
  Vec v(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    require(a[i].is_number(), "expected a numeric array");
    v[static_cast<Eigen::Index>(i)] = a[i].get<double>();
  }
  return v;
}

}  // namespace

std::string to_string(RunMode mode) {
  for (const auto& [name, m] : kModeNames)
    if (m == mode) return name;
  return "?";
}

std::string to_string(SystemKind system) {
  for (const auto& [name, s] : kSystemNames)
    if (s == system) return name;
  return "?";
}

bool RunConfig::operator==(const RunConfig& o) const {
  auto maps_equal = [](const std::map<std::string, Vec>& a,
                       const std::map<std::string, Vec>& b) {
    if (a.size() != b.size()) return false;
    for (const auto& [k, v] : a) {
      const auto it = b.find(k);
      if (it == b.end() || it->second.size() != v.size() ||
          it->second != v)
        return false;
    }
    return true;
  };
  const bool z_eq = z.has_value() == o.z.has_value() &&
                    (!z.has_value() || *z == *o.z);
  const bool c_eq = C.has_value() == o.C.has_value() &&
                    (!C.has_value() || *C == *o.C);
  return schema_version == o.schema_version && mode == o.mode &&
         system == o.system && manifold == o.manifold && z_eq && c_eq &&
         span == o.span && maps_equal(initial, o.initial) &&
         maps_equal(boundary, o.boundary) && bvp_variant == o.bvp_variant &&
         knot_times == o.knot_times && rtol == o.rtol && atol == o.atol &&
         sample_count == o.sample_count && csv_name == o.csv_name &&
         json_name == o.json_name;
}

std::string config_to_json(const RunConfig& c, int indent) {
  ordered_json j;
  j["schema_version"] = c.schema_version;
  j["mode"] = to_string(c.mode);
  j["system"] = to_string(c.system);
  j["manifold"] = {{"kind", to_string(c.manifold.kind)},
                   {"dim", c.manifold.dim}};
  if (c.z) j["z"] = *c.z;
  if (c.C) j["C"] = vec_json(*c.C);
  j["span"] = {c.span[0], c.span[1]};
  if (!c.initial.empty()) {
    ordered_json m;
    for (const auto& [k, v] : c.initial) m[k] = vec_json(v);
    j["initial"] = m;
  }
  if (!c.boundary.empty()) {
    ordered_json m;
    for (const auto& [k, v] : c.boundary) m[k] = vec_json(v);
    j["boundary"] = m;
    j["bvp_variant"] = c.bvp_variant;
  }
  if (!c.knot_times.empty()) j["knot_times"] = c.knot_times;
  j["tolerances"] = {{"rtol", c.rtol}, {"atol", c.atol}};
  j["sample_count"] = c.sample_count;
  j["output"] = {{"csv", c.csv_name}, {"json", c.json_name}};
  return j.dump(indent) + "\n";
}

RunConfig parse_config(const std::string& json_text) {
  ordered_json j;
  try {
    j = ordered_json::parse(json_text);
  } catch (const std::exception& e) {
    throw std::invalid_argument(std::string("malformed JSON: ") + e.what());
  }
  require(j.is_object(), "config must be a JSON object");

  RunConfig c;
  c.schema_version = j.value("schema_version", 1);
  require(c.schema_version == 1, "unsupported schema_version");
  require(j.contains("mode") && j["mode"].is_string(), "missing mode");
  c.mode = parse_enum(kModeNames, j["mode"].get<std::string>(), "mode");
  require(j.contains("system") && j["system"].is_string(), "missing system");
  c.system =
      parse_enum(kSystemNames, j["system"].get<std::string>(), "system");
  if (j.contains("manifold")) {
    const auto& m = j["manifold"];
    require(m.is_object() && m.contains("kind"), "bad manifold object");
    c.manifold.kind = parse_kind(m["kind"].get<std::string>());
    c.manifold.dim = m.value("dim", c.manifold.kind == ManifoldKind::SO3
                                        ? 3
                                        : c.manifold.dim);
  }
  if (j.contains("z")) {
    require(j["z"].is_number(), "z must be a number");
    c.z = j["z"].get<double>();
  }
  if (j.contains("C")) {
    const Vec v = json_vec(j["C"]);
    require(v.size() == 3, "C must have 3 components");
    c.C = Vec3(v[0], v[1], v[2]);
  }
  if (j.contains("span")) {
    const Vec s = json_vec(j["span"]);
    require(s.size() == 2, "span must be [t0, t1]");
    c.span = {s[0], s[1]};
  }
  for (const char* key : {"initial", "boundary"}) {
    if (!j.contains(key)) continue;
    require(j[key].is_object(), std::string(key) + " must be an object");
    auto& dst = std::string(key) == "initial" ? c.initial : c.boundary;
    for (const auto& [k, v] : j[key].items()) dst[k] = json_vec(v);
  }
  if (j.contains("bvp_variant"))
    c.bvp_variant = j["bvp_variant"].get<std::string>();
  if (j.contains("knot_times"))
    c.knot_times = j["knot_times"].get<std::vector<double>>();
  if (j.contains("tolerances")) {
    c.rtol = j["tolerances"].value("rtol", c.rtol);
    c.atol = j["tolerances"].value("atol", c.atol);
  }
  c.sample_count = j.value("sample_count", c.sample_count);
  if (j.contains("output")) {
    c.csv_name = j["output"].value("csv", c.csv_name);
    c.json_name = j["output"].value("json", c.json_name);
  }
  return c;
}

namespace {

void check_array(std::vector<std::string>& errs,
                 const std::map<std::string, Vec>& arrays,
                 const std::string& where, const std::string& name, int dim) {
  const auto it = arrays.find(name);
  if (it == arrays.end()) {
    errs.push_back("missing " + where + " array \"" + name + "\"");
  } else if (it->second.size() != dim) {
    errs.push_back(where + " array \"" + name + "\" must have " +
                   std::to_string(dim) + " components");
  }
}

void check_unit(std::vector<std::string>& errs,
                const std::map<std::string, Vec>& arrays,
                const std::string& name) {
  const auto it = arrays.find(name);
  if (it != arrays.end() && std::abs(it->second.norm() - 1.0) > 1e-9)
    errs.push_back(name + " not on sphere (tolerance 1e-9)");
}

}  // namespace

std::vector<std::string> validate(const RunConfig& c) {
  std::vector<std::string> errs;
  const int d = c.manifold.ambient_dim();

  if (!(c.span[1] > c.span[0])) errs.push_back("span not increasing");
  if (c.sample_count < 2) errs.push_back("sample_count must be >= 2");
  if (c.rtol <= 0 || c.atol <= 0) errs.push_back("tolerances must be > 0");
  if (c.manifold.dim < 1) errs.push_back("manifold dim must be >= 1");
  if (c.z && *c.z < 0) errs.push_back("z must be >= 0");

  // system / manifold pairing
  switch (c.system) {
    case SystemKind::SphereExtremal:
      if (c.manifold.kind != ManifoldKind::Sphere)
        errs.push_back("sphere_extremal requires a sphere manifold");
      break;
    case SystemKind::So3Reduced:
      if (c.manifold.kind != ManifoldKind::SO3)
        errs.push_back("so3_reduced requires the so3 manifold");
      break;
    case SystemKind::EuclidExtremal:
    case SystemKind::EuclidSampled:
      if (c.manifold.kind != ManifoldKind::Euclidean)
        errs.push_back(to_string(c.system) +
                       " requires a euclidean manifold");
      break;
    case SystemKind::RiemannianCubic:
      if (c.manifold.kind == ManifoldKind::SO3)
        errs.push_back("riemannian_cubic supports euclidean and sphere only");
      break;
  }

  const bool integrates = c.mode == RunMode::Ivp || c.mode == RunMode::Check;
  if (integrates) {
    switch (c.system) {
      case SystemKind::SphereExtremal:
      case SystemKind::EuclidExtremal:
        if (!c.z) errs.push_back("missing z");
        for (const char* n : {"x", "xdot", "X", "Xdot"})
          check_array(errs, c.initial, "initial", n, d);
        if (c.system == SystemKind::SphereExtremal)
          check_unit(errs, c.initial, "x");
        break;
      case SystemKind::So3Reduced:
        if (!c.z) errs.push_back("missing z");
        if (!c.C) errs.push_back("missing C");
        for (const char* n : {"V", "W"})
          check_array(errs, c.initial, "initial", n, 3);
        break;
      case SystemKind::RiemannianCubic:
        for (const char* n : {"x", "xdot", "W1", "W2"})
          check_array(errs, c.initial, "initial", n, d);
        if (c.manifold.kind == ManifoldKind::Sphere)
          check_unit(errs, c.initial, "x");
        break;
      case SystemKind::EuclidSampled:
        if (!c.z) errs.push_back("missing z");
        for (const char* n : {"C", "D"})
          check_array(errs, c.initial, "initial", n, d);
        if (c.z && *c.z > 0)
          for (const char* n : {"A", "B"})
            check_array(errs, c.initial, "initial", n, d);
        break;
    }
    if (c.mode == RunMode::Check) {
      if (c.knot_times.size() < 2) {
        errs.push_back("check mode needs >= 2 knot_times");
      } else {
        for (std::size_t i = 1; i < c.knot_times.size(); ++i)
          if (c.knot_times[i] <= c.knot_times[i - 1]) {
            errs.push_back("knot_times not increasing");
            break;
          }
        if (c.knot_times.front() < c.span[0] ||
            c.knot_times.back() > c.span[1])
          errs.push_back("knot_times outside span");
      }
    }
  }

  if (c.mode == RunMode::Bvp) {
    if (c.manifold.kind == ManifoldKind::SO3)
      errs.push_back("bvp mode supports euclidean and sphere manifolds");
    if (c.bvp_variant != "full_velocities" &&
        c.bvp_variant != "free_end_velocity")
      errs.push_back("unknown bvp_variant: " + c.bvp_variant);
    for (const char* n : {"x0", "x1", "v0"})
      check_array(errs, c.boundary, "boundary", n, d);
    if (c.bvp_variant == "full_velocities")
      check_array(errs, c.boundary, "boundary", "v1", d);
    if (c.manifold.kind == ManifoldKind::Sphere) {
      check_unit(errs, c.boundary, "x0");
      check_unit(errs, c.boundary, "x1");
    }
  }

  if (c.mode == RunMode::Baseline) {
    if (c.manifold.kind != ManifoldKind::Euclidean)
      errs.push_back("baseline mode requires a euclidean manifold");
    for (const char* n : {"x0", "x1", "v0"})
      check_array(errs, c.boundary, "boundary", n, d);
  }

  return errs;
}

std::vector<std::string> preset_names() {
  return {"sphere-example", "so3-example-long", "so3-example-short"};
}

RunConfig make_preset(const std::string& name) {
  RunConfig c;
  if (name == "sphere-example") {
    c.mode = RunMode::Ivp;
    c.system = SystemKind::SphereExtremal;
    c.manifold = ManifoldId::sphere(2);
    c.z = 1.2;
    c.span = {0.0, 8.0};
    c.initial["x"] = Vec3(1, 0, 0);
    c.initial["xdot"] = Vec3(0, 1, 0);
    c.initial["X"] = Vec3(0, 1, 200);
    c.initial["Xdot"] = Vec3(-1, 2, 1);
    c.sample_count = 8001;  // grid step 1e-3
    return c;
  }
  if (name == "so3-example-long" || name == "so3-example-short") {
    c.mode = RunMode::Ivp;
    c.system = SystemKind::So3Reduced;
    c.manifold = ManifoldId::so3();
    c.z = 1.2;
    c.initial["V"] = Vec3(1, 2, 3);
    c.initial["W"] = Vec3(-1, -4, 6);
    if (name == "so3-example-long") {
      c.C = Vec3(-2, -1, 0);
      c.span = {0.0, 700.0};
      c.sample_count = 70001;  // grid step 1e-2
    } else {
      c.C = Vec3(2, 1, 0);
      c.span = {0.0, 5.0};
      c.sample_count = 5001;  // grid step 1e-3
    }
    return c;
  }
  throw std::invalid_argument("unknown preset: " + name);
}

std::string trajectory_csv(const Trajectory& traj) {
  require(!traj.states.empty(), "trajectory_csv: empty trajectory");
  const int d = traj.manifold.ambient_dim();
  const auto state_size = static_cast<int>(traj.states[0].size());

  std::vector<std::string> blocks;  // component name prefixes, in order
  switch (traj.system) {
    case SystemKind::So3Reduced:
      blocks = {"V", "W"};
      break;
    case SystemKind::RiemannianCubic:
      blocks = {"x", "xdot", "W1", "W2"};
      break;
    case SystemKind::EuclidSampled:
      blocks = state_size == 4 * d
                   ? std::vector<std::string>{"x", "xdot", "X", "Xdot"}
                   : std::vector<std::string>{"x", "xdot"};
      break;
    default:
      blocks = {"x", "xdot", "X", "Xdot"};
      break;
  }

  std::string out = "t";
  for (const auto& b : blocks)
    for (int i = 0; i < d; ++i) out += "," + b + std::to_string(i);
  out += ",phi,acc_norm\n";

  const std::vector<Vec> acc = covariant_acceleration(traj);
  const bool has_phi =
      traj.z > 0 && state_size >= 3 * d;  // multiplier field carried
  for (std::size_t i = 0; i < traj.states.size(); ++i) {
    out += fmt17(traj.times[i]);
    const Vec& y = traj.states[i];
    for (Eigen::Index k = 0; k < y.size(); ++k) out += "," + fmt17(y[k]);
    out += "," + fmt17(has_phi ? traj.phi(i) : 0.0);
    out += "," + fmt17(acc[i].norm());
    out += "\n";
  }
  return out;
}

namespace {

ordered_json report_header(const RunConfig& c) {
  ordered_json j;
  j["schema_version"] = 1;
  j["mode"] = to_string(c.mode);
  j["system"] = to_string(c.system);
  j["manifold"] = {{"kind", to_string(c.manifold.kind)},
                   {"dim", c.manifold.dim}};
  return j;
}

const char* outcome_name(IntegrationOutcome o) {
  switch (o) {
    case IntegrationOutcome::Complete: return "complete";
    case IntegrationOutcome::FieldZeroEvent: return "field_zero_event";
    case IntegrationOutcome::StepUnderflow: return "step_underflow";
  }
  return "?";
}

Trajectory make_trajectory(const RunConfig& c) {
  IntegrateOptions opts;
  opts.rtol = c.rtol;
  opts.atol = c.atol;
  opts.samples = c.sample_count;
  const double z = c.z.value_or(0.0);
  const Vec3 C = c.C.value_or(Vec3::Zero());
  const int d = c.manifold.ambient_dim();

  Vec y0;
  switch (c.system) {
    case SystemKind::SphereExtremal:
    case SystemKind::EuclidExtremal:
      y0.resize(4 * d);
      y0 << c.initial.at("x"), c.initial.at("xdot"), c.initial.at("X"),
          c.initial.at("Xdot");
      break;
    case SystemKind::RiemannianCubic:
      y0.resize(4 * d);
      y0 << c.initial.at("x"), c.initial.at("xdot"), c.initial.at("W1"),
          c.initial.at("W2");
      break;
    case SystemKind::So3Reduced:
      y0.resize(6);
      y0 << c.initial.at("V"), c.initial.at("W");
      break;
    case SystemKind::EuclidSampled: {
      EuclidBranch b;
      b.z = z;
      b.C = c.initial.at("C");
      b.D = c.initial.at("D");
      if (z == 0.0) {
        b.tag = BranchTag::Geodesic;
        b.A = Vec::Zero(d);
        b.B = Vec::Zero(d);
      } else if (c.initial.count("t2")) {
        b.tag = BranchTag::QuadraticSpline;
        b.t2 = c.initial.at("t2")[0];
        b.B = c.initial.at("B");
        b.A = -b.t2 * b.B;
      } else {
        b.tag = BranchTag::Generic;
        b.A = c.initial.at("A");
        b.B = c.initial.at("B");
      }
      return sample_branch_trajectory(b, c.span, c.sample_count);
    }
  }
  return integrate(c.system, c.manifold, y0, z, C, c.span, opts);
}

RunOutcome run_ivp_or_check(const RunConfig& c) {
  RunOutcome out;
  const Trajectory traj = make_trajectory(c);
  out.csv_text = trajectory_csv(traj);

  ordered_json j = report_header(c);
  j["outcome"] = outcome_name(traj.outcome);
  if (traj.event_time)
    j["event_time"] = *traj.event_time;
  else
    j["event_time"] = nullptr;

  const DiagnosticsReport diag = analyze(traj);
  j["diagnostics"] = ordered_json::parse(diag.to_json());

  if (traj.system == SystemKind::So3Reduced) {
    const auto series = conserved_series(traj);
    j["conserved"] = {{"c_drift_rel", series.c_drift_rel},
                      {"a_drift_rel", series.a_drift_rel},
                      {"phi_min", series.phi_min}};
  }

  bool ok = diag.all_pass();
  if (c.mode == RunMode::Check) {
    const MultipointReport mp = check_multipoint(traj, c.knot_times);
    ordered_json segs = ordered_json::array();
    for (const SegmentReport& s : mp.segments) {
      segs.push_back({{"t_begin", s.t_begin},
                      {"t_end", s.t_end},
                      {"z_mean", s.z_mean},
                      {"z_drift_rel", s.z_drift_rel},
                      {"l_residual_rel", s.l_residual_rel},
                      {"phi_begin", s.phi_begin},
                      {"phi_end", s.phi_end},
                      {"z_constant", s.z_constant},
                      {"l_ok", s.l_ok},
                      {"pass", s.pass}});
    }
    j["multipoint"] = {
        {"segments", segs},
        {"any_segment_passes", mp.any_segment_passes},
        {"first_segment_phi0_zero", mp.first_segment_phi0_zero},
        {"last_segment_phi1_zero", mp.last_segment_phi1_zero}};
    ok = mp.any_segment_passes;
  }

  out.report_json = j.dump(2) + "\n";
  out.trajectory = traj;
  if (traj.outcome != IntegrationOutcome::Complete)
    out.exit_code = kExitNumericalEvent;
  else
    out.exit_code = ok ? kExitOk : kExitNumericalEvent;
  return out;
}

RunOutcome run_bvp(const RunConfig& c) {
  ShootingProblem p;
  p.manifold = c.manifold;
  p.variant = c.bvp_variant == "free_end_velocity"
                  ? BvpVariant::FreeEndVelocity
                  : BvpVariant::FullVelocities;
  p.boundary.x0 = c.boundary.at("x0");
  p.boundary.x1 = c.boundary.at("x1");
  p.boundary.v0 = c.boundary.at("v0");
  if (c.boundary.count("v1")) p.boundary.v1 = c.boundary.at("v1");
  p.boundary.t0 = c.span[0];
  p.boundary.t1 = c.span[1];
  p.ode.rtol = c.rtol;
  p.ode.atol = c.atol;
  p.ode.samples = c.sample_count;

  const ShootingResult res = solve(p);

  RunOutcome out;
  ordered_json j = report_header(c);
  j["converged"] = res.converged;
  j["residual"] = res.residual;
  j["iterations"] = res.iterations;
  j["seed_index"] = res.seed_index;
  j["z"] = res.unknowns.z;
  j["unknowns"] = {{"X0", std::vector<double>(res.unknowns.X0.begin(),
                                              res.unknowns.X0.end())},
                   {"X0dot", std::vector<double>(res.unknowns.X0dot.begin(),
                                                 res.unknowns.X0dot.end())}};
  if (res.converged)
    j["diagnostics"] = ordered_json::parse(res.diagnostics.to_json());
  out.report_json = j.dump(2) + "\n";
  if (!res.solution.states.empty())
    out.csv_text = trajectory_csv(res.solution);
  out.trajectory = res.solution;
  out.exit_code = res.converged ? kExitOk : kExitNonconvergence;
  return out;
}

RunOutcome run_baseline(const RunConfig& c) {
  BoundaryData data;
  data.x0 = c.boundary.at("x0");
  data.x1 = c.boundary.at("x1");
  data.v0 = c.boundary.at("v0");
  if (c.boundary.count("v1")) data.v1 = c.boundary.at("v1");
  data.t0 = c.span[0];
  data.t1 = c.span[1];

  const EuclidBvpResult res = solve_euclid_bvp(data);

  BoundaryData hermite_data = data;
  if (!hermite_data.v1) {
    const double T = data.t1 - data.t0;
    hermite_data.v1 = 2.0 * (data.x1 - data.x0) / T - data.v0;
  }
  const PiecewisePoly cubic = hermite_cubic(hermite_data);

  RunOutcome out;
  ordered_json j = report_header(c);
  j["converged"] = res.converged;
  j["residual"] = res.residual;
  const char* tag = res.branch.tag == BranchTag::Geodesic ? "geodesic"
                    : res.branch.tag == BranchTag::QuadraticSpline
                        ? "quadratic_spline"
                        : "generic";
  j["branch"] = tag;
  j["j_inf_extremal"] = j_infinity(res.branch);
  j["j_inf_hermite_cubic"] = j_infinity(cubic);
  out.report_json = j.dump(2) + "\n";

  if (res.converged) {
    const Trajectory traj =
        sample_branch_trajectory(res.branch, c.span, c.sample_count);
    out.csv_text = trajectory_csv(traj);
    out.trajectory = traj;
  }
  out.exit_code = res.converged ? kExitOk : kExitNonconvergence;
  return out;
}

}  // namespace

RunOutcome execute_run(const RunConfig& config) {
  const std::vector<std::string> errs = validate(config);
  if (!errs.empty()) {
    ordered_json j;
    j["schema_version"] = 1;
    j["errors"] = errs;
    return {kExitValidation, "", j.dump(2) + "\n", std::nullopt};
  }
  try {
    switch (config.mode) {
      case RunMode::Ivp:
      case RunMode::Check:
        return run_ivp_or_check(config);
      case RunMode::Bvp:
        return run_bvp(config);
      case RunMode::Baseline:
        return run_baseline(config);
    }
  } catch (const std::invalid_argument& e) {
    ordered_json j;
    j["schema_version"] = 1;
    j["errors"] = {std::string(e.what())};
    return {kExitValidation, "", j.dump(2) + "\n", std::nullopt};
  }
  return {kExitValidation, "", "{\"errors\":[\"unreachable\"]}\n",
          std::nullopt};
}

}  // namespace linf
