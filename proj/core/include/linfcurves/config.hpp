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

#ifndef LINFCURVES_CONFIG_HPP_
#define LINFCURVES_CONFIG_HPP_

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "linfcurves/shooting.hpp"

namespace linf {

// Run configuration: versioned JSON schema, validation that reports every
// violation, shipped example presets, and the runner behind the CLI.
// Identical configs produce byte-identical output files.

enum class RunMode { Ivp, Bvp, Check, Baseline };

std::string to_string(RunMode mode);
std::string to_string(SystemKind system);

struct RunConfig {
  int schema_version = 1;
  RunMode mode = RunMode::Ivp;
  SystemKind system = SystemKind::SphereExtremal;
  ManifoldId manifold = ManifoldId::sphere(2);

  std::optional<double> z;
  std::optional<Vec3> C;                 // so3_reduced only
  std::array<double, 2> span = {0.0, 1.0};

  std::map<std::string, Vec> initial;    // ivp/check: named state arrays
  std::map<std::string, Vec> boundary;   // bvp/baseline: x0, x1, v0, [v1]
  std::string bvp_variant = "full_velocities";  // or "free_end_velocity"
  std::vector<double> knot_times;        // check mode

  double rtol = 1e-10;
  double atol = 1e-12;
  int sample_count = 2048;

  std::string csv_name = "trajectory.csv";
  std::string json_name = "report.json";

  bool operator==(const RunConfig&) const;
};

/// Serialize with stable key order; parses back to an equal value.
std::string config_to_json(const RunConfig& config, int indent = 2);

/// Parse a config JSON document. Throws std::invalid_argument on malformed
/// JSON, unknown enum strings, or a wrong schema_version.
RunConfig parse_config(const std::string& json_text);

/// Every violation found, not just the first. Empty means valid.
std::vector<std::string> validate(const RunConfig& config);

std::vector<std::string> preset_names();

/// One of the shipped example configurations. Throws on unknown names.
RunConfig make_preset(const std::string& name);

/// CSV with a header naming each state component, then one row per sample:
/// t, state components, phi, acceleration norm. 17 significant digits.
std::string trajectory_csv(const Trajectory& traj);

// Exit codes shared by the runner and the CLI.
inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitNonconvergence = 3;
inline constexpr int kExitNumericalEvent = 4;

struct RunOutcome {
  int exit_code = kExitOk;
  std::string csv_text;      // empty when no trajectory was produced
  std::string report_json;   // diagnostics / check / baseline / error report
  std::optional<Trajectory> trajectory;
};

/// Execute a validated config in memory. Never touches the filesystem; the
/// CLI decides where artifacts land. Validation failures come back as
/// kExitValidation with an error-list JSON and no CSV.
RunOutcome execute_run(const RunConfig& config);

}  // namespace linf

#endif  // LINFCURVES_CONFIG_HPP_
