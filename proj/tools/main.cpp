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

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "linfcurves/config.hpp"

namespace fs = std::filesystem;

namespace {

struct CommonArgs {
  std::string config_path;
  std::string preset;
  std::string out_dir = ".";
};

void add_common(CLI::App* cmd, CommonArgs* args) {
  auto* cfg = cmd->add_option("--config", args->config_path,
                              "Run configuration JSON file");
  auto* pre = cmd->add_option("--preset", args->preset,
                              "Shipped preset name (see `presets list`)");
  cfg->excludes(pre);
  cmd->add_option("--out", args->out_dir, "Output directory")
      ->default_val(".");
}

int fail_validation(const std::string& message) {
  // machine-readable error on stdout, mirroring execute_run's shape
  std::cout << "{\n  \"schema_version\": 1,\n  \"errors\": [\n    \""
            << message << "\"\n  ]\n}\n";
  return linf::kExitValidation;
}

int run_mode(const CommonArgs& args, linf::RunMode mode) {
  linf::RunConfig config;
  try {
    if (!args.preset.empty()) {
      config = linf::make_preset(args.preset);
    } else if (!args.config_path.empty()) {
      std::ifstream in(args.config_path);
      if (!in) return fail_validation("cannot open " + args.config_path);
      std::stringstream ss;
      ss << in.rdbuf();
      config = linf::parse_config(ss.str());
    } else {
      return fail_validation("one of --config or --preset is required");
    }
  } catch (const std::exception& e) {
    return fail_validation(e.what());
  }
  config.mode = mode;

  const linf::RunOutcome outcome = linf::execute_run(config);
  if (outcome.exit_code == linf::kExitValidation) {
    std::cout << outcome.report_json;  // no files on validation failure
    return outcome.exit_code;
  }

  std::error_code ec;
  fs::create_directories(args.out_dir, ec);
  if (ec) return fail_validation("cannot create " + args.out_dir);

  const fs::path json_path = fs::path(args.out_dir) / config.json_name;
  std::ofstream(json_path) << outcome.report_json;
  if (!outcome.csv_text.empty()) {
    const fs::path csv_path = fs::path(args.out_dir) / config.csv_name;
    std::ofstream(csv_path) << outcome.csv_text;
    std::cout << "wrote " << csv_path.string() << "\n";
  }
  std::cout << "wrote " << json_path.string() << "\n";
  return outcome.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Minimum-max-acceleration curves: integrate, solve boundary problems, "
      "check necessary conditions, and compare against spline baselines"};
  app.require_subcommand(1);

  CommonArgs ivp_args, bvp_args, check_args, baseline_args;
  auto* ivp = app.add_subcommand("ivp", "Integrate an initial-value run");
  add_common(ivp, &ivp_args);
  auto* bvp = app.add_subcommand("bvp", "Solve a boundary-value run");
  add_common(bvp, &bvp_args);
  auto* check = app.add_subcommand(
      "check", "Per-segment necessary-condition check at knot times");
  add_common(check, &check_args);
  auto* baseline = app.add_subcommand(
      "baseline", "Closed-form Euclidean solve vs. cubic baseline");
  add_common(baseline, &baseline_args);

  auto* presets = app.add_subcommand("presets", "Preset utilities");
  auto* presets_list =
      presets->add_subcommand("list", "List shipped preset names");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : linf::kExitValidation;
  }

  if (presets_list->parsed()) {
    for (const std::string& name : linf::preset_names())
      std::cout << name << "\n";
    return 0;
  }
  if (presets->parsed()) {
    std::cerr << "usage: presets list\n";
    return linf::kExitValidation;
  }

  if (ivp->parsed()) return run_mode(ivp_args, linf::RunMode::Ivp);
  if (bvp->parsed()) return run_mode(bvp_args, linf::RunMode::Bvp);
  if (check->parsed()) return run_mode(check_args, linf::RunMode::Check);
  if (baseline->parsed())
    return run_mode(baseline_args, linf::RunMode::Baseline);
  return linf::kExitValidation;
}
