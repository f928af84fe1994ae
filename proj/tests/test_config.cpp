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

#include <algorithm>
#include <sstream>

#include "linfcurves/config.hpp"

using namespace linf;

TEST_CASE("presets validate and round-trip through JSON") {
  for (const std::string& name : preset_names()) {
    const RunConfig c = make_preset(name);
    CHECK(validate(c).empty());
    const RunConfig back = parse_config(config_to_json(c));
    CHECK(back == c);
  }
}

TEST_CASE("round-trip preserves every field") {
  RunConfig c = make_preset("sphere-example");
  c.mode = RunMode::Check;
  c.knot_times = {0.0, 3.0, 8.0};
  c.rtol = 1e-9;
  c.sample_count = 1234;
  c.csv_name = "a.csv";
  c.json_name = "b.json";
  CHECK(parse_config(config_to_json(c)) == c);

  RunConfig b;
  b.mode = RunMode::Bvp;
  b.system = SystemKind::SphereExtremal;
  b.manifold = ManifoldId::sphere(2);
  b.span = {0, 2};
  b.boundary["x0"] = Vec(Vec::Zero(3));
  b.boundary["x0"][0] = 1;
  b.boundary["x1"] = Vec(Vec::Zero(3));
  b.boundary["x1"][1] = 1;
  b.boundary["v0"] = Vec(Vec::Zero(3));
  b.boundary["v0"][1] = 1;
  b.bvp_variant = "free_end_velocity";
  CHECK(parse_config(config_to_json(b)) == b);
}

TEST_CASE("validation reports every violation with the documented text") {
  RunConfig c = make_preset("sphere-example");
  c.span = {5, 5};
  c.z.reset();
  c.initial["x"] = Vec(Vec::Zero(3));
  c.initial["x"][0] = 0.9;  // |x| = 0.9
  const auto errs = validate(c);
  auto has = [&](const std::string& needle) {
    return std::any_of(errs.begin(), errs.end(), [&](const std::string& e) {
      return e.find(needle) != std::string::npos;
    });
  };
  CHECK(has("span not increasing"));
  CHECK(has("missing z"));
  CHECK(has("x not on sphere (tolerance 1e-9)"));
  CHECK(errs.size() >= 3);  // all violations, not just the first
}

TEST_CASE("malformed json and unknown names are rejected") {
  CHECK_THROWS_AS(parse_config("{ not json"), std::invalid_argument);
  CHECK_THROWS_AS(parse_config("{\"mode\":\"fly\",\"system\":\"x\"}"),
                  std::invalid_argument);
  CHECK_THROWS_AS(make_preset("nope"), std::invalid_argument);
}

TEST_CASE("execute_run: validation failure produces no artifacts") {
  RunConfig c = make_preset("sphere-example");
  c.z.reset();
  const RunOutcome out = execute_run(c);
  CHECK(out.exit_code == kExitValidation);
  CHECK(out.csv_text.empty());
  CHECK(out.report_json.find("missing z") != std::string::npos);
  CHECK_FALSE(out.trajectory.has_value());
}

TEST_CASE("identical configs produce byte-identical artifacts") {
  const RunConfig c = make_preset("so3-example-short");
  const RunOutcome a = execute_run(c);
  const RunOutcome b = execute_run(c);
  CHECK(a.exit_code == kExitOk);
  CHECK(a.csv_text == b.csv_text);
  CHECK(a.report_json == b.report_json);
}

TEST_CASE("csv layout: header then 17-significant-digit rows") {
  const RunConfig c = make_preset("so3-example-short");
  const RunOutcome out = execute_run(c);
  std::istringstream is(out.csv_text);
  std::string header;
  std::getline(is, header);
  CHECK(header == "t,V0,V1,V2,W0,W1,W2,phi,acc_norm");
  std::string first;
  std::getline(is, first);
  // first row carries the exact initial data
  CHECK(first.rfind("0,1,2,3,-1,-4,6,", 0) == 0);
  // values survive a text round-trip bit-exactly
  const double v = 0.1234567890123456789;
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  CHECK(std::stod(buf) == v);

  std::size_t rows = 2;  // header + first already consumed
  std::string line;
  while (std::getline(is, line)) ++rows;
  CHECK(rows == std::size_t(c.sample_count) + 1);
}

TEST_CASE("sphere preset csv ends at the published endpoint") {
  const RunOutcome out = execute_run(make_preset("sphere-example"));
  REQUIRE(out.exit_code == kExitOk);
  const std::size_t last_nl =
      out.csv_text.find_last_of('\n', out.csv_text.size() - 2);
  std::istringstream row(out.csv_text.substr(last_nl + 1));
  std::string cell;
  std::getline(row, cell, ',');
  CHECK(std::stod(cell) == doctest::Approx(8.0));
  double x[3];
  for (double& xi : x) {
    std::getline(row, cell, ',');
    xi = std::stod(cell);
  }
  CHECK(std::abs(x[0] - (-0.433207)) < 1e-3);
  CHECK(std::abs(x[1] - 0.898726) < 1e-3);
  CHECK(std::abs(x[2] - 0.0679917) < 1e-3);
}

TEST_CASE("check mode reports per-segment verdicts") {
  RunConfig c = make_preset("sphere-example");
  c.mode = RunMode::Check;
  c.knot_times = {0.0, 4.0, 8.0};
  c.sample_count = 4001;
  const RunOutcome out = execute_run(c);
  CHECK(out.exit_code == kExitOk);
  CHECK(out.report_json.find("any_segment_passes") != std::string::npos);
  CHECK(out.report_json.find("\"any_segment_passes\": true") !=
        std::string::npos);
}

TEST_CASE("baseline mode compares the closed form against the cubic") {
  RunConfig c;
  c.mode = RunMode::Baseline;
  c.system = SystemKind::EuclidSampled;
  c.manifold = ManifoldId::euclidean(2);
  c.span = {0, 2};
  c.boundary["x0"] = Vec(Vec::Zero(2));
  c.boundary["x1"] = Vec(Vec::Zero(2));
  c.boundary["v0"] = Vec(Vec::Zero(2));
  c.boundary["v0"][0] = 1;
  c.boundary["v1"] = Vec(Vec::Zero(2));
  c.boundary["v1"][0] = -1;
  const RunOutcome out = execute_run(c);
  CHECK(out.exit_code == kExitOk);
  CHECK(out.report_json.find("j_inf_extremal") != std::string::npos);
  CHECK(out.report_json.find("j_inf_hermite_cubic") != std::string::npos);
}

TEST_CASE("bvp mode through the runner") {
  RunConfig c;
  c.mode = RunMode::Bvp;
  c.system = SystemKind::EuclidExtremal;
  c.manifold = ManifoldId::euclidean(2);
  c.span = {0, 1};
  c.boundary["x0"] = Vec(Vec::Zero(2));
  c.boundary["x1"] = Vec(Vec::Ones(2));
  c.boundary["v0"] = Vec(Vec::Ones(2));
  c.boundary["v1"] = Vec(Vec::Ones(2));
  c.sample_count = 201;
  const RunOutcome out = execute_run(c);
  CHECK(out.exit_code == kExitOk);  // collinear: a geodesic-like solution
  CHECK(out.report_json.find("\"converged\": true") != std::string::npos);
}
