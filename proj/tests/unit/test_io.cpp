// Copyright 2026 The Myopic MFG Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <doctest.h>

#include <cmath>
#include <filesystem>

#include "mfg/builtin.hpp"
#include "mfg/errors.hpp"
#include "mfg/model_io.hpp"
#include "mfg/report_json.hpp"
#include "mfg/trajectory_io.hpp"

using namespace mfg;

namespace {

Vector point(std::initializer_list<double> xs) {
  Vector v(static_cast<Eigen::Index>(xs.size()));
  int i = 0;
  for (double x : xs) v[i++] = x;
  return v;
}

}  // namespace

TEST_CASE("trajectory CSV: header, modes, lambda column, exact read-back") {
  GameModel cong = examples::congestion_model();
  IntegrateOptions io;
  io.output_times = {0.5, 1.0, 2.0, 40.0};
  Trajectory tr = integrate(cong, Distribution(point({0.2, 0.5, 0.3})), 40.0, io);
  const std::string csv = trajectory_csv(tr, cong);
  CHECK(csv.rfind("t,m1,m2,m3,mode,strategy,lambda\n", 0) == 0);
  auto rows = parse_trajectory_csv(csv);
  REQUIRE(rows.size() == tr.samples.size());
  bool interior = false, sliding = false, converged = false;
  for (std::size_t k = 0; k < rows.size(); ++k) {
    const auto& row = rows[k];
    CHECK(row.t == tr.samples[k].t);
    CHECK(row.m == tr.samples[k].m);
    CHECK_NOTHROW(Distribution{row.m});
    if (row.mode == "interior") {
      interior = true;
      CHECK_FALSE(row.lambda.has_value());
      CHECK(row.strategy.find('|') == std::string::npos);
    } else if (row.mode == "sliding") {
      sliding = true;
      REQUIRE(row.lambda.has_value());
      CHECK(*row.lambda == tr.samples[k].lambda);
      CHECK(row.strategy.find('|') != std::string::npos);
    } else {
      CHECK(row.mode == "converged");
      converged = true;
    }
  }
  CHECK(interior);
  CHECK(sliding);
  CHECK(converged);
}

TEST_CASE("trajectory CSV: malformed input") {
  CHECK_THROWS_AS(parse_trajectory_csv(""), ParseError);
  CHECK_THROWS_AS(parse_trajectory_csv("t,x\n"), ParseError);
  CHECK_THROWS_AS(parse_trajectory_csv("t,m1,m2,mode,strategy,lambda\n0,0.5\n"), ParseError);
  CHECK_THROWS_AS(parse_trajectory_csv("t,m1,m2,mode,strategy,lambda\n0,abc,0.5,interior,a;b,\n"),
                  ParseError);
  auto ok = parse_trajectory_csv("t,m1,m2,mode,strategy,lambda\r\n0,0.5,0.5,interior,stay;stay,\r\n");
  REQUIRE(ok.size() == 1);
  CHECK(ok[0].strategy == "stay;stay");
}

TEST_CASE("report JSON: stability eigenvalues as pairs, validation violations") {
  GameModel model = examples::consumer_choice_model();
  EquilibriumReport eq;
  for (const auto& r : find_deterministic_equilibria(model).equilibria) {
    if (*r.deterministic == DeterministicStrategy({1, 1})) eq = r;
  }
  StabilityReport st = local_check(model, eq);
  Json j = to_json(st, model);
  CHECK(j["classification"] == "locally-convergent");
  REQUIRE(j["eigenvalues"].size() == 2);
  CHECK(j["eigenvalues"][1].size() == 2);
  CHECK(j["eigenvalues"][1][0].get<double>() == doctest::Approx(-0.2));
  CHECK(j["explicit_delta"]["delta"].get<double>() > 0);
  Json e = to_json(eq, model);
  CHECK(e["strategy"] == "stay;stay");
  CHECK(e["policy"]["provider1"]["stay"] == 1.0);

  GameModel bad = load_model(std::filesystem::path(TEST_DATA_DIR) / "bad.json");
  Json v = to_json(validate_model(bad, 10), bad);
  CHECK(v["ok"] == false);
  CHECK(v["violations"][0]["kind"] == "negative-rate");
  CHECK(v["violations"][0]["from"] == "a");

  Trajectory tr = integrate(model, Distribution(point({0.45, 0.55})), 200.0, {});
  Json s = trajectory_summary(tr, model, find_deterministic_equilibria(model).equilibria);
  CHECK(s["nearest_equilibrium"]["strategy"] == "change;stay");
  CHECK(s["termination"] == "converged");
  Json far = trajectory_summary(tr, model, {});
  CHECK(far["nearest_equilibrium"].is_null());
}
