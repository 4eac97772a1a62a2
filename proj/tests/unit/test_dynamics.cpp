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
#include <random>

#include "generators.hpp"
#include "mfg/builtin.hpp"
#include "mfg/dynamics.hpp"
#include "mfg/errors.hpp"
#include "mfg/mdp.hpp"
#include "mfg/model_io.hpp"
#include "mfg/switching.hpp"

using namespace mfg;

namespace {

const DeterministicStrategy kChangeStay({0, 1});
const DeterministicStrategy kStayStay({1, 1});

Vector point(std::initializer_list<double> xs) {
  Vector v(static_cast<Eigen::Index>(xs.size()));
  int i = 0;
  for (double x : xs) v[i++] = x;
  return v;
}

Vector active_field(const GameModel& model, const Trajectory& tr, const TrajectorySample& s) {
  const Segment& seg = tr.segments[static_cast<std::size_t>(s.segment)];
  EvaluatedModel em = model.evaluate(s.m);
  if (seg.mode == Mode::kSliding) {
    return s.lambda * vector_field(em, s.m, seg.strategy) +
           (1 - s.lambda) * vector_field(em, s.m, *seg.partner);
  }
  return vector_field(em, s.m, seg.strategy);
}

// Invariants every stored trajectory must satisfy.
void check_invariants(const GameModel& model, const Trajectory& tr) {
  REQUIRE(!tr.samples.empty());
  CHECK(tr.min_raw_entry >= -1e-6);
  for (std::size_t k = 0; k < tr.samples.size(); ++k) {
    const auto& s = tr.samples[k];
    if (k > 0) CHECK(s.t > tr.samples[k - 1].t);
    CHECK(std::abs(s.m.sum() - 1.0) <= 1e-9);
    CHECK(s.m.minCoeff() >= -1e-9);
    CHECK(std::abs(active_field(model, tr, s).sum()) <= 1e-12);
    const Segment& seg = tr.segments[static_cast<std::size_t>(s.segment)];
    EvaluatedModel em = model.evaluate(s.m);
    if (seg.mode == Mode::kInterior) {
      BestResponseSet br = best_response(em, model.beta()).effective(em);
      CHECK(br.contains(canonical_strategy(em, seg.strategy)));
    } else if (seg.mode == Mode::kSliding) {
      CHECK(std::abs(g_value(model, seg.strategy, *seg.partner, s.m)) <= 1e-7);
      CHECK(s.lambda >= 0.0);
      CHECK(s.lambda <= 1.0);
    }
  }
}

}  // namespace

TEST_CASE("vector_field: hand-expanded cases") {
  GameModel consumer = examples::consumer_choice_model();
  CHECK(vector_field(consumer, point({0.5, 0.5}), kStayStay).cwiseAbs().maxCoeff() == 0.0);
  Vector f = vector_field(consumer, point({0.3, 0.7}), kStayStay);
  CHECK(f[0] == doctest::Approx(0.04).epsilon(1e-14));
  CHECK(f[1] == doctest::Approx(-0.04).epsilon(1e-14));

  // Hand expansion with rates b=1, e=1, eps=0.5, lambda=1 at (0.4, 0.4, 0.2):
  // 0.4*(-1.9, 1, 0.9) + 0.4*(0, -0.9, 0.9) + 0.2*(1, 1, -2).
  GameModel cong = examples::congestion_model();
  Vector g = vector_field(cong, point({0.4, 0.4, 0.2}), DeterministicStrategy({0, 1, 0}));
  CHECK(g[0] == doctest::Approx(-0.56).epsilon(1e-14));
  CHECK(g[1] == doctest::Approx(0.24).epsilon(1e-14));
  CHECK(g[2] == doctest::Approx(0.32).epsilon(1e-14));
}

TEST_CASE("field_polytope: one vertex, threshold pair, full tie") {
  GameModel consumer = examples::consumer_choice_model();
  CHECK(field_polytope(consumer, point({0.55, 0.45})).vertices.size() == 1);
  auto [k1, k2] = examples::consumer_choice_thresholds({});
  Vector m = point({k1, 1 - k1});
  FieldPolytope p = field_polytope(consumer, m);
  REQUIRE(p.vertices.size() == 2);
  CHECK(p.vertices[0].strategy == kChangeStay);
  CHECK(p.vertices[1].strategy == kStayStay);
  // (-b m1 + eps m2, b m1 - eps m2) and (-eps m1 + eps m2, eps m1 - eps m2).
  CHECK(p.vertices[0].field[0] == doctest::Approx(-k1 + 0.1 * (1 - k1)));
  CHECK(p.vertices[1].field[0] == doctest::Approx(0.1 * (1 - 2 * k1)));

  nlohmann::ordered_json doc;
  doc["states"] = nlohmann::ordered_json::array({"x", "y"});
  doc["actions"] = nlohmann::ordered_json::array({"a", "b"});
  doc["beta"] = 0.5;
  doc["params"] = nlohmann::ordered_json::object();
  for (const char* a : {"a", "b"}) {
    doc["Q"][a] = nlohmann::ordered_json::array({nlohmann::ordered_json::array({"-1", "1"}),
                                                 nlohmann::ordered_json::array({"m1", "-m1"})});
    doc["r"][a] = nlohmann::ordered_json::array({"m2", "0"});
  }
  GameModel tie = model_from_json(doc);
  FieldPolytope all = field_polytope(tie, point({0.3, 0.7}));
  REQUIRE(all.vertices.size() == 4);
  for (const auto& v : all.vertices) CHECK(v.field == all.vertices[0].field);
}

TEST_CASE("sliding_coefficient") {
  Vector grad = point({1.0, 0.0});
  CHECK(sliding_coefficient(point({1.0, -1.0}), point({-1.0, 1.0}), grad) == 0.5);
  const double lam = sliding_coefficient(point({3.0, -3.0}), point({-1.0, 1.0}), grad);
  CHECK(lam == 0.25);
  CHECK(std::abs((lam * point({3.0, -3.0}) + (1 - lam) * point({-1.0, 1.0})).dot(grad)) <= 1e-15);
  CHECK(sliding_coefficient(point({2.0, -2.0}), point({0.0, 0.0}), grad) == 0.0);
  CHECK_THROWS_AS(sliding_coefficient(point({1.0, -1.0}), point({2.0, -2.0}), grad),
                  TransversalCrossing);
}

TEST_CASE("integrate: equilibrium start stays put") {
  GameModel consumer = examples::consumer_choice_model();
  IntegrateOptions io;
  io.output_times = {1.0, 5.0, 10.0};
  Trajectory tr = integrate(consumer, Distribution(point({0.5, 0.5})), 10.0, io);
  CHECK(tr.termination == Termination::kConverged);
  for (const auto& s : tr.samples) CHECK((s.m - point({0.5, 0.5})).cwiseAbs().maxCoeff() <= 1e-12);
  CHECK(tr.at(10.0) != nullptr);
}

TEST_CASE("integrate: linear regime matches the closed form") {
  GameModel consumer = examples::consumer_choice_model();
  IntegrateOptions io;
  io.output_times = {1.0, 5.0, 20.0};
  Trajectory tr = integrate(consumer, Distribution(point({0.48, 0.52})), 20.0, io);
  for (double t : {1.0, 5.0, 20.0}) {
    const TrajectorySample* s = tr.at(t);
    REQUIRE(s != nullptr);
    CHECK(std::abs(s->m[0] - (0.5 - 0.02 * std::exp(-0.2 * t))) <= 1e-6);
    CHECK(tr.segments[static_cast<std::size_t>(s->segment)].strategy == kStayStay);
  }
  check_invariants(consumer, tr);
}

TEST_CASE("integrate: congestion diagonal start slides along the Riccati solution") {
  GameModel cong = examples::congestion_model();
  IntegrateOptions io;
  io.output_times = {1.0, 5.0, 20.0};
  for (double m1 : {0.05, 0.2, 0.45}) {
    Trajectory tr = integrate(cong, Distribution(point({m1, m1, 1 - 2 * m1})), 20.0, io);
    bool slid = false;
    for (const auto& seg : tr.segments) slid = slid || seg.mode == Mode::kSliding;
    CHECK(slid);
    for (double t : {1.0, 5.0, 20.0}) {
      const TrajectorySample* s = tr.at(t);
      REQUIRE(s != nullptr);
      CHECK(std::abs(s->m[0] - examples::congestion_riccati_reference({}, m1, t)) <= 1e-6);
    }
    // Equal effective change rates in the two good states.
    for (const auto& s : tr.samples) {
      const Segment& seg = tr.segments[static_cast<std::size_t>(s.segment)];
      if (seg.mode != Mode::kSliding) continue;
      auto change = [&](int state) {
        return s.lambda * (seg.strategy[state] == 0) + (1 - s.lambda) * ((*seg.partner)[state] == 0);
      };
      CHECK(std::abs(change(0) - change(1)) <= 1e-8);
    }
    check_invariants(cong, tr);
  }
}

TEST_CASE("integrate: start at the bad vertex follows the common field") {
  // Every tied strategy has the same field at (0,0,1); there is nothing to
  // choose between.
  GameModel cong = examples::congestion_model();
  IntegrateOptions io;
  io.output_times = {1.0, 5.0};
  Trajectory tr = integrate(cong, Distribution(point({0.0, 0.0, 1.0})), 100.0, io);
  CHECK(tr.termination == Termination::kConverged);
  CHECK_FALSE(tr.segments.front().branched);
  for (double t : {1.0, 5.0}) {
    const TrajectorySample* s = tr.at(t);
    REQUIRE(s != nullptr);
    CHECK(std::abs(s->m[0] - examples::congestion_riccati_reference({}, 0.0, t)) <= 1e-6);
  }
  check_invariants(cong, tr);
}

TEST_CASE("integrate: off-diagonal congestion start reaches the surface and converges") {
  GameModel cong = examples::congestion_model();
  Trajectory tr = integrate(cong, Distribution(point({0.2, 0.5, 0.3})), 100.0, {});
  CHECK(tr.termination == Termination::kConverged);
  CHECK(tr.segments.front().mode == Mode::kInterior);
  const double x = examples::congestion_fixed_point();
  CHECK((tr.back().m - point({x, x, 1 - 2 * x})).norm() <= 1e-6);
  check_invariants(cong, tr);
}

TEST_CASE("property: invariants on random starts of both examples") {
  std::mt19937_64 rng(51);
  GameModel consumer = examples::consumer_choice_model();
  GameModel cong = examples::congestion_model();
  for (int n = 0; n < 10; ++n) {
    check_invariants(consumer, integrate(consumer, Distribution(random_simplex_point(2, rng)), 40.0, {}));
    check_invariants(cong, integrate(cong, Distribution(random_simplex_point(3, rng)), 40.0, {}));
  }
}

TEST_CASE("property: halving the tolerances barely moves the endpoint") {
  GameModel consumer = examples::consumer_choice_model();
  GameModel cong = examples::congestion_model();
  IntegrateOptions coarse;
  IntegrateOptions fine;
  fine.atol = fine.rtol = 0.5e-9;
  for (const auto& [model, m0] : std::vector<std::pair<GameModel, Vector>>{
           {consumer, point({0.3, 0.7})}, {consumer, point({0.7, 0.3})},
           {cong, point({0.1, 0.6, 0.3})}}) {
    Trajectory a = integrate(model, Distribution(m0), 3.0, coarse);
    Trajectory b = integrate(model, Distribution(m0), 3.0, fine);
    CHECK((a.back().m - b.back().m).cwiseAbs().maxCoeff() <= 10 * coarse.atol);
  }
}

TEST_CASE("integrate: precondition errors") {
  GameModel consumer = examples::consumer_choice_model();
  CHECK_THROWS_AS(integrate(consumer, Distribution(point({0.5, 0.5})), 0.0, {}), PreconditionError);
  CHECK_THROWS_AS(integrate(consumer, Distribution::uniform(3), 1.0, {}), PreconditionError);
}
