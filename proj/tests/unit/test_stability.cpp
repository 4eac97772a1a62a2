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
#include <random>
#include <unsupported/Eigen/MatrixFunctions>

#include "generators.hpp"
#include "mfg/builtin.hpp"
#include "mfg/dynamics.hpp"
#include "mfg/equilibrium.hpp"
#include "mfg/errors.hpp"
#include "mfg/model_io.hpp"
#include "mfg/stability.hpp"
#include "mfg/switching.hpp"

using namespace mfg;

namespace {

const DeterministicStrategy kChangeStay({0, 1});
const DeterministicStrategy kStayStay({1, 1});
// Congestion pair: d1 changes in good1, d2 in good2.
const DeterministicStrategy kSC({1, 0, 0});
const DeterministicStrategy kCS({0, 1, 0});

Vector point(std::initializer_list<double> xs) {
  Vector v(static_cast<Eigen::Index>(xs.size()));
  int i = 0;
  for (double x : xs) v[i++] = x;
  return v;
}

GameModel constant_chain(const Matrix& q) {
  const int S = static_cast<int>(q.rows());
  nlohmann::ordered_json doc;
  auto states = nlohmann::ordered_json::array();
  for (int i = 0; i < S; ++i) states.push_back("s" + std::to_string(i));
  doc["states"] = states;
  doc["actions"] = nlohmann::ordered_json::array({"only"});
  doc["beta"] = 0.5;
  doc["params"] = nlohmann::ordered_json::object();
  auto rows = nlohmann::ordered_json::array();
  auto r = nlohmann::ordered_json::array();
  for (int i = 0; i < S; ++i) {
    auto row = nlohmann::ordered_json::array();
    for (int j = 0; j < S; ++j) row.push_back(format_double(q(i, j)));
    rows.push_back(row);
    r.push_back("0");
  }
  doc["Q"]["only"] = rows;
  doc["r"]["only"] = r;
  return model_from_json(doc);
}

EquilibriumReport only_equilibrium(const GameModel& model, const DeterministicStrategy& d) {
  auto pi = MixedStrategy::from(d, model.action_count());
  auto roots = stationary_distribution(model, pi);
  REQUIRE(roots.size() == 1);
  EquilibriumReport r = assess_equilibrium(model, roots[0].values(), pi);
  r.deterministic = d;
  return r;
}

Matrix fd_jacobian(const GameModel& model, const DeterministicStrategy& d, const Vector& m) {
  const int S = model.state_count();
  const double h = 1e-6;
  Matrix j(S, S);
  for (int k = 0; k < S; ++k) {
    Vector mp = m, mm = m;
    mp[k] += h;
    mm[k] -= h;
    j.col(k) = (vector_field(model, mp, d) - vector_field(model, mm, d)) / (2 * h);
  }
  return j;
}

}  // namespace

TEST_CASE("g_value: identical pair, symmetry, threshold") {
  GameModel cong = examples::congestion_model();
  CHECK(g_value(cong, kSC, kSC, point({0.2, 0.3, 0.5})) == 0.0);
  CHECK(std::abs(g_value(cong, kSC, kCS, point({0.3, 0.3, 0.4}))) <= 1e-12);

  GameModel consumer = examples::consumer_choice_model();
  auto [k1, k2] = examples::consumer_choice_thresholds({});
  auto g = [&](double m1) { return g_value(consumer, kChangeStay, kStayStay, point({m1, 1 - m1})); };
  CHECK(g(0.3) < 0);
  CHECK(g(0.6) > 0);
  double lo = 0.3, hi = 0.6;
  for (int it = 0; it < 100; ++it) {
    const double mid = 0.5 * (lo + hi);
    (g(mid) < 0 ? lo : hi) = mid;
  }
  CHECK(std::abs(lo - k1) <= 1e-8);
  (void)k2;
}

TEST_CASE("grad_g: identical pair, diagonal direction, linear model") {
  GameModel cong = examples::congestion_model();
  CHECK(grad_g(cong, kSC, kSC, point({0.2, 0.3, 0.5})).norm() == 0.0);
  Vector gr = grad_g(cong, kSC, kCS, point({0.3, 0.3, 0.4}));
  Vector dir = point({1.0, -1.0, 0.0}).normalized();
  const double cosine = std::abs(gr.normalized().dot(dir));
  CHECK(std::acos(std::min(1.0, cosine)) <= 1e-4);

  // Constant rates, affine rewards: dg/dm_k = 1'(A2^{-1} dr2/dm_k - A1^{-1} dr1/dm_k).
  nlohmann::ordered_json doc;
  doc["states"] = nlohmann::ordered_json::array({"x", "y"});
  doc["actions"] = nlohmann::ordered_json::array({"a", "b"});
  doc["beta"] = 0.5;
  doc["params"] = nlohmann::ordered_json::object();
  doc["Q"]["a"] = nlohmann::ordered_json::array({nlohmann::ordered_json::array({"-1", "1"}),
                                                 nlohmann::ordered_json::array({"0.5", "-0.5"})});
  doc["Q"]["b"] = nlohmann::ordered_json::array({nlohmann::ordered_json::array({"-0.2", "0.2"}),
                                                 nlohmann::ordered_json::array({"2", "-2"})});
  doc["r"]["a"] = nlohmann::ordered_json::array({"1 + 2*m1", "m2"});
  doc["r"]["b"] = nlohmann::ordered_json::array({"3*m1", "1 - m2"});
  GameModel lin = model_from_json(doc);
  auto inv2 = [](double a, double b, double c, double d) {
    Matrix m(2, 2);
    m << d, -b, -c, a;
    return Matrix(m / (a * d - b * c));
  };
  Matrix a1 = inv2(0.5 + 1, -1, -0.5, 0.5 + 0.5);
  Matrix a2 = inv2(0.5 + 0.2, -0.2, -2, 0.5 + 2);
  Vector ones = Vector::Ones(2);
  Vector expect(2);
  expect[0] = ones.dot(a2 * point({3, 0}) - a1 * point({2, 0}));
  expect[1] = ones.dot(a2 * point({0, -1}) - a1 * point({0, 1}));
  DeterministicStrategy aa({0, 0}), bb({1, 1});
  Vector m = point({0.35, 0.65});
  CHECK((grad_g(lin, aa, bb, m) - expect).cwiseAbs().maxCoeff() <= 1e-5);
  CHECK((grad_g_analytic(lin, aa, bb, m) - expect).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("property: implicit and finite-difference gradients agree") {
  std::mt19937_64 rng(71);
  for (int n = 0; n < 50; ++n) {
    GameModel model = testing::random_affine_model(rng, 3, 2);
    Vector m = random_simplex_point(3, rng);
    DeterministicStrategy d1({0, 1, 0}), d2({1, 1, 1});
    Vector fd = grad_g(model, d1, d2, m);
    Vector an = grad_g_analytic(model, d1, d2, m);
    CHECK((fd - an).cwiseAbs().maxCoeff() <= 1e-6 * (1 + an.cwiseAbs().maxCoeff()));
  }
}

TEST_CASE("jacobian_f: constant generator, congestion, column sums") {
  GameModel consumer = examples::consumer_choice_model();
  Vector m = point({0.3, 0.7});
  Matrix j = jacobian_f(consumer, kStayStay, m);
  Matrix qt = consumer.evaluate(m).generator(kStayStay).transpose();
  CHECK(j == qt);
  CHECK(j.colwise().sum().cwiseAbs().maxCoeff() == 0.0);

  GameModel cong = examples::congestion_model();
  DeterministicStrategy stay({1, 1, 1});
  Vector bary = Vector::Constant(3, 1.0 / 3);
  Matrix jc = jacobian_f(cong, stay, bary);
  CHECK((jc - fd_jacobian(cong, stay, bary)).cwiseAbs().maxCoeff() <= 1e-6);
}

TEST_CASE("property: symbolic Jacobians match finite differences") {
  std::mt19937_64 rng(72);
  for (const auto& model : {examples::consumer_choice_model(), examples::congestion_model()}) {
    const int S = model.state_count();
    for (int n = 0; n < 50; ++n) {
      Vector m = 0.9 * random_simplex_point(S, rng) + Vector::Constant(S, 0.1 / S);
      auto d = DeterministicStrategy::from_index(
          static_cast<std::uint64_t>(testing::uniform_int(rng, 0, (1 << S) - 1)), S, 2);
      Matrix j = jacobian_f(model, d, m);
      const double norm = j.cwiseAbs().rowwise().sum().maxCoeff();
      CHECK((j - fd_jacobian(model, d, m)).cwiseAbs().maxCoeff() <= 1e-6 * (1 + norm));
    }
  }
}

TEST_CASE("cluster_eigenvalues groups repeated roots") {
  Matrix q(3, 3);
  q << -1, 1, 0, 0, -1, 1, 4, 0, -4;
  auto c = cluster_eigenvalues(q.transpose());
  REQUIRE(c.size() == 2);
  CHECK(std::abs(c[0].value) <= 1e-9);
  CHECK(c[1].multiplicity == 2);
  CHECK(c[1].value.real() == doctest::Approx(-3.0).epsilon(1e-6));
}

TEST_CASE("local_check: consumer (stay,stay)") {
  GameModel model = examples::consumer_choice_model();
  EquilibriumReport r = only_equilibrium(model, kStayStay);
  StabilityReport st = local_check(model, r);
  CHECK(st.unique);
  CHECK(st.classification == LocalClass::kLocallyConvergent);
  REQUIRE(st.eigenvalues.size() == 2);
  CHECK(std::abs(st.eigenvalues[0].value) <= 1e-12);
  CHECK(st.eigenvalues[1].value.real() == doctest::Approx(-0.2).epsilon(1e-12));
  CHECK(st.zero_eigenvalues == 1);
  CHECK(st.zero_alignment <= 1e-6);
  CHECK(st.empirical_ran);
  CHECK(st.empirical_passed);
  // D(m) stays {(stay,stay)} up to the threshold: distance sqrt(2) (1/2 - k1).
  auto [k1, k2] = examples::consumer_choice_thresholds({});
  CHECK(st.epsilon_radius <= std::sqrt(2.0) * (0.5 - k1) + 1e-9);
  CHECK(st.epsilon_radius >= 0.9 * std::sqrt(2.0) * (0.5 - k1));
  REQUIRE(st.delta.has_value());
  CHECK(st.delta->delta == doctest::Approx(st.epsilon_radius / 2).epsilon(1e-12));
  (void)k2;
}

TEST_CASE("local_check: non-unique best response fails") {
  GameModel cong = examples::congestion_model();
  DeterministicSearch s = find_deterministic_equilibria(cong);
  REQUIRE_FALSE(s.equilibria.empty());
  for (const auto& r : s.equilibria) {
    StabilityReport st = local_check(cong, r);
    CHECK(st.classification == LocalClass::kFailsUniqueness);
    CHECK_FALSE(st.unique);
  }
}

TEST_CASE("local_check: reducible constant chain is inconclusive") {
  GameModel model = load_model(std::filesystem::path(TEST_DATA_DIR) / "reducible.json");
  DeterministicSearch s = find_deterministic_equilibria(model);
  REQUIRE_FALSE(s.equilibria.empty());
  for (const auto& r : s.equilibria) {
    StabilityReport st = local_check(model, r);
    CHECK(st.zero_eigenvalues == 2);
    CHECK(st.classification == LocalClass::kInconclusive);
    CHECK_FALSE(st.delta.has_value());
    CHECK_THROWS_AS(explicit_delta(model, r, 0.1), PreconditionError);
  }
}

TEST_CASE("explicit_delta: consumer and a birth-death chain") {
  GameModel model = examples::consumer_choice_model();
  ExplicitDelta d = explicit_delta(model, only_equilibrium(model, kStayStay), 0.04);
  REQUIRE(d.clusters.size() == 1);
  CHECK(d.clusters[0].value.real() == doctest::Approx(-0.2));
  REQUIRE(d.constants.size() == 1);
  CHECK(d.constants[0] == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(d.delta == doctest::Approx(0.02).epsilon(1e-14));

  Matrix q(3, 3);
  q << -1, 1, 0, 1, -2, 1, 0, 1, -1;
  GameModel chain = constant_chain(q);
  ExplicitDelta bd = explicit_delta(chain, only_equilibrium(chain, DeterministicStrategy({0, 0, 0})), 0.1);
  REQUIRE(bd.clusters.size() == 2);
  CHECK(bd.clusters[0].value.real() == doctest::Approx(-1.0));
  CHECK(bd.clusters[1].value.real() == doctest::Approx(-3.0));
  for (double c : bd.constants) CHECK(c == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(bd.delta == doctest::Approx(0.05).epsilon(1e-12));

  CHECK_THROWS_AS(explicit_delta(examples::congestion_model(),
                                 only_equilibrium(examples::congestion_model(), DeterministicStrategy({1, 1, 1})),
                                 0.1),
                  PreconditionError);
}

TEST_CASE("explicit_delta: defective generator, checked against the matrix exponential") {
  Matrix q(3, 3);
  q << -1, 1, 0, 0, -1, 1, 4, 0, -4;
  GameModel chain = constant_chain(q);
  const double eps = 0.1;
  EquilibriumReport r = only_equilibrium(chain, DeterministicStrategy({0, 0, 0}));
  ExplicitDelta d = explicit_delta(chain, r, eps);
  REQUIRE(d.clusters.size() == 1);
  CHECK(d.clusters[0].multiplicity == 2);
  // The Jordan block adds an l = 1 term, so some constant exceeds 1.
  CHECK(*std::max_element(d.constants.begin(), d.constants.end()) > 1.0 + 1e-6);
  CHECK(d.delta < eps / 2);
  // Every linear trajectory from within delta stays inside eps.
  Matrix mt = q.transpose();
  std::mt19937_64 rng(73);
  double worst = 0.0;
  for (int n = 0; n < 50; ++n) {
    Vector x = d.delta * random_tangent_direction(3, rng);
    for (int k = 0; k <= 400; ++k) {
      Matrix e = (mt * (0.025 * k)).exp();
      worst = std::max(worst, (e * x).norm());
    }
  }
  CHECK(worst <= eps);
  // And the nonlinear integrator agrees with the exponential.
  Vector x = d.delta * random_tangent_direction(3, rng);
  IntegrateOptions io;
  io.output_times = {1.0, 3.0};
  Trajectory tr = integrate(chain, Distribution(r.m + x), 3.0, io);
  for (double t : {1.0, 3.0}) {
    Vector lin = r.m + (mt * t).exp() * x;
    CHECK((tr.at(t)->m - lin).cwiseAbs().maxCoeff() <= 1e-8);
  }
}

TEST_CASE("global_check: congestion is case (iii) with 2 b m2 inner products") {
  GameModel cong = examples::congestion_model();
  GlobalCheckReport g = global_check(cong, kSC, kCS, {});
  CHECK(g.label == GlobalCase::kCaseIII);
  CHECK(g.violations.empty());
  REQUIRE(g.samples.size() == 200);
  for (const auto& s : g.samples) {
    CHECK(std::abs(s.m[0] - s.m[1]) <= 1e-9);
    const double kappa = 0.5 * (s.grad[0] - s.grad[1]);
    CHECK(std::abs(s.s1 / kappa - 2 * s.m[1]) <= 1e-8);
    CHECK(std::abs(s.s2 / kappa - 2 * s.m[1]) <= 1e-8);
    // The Filippov field is tangent to the surface.
    EvaluatedModel em = cong.evaluate(s.m);
    Vector f1 = vector_field(em, s.m, kSC);
    Vector f2 = vector_field(em, s.m, kCS);
    if (s.s1 > 0 || s.s2 > 0) {
      const double lam = sliding_coefficient(f1, f2, s.grad);
      CHECK(std::abs((lam * f1 + (1 - lam) * f2).dot(s.grad)) <= 1e-8);
    }
  }
}

TEST_CASE("global_check: implicit gradient gives the same verdict") {
  GlobalCheckOptions o;
  o.gradient = GradientMethod::kImplicit;
  o.n_samples = 50;
  GlobalCheckReport g = global_check(examples::congestion_model(), kSC, kCS, o);
  CHECK(g.label == GlobalCase::kCaseIII);
}

TEST_CASE("global_check: consumer threshold surface") {
  GameModel model = examples::consumer_choice_model();
  auto [k1, k2] = examples::consumer_choice_thresholds({});
  GlobalCheckOptions o;
  o.n_samples = 20;
  GlobalCheckReport g = global_check(model, kChangeStay, kStayStay, o);
  REQUIRE(g.samples.size() == 20);
  for (const auto& s : g.samples) {
    CHECK(std::abs(s.m[0] - k1) <= 1e-8);
    Vector grad = grad_g(model, kChangeStay, kStayStay, s.m);
    CHECK(s.s1 == doctest::Approx(vector_field(model, s.m, kChangeStay).dot(grad)));
    CHECK(s.s2 == doctest::Approx(-vector_field(model, s.m, kStayStay).dot(grad)));
    // Both fields point away from the surface: repelling, no case applies.
    CHECK(s.s1 < 0);
    CHECK(s.s2 < 0);
  }
  CHECK(g.label == GlobalCase::kNone);
  CHECK(g.violations.size() == 20);
  (void)k2;
}

TEST_CASE("global_check: dominant strategy has no surface") {
  nlohmann::ordered_json doc;
  doc["states"] = nlohmann::ordered_json::array({"x", "y"});
  doc["actions"] = nlohmann::ordered_json::array({"a", "b"});
  doc["beta"] = 0.5;
  doc["params"] = nlohmann::ordered_json::object();
  for (const char* a : {"a", "b"}) {
    doc["Q"][a] = nlohmann::ordered_json::array({nlohmann::ordered_json::array({"-1", "1"}),
                                                 nlohmann::ordered_json::array({"1", "-1"})});
  }
  doc["r"]["a"] = nlohmann::ordered_json::array({"m1", "m2"});
  doc["r"]["b"] = nlohmann::ordered_json::array({"m1 + 1", "m2 + 1"});
  GlobalCheckOptions o;
  o.n_samples = 10;
  GlobalCheckReport g = global_check(model_from_json(doc), DeterministicStrategy({0, 0}),
                                     DeterministicStrategy({1, 1}), o);
  CHECK(g.label == GlobalCase::kSurfaceNotFound);
  CHECK(g.chords_tried == 100);
  CHECK(g.samples.empty());
}

TEST_CASE("global_check: identical strategies are rejected") {
  CHECK_THROWS_AS(global_check(examples::congestion_model(), kSC, kSC, {}), PreconditionError);
}
