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
#include "mfg/errors.hpp"
#include "mfg/switching.hpp"

using namespace mfg;

namespace {

Vector point(std::initializer_list<double> xs) {
  Vector v(static_cast<Eigen::Index>(xs.size()));
  int i = 0;
  for (double x : xs) v[i++] = x;
  return v;
}

// Sign change of g(d1, d2) along m1 found by scanning, refined by bisection.
double threshold_by_bisection(const GameModel& model, const DeterministicStrategy& d1,
                              const DeterministicStrategy& d2) {
  auto g = [&](double m1) { return g_value(model, d1, d2, point({m1, 1 - m1})); };
  double prev = 1e-3;
  for (int k = 1; k <= 1000; ++k) {
    const double x = 1e-3 + (1 - 2e-3) * k / 1000.0;
    if ((g(prev) < 0) != (g(x) < 0)) {
      double lo = prev, hi = x;
      const bool neg_lo = g(lo) < 0;
      for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
        const double mid = 0.5 * (lo + hi);
        ((g(mid) < 0) == neg_lo ? lo : hi) = mid;
      }
      return 0.5 * (lo + hi);
    }
    prev = x;
  }
  return std::numeric_limits<double>::quiet_NaN();
}

double logistic(double x) { return 1.0 / (1.0 + std::exp(-x)); }

// Classical RK4 on the scalar Riccati equation with a tiny fixed step.
double riccati_rk4(double m1, double t, double e, double eps, double lambda) {
  auto f = [&](double x) { return -e * x * x - (eps + 2 * lambda) * x + lambda; };
  const int n = 200000;
  const double h = t / n;
  for (int k = 0; k < n; ++k) {
    const double k1 = f(m1);
    const double k2 = f(m1 + 0.5 * h * k1);
    const double k3 = f(m1 + 0.5 * h * k2);
    const double k4 = f(m1 + h * k3);
    m1 += h / 6 * (k1 + 2 * k2 + 2 * k3 + k4);
  }
  return m1;
}

}  // namespace

TEST_CASE("consumer_choice_model: displayed rates and rewards") {
  GameModel model = examples::consumer_choice_model();
  CHECK(model.state_count() == 2);
  CHECK(model.action_labels() == std::vector<std::string>{"change", "stay"});
  EvaluatedModel em = model.evaluate(point({0.5, 0.5}));
  CHECK(em.rates[0](0, 1) == 1.0);
  CHECK(em.rates[0](1, 0) == 1.0);
  CHECK(em.rates[0].rowwise().sum().cwiseAbs().maxCoeff() == 0.0);
  CHECK(em.rates[1](0, 1) == 0.1);
  CHECK(em.rewards(0, 1) == doctest::Approx(std::log(0.5)).epsilon(1e-15));
  CHECK(validate_model(model, 1000).ok());
}

TEST_CASE("consumer_choice parameters are checked") {
  examples::ConsumerChoiceParams p;
  p.eps = 1.5;
  CHECK_THROWS_AS(examples::consumer_choice_model(p), ModelError);
  p = {};
  p.delta = 0.0;
  CHECK_THROWS_AS(examples::consumer_choice_model(p), ModelError);
  p = {};
  p.beta = 1.0;
  CHECK_THROWS_AS(examples::consumer_choice_model(p), ModelError);
  CHECK_THROWS_AS(examples::example_model("consumer-choice", {{"nope", 1.0}}), ModelError);
  CHECK_THROWS_AS(examples::example_model("corruption"), ModelError);
  GameModel tuned = examples::example_model("consumer-choice", {{"c", 0.3}});
  CHECK(tuned.param_values()[*tuned.param_index("c")] == 0.3);
}

TEST_CASE("consumer_choice_thresholds: closed forms") {
  examples::ConsumerChoiceParams zero;
  zero.c = 0.0;
  auto [a, b] = examples::consumer_choice_thresholds(zero);
  CHECK(a == 0.5);
  CHECK(b == 0.5);
  auto [k1, k2] = examples::consumer_choice_thresholds({});
  CHECK(k1 == doctest::Approx(logistic(-0.2 * 0.7 / 0.9)).epsilon(1e-15));
  CHECK(k1 == doctest::Approx(0.46120).epsilon(1e-5));
  CHECK(k2 == doctest::Approx(0.53880).epsilon(1e-5));
}

TEST_CASE("property: thresholds agree with the value-function bisection") {
  std::vector<examples::ConsumerChoiceParams> grid(5);
  grid[1].c = 0.5;
  grid[2].b = 1.5;
  grid[2].eps = 0.2;
  grid[3].s1 = 0.1;
  grid[3].s2 = 0.3;
  grid[4].beta = 0.8;
  grid[4].c = 0.1;
  for (const auto& p : grid) {
    GameModel model = examples::consumer_choice_model(p);
    auto [k1, k2] = examples::consumer_choice_thresholds(p);
    CHECK(std::abs(threshold_by_bisection(model, DeterministicStrategy({0, 1}), DeterministicStrategy({1, 1})) - k1) <= 1e-6);
    CHECK(std::abs(threshold_by_bisection(model, DeterministicStrategy({1, 0}), DeterministicStrategy({1, 1})) - k2) <= 1e-6);
  }
}

TEST_CASE("congestion_model: rates, rewards, symmetry") {
  GameModel model = examples::congestion_model();
  CHECK(validate_model(model, 1000).ok());
  std::mt19937_64 rng(81);
  for (int n = 0; n < 100; ++n) {
    Vector m = random_simplex_point(3, rng);
    EvaluatedModel em = model.evaluate(m);
    for (int a = 0; a < 2; ++a) {
      CHECK(em.rewards(0, a) == 1.0);
      CHECK(em.rewards(1, a) == 1.0);
      CHECK(em.rewards(2, a) == 0.0);
    }
    // Swapping the two good states maps the model to itself.
    Vector swapped = point({m[1], m[0], m[2]});
    EvaluatedModel es = model.evaluate(swapped);
    Eigen::PermutationMatrix<3> p;
    p.indices() << 1, 0, 2;
    for (int a = 0; a < 2; ++a) {
      CHECK((p * em.rates[a] * p.transpose() - es.rates[a]).cwiseAbs().maxCoeff() <= 1e-15);
    }
  }
  examples::CongestionParams bad;
  bad.lambda = 0.0;
  CHECK_THROWS_AS(examples::congestion_model(bad), ModelError);
}

TEST_CASE("congestion_riccati_reference") {
  examples::CongestionParams p;
  CHECK(examples::congestion_riccati_reference(p, 0.2, 0.0) == 0.2);
  const double root = (-(0.5 + 2) + std::sqrt(2.5 * 2.5 + 4)) / 2;
  CHECK(root == doctest::Approx(0.35078).epsilon(1e-5));
  CHECK(examples::congestion_fixed_point(p) == doctest::Approx(root).epsilon(1e-15));
  CHECK(std::abs(examples::congestion_riccati_reference(p, 0.05, 200.0) - root) <= 1e-14);
  CHECK(std::abs(examples::congestion_riccati_reference(p, 0.1, 2.0) - riccati_rk4(0.1, 2.0, 1, 0.5, 1)) <=
        1e-12);
  for (double m0 : {0.0, 0.25, root, 0.5}) {
    for (double t : {0.5, 3.0}) {
      CHECK(std::abs(examples::congestion_riccati_reference(p, m0, t) - riccati_rk4(m0, t, 1, 0.5, 1)) <= 1e-12);
    }
  }
  CHECK_THROWS_AS(examples::congestion_riccati_reference(p, 0.6, 1.0), PreconditionError);
}
