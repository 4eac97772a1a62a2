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

#include "mfg/builtin.hpp"

#include <cmath>

#include <json.hpp>

#include "mfg/errors.hpp"
#include "mfg/model_io.hpp"

namespace mfg::examples {
namespace {

using Json = nlohmann::ordered_json;

double logistic(double x) { return 1.0 / (1.0 + std::exp(-x)); }

}  // namespace

void check(const ConsumerChoiceParams& p) {
  if (!(p.eps > 0.0 && p.b > p.eps)) {
    throw ModelError("consumer-choice needs b > eps > 0");
  }
  if (!(p.c >= 0.0) || !(p.s1 >= 0.0) || !(p.s2 >= 0.0)) {
    throw ModelError("consumer-choice needs c, s1, s2 >= 0");
  }
  if (!(p.delta > 0.0)) throw ModelError("consumer-choice needs delta > 0");
  if (!(p.beta > 0.0 && p.beta < 1.0)) {
    throw ModelError("beta must lie in (0,1)");
  }
}

void check(const CongestionParams& p) {
  if (!(p.b > 0.0 && p.e > 0.0 && p.eps > 0.0 && p.lambda > 0.0)) {
    throw ModelError("congestion needs b, e, eps, lambda > 0");
  }
  if (!(p.beta > 0.0 && p.beta < 1.0)) {
    throw ModelError("beta must lie in (0,1)");
  }
}

GameModel consumer_choice_model(const ConsumerChoiceParams& p) {
  check(p);
  const std::string d = format_double(p.delta);
  Json doc;
  doc["states"] = Json::array({"provider1", "provider2"});
  doc["actions"] = Json::array({"change", "stay"});
  doc["beta"] = p.beta;
  doc["params"] = {{"b", p.b}, {"eps", p.eps}, {"c", p.c},
                   {"s1", p.s1}, {"s2", p.s2}};
  doc["Q"]["change"] = Json::array({Json::array({"-b", "b"}), Json::array({"b", "-b"})});
  doc["Q"]["stay"] = Json::array({Json::array({"-eps", "eps"}), Json::array({"eps", "-eps"})});
  doc["r"]["change"] = Json::array({"slog(m1, " + d + ") + s1 - c",
                        "slog(m2, " + d + ") + s2 - c"});
  doc["r"]["stay"] =
      Json::array({"slog(m1, " + d + ") + s1", "slog(m2, " + d + ") + s2"});
  return model_from_json(doc);
}

GameModel congestion_model(const CongestionParams& p) {
  check(p);
  Json doc;
  doc["states"] = Json::array({"good1", "good2", "bad"});
  doc["actions"] = Json::array({"change", "stay"});
  doc["beta"] = p.beta;
  doc["params"] = {{"b", p.b}, {"e", p.e}, {"eps", p.eps},
                   {"lambda", p.lambda}};
  doc["Q"]["change"] =
      Json::array({Json::array({"-(b + e*m1 + eps)", "b", "e*m1 + eps"}),
                   Json::array({"b", "-(b + e*m2 + eps)", "e*m2 + eps"}),
                   Json::array({"lambda", "lambda", "-2*lambda"})});
  doc["Q"]["stay"] =
      Json::array({Json::array({"-(e*m1 + eps)", "0", "e*m1 + eps"}),
                   Json::array({"0", "-(e*m2 + eps)", "e*m2 + eps"}),
                   Json::array({"lambda", "lambda", "-2*lambda"})});
  doc["r"]["change"] = Json::array({"1", "1", "0"});
  doc["r"]["stay"] = Json::array({"1", "1", "0"});
  return model_from_json(doc);
}

std::pair<double, double> consumer_choice_thresholds(
    const ConsumerChoiceParams& p) {
  check(p);
  const double x = p.c * (p.beta + 2.0 * p.eps) / (p.b - p.eps);
  return {logistic(-x - p.s1 + p.s2), logistic(x - p.s1 + p.s2)};
}

double congestion_fixed_point(const CongestionParams& p) {
  check(p);
  const double k = p.eps + 2.0 * p.lambda;
  // Positive root of e m^2 + k m - lambda, written to avoid cancellation.
  return 2.0 * p.lambda / (k + std::sqrt(k * k + 4.0 * p.e * p.lambda));
}

double congestion_riccati_reference(const CongestionParams& p, double m1_0,
                                    double t) {
  check(p);
  if (!(m1_0 >= 0.0 && m1_0 <= 0.5)) {
    throw PreconditionError("diagonal start needs m1_0 in [0, 1/2]");
  }
  if (t == 0.0) return m1_0;
  // m' = -e (m - r_plus)(m - r_minus); (m - r+)/(m - r-) decays like
  // exp(-e (r+ - r-) t).
  const double k = p.eps + 2.0 * p.lambda;
  const double root = std::sqrt(k * k + 4.0 * p.e * p.lambda);
  const double rp = congestion_fixed_point(p);
  const double rm = (-k - root) / (2.0 * p.e);
  const double c = (m1_0 - rp) / (m1_0 - rm);
  const double decay = std::exp(-root * t);  // e (r+ - r-) = root
  return (rp - rm * c * decay) / (1.0 - c * decay);
}

std::vector<std::string> example_names() {
  return {"consumer-choice", "congestion"};
}

GameModel example_model(const std::string& name,
                        const std::map<std::string, double>& overrides) {
  auto apply = [&](auto& params, auto&& slot) {
    for (const auto& [key, value] : overrides) {
      double* target = slot(key);
      if (!target) {
        throw ModelError("example '" + name + "' has no parameter '" + key +
                         "'");
      }
      *target = value;
    }
    return params;
  };
  if (name == "consumer-choice") {
    ConsumerChoiceParams p;
    apply(p, [&](const std::string& k) -> double* {
      if (k == "b") return &p.b;
      if (k == "eps") return &p.eps;
      if (k == "beta") return &p.beta;
      if (k == "c") return &p.c;
      if (k == "s1") return &p.s1;
      if (k == "s2") return &p.s2;
      if (k == "delta") return &p.delta;
      return nullptr;
    });
    return consumer_choice_model(p);
  }
  if (name == "congestion") {
    CongestionParams p;
    apply(p, [&](const std::string& k) -> double* {
      if (k == "b") return &p.b;
      if (k == "e") return &p.e;
      if (k == "eps") return &p.eps;
      if (k == "lambda") return &p.lambda;
      if (k == "beta") return &p.beta;
      return nullptr;
    });
    return congestion_model(p);
  }
  throw ModelError("unknown example '" + name + "'");
}

}  // namespace mfg::examples
