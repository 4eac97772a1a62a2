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

#include "mfg/report_json.hpp"

#include <cmath>

namespace mfg {
namespace {

Json number(double x) {
  if (std::isfinite(x)) return x;
  if (std::isnan(x)) return nullptr;
  return x > 0 ? "inf" : "-inf";
}

Json eigen_json(const std::vector<EigenCluster>& clusters) {
  Json out = Json::array();
  for (const auto& c : clusters) {
    for (int k = 0; k < c.multiplicity; ++k) {
      out.push_back(Json::array({c.value.real(), c.value.imag()}));
    }
  }
  return out;
}

Json mixed_json(const MixedStrategy& pi, const GameModel& model) {
  Json out = Json::object();
  for (int i = 0; i < pi.state_count(); ++i) {
    Json row = Json::object();
    for (int a = 0; a < pi.action_count(); ++a) {
      row[model.action_labels()[a]] = pi(i, a);
    }
    out[model.state_labels()[i]] = row;
  }
  return out;
}

}  // namespace

Json vector_json(const Vector& v) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(number(v[i]));
  return out;
}

Json to_json(const ValidationReport& r, const GameModel& model) {
  Json out;
  out["ok"] = r.ok();
  out["points_checked"] = r.points_checked;
  out["max_abs_rate"] = number(r.max_abs_rate);
  out["growth_bound"] = number(r.growth_bound);
  Json vs = Json::array();
  for (const auto& v : r.violations) {
    Json j;
    j["kind"] = to_string(v.kind);
    j["from"] = v.from >= 0 ? Json(model.state_labels()[v.from]) : Json(nullptr);
    j["to"] = v.to >= 0 ? Json(model.state_labels()[v.to]) : Json(nullptr);
    j["action"] = v.action >= 0 ? Json(model.action_labels()[v.action]) : Json(nullptr);
    j["m"] = vector_json(v.m);
    j["value"] = number(v.value);
    j["message"] = v.message;
    vs.push_back(std::move(j));
  }
  out["violations"] = std::move(vs);
  return out;
}

Json to_json(const EquilibriumReport& r, const GameModel& model) {
  Json out;
  out["m"] = vector_json(r.m);
  out["strategy"] = r.deterministic
                        ? Json(r.deterministic->label(model.action_labels()))
                        : Json(nullptr);
  out["policy"] = mixed_json(r.strategy, model);
  out["residual"] = number(r.residual);
  out["optimality_margin"] = number(r.optimality_margin);
  out["certified"] = r.certified;
  out["equilibrium"] = r.equilibrium;
  out["unique_best_response"] = r.unique;
  out["best_response_size"] = r.best_response_size;
  if (!r.weights.empty()) {
    Json w = Json::array();
    for (double x : r.weights) w.push_back(number(x));
    out["weights"] = std::move(w);
    out["family"] = r.family;
    out["family_parameter"] = number(r.family_parameter);
  }
  return out;
}

Json to_json(const ExplicitDelta& d) {
  Json out;
  out["delta"] = number(d.delta);
  out["epsilon_radius"] = number(d.epsilon_radius);
  out["eigenvalues"] = eigen_json(d.clusters);
  Json c = Json::array();
  for (double x : d.constants) c.push_back(number(x));
  out["constants"] = std::move(c);
  out["min_basis_norm"] = number(d.min_basis_norm);
  return out;
}

Json to_json(const StabilityReport& r, const GameModel& model) {
  Json out;
  out["m"] = vector_json(r.m);
  out["strategy"] = r.strategy.label(model.action_labels());
  out["classification"] = to_string(r.classification);
  out["reason"] = r.reason;
  out["unique_best_response"] = r.unique;
  out["epsilon_radius"] = number(r.epsilon_radius);
  out["eigenvalues"] = eigen_json(r.eigenvalues);
  out["zero_eigenvalues"] = r.zero_eigenvalues;
  out["zero_alignment"] = number(r.zero_alignment);
  Json emp;
  emp["ran"] = r.empirical_ran;
  emp["passed"] = r.empirical_passed;
  emp["max_final_distance"] = number(r.empirical_max_distance);
  out["empirical"] = std::move(emp);
  out["explicit_delta"] = r.delta ? to_json(*r.delta) : Json(nullptr);
  return out;
}

Json to_json(const GlobalCheckReport& r) {
  Json out;
  out["case"] = to_string(r.label);
  out["samples"] = r.samples.size();
  out["chords_tried"] = r.chords_tried;
  out["kink_samples"] = r.kink_samples;
  Json vs = Json::array();
  for (const auto& v : r.violations) vs.push_back(v);
  out["violations"] = std::move(vs);
  Json pts = Json::array();
  for (const auto& s : r.samples) {
    Json j;
    j["m"] = vector_json(s.m);
    j["g"] = number(s.g);
    j["grad"] = vector_json(s.grad);
    j["s1"] = number(s.s1);
    j["s2"] = number(s.s2);
    if (s.near_kink) j["near_kink"] = true;
    pts.push_back(std::move(j));
  }
  out["surface"] = std::move(pts);
  return out;
}

Json trajectory_summary(const Trajectory& traj, const GameModel& model,
                        const std::vector<EquilibriumReport>& equilibria,
                        double radius) {
  Json out;
  const TrajectorySample& end = traj.back();
  out["t_final"] = number(end.t);
  out["m_final"] = vector_json(end.m);
  out["mode_final"] = to_string(traj.mode_of(end));
  out["strategy_final"] = traj.strategy_label(end, model.action_labels());
  out["termination"] = to_string(traj.termination);
  if (!traj.message.empty()) out["message"] = traj.message;
  out["steps"] = traj.steps;
  int branched = 0;
  for (const auto& s : traj.segments) branched += s.branched ? 1 : 0;
  out["segments"] = traj.segments.size();
  out["branched_segments"] = branched;
  const EquilibriumReport* best = nullptr;
  double best_dist = radius;
  for (const auto& e : equilibria) {
    const double d = (e.m - end.m).norm();
    if (d <= best_dist) {
      best_dist = d;
      best = &e;
    }
  }
  if (best) {
    Json n;
    n["m"] = vector_json(best->m);
    n["strategy"] = best->deterministic
                        ? Json(best->deterministic->label(model.action_labels()))
                        : Json(nullptr);
    n["distance"] = best_dist;
    out["nearest_equilibrium"] = std::move(n);
  } else {
    out["nearest_equilibrium"] = nullptr;
  }
  return out;
}

}  // namespace mfg
