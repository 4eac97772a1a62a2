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

#include "mfg/dynamics.hpp"

#include <algorithm>
#include <cmath>

#include "mfg/errors.hpp"

namespace mfg {

Vector vector_field(const EvaluatedModel& em, const Vector& m,
                    const DeterministicStrategy& d) {
  return em.generator(d).transpose() * m;
}

Vector vector_field(const EvaluatedModel& em, const Vector& m,
                    const MixedStrategy& pi) {
  return em.generator(pi).transpose() * m;
}

Vector vector_field(const GameModel& model, const Vector& m,
                    const DeterministicStrategy& d) {
  return vector_field(model.evaluate(m), m, d);
}

Matrix field_jacobian(const GameModel& model, const Vector& m,
                      const MixedStrategy& pi) {
  const int S = model.state_count();
  const int A = model.action_count();
  EvaluatedModel em = model.evaluate(m);
  Matrix j = em.generator(pi).transpose();
  auto ms = as_span(m);
  auto ps = model.param_values();
  for (int i = 0; i < S; ++i) {
    if (m[i] == 0.0) continue;
    for (int a = 0; a < A; ++a) {
      const double w = m[i] * pi(i, a);
      if (w == 0.0) continue;
      for (int jj = 0; jj < S; ++jj) {
        for (int k = 0; k < S; ++k) {
          const Expr& e = model.rate_derivative(i, jj, a, k);
          if (e.kind() == ExprKind::kNumber && e.value() == 0.0) continue;
          j(jj, k) += w * eval_expr(e, ms, ps);
        }
      }
    }
  }
  return j;
}

Matrix field_jacobian(const GameModel& model, const Vector& m,
                      const DeterministicStrategy& d) {
  return field_jacobian(model, m,
                        MixedStrategy::from(d, model.action_count()));
}

FieldPolytope field_polytope(const GameModel& model, const Vector& m,
                             double tau_opt) {
  EvaluatedModel em = model.evaluate(m);
  BestResponseSet br = best_response(em, model.beta(), tau_opt);
  FieldPolytope out;
  for (auto& d : br.strategies()) {
    Vector f = vector_field(em, m, d);
    out.vertices.push_back({std::move(d), std::move(f)});
  }
  return out;
}

double sliding_coefficient(const Vector& f1, const Vector& f2,
                           const Vector& grad) {
  const double s1 = f1.dot(grad);
  const double s2 = f2.dot(grad);
  if ((s1 > 0 && s2 > 0) || (s1 < 0 && s2 < 0)) {
    throw TransversalCrossing("both fields cross the surface the same way");
  }
  if (s1 == s2) return 0.0;  // both zero: any weight is tangent
  return s2 / (s2 - s1);
}

std::string to_string(Mode mode) {
  switch (mode) {
    case Mode::kInterior: return "interior";
    case Mode::kSliding: return "sliding";
    case Mode::kConverged: return "converged";
  }
  return "unknown";
}

std::string to_string(Termination t) {
  switch (t) {
    case Termination::kHorizon: return "horizon";
    case Termination::kConverged: return "converged";
    case Termination::kStepFailure: return "step-failure";
    case Termination::kUnresolvedBranching: return "unresolved-branching";
  }
  return "unknown";
}

std::string Trajectory::strategy_label(
    const TrajectorySample& s, std::span<const std::string> labels) const {
  const Segment& seg = segments[static_cast<std::size_t>(s.segment)];
  std::string out = seg.strategy.label(labels);
  if (seg.partner) out += "|" + seg.partner->label(labels);
  return out;
}

const TrajectorySample* Trajectory::at(double t) const {
  auto it = std::lower_bound(
      samples.begin(), samples.end(), t,
      [](const TrajectorySample& s, double x) { return s.t < x; });
  if (it == samples.end() || it->t != t) return nullptr;
  return &*it;
}

}  // namespace mfg
