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

#include "mfg/switching.hpp"

#include "mfg/errors.hpp"
#include "mfg/mdp.hpp"

namespace mfg {
namespace {

Vector value_gradient_sum(const GameModel& model, const DeterministicStrategy& d,
                          const Vector& m) {
  const int S = model.state_count();
  EvaluatedModel em = model.evaluate(m);
  Matrix q = em.generator(d);
  Vector v = policy_value(em, model.beta(), d);
  Matrix a = model.beta() * Matrix::Identity(S, S) - q;
  // 1^T dV/dm_k = 1^T A^{-1} (dr/dm_k + dQ/dm_k V) = w^T (...), A^T w = 1.
  Vector w = a.transpose().partialPivLu().solve(Vector::Ones(S));
  auto dq = generator_derivatives(model, m, d);
  auto dr = reward_derivatives(model, m, d);
  Vector out(S);
  for (int k = 0; k < S; ++k) out[k] = w.dot(dr[k] + dq[k] * v);
  return out;
}

}  // namespace

double g_value(const GameModel& model, const DeterministicStrategy& d1,
               const DeterministicStrategy& d2, const Vector& m) {
  if (d1 == d2) return 0.0;
  EvaluatedModel em = model.evaluate(m);
  return (policy_value(em, model.beta(), d2) -
          policy_value(em, model.beta(), d1)).sum();
}

Vector grad_g(const GameModel& model, const DeterministicStrategy& d1,
              const DeterministicStrategy& d2, const Vector& m, double h) {
  if (!(h > 0.0)) throw PreconditionError("finite-difference step must be > 0");
  const int S = model.state_count();
  Vector out = Vector::Zero(S);
  if (d1 == d2) return out;
  for (int k = 0; k < S; ++k) {
    Vector up = m;
    Vector dn = m;
    up[k] += h;
    dn[k] -= h;
    out[k] = (g_value(model, d1, d2, up) - g_value(model, d1, d2, dn)) / (2 * h);
  }
  return out;
}

Vector grad_g_analytic(const GameModel& model, const DeterministicStrategy& d1,
                       const DeterministicStrategy& d2, const Vector& m) {
  if (d1 == d2) return Vector::Zero(model.state_count());
  return value_gradient_sum(model, d2, m) - value_gradient_sum(model, d1, m);
}

}  // namespace mfg
