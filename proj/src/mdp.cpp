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

#include "mfg/mdp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mfg/errors.hpp"

namespace mfg {
namespace {

Vector solve_value(const Matrix& q, const Vector& r, double beta) {
  const int S = static_cast<int>(q.rows());
  Matrix a = beta * Matrix::Identity(S, S) - q;
  Eigen::PartialPivLU<Matrix> lu(a);
  Vector v = lu.solve(r);
  if (!v.allFinite() || std::abs(lu.determinant()) < 1e-300) {
    throw SolverError("policy value system is singular");
  }
  return v;
}

}  // namespace

Vector policy_value(const EvaluatedModel& em, double beta,
                    const DeterministicStrategy& d) {
  return solve_value(em.generator(d), em.reward(d), beta);
}

Vector policy_value(const EvaluatedModel& em, double beta,
                    const MixedStrategy& pi) {
  return solve_value(em.generator(pi), em.reward(pi), beta);
}

Vector policy_value(const GameModel& model, const Vector& m,
                    const DeterministicStrategy& d) {
  return policy_value(model.evaluate(m), model.beta(), d);
}

Matrix action_values(const EvaluatedModel& em, const Vector& value) {
  Matrix q = em.rewards;
  for (int a = 0; a < em.action_count(); ++a) {
    q.col(a) += em.rates[a] * value;
  }
  return q;
}

PolicyIterationResult policy_iteration(const EvaluatedModel& em, double beta) {
  const int S = em.state_count();
  const int A = em.action_count();
  std::vector<int> actions(S, 0);
  PolicyIterationResult out;
  // A^S bounds the number of strict improvements; the extra cap only guards
  // against cycling caused by rounding.
  const int cap = 10000;
  for (int it = 0; it < cap; ++it) {
    DeterministicStrategy d(actions);
    Vector v = policy_value(em, beta, d);
    Matrix q = action_values(em, v);
    bool changed = false;
    for (int i = 0; i < S; ++i) {
      int best = 0;
      for (int a = 1; a < A; ++a) {
        if (q(i, a) > q(i, best)) best = a;
      }
      if (q(i, best) > q(i, actions[i]) + kImproveTolerance) {
        actions[i] = best;
        changed = true;
      }
    }
    if (!changed) {
      out.value = std::move(v);
      out.strategy = std::move(d);
      out.iterations = it + 1;
      return out;
    }
  }
  throw SolverError("policy iteration did not terminate");
}

Vector optimal_value(const GameModel& model, const Vector& m) {
  return policy_iteration(model.evaluate(m), model.beta()).value;
}

Vector brute_force_value_oracle(const GameModel& model, const Vector& m,
                                std::uint64_t cap) {
  const int S = model.state_count();
  const int A = model.action_count();
  const std::uint64_t n = strategy_count(S, A, cap);
  if (n > cap) {
    throw PreconditionError("too many strategies for brute-force enumeration");
  }
  EvaluatedModel em = model.evaluate(m);
  Vector best = Vector::Constant(S, -std::numeric_limits<double>::infinity());
  for (std::uint64_t k = 0; k < n; ++k) {
    DeterministicStrategy d = DeterministicStrategy::from_index(k, S, A);
    best = best.cwiseMax(policy_value(em, model.beta(), d));
  }
  return best;
}

// ---------------------------------------------------------------------------

BestResponseSet::BestResponseSet(std::vector<std::vector<int>> optimal,
                                 Vector value, Matrix q, double tolerance)
    : optimal_(std::move(optimal)),
      value_(std::move(value)),
      q_(std::move(q)),
      tolerance_(tolerance) {}

bool BestResponseSet::contains(const DeterministicStrategy& d) const {
  if (d.size() != state_count()) return false;
  for (int i = 0; i < state_count(); ++i) {
    const auto& o = optimal_[i];
    if (std::find(o.begin(), o.end(), d[i]) == o.end()) return false;
  }
  return true;
}

std::uint64_t BestResponseSet::size(std::uint64_t cap) const {
  std::uint64_t n = 1;
  for (const auto& o : optimal_) {
    n *= o.size();
    if (n > cap) return cap + 1;
  }
  return n;
}

std::vector<DeterministicStrategy> BestResponseSet::strategies(
    std::uint64_t cap) const {
  const std::uint64_t n = size(cap);
  if (n > cap) throw PreconditionError("best-response set too large to list");
  std::vector<DeterministicStrategy> out;
  out.reserve(n);
  const int S = state_count();
  std::vector<std::size_t> idx(S, 0);
  for (std::uint64_t k = 0; k < n; ++k) {
    std::vector<int> a(S);
    for (int i = 0; i < S; ++i) a[i] = optimal_[i][idx[i]];
    out.emplace_back(std::move(a));
    // Odometer with the last state fastest, matching enumeration order.
    for (int i = S - 1; i >= 0; --i) {
      if (++idx[i] < optimal_[i].size()) break;
      idx[i] = 0;
    }
  }
  return out;
}

BestResponseSet BestResponseSet::effective(const EvaluatedModel& em) const {
  std::vector<std::vector<int>> reduced(optimal_.size());
  for (int i = 0; i < state_count(); ++i) {
    for (int a : optimal_[i]) {
      bool dup = false;
      for (int b : reduced[i]) {
        if (em.equivalent_actions(i, a, b)) dup = true;
      }
      if (!dup) reduced[i].push_back(a);
    }
  }
  return BestResponseSet(std::move(reduced), value_, q_, tolerance_);
}

BestResponseSet best_response(const EvaluatedModel& em, double beta,
                              double tau_opt) {
  if (!(tau_opt >= 0.0)) throw PreconditionError("tau_opt must be >= 0");
  PolicyIterationResult pi = policy_iteration(em, beta);
  Matrix q = action_values(em, pi.value);
  std::vector<std::vector<int>> optimal(em.state_count());
  for (int i = 0; i < em.state_count(); ++i) {
    const double best = q.row(i).maxCoeff();
    for (int a = 0; a < em.action_count(); ++a) {
      if (q(i, a) >= best - tau_opt) optimal[i].push_back(a);
    }
  }
  return BestResponseSet(std::move(optimal), std::move(pi.value), std::move(q),
                         tau_opt);
}

BestResponseSet best_response(const GameModel& model, const Vector& m,
                              double tau_opt) {
  return best_response(model.evaluate(m), model.beta(), tau_opt);
}

double strategy_gap(const EvaluatedModel& em, double beta,
                    const DeterministicStrategy& d) {
  Vector v = policy_value(em, beta, d);
  Matrix q = action_values(em, v);
  double gap = std::numeric_limits<double>::infinity();
  for (int i = 0; i < em.state_count(); ++i) {
    const int own = d[i];
    for (int a = 0; a < em.action_count(); ++a) {
      if (em.equivalent_actions(i, own, a)) continue;
      gap = std::min(gap, q(i, own) - q(i, a));
    }
  }
  return gap;
}

DeterministicStrategy canonical_strategy(const EvaluatedModel& em,
                                         const DeterministicStrategy& d) {
  std::vector<int> a(d.actions().begin(), d.actions().end());
  for (int i = 0; i < d.size(); ++i) {
    for (int b = 0; b < a[i]; ++b) {
      if (em.equivalent_actions(i, a[i], b)) {
        a[i] = b;
        break;
      }
    }
  }
  return DeterministicStrategy(std::move(a));
}

}  // namespace mfg
