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

#ifndef MFG_MDP_HPP_
#define MFG_MDP_HPP_

#include <cstdint>
#include <vector>

#include "mfg/model.hpp"

namespace mfg {

inline constexpr double kImproveTolerance = 1e-12;
inline constexpr double kOptimalityTolerance = 1e-9;
inline constexpr std::uint64_t kEnumerationCap = 1000000;

// V^d = (beta I - Q^d)^{-1} r^d for the population frozen at the evaluation
// point. Throws SolverError if the system is singular (broken generator).
Vector policy_value(const EvaluatedModel& em, double beta,
                    const DeterministicStrategy& d);
Vector policy_value(const EvaluatedModel& em, double beta,
                    const MixedStrategy& pi);
Vector policy_value(const GameModel& model, const Vector& m,
                    const DeterministicStrategy& d);

// q_ia = r_ia + sum_j Q_ija V_j.
Matrix action_values(const EvaluatedModel& em, const Vector& value);

struct PolicyIterationResult {
  Vector value;
  DeterministicStrategy strategy;
  int iterations = 0;
};

// Policy iteration from action 0 everywhere; a state switches only when the
// gain exceeds kImproveTolerance, ties going to the lowest action index.
PolicyIterationResult policy_iteration(const EvaluatedModel& em, double beta);
Vector optimal_value(const GameModel& model, const Vector& m);

// Componentwise maximum of policy_value over all A^S strategies; a test
// oracle. Throws PreconditionError above `cap` strategies.
Vector brute_force_value_oracle(const GameModel& model, const Vector& m,
                                std::uint64_t cap = kEnumerationCap);

// Per-state optimal action sets O_i(m); D(m) is their product.
class BestResponseSet {
 public:
  BestResponseSet(std::vector<std::vector<int>> optimal, Vector value,
                  Matrix q, double tolerance);

  int state_count() const { return static_cast<int>(optimal_.size()); }
  const std::vector<int>& optimal(int state) const { return optimal_[state]; }
  const Vector& value() const { return value_; }
  const Matrix& q() const { return q_; }
  double tolerance() const { return tolerance_; }

  bool contains(const DeterministicStrategy& d) const;
  // |D(m)|, saturating at cap + 1.
  std::uint64_t size(std::uint64_t cap = kEnumerationCap) const;
  std::vector<DeterministicStrategy> strategies(
      std::uint64_t cap = kEnumerationCap) const;

  // Collapses actions that are indistinguishable at this point (same rate row
  // and reward, see EvaluatedModel::equivalent_actions) to their lowest index.
  BestResponseSet effective(const EvaluatedModel& em) const;

 private:
  std::vector<std::vector<int>> optimal_;
  Vector value_;
  Matrix q_;
  double tolerance_;
};

BestResponseSet best_response(const EvaluatedModel& em, double beta,
                              double tau_opt = kOptimalityTolerance);
BestResponseSet best_response(const GameModel& model, const Vector& m,
                              double tau_opt = kOptimalityTolerance);

// Signed optimality margin of d at the evaluation point:
//   min_i [ q^d_{i,d(i)} - max_{a not equivalent to d(i)} q^d_{ia} ]
// with q^d built from V^d. Non-negative exactly when d is optimal; +infinity
// when every state has a single effective action.
double strategy_gap(const EvaluatedModel& em, double beta,
                    const DeterministicStrategy& d);

// Effective representative of d: each action replaced by the lowest-index
// action equivalent to it at the evaluation point.
DeterministicStrategy canonical_strategy(const EvaluatedModel& em,
                                         const DeterministicStrategy& d);

}  // namespace mfg

#endif  // MFG_MDP_HPP_
