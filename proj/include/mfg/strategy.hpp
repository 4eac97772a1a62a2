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

#ifndef MFG_STRATEGY_HPP_
#define MFG_STRATEGY_HPP_

#include <compare>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "mfg/simplex.hpp"

namespace mfg {

// Stationary deterministic strategy: one action index per state.
class DeterministicStrategy {
 public:
  DeterministicStrategy() = default;
  explicit DeterministicStrategy(std::vector<int> actions)
      : actions_(std::move(actions)) {}

  int size() const { return static_cast<int>(actions_.size()); }
  int operator[](int state) const { return actions_[state]; }
  std::span<const int> actions() const { return actions_; }

  // Position in the lexicographic enumeration of A^S (first state slowest).
  std::uint64_t enumeration_index(int action_count) const;
  static DeterministicStrategy from_index(std::uint64_t index, int state_count,
                                          int action_count);

  // Labels joined by ';', e.g. "change;stay".
  std::string label(std::span<const std::string> action_labels) const;

  auto operator<=>(const DeterministicStrategy&) const = default;

 private:
  std::vector<int> actions_;
};

// Number of deterministic stationary strategies, A^S, saturating at `cap + 1`.
std::uint64_t strategy_count(int state_count, int action_count,
                             std::uint64_t cap);

// Parses "a1;a2;..." or "a1,a2,..." where each token is an action label or an
// action index. Throws PreconditionError.
DeterministicStrategy parse_strategy(const std::string& text, int state_count,
                                     std::span<const std::string> action_labels);

// Stationary mixed strategy: row i is the action distribution in state i.
class MixedStrategy {
 public:
  // Throws PreconditionError unless entries lie in [0,1] and rows sum to 1
  // within 1e-12.
  explicit MixedStrategy(Matrix probabilities);
  static MixedStrategy from(const DeterministicStrategy& d, int action_count);

  const Matrix& probabilities() const { return probabilities_; }
  int state_count() const { return static_cast<int>(probabilities_.rows()); }
  int action_count() const { return static_cast<int>(probabilities_.cols()); }
  double operator()(int state, int action) const {
    return probabilities_(state, action);
  }

 private:
  Matrix probabilities_;
};

}  // namespace mfg

#endif  // MFG_STRATEGY_HPP_
