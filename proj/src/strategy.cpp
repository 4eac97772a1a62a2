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

#include "mfg/strategy.hpp"

#include <cmath>
#include <sstream>

#include "mfg/errors.hpp"

namespace mfg {

std::uint64_t DeterministicStrategy::enumeration_index(int action_count) const {
  std::uint64_t index = 0;
  for (int a : actions_) {
    index = index * static_cast<std::uint64_t>(action_count) +
            static_cast<std::uint64_t>(a);
  }
  return index;
}

DeterministicStrategy DeterministicStrategy::from_index(std::uint64_t index,
                                                        int state_count,
                                                        int action_count) {
  std::vector<int> actions(state_count);
  for (int i = state_count - 1; i >= 0; --i) {
    actions[i] = static_cast<int>(index % static_cast<std::uint64_t>(action_count));
    index /= static_cast<std::uint64_t>(action_count);
  }
  return DeterministicStrategy(std::move(actions));
}

std::string DeterministicStrategy::label(
    std::span<const std::string> action_labels) const {
  std::string out;
  for (std::size_t i = 0; i < actions_.size(); ++i) {
    if (i > 0) out += ';';
    int a = actions_[i];
    if (a >= 0 && a < static_cast<int>(action_labels.size())) {
      out += action_labels[a];
    } else {
      out += std::to_string(a);
    }
  }
  return out;
}

std::uint64_t strategy_count(int state_count, int action_count,
                             std::uint64_t cap) {
  std::uint64_t n = 1;
  for (int i = 0; i < state_count; ++i) {
    n *= static_cast<std::uint64_t>(action_count);
    if (n > cap) return cap + 1;
  }
  return n;
}

DeterministicStrategy parse_strategy(
    const std::string& text, int state_count,
    std::span<const std::string> action_labels) {
  std::vector<int> actions;
  std::string token;
  std::stringstream ss(text);
  char sep = text.find(';') != std::string::npos ? ';' : ',';
  while (std::getline(ss, token, sep)) {
    auto b = token.find_first_not_of(" \t()");
    auto e = token.find_last_not_of(" \t()");
    token = b == std::string::npos ? "" : token.substr(b, e - b + 1);
    int found = -1;
    for (std::size_t a = 0; a < action_labels.size(); ++a) {
      if (action_labels[a] == token) found = static_cast<int>(a);
    }
    if (found < 0 && !token.empty() &&
        token.find_first_not_of("0123456789") == std::string::npos) {
      found = std::stoi(token);
      if (found >= static_cast<int>(action_labels.size())) found = -1;
    }
    if (found < 0) {
      throw PreconditionError("unknown action '" + token + "' in strategy '" +
                              text + "'");
    }
    actions.push_back(found);
  }
  if (static_cast<int>(actions.size()) != state_count) {
    throw PreconditionError("strategy '" + text + "' must name " +
                            std::to_string(state_count) + " actions");
  }
  return DeterministicStrategy(std::move(actions));
}

MixedStrategy::MixedStrategy(Matrix probabilities)
    : probabilities_(std::move(probabilities)) {
  if (probabilities_.size() == 0) {
    throw PreconditionError("mixed strategy is empty");
  }
  for (Eigen::Index i = 0; i < probabilities_.rows(); ++i) {
    for (Eigen::Index a = 0; a < probabilities_.cols(); ++a) {
      double p = probabilities_(i, a);
      if (!(p >= 0.0 && p <= 1.0)) {
        throw PreconditionError("mixed strategy entry outside [0,1]");
      }
    }
    if (std::abs(probabilities_.row(i).sum() - 1.0) > 1e-12) {
      throw PreconditionError("mixed strategy row does not sum to one");
    }
  }
}

MixedStrategy MixedStrategy::from(const DeterministicStrategy& d,
                                  int action_count) {
  Matrix p = Matrix::Zero(d.size(), action_count);
  for (int i = 0; i < d.size(); ++i) p(i, d[i]) = 1.0;
  return MixedStrategy(std::move(p));
}

}  // namespace mfg
