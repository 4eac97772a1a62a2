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

#ifndef MFG_MODEL_HPP_
#define MFG_MODEL_HPP_

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mfg/expr.hpp"
#include "mfg/simplex.hpp"
#include "mfg/strategy.hpp"

namespace mfg {

struct ModelTolerances {
  double row_sum = 1e-10;  // |sum_j Q_ija| bound; also the negativity slack
  double simplex = 1e-9;
};

// Rates and rewards of a model evaluated at one population distribution.
struct EvaluatedModel {
  std::vector<Matrix> rates;  // rates[a](i, j) = Q_ija(m)
  Matrix rewards;             // rewards(i, a) = r_ia(m)

  int state_count() const { return static_cast<int>(rewards.rows()); }
  int action_count() const { return static_cast<int>(rewards.cols()); }

  Matrix generator(const DeterministicStrategy& d) const;
  Matrix generator(const MixedStrategy& pi) const;
  Vector reward(const DeterministicStrategy& d) const;
  Vector reward(const MixedStrategy& pi) const;

  // Actions a and b have the same rate row and reward in `state`, so a
  // choice between them changes neither values nor dynamics.
  bool equivalent_actions(int state, int a, int b) const;
};

// Finite-state, finite-action mean field game: rates Q_ija(m) and rewards
// r_ia(m) as expressions over the distribution, discount beta in (0,1).
// Immutable; copies share the expression trees.
class GameModel {
 public:
  // `rates` is indexed [a][i][j], `rewards` [i][a]. Throws ModelError when the
  // shapes, the discount or the expressions are inconsistent.
  GameModel(std::vector<std::string> state_labels,
            std::vector<std::string> action_labels, double beta,
            std::vector<std::string> param_names,
            std::vector<double> param_values,
            std::vector<std::vector<std::vector<Expr>>> rates,
            std::vector<std::vector<Expr>> rewards);

  int state_count() const;
  int action_count() const;
  double beta() const;
  const std::vector<std::string>& state_labels() const;
  const std::vector<std::string>& action_labels() const;
  const std::vector<std::string>& param_names() const;
  std::span<const double> param_values() const;
  std::optional<int> param_index(const std::string& name) const;

  const Expr& rate(int i, int j, int a) const;
  const Expr& reward(int i, int a) const;
  // d Q_ija / d m_k, computed once at construction.
  const Expr& rate_derivative(int i, int j, int a, int k) const;
  // d r_ia / d m_k.
  const Expr& reward_derivative(int i, int a, int k) const;

  // Returns a copy with one parameter replaced; the name "beta" sets the
  // discount. Throws ModelError for unknown names.
  GameModel with_parameter(const std::string& name, double value) const;

  EvaluatedModel evaluate(const Vector& m) const;

  // No rate expression of `action` depends on m.
  bool rates_constant(int action) const;
  // Some slog in a rate or reward is within 2 delta of its kink at m.
  bool near_slog_kink(const Vector& m) const;

 private:
  struct Data;
  std::shared_ptr<const Data> data_;
};

// dQ^d/dm_k for k = 0..S-1, from the symbolic derivatives.
std::vector<Matrix> generator_derivatives(const GameModel& model,
                                          const Vector& m,
                                          const DeterministicStrategy& d);
// dr^d/dm_k for k = 0..S-1.
std::vector<Vector> reward_derivatives(const GameModel& model, const Vector& m,
                                       const DeterministicStrategy& d);

struct Violation {
  enum class Kind { kNegativeRate, kRowSum, kEvaluation };
  Kind kind = Kind::kNegativeRate;
  int from = -1;    // i
  int to = -1;      // j
  int action = -1;  // a
  Vector m;
  double value = 0.0;
  std::string message;
};

std::string to_string(Violation::Kind kind);

struct ValidationReport {
  std::vector<Violation> violations;
  int points_checked = 0;
  // max |Q_ija(m)| over the checked points and the resulting bound S * M on
  // the 1-norm of every field vertex.
  double max_abs_rate = 0.0;
  double growth_bound = 0.0;
  bool ok() const { return violations.empty(); }
};

// Evaluates every rate and reward at the simplex vertices, the barycenter and
// `n_samples` quasi-random points. Reports negative off-diagonal rates,
// row sums off by more than tol.row_sum and evaluation failures; never throws
// for a violating model.
ValidationReport validate_model(const GameModel& model, int n_samples,
                                const ModelTolerances& tol = {});

}  // namespace mfg

#endif  // MFG_MODEL_HPP_
