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

#include "mfg/model.hpp"

#include <algorithm>
#include <cmath>

#include "mfg/errors.hpp"

namespace mfg {

struct GameModel::Data {
  std::vector<std::string> states;
  std::vector<std::string> actions;
  double beta = 0.5;
  std::vector<std::string> param_names;
  std::vector<double> param_values;
  std::vector<Expr> rates;        // ((a * S) + i) * S + j
  std::vector<Expr> rewards;      // i * A + a
  std::vector<Expr> rate_derivs;  // (((a * S) + i) * S + j) * S + k
  std::vector<Expr> reward_derivs;  // ((i * A) + a) * S + k
  std::vector<bool> constant_action;
  std::vector<Expr> all_exprs;

  int S() const { return static_cast<int>(states.size()); }
  int A() const { return static_cast<int>(actions.size()); }
};

GameModel::GameModel(std::vector<std::string> state_labels,
                     std::vector<std::string> action_labels, double beta,
                     std::vector<std::string> param_names,
                     std::vector<double> param_values,
                     std::vector<std::vector<std::vector<Expr>>> rates,
                     std::vector<std::vector<Expr>> rewards) {
  auto d = std::make_shared<Data>();
  d->states = std::move(state_labels);
  d->actions = std::move(action_labels);
  d->beta = beta;
  d->param_names = std::move(param_names);
  d->param_values = std::move(param_values);
  const int S = d->S();
  const int A = d->A();
  if (S < 2) throw ModelError("a model needs at least two states");
  if (A < 1) throw ModelError("a model needs at least one action");
  if (!(beta > 0.0 && beta < 1.0)) {
    throw ModelError("discount beta must lie in (0,1)");
  }
  if (d->param_names.size() != d->param_values.size()) {
    throw ModelError("parameter names and values differ in length");
  }
  for (double v : d->param_values) {
    if (!std::isfinite(v)) throw ModelError("parameter values must be finite");
  }
  if (static_cast<int>(rates.size()) != A) {
    throw ModelError("rates must be given for every action");
  }
  if (static_cast<int>(rewards.size()) != S) {
    throw ModelError("rewards must be given for every state");
  }
  auto check = [&](const Expr& e) {
    if (e.max_var_index() > S) {
      throw ModelError("expression refers to a state beyond " +
                       std::to_string(S));
    }
    d->all_exprs.push_back(e);
  };
  d->rates.reserve(static_cast<std::size_t>(A * S * S));
  for (int a = 0; a < A; ++a) {
    if (static_cast<int>(rates[a].size()) != S) {
      throw ModelError("rate matrix of action '" + d->actions[a] +
                       "' must have " + std::to_string(S) + " rows");
    }
    for (int i = 0; i < S; ++i) {
      if (static_cast<int>(rates[a][i].size()) != S) {
        throw ModelError("rate matrix of action '" + d->actions[a] +
                         "' must have " + std::to_string(S) + " columns");
      }
      for (int j = 0; j < S; ++j) {
        check(rates[a][i][j]);
        d->rates.push_back(rates[a][i][j]);
      }
    }
  }
  for (int i = 0; i < S; ++i) {
    if (static_cast<int>(rewards[i].size()) != A) {
      throw ModelError("reward row " + std::to_string(i + 1) + " must have " +
                       std::to_string(A) + " entries");
    }
    for (int a = 0; a < A; ++a) {
      check(rewards[i][a]);
      d->rewards.push_back(rewards[i][a]);
    }
  }
  d->constant_action.assign(A, true);
  d->rate_derivs.reserve(d->rates.size() * static_cast<std::size_t>(S));
  for (int a = 0; a < A; ++a) {
    for (int i = 0; i < S; ++i) {
      for (int j = 0; j < S; ++j) {
        const Expr& e = d->rates[static_cast<std::size_t>((a * S + i) * S + j)];
        if (!e.is_constant()) d->constant_action[a] = false;
        for (int k = 0; k < S; ++k) d->rate_derivs.push_back(diff_expr(e, k));
      }
    }
  }
  for (const Expr& e : d->rewards) {
    for (int k = 0; k < S; ++k) d->reward_derivs.push_back(diff_expr(e, k));
  }
  data_ = std::move(d);
}

int GameModel::state_count() const { return data_->S(); }
int GameModel::action_count() const { return data_->A(); }
double GameModel::beta() const { return data_->beta; }
const std::vector<std::string>& GameModel::state_labels() const {
  return data_->states;
}
const std::vector<std::string>& GameModel::action_labels() const {
  return data_->actions;
}
const std::vector<std::string>& GameModel::param_names() const {
  return data_->param_names;
}
std::span<const double> GameModel::param_values() const {
  return data_->param_values;
}

std::optional<int> GameModel::param_index(const std::string& name) const {
  const auto& names = data_->param_names;
  auto it = std::find(names.begin(), names.end(), name);
  if (it == names.end()) return std::nullopt;
  return static_cast<int>(it - names.begin());
}

const Expr& GameModel::rate(int i, int j, int a) const {
  const int S = data_->S();
  return data_->rates[static_cast<std::size_t>((a * S + i) * S + j)];
}

const Expr& GameModel::reward(int i, int a) const {
  return data_->rewards[static_cast<std::size_t>(i * data_->A() + a)];
}

const Expr& GameModel::rate_derivative(int i, int j, int a, int k) const {
  const int S = data_->S();
  return data_->rate_derivs[static_cast<std::size_t>(((a * S + i) * S + j) * S + k)];
}

const Expr& GameModel::reward_derivative(int i, int a, int k) const {
  const int S = data_->S();
  return data_->reward_derivs[static_cast<std::size_t>((i * data_->A() + a) * S + k)];
}

GameModel GameModel::with_parameter(const std::string& name,
                                    double value) const {
  GameModel copy = *this;
  auto d = std::make_shared<Data>(*data_);
  if (name == "beta") {
    if (!(value > 0.0 && value < 1.0)) {
      throw ModelError("discount beta must lie in (0,1)");
    }
    d->beta = value;
  } else {
    auto idx = param_index(name);
    if (!idx) throw ModelError("unknown parameter '" + name + "'");
    if (!std::isfinite(value)) throw ModelError("parameter must be finite");
    d->param_values[static_cast<std::size_t>(*idx)] = value;
  }
  copy.data_ = std::move(d);
  return copy;
}

EvaluatedModel GameModel::evaluate(const Vector& m) const {
  const int S = data_->S();
  const int A = data_->A();
  if (m.size() != S) {
    throw PreconditionError("distribution has " + std::to_string(m.size()) +
                            " entries, model has " + std::to_string(S) +
                            " states");
  }
  auto ms = as_span(m);
  auto ps = param_values();
  EvaluatedModel out;
  out.rates.assign(A, Matrix(S, S));
  std::size_t idx = 0;
  for (int a = 0; a < A; ++a) {
    for (int i = 0; i < S; ++i) {
      for (int j = 0; j < S; ++j) {
        out.rates[a](i, j) = eval_expr(data_->rates[idx++], ms, ps);
      }
    }
  }
  out.rewards.resize(S, A);
  idx = 0;
  for (int i = 0; i < S; ++i) {
    for (int a = 0; a < A; ++a) {
      out.rewards(i, a) = eval_expr(data_->rewards[idx++], ms, ps);
    }
  }
  return out;
}

bool GameModel::rates_constant(int action) const {
  return data_->constant_action[static_cast<std::size_t>(action)];
}

bool GameModel::near_slog_kink(const Vector& m) const {
  auto ms = as_span(m);
  for (const auto& e : data_->all_exprs) {
    if (mfg::near_slog_kink(e, ms, param_values())) return true;
  }
  return false;
}

// ---------------------------------------------------------------------------

Matrix EvaluatedModel::generator(const DeterministicStrategy& d) const {
  const int S = state_count();
  Matrix q(S, S);
  for (int i = 0; i < S; ++i) q.row(i) = rates[d[i]].row(i);
  return q;
}

Matrix EvaluatedModel::generator(const MixedStrategy& pi) const {
  const int S = state_count();
  Matrix q = Matrix::Zero(S, S);
  for (int i = 0; i < S; ++i) {
    for (int a = 0; a < action_count(); ++a) {
      if (pi(i, a) != 0.0) q.row(i) += pi(i, a) * rates[a].row(i);
    }
  }
  return q;
}

Vector EvaluatedModel::reward(const DeterministicStrategy& d) const {
  Vector r(state_count());
  for (int i = 0; i < state_count(); ++i) r[i] = rewards(i, d[i]);
  return r;
}

Vector EvaluatedModel::reward(const MixedStrategy& pi) const {
  Vector r(state_count());
  for (int i = 0; i < state_count(); ++i) {
    r[i] = rewards.row(i).dot(pi.probabilities().row(i));
  }
  return r;
}

bool EvaluatedModel::equivalent_actions(int state, int a, int b) const {
  if (a == b) return true;
  constexpr double kTol = 1e-14;
  auto close = [](double x, double y) {
    return std::abs(x - y) <= kTol * (1.0 + std::max(std::abs(x), std::abs(y)));
  };
  if (!close(rewards(state, a), rewards(state, b))) return false;
  for (int j = 0; j < state_count(); ++j) {
    if (!close(rates[a](state, j), rates[b](state, j))) return false;
  }
  return true;
}

std::vector<Matrix> generator_derivatives(const GameModel& model,
                                          const Vector& m,
                                          const DeterministicStrategy& d) {
  const int S = model.state_count();
  auto ms = as_span(m);
  auto ps = model.param_values();
  std::vector<Matrix> out(S, Matrix::Zero(S, S));
  for (int k = 0; k < S; ++k) {
    for (int i = 0; i < S; ++i) {
      for (int j = 0; j < S; ++j) {
        const Expr& e = model.rate_derivative(i, j, d[i], k);
        if (e.kind() == ExprKind::kNumber && e.value() == 0.0) continue;
        out[k](i, j) = eval_expr(e, ms, ps);
      }
    }
  }
  return out;
}

std::vector<Vector> reward_derivatives(const GameModel& model, const Vector& m,
                                       const DeterministicStrategy& d) {
  const int S = model.state_count();
  auto ms = as_span(m);
  auto ps = model.param_values();
  std::vector<Vector> out(S, Vector::Zero(S));
  for (int k = 0; k < S; ++k) {
    for (int i = 0; i < S; ++i) {
      out[k][i] = eval_expr(model.reward_derivative(i, d[i], k), ms, ps);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------

std::string to_string(Violation::Kind kind) {
  switch (kind) {
    case Violation::Kind::kNegativeRate: return "negative-rate";
    case Violation::Kind::kRowSum: return "row-sum";
    case Violation::Kind::kEvaluation: return "evaluation";
  }
  return "unknown";
}

ValidationReport validate_model(const GameModel& model, int n_samples,
                                const ModelTolerances& tol) {
  const int S = model.state_count();
  const int A = model.action_count();
  std::vector<Vector> points;
  for (int i = 0; i < S; ++i) {
    Vector v = Vector::Zero(S);
    v[i] = 1.0;
    points.push_back(std::move(v));
  }
  points.push_back(Vector::Constant(S, 1.0 / S));
  if (n_samples > 0) {
    auto q = quasi_random_simplex_points(S, n_samples);
    points.insert(points.end(), q.begin(), q.end());
  }

  ValidationReport report;
  auto ps = model.param_values();
  for (const Vector& m : points) {
    ++report.points_checked;
    auto ms = as_span(m);
    for (int a = 0; a < A; ++a) {
      for (int i = 0; i < S; ++i) {
        double row = 0.0;
        bool row_ok = true;
        for (int j = 0; j < S; ++j) {
          double q = 0.0;
          try {
            q = eval_expr(model.rate(i, j, a), ms, ps);
          } catch (const DomainError& e) {
            report.violations.push_back({Violation::Kind::kEvaluation, i, j, a,
                                         m, 0.0, e.what()});
            row_ok = false;
            continue;
          }
          report.max_abs_rate = std::max(report.max_abs_rate, std::abs(q));
          row += q;
          if (i != j && q < -tol.row_sum) {
            report.violations.push_back({Violation::Kind::kNegativeRate, i, j,
                                         a, m, q, "negative off-diagonal rate"});
          }
        }
        if (row_ok && std::abs(row) > tol.row_sum) {
          report.violations.push_back({Violation::Kind::kRowSum, i, -1, a, m,
                                       row, "row does not sum to zero"});
        }
      }
    }
    for (int i = 0; i < S; ++i) {
      for (int a = 0; a < A; ++a) {
        try {
          (void)eval_expr(model.reward(i, a), ms, ps);
        } catch (const DomainError& e) {
          report.violations.push_back(
              {Violation::Kind::kEvaluation, i, -1, a, m, 0.0, e.what()});
        }
      }
    }
  }
  report.growth_bound = S * report.max_abs_rate;
  return report;
}

}  // namespace mfg
