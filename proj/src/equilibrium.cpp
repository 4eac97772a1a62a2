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

#include "mfg/equilibrium.hpp"

#include <algorithm>
#include <cmath>

#include "mfg/dynamics.hpp"
#include "mfg/errors.hpp"
#include "mfg/switching.hpp"

namespace mfg {
namespace {

double residual(const GameModel& model, const Vector& m,
                const MixedStrategy& pi) {
  return vector_field(model.evaluate(m), m, pi).lpNorm<1>();
}

std::vector<Vector> start_points(int S, int quasi_random) {
  std::vector<Vector> out;
  for (int i = 0; i < S; ++i) out.push_back(Distribution::vertex(S, i).values());
  out.push_back(Vector::Constant(S, 1.0 / S));
  auto q = quasi_random_simplex_points(S, quasi_random);
  out.insert(out.end(), q.begin(), q.end());
  return out;
}

bool lex_less(const Vector& a, const Vector& b) {
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    if (a[i] != b[i]) return a[i] < b[i];
  }
  return false;
}

bool rows_constant(const GameModel& model, const MixedStrategy& pi) {
  for (int i = 0; i < model.state_count(); ++i) {
    for (int a = 0; a < model.action_count(); ++a) {
      if (pi(i, a) == 0.0) continue;
      for (int j = 0; j < model.state_count(); ++j) {
        if (!model.rate(i, j, a).is_constant()) return false;
      }
    }
  }
  return true;
}

// One stationary distribution per closed communicating class of a constant
// generator.
std::vector<Vector> closed_class_distributions(const Matrix& q) {
  const int S = static_cast<int>(q.rows());
  std::vector<std::vector<bool>> reach(S, std::vector<bool>(S, false));
  for (int i = 0; i < S; ++i) {
    reach[i][i] = true;
    for (int j = 0; j < S; ++j) {
      if (i != j && q(i, j) > 0.0) reach[i][j] = true;
    }
  }
  for (int k = 0; k < S; ++k) {
    for (int i = 0; i < S; ++i) {
      if (!reach[i][k]) continue;
      for (int j = 0; j < S; ++j) {
        if (reach[k][j]) reach[i][j] = true;
      }
    }
  }
  std::vector<bool> done(S, false);
  std::vector<Vector> out;
  for (int i = 0; i < S; ++i) {
    if (done[i]) continue;
    std::vector<int> cls;
    bool closed = true;
    for (int j = 0; j < S; ++j) {
      if (reach[i][j] && reach[j][i]) cls.push_back(j);
      if (reach[i][j] && !reach[j][i]) closed = false;
    }
    for (int j : cls) done[j] = true;
    if (!closed) continue;
    const int n = static_cast<int>(cls.size());
    Matrix a(n, n);
    for (int r = 0; r < n; ++r) {
      for (int c = 0; c < n; ++c) a(r, c) = q(cls[c], cls[r]);
    }
    a.row(n - 1).setOnes();
    Vector rhs = Vector::Zero(n);
    rhs[n - 1] = 1.0;
    Vector x = a.fullPivLu().solve(rhs);
    Vector m = Vector::Zero(S);
    for (int r = 0; r < n; ++r) m[cls[r]] = x[r];
    out.push_back(clamp_to_simplex(m));
  }
  return out;
}

// Damped Newton on h in the first S-1 coordinates. Returns the end point and
// its residual.
std::pair<Vector, double> newton_stationary(const GameModel& model,
                                            const MixedStrategy& pi,
                                            Vector m,
                                            const EquilibriumOptions& opts) {
  const int S = model.state_count();
  double r = residual(model, m, pi);
  for (int it = 0; it < opts.max_newton_iterations && r > opts.residual_tol;
       ++it) {
    Vector h = vector_field(model.evaluate(m), m, pi);
    Matrix j = field_jacobian(model, m, pi);
    Matrix jr(S - 1, S - 1);
    for (int a = 0; a < S - 1; ++a) {
      for (int b = 0; b < S - 1; ++b) jr(a, b) = j(a, b) - j(a, S - 1);
    }
    Vector dx = jr.fullPivLu().solve(-h.head(S - 1));
    if (!dx.allFinite()) break;
    Vector dir(S);
    dir.head(S - 1) = dx;
    dir[S - 1] = -dx.sum();
    double alpha = std::min(1.0, max_step_inside(m, dir));
    if (alpha < 1e-14) break;
    bool moved = false;
    while (alpha > 1e-12) {
      Vector trial = clamp_to_simplex(m + alpha * dir);
      double rt = std::numeric_limits<double>::infinity();
      try {
        rt = residual(model, trial, pi);
      } catch (const Error&) {
      }
      if (rt < r * (1.0 - 1e-4 * alpha)) {
        m = std::move(trial);
        r = rt;
        moved = true;
        break;
      }
      alpha *= 0.5;
    }
    if (!moved) break;
  }
  return {m, r};
}

void add_unique(std::vector<Vector>& roots, std::vector<double>& res,
                const Vector& m, double r, double radius) {
  for (std::size_t k = 0; k < roots.size(); ++k) {
    if ((roots[k] - m).lpNorm<Eigen::Infinity>() < radius) {
      if (r < res[k]) {
        roots[k] = m;
        res[k] = r;
      }
      return;
    }
  }
  roots.push_back(m);
  res.push_back(r);
}

}  // namespace

EquilibriumReport assess_equilibrium(const GameModel& model, const Vector& m,
                                     const MixedStrategy& pi,
                                     const EquilibriumOptions& opts) {
  EquilibriumReport rep;
  rep.m = m;
  rep.strategy = pi;
  EvaluatedModel em = model.evaluate(m);
  rep.residual = vector_field(em, m, pi).lpNorm<1>();
  BestResponseSet br = best_response(em, model.beta(), opts.tau_opt);
  rep.best_response_size = br.size(opts.strategy_cap);
  rep.unique = br.effective(em).size(opts.strategy_cap) == 1;
  rep.optimality_margin = std::numeric_limits<double>::infinity();
  for (int i = 0; i < model.state_count(); ++i) {
    const double best = br.q().row(i).maxCoeff();
    for (int a = 0; a < model.action_count(); ++a) {
      if (pi(i, a) <= 1e-12) continue;
      rep.optimality_margin = std::min(rep.optimality_margin, br.q()(i, a) - best);
    }
  }
  rep.certified = rep.optimality_margin >= -opts.tau_opt;
  rep.equilibrium = rep.certified && rep.residual <= opts.report_tol;
  return rep;
}

StationaryRoots stationary_roots(const GameModel& model,
                                 const MixedStrategy& pi,
                                 const EquilibriumOptions& opts) {
  const int S = model.state_count();
  if (pi.state_count() != S || pi.action_count() != model.action_count()) {
    throw PreconditionError("strategy does not match the model");
  }
  StationaryRoots out;
  std::vector<double> res;
  if (rows_constant(model, pi)) {
    out.linear = true;
    Matrix q = model.evaluate(Vector::Constant(S, 1.0 / S)).generator(pi);
    for (const Vector& m : closed_class_distributions(q)) {
      const double r = residual(model, m, pi);
      out.best_residual = std::min(out.best_residual, r);
      if (r <= opts.residual_tol) {
        add_unique(out.roots, res, m, r, opts.dedup_radius);
      } else {
        out.near.push_back(m);
      }
    }
  } else {
    std::vector<Vector> near;
    std::vector<double> near_res;
    for (const Vector& start : start_points(S, opts.quasi_random_starts)) {
      std::pair<Vector, double> end;
      try {
        end = newton_stationary(model, pi, start, opts);
      } catch (const Error&) {
        continue;  // this start left the evaluation domain
      }
      out.best_residual = std::min(out.best_residual, end.second);
      if (end.second <= opts.residual_tol) {
        add_unique(out.roots, res, end.first, end.second, opts.dedup_radius);
      } else if (end.second <= 10.0 * opts.residual_tol) {
        add_unique(near, near_res, end.first, end.second, opts.dedup_radius);
      }
    }
    for (const Vector& m : near) {
      bool covered = false;
      for (const Vector& r : out.roots) {
        if ((r - m).lpNorm<Eigen::Infinity>() < opts.dedup_radius) covered = true;
      }
      if (!covered) out.near.push_back(m);
    }
  }
  std::sort(out.roots.begin(), out.roots.end(), lex_less);
  std::sort(out.near.begin(), out.near.end(), lex_less);
  return out;
}

std::vector<Distribution> stationary_distribution(
    const GameModel& model, const MixedStrategy& pi,
    const EquilibriumOptions& opts) {
  StationaryRoots roots = stationary_roots(model, pi, opts);
  if (roots.roots.empty()) {
    throw SolverError("no stationary distribution found; best residual " +
                      format_double(roots.best_residual));
  }
  std::vector<Distribution> out;
  for (const Vector& m : roots.roots) out.push_back(project_to_simplex(m));
  return out;
}

DeterministicSearch find_deterministic_equilibria(
    const GameModel& model, const EquilibriumOptions& opts) {
  const int S = model.state_count();
  const int A = model.action_count();
  const std::uint64_t n = strategy_count(S, A, opts.strategy_cap);
  if (n > opts.strategy_cap) {
    throw PreconditionError("too many deterministic strategies to enumerate");
  }
  DeterministicSearch out;
  for (std::uint64_t k = 0; k < n; ++k) {
    DeterministicStrategy d = DeterministicStrategy::from_index(k, S, A);
    MixedStrategy pi = MixedStrategy::from(d, A);
    StationaryRoots roots = stationary_roots(model, pi, opts);
    ++out.strategies_checked;
    auto consider = [&](const Vector& m) {
      EquilibriumReport rep =
          assess_equilibrium(model, project_to_simplex(m).values(), pi, opts);
      rep.deterministic = d;
      if (rep.equilibrium) {
        out.equilibria.push_back(std::move(rep));
      } else if (rep.residual <= 10.0 * opts.report_tol &&
                 rep.optimality_margin >= -10.0 * opts.tau_opt) {
        out.near_misses.push_back(std::move(rep));
      }
    };
    for (const Vector& m : roots.roots) consider(m);
    for (const Vector& m : roots.near) consider(m);
  }
  return out;
}

// ---------------------------------------------------------------------------

namespace {

struct MixedProblem {
  const GameModel& model;
  DeterministicStrategy d1;
  DeterministicStrategy d2;
  std::vector<int> states;  // where d1 and d2 differ
  int S = 0;
  double g_scale = 1.0;

  int unknowns() const { return S - 1 + static_cast<int>(states.size()); }

  Vector m_of(const Vector& z) const {
    Vector m(S);
    m.head(S - 1) = z.head(S - 1);
    m[S - 1] = 1.0 - z.head(S - 1).sum();
    return m;
  }

  MixedStrategy pi_of(const Vector& z) const {
    Matrix p = MixedStrategy::from(d1, model.action_count()).probabilities();
    for (std::size_t k = 0; k < states.size(); ++k) {
      const int i = states[k];
      const double mu = std::clamp(z[S - 1 + static_cast<int>(k)], 0.0, 1.0);
      p.row(i).setZero();
      p(i, d1[i]) = mu;
      p(i, d2[i]) = 1.0 - mu;
    }
    return MixedStrategy(std::move(p));
  }

  // F = (h_1..h_{S-1}, g / g_scale).
  Vector residuals(const Vector& z) const {
    Vector m = m_of(z);
    Vector h = vector_field(model.evaluate(m), m, pi_of(z));
    Vector f(S);
    f.head(S - 1) = h.head(S - 1);
    f[S - 1] = g_value(model, d1, d2, m) / g_scale;
    return f;
  }

  double merit(const Vector& z) const {
    Vector m = m_of(z);
    Vector h = vector_field(model.evaluate(m), m, pi_of(z));
    return h.lpNorm<1>() + std::abs(g_value(model, d1, d2, m)) / g_scale;
  }

  Matrix jacobian(const Vector& z) const {
    const int n = unknowns();
    Vector m = m_of(z);
    MixedStrategy pi = pi_of(z);
    Matrix j = field_jacobian(model, m, pi);
    Vector gg = grad_g_analytic(model, d1, d2, m) / g_scale;
    EvaluatedModel em = model.evaluate(m);
    Matrix out = Matrix::Zero(S, n);
    for (int b = 0; b < S - 1; ++b) {
      for (int a = 0; a < S - 1; ++a) out(a, b) = j(a, b) - j(a, S - 1);
      out(S - 1, b) = gg[b] - gg[S - 1];
    }
    for (std::size_t k = 0; k < states.size(); ++k) {
      const int i = states[k];
      Vector dh = m[i] * (em.rates[d1[i]].row(i) - em.rates[d2[i]].row(i)).transpose();
      out.block(0, S - 1 + static_cast<int>(k), S - 1, 1) = dh.head(S - 1);
    }
    return out;
  }

  bool admissible(const Vector& z) const {
    Vector m = m_of(z);
    if (m.minCoeff() < -1e-12) return false;
    for (int k = S - 1; k < z.size(); ++k) {
      if (z[k] < -1e-12 || z[k] > 1.0 + 1e-12) return false;
    }
    return true;
  }

  // Largest step along dz keeping m in the simplex and weights in [0,1];
  // coordinates in `fixed` do not move.
  double max_alpha(const Vector& z, const Vector& dz) const {
    Vector m = m_of(z);
    Vector dm(S);
    dm.head(S - 1) = dz.head(S - 1);
    dm[S - 1] = -dz.head(S - 1).sum();
    double alpha = max_step_inside(m, dm);
    for (int k = S - 1; k < z.size(); ++k) {
      if (dz[k] > 0) alpha = std::min(alpha, std::max(0.0, 1.0 - z[k]) / dz[k]);
      if (dz[k] < 0) alpha = std::min(alpha, std::max(0.0, z[k]) / -dz[k]);
    }
    return alpha;
  }

  // Minimum-norm damped Gauss-Newton; `frozen` coordinate (if >= 0) fixed.
  std::pair<Vector, double> solve(Vector z, int frozen, double tol,
                                  int max_it) const {
    double r = merit(z);
    for (int it = 0; it < max_it && r > tol; ++it) {
      Vector f = residuals(z);
      Matrix j = jacobian(z);
      if (frozen >= 0) j.col(frozen).setZero();
      Eigen::CompleteOrthogonalDecomposition<Matrix> cod(j);
      Vector dz = cod.solve(-f);
      if (frozen >= 0) dz[frozen] = 0.0;
      if (!dz.allFinite()) break;
      double alpha = std::min(1.0, max_alpha(z, dz));
      bool moved = false;
      while (alpha > 1e-12) {
        Vector trial = z + alpha * dz;
        double rt = std::numeric_limits<double>::infinity();
        try {
          if (admissible(trial)) rt = merit(trial);
        } catch (const Error&) {
        }
        if (rt < r * (1.0 - 1e-4 * alpha)) {
          z = std::move(trial);
          r = rt;
          moved = true;
          break;
        }
        alpha *= 0.5;
      }
      if (!moved) break;
    }
    return {z, r};
  }
};

}  // namespace

MixedSearch find_mixed_equilibria_two_strategy(
    const GameModel& model, const DeterministicStrategy& d1,
    const DeterministicStrategy& d2, const EquilibriumOptions& opts) {
  const int S = model.state_count();
  if (d1.size() != S || d2.size() != S) {
    throw PreconditionError("strategy does not match the model");
  }
  if (d1 == d2) throw PreconditionError("the two strategies must differ");
  MixedProblem prob{model, d1, d2, {}, S, 1.0};
  for (int i = 0; i < S; ++i) {
    if (d1[i] != d2[i]) prob.states.push_back(i);
  }
  {
    EvaluatedModel em = model.evaluate(Vector::Constant(S, 1.0 / S));
    prob.g_scale = 1.0 + em.rewards.cwiseAbs().maxCoeff() / model.beta();
  }
  MixedSearch out;
  out.differing_states = prob.states;
  const int n = prob.unknowns();
  const int K = static_cast<int>(prob.states.size());

  auto report = [&](const Vector& z) {
    Vector m = project_to_simplex(prob.m_of(z)).values();
    EquilibriumReport rep =
        assess_equilibrium(model, m, prob.pi_of(z), opts);
    for (int k = 0; k < K; ++k) {
      rep.weights.push_back(std::clamp(z[S - 1 + k], 0.0, 1.0));
    }
    return rep;
  };

  std::vector<Vector> roots;
  double best = std::numeric_limits<double>::infinity();
  for (const Vector& start : start_points(S, opts.quasi_random_starts)) {
    Vector z(n);
    z.head(S - 1) = start.head(S - 1);
    z.tail(K).setConstant(0.5);
    std::pair<Vector, double> end;
    try {
      end = prob.solve(z, -1, opts.residual_tol, opts.max_newton_iterations);
    } catch (const Error&) {
      continue;
    }
    best = std::min(best, end.second);
    if (end.second > opts.residual_tol) continue;
    bool dup = false;
    for (const Vector& r : roots) {
      if ((r - end.first).lpNorm<Eigen::Infinity>() < opts.dedup_radius) {
        dup = true;
      }
    }
    if (!dup) roots.push_back(end.first);
  }
  if (roots.empty()) {
    throw SolverError("no mixed stationary point found; best residual " +
                      format_double(best));
  }
  std::sort(roots.begin(), roots.end(), lex_less);

  std::vector<Vector> family_ms;
  for (const Vector& z : roots) {
    Matrix j = prob.jacobian(z);
    Eigen::JacobiSVD<Matrix> svd(j, Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    const double floor = 1e-8 * std::max(1.0, sv.size() ? sv[0] : 0.0);
    int rank = 0;
    for (Eigen::Index k = 0; k < sv.size(); ++k) {
      if (sv[k] > floor) ++rank;
    }
    if (rank >= n || K == 0) {
      out.equilibria.push_back(report(z));
      continue;
    }
    // Non-isolated: skip roots on an already sampled family.
    Vector m = prob.m_of(z);
    bool seen = false;
    for (const Vector& fm : family_ms) {
      if ((fm - m).lpNorm<Eigen::Infinity>() < 1e-6) seen = true;
    }
    if (seen) continue;
    // Free weight: the one moving most along the null space.
    Matrix null = svd.matrixV().rightCols(n - rank);
    int free_k = 0;
    double most = -1.0;
    for (int k = 0; k < K; ++k) {
      const double c = null.row(S - 1 + k).norm();
      if (c > most + 1e-12) {
        most = c;
        free_k = k;
      }
    }
    out.family_state = prob.states[static_cast<std::size_t>(free_k)];
    const int col = S - 1 + free_k;
    const int samples = std::max(2, opts.family_samples);
    for (int s = 0; s < samples; ++s) {
      const double value = static_cast<double>(s) / (samples - 1);
      Vector zs = z;
      zs[col] = value;
      std::pair<Vector, double> end;
      try {
        end = prob.solve(zs, col, opts.residual_tol, opts.max_newton_iterations);
      } catch (const Error&) {
        continue;
      }
      if (end.second > opts.residual_tol) continue;
      EquilibriumReport rep = report(end.first);
      rep.family = true;
      rep.family_parameter = value;
      family_ms.push_back(prob.m_of(end.first));
      out.equilibria.push_back(std::move(rep));
    }
    family_ms.push_back(m);
  }
  return out;
}

}  // namespace mfg
