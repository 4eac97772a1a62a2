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

#ifndef MFG_EQUILIBRIUM_HPP_
#define MFG_EQUILIBRIUM_HPP_

#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

#include "mfg/mdp.hpp"
#include "mfg/model.hpp"

namespace mfg {

struct EquilibriumOptions {
  double tau_opt = kOptimalityTolerance;
  double residual_tol = 1e-10;  // Newton acceptance on ||h||_1
  double report_tol = 1e-8;     // residual bound for an equilibrium
  double dedup_radius = 1e-6;
  int quasi_random_starts = 50;
  int max_newton_iterations = 100;
  int family_samples = 11;
  std::uint64_t strategy_cap = kEnumerationCap;
};

struct EquilibriumReport {
  Vector m;
  MixedStrategy strategy{Matrix::Ones(1, 1)};
  std::optional<DeterministicStrategy> deterministic;
  double residual = 0.0;           // ||(Q^pi(m))^T m||_1
  double optimality_margin = 0.0;  // min over the support of q_ia - max_b q_ib
  bool certified = false;          // every support action lies in O_i(m)
  bool unique = false;             // one strategy in D(m) up to equivalence
  std::uint64_t best_response_size = 0;  // raw |D(m)|
  bool equilibrium = false;        // residual <= report_tol and certified

  // Two-strategy search only.
  std::vector<double> weights;     // weight on d1 per differing state
  bool family = false;             // the root is not isolated
  double family_parameter = std::numeric_limits<double>::quiet_NaN();
};

// Residual, certificate and uniqueness of (m, pi).
EquilibriumReport assess_equilibrium(const GameModel& model, const Vector& m,
                                     const MixedStrategy& pi,
                                     const EquilibriumOptions& opts = {});

struct StationaryRoots {
  std::vector<Vector> roots;  // ||h||_1 <= residual_tol, deduplicated, sorted
  std::vector<Vector> near;   // best points with residual within 10x
  double best_residual = std::numeric_limits<double>::infinity();
  bool linear = false;        // Q^pi does not depend on m
};

// Roots of h(m) = (Q^pi(m))^T m on the simplex. Constant Q^pi: one
// distribution per closed communicating class. Otherwise damped Newton in
// S-1 coordinates from the vertices, the barycenter and quasi-random points.
StationaryRoots stationary_roots(const GameModel& model,
                                 const MixedStrategy& pi,
                                 const EquilibriumOptions& opts = {});
// As above; throws SolverError (with the best residual) when no root exists.
std::vector<Distribution> stationary_distribution(
    const GameModel& model, const MixedStrategy& pi,
    const EquilibriumOptions& opts = {});

struct DeterministicSearch {
  std::vector<EquilibriumReport> equilibria;
  // Not equilibria, but within 10x of the residual or optimality tolerance.
  std::vector<EquilibriumReport> near_misses;
  std::uint64_t strategies_checked = 0;
};

DeterministicSearch find_deterministic_equilibria(
    const GameModel& model, const EquilibriumOptions& opts = {});

struct MixedSearch {
  std::vector<int> differing_states;
  std::vector<EquilibriumReport> equilibria;
  // State whose weight parameterizes a reported family, if any.
  std::optional<int> family_state;
};

// Solves g(m) = 0 and (Q^pi(m))^T m = 0 with pi mixing d1 and d2 in the
// states where they differ. Rank-deficient roots are expanded into a family
// sampled at `family_samples` values of one free weight. Throws
// PreconditionError for d1 == d2 and SolverError when no root is found.
MixedSearch find_mixed_equilibria_two_strategy(
    const GameModel& model, const DeterministicStrategy& d1,
    const DeterministicStrategy& d2, const EquilibriumOptions& opts = {});

}  // namespace mfg

#endif  // MFG_EQUILIBRIUM_HPP_
