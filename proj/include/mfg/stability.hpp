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

#ifndef MFG_STABILITY_HPP_
#define MFG_STABILITY_HPP_

#include <complex>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "mfg/equilibrium.hpp"

namespace mfg {

// d f^d / d m at m (symbolic rate derivatives).
Matrix jacobian_f(const GameModel& model, const DeterministicStrategy& d,
                  const Vector& m);

struct EigenCluster {
  std::complex<double> value;
  int multiplicity = 1;
};

// Eigenvalues grouped when closer than 1e-6 (1 + |lambda|); sorted by
// decreasing real part, then imaginary part.
std::vector<EigenCluster> cluster_eigenvalues(const Matrix& a);

struct ExplicitDelta {
  double delta = 0.0;
  double epsilon_radius = 0.0;
  std::vector<EigenCluster> clusters;  // the nonzero eigenvalues
  std::vector<double> constants;       // C_j^k, one per basis vector
  double min_basis_norm = 1.0;
};

// Radius delta such that starts within delta of the equilibrium stay within
// epsilon_radius, for a constant irreducible generator Q^d:
//   delta = (epsilon_radius / 2) min ||v|| / max C_j^k
// with v the unit basis vectors of the generalized eigenspaces of (Q^d)^T
// and C_j^k = sum_l e^{-l} l^l / (l! (-Re lambda_j)^l) ||((Q^d)^T - lambda_j)^l v_j^k||.
// Throws PreconditionError when Q^d depends on m or zero is not a simple
// eigenvalue.
ExplicitDelta explicit_delta(const GameModel& model,
                             const EquilibriumReport& report,
                             double epsilon_radius);

enum class LocalClass { kLocallyConvergent, kInconclusive, kFailsUniqueness };
std::string to_string(LocalClass c);

struct LocalCheckOptions {
  double epsilon_max = 0.2;
  int points_per_radius = 100;
  int bisection_steps = 30;
  double zero_band = 1e-9;
  double alignment_limit = 1e-6;  // radians
  int empirical_starts = 10;
  double empirical_horizon = 50.0;
  double empirical_tolerance = 1e-4;
  std::uint64_t seed = 1;
  double tau_opt = kOptimalityTolerance;
};

struct StabilityReport {
  Vector m;
  DeterministicStrategy strategy;
  bool unique = false;
  double epsilon_radius = 0.0;
  std::vector<EigenCluster> eigenvalues;
  int zero_eigenvalues = 0;  // counted with multiplicity
  double zero_alignment = std::numeric_limits<double>::quiet_NaN();
  LocalClass classification = LocalClass::kInconclusive;
  std::string reason;
  bool empirical_ran = false;
  bool empirical_passed = false;
  double empirical_max_distance = 0.0;  // largest ||m(T) - m_bar||
  std::optional<ExplicitDelta> delta;
};

// Uniqueness of the best response at the equilibrium, the radius on which it
// stays unique, the Jacobian eigenstructure, and an integration check from
// starts at a quarter of that radius.
StabilityReport local_check(const GameModel& model,
                            const EquilibriumReport& report,
                            const LocalCheckOptions& opts = {});

enum class GlobalCase { kCaseI, kCaseII, kCaseIII, kNone, kSurfaceNotFound };
std::string to_string(GlobalCase c);

enum class GradientMethod { kFiniteDifference, kImplicit };

struct GlobalCheckOptions {
  int n_samples = 200;
  std::uint64_t seed = 1;
  double slack = 1e-9;      // weak inequalities of case (iii)
  double grad_floor = 1e-7;
  double fd_step = 1e-6;
  GradientMethod gradient = GradientMethod::kFiniteDifference;
};

struct SurfaceSample {
  Vector m;
  Vector grad;
  double g = 0.0;
  double s1 = 0.0;  // <f^{d1}, grad g>
  double s2 = 0.0;  // <f^{d2}, -grad g>
  bool near_kink = false;
};

struct GlobalCheckReport {
  GlobalCase label = GlobalCase::kSurfaceNotFound;
  std::vector<SurfaceSample> samples;
  std::vector<std::string> violations;
  int chords_tried = 0;
  int kink_samples = 0;
};

GlobalCheckReport global_check(const GameModel& model,
                               const DeterministicStrategy& d1,
                               const DeterministicStrategy& d2,
                               const GlobalCheckOptions& opts = {});

}  // namespace mfg

#endif  // MFG_STABILITY_HPP_
