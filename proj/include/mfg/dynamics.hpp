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

#ifndef MFG_DYNAMICS_HPP_
#define MFG_DYNAMICS_HPP_

#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "mfg/mdp.hpp"
#include "mfg/model.hpp"

namespace mfg {

// f^d(m)_j = sum_i m_i Q_{ij d(i)}(m), i.e. (Q^d(m))^T m.
Vector vector_field(const EvaluatedModel& em, const Vector& m,
                    const DeterministicStrategy& d);
Vector vector_field(const EvaluatedModel& em, const Vector& m,
                    const MixedStrategy& pi);
Vector vector_field(const GameModel& model, const Vector& m,
                    const DeterministicStrategy& d);

// d f^pi / d m: entry (j, k) = Q^pi_kj(m) + sum_i m_i dQ^pi_ij/dm_k(m),
// from the symbolic rate derivatives.
Matrix field_jacobian(const GameModel& model, const Vector& m,
                      const MixedStrategy& pi);
Matrix field_jacobian(const GameModel& model, const Vector& m,
                      const DeterministicStrategy& d);

struct FieldVertex {
  DeterministicStrategy strategy;
  Vector field;
};

// Vertices f^d(m) for every d in D(m).
struct FieldPolytope {
  std::vector<FieldVertex> vertices;
};

FieldPolytope field_polytope(const GameModel& model, const Vector& m,
                             double tau_opt = kOptimalityTolerance);

// lambda in [0,1] with <lambda f1 + (1-lambda) f2, grad> = 0. Throws
// TransversalCrossing when both inner products have the same strict sign.
double sliding_coefficient(const Vector& f1, const Vector& f2,
                           const Vector& grad);

enum class Mode { kInterior, kSliding, kConverged };
std::string to_string(Mode mode);

enum class Termination {
  kHorizon,
  kConverged,
  kStepFailure,
  kUnresolvedBranching,
};
std::string to_string(Termination t);

struct Segment {
  double t_begin = 0.0;
  double t_end = 0.0;
  Mode mode = Mode::kInterior;
  DeterministicStrategy strategy;               // d, or d1 when sliding
  std::optional<DeterministicStrategy> partner;  // d2 when sliding
  // Several strategies were admissible at the segment start and the
  // integrator picked one (the inclusion has more than one solution here).
  bool branched = false;
};

struct TrajectorySample {
  double t = 0.0;
  Vector m;
  int segment = 0;
  // Mixing weight on the first strategy of a sliding pair; NaN otherwise.
  double lambda = std::numeric_limits<double>::quiet_NaN();
};

struct Trajectory {
  std::vector<TrajectorySample> samples;
  std::vector<Segment> segments;
  Termination termination = Termination::kHorizon;
  std::string message;
  // Smallest entry of any accepted step before projection.
  double min_raw_entry = 0.0;
  int steps = 0;

  const TrajectorySample& back() const { return samples.back(); }
  Mode mode_of(const TrajectorySample& s) const {
    return segments[static_cast<std::size_t>(s.segment)].mode;
  }
  std::string strategy_label(const TrajectorySample& s,
                             std::span<const std::string> action_labels) const;
  // Sample at exactly time t if one was stored (output_times are always
  // stored); otherwise nullopt.
  const TrajectorySample* at(double t) const;
};

struct IntegrateOptions {
  double atol = 1e-9;
  double rtol = 1e-9;
  double tau_opt = kOptimalityTolerance;
  double converge_tol = 1e-10;      // ||f||_1 below this ends the run
  double event_time_tol = 1e-10;    // switching-time bisection width
  double probe_step = 1e-6;         // consistency probe length at ties
  double initial_step = 1e-3;
  double min_step = 1e-13;
  double max_step = 1.0;
  long max_steps = 1000000;
  bool record_steps = true;         // store every accepted step
  std::vector<double> output_times; // always stored (sorted, within horizon)
};

// Integrates m' in F(m) from m0 over [0, horizon]; see README for the
// switching and sliding rules. Never throws for numerical trouble: the
// trajectory up to the failure is returned with the termination reason.
Trajectory integrate(const GameModel& model, const Distribution& m0,
                     double horizon, const IntegrateOptions& opts = {});

}  // namespace mfg

#endif  // MFG_DYNAMICS_HPP_
