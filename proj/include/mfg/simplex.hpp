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

#ifndef MFG_SIMPLEX_HPP_
#define MFG_SIMPLEX_HPP_

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace mfg {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

inline std::span<const double> as_span(const Vector& v) {
  return {v.data(), static_cast<std::size_t>(v.size())};
}

// Tolerances for points of the probability simplex.
struct SimplexTolerances {
  double entry = 1e-9;  // smallest admissible entry is -entry
  double sum = 1e-9;    // |sum - 1| bound
};

// A point of the probability simplex over the states.
class Distribution {
 public:
  // Validates `values` against the tolerances, clamps tiny negatives to zero
  // and renormalizes. Throws PreconditionError when the point is off the
  // simplex.
  explicit Distribution(Vector values, const SimplexTolerances& tol = {});

  static Distribution uniform(int state_count);
  static Distribution vertex(int state_count, int state);

  const Vector& values() const { return values_; }
  int size() const { return static_cast<int>(values_.size()); }
  double operator[](int i) const { return values_[i]; }

 private:
  struct Unchecked {};
  Distribution(Vector values, Unchecked) : values_(std::move(values)) {}
  friend Distribution project_to_simplex(const Vector& v, double pre_tol);
  Vector values_;
};

// Clamps negative entries to zero and renormalizes. The input must already be
// within `pre_tol` of the simplex (sum within pre_tol of 1, every entry above
// -pre_tol); otherwise PreconditionError is thrown, which the integrator reads
// as "step too large".
Distribution project_to_simplex(const Vector& v, double pre_tol = 1e-6);

// Clamp-and-renormalize without the precondition; used by solvers whose
// iterates may wander off the simplex.
Vector clamp_to_simplex(const Vector& v);

bool on_simplex(const Vector& v, const SimplexTolerances& tol = {});

// Deterministic low-discrepancy points (Halton, mapped through sorted
// spacings) spread over the simplex.
std::vector<Vector> quasi_random_simplex_points(int state_count, int count);

// Uniformly distributed point of the simplex.
Vector random_simplex_point(int state_count, std::mt19937_64& rng);

// Uniformly distributed unit vector in the sum-zero subspace.
Vector random_tangent_direction(int state_count, std::mt19937_64& rng);

// Largest t >= 0 with m + t * dir still on the simplex (infinity when dir
// never leaves it).
double max_step_inside(const Vector& m, const Vector& dir);

// Orthogonal projection onto the sum-zero subspace.
Vector tangent_part(const Vector& v);

}  // namespace mfg

#endif  // MFG_SIMPLEX_HPP_
