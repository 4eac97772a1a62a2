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

#include "mfg/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mfg/errors.hpp"

namespace mfg {

Distribution::Distribution(Vector values, const SimplexTolerances& tol) {
  if (values.size() < 1) throw PreconditionError("empty distribution");
  if (!values.allFinite()) {
    throw PreconditionError("distribution has non-finite entries");
  }
  if (values.minCoeff() < -tol.entry) {
    throw PreconditionError("distribution has a negative entry");
  }
  if (std::abs(values.sum() - 1.0) > tol.sum) {
    throw PreconditionError("distribution does not sum to one");
  }
  values = values.cwiseMax(0.0);
  values /= values.sum();
  values_ = std::move(values);
}

Distribution Distribution::uniform(int state_count) {
  return Distribution(Vector::Constant(state_count, 1.0 / state_count));
}

Distribution Distribution::vertex(int state_count, int state) {
  Vector v = Vector::Zero(state_count);
  v[state] = 1.0;
  return Distribution(std::move(v));
}

Distribution project_to_simplex(const Vector& v, double pre_tol) {
  if (!v.allFinite()) {
    throw PreconditionError("project_to_simplex: non-finite input");
  }
  if (std::abs(v.sum() - 1.0) > pre_tol || v.minCoeff() < -pre_tol) {
    throw PreconditionError("project_to_simplex: point too far from simplex");
  }
  if (v.minCoeff() >= 0.0 && v.sum() == 1.0) {
    return Distribution(v, Distribution::Unchecked{});
  }
  Vector out = v.cwiseMax(0.0);
  out /= out.sum();
  return Distribution(std::move(out), Distribution::Unchecked{});
}

Vector clamp_to_simplex(const Vector& v) {
  Vector out = v.cwiseMax(0.0);
  double s = out.sum();
  if (!(s > 0.0) || !std::isfinite(s)) {
    return Vector::Constant(v.size(), 1.0 / static_cast<double>(v.size()));
  }
  return out / s;
}

bool on_simplex(const Vector& v, const SimplexTolerances& tol) {
  return v.allFinite() && v.minCoeff() >= -tol.entry &&
         std::abs(v.sum() - 1.0) <= tol.sum;
}

namespace {

double radical_inverse(int base, std::uint64_t index) {
  double inv = 1.0 / base;
  double f = inv;
  double r = 0.0;
  while (index > 0) {
    r += f * static_cast<double>(index % base);
    index /= base;
    f *= inv;
  }
  return r;
}

constexpr int kPrimes[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37};

Vector spacings(std::vector<double> cuts) {
  std::sort(cuts.begin(), cuts.end());
  const int n = static_cast<int>(cuts.size()) + 1;
  Vector out(n);
  double prev = 0.0;
  for (int i = 0; i < n - 1; ++i) {
    out[i] = cuts[i] - prev;
    prev = cuts[i];
  }
  out[n - 1] = 1.0 - prev;
  return out;
}

}  // namespace

std::vector<Vector> quasi_random_simplex_points(int state_count, int count) {
  const int dims = state_count - 1;
  if (dims > static_cast<int>(std::size(kPrimes))) {
    throw PreconditionError("quasi_random_simplex_points: too many states");
  }
  std::vector<Vector> out;
  out.reserve(count);
  for (int n = 1; n <= count; ++n) {
    std::vector<double> cuts(dims);
    for (int d = 0; d < dims; ++d) {
      cuts[d] = radical_inverse(kPrimes[d], static_cast<std::uint64_t>(n));
    }
    out.push_back(spacings(std::move(cuts)));
  }
  return out;
}

Vector random_simplex_point(int state_count, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> cuts(state_count - 1);
  for (auto& c : cuts) c = u(rng);
  return spacings(std::move(cuts));
}

Vector tangent_part(const Vector& v) {
  return v.array() - v.mean();
}

Vector random_tangent_direction(int state_count, std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  for (;;) {
    Vector v(state_count);
    for (int i = 0; i < state_count; ++i) v[i] = n(rng);
    v = tangent_part(v);
    double norm = v.norm();
    if (norm > 1e-8) return v / norm;
  }
}

double max_step_inside(const Vector& m, const Vector& dir) {
  double t = std::numeric_limits<double>::infinity();
  for (int i = 0; i < m.size(); ++i) {
    if (dir[i] < 0.0) t = std::min(t, std::max(0.0, m[i]) / -dir[i]);
  }
  return t;
}

}  // namespace mfg
