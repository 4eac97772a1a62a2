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

#ifndef MFG_ODE_HPP_
#define MFG_ODE_HPP_

#include <array>
#include <functional>

#include "mfg/simplex.hpp"

namespace mfg::ode {

// Autonomous right-hand side. May throw mfg::Error; the stepper treats that
// as a rejected step.
using Field = std::function<Vector(const Vector&)>;

// Continuous extension of one accepted Dormand-Prince step (Hairer's
// fourth-order dense output).
struct DenseStep {
  double t0 = 0.0;
  double h = 0.0;
  std::array<Vector, 5> rcont;

  double t1() const { return t0 + h; }
  Vector operator()(double t) const;
};

struct StepResult {
  Vector y1;
  Vector k_last;  // field at y1 (FSAL)
  double error = 0.0;  // scaled RMS error estimate; <= 1 accepts
  DenseStep dense;
};

// One Dormand-Prince 5(4) step from (t, y) with size h; k1 is f(y).
StepResult dopri5_step(const Field& f, double t, const Vector& y,
                       const Vector& k1, double h, double atol, double rtol);

// Step-size update after a step with scaled error `error`.
double next_step_size(double h, double error);

}  // namespace mfg::ode

#endif  // MFG_ODE_HPP_
