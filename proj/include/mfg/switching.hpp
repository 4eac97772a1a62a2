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

#ifndef MFG_SWITCHING_HPP_
#define MFG_SWITCHING_HPP_

#include "mfg/model.hpp"

namespace mfg {

// Tie function of a strategy pair: g(m) = sum_i (V^{d2}_i(m) - V^{d1}_i(m)).
// Negative where d1 is the better choice. m may leave the simplex slightly
// (finite-difference stencils) as long as the expressions evaluate.
double g_value(const GameModel& model, const DeterministicStrategy& d1,
               const DeterministicStrategy& d2, const Vector& m);

// Central finite differences in ambient coordinates.
Vector grad_g(const GameModel& model, const DeterministicStrategy& d1,
              const DeterministicStrategy& d2, const Vector& m,
              double h = 1e-6);

// Implicit differentiation of (beta I - Q^d) V = r^d using the symbolic rate
// and reward derivatives; used to cross-check grad_g.
Vector grad_g_analytic(const GameModel& model, const DeterministicStrategy& d1,
                       const DeterministicStrategy& d2, const Vector& m);

}  // namespace mfg

#endif  // MFG_SWITCHING_HPP_
