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

#ifndef MFG_BUILTIN_HPP_
#define MFG_BUILTIN_HPP_

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "mfg/model.hpp"

namespace mfg::examples {

// Two providers; utility grows with the share using the same provider,
// switching costs c per unit time and happens at rate b (else drift eps).
struct ConsumerChoiceParams {
  double b = 1.0;
  double eps = 0.1;
  double beta = 0.5;
  double c = 0.2;
  double s1 = 0.0;
  double s2 = 0.0;
  double delta = 0.01;  // slog smoothing width
};

// Two congested "good" states and one "bad" state; agents may switch
// between the good states at rate b.
struct CongestionParams {
  double b = 1.0;
  double e = 1.0;
  double eps = 0.5;
  double lambda = 1.0;
  double beta = 0.5;
};

// Throw ModelError when the parameter constraints fail.
void check(const ConsumerChoiceParams& p);
void check(const CongestionParams& p);

// Actions are ordered (change, stay) in both models.
GameModel consumer_choice_model(const ConsumerChoiceParams& p = {});
GameModel congestion_model(const CongestionParams& p = {});

// Closed-form switching thresholds (k1, k2) on m1.
std::pair<double, double> consumer_choice_thresholds(
    const ConsumerChoiceParams& p = {});

// Scalar Riccati solution m1(t) of the diagonal sliding motion started at
// m = (m1_0, m1_0, 1 - 2 m1_0), and its stable fixed point.
double congestion_riccati_reference(const CongestionParams& p, double m1_0,
                                    double t);
double congestion_fixed_point(const CongestionParams& p = {});

std::vector<std::string> example_names();
// Builds a named example with `key=value` overrides applied to its
// parameters; unknown names or keys throw ModelError.
GameModel example_model(const std::string& name,
                        const std::map<std::string, double>& overrides = {});

}  // namespace mfg::examples

#endif  // MFG_BUILTIN_HPP_
