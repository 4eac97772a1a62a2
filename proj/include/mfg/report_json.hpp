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

#pragma once

#include <json.hpp>
#include <vector>

#include "mfg/dynamics.hpp"
#include "mfg/equilibrium.hpp"
#include "mfg/model.hpp"
#include "mfg/stability.hpp"

namespace mfg {

using Json = nlohmann::ordered_json;

Json vector_json(const Vector& v);
Json to_json(const ValidationReport& r, const GameModel& model);
Json to_json(const EquilibriumReport& r, const GameModel& model);
Json to_json(const StabilityReport& r, const GameModel& model);
Json to_json(const ExplicitDelta& d);
Json to_json(const GlobalCheckReport& r);

// Terminal state of a run; `nearest` is the closest of `equilibria` when
// within `radius` (Euclidean), otherwise null.
Json trajectory_summary(const Trajectory& traj, const GameModel& model,
                        const std::vector<EquilibriumReport>& equilibria,
                        double radius = 1e-3);

}  // namespace mfg
