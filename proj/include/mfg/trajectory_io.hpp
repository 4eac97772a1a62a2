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

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mfg/dynamics.hpp"
#include "mfg/model.hpp"

namespace mfg {

// One row of a trajectory CSV: t,m1..mS,mode,strategy,lambda.
struct CsvRow {
  double t = 0.0;
  Vector m;
  std::string mode;
  std::string strategy;
  std::optional<double> lambda;  // empty outside sliding
};

std::string trajectory_csv(const Trajectory& traj, const GameModel& model);

// Throws ParseError on malformed input (header or row).
std::vector<CsvRow> parse_trajectory_csv(std::string_view text);

}  // namespace mfg
