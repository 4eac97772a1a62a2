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

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace myopic {

enum ExitCode : int {
  kOk = 0,
  kValidationFailure = 1,
  kIntegrationFailure = 2,
  kSolverFailure = 3,
  kInconclusive = 10,
  kFailsUniqueness = 11,
  kUsage = 64,
};

struct RunConfig {
  std::string model_path;
  std::string example;
  std::vector<std::string> overrides;  // key=value
  std::string format = "json";
  std::uint64_t seed = 1;
  std::string out;
  double horizon = 100.0;
  double tol_opt = 1e-9;

  // validate
  int samples = 1000;
  // trajectory
  std::vector<std::string> m0;
  int grid = 0;
  double dt = 0.1;
  bool all_steps = false;
  int threads = 0;
  // equilibria / stability
  std::vector<std::string> mixed;
  std::vector<std::string> strategies;
  std::vector<std::string> global;
  // examples export
  std::string export_name;
  std::string export_path;
};

int cmd_validate(const RunConfig& cfg, std::ostream& out);
int cmd_trajectory(const RunConfig& cfg, std::ostream& out);
int cmd_equilibria(const RunConfig& cfg, std::ostream& out);
int cmd_stability(const RunConfig& cfg, std::ostream& out);
int cmd_examples_list(std::ostream& out);
int cmd_examples_export(const RunConfig& cfg, std::ostream& out);

}  // namespace myopic
