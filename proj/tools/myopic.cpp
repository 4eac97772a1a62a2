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

// myopic: command-line front end for the mean field game toolkit.

#include <CLI11.hpp>
#include <iostream>

#include "commands.hpp"
#include "mfg/errors.hpp"
#include "usage.hpp"

int main(int argc, char** argv) {
  using namespace myopic;
  RunConfig cfg;
  CLI::App app{"Myopic adjustment dynamics and equilibria of finite mean field games"};
  app.require_subcommand(1);
  app.fallthrough();

  auto* src = app.add_option_group("model source");
  src->add_option("--model", cfg.model_path, "Model file (.json or .toml)");
  src->add_option("--example", cfg.example, "Built-in example name");
  app.add_option("--set", cfg.overrides, "Parameter override key=value (repeatable)");
  app.add_option("--format", cfg.format, "Report format")
      ->check(CLI::IsMember({"json", "text"}));
  app.add_option("--seed", cfg.seed, "Seed for sampled checks");
  app.add_option("--out", cfg.out, "Output file (directory for trajectory)");
  app.add_option("--horizon", cfg.horizon, "Integration horizon");
  app.add_option("--tol-opt", cfg.tol_opt, "Optimality tolerance");

  auto* validate = app.add_subcommand("validate", "Check rates for nonnegativity and row sums");
  validate->add_option("--samples", cfg.samples, "Quasi-random sample points")
      ->check(CLI::NonNegativeNumber);

  auto* traj = app.add_subcommand("trajectory", "Integrate the best-response inclusion");
  traj->add_option("--m0", cfg.m0, "Initial distribution, comma separated (repeatable)");
  traj->add_option("--grid", cfg.grid, "Number of evenly spaced starts")
      ->check(CLI::NonNegativeNumber);
  traj->add_option("--dt", cfg.dt, "Output spacing");
  traj->add_flag("--all-steps", cfg.all_steps, "Also store every accepted step");
  traj->add_option("--threads", cfg.threads, "Worker threads (0 = all cores)");

  auto* eq = app.add_subcommand("equilibria", "Find stationary equilibria");
  eq->add_option("--mixed", cfg.mixed, "Two strategies to mix")->expected(2);

  auto* stab = app.add_subcommand("stability", "Local and global convergence checks");
  stab->add_option("--strategy", cfg.strategies, "Equilibrium strategy to check (repeatable)");
  stab->add_option("--global", cfg.global, "Two strategies bounding a switching surface")
      ->expected(2);

  auto* ex = app.add_subcommand("examples", "Built-in examples");
  ex->require_subcommand(1);
  auto* ex_list = ex->add_subcommand("list", "List example names");
  auto* ex_export = ex->add_subcommand("export", "Write an example model file");
  ex_export->add_option("name", cfg.export_name)->required();
  ex_export->add_option("file", cfg.export_path)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kUsage;
  }

  try {
    if (*validate) return cmd_validate(cfg, std::cout);
    if (*traj) return cmd_trajectory(cfg, std::cout);
    if (*eq) return cmd_equilibria(cfg, std::cout);
    if (*stab) return cmd_stability(cfg, std::cout);
    if (*ex_list) return cmd_examples_list(std::cout);
    if (*ex_export) return cmd_examples_export(cfg, std::cout);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kUsage;
  } catch (const mfg::PreconditionError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kUsage;
  } catch (const mfg::SolverError& e) {
    std::cerr << "solver failure: " << e.what() << "\n";
    return kSolverFailure;
  } catch (const mfg::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kValidationFailure;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kValidationFailure;
  }
  return kUsage;
}
