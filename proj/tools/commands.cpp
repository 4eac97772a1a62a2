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

#include "commands.hpp"

#include <atomic>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <functional>
#include <map>
#include <ostream>
#include <sstream>
#include <thread>

#include "mfg/builtin.hpp"
#include "mfg/dynamics.hpp"
#include "mfg/equilibrium.hpp"
#include "mfg/errors.hpp"
#include "mfg/expr.hpp"
#include "mfg/model_io.hpp"
#include "mfg/report_json.hpp"
#include "mfg/stability.hpp"
#include "mfg/trajectory_io.hpp"
#include "usage.hpp"

namespace myopic {
namespace {

using mfg::Json;
namespace fs = std::filesystem;

double parse_number(std::string_view s, const std::string& what) {
  double v = 0.0;
  auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || end != s.data() + s.size()) {
    throw UsageError("bad number in " + what + ": '" + std::string(s) + "'");
  }
  return v;
}

std::map<std::string, double> parse_overrides(const RunConfig& cfg) {
  std::map<std::string, double> out;
  for (const auto& kv : cfg.overrides) {
    auto eq = kv.find('=');
    if (eq == std::string::npos || eq == 0) {
      throw UsageError("--set expects key=value, got '" + kv + "'");
    }
    out[kv.substr(0, eq)] = parse_number(std::string_view(kv).substr(eq + 1), "--set");
  }
  return out;
}

mfg::GameModel load(const RunConfig& cfg) {
  if (cfg.model_path.empty() == cfg.example.empty()) {
    throw UsageError("give exactly one of --model or --example");
  }
  auto overrides = parse_overrides(cfg);
  if (!cfg.example.empty()) return mfg::examples::example_model(cfg.example, overrides);
  mfg::GameModel model = mfg::load_model(cfg.model_path);
  for (const auto& [k, v] : overrides) model = model.with_parameter(k, v);
  return model;
}

mfg::Vector parse_point(const std::string& text, int S) {
  std::vector<double> xs;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t comma = text.find(',', start);
    if (comma == std::string::npos) comma = text.size();
    xs.push_back(parse_number(std::string_view(text).substr(start, comma - start), "--m0"));
    start = comma + 1;
  }
  if (static_cast<int>(xs.size()) != S) {
    throw UsageError("--m0 needs " + std::to_string(S) + " entries");
  }
  return Eigen::Map<mfg::Vector>(xs.data(), S);
}

mfg::DeterministicStrategy strategy_arg(const std::string& text,
                                        const mfg::GameModel& model) {
  try {
    return mfg::parse_strategy(text, model.state_count(), model.action_labels());
  } catch (const mfg::Error& e) {
    throw UsageError(e.what());
  }
}

// Interior lattice: entries k_i / (n + 1) with k_i >= 1 summing to n + 1.
// For two states this is m1 = k / (n + 1), k = 1..n.
std::vector<mfg::Vector> lattice(int S, int n) {
  std::vector<mfg::Vector> out;
  const int total = n + 1;
  std::vector<int> k(S, 1);
  std::function<void(int, int)> rec = [&](int i, int left) {
    if (i == S - 1) {
      k[i] = left;
      mfg::Vector v(S);
      for (int j = 0; j < S; ++j) v[j] = static_cast<double>(k[j]) / total;
      out.push_back(v);
      return;
    }
    for (int x = 1; x <= left - (S - 1 - i); ++x) {
      k[i] = x;
      rec(i + 1, left - x);
    }
  };
  if (total >= S) rec(0, total);
  return out;
}

std::string vec_text(const mfg::Vector& v) {
  std::string s = "(";
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (i) s += ", ";
    s += mfg::format_double(v[i]);
  }
  return s + ")";
}

void emit(const RunConfig& cfg, std::ostream& out, const Json& doc,
          const std::string& text) {
  const std::string body = cfg.format == "json" ? doc.dump(2) + "\n" : text;
  if (cfg.out.empty()) {
    out << body;
  } else {
    mfg::write_file_atomic(cfg.out, body);
  }
}

mfg::EquilibriumOptions eq_options(const RunConfig& cfg) {
  mfg::EquilibriumOptions eo;
  eo.tau_opt = cfg.tol_opt;
  return eo;
}

}  // namespace

int cmd_validate(const RunConfig& cfg, std::ostream& out) {
  mfg::GameModel model = load(cfg);
  mfg::ValidationReport rep = mfg::validate_model(model, cfg.samples);
  std::ostringstream text;
  if (rep.ok()) {
    text << "ok: " << rep.points_checked << " points checked, growth bound "
         << mfg::format_double(rep.growth_bound) << "\n";
  } else {
    text << rep.violations.size() << " violation(s):\n";
    for (const auto& v : rep.violations) {
      text << "  " << mfg::to_string(v.kind) << " at m=" << vec_text(v.m)
           << ": " << v.message << "\n";
    }
  }
  emit(cfg, out, mfg::to_json(rep, model), text.str());
  return rep.ok() ? kOk : kValidationFailure;
}

int cmd_trajectory(const RunConfig& cfg, std::ostream& out) {
  mfg::GameModel model = load(cfg);
  const int S = model.state_count();
  if (!(cfg.horizon > 0.0)) throw UsageError("--horizon must be positive");
  if (!(cfg.dt > 0.0)) throw UsageError("--dt must be positive");
  std::vector<mfg::Distribution> starts;
  for (const auto& s : cfg.m0) starts.emplace_back(parse_point(s, S));
  if (cfg.grid > 0) {
    for (const auto& v : lattice(S, cfg.grid)) starts.emplace_back(v);
  }
  if (starts.empty()) throw UsageError("give --m0 or --grid");

  mfg::IntegrateOptions io;
  io.tau_opt = cfg.tol_opt;
  io.record_steps = cfg.all_steps;
  const long n_out = static_cast<long>(std::floor(cfg.horizon / cfg.dt + 1e-9));
  for (long k = 1; k <= n_out; ++k) io.output_times.push_back(k * cfg.dt);
  if (io.output_times.empty() || io.output_times.back() < cfg.horizon) {
    io.output_times.push_back(cfg.horizon);
  }

  const fs::path dir = cfg.out.empty() ? fs::path(".") : fs::path(cfg.out);
  fs::create_directories(dir);
  auto file_name = [&](std::size_t k) {
    std::string idx = std::to_string(k + 1);
    return "trajectory_" + std::string(idx.size() < 3 ? 3 - idx.size() : 0, '0') +
           idx + ".csv";
  };

  // Starts are independent; each worker integrates and writes its own file.
  std::vector<mfg::Trajectory> results(starts.size());
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t k = next++; k < starts.size(); k = next++) {
      results[k] = mfg::integrate(model, starts[k], cfg.horizon, io);
      mfg::write_file_atomic(dir / file_name(k),
                             mfg::trajectory_csv(results[k], model));
    }
  };
  unsigned n_threads = cfg.threads > 0 ? static_cast<unsigned>(cfg.threads)
                                       : std::max(1u, std::thread::hardware_concurrency());
  n_threads = std::min<unsigned>(n_threads, static_cast<unsigned>(starts.size()));
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < n_threads; ++t) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();

  std::vector<mfg::EquilibriumReport> equilibria;
  try {
    equilibria = mfg::find_deterministic_equilibria(model, eq_options(cfg)).equilibria;
  } catch (const mfg::Error&) {
    // Summaries just lose the nearest-equilibrium field.
  }

  Json summary = Json::array();
  std::ostringstream text;
  int code = kOk;
  for (std::size_t k = 0; k < starts.size(); ++k) {
    const mfg::Trajectory& tr = results[k];
    if (tr.termination == mfg::Termination::kStepFailure ||
        tr.termination == mfg::Termination::kUnresolvedBranching) {
      code = kIntegrationFailure;
    }
    Json j;
    j["file"] = file_name(k);
    j["m0"] = mfg::vector_json(starts[k].values());
    Json tail = mfg::trajectory_summary(tr, model, equilibria);
    for (auto& [key, value] : tail.items()) j[key] = value;
    text << file_name(k) << ": " << vec_text(starts[k].values()) << " -> "
         << vec_text(tr.back().m) << " [" << mfg::to_string(tr.termination)
         << ", " << mfg::to_string(tr.mode_of(tr.back())) << "]\n";
    summary.push_back(std::move(j));
  }
  const std::string body = cfg.format == "json" ? summary.dump(2) + "\n" : text.str();
  mfg::write_file_atomic(dir / "summary.json", summary.dump(2) + "\n");
  out << body;
  return code;
}

int cmd_equilibria(const RunConfig& cfg, std::ostream& out) {
  mfg::GameModel model = load(cfg);
  const auto eo = eq_options(cfg);
  std::vector<mfg::EquilibriumReport> found =
      mfg::find_deterministic_equilibria(model, eo).equilibria;
  if (!cfg.mixed.empty()) {
    if (cfg.mixed.size() != 2) throw UsageError("--mixed takes two strategies");
    auto d1 = strategy_arg(cfg.mixed[0], model);
    auto d2 = strategy_arg(cfg.mixed[1], model);
    auto ms = mfg::find_mixed_equilibria_two_strategy(model, d1, d2, eo);
    found.insert(found.end(), ms.equilibria.begin(), ms.equilibria.end());
  }
  Json doc = Json::array();
  std::ostringstream text;
  for (const auto& r : found) {
    doc.push_back(mfg::to_json(r, model));
    text << vec_text(r.m) << " ";
    if (r.deterministic) {
      text << r.deterministic->label(model.action_labels());
    } else {
      text << "mixed";
      for (double w : r.weights) text << " w=" << mfg::format_double(w);
      if (r.family) text << " (family)";
    }
    text << " residual=" << mfg::format_double(r.residual) << "\n";
  }
  if (found.empty()) text << "no equilibria\n";
  emit(cfg, out, doc, text.str());
  return kOk;
}

int cmd_stability(const RunConfig& cfg, std::ostream& out) {
  mfg::GameModel model = load(cfg);
  const auto eo = eq_options(cfg);
  const int A = model.action_count();

  std::vector<mfg::EquilibriumReport> targets;
  if (!cfg.strategies.empty()) {
    for (const auto& s : cfg.strategies) {
      auto d = strategy_arg(s, model);
      auto pi = mfg::MixedStrategy::from(d, A);
      bool any = false;
      for (const auto& root : mfg::stationary_distribution(model, pi, eo)) {
        auto rep = mfg::assess_equilibrium(model, root.values(), pi, eo);
        if (!rep.equilibrium) continue;
        rep.deterministic = d;
        targets.push_back(std::move(rep));
        any = true;
      }
      if (!any) throw mfg::SolverError("strategy " + s + " has no equilibrium distribution");
    }
  } else if (cfg.global.empty()) {
    targets = mfg::find_deterministic_equilibria(model, eo).equilibria;
  }

  mfg::LocalCheckOptions lo;
  lo.seed = cfg.seed;
  lo.tau_opt = cfg.tol_opt;
  Json local = Json::array();
  std::ostringstream text;
  int code = kOk;
  for (const auto& t : targets) {
    mfg::StabilityReport st = mfg::local_check(model, t, lo);
    if (st.classification == mfg::LocalClass::kFailsUniqueness) {
      code = kFailsUniqueness;
    } else if (st.classification == mfg::LocalClass::kInconclusive && code == kOk) {
      code = kInconclusive;
    }
    local.push_back(mfg::to_json(st, model));
    text << st.strategy.label(model.action_labels()) << " at " << vec_text(st.m)
         << ": " << mfg::to_string(st.classification);
    if (!st.reason.empty()) text << " (" << st.reason << ")";
    text << ", eps=" << mfg::format_double(st.epsilon_radius);
    if (st.delta) text << ", delta=" << mfg::format_double(st.delta->delta);
    text << "\n";
  }

  Json doc;
  doc["local"] = std::move(local);
  doc["global"] = nullptr;
  if (!cfg.global.empty()) {
    if (cfg.global.size() != 2) throw UsageError("--global takes two strategies");
    mfg::GlobalCheckOptions go;
    go.seed = cfg.seed;
    auto gr = mfg::global_check(model, strategy_arg(cfg.global[0], model),
                                strategy_arg(cfg.global[1], model), go);
    doc["global"] = mfg::to_json(gr);
    text << "global: case " << mfg::to_string(gr.label) << " on "
         << gr.samples.size() << " surface samples";
    if (!gr.violations.empty()) text << ", " << gr.violations.size() << " violation(s)";
    text << "\n";
  }
  emit(cfg, out, doc, text.str());
  return code;
}

int cmd_examples_list(std::ostream& out) {
  for (const auto& n : mfg::examples::example_names()) out << n << "\n";
  return kOk;
}

int cmd_examples_export(const RunConfig& cfg, std::ostream& out) {
  auto model = mfg::examples::example_model(cfg.export_name, parse_overrides(cfg));
  mfg::save_model(model, cfg.export_path);
  out << "wrote " << cfg.export_path << "\n";
  return kOk;
}

}  // namespace myopic
