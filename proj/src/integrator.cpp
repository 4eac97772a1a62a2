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

#include <algorithm>
#include <cmath>
#include <limits>

#include "mfg/dynamics.hpp"
#include "mfg/errors.hpp"
#include "mfg/ode.hpp"
#include "mfg/switching.hpp"

namespace mfg {
namespace ode {

Vector DenseStep::operator()(double t) const {
  const double th = (t - t0) / h;
  const double th1 = 1.0 - th;
  return rcont[0] +
         th * (rcont[1] + th1 * (rcont[2] + th * (rcont[3] + th1 * rcont[4])));
}

StepResult dopri5_step(const Field& f, double t, const Vector& y,
                       const Vector& k1, double h, double atol, double rtol) {
  // Dormand & Prince (1980); dense output coefficients from Hairer's DOPRI5.
  constexpr double a21 = 1.0 / 5;
  constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                   a53 = 64448.0 / 6561, a54 = -212.0 / 729;
  constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33,
                   a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                   a65 = -5103.0 / 18656;
  constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192,
                   a75 = -2187.0 / 6784, a76 = 11.0 / 84;
  constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                   e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
  constexpr double d1 = -12715105075.0 / 11282082432.0,
                   d3 = 87487479700.0 / 32700410799.0,
                   d4 = -10690763975.0 / 1880347072.0,
                   d5 = 701980252875.0 / 199316789632.0,
                   d6 = -1453857185.0 / 822651844.0,
                   d7 = 69997945.0 / 29380423.0;

  Vector k2 = f(y + h * (a21 * k1));
  Vector k3 = f(y + h * (a31 * k1 + a32 * k2));
  Vector k4 = f(y + h * (a41 * k1 + a42 * k2 + a43 * k3));
  Vector k5 = f(y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
  Vector k6 = f(y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
  Vector y1 = y + h * (a71 * k1 + a73 * k3 + a74 * k4 + a75 * k5 + a76 * k6);
  Vector k7 = f(y1);

  Vector err = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
  double acc = 0.0;
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    const double sc = atol + rtol * std::max(std::abs(y[i]), std::abs(y1[i]));
    acc += (err[i] / sc) * (err[i] / sc);
  }

  StepResult out;
  out.error = std::sqrt(acc / static_cast<double>(y.size()));
  out.dense.t0 = t;
  out.dense.h = h;
  Vector ydiff = y1 - y;
  Vector bspl = h * k1 - ydiff;
  out.dense.rcont[0] = y;
  out.dense.rcont[1] = ydiff;
  out.dense.rcont[2] = bspl;
  out.dense.rcont[3] = ydiff - h * k7 - bspl;
  out.dense.rcont[4] =
      h * (d1 * k1 + d3 * k3 + d4 * k4 + d5 * k5 + d6 * k6 + d7 * k7);
  out.y1 = std::move(y1);
  out.k_last = std::move(k7);
  return out;
}

double next_step_size(double h, double error) {
  if (!(error > 0.0)) return 5.0 * h;
  const double fac = 0.9 * std::pow(error, -0.2);
  return h * std::clamp(fac, 0.2, 5.0);
}

}  // namespace ode

namespace {

constexpr double kLambdaSlack = 1e-9;
constexpr double kGradFloor = 1e-7;
constexpr int kMaxZeroProgressEvents = 20;

struct SlidingEval {
  Vector field;
  double lambda = 0.0;      // clamped to [0,1]; used for the field
  double raw_lambda = 0.0;  // leaving [0,1] beyond the slack is an exit event
};

class Integrator {
 public:
  Integrator(const GameModel& model, const IntegrateOptions& opts,
             double horizon)
      : model_(model), opts_(opts), horizon_(horizon) {}

  Trajectory run(const Vector& m0);

 private:
  // Field of the current mode; throws on evaluation trouble.
  Vector field(const Vector& m) const;
  SlidingEval sliding(const Vector& m) const;
  // True when the current mode is no longer admissible at m.
  bool violated(const Vector& m) const;
  double sliding_gap(const Vector& m) const;
  Vector to_surface(Vector m) const;

  // Chooses the mode at a switching point. Returns false when the run ends
  // (converged or unresolved); the sample at (t, m) is stored either way.
  bool resolve(double t, const Vector& m,
               const std::optional<DeterministicStrategy>& incoming);
  void record_start(double t, const Vector& m, const DeterministicStrategy& d);
  void start_segment(double t, const Vector& m, Mode mode,
                     DeterministicStrategy d,
                     std::optional<DeterministicStrategy> partner,
                     bool branched, double lambda);
  void push(double t, const Vector& m);

  const GameModel& model_;
  const IntegrateOptions& opts_;
  double horizon_;
  Trajectory traj_;

  Mode mode_ = Mode::kInterior;
  DeterministicStrategy d1_;
  DeterministicStrategy d2_;
  double eta_ = 1e-10;
};

Vector Integrator::field(const Vector& m) const {
  if (mode_ == Mode::kSliding) return sliding(m).field;
  return vector_field(model_.evaluate(m), m, d1_);
}

SlidingEval Integrator::sliding(const Vector& m) const {
  EvaluatedModel em = model_.evaluate(m);
  Vector f1 = vector_field(em, m, d1_);
  Vector f2 = vector_field(em, m, d2_);
  Vector grad = grad_g_analytic(model_, d1_, d2_, m);
  const double s1 = f1.dot(grad);
  const double s2 = f2.dot(grad);
  SlidingEval out;
  out.raw_lambda = (s2 == s1) ? 0.5 : s2 / (s2 - s1);
  out.lambda = std::clamp(out.raw_lambda, 0.0, 1.0);
  out.field = out.lambda * f1 + (1.0 - out.lambda) * f2;
  return out;
}

double Integrator::sliding_gap(const Vector& m) const {
  EvaluatedModel em = model_.evaluate(m);
  Vector v = policy_value(em, model_.beta(), d1_);
  Matrix q = action_values(em, v);
  double gap = std::numeric_limits<double>::infinity();
  for (int i = 0; i < em.state_count(); ++i) {
    const int a1 = d1_[i];
    const int a2 = d2_[i];
    const double own = std::max(q(i, a1), q(i, a2));
    for (int a = 0; a < em.action_count(); ++a) {
      if (em.equivalent_actions(i, a1, a) || em.equivalent_actions(i, a2, a)) {
        continue;
      }
      gap = std::min(gap, own - q(i, a));
    }
  }
  return gap;
}

bool Integrator::violated(const Vector& m) const {
  if (mode_ == Mode::kInterior) {
    return strategy_gap(model_.evaluate(m), model_.beta(), d1_) < -eta_;
  }
  const double lambda = sliding(m).raw_lambda;
  if (lambda < -kLambdaSlack || lambda > 1.0 + kLambdaSlack) return true;
  return sliding_gap(m) < -eta_;
}

Vector Integrator::to_surface(Vector m) const {
  for (int it = 0; it < 10; ++it) {
    const double g = g_value(model_, d1_, d2_, m);
    if (std::abs(g) <= 1e-13 * (1.0 + eta_ * 1e10)) break;
    Vector grad = tangent_part(grad_g_analytic(model_, d1_, d2_, m));
    const double n2 = grad.squaredNorm();
    if (!(n2 > 0.0)) break;
    m -= (g / n2) * grad;
  }
  return project_to_simplex(m).values();
}

void Integrator::push(double t, const Vector& m) {
  TrajectorySample s;
  s.t = t;
  s.m = m;
  s.segment = static_cast<int>(traj_.segments.size()) - 1;
  if (mode_ == Mode::kSliding) s.lambda = sliding(m).lambda;
  if (!traj_.samples.empty() && traj_.samples.back().t == t) {
    traj_.samples.back() = std::move(s);
  } else {
    traj_.samples.push_back(std::move(s));
  }
}

void Integrator::start_segment(double t, const Vector& m, Mode mode,
                               DeterministicStrategy d,
                               std::optional<DeterministicStrategy> partner,
                               bool branched, double lambda) {
  if (!traj_.segments.empty()) traj_.segments.back().t_end = t;
  Segment seg;
  seg.t_begin = t;
  seg.t_end = t;
  seg.mode = mode;
  seg.strategy = d;
  seg.partner = partner;
  seg.branched = branched;
  traj_.segments.push_back(std::move(seg));
  mode_ = mode;
  d1_ = std::move(d);
  if (partner) d2_ = std::move(*partner);
  push(t, m);
  if (mode == Mode::kConverged && partner) traj_.samples.back().lambda = lambda;
}

// Stopping before the first segment still leaves the start point on record.
void Integrator::record_start(double t, const Vector& m,
                              const DeterministicStrategy& d) {
  if (!traj_.samples.empty()) return;
  start_segment(t, m, Mode::kInterior, d, std::nullopt, true,
                std::numeric_limits<double>::quiet_NaN());
}

bool Integrator::resolve(double t, const Vector& m,
                         const std::optional<DeterministicStrategy>& incoming) {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  EvaluatedModel em = model_.evaluate(m);
  eta_ = 1e-10 * (1.0 + em.rewards.cwiseAbs().maxCoeff());
  BestResponseSet br =
      best_response(em, model_.beta(), opts_.tau_opt).effective(em);
  std::vector<DeterministicStrategy> cands = br.strategies();
  std::vector<Vector> fields;
  for (const auto& c : cands) fields.push_back(vector_field(em, m, c));
  const std::size_t n = cands.size();

  auto finish_converged = [&](std::size_t a, std::optional<std::size_t> b,
                              double lambda) {
    std::optional<DeterministicStrategy> partner;
    if (b) partner = cands[*b];
    start_segment(t, m, Mode::kConverged, cands[a], partner, n > 1, lambda);
    traj_.termination = Termination::kConverged;
    return false;
  };

  // A zero field (possibly a convex combination of two vertices) holds the
  // distribution in place: m is a stationary point of the inclusion.
  for (std::size_t a = 0; a < n; ++a) {
    if (fields[a].lpNorm<1>() < opts_.converge_tol) {
      return finish_converged(a, std::nullopt, nan);
    }
  }
  if (n == 1) {
    start_segment(t, m, Mode::kInterior, cands[0], std::nullopt, false, nan);
    return true;
  }
  // Ties that do not change the field leave a single direction to follow.
  bool all_same = true;
  for (std::size_t a = 1; a < n; ++a) {
    if ((fields[a] - fields[0]).lpNorm<1>() >
        1e-12 * (1.0 + fields[0].lpNorm<1>())) {
      all_same = false;
    }
  }
  if (all_same) {
    start_segment(t, m, Mode::kInterior, cands[0], std::nullopt, false, nan);
    return true;
  }
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = a + 1; b < n; ++b) {
      Vector diff = fields[a] - fields[b];
      const double dd = diff.squaredNorm();
      if (!(dd > 0.0)) continue;
      const double lambda = std::clamp(-fields[b].dot(diff) / dd, 0.0, 1.0);
      Vector mix = lambda * fields[a] + (1.0 - lambda) * fields[b];
      if (mix.lpNorm<1>() < opts_.converge_tol) {
        return finish_converged(a, b, lambda);
      }
    }
  }

  // Candidates whose own field carries m into the region where they stay
  // strictly optimal.
  std::vector<std::size_t> consistent;
  for (std::size_t a = 0; a < n; ++a) {
    Vector p = m + opts_.probe_step * fields[a] / fields[a].norm();
    p = clamp_to_simplex(p);
    if (strategy_gap(model_.evaluate(p), model_.beta(), cands[a]) > eta_) {
      consistent.push_back(a);
    }
  }
  if (consistent.size() == 1) {
    start_segment(t, m, Mode::kInterior, cands[consistent[0]], std::nullopt,
                  false, nan);
    return true;
  }
  if (consistent.size() > 1) {
    bool same = true;
    const Vector& f0 = fields[consistent[0]];
    for (std::size_t a : consistent) {
      if ((fields[a] - f0).lpNorm<1>() > 1e-12 * (1.0 + f0.lpNorm<1>())) {
        same = false;
      }
    }
    if (same) {
      start_segment(t, m, Mode::kInterior, cands[consistent[0]], std::nullopt,
                    false, nan);
      return true;
    }
    if (consistent.size() == 2) {
      // Two solutions leave this point; prefer crossing over turning back.
      std::size_t pick = consistent[0];
      if (incoming && cands[pick] == *incoming) pick = consistent[1];
      start_segment(t, m, Mode::kInterior, cands[pick], std::nullopt, true,
                    nan);
      return true;
    }
    record_start(t, m, cands[0]);
    traj_.termination = Termination::kUnresolvedBranching;
    traj_.message = std::to_string(consistent.size()) +
                    " optimal strategies with conflicting directions at t=" +
                    format_double(t);
    return false;
  }

  // No strategy can be followed on its own: look for a surface that
  // attracts from both sides.
  std::vector<std::pair<std::size_t, std::size_t>> attracting;
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = a + 1; b < n; ++b) {
      Vector grad = tangent_part(grad_g_analytic(model_, cands[a], cands[b], m));
      if (grad.norm() <= kGradFloor) continue;
      const double s1 = fields[a].dot(grad);
      const double s2 = fields[b].dot(grad);
      if (s1 > eta_ && s2 < -eta_) attracting.emplace_back(a, b);
    }
  }
  if (attracting.empty()) {
    record_start(t, m, cands[0]);
    traj_.termination = Termination::kUnresolvedBranching;
    traj_.message = "no consistent strategy and no attracting surface at t=" +
                    format_double(t);
    return false;
  }
  auto [a, b] = attracting.front();
  d1_ = cands[a];
  d2_ = cands[b];
  Vector on = to_surface(m);
  start_segment(t, on, Mode::kSliding, cands[a], cands[b],
                attracting.size() > 1, nan);
  return true;
}

Trajectory Integrator::run(const Vector& m0) {
  std::vector<double> outs;
  for (double x : opts_.output_times) {
    if (x > 0.0 && x <= horizon_) outs.push_back(x);
  }
  std::sort(outs.begin(), outs.end());
  outs.erase(std::unique(outs.begin(), outs.end()), outs.end());
  std::size_t next_out = 0;

  traj_ = Trajectory{};
  traj_.min_raw_entry = m0.minCoeff();
  double t = 0.0;
  Vector m = m0;
  bool running = false;
  try {
    running = resolve(0.0, m, std::nullopt);
    m = traj_.samples.back().m;
  } catch (const Error& e) {
    if (traj_.segments.empty()) {
      start_segment(0.0, m, Mode::kInterior, DeterministicStrategy(
                        std::vector<int>(model_.state_count(), 0)),
                    std::nullopt, false, 0.0);
    }
    traj_.termination = Termination::kStepFailure;
    traj_.message = e.what();
    return std::move(traj_);
  }

  double h = opts_.initial_step;
  double last_event_t = -1.0;
  int zero_progress = 0;
  Vector k1;
  bool have_k1 = false;

  while (running && t < horizon_) {
    if (traj_.steps >= opts_.max_steps) {
      traj_.termination = Termination::kStepFailure;
      traj_.message = "step limit reached";
      running = false;
      break;
    }
    try {
      if (!have_k1) k1 = field(m);
    } catch (const Error& e) {
      traj_.termination = Termination::kStepFailure;
      traj_.message = e.what();
      running = false;
      break;
    }
    have_k1 = true;
    if (k1.lpNorm<1>() < opts_.converge_tol) {
      const double lambda =
          mode_ == Mode::kSliding ? traj_.samples.back().lambda : 0.0;
      std::optional<DeterministicStrategy> partner;
      if (mode_ == Mode::kSliding) partner = d2_;
      start_segment(t, m, Mode::kConverged, d1_, partner, false, lambda);
      traj_.termination = Termination::kConverged;
      running = false;
      break;
    }

    double target = horizon_;
    if (next_out < outs.size()) target = std::min(target, outs[next_out]);
    h = std::min(h, opts_.max_step);
    bool lands = false;
    if (t + 1.01 * h >= target) {
      h = target - t;
      lands = true;
    }
    if (h < opts_.min_step && !lands) {
      traj_.termination = Termination::kStepFailure;
      traj_.message = "step size underflow at t=" + format_double(t);
      running = false;
      break;
    }

    ode::StepResult step;
    Vector y1;
    bool ok = true;
    try {
      step = ode::dopri5_step([this](const Vector& y) { return field(y); }, t,
                              m, k1, h, opts_.atol, opts_.rtol);
      if (!step.y1.allFinite() || !(step.error <= 1.0)) {
        ok = false;
      } else {
        y1 = project_to_simplex(step.y1).values();
        if (mode_ == Mode::kSliding) y1 = to_surface(y1);
      }
    } catch (const Error&) {
      ok = false;
    }
    if (!ok) {
      h = (step.error > 1.0 && std::isfinite(step.error))
              ? ode::next_step_size(h, step.error)
              : 0.5 * h;
      if (h < opts_.min_step) {
        traj_.termination = Termination::kStepFailure;
        traj_.message = "step size underflow at t=" + format_double(t);
        running = false;
      }
      continue;
    }
    ++traj_.steps;
    const double t1 = lands ? target : t + h;

    bool event = false;
    try {
      event = violated(y1);
    } catch (const Error&) {
      event = true;
    }
    if (event) {
      double lo = t;
      double hi = t1;
      while (hi - lo > opts_.event_time_tol) {
        const double mid = 0.5 * (lo + hi);
        bool bad = true;
        try {
          bad = violated(step.dense(mid));
        } catch (const Error&) {
        }
        if (bad) {
          hi = mid;
        } else {
          lo = mid;
        }
      }
      Vector raw = step.dense(hi);
      traj_.min_raw_entry = std::min(traj_.min_raw_entry, raw.minCoeff());
      Vector mh;
      try {
        mh = project_to_simplex(raw).values();
      } catch (const Error& e) {
        traj_.termination = Termination::kStepFailure;
        traj_.message = e.what();
        running = false;
        break;
      }
      if (hi - last_event_t < 1e-9) {
        if (++zero_progress > kMaxZeroProgressEvents) {
          traj_.termination = Termination::kStepFailure;
          traj_.message = "switching events stall at t=" + format_double(hi);
          running = false;
          break;
        }
      } else {
        zero_progress = 0;
      }
      last_event_t = hi;
      const std::optional<DeterministicStrategy> incoming =
          mode_ == Mode::kInterior ? std::optional(d1_) : std::nullopt;
      t = hi;
      try {
        running = resolve(t, mh, incoming);
      } catch (const Error& e) {
        traj_.termination = Termination::kStepFailure;
        traj_.message = e.what();
        running = false;
      }
      m = traj_.samples.back().m;
      have_k1 = false;
      h = std::min(opts_.initial_step, std::max(h, 1e3 * opts_.min_step));
      if (lands && t == target && next_out < outs.size() &&
          outs[next_out] == t) {
        ++next_out;
      }
      continue;
    }

    traj_.min_raw_entry = std::min(traj_.min_raw_entry, step.y1.minCoeff());
    t = t1;
    m = std::move(y1);
    if (mode_ == Mode::kSliding) {
      have_k1 = false;  // the surface projection moved m
    } else {
      k1 = std::move(step.k_last);
      // The projection moves m by rounding only; FSAL stays valid.
    }
    const bool at_output = lands && next_out < outs.size() &&
                           outs[next_out] == t;
    if (at_output) ++next_out;
    if (opts_.record_steps || at_output || t >= horizon_) push(t, m);
    h = ode::next_step_size(h, step.error);
  }

  if (!traj_.segments.empty()) traj_.segments.back().t_end = t;
  if (traj_.termination == Termination::kConverged) {
    const TrajectorySample last = traj_.samples.back();
    for (; next_out < outs.size(); ++next_out) {
      if (outs[next_out] <= last.t) continue;
      TrajectorySample s = last;
      s.t = outs[next_out];
      traj_.samples.push_back(std::move(s));
    }
    if (traj_.message.empty()) traj_.message = "field vanished";
  } else if (traj_.termination == Termination::kHorizon) {
    traj_.message = "horizon reached";
  }
  return std::move(traj_);
}

}  // namespace

Trajectory integrate(const GameModel& model, const Distribution& m0,
                     double horizon, const IntegrateOptions& opts) {
  if (!(horizon > 0.0)) throw PreconditionError("horizon must be positive");
  if (m0.size() != model.state_count()) {
    throw PreconditionError("initial distribution has the wrong size");
  }
  Integrator integrator(model, opts, horizon);
  return integrator.run(m0.values());
}

}  // namespace mfg
