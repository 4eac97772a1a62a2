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

#include "mfg/stability.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "mfg/dynamics.hpp"
#include "mfg/errors.hpp"
#include "mfg/switching.hpp"

namespace mfg {
namespace {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;

bool unique_best(const GameModel& model, const Vector& m,
                 const DeterministicStrategy& d, double tau) {
  EvaluatedModel em = model.evaluate(m);
  BestResponseSet br = best_response(em, model.beta(), tau).effective(em);
  return br.size() == 1 &&
         br.contains(canonical_strategy(em, d));
}

// Point at distance up to r from m in a random tangent direction, cut at the
// simplex boundary along the ray.
Vector point_near(const Vector& m, double r, bool in_ball,
                  std::mt19937_64& rng) {
  const int S = static_cast<int>(m.size());
  Vector u = random_tangent_direction(S, rng);
  double rho = r;
  if (in_ball) {
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    rho = r * std::pow(unif(rng), 1.0 / (S - 1));
  }
  rho = std::min(rho, max_step_inside(m, u));
  return clamp_to_simplex(m + rho * u);
}

double angle_between(const Vector& a, const Vector& b) {
  Vector ua = a / a.norm();
  Vector ub = b / b.norm();
  const double c = ua.dot(ub);
  const double s = (ua - c * ub).norm();
  return std::atan2(s, std::abs(c));
}

Vector realify(const ComplexVector& v) {
  Eigen::Index k = 0;
  v.cwiseAbs().maxCoeff(&k);
  const Complex phase = std::conj(v[k]) / std::abs(v[k]);
  return (v * phase).real();
}

bool empirical_check(const GameModel& model, const Vector& m_bar, double r,
                     const LocalCheckOptions& opts, double& worst) {
  std::mt19937_64 rng(opts.seed ^ 0x9e3779b97f4a7c15ULL);
  IntegrateOptions io;
  io.record_steps = false;
  const int n_out = 100;
  for (int k = 1; k <= n_out; ++k) {
    io.output_times.push_back(opts.empirical_horizon * k / n_out);
  }
  worst = 0.0;
  bool ok = true;
  for (int s = 0; s < opts.empirical_starts; ++s) {
    Vector p = point_near(m_bar, r / 4.0, false, rng);
    Trajectory tr = integrate(model, project_to_simplex(p), opts.empirical_horizon, io);
    if (tr.termination == Termination::kStepFailure ||
        tr.termination == Termination::kUnresolvedBranching) {
      ok = false;
      continue;
    }
    const TrajectorySample* end = tr.at(opts.empirical_horizon);
    if (!end) {
      ok = false;
      continue;
    }
    const double dist = (end->m - m_bar).norm();
    worst = std::max(worst, dist);
    if (dist > opts.empirical_tolerance) ok = false;
    // Envelope: maxima over ten windows must not grow.
    std::vector<double> window(10, 0.0);
    for (const auto& smp : tr.samples) {
      int w = std::min(9, static_cast<int>(10.0 * smp.t / opts.empirical_horizon));
      window[w] = std::max(window[w], (smp.m - m_bar).norm());
    }
    for (int w = 1; w < 10; ++w) {
      if (window[w] > window[w - 1] + 1e-12) ok = false;
    }
  }
  return ok;
}

Matrix constant_generator(const GameModel& model,
                          const DeterministicStrategy& d) {
  const int S = model.state_count();
  Matrix q0 = model.evaluate(Vector::Constant(S, 1.0 / S)).generator(d);
  std::vector<Vector> pts = quasi_random_simplex_points(S, 20);
  for (int i = 0; i < S; ++i) pts.push_back(Distribution::vertex(S, i).values());
  for (const Vector& p : pts) {
    Matrix q = model.evaluate(p).generator(d);
    if ((q - q0).cwiseAbs().maxCoeff() > 1e-10) {
      throw PreconditionError("the generator of the strategy depends on m");
    }
  }
  return q0;
}

}  // namespace

Matrix jacobian_f(const GameModel& model, const DeterministicStrategy& d,
                  const Vector& m) {
  return field_jacobian(model, m, d);
}

std::vector<EigenCluster> cluster_eigenvalues(const Matrix& a) {
  Eigen::EigenSolver<Matrix> es(a, false);
  if (es.info() != Eigen::Success) throw SolverError("eigenvalue solver failed");
  std::vector<Complex> ev(es.eigenvalues().data(),
                          es.eigenvalues().data() + es.eigenvalues().size());
  std::vector<EigenCluster> out;
  std::vector<Complex> sums;
  for (const Complex& z : ev) {
    bool joined = false;
    for (std::size_t c = 0; c < out.size(); ++c) {
      if (std::abs(z - out[c].value) <= 1e-6 * (1.0 + std::abs(z))) {
        sums[c] += z;
        ++out[c].multiplicity;
        out[c].value = sums[c] / static_cast<double>(out[c].multiplicity);
        joined = true;
        break;
      }
    }
    if (!joined) {
      out.push_back({z, 1});
      sums.push_back(z);
    }
  }
  std::sort(out.begin(), out.end(), [](const EigenCluster& x, const EigenCluster& y) {
    if (x.value.real() != y.value.real()) return x.value.real() > y.value.real();
    return x.value.imag() > y.value.imag();
  });
  return out;
}

ExplicitDelta explicit_delta(const GameModel& model,
                             const EquilibriumReport& report,
                             double epsilon_radius) {
  if (!report.deterministic) {
    throw PreconditionError("explicit delta needs a deterministic strategy");
  }
  if (!(epsilon_radius > 0.0)) {
    throw PreconditionError("epsilon radius must be positive");
  }
  const int S = model.state_count();
  Matrix mt = constant_generator(model, *report.deterministic).transpose();
  std::vector<EigenCluster> clusters = cluster_eigenvalues(mt);
  ExplicitDelta out;
  out.epsilon_radius = epsilon_radius;
  int zeros = 0;
  for (const auto& c : clusters) {
    if (std::abs(c.value) <= 1e-9) {
      zeros += c.multiplicity;
    } else {
      if (!(c.value.real() < 0.0)) {
        throw PreconditionError("a nonzero eigenvalue has non-negative real part");
      }
      out.clusters.push_back(c);
    }
  }
  if (zeros != 1) {
    throw PreconditionError("zero eigenvalue is not simple; generator is not irreducible");
  }
  double max_c = 0.0;
  double min_norm = std::numeric_limits<double>::infinity();
  const ComplexMatrix mc = mt.cast<Complex>();
  for (const auto& c : out.clusters) {
    const ComplexMatrix b = mc - c.value * ComplexMatrix::Identity(S, S);
    ComplexMatrix power = ComplexMatrix::Identity(S, S);
    for (int k = 0; k < c.multiplicity; ++k) power = power * b;
    Eigen::JacobiSVD<ComplexMatrix> svd(power, Eigen::ComputeFullV);
    const ComplexMatrix basis = svd.matrixV().rightCols(c.multiplicity);
    const double rate = -c.value.real();
    for (int k = 0; k < c.multiplicity; ++k) {
      ComplexVector v = basis.col(k);
      v /= v.norm();
      min_norm = std::min(min_norm, v.norm());
      double ck = 0.0;
      ComplexVector bv = v;
      for (int l = 0; l < c.multiplicity; ++l) {
        // e^{-l} l^l / (l! rate^l), with 0^0 = 1.
        double coef = 1.0;
        for (int q = 1; q <= l; ++q) {
          coef *= static_cast<double>(l) / (std::exp(1.0) * q * rate);
        }
        ck += coef * bv.norm();
        bv = b * bv;
      }
      out.constants.push_back(ck);
      max_c = std::max(max_c, ck);
    }
  }
  out.min_basis_norm = out.clusters.empty() ? 1.0 : min_norm;
  out.delta = out.clusters.empty()
                  ? epsilon_radius / 2.0
                  : (epsilon_radius / 2.0) * out.min_basis_norm / max_c;
  return out;
}

std::string to_string(LocalClass c) {
  switch (c) {
    case LocalClass::kLocallyConvergent: return "locally-convergent";
    case LocalClass::kInconclusive: return "inconclusive";
    case LocalClass::kFailsUniqueness: return "fails-uniqueness";
  }
  return "unknown";
}

StabilityReport local_check(const GameModel& model,
                            const EquilibriumReport& report,
                            const LocalCheckOptions& opts) {
  if (!report.deterministic) {
    throw PreconditionError("local check needs a deterministic strategy");
  }
  const DeterministicStrategy& d = *report.deterministic;
  const Vector& m_bar = report.m;
  StabilityReport out;
  out.m = m_bar;
  out.strategy = d;
  out.unique = unique_best(model, m_bar, d, opts.tau_opt);

  try {
    out.eigenvalues = cluster_eigenvalues(jacobian_f(model, d, m_bar));
  } catch (const Error& e) {
    out.classification = out.unique ? LocalClass::kInconclusive
                                    : LocalClass::kFailsUniqueness;
    out.reason = e.what();
    return out;
  }
  bool others_negative = true;
  for (const auto& c : out.eigenvalues) {
    if (std::abs(c.value.real()) <= opts.zero_band) {
      out.zero_eigenvalues += c.multiplicity;
    } else if (c.value.real() > -opts.zero_band) {
      others_negative = false;
    }
  }
  if (out.zero_eigenvalues == 1) {
    Eigen::EigenSolver<Matrix> es(jacobian_f(model, d, m_bar), true);
    Eigen::Index k = 0;
    es.eigenvalues().real().cwiseAbs().minCoeff(&k);
    out.zero_alignment = angle_between(realify(es.eigenvectors().col(k)), m_bar);
  }

  if (!out.unique) {
    out.classification = LocalClass::kFailsUniqueness;
    out.reason = "the best response at the equilibrium is not unique";
    return out;
  }

  // Largest radius (up to epsilon_max) on which d stays the only best response.
  std::mt19937_64 rng(opts.seed);
  auto holds = [&](double r) {
    for (int k = 0; k < opts.points_per_radius; ++k) {
      if (!unique_best(model, point_near(m_bar, r, k % 2 == 1, rng), d,
                       opts.tau_opt)) {
        return false;
      }
    }
    return true;
  };
  if (holds(opts.epsilon_max)) {
    out.epsilon_radius = opts.epsilon_max;
  } else {
    double lo = 0.0;
    double hi = opts.epsilon_max;
    for (int it = 0; it < opts.bisection_steps; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (holds(mid)) {
        lo = mid;
      } else {
        hi = mid;
      }
    }
    out.epsilon_radius = lo;
  }

  if (out.zero_eigenvalues != 1) {
    out.classification = LocalClass::kInconclusive;
    out.reason = "zero eigenvalue has multiplicity " +
                 std::to_string(out.zero_eigenvalues);
  } else if (!(out.zero_alignment <= opts.alignment_limit)) {
    out.classification = LocalClass::kInconclusive;
    out.reason = "null eigenvector is not aligned with the equilibrium";
  } else if (!others_negative) {
    out.classification = LocalClass::kInconclusive;
    out.reason = "a nonzero eigenvalue has non-negative real part";
  } else {
    out.classification = LocalClass::kLocallyConvergent;
  }

  if (out.epsilon_radius > 0.0) {
    out.empirical_ran = true;
    out.empirical_passed = empirical_check(model, m_bar, out.epsilon_radius,
                                           opts, out.empirical_max_distance);
    if (out.classification == LocalClass::kLocallyConvergent &&
        !out.empirical_passed) {
      out.classification = LocalClass::kInconclusive;
      out.reason = "integration from nearby starts did not settle";
    }
    try {
      out.delta = explicit_delta(model, report, out.epsilon_radius);
    } catch (const PreconditionError&) {
      // Not a constant irreducible generator: no explicit radius.
    }
  } else if (out.classification == LocalClass::kLocallyConvergent) {
    out.classification = LocalClass::kInconclusive;
    out.reason = "no neighborhood with a unique best response was found";
  }
  return out;
}

std::string to_string(GlobalCase c) {
  switch (c) {
    case GlobalCase::kCaseI: return "i";
    case GlobalCase::kCaseII: return "ii";
    case GlobalCase::kCaseIII: return "iii";
    case GlobalCase::kNone: return "none";
    case GlobalCase::kSurfaceNotFound: return "surface-not-found";
  }
  return "unknown";
}

GlobalCheckReport global_check(const GameModel& model,
                               const DeterministicStrategy& d1,
                               const DeterministicStrategy& d2,
                               const GlobalCheckOptions& opts) {
  const int S = model.state_count();
  if (d1 == d2) throw PreconditionError("the two strategies must differ");
  if (d1.size() != S || d2.size() != S) {
    throw PreconditionError("strategy does not match the model");
  }
  GlobalCheckReport out;
  std::mt19937_64 rng(opts.seed);
  auto g = [&](const Vector& m) { return g_value(model, d1, d2, m); };
  const int max_chords = 10 * opts.n_samples;
  while (static_cast<int>(out.samples.size()) < opts.n_samples &&
         out.chords_tried < max_chords) {
    ++out.chords_tried;
    Vector a = random_simplex_point(S, rng);
    Vector b = random_simplex_point(S, rng);
    double ga = 0.0;
    double gb = 0.0;
    try {
      ga = g(a);
      gb = g(b);
    } catch (const Error&) {
      continue;
    }
    if ((ga > 0) == (gb > 0) && ga != 0.0 && gb != 0.0) continue;
    // Bisection on the chord parameter.
    double lo = 0.0;
    double hi = 1.0;
    double glo = ga;
    for (int it = 0; it < 200 && hi - lo > 1e-16; ++it) {
      const double mid = 0.5 * (lo + hi);
      const double gm = g(a + mid * (b - a));
      if (gm == 0.0) {
        lo = hi = mid;
        break;
      }
      if ((gm > 0) == (glo > 0)) {
        lo = mid;
        glo = gm;
      } else {
        hi = mid;
      }
    }
    SurfaceSample s;
    s.m = a + lo * (b - a);
    s.g = g(s.m);
    s.grad = opts.gradient == GradientMethod::kImplicit
                 ? grad_g_analytic(model, d1, d2, s.m)
                 : grad_g(model, d1, d2, s.m, opts.fd_step);
    EvaluatedModel em = model.evaluate(s.m);
    s.s1 = vector_field(em, s.m, d1).dot(s.grad);
    s.s2 = -vector_field(em, s.m, d2).dot(s.grad);
    s.near_kink = model.near_slog_kink(s.m);
    if (s.near_kink) ++out.kink_samples;
    out.samples.push_back(std::move(s));
  }
  if (out.samples.empty()) {
    out.label = GlobalCase::kSurfaceNotFound;
    out.violations.push_back("g has constant sign on " +
                             std::to_string(out.chords_tried) + " chords");
    return out;
  }

  bool grads_ok = true;
  bool case_i = true;
  bool case_ii = true;
  bool case_iii = true;
  for (const auto& s : out.samples) {
    if (!(s.grad.norm() > opts.grad_floor)) grads_ok = false;
    if (!(s.s1 > 0 && s.s2 < 0)) case_i = false;
    if (!(s.s1 < 0 && s.s2 > 0)) case_ii = false;
    if (!(s.s1 >= -opts.slack && s.s2 >= -opts.slack)) case_iii = false;
  }
  if (!grads_ok) {
    out.label = GlobalCase::kNone;
  } else if (case_i) {
    out.label = GlobalCase::kCaseI;
  } else if (case_ii) {
    out.label = GlobalCase::kCaseII;
  } else if (case_iii) {
    out.label = GlobalCase::kCaseIII;
  } else {
    out.label = GlobalCase::kNone;
  }
  if (out.label == GlobalCase::kNone) {
    for (std::size_t k = 0; k < out.samples.size(); ++k) {
      const auto& s = out.samples[k];
      std::string where = "sample " + std::to_string(k) + ": ";
      if (!(s.grad.norm() > opts.grad_floor)) {
        out.violations.push_back(where + "gradient of g vanishes");
      } else if (!(s.s1 >= -opts.slack && s.s2 >= -opts.slack)) {
        out.violations.push_back(where + "s1=" + format_double(s.s1) +
                                 " s2=" + format_double(s.s2));
      }
    }
  }
  return out;
}

}  // namespace mfg
