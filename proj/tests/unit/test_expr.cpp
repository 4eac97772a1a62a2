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

#include <doctest.h>

#include <cmath>
#include <random>

#include "generators.hpp"
#include "mfg/errors.hpp"
#include "mfg/expr.hpp"

using namespace mfg;

namespace {

const std::vector<std::string> kNoParams;

double eval(const std::string& text, std::vector<double> m,
            const std::vector<std::string>& names = {},
            const std::vector<double>& values = {}) {
  Expr e = parse_expr(text, static_cast<int>(m.size()), names);
  return eval_expr(e, m, values);
}

// Random well-formed expression over m1..m3 and two parameters.
std::string random_expr(std::mt19937_64& rng, int depth) {
  using testing::uniform_int;
  if (depth == 0 || uniform_int(rng, 0, 3) == 0) {
    switch (uniform_int(rng, 0, 2)) {
      case 0: return "m" + std::to_string(uniform_int(rng, 1, 3));
      case 1: return uniform_int(rng, 0, 1) ? "p" : "q";
      default: return format_double(testing::uniform(rng, 0.1, 3.0));
    }
  }
  const std::string a = random_expr(rng, depth - 1);
  const std::string b = random_expr(rng, depth - 1);
  switch (uniform_int(rng, 0, 10)) {
    case 0: return "(" + a + " + " + b + ")";
    case 1: return "(" + a + " - " + b + ")";
    case 2: return a + " * " + b;
    case 3: return a + " / (1 + " + b + "*" + b + ")";
    case 4: return "exp(" + a + " / 10)";
    case 5: return "ln(1 + " + a + "*" + a + ")";
    case 6: return "sqrt(2 + " + a + "*" + a + ")";
    case 7: return "min(" + a + ", " + b + ")";
    case 8: return "max(" + a + ", " + b + ")";
    case 9: return "slog(" + a + ", 0.01)";
    default: return "-" + a;
  }
}

}  // namespace

TEST_CASE("parse: grammar cases") {
  Expr e = parse_expr("m1 + m2", 2, kNoParams);
  CHECK(e.kind() == ExprKind::kAdd);
  CHECK(e.args()[0].kind() == ExprKind::kVar);
  CHECK(e.args()[1].kind() == ExprKind::kVar);

  std::vector<std::string> names{"s1", "c"};
  Expr s = parse_expr("slog(m1, 0.01) + s1 - c", 2, names);
  CHECK(s.kind() == ExprKind::kSub);
  CHECK(s.args()[0].args()[0].kind() == ExprKind::kSlog);

  CHECK_THROWS_AS(parse_expr("m3", 2, kNoParams), ParseError);
  CHECK_THROWS_AS(parse_expr("m0", 2, kNoParams), ParseError);
  CHECK_THROWS_AS(parse_expr("foo + 1", 2, kNoParams), ParseError);
  CHECK_THROWS_AS(parse_expr("exp(m1, m2)", 2, kNoParams), ParseError);
  CHECK_THROWS_AS(parse_expr("slog(m1)", 2, kNoParams), ParseError);
  CHECK_THROWS_AS(parse_expr("(m1 + ", 2, kNoParams), ParseError);
  CHECK_THROWS_AS(parse_expr("m1 m2", 2, kNoParams), ParseError);
}

TEST_CASE("parse: error carries a position") {
  try {
    parse_expr("m1 + * m2", 2, kNoParams);
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.position() == 5);
  }
}

TEST_CASE("eval: associativity and literals") {
  CHECK(eval("2*m1", {0.5, 0.5}) == 1.0);
  CHECK(eval("8 / 4 / 2", {0.5, 0.5}) == 1.0);
  CHECK(eval("8 - 4 - 2", {0.5, 0.5}) == 2.0);
  CHECK(eval("-m1 * 2", {0.25, 0.75}) == -0.5);
  CHECK(eval("--m1", {0.25, 0.75}) == 0.25);
  CHECK(eval("1e-3 + 2.5E2", {0.5, 0.5}) == doctest::Approx(250.001));
  CHECK(eval("min(m1, m2) + max(m1, m2)", {0.3, 0.7}) == doctest::Approx(1.0));
  CHECK(eval("c*m2", {0.5, 0.5}, {"c"}, {4.0}) == 2.0);
}

TEST_CASE("eval: slog branches") {
  CHECK(eval("slog(0, 0.01)", {0.5, 0.5}) == doctest::Approx(std::log(0.005)).epsilon(1e-12));
  CHECK(eval("slog(0, 0.01)", {0.5, 0.5}) == doctest::Approx(-5.298317).epsilon(1e-6));
  CHECK(eval("slog(0.5, 0.01)", {0.5, 0.5}) == doctest::Approx(-0.693147).epsilon(1e-6));
  // C1 at the kink: value delta and slope 1 from both sides.
  CHECK(slog_smoothing(0.01, 0.01) == doctest::Approx(0.01));
  const double h = 1e-7;
  const double left = (slog_smoothing(0.01, 0.01) - slog_smoothing(0.01 - h, 0.01)) / h;
  CHECK(left == doctest::Approx(1.0).epsilon(1e-5));
}

TEST_CASE("eval: domain errors") {
  CHECK_THROWS_AS(eval("ln(m1 - 1)", {0.5, 0.5}), DomainError);
  CHECK_THROWS_AS(eval("ln(0)", {0.5, 0.5}), DomainError);
  CHECK_THROWS_AS(eval("sqrt(-m1)", {0.5, 0.5}), DomainError);
  CHECK_THROWS_AS(eval("1 / (m1 - m2)", {0.5, 0.5}), DomainError);
  CHECK_THROWS_AS(eval("slog(m1, 0)", {0.5, 0.5}), DomainError);
}

TEST_CASE("diff: hand-derived cases") {
  Expr p = parse_expr("m1*m2", 2, kNoParams);
  Expr d = diff_expr(p, 0);
  CHECK(structurally_equal(d, parse_expr("m2", 2, kNoParams)));
  CHECK(eval_expr(diff_expr(parse_expr("m1", 2, kNoParams), 1), std::vector<double>{0.3, 0.7},
                  std::vector<double>{}) == 0.0);
  CHECK(diff_expr(parse_expr("m1", 2, kNoParams), 1).is_constant());

  Expr s = parse_expr("slog(m1, 0.01)", 2, kNoParams);
  std::vector<double> m{0.5, 0.5};
  const double analytic = eval_expr(diff_expr(s, 0), m, std::vector<double>{});
  const double h = 1e-6;
  const double fd = (eval_expr(s, std::vector<double>{0.5 + h, 0.5}, std::vector<double>{}) -
                     eval_expr(s, std::vector<double>{0.5 - h, 0.5}, std::vector<double>{})) /
                    (2 * h);
  CHECK(analytic == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(analytic == doctest::Approx(fd).epsilon(1e-8));

  // The two slog branches agree at the kink.
  Expr below = diff_expr(s, 0);
  CHECK(eval_expr(below, std::vector<double>{0.01, 0.99}, std::vector<double>{}) ==
        doctest::Approx(100.0));
}

TEST_CASE("diff: min/max ties go to the first argument") {
  Expr e = parse_expr("min(m1, 2*m2)", 2, kNoParams);
  std::vector<double> tie{2.0 / 3.0, 1.0 / 3.0};
  CHECK(eval_expr(diff_expr(e, 0), tie, std::vector<double>{}) == 1.0);
  CHECK(eval_expr(diff_expr(e, 1), tie, std::vector<double>{}) == 0.0);
}

TEST_CASE("property: print/parse round trip on random expressions") {
  std::mt19937_64 rng(11);
  std::vector<std::string> names{"p", "q"};
  for (int n = 0; n < 1000; ++n) {
    const std::string text = random_expr(rng, 4);
    Expr e = parse_expr(text, 3, names);
    Expr back = parse_expr(to_string(e), 3, names);
    INFO(text);
    REQUIRE(structurally_equal(e, back));
  }
}

TEST_CASE("property: symbolic derivatives match central differences") {
  std::mt19937_64 rng(12);
  std::vector<std::string> names{"p", "q"};
  std::vector<double> params{0.7, 1.3};
  int compared = 0;
  for (int n = 0; n < 1000; ++n) {
    const std::string text = random_expr(rng, 4);
    Expr e = parse_expr(text, 3, names);
    Vector m = random_simplex_point(3, rng);
    m = 0.9 * m + Vector::Constant(3, 0.1 / 3);  // interior
    const int k = testing::uniform_int(rng, 0, 2);
    if (near_slog_kink(e, as_span(m), params)) continue;
    const double h = 1e-6;
    Vector mp = m, mm = m;
    mp[k] += h;
    mm[k] -= h;
    double f0, fp, fm, d;
    try {
      f0 = eval_expr(e, as_span(m), params);
      fp = eval_expr(e, as_span(mp), params);
      fm = eval_expr(e, as_span(mm), params);
      d = eval_expr(diff_expr(e, k), as_span(m), params);
    } catch (const DomainError&) {
      continue;
    }
    if (std::abs(f0) > 1e6) continue;
    // A min/max kink inside the stencil shows up as mismatched one-sided slopes.
    const double right = (fp - f0) / h;
    const double left = (f0 - fm) / h;
    if (std::abs(right - left) > 1e-3 * (1.0 + std::abs(right))) continue;
    const double fd = (fp - fm) / (2 * h);
    INFO(text, " k=", k);
    CHECK(std::abs(d - fd) <= 1e-4 * std::max(1.0, std::abs(fd)));
    ++compared;
  }
  CHECK(compared > 800);
}

TEST_CASE("format_double round-trips") {
  std::mt19937_64 rng(13);
  for (int n = 0; n < 1000; ++n) {
    const double x = std::ldexp(testing::uniform(rng, -1.0, 1.0), testing::uniform_int(rng, -60, 60));
    CHECK(std::stod(format_double(x)) == x);
  }
  CHECK(format_double(0.1) == "0.1");
  CHECK(format_double(1.0) == "1");
}
