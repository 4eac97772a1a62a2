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

#ifndef MFG_EXPR_HPP_
#define MFG_EXPR_HPP_

#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace mfg {

enum class ExprKind {
  kNumber,
  kVar,    // distribution coordinate m_k, stored 0-based
  kParam,  // named model parameter, resolved to an index at parse time
  kNeg,
  kAdd,
  kSub,
  kMul,
  kDiv,
  kExp,
  kLn,
  kSqrt,
  kMin,
  kMax,
  kSlog,  // slog(x, delta) = ln(f_delta(x))
  kIfLe,  // if_le(a, b, x, y) = a <= b ? x : y; produced by differentiation
};

// Immutable expression tree over the population distribution m and the model
// parameters. Copies share structure; safe to share across threads.
class Expr {
 public:
  static Expr Number(double value);
  static Expr Var(int index);
  static Expr Param(int index, std::string name);
  static Expr Unary(ExprKind kind, Expr operand);
  static Expr Binary(ExprKind kind, Expr lhs, Expr rhs);
  static Expr Call(ExprKind kind, std::vector<Expr> args);

  ExprKind kind() const;
  double value() const;            // kNumber only
  int index() const;               // kVar and kParam
  const std::string& name() const; // kParam only
  std::span<const Expr> args() const;

  // True when no kVar node occurs in the tree.
  bool is_constant() const;
  // Largest variable index + 1 occurring in the tree (0 if none).
  int max_var_index() const;

 private:
  struct Node;
  explicit Expr(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  std::shared_ptr<const Node> node_;
};

// Parses `text` with the grammar
//   expr   := term (('+'|'-') term)*
//   term   := factor (('*'|'/') factor)*
//   factor := number | ident | ident '(' expr (',' expr)* ')' | '(' expr ')'
//           | '-' factor
// Identifiers m1..mS are distribution coordinates; anything else resolves
// against `params` and then against the builtins exp, ln, sqrt (1 argument),
// min, max, slog (2 arguments) and if_le (4 arguments).
// Throws ParseError.
Expr parse_expr(std::string_view text, int state_count,
                std::span<const std::string> params);

// Evaluates `e` at distribution coordinates `m` with parameter values
// `params` (indexed like the names passed to parse_expr). Throws DomainError
// on ln/sqrt of negative numbers, ln(0), division by zero, slog with a
// non-positive delta and non-finite results.
double eval_expr(const Expr& e, std::span<const double> m,
                 std::span<const double> params);

// Symbolic partial derivative with respect to m_{k+1} (k is 0-based).
// min/max differentiate by the active branch, ties toward the first argument.
Expr diff_expr(const Expr& e, int k);

// Smoothing used by slog: y^2/(2 delta) + delta/2 for y <= delta, y otherwise.
double slog_smoothing(double y, double delta);

// True when some slog(x, delta) node has |x - delta| < 2 delta at m.
bool near_slog_kink(const Expr& e, std::span<const double> m,
                    std::span<const double> params);

// Re-parseable text form; parse_expr(to_string(e)) is structurally equal to e
// for every tree produced by parse_expr.
std::string to_string(const Expr& e);

bool structurally_equal(const Expr& a, const Expr& b);

// Shortest decimal text that reads back to exactly `value`.
std::string format_double(double value);

}  // namespace mfg

#endif  // MFG_EXPR_HPP_
