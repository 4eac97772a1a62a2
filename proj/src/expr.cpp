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

#include "mfg/expr.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <optional>
#include <utility>

#include "mfg/errors.hpp"

namespace mfg {

struct Expr::Node {
  ExprKind kind = ExprKind::kNumber;
  double value = 0.0;
  int index = -1;
  std::string name;
  std::vector<Expr> args;
  bool constant = true;
  int max_var = 0;
};

namespace {

int arity(ExprKind kind) {
  switch (kind) {
    case ExprKind::kNumber:
    case ExprKind::kVar:
    case ExprKind::kParam:
      return 0;
    case ExprKind::kNeg:
    case ExprKind::kExp:
    case ExprKind::kLn:
    case ExprKind::kSqrt:
      return 1;
    case ExprKind::kAdd:
    case ExprKind::kSub:
    case ExprKind::kMul:
    case ExprKind::kDiv:
    case ExprKind::kMin:
    case ExprKind::kMax:
    case ExprKind::kSlog:
      return 2;
    case ExprKind::kIfLe:
      return 4;
  }
  return 0;
}

struct Builtin {
  std::string_view name;
  ExprKind kind;
};

constexpr Builtin kBuiltins[] = {
    {"exp", ExprKind::kExp},   {"ln", ExprKind::kLn},
    {"sqrt", ExprKind::kSqrt}, {"min", ExprKind::kMin},
    {"max", ExprKind::kMax},   {"slog", ExprKind::kSlog},
    {"if_le", ExprKind::kIfLe},
};

std::optional<ExprKind> find_builtin(std::string_view name) {
  for (const auto& b : kBuiltins) {
    if (b.name == name) return b.kind;
  }
  return std::nullopt;
}

std::string_view builtin_name(ExprKind kind) {
  for (const auto& b : kBuiltins) {
    if (b.kind == kind) return b.name;
  }
  return "?";
}

}  // namespace

// ---------------------------------------------------------------------------
// Construction

Expr Expr::Number(double value) {
  auto n = std::make_shared<Node>();
  n->kind = ExprKind::kNumber;
  n->value = value;
  return Expr(std::move(n));
}

Expr Expr::Var(int index) {
  auto n = std::make_shared<Node>();
  n->kind = ExprKind::kVar;
  n->index = index;
  n->constant = false;
  n->max_var = index + 1;
  return Expr(std::move(n));
}

Expr Expr::Param(int index, std::string name) {
  auto n = std::make_shared<Node>();
  n->kind = ExprKind::kParam;
  n->index = index;
  n->name = std::move(name);
  return Expr(std::move(n));
}

Expr Expr::Call(ExprKind kind, std::vector<Expr> args) {
  if (static_cast<int>(args.size()) != arity(kind) || arity(kind) == 0) {
    throw PreconditionError("Expr::Call: wrong number of arguments");
  }
  auto n = std::make_shared<Node>();
  n->kind = kind;
  for (const auto& a : args) {
    if (!a.node_) throw PreconditionError("Expr::Call: empty operand");
    n->constant = n->constant && a.node_->constant;
    n->max_var = std::max(n->max_var, a.node_->max_var);
  }
  n->args = std::move(args);
  return Expr(std::move(n));
}

Expr Expr::Unary(ExprKind kind, Expr operand) {
  return Call(kind, {std::move(operand)});
}

Expr Expr::Binary(ExprKind kind, Expr lhs, Expr rhs) {
  return Call(kind, {std::move(lhs), std::move(rhs)});
}

ExprKind Expr::kind() const { return node_->kind; }
double Expr::value() const { return node_->value; }
int Expr::index() const { return node_->index; }
const std::string& Expr::name() const { return node_->name; }
std::span<const Expr> Expr::args() const { return node_->args; }
bool Expr::is_constant() const { return node_->constant; }
int Expr::max_var_index() const { return node_->max_var; }

// ---------------------------------------------------------------------------
// Parsing

namespace {

class Parser {
 public:
  Parser(std::string_view text, int state_count,
         std::span<const std::string> params)
      : text_(text), state_count_(state_count), params_(params) {}

  Expr parse() {
    Expr e = parse_expr();
    skip_space();
    if (pos_ != text_.size()) fail("unexpected trailing input");
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& message) const {
    throw ParseError(message, pos_);
  }
  [[noreturn]] void fail_at(const std::string& message, std::size_t at) const {
    throw ParseError(message, at);
  }

  void skip_space() {
    while (pos_ < text_.size() &&
           std::isspace(static_cast<unsigned char>(text_[pos_]))) {
      ++pos_;
    }
  }

  bool consume(char c) {
    skip_space();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  char peek() {
    skip_space();
    return pos_ < text_.size() ? text_[pos_] : '\0';
  }

  Expr parse_expr() {
    Expr lhs = parse_term();
    for (;;) {
      char c = peek();
      if (c == '+' || c == '-') {
        ++pos_;
        Expr rhs = parse_term();
        lhs = Expr::Binary(c == '+' ? ExprKind::kAdd : ExprKind::kSub,
                           std::move(lhs), std::move(rhs));
      } else {
        return lhs;
      }
    }
  }

  Expr parse_term() {
    Expr lhs = parse_factor();
    for (;;) {
      char c = peek();
      if (c == '*' || c == '/') {
        ++pos_;
        Expr rhs = parse_factor();
        lhs = Expr::Binary(c == '*' ? ExprKind::kMul : ExprKind::kDiv,
                           std::move(lhs), std::move(rhs));
      } else {
        return lhs;
      }
    }
  }

  Expr parse_factor() {
    char c = peek();
    if (c == '\0') fail("unexpected end of expression");
    if (c == '-') {
      ++pos_;
      return Expr::Unary(ExprKind::kNeg, parse_factor());
    }
    if (c == '(') {
      ++pos_;
      Expr inner = parse_expr();
      if (!consume(')')) fail("expected ')'");
      return inner;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      return parse_number();
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      return parse_identifier();
    }
    fail(std::string("unexpected character '") + c + "'");
  }

  Expr parse_number() {
    std::size_t start = pos_;
    while (pos_ < text_.size() &&
           (std::isdigit(static_cast<unsigned char>(text_[pos_])) ||
            text_[pos_] == '.')) {
      ++pos_;
    }
    if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
      std::size_t save = pos_;
      ++pos_;
      if (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-')) {
        ++pos_;
      }
      if (pos_ < text_.size() &&
          std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
        while (pos_ < text_.size() &&
               std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
          ++pos_;
        }
      } else {
        pos_ = save;
      }
    }
    double value = 0.0;
    const char* first = text_.data() + start;
    const char* last = text_.data() + pos_;
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr != last) {
      fail_at("malformed number", start);
    }
    return Expr::Number(value);
  }

  Expr parse_identifier() {
    std::size_t start = pos_;
    while (pos_ < text_.size() &&
           (std::isalnum(static_cast<unsigned char>(text_[pos_])) ||
            text_[pos_] == '_')) {
      ++pos_;
    }
    std::string ident(text_.substr(start, pos_ - start));

    if (peek() == '(') {
      auto kind = find_builtin(ident);
      if (!kind) fail_at("unknown function '" + ident + "'", start);
      ++pos_;
      std::vector<Expr> args;
      args.push_back(parse_expr());
      while (consume(',')) args.push_back(parse_expr());
      if (!consume(')')) fail("expected ')' or ','");
      if (static_cast<int>(args.size()) != arity(*kind)) {
        fail_at("function '" + ident + "' expects " +
                    std::to_string(arity(*kind)) + " argument(s), got " +
                    std::to_string(args.size()),
                start);
      }
      if (*kind == ExprKind::kSlog && !args[1].is_constant()) {
        fail_at("slog delta must not depend on the distribution", start);
      }
      return Expr::Call(*kind, std::move(args));
    }

    if (ident.size() > 1 && ident[0] == 'm' &&
        std::all_of(ident.begin() + 1, ident.end(), [](char ch) {
          return std::isdigit(static_cast<unsigned char>(ch));
        })) {
      long k = 0;
      auto [ptr, ec] =
          std::from_chars(ident.data() + 1, ident.data() + ident.size(), k);
      if (ec != std::errc() || k < 1 || k > state_count_) {
        fail_at("variable '" + ident + "' out of range 1.." +
                    std::to_string(state_count_),
                start);
      }
      return Expr::Var(static_cast<int>(k - 1));
    }

    for (std::size_t i = 0; i < params_.size(); ++i) {
      if (params_[i] == ident) {
        return Expr::Param(static_cast<int>(i), ident);
      }
    }
    if (find_builtin(ident)) {
      fail_at("function '" + ident + "' used without arguments", start);
    }
    fail_at("unknown identifier '" + ident + "'", start);
  }

  std::string_view text_;
  int state_count_;
  std::span<const std::string> params_;
  std::size_t pos_ = 0;
};

}  // namespace

Expr parse_expr(std::string_view text, int state_count,
                std::span<const std::string> params) {
  return Parser(text, state_count, params).parse();
}

// ---------------------------------------------------------------------------
// Evaluation

double slog_smoothing(double y, double delta) {
  return y <= delta ? y * y / (2.0 * delta) + delta / 2.0 : y;
}

namespace {

double eval_node(const Expr& e, std::span<const double> m,
                 std::span<const double> params) {
  switch (e.kind()) {
    case ExprKind::kNumber:
      return e.value();
    case ExprKind::kVar:
      return m[static_cast<std::size_t>(e.index())];
    case ExprKind::kParam:
      return params[static_cast<std::size_t>(e.index())];
    case ExprKind::kNeg:
      return -eval_node(e.args()[0], m, params);
    case ExprKind::kAdd:
      return eval_node(e.args()[0], m, params) +
             eval_node(e.args()[1], m, params);
    case ExprKind::kSub:
      return eval_node(e.args()[0], m, params) -
             eval_node(e.args()[1], m, params);
    case ExprKind::kMul:
      return eval_node(e.args()[0], m, params) *
             eval_node(e.args()[1], m, params);
    case ExprKind::kDiv: {
      double den = eval_node(e.args()[1], m, params);
      if (den == 0.0) throw DomainError("division by zero");
      return eval_node(e.args()[0], m, params) / den;
    }
    case ExprKind::kExp:
      return std::exp(eval_node(e.args()[0], m, params));
    case ExprKind::kLn: {
      double x = eval_node(e.args()[0], m, params);
      if (!(x > 0.0)) {
        throw DomainError("ln of non-positive value " + format_double(x));
      }
      return std::log(x);
    }
    case ExprKind::kSqrt: {
      double x = eval_node(e.args()[0], m, params);
      if (x < 0.0) {
        throw DomainError("sqrt of negative value " + format_double(x));
      }
      return std::sqrt(x);
    }
    case ExprKind::kMin:
      return std::min(eval_node(e.args()[0], m, params),
                      eval_node(e.args()[1], m, params));
    case ExprKind::kMax:
      return std::max(eval_node(e.args()[0], m, params),
                      eval_node(e.args()[1], m, params));
    case ExprKind::kSlog: {
      double x = eval_node(e.args()[0], m, params);
      double delta = eval_node(e.args()[1], m, params);
      if (!(delta > 0.0)) throw DomainError("slog requires delta > 0");
      return std::log(slog_smoothing(x, delta));
    }
    case ExprKind::kIfLe:
      return eval_node(e.args()[0], m, params) <=
                     eval_node(e.args()[1], m, params)
                 ? eval_node(e.args()[2], m, params)
                 : eval_node(e.args()[3], m, params);
  }
  return 0.0;
}

}  // namespace

double eval_expr(const Expr& e, std::span<const double> m,
                 std::span<const double> params) {
  double v = eval_node(e, m, params);
  if (!std::isfinite(v)) throw DomainError("non-finite expression value");
  return v;
}

bool near_slog_kink(const Expr& e, std::span<const double> m,
                    std::span<const double> params) {
  if (e.kind() == ExprKind::kSlog) {
    double x = eval_node(e.args()[0], m, params);
    double delta = eval_node(e.args()[1], m, params);
    if (std::abs(x - delta) < 2.0 * delta) return true;
  }
  for (const auto& a : e.args()) {
    if (near_slog_kink(a, m, params)) return true;
  }
  return false;
}

// ---------------------------------------------------------------------------
// Differentiation. The helpers fold constants and drop neutral elements, which
// is all the simplification the derivative trees get.

namespace {

bool is_number(const Expr& e, double v) {
  return e.kind() == ExprKind::kNumber && e.value() == v;
}
bool is_num(const Expr& e) { return e.kind() == ExprKind::kNumber; }

Expr num(double v) { return Expr::Number(v); }

Expr neg(Expr a) {
  if (is_num(a)) return num(-a.value());
  if (a.kind() == ExprKind::kNeg) return a.args()[0];
  return Expr::Unary(ExprKind::kNeg, std::move(a));
}

Expr add(Expr a, Expr b) {
  if (is_num(a) && is_num(b)) return num(a.value() + b.value());
  if (is_number(a, 0.0)) return b;
  if (is_number(b, 0.0)) return a;
  return Expr::Binary(ExprKind::kAdd, std::move(a), std::move(b));
}

Expr sub(Expr a, Expr b) {
  if (is_num(a) && is_num(b)) return num(a.value() - b.value());
  if (is_number(b, 0.0)) return a;
  if (is_number(a, 0.0)) return neg(std::move(b));
  return Expr::Binary(ExprKind::kSub, std::move(a), std::move(b));
}

Expr mul(Expr a, Expr b) {
  if (is_num(a) && is_num(b)) return num(a.value() * b.value());
  if (is_number(a, 0.0) || is_number(b, 0.0)) return num(0.0);
  if (is_number(a, 1.0)) return b;
  if (is_number(b, 1.0)) return a;
  return Expr::Binary(ExprKind::kMul, std::move(a), std::move(b));
}

Expr div(Expr a, Expr b) {
  if (is_num(a) && is_num(b) && b.value() != 0.0) {
    return num(a.value() / b.value());
  }
  if (is_number(a, 0.0)) return num(0.0);
  if (is_number(b, 1.0)) return a;
  return Expr::Binary(ExprKind::kDiv, std::move(a), std::move(b));
}

Expr call(ExprKind kind, std::vector<Expr> args) {
  return Expr::Call(kind, std::move(args));
}

Expr if_le(Expr a, Expr b, Expr x, Expr y) {
  if (is_num(x) && is_num(y) && x.value() == y.value()) return x;
  return call(ExprKind::kIfLe,
              {std::move(a), std::move(b), std::move(x), std::move(y)});
}

}  // namespace

Expr diff_expr(const Expr& e, int k) {
  if (e.is_constant()) return num(0.0);
  auto args = e.args();
  switch (e.kind()) {
    case ExprKind::kNumber:
    case ExprKind::kParam:
      return num(0.0);
    case ExprKind::kVar:
      return num(e.index() == k ? 1.0 : 0.0);
    case ExprKind::kNeg:
      return neg(diff_expr(args[0], k));
    case ExprKind::kAdd:
      return add(diff_expr(args[0], k), diff_expr(args[1], k));
    case ExprKind::kSub:
      return sub(diff_expr(args[0], k), diff_expr(args[1], k));
    case ExprKind::kMul:
      return add(mul(diff_expr(args[0], k), args[1]),
                 mul(args[0], diff_expr(args[1], k)));
    case ExprKind::kDiv: {
      Expr du = diff_expr(args[0], k);
      Expr dv = diff_expr(args[1], k);
      if (is_number(dv, 0.0)) return div(du, args[1]);
      return div(sub(mul(du, args[1]), mul(args[0], dv)),
                 mul(args[1], args[1]));
    }
    case ExprKind::kExp:
      return mul(e, diff_expr(args[0], k));
    case ExprKind::kLn:
      return div(diff_expr(args[0], k), args[0]);
    case ExprKind::kSqrt:
      return div(diff_expr(args[0], k), mul(num(2.0), e));
    case ExprKind::kMin:
      return if_le(args[0], args[1], diff_expr(args[0], k),
                   diff_expr(args[1], k));
    case ExprKind::kMax:
      return if_le(args[1], args[0], diff_expr(args[0], k),
                   diff_expr(args[1], k));
    case ExprKind::kSlog: {
      Expr du = diff_expr(args[0], k);
      if (is_number(du, 0.0)) return du;
      const Expr& x = args[0];
      const Expr& delta = args[1];
      Expr smoothed =
          add(div(mul(x, x), mul(num(2.0), delta)), div(delta, num(2.0)));
      Expr inner = if_le(x, delta, div(div(x, delta), smoothed),
                         div(num(1.0), x));
      return mul(du, inner);
    }
    case ExprKind::kIfLe:
      return if_le(args[0], args[1], diff_expr(args[2], k),
                   diff_expr(args[3], k));
  }
  return num(0.0);
}

// ---------------------------------------------------------------------------
// Printing

std::string format_double(double value) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  if (ec != std::errc()) return "nan";
  return std::string(buf, ptr);
}

namespace {

int precedence(const Expr& e) {
  switch (e.kind()) {
    case ExprKind::kAdd:
    case ExprKind::kSub:
      return 1;
    case ExprKind::kMul:
    case ExprKind::kDiv:
      return 2;
    case ExprKind::kNeg:
      return 3;
    case ExprKind::kNumber:
      return e.value() < 0.0 || std::signbit(e.value()) ? 3 : 4;
    default:
      return 4;
  }
}

void print(const Expr& e, std::string& out);

void print_wrapped(const Expr& e, bool wrap, std::string& out) {
  if (wrap) out += '(';
  print(e, out);
  if (wrap) out += ')';
}

void print(const Expr& e, std::string& out) {
  auto args = e.args();
  switch (e.kind()) {
    case ExprKind::kNumber:
      out += format_double(e.value());
      return;
    case ExprKind::kVar:
      out += "m" + std::to_string(e.index() + 1);
      return;
    case ExprKind::kParam:
      out += e.name();
      return;
    case ExprKind::kNeg:
      out += '-';
      print_wrapped(args[0], precedence(args[0]) < 3, out);
      return;
    case ExprKind::kAdd:
    case ExprKind::kSub:
    case ExprKind::kMul:
    case ExprKind::kDiv: {
      int p = precedence(e);
      print_wrapped(args[0], precedence(args[0]) < p, out);
      switch (e.kind()) {
        case ExprKind::kAdd: out += " + "; break;
        case ExprKind::kSub: out += " - "; break;
        case ExprKind::kMul: out += "*"; break;
        default: out += "/"; break;
      }
      print_wrapped(args[1], precedence(args[1]) <= p, out);
      return;
    }
    default: {
      out += builtin_name(e.kind());
      out += '(';
      for (std::size_t i = 0; i < args.size(); ++i) {
        if (i > 0) out += ", ";
        print(args[i], out);
      }
      out += ')';
      return;
    }
  }
}

}  // namespace

std::string to_string(const Expr& e) {
  std::string out;
  print(e, out);
  return out;
}

bool structurally_equal(const Expr& a, const Expr& b) {
  if (a.kind() != b.kind()) return false;
  switch (a.kind()) {
    case ExprKind::kNumber:
      return a.value() == b.value();
    case ExprKind::kVar:
    case ExprKind::kParam:
      return a.index() == b.index();
    default:
      break;
  }
  auto xs = a.args();
  auto ys = b.args();
  if (xs.size() != ys.size()) return false;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (!structurally_equal(xs[i], ys[i])) return false;
  }
  return true;
}

}  // namespace mfg
