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

#include "mfg/toml_lite.hpp"

#include <cctype>
#include <charconv>
#include <sstream>

#include "mfg/errors.hpp"
#include "mfg/expr.hpp"

namespace mfg {
namespace {

using Json = nlohmann::ordered_json;

class Reader {
 public:
  explicit Reader(std::string_view text) : s_(text) {}

  Json parse() {
    Json root = Json::object();
    Json* table = &root;
    while (true) {
      skip_ws_comments_newlines();
      if (eof()) break;
      if (peek() == '[') {
        ++pos_;
        if (!eof() && peek() == '[') fail("arrays of tables are not supported");
        skip_inline_ws();
        std::vector<std::string> path = parse_key_path();
        skip_inline_ws();
        expect(']');
        table = &root;
        for (const auto& part : path) {
          Json& next = (*table)[part];
          if (next.is_null()) next = Json::object();
          if (!next.is_object()) fail("key '" + part + "' is not a table");
          table = &next;
        }
      } else {
        parse_pair(*table);
      }
      end_of_line();
    }
    return root;
  }

 private:
  [[noreturn]] void fail(const std::string& message) const {
    throw ParseError("toml: " + message, pos_);
  }
  bool eof() const { return pos_ >= s_.size(); }
  char peek() const { return s_[pos_]; }
  void expect(char c) {
    if (eof() || peek() != c) fail(std::string("expected '") + c + "'");
    ++pos_;
  }

  void skip_inline_ws() {
    while (!eof() && (peek() == ' ' || peek() == '\t')) ++pos_;
  }
  void skip_comment() {
    if (!eof() && peek() == '#') {
      while (!eof() && peek() != '\n') ++pos_;
    }
  }
  void skip_ws_comments_newlines() {
    while (!eof()) {
      char c = peek();
      if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
        ++pos_;
      } else if (c == '#') {
        skip_comment();
      } else {
        break;
      }
    }
  }
  void end_of_line() {
    skip_inline_ws();
    skip_comment();
    if (eof()) return;
    if (peek() == '\r') ++pos_;
    if (eof() || peek() != '\n') fail("expected end of line");
    ++pos_;
  }

  std::string parse_key() {
    if (!eof() && (peek() == '"' || peek() == '\'')) return parse_string();
    std::size_t start = pos_;
    while (!eof() && (std::isalnum(static_cast<unsigned char>(peek())) ||
                      peek() == '_' || peek() == '-')) {
      ++pos_;
    }
    if (start == pos_) fail("expected a key");
    return std::string(s_.substr(start, pos_ - start));
  }
  std::vector<std::string> parse_key_path() {
    std::vector<std::string> path{parse_key()};
    skip_inline_ws();
    while (!eof() && peek() == '.') {
      ++pos_;
      skip_inline_ws();
      path.push_back(parse_key());
      skip_inline_ws();
    }
    return path;
  }

  void parse_pair(Json& table) {
    std::vector<std::string> path = parse_key_path();
    skip_inline_ws();
    expect('=');
    skip_inline_ws();
    Json* target = &table;
    for (std::size_t k = 0; k + 1 < path.size(); ++k) {
      Json& next = (*target)[path[k]];
      if (next.is_null()) next = Json::object();
      if (!next.is_object()) fail("key '" + path[k] + "' is not a table");
      target = &next;
    }
    if (target->contains(path.back())) {
      fail("duplicate key '" + path.back() + "'");
    }
    (*target)[path.back()] = parse_value();
  }

  std::string parse_string() {
    char quote = peek();
    ++pos_;
    std::string out;
    while (true) {
      if (eof() || peek() == '\n') fail("unterminated string");
      char c = peek();
      ++pos_;
      if (c == quote) break;
      if (c == '\\' && quote == '"') {
        if (eof()) fail("unterminated escape");
        char e = peek();
        ++pos_;
        switch (e) {
          case 'n': out += '\n'; break;
          case 't': out += '\t'; break;
          case 'r': out += '\r'; break;
          case '\\': out += '\\'; break;
          case '"': out += '"'; break;
          default: fail(std::string("unsupported escape \\") + e);
        }
        continue;
      }
      out += c;
    }
    return out;
  }

  Json parse_number() {
    std::size_t start = pos_;
    std::string digits;
    while (!eof()) {
      char c = peek();
      if (std::isdigit(static_cast<unsigned char>(c)) || c == '+' || c == '-' ||
          c == '.' || c == 'e' || c == 'E') {
        digits += c;
        ++pos_;
      } else if (c == '_') {
        ++pos_;
      } else {
        break;
      }
    }
    if (digits == "inf" || digits.empty()) {
      pos_ = start;
      fail("expected a value");
    }
    bool is_float = digits.find_first_of(".eE") != std::string::npos;
    const char* b = digits.data();
    const char* e = digits.data() + digits.size();
    if (*b == '+') ++b;
    if (!is_float) {
      long long v = 0;
      auto [p, ec] = std::from_chars(b, e, v);
      if (ec == std::errc() && p == e) return Json(v);
    }
    double v = 0.0;
    auto [p, ec] = std::from_chars(b, e, v);
    if (ec != std::errc() || p != e) {
      pos_ = start;
      fail("malformed number '" + digits + "'");
    }
    return Json(v);
  }

  void skip_array_ws() {
    while (!eof()) {
      char c = peek();
      if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
        ++pos_;
      } else if (c == '#') {
        skip_comment();
      } else {
        break;
      }
    }
  }

  Json parse_value() {
    if (eof()) fail("expected a value");
    char c = peek();
    if (c == '"' || c == '\'') return Json(parse_string());
    if (c == '[') {
      ++pos_;
      Json arr = Json::array();
      skip_array_ws();
      while (!eof() && peek() != ']') {
        arr.push_back(parse_value());
        skip_array_ws();
        if (!eof() && peek() == ',') {
          ++pos_;
          skip_array_ws();
        } else {
          break;
        }
      }
      expect(']');
      return arr;
    }
    if (c == '{') {
      ++pos_;
      Json obj = Json::object();
      skip_inline_ws();
      while (!eof() && peek() != '}') {
        parse_pair(obj);
        skip_inline_ws();
        if (!eof() && peek() == ',') {
          ++pos_;
          skip_inline_ws();
        } else {
          break;
        }
      }
      expect('}');
      return obj;
    }
    if (s_.substr(pos_, 4) == "true") {
      pos_ += 4;
      return Json(true);
    }
    if (s_.substr(pos_, 5) == "false") {
      pos_ += 5;
      return Json(false);
    }
    return parse_number();
  }

  std::string_view s_;
  std::size_t pos_ = 0;
};

std::string quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      default: out += c;
    }
  }
  return out + "\"";
}

std::string key(const std::string& k) {
  bool bare = !k.empty();
  for (char c : k) {
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-')) {
      bare = false;
    }
  }
  return bare ? k : quote(k);
}

std::string scalar(const Json& v) {
  if (v.is_string()) return quote(v.get<std::string>());
  if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
  if (v.is_number_integer()) return std::to_string(v.get<long long>());
  if (v.is_number()) {
    std::string s = format_double(v.get<double>());
    if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
    return s;
  }
  throw Error("toml: cannot write value of type " + std::string(v.type_name()));
}

std::string inline_value(const Json& v) {
  if (v.is_array()) {
    std::string out = "[";
    for (std::size_t k = 0; k < v.size(); ++k) {
      if (k) out += ", ";
      out += inline_value(v[k]);
    }
    return out + "]";
  }
  if (v.is_object()) {
    std::string out = "{ ";
    bool first = true;
    for (const auto& [k, x] : v.items()) {
      if (!first) out += ", ";
      first = false;
      out += key(k) + " = " + inline_value(x);
    }
    return out + " }";
  }
  return scalar(v);
}

void write_table(std::ostringstream& os, const Json& table,
                 const std::string& prefix) {
  for (const auto& [k, v] : table.items()) {
    if (v.is_object()) continue;
    os << key(k) << " = ";
    if (v.is_array() && !v.empty() && v[0].is_array()) {
      os << "[\n";
      for (const auto& row : v) os << "  " << inline_value(row) << ",\n";
      os << "]\n";
    } else {
      os << inline_value(v) << "\n";
    }
  }
  for (const auto& [k, v] : table.items()) {
    if (!v.is_object()) continue;
    std::string name = prefix.empty() ? key(k) : prefix + "." + key(k);
    os << "\n[" << name << "]\n";
    write_table(os, v, name);
  }
}

}  // namespace

nlohmann::ordered_json parse_toml(std::string_view text) {
  return Reader(text).parse();
}

std::string write_toml(const nlohmann::ordered_json& doc) {
  if (!doc.is_object()) throw Error("toml: document root must be a table");
  std::ostringstream os;
  write_table(os, doc, "");
  return os.str();
}

}  // namespace mfg
