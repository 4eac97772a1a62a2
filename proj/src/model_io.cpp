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

#include "mfg/model_io.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "mfg/errors.hpp"
#include "mfg/toml_lite.hpp"

namespace mfg {
namespace {

using Json = nlohmann::ordered_json;

const Json& field(const Json& doc, const char* name) {
  if (!doc.contains(name)) {
    throw ModelError(std::string("model is missing field '") + name + "'");
  }
  return doc.at(name);
}

std::vector<std::string> labels(const Json& doc, const char* name) {
  const Json& v = field(doc, name);
  if (!v.is_array()) throw ModelError(std::string(name) + " must be a list");
  std::vector<std::string> out;
  for (const auto& x : v) {
    if (!x.is_string()) {
      throw ModelError(std::string(name) + " entries must be strings");
    }
    out.push_back(x.get<std::string>());
  }
  for (std::size_t a = 0; a < out.size(); ++a) {
    for (std::size_t b = a + 1; b < out.size(); ++b) {
      if (out[a] == out[b]) {
        throw ModelError("duplicate label '" + out[a] + "' in " + name);
      }
    }
  }
  return out;
}

Expr expression(const Json& v, int S, std::span<const std::string> params,
                const std::string& where) {
  if (v.is_number()) return Expr::Number(v.get<double>());
  if (!v.is_string()) {
    throw ModelError(where + ": expected an expression string");
  }
  try {
    return parse_expr(v.get<std::string>(), S, params);
  } catch (const ParseError& e) {
    throw ModelError(where + ": " + e.what());
  }
}

}  // namespace

GameModel model_from_json(const Json& doc) {
  if (!doc.is_object()) throw ModelError("model document must be an object");
  std::vector<std::string> states = labels(doc, "states");
  std::vector<std::string> actions = labels(doc, "actions");
  const int S = static_cast<int>(states.size());
  const int A = static_cast<int>(actions.size());
  if (S < 2) throw ModelError("a model needs at least two states");
  if (A < 1) throw ModelError("a model needs at least one action");
  const Json& beta = field(doc, "beta");
  if (!beta.is_number()) throw ModelError("beta must be a number");

  std::vector<std::string> names;
  std::vector<double> values;
  if (doc.contains("params")) {
    const Json& p = doc.at("params");
    if (!p.is_object()) throw ModelError("params must be a table");
    for (const auto& [k, v] : p.items()) {
      if (!v.is_number()) throw ModelError("param '" + k + "' must be a number");
      if (k == "beta" || (k.size() > 1 && k[0] == 'm' &&
                          k.find_first_not_of("0123456789", 1) == std::string::npos)) {
        throw ModelError("param name '" + k + "' is reserved");
      }
      names.push_back(k);
      values.push_back(v.get<double>());
    }
  }

  const Json& q = field(doc, "Q");
  const Json& r = field(doc, "r");
  if (!q.is_object() || !r.is_object()) {
    throw ModelError("Q and r must be tables keyed by action");
  }
  for (const auto& [k, v] : q.items()) {
    if (std::find(actions.begin(), actions.end(), k) == actions.end()) {
      throw ModelError("Q has unknown action '" + k + "'");
    }
  }
  for (const auto& [k, v] : r.items()) {
    if (std::find(actions.begin(), actions.end(), k) == actions.end()) {
      throw ModelError("r has unknown action '" + k + "'");
    }
  }

  std::vector<std::vector<std::vector<Expr>>> rates(A);
  std::vector<std::vector<Expr>> rewards(S, std::vector<Expr>(A, Expr::Number(0)));
  for (int a = 0; a < A; ++a) {
    const std::string& act = actions[a];
    if (!q.contains(act)) throw ModelError("Q is missing action '" + act + "'");
    const Json& mat = q.at(act);
    if (!mat.is_array() || static_cast<int>(mat.size()) != S) {
      throw ModelError("Q." + act + " must have " + std::to_string(S) + " rows");
    }
    rates[a].resize(S);
    for (int i = 0; i < S; ++i) {
      const Json& row = mat[i];
      if (!row.is_array() || static_cast<int>(row.size()) != S) {
        throw ModelError("Q." + act + " row " + std::to_string(i + 1) +
                         " must have " + std::to_string(S) + " entries");
      }
      for (int j = 0; j < S; ++j) {
        rates[a][i].push_back(expression(
            row[j], S, names,
            "Q." + act + "[" + std::to_string(i + 1) + "][" +
                std::to_string(j + 1) + "]"));
      }
    }
    if (!r.contains(act)) throw ModelError("r is missing action '" + act + "'");
    const Json& vec = r.at(act);
    if (!vec.is_array() || static_cast<int>(vec.size()) != S) {
      throw ModelError("r." + act + " must have " + std::to_string(S) +
                       " entries");
    }
    for (int i = 0; i < S; ++i) {
      rewards[i][a] = expression(vec[i], S, names,
                                 "r." + act + "[" + std::to_string(i + 1) + "]");
    }
  }
  return GameModel(std::move(states), std::move(actions), beta.get<double>(),
                   std::move(names), std::move(values), std::move(rates),
                   std::move(rewards));
}

Json model_to_json(const GameModel& model) {
  const int S = model.state_count();
  const int A = model.action_count();
  Json doc = Json::object();
  doc["states"] = model.state_labels();
  doc["actions"] = model.action_labels();
  doc["beta"] = model.beta();
  Json params = Json::object();
  auto values = model.param_values();
  for (std::size_t k = 0; k < model.param_names().size(); ++k) {
    params[model.param_names()[k]] = values[k];
  }
  doc["params"] = params;
  Json q = Json::object();
  Json r = Json::object();
  for (int a = 0; a < A; ++a) {
    Json mat = Json::array();
    Json vec = Json::array();
    for (int i = 0; i < S; ++i) {
      Json row = Json::array();
      for (int j = 0; j < S; ++j) row.push_back(to_string(model.rate(i, j, a)));
      mat.push_back(row);
      vec.push_back(to_string(model.reward(i, a)));
    }
    q[model.action_labels()[a]] = mat;
    r[model.action_labels()[a]] = vec;
  }
  doc["Q"] = q;
  doc["r"] = r;
  return doc;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file_atomic(const std::filesystem::path& path,
                       const std::string& contents) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write '" + tmp.string() + "'");
    out << contents;
    out.flush();
    if (!out) throw Error("write to '" + tmp.string() + "' failed");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw Error("cannot move output into '" + path.string() + "'");
  }
}

GameModel load_model(const std::filesystem::path& path) {
  std::string text = read_file(path);
  Json doc;
  if (path.extension() == ".toml") {
    try {
      doc = parse_toml(text);
    } catch (const ParseError& e) {
      throw ModelError(path.string() + ": " + e.what());
    }
  } else {
    try {
      doc = Json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
      throw ModelError(path.string() + ": " + e.what());
    }
  }
  return model_from_json(doc);
}

void save_model(const GameModel& model, const std::filesystem::path& path) {
  Json doc = model_to_json(model);
  if (path.extension() == ".toml") {
    write_file_atomic(path, write_toml(doc));
  } else {
    write_file_atomic(path, doc.dump(2) + "\n");
  }
}

}  // namespace mfg
