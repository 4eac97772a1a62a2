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

#ifndef MFG_TOML_LITE_HPP_
#define MFG_TOML_LITE_HPP_

#include <string>
#include <string_view>

#include <json.hpp>

namespace mfg {

// Reads the TOML subset used by model files: comments, `key = value` pairs,
// `[table]` and `[a.b]` headers, basic and literal strings, integers, floats,
// booleans, (multi-line) arrays and inline tables. Keys keep document order.
// Throws ParseError with the byte offset of the problem.
nlohmann::ordered_json parse_toml(std::string_view text);

// Writes a JSON object tree back as TOML. Nested objects become tables;
// arrays of arrays are written one row per line.
std::string write_toml(const nlohmann::ordered_json& doc);

}  // namespace mfg

#endif  // MFG_TOML_LITE_HPP_
