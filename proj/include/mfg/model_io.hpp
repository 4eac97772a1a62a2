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

#ifndef MFG_MODEL_IO_HPP_
#define MFG_MODEL_IO_HPP_

#include <filesystem>
#include <string>

#include <json.hpp>

#include "mfg/model.hpp"

namespace mfg {

// Model document layout (JSON or TOML):
//   states  = ["s1", ...]          labels, S >= 2
//   actions = ["a1", ...]          labels, A >= 1
//   beta    = 0.5
//   params  = { name = value }     optional
//   Q       = { action = S x S array of expression strings }
//   r       = { action = length-S array of expression strings }
// Numbers are accepted wherever an expression string is.
GameModel model_from_json(const nlohmann::ordered_json& doc);
nlohmann::ordered_json model_to_json(const GameModel& model);

// Format is chosen by extension: .toml is TOML, anything else JSON.
GameModel load_model(const std::filesystem::path& path);
void save_model(const GameModel& model, const std::filesystem::path& path);

// Writes through a sibling temporary file and renames it into place.
void write_file_atomic(const std::filesystem::path& path,
                       const std::string& contents);
std::string read_file(const std::filesystem::path& path);

}  // namespace mfg

#endif  // MFG_MODEL_IO_HPP_
