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

#include "mfg/trajectory_io.hpp"

#include <charconv>
#include <cmath>
#include <sstream>

#include "mfg/errors.hpp"
#include "mfg/expr.hpp"

namespace mfg {
namespace {

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
}

double to_double(std::string_view s, std::size_t pos) {
  double v = 0.0;
  auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || end != s.data() + s.size()) {
    throw ParseError("not a number: '" + std::string(s) + "'", pos);
  }
  return v;
}

}  // namespace

std::string trajectory_csv(const Trajectory& traj, const GameModel& model) {
  const int S = model.state_count();
  std::ostringstream os;
  os << 't';
  for (int i = 1; i <= S; ++i) os << ",m" << i;
  os << ",mode,strategy,lambda\n";
  for (const auto& s : traj.samples) {
    os << format_double(s.t);
    for (int i = 0; i < S; ++i) os << ',' << format_double(s.m[i]);
    os << ',' << to_string(traj.mode_of(s)) << ','
       << traj.strategy_label(s, model.action_labels()) << ',';
    if (!std::isnan(s.lambda)) os << format_double(s.lambda);
    os << '\n';
  }
  return os.str();
}

std::vector<CsvRow> parse_trajectory_csv(std::string_view text) {
  std::vector<CsvRow> rows;
  std::size_t pos = 0;
  std::size_t columns = 0;
  bool header = true;
  while (pos < text.size()) {
    std::size_t nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    std::string_view line = text.substr(pos, nl - pos);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    const std::size_t line_pos = pos;
    pos = nl + 1;
    if (line.empty()) continue;
    auto cells = split(line);
    if (header) {
      if (cells.size() < 5 || cells.front() != "t" || cells[cells.size() - 3] != "mode" ||
          cells[cells.size() - 2] != "strategy" || cells.back() != "lambda") {
        throw ParseError("unexpected trajectory header", line_pos);
      }
      columns = cells.size();
      header = false;
      continue;
    }
    if (cells.size() != columns) {
      throw ParseError("wrong number of columns", line_pos);
    }
    CsvRow row;
    row.t = to_double(cells[0], line_pos);
    const int S = static_cast<int>(columns) - 4;
    row.m.resize(S);
    for (int i = 0; i < S; ++i) row.m[i] = to_double(cells[1 + i], line_pos);
    row.mode = std::string(cells[columns - 3]);
    row.strategy = std::string(cells[columns - 2]);
    if (!cells.back().empty()) row.lambda = to_double(cells.back(), line_pos);
    rows.push_back(std::move(row));
  }
  if (header) throw ParseError("empty trajectory file", 0);
  return rows;
}

}  // namespace mfg
