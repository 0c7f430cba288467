// Copyright 2026 The POTMMCP Authors
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

#include "potmmcp/grid.h"

#include <cstdlib>
#include <deque>
#include <fstream>
#include <sstream>

#include "potmmcp/common.h"

#ifndef POTMMCP_DEFAULT_DATA_DIR
#define POTMMCP_DEFAULT_DATA_DIR "data"
#endif

namespace potmmcp {

std::string DataDir() {
  if (const char* env = std::getenv("POTMMCP_DATA_DIR"); env && *env) {
    return env;
  }
  return POTMMCP_DEFAULT_DATA_DIR;
}

GridLayout GridLayout::Parse(const std::string& name,
                             const std::string& text) {
  GridLayout layout;
  layout.name_ = name;
  std::istringstream in(text);
  std::string line;
  std::vector<std::string> rows;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    rows.push_back(line);
  }
  if (rows.empty()) throw ConfigError("layout '" + name + "' is empty");
  layout.height_ = static_cast<int>(rows.size());
  layout.width_ = static_cast<int>(rows.front().size());
  for (const std::string& row : rows) {
    if (static_cast<int>(row.size()) != layout.width_) {
      throw ConfigError("layout '" + name + "' rows have unequal length");
    }
    layout.cells_.insert(layout.cells_.end(), row.begin(), row.end());
  }
  return layout;
}

GridLayout GridLayout::Load(const std::string& name) {
  const std::string path = DataDir() + "/layouts/" + name + ".txt";
  std::ifstream in(path);
  if (!in) {
    throw ConfigError("unknown layout '" + name + "' (no file " + path + ")");
  }
  std::stringstream buffer;
  buffer << in.rdbuf();
  return Parse(name, buffer.str());
}

std::vector<Coord> GridLayout::Find(char marker) const {
  std::vector<Coord> out;
  for (int k = 0; k < NumCells(); ++k) {
    if (cells_[k] == marker) out.push_back(FromIndex(k));
  }
  return out;
}

std::vector<int> GridLayout::DistancesTo(Coord target) const {
  std::vector<int> dist(static_cast<std::size_t>(NumCells()), -1);
  if (IsWall(target)) return dist;
  std::deque<Coord> frontier{target};
  dist[Index(target)] = 0;
  while (!frontier.empty()) {
    const Coord c = frontier.front();
    frontier.pop_front();
    for (int d = 0; d < 4; ++d) {
      const Coord n = c.Step(d);
      if (IsWall(n) || dist[Index(n)] >= 0) continue;
      dist[Index(n)] = dist[Index(c)] + 1;
      frontier.push_back(n);
    }
  }
  return dist;
}

}  // namespace potmmcp
