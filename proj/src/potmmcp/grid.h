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

#ifndef POTMMCP_GRID_H_
#define POTMMCP_GRID_H_

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace potmmcp {

// Absolute directions; y grows downwards.
enum Direction : int { kNorth = 0, kEast = 1, kSouth = 2, kWest = 3 };
inline constexpr std::array<int, 4> kDx = {0, 1, 0, -1};
inline constexpr std::array<int, 4> kDy = {-1, 0, 1, 0};

struct Coord {
  int x = 0;
  int y = 0;
  bool operator==(const Coord&) const = default;
  Coord Step(int dir) const { return {x + kDx[dir], y + kDy[dir]}; }
};

inline int Manhattan(Coord a, Coord b) {
  return (a.x > b.x ? a.x - b.x : b.x - a.x) +
         (a.y > b.y ? a.y - b.y : b.y - a.y);
}

// Static grid parsed from an ASCII layout file: '#' is a wall, '.' free,
// anything else is a free cell carrying an environment-specific marker.
// Cells outside the grid behave as walls.
class GridLayout {
 public:
  static GridLayout Parse(const std::string& name, const std::string& text);
  // Reads <data dir>/layouts/<name>.txt.
  static GridLayout Load(const std::string& name);

  const std::string& name() const { return name_; }
  int width() const { return width_; }
  int height() const { return height_; }
  bool InBounds(Coord c) const {
    return c.x >= 0 && c.y >= 0 && c.x < width_ && c.y < height_;
  }
  bool IsWall(Coord c) const {
    return !InBounds(c) || cells_[Index(c)] == '#';
  }
  char At(Coord c) const { return InBounds(c) ? cells_[Index(c)] : '#'; }
  int Index(Coord c) const { return c.y * width_ + c.x; }
  Coord FromIndex(int k) const { return {k % width_, k / width_}; }
  int NumCells() const { return width_ * height_; }

  // Cells carrying the marker, in row-major order.
  std::vector<Coord> Find(char marker) const;
  // Shortest-path distances to `target` over free cells; -1 when
  // unreachable.
  std::vector<int> DistancesTo(Coord target) const;

 private:
  std::string name_;
  int width_ = 0;
  int height_ = 0;
  std::vector<char> cells_;
};

// Root of the shipped data files (layouts). POTMMCP_DATA_DIR overrides the
// compiled-in default.
std::string DataDir();

}  // namespace potmmcp

#endif  // POTMMCP_GRID_H_
