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

#include "doctest.h"

namespace potmmcp {
namespace {

TEST_CASE("parse reads walls and markers") {
  const GridLayout g = GridLayout::Parse("t", "..#\nA.#\n...\n");
  CHECK(g.width() == 3);
  CHECK(g.height() == 3);
  CHECK(g.IsWall({2, 0}));
  CHECK_FALSE(g.IsWall({0, 1}));
  CHECK(g.IsWall({-1, 0}));
  CHECK(g.IsWall({3, 0}));
  CHECK(g.At({0, 1}) == 'A');
  REQUIRE(g.Find('A').size() == 1);
  CHECK(g.Find('A')[0] == Coord{0, 1});
  CHECK(g.FromIndex(g.Index({1, 2})) == Coord{1, 2});
}

TEST_CASE("ragged layouts are rejected") {
  CHECK_THROWS(GridLayout::Parse("bad", "...\n..\n"));
  CHECK_THROWS(GridLayout::Parse("empty", ""));
}

TEST_CASE("distances route around walls") {
  const GridLayout g = GridLayout::Parse("t", "...\n##.\n...\n");
  const auto d = g.DistancesTo({0, 2});
  CHECK(d[static_cast<std::size_t>(g.Index({0, 2}))] == 0);
  CHECK(d[static_cast<std::size_t>(g.Index({0, 0}))] == 6);
  CHECK(d[static_cast<std::size_t>(g.Index({0, 1}))] == -1);
}

TEST_CASE("shipped layouts load") {
  for (const char* name : {"pe8", "pp10", "driving7"}) {
    CAPTURE(name);
    const GridLayout g = GridLayout::Load(name);
    CHECK(g.width() > 0);
    CHECK(g.height() > 0);
  }
  CHECK_THROWS(GridLayout::Load("no_such_layout"));
}

TEST_CASE("manhattan") {
  CHECK(Manhattan({0, 0}, {3, -2}) == 5);
  CHECK(Coord{1, 1}.Step(kNorth) == Coord{1, 0});
  CHECK(Coord{1, 1}.Step(kWest) == Coord{0, 1});
}

}  // namespace
}  // namespace potmmcp
