#pragma once

#include <cstdlib>
#include <optional>

#include "lpp/envs.hpp"

// Per-game entry points wired up by the registry.
namespace lpp::envs {

struct GameApi {
  const Vocabulary& (*vocabulary)();
  const std::string& (*glyphs)();
  StepResult (*step)(const GridState&, Action, Rng&);
  bool (*is_goal)(const GridState&);
  Action (*expert)(const GridState&);
  // Null for fixture-backed games.
  std::vector<TaskInstance> (*instances)(std::uint64_t seed);
};

const GameApi& nim_api();
const GameApi& checkmate_api();
const GameApi& chase_api();
const GameApi& stop_the_fall_api();
const GameApi& reach_star_api();
const GameApi& fence_in_api();

inline std::optional<Action> find_first(const GridState& s, CellValue v) {
  for (int r = 0; r < s.height(); ++r) {
    for (int c = 0; c < s.width(); ++c) {
      if (s.at(r, c) == v) return Action{r, c};
    }
  }
  return std::nullopt;
}

inline int count_value(const GridState& s, CellValue v) {
  int n = 0;
  for (CellValue c : s.cells()) n += (c == v) ? 1 : 0;
  return n;
}

inline int manhattan(Action a, Action b) {
  return std::abs(a.row - b.row) + std::abs(a.col - b.col);
}

}  // namespace lpp::envs
