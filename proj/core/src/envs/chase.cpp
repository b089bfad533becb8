#include "games_internal.hpp"

#include <algorithm>

namespace lpp::envs {

namespace {

const CellValue kEmpty{1};
const CellValue kAgent{2};
const CellValue kRabbit{3};
const CellValue kWall{4};
const CellValue kBlueWall{5};
const CellValue kUp{6};
const CellValue kDown{7};
const CellValue kLeft{8};
const CellValue kRight{9};

const Vocabulary& vocab() {
  static const Vocabulary v({"empty", "agent", "rabbit", "wall", "wall_blue", "arrow_up",
                             "arrow_down", "arrow_left", "arrow_right"});
  return v;
}

const std::string& glyphs() {
  static const std::string g = "?.Ar#+^v<>";
  return g;
}

struct Dir {
  int dr;
  int dc;
};

std::optional<Dir> arrow_direction(CellValue v) {
  if (v == kUp) return Dir{-1, 0};
  if (v == kDown) return Dir{1, 0};
  if (v == kLeft) return Dir{0, -1};
  if (v == kRight) return Dir{0, 1};
  return std::nullopt;
}

// The adversary takes a random move that strictly increases its Manhattan
// distance from the agent; walls, arrows, bounds and the agent block it.
void rabbit_reply(GridState& s, Rng& rng) {
  const auto rabbit = find_first(s, kRabbit);
  const auto agent = find_first(s, kAgent);
  if (!rabbit || !agent) return;
  const int current = manhattan(*rabbit, *agent);
  static const Dir kDirs[] = {{-1, 0}, {1, 0}, {0, -1}, {0, 1}};
  std::vector<Action> options;
  for (const Dir& d : kDirs) {
    const Action to{rabbit->row + d.dr, rabbit->col + d.dc};
    if (!s.in_bounds(to)) continue;
    if (s.at(to.row, to.col) != kEmpty) continue;
    if (manhattan(to, *agent) <= current) continue;
    options.push_back(to);
  }
  if (options.empty()) return;
  const Action to = options[rng.below(options.size())];
  s.set(rabbit->row, rabbit->col, kEmpty);
  s.set(to.row, to.col, kRabbit);
}

StepResult chase_step(const GridState& s, Action a, Rng& rng) {
  GridState next = s;
  const CellValue v = s.at(a.row, a.col);

  if (const auto dir = arrow_direction(v)) {
    if (const auto agent = find_first(next, kAgent)) {
      const Action to{agent->row + dir->dr, agent->col + dir->dc};
      if (next.in_bounds(to)) {
        const CellValue tv = next.at(to.row, to.col);
        if (tv == kRabbit) {
          // Catch: the adversary is removed and play ends.
          next.set(to.row, to.col, kAgent);
          next.set(agent->row, agent->col, kEmpty);
          return StepResult{std::move(next), StepStatus::kWon};
        }
        if (tv == kEmpty) {
          next.set(to.row, to.col, kAgent);
          next.set(agent->row, agent->col, kEmpty);
        }
      }
    }
  } else if (v == kEmpty) {
    next.set(a.row, a.col, kBlueWall);
  }
  // Every click advances time: walls, pieces, and blocked moves included.
  rabbit_reply(next, rng);
  return StepResult{std::move(next), StepStatus::kOngoing};
}

bool chase_is_goal(const GridState& s) {
  return !find_first(s, kRabbit).has_value() && find_first(s, kAgent).has_value();
}

bool has_increasing_move(const GridState& s, Action rabbit, Action agent) {
  const int current = manhattan(rabbit, agent);
  static const int dr[] = {-1, 1, 0, 0};
  static const int dc[] = {0, 0, -1, 1};
  for (int i = 0; i < 4; ++i) {
    const Action to{rabbit.row + dr[i], rabbit.col + dc[i]};
    if (!s.in_bounds(to)) continue;
    if (s.at(to.row, to.col) != kEmpty) continue;
    if (manhattan(to, agent) > current) return true;
  }
  return false;
}

// Wait for the adversary to run out of distance-increasing moves, seal its
// vertical escape with a drawn wall, then walk in: rows first, then columns.
Action chase_expert(const GridState& s) {
  const auto rabbit = find_first(s, kRabbit);
  const auto agent = find_first(s, kAgent);
  if (!rabbit || !agent) throw ExpertError("chase expert: agent or adversary missing");

  if (has_increasing_move(s, *rabbit, *agent)) {
    const auto wall = find_first(s, kWall);
    if (!wall) throw ExpertError("chase expert: no wall to wait on");
    return *wall;
  }

  for (int dr : {-1, 1}) {
    const Action t{rabbit->row + dr, rabbit->col};
    if (s.in_bounds(t) && s.at(t.row, t.col) == kEmpty) return t;  // trap
  }

  CellValue arrow;
  if (agent->row != rabbit->row) {
    arrow = agent->row < rabbit->row ? kDown : kUp;
  } else if (agent->col != rabbit->col) {
    arrow = agent->col < rabbit->col ? kRight : kLeft;
  } else {
    throw ExpertError("chase expert: already on the adversary");
  }
  const auto cell = find_first(s, arrow);
  if (!cell) throw ExpertError("chase expert: arrow key missing");
  return *cell;
}

}  // namespace

const GameApi& chase_api() {
  static const GameApi api{vocab, glyphs, chase_step, chase_is_goal, chase_expert, nullptr};
  return api;
}

}  // namespace lpp::envs
