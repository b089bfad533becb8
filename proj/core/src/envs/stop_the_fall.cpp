#include "games_internal.hpp"

#include <algorithm>

namespace lpp::envs {

namespace {

const CellValue kEmpty{1};
const CellValue kParachuter{2};
const CellValue kBlock{3};      // gray, falls once gravity fires
const CellValue kBlueBlock{4};  // drawn, static
const CellValue kFire{5};
const CellValue kButton{6};

const Vocabulary& vocab() {
  static const Vocabulary v({"empty", "parachuter", "block", "block_blue", "fire", "button"});
  return v;
}

const std::string& glyphs() {
  static const std::string g = "?.P=+fo";
  return g;
}

bool dynamic_value(CellValue v) { return v == kParachuter || v == kBlock; }

// One simultaneous tick: every dynamic object with an empty cell below it
// (judged against the pre-tick state) moves down one. Returns whether
// anything moved.
bool gravity_tick(GridState& s) {
  std::vector<Action> movers;
  for (int r = s.height() - 2; r >= 0; --r) {
    for (int c = 0; c < s.width(); ++c) {
      if (dynamic_value(s.at(r, c)) && s.at(r + 1, c) == kEmpty) movers.push_back(Action{r, c});
    }
  }
  // Bottom-most first so a mover never lands on a cell another mover vacates
  // incorrectly; targets are disjoint by construction.
  std::sort(movers.begin(), movers.end(),
            [](Action a, Action b) { return a.row > b.row; });
  for (Action m : movers) {
    const CellValue v = s.at(m.row, m.col);
    s.set(m.row + 1, m.col, v);
    s.set(m.row, m.col, kEmpty);
  }
  return !movers.empty();
}

void settle(GridState& s) {
  for (int i = 0; i <= s.height(); ++i) {
    if (!gravity_tick(s)) return;
  }
}

bool quiescent(const GridState& s) {
  for (int r = 0; r < s.height() - 1; ++r) {
    for (int c = 0; c < s.width(); ++c) {
      if (dynamic_value(s.at(r, c)) && s.at(r + 1, c) == kEmpty) return false;
    }
  }
  return true;
}

bool parachuter_safe(const GridState& s) {
  const auto p = find_first(s, kParachuter);
  if (!p) return false;
  static const int dr[] = {-1, 1, 0, 0};
  static const int dc[] = {0, 0, -1, 1};
  for (int i = 0; i < 4; ++i) {
    if (s.at(p->row + dr[i], p->col + dc[i]) == kFire) return false;
  }
  return true;
}

bool stf_is_goal(const GridState& s) {
  // Gravity fired (the button is consumed when pressed), everything at rest,
  // parachuter not touching fire.
  if (find_first(s, kButton)) return false;
  if (!find_first(s, kParachuter)) return false;
  return quiescent(s) && parachuter_safe(s);
}

StepResult stf_step(const GridState& s, Action a, Rng&) {
  const CellValue v = s.at(a.row, a.col);
  if (v == kEmpty) {
    GridState next = s;
    next.set(a.row, a.col, kBlueBlock);
    return StepResult{std::move(next), StepStatus::kOngoing};
  }
  if (v == kButton) {
    GridState next = s;
    next.set(a.row, a.col, kEmpty);
    settle(next);
    const bool won = stf_is_goal(next);
    return StepResult{std::move(next), won ? StepStatus::kWon : StepStatus::kLost};
  }
  return StepResult{s, StepStatus::kOngoing};
}

// Raise the landing spot below the parachuter until it comes to rest clear
// of fire, then press the button. Fixtures keep gray blocks out of the
// parachuter's column, so the projection only meets static cells.
Action stf_expert(const GridState& s) {
  const auto button = find_first(s, kButton);
  if (!button) throw ExpertError("stop_the_fall expert: button already pressed");
  const auto p = find_first(s, kParachuter);
  if (!p) throw ExpertError("stop_the_fall expert: no parachuter");

  int support = s.height();  // row of the first non-empty cell below
  for (int r = p->row + 1; r < s.height(); ++r) {
    if (s.at(r, p->col) != kEmpty) {
      support = r;
      break;
    }
  }
  const int rest = support - 1;
  if (rest == p->row) throw ExpertError("stop_the_fall expert: parachuter already resting");

  static const int dr[] = {-1, 1, 0, 0};
  static const int dc[] = {0, 0, -1, 1};
  bool safe = true;
  for (int i = 0; i < 4; ++i) {
    if (s.at(rest + dr[i], p->col + dc[i]) == kFire) safe = false;
  }
  if (safe) return *button;
  return Action{rest, p->col};
}

}  // namespace

const GameApi& stop_the_fall_api() {
  static const GameApi api{vocab, glyphs, stf_step, stf_is_goal, stf_expert, nullptr};
  return api;
}

}  // namespace lpp::envs
