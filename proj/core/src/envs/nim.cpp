#include "games_internal.hpp"

#include <algorithm>
#include <tuple>

namespace lpp::envs {

namespace {

const CellValue kStick{1};
const CellValue kEmpty{2};

const Vocabulary& vocab() {
  static const Vocabulary v({"matchstick", "empty"});
  return v;
}

const std::string& glyphs() {
  static const std::string g = "?|.";
  return g;
}

// Sticks stack upward from the bottom row; a column of height h occupies the
// bottom h rows.
int column_height(const GridState& s, int col) {
  int h = 0;
  for (int r = s.height() - 1; r >= 0; --r) {
    if (s.at(r, col) != kStick) break;
    ++h;
  }
  return h;
}

// Clicking a stick empties it and everything above it in the column.
void remove_from(GridState& s, int row, int col) {
  for (int r = row; r >= 0; --r) s.set(r, col, kEmpty);
}

bool board_empty(const GridState& s) { return count_value(s, kStick) == 0; }

StepResult nim_step(const GridState& s, Action a, Rng& rng) {
  if (s.at(a.row, a.col) != kStick) {
    return StepResult{s, StepStatus::kOngoing};  // empty clicks have no effect
  }
  GridState next = s;
  remove_from(next, a.row, a.col);
  if (board_empty(next)) {
    return StepResult{std::move(next), StepStatus::kWon};
  }
  // Opponent reply: level the columns when they differ; from a level
  // position every move loses, so pick a random stick.
  const int h0 = column_height(next, 0);
  const int h1 = column_height(next, 1);
  if (h0 != h1) {
    const int taller = h0 > h1 ? 0 : 1;
    const int target = std::min(h0, h1);
    remove_from(next, next.height() - 1 - target, taller);
  } else {
    const int pick = static_cast<int>(rng.below(2 * h0));
    const int col = pick / h0;
    const int depth = pick % h0;  // 0 = bottom stick
    remove_from(next, next.height() - 1 - depth, col);
  }
  if (board_empty(next)) {
    return StepResult{std::move(next), StepStatus::kLost};
  }
  return StepResult{std::move(next), StepStatus::kOngoing};
}

bool nim_is_goal(const GridState& s) { return board_empty(s); }

// Leveling: click the stick in the taller column at the shorter column's
// height plus one.
Action nim_expert(const GridState& s) {
  const int h0 = column_height(s, 0);
  const int h1 = column_height(s, 1);
  if (h0 == h1) throw ExpertError("nim expert: columns already level");
  const int taller = h0 > h1 ? 0 : 1;
  const int target = std::min(h0, h1);
  return Action{s.height() - 1 - target, taller};
}

std::vector<TaskInstance> nim_instances(std::uint64_t seed) {
  Rng rng(derive_seed(seed, 101));
  std::vector<TaskInstance> out;
  std::vector<std::tuple<int, int, int>> seen;
  while (out.size() < 20) {
    const int h = rng.uniform_int(2, 20);
    const int c0 = rng.uniform_int(1, h);
    const int c1 = rng.uniform_int(1, h);
    if (c0 == c1) continue;
    if (std::find(seen.begin(), seen.end(), std::make_tuple(h, c0, c1)) != seen.end()) continue;
    seen.emplace_back(h, c0, c1);
    GridState g(h, 2, kEmpty);
    for (int r = h - c0; r < h; ++r) g.set(r, 0, kStick);
    for (int r = h - c1; r < h; ++r) g.set(r, 1, kStick);
    const std::size_t i = out.size();
    const bool train = i < 11;
    TaskInstance inst;
    inst.game = Game::kNim;
    inst.initial_state = std::move(g);
    inst.split = train ? Split::kTrain : Split::kTest;
    inst.id = (train ? "nim-train-" : "nim-test-") + std::to_string(train ? i : i - 11);
    out.push_back(std::move(inst));
  }
  return out;
}

}  // namespace

const GameApi& nim_api() {
  static const GameApi api{vocab, glyphs, nim_step, nim_is_goal, nim_expert, nim_instances};
  return api;
}

}  // namespace lpp::envs
