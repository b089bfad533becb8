#include "games_internal.hpp"

#include <queue>

namespace lpp::envs {

namespace {

const CellValue kEmpty{1};
const CellValue kFence{2};
const CellValue kSheep{3};

const Vocabulary& vocab() {
  static const Vocabulary v({"empty", "fence", "sheep"});
  return v;
}

const std::string& glyphs() {
  static const std::string g = "?.#s";
  return g;
}

// Enclosed when the sheep's 4-connected non-fence component avoids the grid
// boundary.
bool fi_is_goal(const GridState& s) {
  const auto sheep = find_first(s, kSheep);
  if (!sheep) return false;
  std::vector<char> visited(s.cell_count(), 0);
  std::queue<Action> frontier;
  frontier.push(*sheep);
  visited[sheep->row * s.width() + sheep->col] = 1;
  static const int dr[] = {-1, 1, 0, 0};
  static const int dc[] = {0, 0, -1, 1};
  while (!frontier.empty()) {
    const Action at = frontier.front();
    frontier.pop();
    if (at.row == 0 || at.row == s.height() - 1 || at.col == 0 || at.col == s.width() - 1) {
      return false;
    }
    for (int i = 0; i < 4; ++i) {
      const Action to{at.row + dr[i], at.col + dc[i]};
      if (!s.in_bounds(to)) continue;
      if (s.at(to.row, to.col) == kFence) continue;
      char& seen = visited[to.row * s.width() + to.col];
      if (seen) continue;
      seen = 1;
      frontier.push(to);
    }
  }
  return true;
}

StepResult fi_step(const GridState& s, Action a, Rng&) {
  if (s.at(a.row, a.col) != kEmpty) {
    return StepResult{s, StepStatus::kOngoing};
  }
  GridState next = s;
  next.set(a.row, a.col, kFence);
  const bool won = fi_is_goal(next);
  return StepResult{std::move(next), won ? StepStatus::kWon : StepStatus::kOngoing};
}

// Fill the row below the sheep from the nearest fence on its left to the
// nearest fence on its right, left to right.
Action fi_expert(const GridState& s) {
  const auto sheep = find_first(s, kSheep);
  if (!sheep) throw ExpertError("fence_in expert: no sheep");
  const int row = sheep->row + 1;
  if (row >= s.height()) throw ExpertError("fence_in expert: no row below the sheep");
  int left = -1;
  for (int c = sheep->col - 1; c >= 0; --c) {
    if (s.at(row, c) == kFence) {
      left = c;
      break;
    }
  }
  int right = -1;
  for (int c = sheep->col + 1; c < s.width(); ++c) {
    if (s.at(row, c) == kFence) {
      right = c;
      break;
    }
  }
  if (left < 0 || right < 0) throw ExpertError("fence_in expert: no flanking fences below");
  for (int c = left + 1; c < right; ++c) {
    if (s.at(row, c) == kEmpty) return Action{row, c};
  }
  throw ExpertError("fence_in expert: the gap is already closed");
}

}  // namespace

const GameApi& fence_in_api() {
  static const GameApi api{vocab, glyphs, fi_step, fi_is_goal, fi_expert, nullptr};
  return api;
}

}  // namespace lpp::envs
