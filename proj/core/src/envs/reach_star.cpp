#include "games_internal.hpp"

#include <algorithm>
#include <set>

namespace lpp::envs {

namespace {

const CellValue kEmpty{1};
const CellValue kRobot{2};
const CellValue kStar{3};
const CellValue kBlock{4};  // brown, dynamic
const CellValue kArrowLeft{5};
const CellValue kArrowRight{6};
const CellValue kRobotOnStar{7};

const Vocabulary& vocab() {
  static const Vocabulary v({"empty", "robot", "star", "block", "arrow_left", "arrow_right",
                             "robot_on_star"});
  return v;
}

const std::string& glyphs() {
  static const std::string g = "?.R*=<>!";
  return g;
}

bool dynamic_value(CellValue v) { return v == kRobot || v == kBlock; }

bool gravity_tick(GridState& s) {
  std::vector<Action> movers;
  for (int r = s.height() - 2; r >= 0; --r) {
    for (int c = 0; c < s.width(); ++c) {
      if (dynamic_value(s.at(r, c)) && s.at(r + 1, c) == kEmpty) movers.push_back(Action{r, c});
    }
  }
  std::sort(movers.begin(), movers.end(), [](Action a, Action b) { return a.row > b.row; });
  for (Action m : movers) {
    s.set(m.row + 1, m.col, s.at(m.row, m.col));
    s.set(m.row, m.col, kEmpty);
  }
  return !movers.empty();
}

void settle(GridState& s) {
  for (int i = 0; i <= s.height(); ++i) {
    if (!gravity_tick(s)) return;
  }
}

bool rfts_is_goal(const GridState& s) { return find_first(s, kRobotOnStar).has_value(); }

StepResult rfts_step(const GridState& s, Action a, Rng&) {
  const CellValue v = s.at(a.row, a.col);
  GridState next = s;

  if (v == kArrowLeft || v == kArrowRight) {
    const int dc = v == kArrowLeft ? -1 : 1;
    const auto robot = find_first(next, kRobot);
    if (robot) {
      const Action side{robot->row, robot->col + dc};
      if (next.in_bounds(side)) {
        const CellValue sv = next.at(side.row, side.col);
        if (sv == kStar) {
          next.set(side.row, side.col, kRobotOnStar);
          next.set(robot->row, robot->col, kEmpty);
          return StepResult{std::move(next), StepStatus::kWon};
        }
        if (sv == kEmpty) {
          next.set(side.row, side.col, kRobot);
          next.set(robot->row, robot->col, kEmpty);
          settle(next);
        } else {
          // Climb a single block when the cell above it is free.
          const Action up{robot->row - 1, robot->col + dc};
          if (next.in_bounds(up)) {
            const CellValue uv = next.at(up.row, up.col);
            if (uv == kStar) {
              next.set(up.row, up.col, kRobotOnStar);
              next.set(robot->row, robot->col, kEmpty);
              return StepResult{std::move(next), StepStatus::kWon};
            }
            if (uv == kEmpty) {
              next.set(up.row, up.col, kRobot);
              next.set(robot->row, robot->col, kEmpty);
              settle(next);
            }
          }
        }
      }
    }
    return StepResult{std::move(next), StepStatus::kOngoing};
  }

  if (v == kEmpty) {
    next.set(a.row, a.col, kBlock);
    settle(next);
    return StepResult{std::move(next), StepStatus::kOngoing};
  }

  return StepResult{std::move(next), StepStatus::kOngoing};
}

int stack_height(const GridState& s, int col) {
  int h = 0;
  for (int r = s.height() - 1; r >= 0; --r) {
    if (s.at(r, col) != kBlock) break;
    ++h;
  }
  return h;
}

// Build the staircase by clicking the cell on the star's downward diagonal
// in the first deficient column (the dropped block falls onto the stack),
// then walk toward the star.
Action rfts_expert(const GridState& s) {
  if (rfts_is_goal(s)) throw ExpertError("reach_for_the_star expert: already done");
  const auto robot = find_first(s, kRobot);
  const auto star = find_first(s, kStar);
  if (!robot || !star) throw ExpertError("reach_for_the_star expert: robot or star missing");
  const int dir = star->col > robot->col ? 1 : (star->col < robot->col ? -1 : 0);
  if (dir == 0) throw ExpertError("reach_for_the_star expert: star above the robot");

  const int ground = s.height() - 1;
  const int delta = ground - star->row;
  for (int j = 1; j <= delta; ++j) {
    const int col = star->col - dir * (delta + 1 - j);
    if (col < 0 || col >= s.width()) throw ExpertError("reach_for_the_star expert: no room");
    if (stack_height(s, col) < j) {
      return Action{s.height() - j, col};  // on the diagonal; the block falls into place
    }
  }
  const auto arrow = find_first(s, dir > 0 ? kArrowRight : kArrowLeft);
  if (!arrow) throw ExpertError("reach_for_the_star expert: arrow key missing");
  return *arrow;
}

GridState mirror(const GridState& s) {
  GridState out(s.height(), s.width(), kEmpty);
  for (int r = 0; r < s.height(); ++r) {
    for (int c = 0; c < s.width(); ++c) {
      if (s.at(r, c) != kEmpty) out.set(r, s.width() - 1 - c, s.at(r, c));
    }
  }
  return out;
}

std::vector<TaskInstance> rfts_instances(std::uint64_t seed) {
  Rng rng(derive_seed(seed, 303));
  std::vector<TaskInstance> out;
  std::set<std::size_t> seen;
  while (out.size() < 20) {
    const int delta = rng.uniform_int(2, 11);
    const int right_gap = rng.uniform_int(0, 5);
    const int pad_top = rng.uniform_int(0, 5);
    const int approach = rng.uniform_int(0, 5);
    const int pad_left = rng.uniform_int(0, 5);
    const bool flip = rng.coin();
    // Builds, walk and the final step must fit in the horizon.
    if (delta * (delta + 1) / 2 + approach + delta + 1 > kHorizon) continue;

    const int height = delta + 2 + pad_top;
    const int robot_col = pad_left;
    const int star_col = pad_left + approach + 1 + delta;
    const int width = star_col + 1 + right_gap;
    if (width > kMaxGridDim || width < 3) continue;

    GridState g(height, width, kEmpty);
    g.set(0, 0, kArrowLeft);
    g.set(0, 1, kArrowRight);
    g.set(height - 1, robot_col, kRobot);
    g.set(pad_top + 1, star_col, kStar);
    if (flip) g = mirror(g);

    const std::size_t key = hash_of(g);
    if (!seen.insert(key).second) continue;
    const std::size_t i = out.size();
    const bool train = i < 11;
    TaskInstance inst;
    inst.game = Game::kReachForTheStar;
    inst.initial_state = std::move(g);
    inst.split = train ? Split::kTrain : Split::kTest;
    inst.id = (train ? "reach_for_the_star-train-" : "reach_for_the_star-test-") +
              std::to_string(train ? i : i - 11);
    out.push_back(std::move(inst));
  }
  return out;
}

}  // namespace

const GameApi& reach_star_api() {
  static const GameApi api{vocab, glyphs, rfts_step, rfts_is_goal, rfts_expert, rfts_instances};
  return api;
}

}  // namespace lpp::envs
