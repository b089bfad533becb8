#pragma once

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace lpp {

// A cell value is an index into a per-game vocabulary. Id 0 is reserved for
// the "offscreen" token, which out-of-bounds reads produce and which never
// appears inside a grid.
struct CellValue {
  std::uint8_t id = 0;

  friend bool operator==(CellValue a, CellValue b) { return a.id == b.id; }
  friend bool operator!=(CellValue a, CellValue b) { return a.id != b.id; }
  friend bool operator<(CellValue a, CellValue b) { return a.id < b.id; }
};

inline constexpr CellValue kOffscreen{0};
inline constexpr const char* kOffscreenTag = "offscreen";

// Ordered list of the value tags a game can store in its grid. The value set
// seen by feature programs is this vocabulary plus the offscreen token, so
// size() counts both.
class Vocabulary {
 public:
  Vocabulary() = default;
  explicit Vocabulary(std::vector<std::string> tags);

  // Number of values including offscreen.
  int size() const { return static_cast<int>(tags_.size()) + 1; }

  // Grid-storable values only (excludes offscreen).
  int grid_value_count() const { return static_cast<int>(tags_.size()); }

  const std::string& tag_of(CellValue v) const;
  CellValue id_of(const std::string& tag) const;  // throws on unknown tag
  bool contains(const std::string& tag) const;
  CellValue grid_value(int index) const { return CellValue{static_cast<std::uint8_t>(index + 1)}; }

 private:
  std::vector<std::string> tags_;
};

struct Action {
  int row = 0;
  int col = 0;

  friend bool operator==(Action a, Action b) { return a.row == b.row && a.col == b.col; }
  friend bool operator!=(Action a, Action b) { return !(a == b); }
};

// Horizontal/vertical displacement. x is positive rightward (columns),
// y is positive downward (rows); row 0 is the top row.
struct Offset {
  int x = 0;
  int y = 0;

  friend bool operator==(Offset a, Offset b) { return a.x == b.x && a.y == b.y; }
};

inline std::pair<int, int> coordinate_shift(std::pair<int, int> row_col, Offset o) {
  return {row_col.first + o.y, row_col.second + o.x};
}

inline constexpr int kMinGridDim = 2;
inline constexpr int kMaxGridDim = 30;

// Rectangular grid of cell values, row-major, immutable by convention once
// built (mutating accessors exist for the environment transition code that
// constructs successor states).
class GridState {
 public:
  GridState() = default;
  GridState(int height, int width, CellValue fill = CellValue{1});

  int height() const { return height_; }
  int width() const { return width_; }
  int cell_count() const { return height_ * width_; }

  bool in_bounds(int row, int col) const {
    return row >= 0 && row < height_ && col >= 0 && col < width_;
  }
  bool in_bounds(Action a) const { return in_bounds(a.row, a.col); }

  // Offscreen for any out-of-bounds coordinate; never fails.
  CellValue at(int row, int col) const {
    return in_bounds(row, col) ? cells_[row * width_ + col] : kOffscreen;
  }
  CellValue at(std::pair<int, int> rc) const { return at(rc.first, rc.second); }

  void set(int row, int col, CellValue v);

  const std::vector<CellValue>& cells() const { return cells_; }

  friend bool operator==(const GridState& a, const GridState& b) {
    return a.height_ == b.height_ && a.width_ == b.width_ && a.cells_ == b.cells_;
  }
  friend bool operator!=(const GridState& a, const GridState& b) { return !(a == b); }

 private:
  int height_ = 0;
  int width_ = 0;
  std::vector<CellValue> cells_;
};

inline CellValue value_at(const GridState& s, std::pair<int, int> rc) { return s.at(rc); }

enum class Game {
  kNim,
  kCheckmateTactic,
  kChase,
  kStopTheFall,
  kReachForTheStar,
  kFenceIn,
};

inline constexpr Game kAllGames[] = {
    Game::kNim,          Game::kCheckmateTactic,  Game::kChase,
    Game::kStopTheFall,  Game::kReachForTheStar,  Game::kFenceIn,
};

const std::string& game_name(Game g);
Game game_from_name(const std::string& name);  // throws on unknown name

inline constexpr int kHorizon = 60;

struct TrajectoryStep {
  GridState state;
  Action action;
};

struct Trajectory {
  Game game = Game::kNim;
  std::vector<TrajectoryStep> steps;
  GridState final_state;

  friend bool operator==(const Trajectory& a, const Trajectory& b) {
    if (a.game != b.game || a.final_state != b.final_state ||
        a.steps.size() != b.steps.size()) {
      return false;
    }
    for (std::size_t i = 0; i < a.steps.size(); ++i) {
      if (a.steps[i].state != b.steps[i].state || a.steps[i].action != b.steps[i].action) {
        return false;
      }
    }
    return true;
  }
};

enum class Split { kTrain, kTest };

struct TaskInstance {
  Game game = Game::kNim;
  GridState initial_state;
  Split split = Split::kTrain;
  std::string id;

  friend bool operator==(const TaskInstance& a, const TaskInstance& b) {
    return a.game == b.game && a.initial_state == b.initial_state &&
           a.split == b.split && a.id == b.id;
  }
};

// Thrown when constructing or deserializing an object that violates a data
// model invariant; the message names the offending field.
struct ValidationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::size_t hash_of(const GridState& s);

}  // namespace lpp
