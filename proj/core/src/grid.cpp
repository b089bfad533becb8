#include "lpp/grid.hpp"

#include <array>

namespace lpp {

Vocabulary::Vocabulary(std::vector<std::string> tags) : tags_(std::move(tags)) {
  if (tags_.size() > 200) {
    throw ValidationError("vocabulary: too many values");
  }
  for (const auto& t : tags_) {
    if (t == kOffscreenTag) {
      throw ValidationError("vocabulary: 'offscreen' is reserved");
    }
  }
}

const std::string& Vocabulary::tag_of(CellValue v) const {
  static const std::string kOff = kOffscreenTag;
  if (v == kOffscreen) return kOff;
  int idx = v.id - 1;
  if (idx < 0 || idx >= static_cast<int>(tags_.size())) {
    throw ValidationError("cell value id out of vocabulary range");
  }
  return tags_[idx];
}

CellValue Vocabulary::id_of(const std::string& tag) const {
  if (tag == kOffscreenTag) return kOffscreen;
  for (std::size_t i = 0; i < tags_.size(); ++i) {
    if (tags_[i] == tag) return CellValue{static_cast<std::uint8_t>(i + 1)};
  }
  throw ValidationError("unknown cell value tag: " + tag);
}

bool Vocabulary::contains(const std::string& tag) const {
  if (tag == kOffscreenTag) return true;
  for (const auto& t : tags_) {
    if (t == tag) return true;
  }
  return false;
}

GridState::GridState(int height, int width, CellValue fill)
    : height_(height), width_(width), cells_(static_cast<std::size_t>(height) * width, fill) {
  if (height < kMinGridDim || height > kMaxGridDim || width < kMinGridDim ||
      width > kMaxGridDim) {
    throw ValidationError("grid dimensions out of range [2,30]: " + std::to_string(height) +
                          "x" + std::to_string(width));
  }
}

void GridState::set(int row, int col, CellValue v) {
  if (!in_bounds(row, col)) {
    throw ValidationError("set: cell out of bounds");
  }
  if (v == kOffscreen) {
    throw ValidationError("set: offscreen cannot be stored in a grid");
  }
  cells_[row * width_ + col] = v;
}

namespace {
const std::array<std::string, 6> kGameNames = {
    "nim", "checkmate_tactic", "chase", "stop_the_fall", "reach_for_the_star", "fence_in"};
}

const std::string& game_name(Game g) { return kGameNames[static_cast<int>(g)]; }

Game game_from_name(const std::string& name) {
  for (std::size_t i = 0; i < kGameNames.size(); ++i) {
    if (kGameNames[i] == name) return static_cast<Game>(i);
  }
  throw ValidationError("unknown game: " + name);
}

std::size_t hash_of(const GridState& s) {
  std::size_t h = 1469598103934665603ull;
  auto mix = [&h](std::size_t v) {
    h ^= v + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
  };
  mix(static_cast<std::size_t>(s.height()));
  mix(static_cast<std::size_t>(s.width()));
  for (CellValue c : s.cells()) mix(c.id);
  return h;
}

}  // namespace lpp
