#include "games_internal.hpp"

#include <algorithm>
#include <set>

namespace lpp::envs {

namespace {

const CellValue kEmpty{1};
const CellValue kQueen{2};
const CellValue kKing{3};
const CellValue kBlackKing{4};
const CellValue kQueenSel{5};
const CellValue kKingSel{6};

const Vocabulary& vocab() {
  static const Vocabulary v({"empty", "white_queen", "white_king", "black_king",
                             "white_queen_selected", "white_king_selected"});
  return v;
}

const std::string& glyphs() {
  static const std::string g = "?.QKk@&";
  return g;
}

bool is_queen(CellValue v) { return v == kQueen || v == kQueenSel; }
bool is_white_king(CellValue v) { return v == kKing || v == kKingSel; }

struct Pieces {
  std::optional<Action> queen;
  std::optional<Action> king;
  std::optional<Action> black_king;
  std::optional<Action> selected;  // whichever white piece is selected
};

Pieces locate(const GridState& s) {
  Pieces p;
  for (int r = 0; r < s.height(); ++r) {
    for (int c = 0; c < s.width(); ++c) {
      const CellValue v = s.at(r, c);
      if (is_queen(v)) p.queen = Action{r, c};
      if (is_white_king(v)) p.king = Action{r, c};
      if (v == kBlackKing) p.black_king = Action{r, c};
      if (v == kQueenSel || v == kKingSel) p.selected = Action{r, c};
    }
  }
  return p;
}

int sgn(int v) { return (v > 0) - (v < 0); }

bool chebyshev_adjacent(Action a, Action b) {
  return std::max(std::abs(a.row - b.row), std::abs(a.col - b.col)) == 1;
}

// Straight or diagonal line with a clear path. `transparent` is a square the
// path ignores (the black king slides off its own attack ray).
bool queen_attacks(const GridState& s, Action queen, Action target,
                   std::optional<Action> transparent) {
  const int dr = target.row - queen.row;
  const int dc = target.col - queen.col;
  if (dr == 0 && dc == 0) return false;
  if (dr != 0 && dc != 0 && std::abs(dr) != std::abs(dc)) return false;
  const int sr = sgn(dr);
  const int sc = sgn(dc);
  int r = queen.row + sr;
  int c = queen.col + sc;
  while (r != target.row || c != target.col) {
    const bool clear = s.at(r, c) == kEmpty ||
                       (transparent && transparent->row == r && transparent->col == c);
    if (!clear) return false;
    r += sr;
    c += sc;
  }
  return true;
}

bool black_in_check(const GridState& s, const Pieces& p) {
  if (!p.black_king) return false;
  if (p.queen && queen_attacks(s, *p.queen, *p.black_king, std::nullopt)) return true;
  if (p.king && chebyshev_adjacent(*p.king, *p.black_king)) return true;
  return false;
}

// Adjacent, in bounds, unoccupied, and not attacked by the queen (x-raying
// through the black king's current square) or the white king.
std::vector<Action> black_legal_moves(const GridState& s, const Pieces& p) {
  std::vector<Action> out;
  if (!p.black_king) return out;
  const Action bk = *p.black_king;
  for (int dr = -1; dr <= 1; ++dr) {
    for (int dc = -1; dc <= 1; ++dc) {
      if (dr == 0 && dc == 0) continue;
      const Action d{bk.row + dr, bk.col + dc};
      if (!s.in_bounds(d)) continue;
      if (s.at(d.row, d.col) != kEmpty) continue;
      if (p.queen && queen_attacks(s, *p.queen, d, bk)) continue;
      if (p.king && chebyshev_adjacent(*p.king, d)) continue;
      out.push_back(d);
    }
  }
  return out;
}

bool checkmate(const GridState& s) {
  const Pieces p = locate(s);
  return p.black_king && black_in_check(s, p) && black_legal_moves(s, p).empty();
}

CellValue deselect_value(CellValue v) {
  if (v == kQueenSel) return kQueen;
  if (v == kKingSel) return kKing;
  return v;
}

CellValue select_value(CellValue v) {
  if (v == kQueen) return kQueenSel;
  if (v == kKing) return kKingSel;
  return v;
}

void clear_selection(GridState& s) {
  for (int r = 0; r < s.height(); ++r) {
    for (int c = 0; c < s.width(); ++c) {
      const CellValue v = s.at(r, c);
      const CellValue d = deselect_value(v);
      if (d != v) s.set(r, c, d);
    }
  }
}

bool white_move_legal(const GridState& s, const Pieces& p, Action from, Action to) {
  const CellValue v = s.at(from.row, from.col);
  if (v == kQueenSel) {
    return queen_attacks(s, from, to, std::nullopt);
  }
  // King: one step, not adjacent to the black king.
  if (!chebyshev_adjacent(from, to)) return false;
  if (p.black_king && chebyshev_adjacent(to, *p.black_king)) return false;
  return true;
}

StepResult ct_step(const GridState& s, Action a, Rng& rng) {
  const CellValue v = s.at(a.row, a.col);

  if (v == kQueen || v == kKing) {
    GridState next = s;
    clear_selection(next);
    next.set(a.row, a.col, select_value(v));
    return StepResult{std::move(next), StepStatus::kOngoing};
  }

  if (v != kEmpty) {
    return StepResult{s, StepStatus::kOngoing};  // black king or selected piece
  }

  const Pieces p = locate(s);
  if (!p.selected || !white_move_legal(s, p, *p.selected, a)) {
    return StepResult{s, StepStatus::kOngoing};
  }

  GridState next = s;
  const CellValue moving = deselect_value(s.at(p.selected->row, p.selected->col));
  next.set(p.selected->row, p.selected->col, kEmpty);
  next.set(a.row, a.col, moving);

  if (checkmate(next)) {
    return StepResult{std::move(next), StepStatus::kWon};
  }

  // Black replies to completed white moves with a random legal king move;
  // with no legal move (and no mate) it stays put.
  const Pieces np = locate(next);
  std::vector<Action> moves = black_legal_moves(next, np);
  if (!moves.empty() && np.black_king) {
    const Action to = moves[rng.below(moves.size())];
    next.set(np.black_king->row, np.black_king->col, kEmpty);
    next.set(to.row, to.col, kBlackKing);
  }
  return StepResult{std::move(next), StepStatus::kOngoing};
}

bool ct_is_goal(const GridState& s) { return checkmate(s); }

Action ct_expert(const GridState& s) {
  const Pieces p = locate(s);
  if (!p.queen || !p.king || !p.black_king) throw ExpertError("checkmate expert: pieces missing");
  if (!p.selected) return *p.queen;
  if (s.at(p.selected->row, p.selected->col) != kQueenSel) {
    throw ExpertError("checkmate expert: unexpected selection");
  }
  const Action bk = *p.black_king;
  const Action wk = *p.king;
  const int dr = wk.row - bk.row;
  const int dc = wk.col - bk.col;
  if (!((std::abs(dr) == 2 && dc == 0) || (dr == 0 && std::abs(dc) == 2))) {
    throw ExpertError("checkmate expert: kings are not two apart in a line");
  }
  return Action{bk.row + dr / 2, bk.col + dc / 2};
}

GridState rotate_cw(const GridState& s) {
  GridState out(s.width(), s.height(), kEmpty);
  for (int r = 0; r < s.height(); ++r) {
    for (int c = 0; c < s.width(); ++c) {
      if (s.at(r, c) != kEmpty) out.set(c, s.height() - 1 - r, s.at(r, c));
    }
  }
  return out;
}

std::vector<TaskInstance> ct_instances(std::uint64_t seed) {
  Rng rng(derive_seed(seed, 202));
  std::vector<TaskInstance> out;
  std::set<std::size_t> seen;
  while (out.size() < 20) {
    const int h = rng.uniform_int(5, 20);
    const int w = rng.uniform_int(5, 20);
    const int kings_col = rng.uniform_int(2, w - 3);
    GridState g(h, w, kEmpty);
    const Action bk{0, kings_col};
    const Action mate{1, kings_col};
    const Action wk{2, kings_col};
    g.set(bk.row, bk.col, kBlackKing);
    g.set(wk.row, wk.col, kKing);
    // Queen square: clear line to the mate square, no check yet.
    std::vector<Action> spots;
    for (int r = 0; r < h; ++r) {
      for (int c = 0; c < w; ++c) {
        const Action q{r, c};
        if (g.at(r, c) != kEmpty) continue;
        if (q == mate) continue;
        if (!queen_attacks(g, q, mate, std::nullopt)) continue;
        if (queen_attacks(g, q, bk, std::nullopt)) continue;
        spots.push_back(q);
      }
    }
    if (spots.empty()) continue;
    const Action q = spots[rng.below(spots.size())];
    g.set(q.row, q.col, kQueen);
    const int rotations = static_cast<int>(rng.below(4));
    for (int i = 0; i < rotations; ++i) g = rotate_cw(g);
    const std::size_t key = hash_of(g);
    if (!seen.insert(key).second) continue;
    const std::size_t i = out.size();
    const bool train = i < 11;
    TaskInstance inst;
    inst.game = Game::kCheckmateTactic;
    inst.initial_state = std::move(g);
    inst.split = train ? Split::kTrain : Split::kTest;
    inst.id = (train ? "checkmate_tactic-train-" : "checkmate_tactic-test-") +
              std::to_string(train ? i : i - 11);
    out.push_back(std::move(inst));
  }
  return out;
}

}  // namespace

const GameApi& checkmate_api() {
  static const GameApi api{vocab, glyphs, ct_step, ct_is_goal, ct_expert, ct_instances};
  return api;
}

}  // namespace lpp::envs
