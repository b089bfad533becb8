#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "lpp/dsl.hpp"
#include "lpp/envs.hpp"
#include "lpp/grammar.hpp"

using namespace lpp;

namespace {

const Vocabulary& nim_vocab() { return vocabulary_for(Game::kNim); }

GridState nim_state(int height, int left, int right) {
  const CellValue stick = nim_vocab().id_of("matchstick");
  GridState g(height, 2, nim_vocab().id_of("empty"));
  for (int r = height - left; r < height; ++r) g.set(r, 0, stick);
  for (int r = height - right; r < height; ++r) g.set(r, 1, stick);
  return g;
}

}  // namespace

TEST_CASE("the right-of-action detector from the worked example") {
  // Detector: the cell one to the right of the action is empty.
  FeatureProgram f =
      make_at_action_cell(make_shifted(Offset{1, 0}, make_cell_is(nim_vocab().id_of("empty"))));
  GridState s = nim_state(4, 3, 1);
  // Column 0, one above the shorter pile's height: right neighbor empty.
  CHECK(evaluate(f, s, Action{2, 0}));
  // Bottom row: the right neighbor is a stick.
  CHECK_FALSE(evaluate(f, s, Action{3, 0}));
  // Column 1: the right neighbor is offscreen, not empty.
  CHECK_FALSE(evaluate(f, s, Action{3, 1}));
}

TEST_CASE("zero shift is the identity") {
  const Pcfg grammar(nim_vocab());
  Rng rng(7);
  for (int i = 0; i < 200; ++i) {
    FeatureProgram inner = grammar.sample(rng, 4);
    GridState s = nim_state(3 + static_cast<int>(rng.below(5)), 1 + rng.below(3),
                            1 + rng.below(3));
    Action a{static_cast<int>(rng.below(s.height())), static_cast<int>(rng.below(s.width()))};
    if (const auto* at_action = std::get_if<AtActionCell>(&inner.node)) {
      FeatureProgram wrapped =
          make_at_action_cell(make_shifted(Offset{0, 0}, at_action->cond));
      CHECK(evaluate(wrapped, s, a) == evaluate(inner, s, a));
    }
  }
}

TEST_CASE("scanning finds the first condition first") {
  const Vocabulary& vocab = vocabulary_for(Game::kStopTheFall);
  const CellValue para = vocab.id_of("parachuter");
  const CellValue blue = vocab.id_of("block_blue");
  GridState s(6, 4, vocab.id_of("empty"));
  s.set(1, 2, para);
  // Scan upward from the action: parachuter two above, nothing between.
  FeatureProgram f = make_at_action_cell(
      make_scanning(Offset{0, -1}, make_cell_is(para), make_cell_is(blue)));
  CHECK(evaluate(f, s, Action{3, 2}));
  // A blue block in between flips the result.
  GridState blocked = s;
  blocked.set(2, 2, blue);
  CHECK_FALSE(evaluate(f, blocked, Action{3, 2}));
  // Tie rule: both conditions at the same cell - the first wins.
  FeatureProgram tie = make_at_action_cell(
      make_scanning(Offset{0, -1}, make_cell_is(para), make_cell_is(para)));
  CHECK(evaluate(tie, s, Action{3, 2}));
}

TEST_CASE("scanning terminates within height+width+2 iterations") {
  const Vocabulary& vocab = nim_vocab();
  // A scan that never matches anything on the grid.
  FeatureProgram f = make_at_action_cell(make_scanning(
      Offset{0, 1}, make_cell_is(vocab.id_of("matchstick")), make_cell_is(vocab.id_of("matchstick"))));
  GridState s(30, 30, vocab.id_of("empty"));
  CHECK_FALSE(evaluate(f, s, Action{0, 0}));  // halts
  // Offscreen is scannable: a scan whose hit condition is offscreen fires.
  FeatureProgram off = make_at_action_cell(
      make_scanning(Offset{0, 1}, make_cell_is(kOffscreen), make_cell_is(vocab.id_of("matchstick"))));
  CHECK(evaluate(off, s, Action{0, 0}));
}

TEST_CASE("at_cell_with_value is existential over matching cells") {
  const Vocabulary& vocab = nim_vocab();
  const CellValue stick = vocab.id_of("matchstick");
  FeatureProgram f = make_at_cell_with_value(
      stick, make_shifted(Offset{0, -1}, make_cell_is(vocab.id_of("empty"))));
  // A stick with an empty cell above exists.
  GridState s = nim_state(4, 2, 1);
  CHECK(evaluate(f, s, Action{0, 0}));
  // Move the satisfying stick elsewhere; still satisfied.
  GridState moved = nim_state(4, 1, 2);
  CHECK(evaluate(f, moved, Action{0, 0}));
  // No sticks at all: existential over an empty set.
  GridState none(4, 2, vocab.id_of("empty"));
  CHECK_FALSE(evaluate(f, none, Action{0, 0}));
}

TEST_CASE("program_size counts method nodes") {
  const Vocabulary& vocab = nim_vocab();
  const CellValue v = vocab.id_of("empty");
  CHECK(program_size(make_at_action_cell(make_cell_is(v))) == 2);
  CHECK(program_size(make_at_action_cell(make_shifted(Offset{1, 0}, make_cell_is(v)))) == 3);
  CHECK(program_size(make_at_cell_with_value(
            v, make_scanning(Offset{1, 0}, make_cell_is(v), make_cell_is(v)))) == 4);
  CHECK(program_depth(make_at_action_cell(make_cell_is(v))) == 2);
  CHECK(program_depth(make_at_action_cell(make_shifted(Offset{1, 0}, make_cell_is(v)))) == 3);
}

TEST_CASE("parse and print round-trip") {
  const Vocabulary& vocab = nim_vocab();
  const std::string text = "at_action_cell(cell_is_value(empty))";
  FeatureProgram f = parse_program(text, vocab);
  CHECK(print_program(f, vocab) == text);
  CHECK(std::holds_alternative<AtActionCell>(f.node));

  const std::string nested = "at_cell_with_value(matchstick, scanning((0,-2), "
                             "shifted((1,0), cell_is_value(empty)), cell_is_value(offscreen)))";
  CHECK(print_program(parse_program(nested, vocab), vocab) == nested);

  // Whitespace is accepted, canonical text is emitted.
  CHECK(print_program(parse_program("  at_action_cell( cell_is_value( empty ) )", vocab), vocab) ==
        text);
}

TEST_CASE("parse errors carry a position") {
  const Vocabulary& vocab = nim_vocab();
  CHECK_THROWS_AS(parse_program("at_action_cell(", vocab), DslSyntaxError);
  CHECK_THROWS_AS(parse_program("at_action_cell(cell_is_value(zap))", vocab), DslSyntaxError);
  CHECK_THROWS_AS(parse_program("banana(cell_is_value(empty))", vocab), DslSyntaxError);
  CHECK_THROWS_AS(parse_program("at_action_cell(cell_is_value(empty)) trailing", vocab),
                  DslSyntaxError);
  try {
    parse_program("at_action_cell(", vocab);
  } catch (const DslSyntaxError& e) {
    CHECK(e.position == 15);
  }
}

TEST_CASE("grammar-sampled programs round-trip through text") {
  const Pcfg grammar(vocabulary_for(Game::kChase));
  Rng rng(99);
  for (int i = 0; i < 300; ++i) {
    FeatureProgram f = grammar.sample(rng, 5);
    const std::string text = print_program(f, grammar.vocabulary());
    FeatureProgram back = parse_program(text, grammar.vocabulary());
    CHECK(programs_equal(f, back));
    CHECK(print_program(back, grammar.vocabulary()) == text);
  }
}

TEST_CASE("evaluation is total for sampled programs") {
  const Pcfg grammar(nim_vocab());
  Rng rng(123);
  for (int i = 0; i < 300; ++i) {
    FeatureProgram f = grammar.sample(rng, 5);
    GridState s = nim_state(4, 2, 3);
    for (int r = 0; r < s.height(); ++r) {
      for (int c = 0; c < s.width(); ++c) {
        const bool v1 = evaluate(f, s, Action{r, c});
        const bool v2 = evaluate(f, s, Action{r, c});
        CHECK(v1 == v2);  // deterministic and total
      }
    }
  }
}
