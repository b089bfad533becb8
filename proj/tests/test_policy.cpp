#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <limits>

#include "lpp/envs.hpp"
#include "lpp/policy.hpp"

using namespace lpp;

namespace {

const Vocabulary& vocab() { return vocabulary_for(Game::kNim); }

Literal lit(const std::string& text, bool negated = false) {
  FeatureProgram f = parse_program(text, vocab());
  return Literal{std::move(f), negated, text};
}

}  // namespace

TEST_CASE("canonical form sorts and deduplicates") {
  DnfPolicy a({{lit("at_action_cell(cell_is_value(matchstick))"),
                lit("at_action_cell(cell_is_value(empty))", true)},
               {lit("at_action_cell(cell_is_value(offscreen))")}});
  DnfPolicy b({{lit("at_action_cell(cell_is_value(offscreen))")},
               {lit("at_action_cell(cell_is_value(empty))", true),
                lit("at_action_cell(cell_is_value(matchstick))"),
                lit("at_action_cell(cell_is_value(matchstick))")}});
  CHECK(a.canonical_text() == b.canonical_text());
  CHECK(a == b);
  CHECK(a.literal_count() == 3);
  CHECK_THROWS_AS(DnfPolicy({{}}), ValidationError);
}

TEST_CASE("policy priors by mode") {
  const Pcfg grammar(vocab());
  DnfPolicy single({{lit("at_action_cell(cell_is_value(empty))")}});
  CHECK(policy_log_prior(single, grammar, PriorMode::kGrammatical) ==
        doctest::Approx(std::log(1.0 / 24)).epsilon(1e-12));
  CHECK(policy_log_prior(single, grammar, PriorMode::kUniform) == 0.0);

  // Six literal occurrences across clauses; negation costs nothing and a
  // repeated program pays once per occurrence.
  DnfPolicy six({{lit("at_action_cell(cell_is_value(empty))"),
                  lit("at_action_cell(cell_is_value(matchstick))", true),
                  lit("at_action_cell(cell_is_value(offscreen))")},
                 {lit("at_action_cell(cell_is_value(empty))", true),
                  lit("at_cell_with_value(empty, cell_is_value(matchstick))"),
                  lit("at_cell_with_value(matchstick, cell_is_value(empty))")}});
  CHECK(six.literal_count() == 6);
  CHECK(policy_log_prior(six, grammar, PriorMode::kSparsity) ==
        doctest::Approx(-6 * std::log(2.0)).epsilon(1e-12));

  DnfPolicy repeated({{lit("at_action_cell(cell_is_value(empty))")},
                      {lit("at_action_cell(cell_is_value(empty))"),
                       lit("at_action_cell(cell_is_value(matchstick))")}});
  CHECK(policy_log_prior(repeated, grammar, PriorMode::kGrammatical) ==
        doctest::Approx(3 * std::log(1.0 / 24)).epsilon(1e-12));
}

TEST_CASE("action distribution: uniform over the selected set") {
  const CellValue stick = vocab().id_of("matchstick");
  const CellValue empty = vocab().id_of("empty");
  GridState s(2, 2, empty);
  s.set(1, 0, stick);

  DnfPolicy stick_click({{lit("at_action_cell(cell_is_value(matchstick))")}});
  auto probs = policy_action_distribution(stick_click, s);
  CHECK(probs == std::vector<double>{0.0, 0.0, 1.0, 0.0});

  // Nothing selected: uniform fallback over all cells.
  DnfPolicy never;
  probs = policy_action_distribution(never, s);
  CHECK(probs == std::vector<double>{0.25, 0.25, 0.25, 0.25});

  // Four of twenty cells selected -> 0.25 each.
  GridState wide(4, 5, empty);
  for (int c = 0; c < 4; ++c) wide.set(3, c, stick);
  probs = policy_action_distribution(stick_click, wide);
  int selected = 0;
  for (double p : probs) {
    if (p > 0) {
      CHECK(p == doctest::Approx(0.25));
      ++selected;
    }
  }
  CHECK(selected == 4);
}

TEST_CASE("log likelihood with and without noise") {
  const CellValue stick = vocab().id_of("matchstick");
  const CellValue empty = vocab().id_of("empty");
  GridState s(3, 3, empty);
  s.set(2, 1, stick);

  DnfPolicy stick_click({{lit("at_action_cell(cell_is_value(matchstick))")}});
  std::vector<TrajectoryStep> demos{{s, Action{2, 1}}};

  // The policy selects exactly the demo action: probability one.
  CHECK(log_likelihood(stick_click, demos, NoiseModel{0.0}) == doctest::Approx(0.0));

  // A demo the policy cannot produce is fatal without noise ...
  std::vector<TrajectoryStep> off{{s, Action{0, 0}}};
  CHECK(log_likelihood(stick_click, off, NoiseModel{0.0}) ==
        -std::numeric_limits<double>::infinity());
  // ... and contributes log(eps / 9) with noise on a 3x3 grid.
  CHECK(log_likelihood(stick_click, off, NoiseModel{0.1}) ==
        doctest::Approx(std::log(0.1 / 9)).epsilon(1e-12));
}

TEST_CASE("policy and mixture files round-trip") {
  ScoredPolicy p;
  p.policy = DnfPolicy({{lit("at_action_cell(cell_is_value(matchstick))"),
                         lit("at_action_cell(shifted((1,0), cell_is_value(empty)))", true)}});
  p.log_prior = -3.5;
  p.log_likelihood = -1.25;
  const std::string text = serialize(p, vocab());
  ScoredPolicy back = deserialize_policy(text, vocab());
  CHECK(back.policy == p.policy);
  CHECK(back.log_prior == p.log_prior);
  CHECK(back.log_likelihood == p.log_likelihood);

  std::vector<MixtureComponent> mixture{{p, 0.75}, {ScoredPolicy{}, 0.25}};
  const std::string mtext = serialize_mixture(mixture, vocab());
  auto mback = deserialize_mixture(mtext, vocab());
  REQUIRE(mback.size() == 2);
  CHECK(mback[0].scored.policy == p.policy);
  CHECK(mback[0].weight == 0.75);
  CHECK(mback[1].scored.policy.empty());

  CHECK_THROWS_AS(deserialize_policy("{\"clauses\":[[]]}", vocab()), JsonParseError);
  CHECK_THROWS_AS(deserialize_mixture("{}", vocab()), JsonParseError);
}
