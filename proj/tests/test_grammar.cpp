#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <set>

#include "lpp/envs.hpp"
#include "lpp/grammar.hpp"

using namespace lpp;

namespace {

const double kLogHalf = std::log(0.5);
const double kLogQuarter = std::log(0.25);

// Independent brute-force enumeration of every program with log prior at or
// above a floor, by direct recursion over the production rules.
class BruteForce {
 public:
  explicit BruteForce(const Pcfg& grammar)
      : vocab_(grammar.vocabulary()), log_value_(-std::log(vocab_.size())) {
    best_nat_ = std::log(0.99);
    best_number_ = kLogHalf + best_nat_;
    best_offset_ = std::max(kLogQuarter + best_number_, kLogHalf + 2 * best_number_);
    best_base_ = kLogHalf + log_value_;
    best_cond_ = kLogHalf + best_base_;
  }

  std::vector<std::pair<std::string, double>> programs_at_least(double floor) {
    std::vector<std::pair<std::string, double>> out;
    for (const auto& [cond, lc] : conditions(floor - kLogHalf)) {
      out.emplace_back("at_action_cell(" + cond + ")", kLogHalf + lc);
    }
    for (int v = 0; v < vocab_.size(); ++v) {
      const double head = kLogHalf + log_value_;
      for (const auto& [cond, lc] : conditions(floor - head)) {
        out.emplace_back("at_cell_with_value(" + vocab_.tag_of(CellValue{(std::uint8_t)v}) +
                             ", " + cond + ")",
                         head + lc);
      }
    }
    return out;
  }

 private:
  using Items = std::vector<std::pair<std::string, double>>;

  Items numbers(double floor) {
    Items out;
    for (int sign : {1, -1}) {
      for (int mag = 1;; ++mag) {
        const double lp = kLogHalf + std::log(0.99) + (mag - 1) * std::log(0.01);
        if (lp < floor) break;
        out.emplace_back(std::to_string(sign * mag), lp);
      }
    }
    return out;
  }

  Items offsets(double floor) {
    Items out;
    for (const auto& [n, ln] : numbers(floor - kLogQuarter)) {
      out.emplace_back("(" + n + ",0)", kLogQuarter + ln);
      out.emplace_back("(0," + n + ")", kLogQuarter + ln);
    }
    for (const auto& [nx, lx] : numbers(floor - kLogHalf - best_number_)) {
      for (const auto& [ny, ly] : numbers(floor - kLogHalf - lx)) {
        out.emplace_back("(" + nx + "," + ny + ")", kLogHalf + lx + ly);
      }
    }
    return out;
  }

  Items bases(double floor) {
    Items out;
    if (kLogHalf + log_value_ >= floor) {
      for (int v = 0; v < vocab_.size(); ++v) {
        out.emplace_back("cell_is_value(" + vocab_.tag_of(CellValue{(std::uint8_t)v}) + ")",
                         kLogHalf + log_value_);
      }
    }
    for (const auto& [o, lo] : offsets(floor - kLogHalf - 2 * best_cond_)) {
      for (const auto& [c1, lc1] : conditions(floor - kLogHalf - lo - best_cond_)) {
        for (const auto& [c2, lc2] : conditions(floor - kLogHalf - lo - lc1)) {
          out.emplace_back("scanning(" + o + ", " + c1 + ", " + c2 + ")",
                           kLogHalf + lo + lc1 + lc2);
        }
      }
    }
    return out;
  }

  Items conditions(double floor) {
    Items out;
    for (const auto& [b, lb] : bases(floor - kLogHalf)) {
      out.emplace_back(b, kLogHalf + lb);
    }
    for (const auto& [o, lo] : offsets(floor - kLogHalf - best_base_)) {
      for (const auto& [b, lb] : bases(floor - kLogHalf - lo)) {
        out.emplace_back("shifted(" + o + ", " + b + ")", kLogHalf + lo + lb);
      }
    }
    return out;
  }

  const Vocabulary& vocab_;
  double log_value_;
  double best_nat_;
  double best_number_;
  double best_offset_;
  double best_base_;
  double best_cond_;
};

}  // namespace

TEST_CASE("per-nonterminal production probabilities are normalized") {
  CHECK(0.5 + 0.5 == doctest::Approx(1.0).epsilon(1e-13));        // programs, conditions, bases
  CHECK(0.25 + 0.25 + 0.5 == doctest::Approx(1.0).epsilon(1e-13));  // offsets
  double nat_total = 0.0;
  for (int i = 1; i <= 12; ++i) nat_total += 0.99 * std::pow(0.01, i - 1);
  // Geometric tail: the analytic series sums to exactly one.
  CHECK(0.99 / (1.0 - 0.01) == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(nat_total == doctest::Approx(1.0).epsilon(1e-12));
  const Pcfg grammar(vocabulary_for(Game::kNim));
  CHECK(grammar.value_count() * std::exp(grammar.log_value()) ==
        doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("log prior of worked examples") {
  const Pcfg grammar(vocabulary_for(Game::kNim));  // |V| = 3 with offscreen
  const Vocabulary& vocab = grammar.vocabulary();

  FeatureProgram simple = parse_program("at_action_cell(cell_is_value(empty))", vocab);
  CHECK(grammar.log_prior(simple) == doctest::Approx(std::log(1.0 / 24.0)).epsilon(1e-12));

  // A magnitude-2 vertical offset contributes 0.25 * 0.5 * (0.99 * 0.01).
  FeatureProgram shifted2 =
      parse_program("at_action_cell(shifted((0,-2), cell_is_value(empty)))", vocab);
  const double expected = std::log(0.5) + std::log(0.5) +
                          std::log(0.25 * 0.5 * 0.99 * 0.01) + std::log(0.5) +
                          std::log(1.0 / 3.0);
  CHECK(grammar.log_prior(shifted2) == doctest::Approx(expected).epsilon(1e-12));

  // Magnitude 1 vs 2 differ by exactly the geometric step.
  FeatureProgram shifted1 =
      parse_program("at_action_cell(shifted((0,-1), cell_is_value(empty)))", vocab);
  CHECK(grammar.log_prior(shifted1) - grammar.log_prior(shifted2) ==
        doctest::Approx(-std::log(0.01)).epsilon(1e-12));
}

TEST_CASE("log prior rejects underivable programs") {
  const Pcfg grammar(vocabulary_for(Game::kNim));
  const CellValue v = grammar.vocabulary().id_of("empty");
  CHECK_THROWS_AS(grammar.log_prior(make_at_action_cell(
                      make_shifted(Offset{0, 0}, make_cell_is(v)))),
                  GrammarError);
  CHECK_THROWS_AS(grammar.log_prior(make_at_action_cell(make_shifted(
                      Offset{1, 0}, make_shifted(Offset{1, 0}, make_cell_is(v))))),
                  GrammarError);
  CHECK_THROWS_AS(grammar.log_prior(make_at_action_cell(make_cell_is(CellValue{99}))),
                  GrammarError);
}

TEST_CASE("enumeration of zero programs is empty") {
  const Pcfg grammar(vocabulary_for(Game::kNim));
  CHECK(enumerate_programs(grammar, 0).empty());
}

TEST_CASE("the first programs are the action-cell value checks") {
  const Pcfg grammar(vocabulary_for(Game::kNim));
  const auto programs = enumerate_programs(grammar, 4);
  std::set<std::string> first3;
  for (int i = 0; i < 3; ++i) {
    CHECK(programs[i].log_prior == doctest::Approx(std::log(1.0 / 24.0)).epsilon(1e-12));
    first3.insert(programs[i].text);
  }
  CHECK(first3 == std::set<std::string>{"at_action_cell(cell_is_value(empty))",
                                        "at_action_cell(cell_is_value(matchstick))",
                                        "at_action_cell(cell_is_value(offscreen))"});
  CHECK(programs[3].log_prior < std::log(1.0 / 24.0) - 1e-9);
}

TEST_CASE("enumeration is monotone and duplicate-free over 10000 programs") {
  const Pcfg grammar(vocabulary_for(Game::kNim));
  ProgramEnumerator it(grammar);
  double prev = 1.0;
  std::set<std::string> seen;
  for (int i = 0; i < 10000; ++i) {
    EnumeratedProgram p = it.next();
    CHECK(p.log_prior <= prev + 1e-9);
    prev = p.log_prior;
    CHECK(seen.insert(p.text).second);
    if (i % 1000 == 0) {
      // Enumerated priors agree with the direct derivation computation.
      CHECK(grammar.log_prior(p.program) == doctest::Approx(p.log_prior).epsilon(1e-10));
    }
  }
}

TEST_CASE("best-first enumeration matches the brute-force threshold oracle") {
  const Pcfg grammar(vocabulary_for(Game::kNim));
  const auto programs = enumerate_programs(grammar, 260);

  // Choose a tie-free threshold at least 200 deep.
  int cut = 200;
  while (cut < 259 && programs[cut].log_prior > programs[cut - 1].log_prior - 1e-9) ++cut;
  REQUIRE(cut < 259);
  const double floor = (programs[cut - 1].log_prior + programs[cut].log_prior) / 2;

  BruteForce oracle(grammar);
  auto expected = oracle.programs_at_least(floor);
  REQUIRE(expected.size() == static_cast<std::size_t>(cut));

  std::set<std::string> expected_texts;
  for (const auto& [text, lp] : expected) expected_texts.insert(text);
  std::set<std::string> got_texts;
  for (int i = 0; i < cut; ++i) got_texts.insert(programs[i].text);
  CHECK(expected_texts == got_texts);

  // Priors agree program by program.
  std::sort(expected.begin(), expected.end());
  for (int i = 0; i < cut; ++i) {
    auto at = std::lower_bound(expected.begin(), expected.end(),
                               std::make_pair(programs[i].text, -1e18));
    REQUIRE(at != expected.end());
    CHECK(at->first == programs[i].text);
    CHECK(at->second == doctest::Approx(programs[i].log_prior).epsilon(1e-10));
  }
}

TEST_CASE("equal-prior programs emit in canonical text order") {
  const Pcfg grammar(vocabulary_for(Game::kNim));
  const auto programs = enumerate_programs(grammar, 50);
  for (std::size_t i = 1; i < programs.size(); ++i) {
    if (std::abs(programs[i].log_prior - programs[i - 1].log_prior) < 1e-9) {
      CHECK(programs[i - 1].text < programs[i].text);
    }
  }
}
