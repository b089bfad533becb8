#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "lpp/envs.hpp"
#include "lpp/grid.hpp"
#include "lpp/io.hpp"
#include "lpp/rng.hpp"

using namespace lpp;

TEST_CASE("coordinate_shift uses x-right, y-down") {
  CHECK(coordinate_shift({2, 3}, Offset{1, 0}) == std::make_pair(2, 4));
  CHECK(coordinate_shift({0, 0}, Offset{0, -1}) == std::make_pair(-1, 0));
  CHECK(coordinate_shift({5, 5}, Offset{0, 0}) == std::make_pair(5, 5));
}

TEST_CASE("value_at returns offscreen exactly off the grid") {
  GridState s(2, 2, CellValue{1});
  CHECK(s.at(0, 1) == CellValue{1});
  CHECK(s.at(2, 0) == kOffscreen);
  CHECK(s.at(-1, -1) == kOffscreen);
  for (int r = -2; r < 4; ++r) {
    for (int c = -2; c < 4; ++c) {
      CHECK((s.at(r, c) == kOffscreen) == !s.in_bounds(r, c));
    }
  }
}

TEST_CASE("grid dimensions are validated") {
  CHECK_THROWS_AS(GridState(1, 5), ValidationError);
  CHECK_THROWS_AS(GridState(5, 31), ValidationError);
  GridState ok(2, 30);
  CHECK(ok.cell_count() == 60);
  CHECK_THROWS_AS(ok.set(0, 0, kOffscreen), ValidationError);
}

TEST_CASE("vocabulary maps tags both ways") {
  Vocabulary v({"matchstick", "empty"});
  CHECK(v.size() == 3);  // includes offscreen
  CHECK(v.tag_of(v.id_of("matchstick")) == "matchstick");
  CHECK(v.id_of("offscreen") == kOffscreen);
  CHECK_THROWS_AS(v.id_of("nope"), ValidationError);
}

namespace {

Trajectory sample_nim_trajectory() {
  const auto train = train_instances(Game::kNim, 2020);
  return expert_trajectory(Game::kNim, train[0], 7);
}

}  // namespace

TEST_CASE("grid serialization round-trips") {
  const Vocabulary& vocab = vocabulary_for(Game::kNim);
  GridState g(4, 2, vocab.id_of("empty"));
  g.set(3, 0, vocab.id_of("matchstick"));
  const std::string text = serialize(g, vocab);
  CHECK(deserialize_grid(text, vocab) == g);
}

TEST_CASE("trajectory and instance serialization round-trip") {
  Trajectory t = sample_nim_trajectory();
  CHECK(deserialize_trajectory(serialize(t)) == t);

  const auto insts = make_instances(Game::kNim, 2020);
  for (const auto& inst : insts) {
    CHECK(deserialize_instance(serialize(inst)) == inst);
  }
}

TEST_CASE("deserialization names the offending field") {
  const Vocabulary& vocab = vocabulary_for(Game::kNim);
  // Unknown value tag.
  CHECK_THROWS_WITH_AS(
      deserialize_grid(R"({"height":2,"width":2,"cells":[["empty","zap"],["empty","empty"]]})",
                       vocab),
      doctest::Contains("zap"), JsonParseError);
  // Action outside its state's bounds.
  Trajectory t = sample_nim_trajectory();
  std::string text = serialize(t);
  const std::string needle = "\"action\":[";
  const auto at = text.find(needle);
  REQUIRE(at != std::string::npos);
  text.replace(at, needle.size() + 1, needle + "77");
  CHECK_THROWS_AS(deserialize_trajectory(text), JsonParseError);
  // Offscreen stored in a grid.
  CHECK_THROWS_AS(
      deserialize_grid(R"({"height":2,"width":2,"cells":[["empty","offscreen"],["empty","empty"]]})",
                       vocab),
      JsonParseError);
  // Malformed document.
  CHECK_THROWS_AS(deserialize_trajectory("{nope"), JsonParseError);
}

TEST_CASE("serialize-of-deserialize is the identity on canonical text") {
  Trajectory t = sample_nim_trajectory();
  const std::string once = serialize(t);
  CHECK(serialize(deserialize_trajectory(once)) == once);
}
