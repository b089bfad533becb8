#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "lpp/grid.hpp"
#include "lpp/io.hpp"
#include "lpp/rng.hpp"

namespace lpp {

enum class StepStatus { kOngoing, kWon, kLost };

struct StepResult {
  GridState state;
  StepStatus status = StepStatus::kOngoing;
};

struct EpisodeResult {
  bool success = false;
  int steps_taken = 0;
  Trajectory trajectory;
};

// Raised when the scripted expert is asked to act outside the states its
// playbook covers.
struct ExpertError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct FixtureError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// One glyph per vocabulary value (index 0 is the offscreen placeholder).
const std::string& glyphs_for(Game g);

// Applies one click. Illegal clicks are game-defined no-ops; opponent and
// physics replies happen inside the step. The status reports terminal
// outcomes the grid alone cannot attribute (who removed the last Nim stick).
StepResult step(Game g, const GridState& s, Action a, Rng& rng);

bool is_goal(Game g, const GridState& s);

// The appendix-scripted expert move; deterministic, breaking ties toward the
// smallest row-major action. Throws ExpertError outside its playbook.
Action expert_action(Game g, const GridState& s);

// 11 train + 9 test instances. Nim, Checkmate Tactic and Reach for the Star
// sample their published distributions from master_seed (rejecting
// duplicates and instances the expert cannot solve within the horizon);
// Chase, Stop the Fall and Fence In load curated fixtures.
std::vector<TaskInstance> make_instances(Game g, std::uint64_t master_seed);

std::vector<TaskInstance> train_instances(Game g, std::uint64_t master_seed);
std::vector<TaskInstance> test_instances(Game g, std::uint64_t master_seed);

// Fixture directory resolution: explicit override, then $LPP_FIXTURES, then
// ./fixtures, then the source-tree default baked at build time.
void set_fixture_root(std::string path);
std::string fixture_root();

using PolicyFn = std::function<Action(const GridState&)>;

EpisodeResult run_episode(Game g, const GridState& initial, const PolicyFn& policy,
                          std::uint64_t seed);

// Mean success over `episodes` seeded episodes from the instance's initial
// state at horizon 60.
double rollout(Game g, const TaskInstance& instance, const PolicyFn& policy, int episodes,
               std::uint64_t master_seed);

// Expert episode, recorded; throws if the expert fails the instance.
Trajectory expert_trajectory(Game g, const TaskInstance& instance, std::uint64_t seed);

std::string render(const GridState& s, Game g);
std::string render(const Trajectory& t);

std::uint64_t instance_seed(const TaskInstance& instance, std::uint64_t master_seed, int episode);

}  // namespace lpp
