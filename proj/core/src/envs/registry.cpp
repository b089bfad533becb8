#include <cstdlib>
#include <filesystem>
#include <sstream>

#include "games_internal.hpp"

namespace lpp {

namespace {

const envs::GameApi& api_for(Game g) {
  switch (g) {
    case Game::kNim:
      return envs::nim_api();
    case Game::kCheckmateTactic:
      return envs::checkmate_api();
    case Game::kChase:
      return envs::chase_api();
    case Game::kStopTheFall:
      return envs::stop_the_fall_api();
    case Game::kReachForTheStar:
      return envs::reach_star_api();
    case Game::kFenceIn:
    default:
      return envs::fence_in_api();
  }
}

std::string& fixture_override() {
  static std::string path;
  return path;
}

}  // namespace

const Vocabulary& vocabulary_for(Game g) { return api_for(g).vocabulary(); }

const std::string& glyphs_for(Game g) { return api_for(g).glyphs(); }

StepResult step(Game g, const GridState& s, Action a, Rng& rng) {
  if (!s.in_bounds(a)) throw ValidationError("step: action out of bounds");
  return api_for(g).step(s, a, rng);
}

bool is_goal(Game g, const GridState& s) { return api_for(g).is_goal(s); }

Action expert_action(Game g, const GridState& s) { return api_for(g).expert(s); }

void set_fixture_root(std::string path) { fixture_override() = std::move(path); }

std::string fixture_root() {
  if (!fixture_override().empty()) return fixture_override();
  if (const char* env = std::getenv("LPP_FIXTURES"); env && *env) return env;
  if (std::filesystem::exists("fixtures")) return "fixtures";
#ifdef LPP_SOURCE_FIXTURES_DIR
  return LPP_SOURCE_FIXTURES_DIR;
#else
  return "fixtures";
#endif
}

namespace {

std::vector<TaskInstance> load_fixture_instances(Game g) {
  namespace fs = std::filesystem;
  const fs::path root = fs::path(fixture_root()) / game_name(g);
  std::vector<TaskInstance> out;
  auto load_split = [&](const char* split_name, Split split, int count) {
    for (int i = 0; i < count; ++i) {
      char name[16];
      std::snprintf(name, sizeof(name), "%02d.json", i);
      const fs::path file = root / split_name / name;
      if (!fs::exists(file)) {
        throw FixtureError("missing fixture file: " + file.string());
      }
      TaskInstance inst = deserialize_instance(read_file(file.string()));
      if (inst.game != g) throw FixtureError("fixture game mismatch in " + file.string());
      if (inst.split != split) throw FixtureError("fixture split mismatch in " + file.string());
      out.push_back(std::move(inst));
    }
  };
  load_split("train", Split::kTrain, 11);
  load_split("test", Split::kTest, 9);
  return out;
}

}  // namespace

std::vector<TaskInstance> make_instances(Game g, std::uint64_t master_seed) {
  const envs::GameApi& api = api_for(g);
  if (api.instances) return api.instances(master_seed);
  return load_fixture_instances(g);
}

std::vector<TaskInstance> train_instances(Game g, std::uint64_t master_seed) {
  std::vector<TaskInstance> out;
  for (auto& inst : make_instances(g, master_seed)) {
    if (inst.split == Split::kTrain) out.push_back(std::move(inst));
  }
  return out;
}

std::vector<TaskInstance> test_instances(Game g, std::uint64_t master_seed) {
  std::vector<TaskInstance> out;
  for (auto& inst : make_instances(g, master_seed)) {
    if (inst.split == Split::kTest) out.push_back(std::move(inst));
  }
  return out;
}

EpisodeResult run_episode(Game g, const GridState& initial, const PolicyFn& policy,
                          std::uint64_t seed) {
  Rng rng(seed);
  EpisodeResult out;
  out.trajectory.game = g;
  GridState state = initial;
  for (int t = 0; t < kHorizon; ++t) {
    const Action a = policy(state);
    if (!state.in_bounds(a)) throw ValidationError("policy action out of bounds");
    out.trajectory.steps.push_back(TrajectoryStep{state, a});
    StepResult r = step(g, state, a, rng);
    state = std::move(r.state);
    if (r.status == StepStatus::kWon) {
      out.success = true;
      break;
    }
    if (r.status == StepStatus::kLost) break;
  }
  out.steps_taken = static_cast<int>(out.trajectory.steps.size());
  out.trajectory.final_state = std::move(state);
  return out;
}

std::uint64_t instance_seed(const TaskInstance& instance, std::uint64_t master_seed,
                            int episode) {
  return derive_seed(master_seed, hash_string_seed(instance.id), episode);
}

double rollout(Game g, const TaskInstance& instance, const PolicyFn& policy, int episodes,
               std::uint64_t master_seed) {
  if (episodes < 1) throw ValidationError("rollout: episodes must be >= 1");
  int wins = 0;
  for (int e = 0; e < episodes; ++e) {
    wins += run_episode(g, instance.initial_state, policy,
                        instance_seed(instance, master_seed, e))
                .success;
  }
  return static_cast<double>(wins) / episodes;
}

Trajectory expert_trajectory(Game g, const TaskInstance& instance, std::uint64_t seed) {
  EpisodeResult ep = run_episode(
      g, instance.initial_state, [g](const GridState& s) { return expert_action(g, s); }, seed);
  if (!ep.success) {
    throw ExpertError("expert failed instance " + instance.id);
  }
  return std::move(ep.trajectory);
}

std::string render(const GridState& s, Game g) {
  const std::string& glyphs = glyphs_for(g);
  std::ostringstream out;
  for (int r = 0; r < s.height(); ++r) {
    for (int c = 0; c < s.width(); ++c) {
      const std::uint8_t id = s.at(r, c).id;
      if (id >= glyphs.size()) throw ValidationError("render: value without a glyph");
      out << glyphs[id];
    }
    out << '\n';
  }
  return out.str();
}

std::string render(const Trajectory& t) {
  std::ostringstream out;
  for (const auto& step : t.steps) {
    out << render(step.state, t.game) << '\n';
  }
  out << render(t.final_state, t.game);
  return out.str();
}

}  // namespace lpp
