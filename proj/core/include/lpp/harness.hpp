#pragma once

#include <string>
#include <vector>

#include "lpp/envs.hpp"
#include "lpp/learner.hpp"

namespace lpp {

inline constexpr std::uint64_t kDefaultInstanceSeed = 2020;

enum class Method { kLpp, kVpi };

Method method_from_name(const std::string& name);
const std::string& method_name(Method m);

struct ExperimentConfig {
  Game game = Game::kNim;
  Method method = Method::kLpp;
  PriorMode prior_mode = PriorMode::kGrammatical;
  int demo_count = 11;
  int budget = 100;
  int ensemble = 25;
  int restarts = 5;
  double epsilon = 0.0;
  int episodes = 5;  // evaluation episodes per instance
  std::uint64_t master_seed = 0;
  std::uint64_t instance_seed = kDefaultInstanceSeed;
  int threads = 0;
};

struct ResultRow {
  std::string game;
  std::string method;
  std::string prior = "grammatical";
  std::string noise_kind = "none";
  int demos = 0;
  int budget = 0;
  int trial = 0;
  double epsilon = 0.0;
  double mean_success = 0.0;
  std::vector<double> per_instance;
  double seconds = 0.0;
  std::uint64_t master_seed = 0;
  std::uint64_t instance_seed = 0;
};

std::string csv_header();
std::string to_csv_row(const ResultRow& row);

enum class DemoNoise { kNone, kIndependent, kCorrelated };

DemoNoise demo_noise_from_name(const std::string& name);
const std::string& demo_noise_name(DemoNoise kind);

// Expert trajectories for the first `count` training instances.
std::vector<Trajectory> expert_demos(Game g, const std::vector<TaskInstance>& train, int count,
                                     std::uint64_t master_seed);

// Demonstrations corrupted at recording time: with probability 0.2 per step
// the demonstrator clicks a random cell (independent) or a random matchstick
// (correlated, Nim). Needs its own instance pool since noise studies use
// more demos than the standard trainingset.
std::vector<Trajectory> noisy_demos(Game g, int count, DemoNoise kind,
                                    std::uint64_t master_seed, std::uint64_t instance_seed);

std::vector<TrajectoryStep> flatten_steps(const std::vector<Trajectory>& demos);

Pcfg grammar_for(Game g);

struct TrainOutput {
  LearnResult learn;
  std::vector<MixtureComponent> mixture;
};

TrainOutput train(const ExperimentConfig& config, const std::vector<Trajectory>& demos);

PolicyFn mixture_policy(const std::vector<MixtureComponent>& mixture);

double evaluate_mixture(Game g, const std::vector<MixtureComponent>& mixture,
                        const std::vector<TaskInstance>& instances, int episodes,
                        std::uint64_t master_seed, std::vector<double>* per_instance = nullptr);

// Experiment protocols; each returns complete CSV text.
//   demo_sweep     success vs demo count, `trials` rotated leave-one-out subsets
//   program_sweep  success vs enumeration budget, checkpointing one training run
//   ablation       grammatical vs uniform vs sparsity priors
//   noise          demo corruption x assumed epsilon grid
std::string experiment_demo_sweep(const ExperimentConfig& base, const std::vector<int>& demo_counts,
                                  int trials, std::vector<ResultRow>* rows_out = nullptr);
std::string experiment_program_sweep(const ExperimentConfig& base, const std::vector<int>& budgets,
                                     std::vector<ResultRow>* rows_out = nullptr);
std::string experiment_ablation(const ExperimentConfig& base,
                                std::vector<ResultRow>* rows_out = nullptr);
std::string experiment_noise(const ExperimentConfig& base, const std::vector<double>& epsilons,
                             const std::vector<int>& demo_counts,
                             const std::vector<DemoNoise>& kinds,
                             std::vector<ResultRow>* rows_out = nullptr);

struct PolicyStats {
  int programs = 0;      // literal occurrences (top-level programs)
  int method_calls = 0;  // primitive calls across all programs
  int max_depth = 0;     // deepest primitive chain
};

PolicyStats map_policy_stats(const std::vector<MixtureComponent>& mixture);

}  // namespace lpp
