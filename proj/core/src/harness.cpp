#include "lpp/harness.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>

namespace lpp {

Method method_from_name(const std::string& name) {
  if (name == "lpp") return Method::kLpp;
  if (name == "vpi") return Method::kVpi;
  throw ValidationError("unknown method: " + name);
}

const std::string& method_name(Method m) {
  static const std::string names[] = {"lpp", "vpi"};
  return names[static_cast<int>(m)];
}

DemoNoise demo_noise_from_name(const std::string& name) {
  if (name == "none") return DemoNoise::kNone;
  if (name == "independent") return DemoNoise::kIndependent;
  if (name == "correlated") return DemoNoise::kCorrelated;
  throw ValidationError("unknown demo noise kind: " + name);
}

const std::string& demo_noise_name(DemoNoise kind) {
  static const std::string names[] = {"none", "independent", "correlated"};
  return names[static_cast<int>(kind)];
}

namespace {

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

}  // namespace

std::string csv_header() {
  return "game,method,prior,noise,demos,budget,trial,epsilon,mean_success,per_instance,"
         "seconds,master_seed,instance_seed\n";
}

std::string to_csv_row(const ResultRow& row) {
  std::ostringstream out;
  out << row.game << ',' << row.method << ',' << row.prior << ',' << row.noise_kind << ','
      << row.demos << ',' << row.budget << ',' << row.trial << ',' << format_double(row.epsilon)
      << ',' << format_double(row.mean_success) << ',';
  for (std::size_t i = 0; i < row.per_instance.size(); ++i) {
    if (i) out << ';';
    out << format_double(row.per_instance[i]);
  }
  out << ',' << format_double(row.seconds) << ',' << row.master_seed << ','
      << row.instance_seed << '\n';
  return out.str();
}

std::vector<Trajectory> expert_demos(Game g, const std::vector<TaskInstance>& train, int count,
                                     std::uint64_t master_seed) {
  if (count < 1 || count > static_cast<int>(train.size())) {
    throw ValidationError("demo count must lie in [1, " + std::to_string(train.size()) + "]");
  }
  std::vector<Trajectory> out;
  out.reserve(count);
  for (int i = 0; i < count; ++i) {
    out.push_back(expert_trajectory(g, train[i], instance_seed(train[i], master_seed, 0)));
  }
  return out;
}

namespace {

Trajectory record_noisy_episode(Game g, const TaskInstance& inst, DemoNoise kind,
                                std::uint64_t seed) {
  Rng noise_rng(derive_seed(seed, 71));
  const Vocabulary& vocab = vocabulary_for(g);
  const CellValue stick = g == Game::kNim ? vocab.id_of("matchstick") : CellValue{1};

  PolicyFn noisy = [&](const GridState& s) -> Action {
    const bool corrupt = noise_rng.uniform01() < 0.2;
    if (corrupt) {
      if (kind == DemoNoise::kCorrelated) {
        std::vector<Action> sticks;
        for (int r = 0; r < s.height(); ++r) {
          for (int c = 0; c < s.width(); ++c) {
            if (s.at(r, c) == stick) sticks.push_back(Action{r, c});
          }
        }
        if (!sticks.empty()) return sticks[noise_rng.below(sticks.size())];
      }
      return Action{static_cast<int>(noise_rng.below(s.height())),
                    static_cast<int>(noise_rng.below(s.width()))};
    }
    try {
      return expert_action(g, s);
    } catch (const ExpertError&) {
      // Noise pushed the game off the expert's playbook; keep recording.
      return Action{static_cast<int>(noise_rng.below(s.height())),
                    static_cast<int>(noise_rng.below(s.width()))};
    }
  };
  return run_episode(g, inst.initial_state, noisy, seed).trajectory;
}

}  // namespace

std::vector<Trajectory> noisy_demos(Game g, int count, DemoNoise kind,
                                    std::uint64_t master_seed, std::uint64_t instance_seed_in) {
  std::vector<TaskInstance> pool;
  for (std::uint64_t chunk = 0; static_cast<int>(pool.size()) < count; ++chunk) {
    for (auto& inst : train_instances(g, derive_seed(instance_seed_in, 909, chunk))) {
      pool.push_back(std::move(inst));
    }
  }
  std::vector<Trajectory> out;
  out.reserve(count);
  for (int i = 0; i < count; ++i) {
    if (kind == DemoNoise::kNone) {
      out.push_back(expert_trajectory(g, pool[i], instance_seed(pool[i], master_seed, 0)));
    } else {
      out.push_back(
          record_noisy_episode(g, pool[i], kind, instance_seed(pool[i], master_seed, 0)));
    }
  }
  return out;
}

std::vector<TrajectoryStep> flatten_steps(const std::vector<Trajectory>& demos) {
  std::vector<TrajectoryStep> out;
  for (const auto& t : demos) {
    for (const auto& s : t.steps) out.push_back(s);
  }
  return out;
}

Pcfg grammar_for(Game g) { return Pcfg(vocabulary_for(g)); }

TrainOutput train(const ExperimentConfig& config, const std::vector<Trajectory>& demos) {
  const Pcfg grammar = grammar_for(config.game);
  LearnOptions opt;
  opt.ensemble_size = config.ensemble;
  opt.budget = config.budget;
  opt.restarts = config.restarts;
  opt.noise.epsilon = config.epsilon;
  opt.prior_mode = config.prior_mode;
  opt.seed = config.master_seed;
  opt.threads = config.threads;
  const std::vector<TrajectoryStep> steps = flatten_steps(demos);
  TrainOutput out{config.method == Method::kLpp ? lpp_learn(steps, grammar, opt)
                                                : vpi_learn(steps, grammar, opt),
                  {}};
  out.mixture = out.learn.mixture.snapshot();
  return out;
}

PolicyFn mixture_policy(const std::vector<MixtureComponent>& mixture) {
  return [mixture](const GridState& s) { return map_action(mixture, s); };
}

double evaluate_mixture(Game g, const std::vector<MixtureComponent>& mixture,
                        const std::vector<TaskInstance>& instances, int episodes,
                        std::uint64_t master_seed, std::vector<double>* per_instance) {
  if (instances.empty()) throw ValidationError("evaluate: no instances");
  const PolicyFn policy = mixture_policy(mixture);
  double total = 0.0;
  if (per_instance) per_instance->clear();
  for (const auto& inst : instances) {
    const double success = rollout(g, inst, policy, episodes, master_seed);
    total += success;
    if (per_instance) per_instance->push_back(success);
  }
  return total / instances.size();
}

namespace {

ResultRow base_row(const ExperimentConfig& config) {
  ResultRow row;
  row.game = game_name(config.game);
  row.method = method_name(config.method);
  row.prior = prior_mode_name(config.prior_mode);
  row.demos = config.demo_count;
  row.budget = config.budget;
  row.epsilon = config.epsilon;
  row.master_seed = config.master_seed;
  row.instance_seed = config.instance_seed;
  return row;
}

// Leave-one-out style rotation: trial t uses demos {t, t+1, ..., t+n-1} mod
// the pool size, so every trial sees a distinct subset.
std::vector<Trajectory> demo_subset(const std::vector<Trajectory>& pool, int count, int trial) {
  std::vector<Trajectory> out;
  out.reserve(count);
  for (int k = 0; k < count; ++k) {
    out.push_back(pool[(trial + k) % pool.size()]);
  }
  return out;
}

}  // namespace

std::string experiment_demo_sweep(const ExperimentConfig& base, const std::vector<int>& demo_counts,
                                  int trials, std::vector<ResultRow>* rows_out) {
  const std::vector<TaskInstance> train_set = train_instances(base.game, base.instance_seed);
  const std::vector<TaskInstance> test_set = test_instances(base.game, base.instance_seed);
  const std::vector<Trajectory> pool =
      expert_demos(base.game, train_set, static_cast<int>(train_set.size()), base.master_seed);

  std::ostringstream csv;
  csv << csv_header();
  for (int count : demo_counts) {
    for (int trial = 0; trial < trials; ++trial) {
      ExperimentConfig config = base;
      config.demo_count = count;
      config.master_seed = derive_seed(base.master_seed, 11, count, trial);
      TrainOutput trained = train(config, demo_subset(pool, count, trial));
      ResultRow row = base_row(config);
      row.trial = trial;
      row.seconds = trained.learn.seconds;
      row.mean_success = evaluate_mixture(base.game, trained.mixture, test_set, base.episodes,
                                          config.master_seed, &row.per_instance);
      csv << to_csv_row(row);
      if (rows_out) rows_out->push_back(std::move(row));
    }
  }
  return csv.str();
}

std::string experiment_program_sweep(const ExperimentConfig& base, const std::vector<int>& budgets,
                                     std::vector<ResultRow>* rows_out) {
  if (budgets.empty()) throw ValidationError("program sweep: no budgets");
  const std::vector<TaskInstance> train_set = train_instances(base.game, base.instance_seed);
  const std::vector<TaskInstance> test_set = test_instances(base.game, base.instance_seed);
  const std::vector<Trajectory> demos =
      expert_demos(base.game, train_set, base.demo_count, base.master_seed);
  const std::vector<TrajectoryStep> steps = flatten_steps(demos);

  std::vector<int> sorted_budgets = budgets;
  std::sort(sorted_budgets.begin(), sorted_budgets.end());

  const Pcfg grammar = grammar_for(base.game);
  LearnOptions opt;
  opt.ensemble_size = base.ensemble;
  opt.budget = sorted_budgets.back();
  opt.restarts = base.restarts;
  opt.noise.epsilon = base.epsilon;
  opt.prior_mode = base.prior_mode;
  opt.seed = base.master_seed;
  opt.threads = base.threads;
  opt.checkpoint_at = sorted_budgets;

  std::vector<std::pair<int, std::vector<MixtureComponent>>> snapshots;
  opt.on_checkpoint = [&snapshots](int budget, const PosteriorMixture& mixture) {
    snapshots.emplace_back(budget, mixture.snapshot());
  };

  LearnResult learn = base.method == Method::kLpp ? lpp_learn(steps, grammar, opt)
                                                  : vpi_learn(steps, grammar, opt);
  // Budgets past an early stop share the final mixture.
  for (int b : sorted_budgets) {
    bool have = false;
    for (const auto& [budget, _] : snapshots) have = have || budget == b;
    if (!have) snapshots.emplace_back(b, learn.mixture.snapshot());
  }
  std::sort(snapshots.begin(), snapshots.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });

  std::ostringstream csv;
  csv << csv_header();
  for (const auto& [budget, mixture] : snapshots) {
    ExperimentConfig config = base;
    config.budget = budget;
    ResultRow row = base_row(config);
    row.seconds = learn.seconds;
    row.mean_success = evaluate_mixture(base.game, mixture, test_set, base.episodes,
                                        base.master_seed, &row.per_instance);
    csv << to_csv_row(row);
    if (rows_out) rows_out->push_back(std::move(row));
  }
  return csv.str();
}

std::string experiment_ablation(const ExperimentConfig& base, std::vector<ResultRow>* rows_out) {
  const std::vector<TaskInstance> train_set = train_instances(base.game, base.instance_seed);
  const std::vector<TaskInstance> test_set = test_instances(base.game, base.instance_seed);
  const std::vector<Trajectory> demos =
      expert_demos(base.game, train_set, base.demo_count, base.master_seed);

  std::ostringstream csv;
  csv << csv_header();
  for (PriorMode mode :
       {PriorMode::kGrammatical, PriorMode::kUniform, PriorMode::kSparsity}) {
    ExperimentConfig config = base;
    config.prior_mode = mode;
    TrainOutput trained = train(config, demos);
    ResultRow row = base_row(config);
    row.seconds = trained.learn.seconds;
    row.mean_success = evaluate_mixture(base.game, trained.mixture, test_set, base.episodes,
                                        base.master_seed, &row.per_instance);
    csv << to_csv_row(row);
    if (rows_out) rows_out->push_back(std::move(row));
  }
  return csv.str();
}

std::string experiment_noise(const ExperimentConfig& base, const std::vector<double>& epsilons,
                             const std::vector<int>& demo_counts,
                             const std::vector<DemoNoise>& kinds,
                             std::vector<ResultRow>* rows_out) {
  const std::vector<TaskInstance> test_set = test_instances(base.game, base.instance_seed);

  std::ostringstream csv;
  csv << csv_header();
  for (DemoNoise kind : kinds) {
    if (kind == DemoNoise::kCorrelated && base.game != Game::kNim) {
      throw ValidationError("correlated demo noise is defined for nim only");
    }
    for (int count : demo_counts) {
      const std::vector<Trajectory> demos =
          noisy_demos(base.game, count, kind, base.master_seed, base.instance_seed);
      for (double eps : epsilons) {
        ExperimentConfig config = base;
        config.demo_count = count;
        config.epsilon = eps;
        TrainOutput trained = train(config, demos);
        ResultRow row = base_row(config);
        row.noise_kind = demo_noise_name(kind);
        row.seconds = trained.learn.seconds;
        row.mean_success = evaluate_mixture(base.game, trained.mixture, test_set, base.episodes,
                                            base.master_seed, &row.per_instance);
        csv << to_csv_row(row);
        if (rows_out) rows_out->push_back(std::move(row));
      }
    }
  }
  return csv.str();
}

PolicyStats map_policy_stats(const std::vector<MixtureComponent>& mixture) {
  if (mixture.empty()) throw ValidationError("stats: empty mixture");
  const DnfPolicy& map_policy = mixture.front().scored.policy;
  return PolicyStats{map_policy.literal_count(), map_policy.method_call_count(),
                     map_policy.max_program_depth()};
}

}  // namespace lpp
