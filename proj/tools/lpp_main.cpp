// Command-line front end: demo generation, training, evaluation, experiment
// sweeps, rendering and policy statistics for the grid strategy games.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "lpp/harness.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct CommonArgs {
  std::string game = "nim";
  std::uint64_t seed = 0;
  std::uint64_t instance_seed = lpp::kDefaultInstanceSeed;
  std::string fixtures;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("--game", args.game, "Game id (nim, checkmate_tactic, chase, stop_the_fall, "
                                       "reach_for_the_star, fence_in)");
  cmd->add_option("--seed", args.seed, "Master seed for learning and episode stochasticity");
  cmd->add_option("--instance-seed", args.instance_seed,
                  "Seed for procedural instance generation");
  cmd->add_option("--fixtures", args.fixtures, "Fixture directory (overrides $LPP_FIXTURES)");
}

lpp::Game resolve_game(const CommonArgs& args) {
  if (!args.fixtures.empty()) lpp::set_fixture_root(args.fixtures);
  return lpp::game_from_name(args.game);
}

std::vector<int> parse_int_list(const std::string& text) {
  std::vector<int> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(std::stoi(item));
  }
  return out;
}

std::vector<double> parse_double_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(std::stod(item));
  }
  return out;
}

std::vector<lpp::Trajectory> load_demo_dir(const std::string& dir) {
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.path().extension() == ".json") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  if (files.empty()) throw lpp::ValidationError("no .json demo files in " + dir);
  std::vector<lpp::Trajectory> out;
  for (const auto& f : files) out.push_back(lpp::deserialize_trajectory(lpp::read_file(f.string())));
  return out;
}

json row_to_json(const lpp::ResultRow& row) {
  return json{{"game", row.game},
              {"method", row.method},
              {"prior", row.prior},
              {"noise", row.noise_kind},
              {"demos", row.demos},
              {"budget", row.budget},
              {"trial", row.trial},
              {"epsilon", row.epsilon},
              {"mean_success", row.mean_success},
              {"per_instance", row.per_instance},
              {"seconds", row.seconds},
              {"master_seed", row.master_seed},
              {"instance_seed", row.instance_seed}};
}

int run(int argc, char** argv) {
  CLI::App app{"Learns click policies for grid strategy games from a handful of expert "
               "demonstrations and reproduces the accompanying experiments"};
  app.require_subcommand(1);

  // demos ------------------------------------------------------------------
  auto* demos_cmd = app.add_subcommand("demos", "Write expert demonstration trajectories");
  CommonArgs demos_args;
  int demos_n = 2;
  std::string demos_out = "demos";
  add_common(demos_cmd, demos_args);
  demos_cmd->add_option("--demos,--n", demos_n, "Number of training demonstrations");
  demos_cmd->add_option("--out", demos_out, "Output directory");

  // train ------------------------------------------------------------------
  auto* train_cmd = app.add_subcommand("train", "Learn a posterior mixture from demonstrations");
  CommonArgs train_args;
  lpp::ExperimentConfig train_config;
  std::string train_method = "lpp";
  std::string train_prior = "grammatical";
  std::string train_demo_dir;
  std::string train_out = "mixture.json";
  std::string train_meta;
  add_common(train_cmd, train_args);
  train_cmd->add_option("--demos", train_config.demo_count, "Number of training demonstrations");
  train_cmd->add_option("--demo-dir", train_demo_dir, "Load demos from this directory instead");
  train_cmd->add_option("--method", train_method, "lpp or vpi");
  train_cmd->add_option("--budget", train_config.budget, "Programs (lpp) or policies (vpi)");
  train_cmd->add_option("--k", train_config.ensemble, "Mixture size");
  train_cmd->add_option("--restarts", train_config.restarts, "Tree fits per iteration");
  train_cmd->add_option("--epsilon", train_config.epsilon, "Likelihood noise epsilon");
  train_cmd->add_option("--prior", train_prior, "grammatical, uniform or sparsity");
  train_cmd->add_option("--threads", train_config.threads, "Worker threads (0 = auto)");
  train_cmd->add_option("--out", train_out, "Mixture output file");
  train_cmd->add_option("--meta", train_meta, "Optional training metadata JSON file");

  // eval -------------------------------------------------------------------
  auto* eval_cmd = app.add_subcommand("eval", "Evaluate a mixture file on an instance split");
  CommonArgs eval_args;
  std::string eval_mixture = "mixture.json";
  std::string eval_split = "test";
  std::string eval_out;
  int eval_episodes = 5;
  add_common(eval_cmd, eval_args);
  eval_cmd->add_option("--mixture", eval_mixture, "Mixture file");
  eval_cmd->add_option("--split", eval_split, "train or test");
  eval_cmd->add_option("--episodes", eval_episodes, "Episodes per instance");
  eval_cmd->add_option("--out", eval_out, "Optional CSV output file");

  // experiment ---------------------------------------------------------------
  auto* exp_cmd = app.add_subcommand("experiment", "Run a full experiment protocol");
  CommonArgs exp_args;
  lpp::ExperimentConfig exp_config;
  std::string exp_name = "demo_sweep";
  std::string exp_method = "lpp";
  std::string exp_out = "results.csv";
  std::string exp_counts = "1,2,3,4,5,6,7,8,9,10";
  std::string exp_budgets = "10,30,100,300,1000";
  std::string exp_epsilons = "0,0.0001,0.001,0.01,0.1,1";
  std::string exp_noise_kinds = "independent";
  int exp_trials = 10;
  add_common(exp_cmd, exp_args);
  exp_cmd->add_option("--name", exp_name, "demo_sweep, program_sweep, ablation or noise");
  exp_cmd->add_option("--method", exp_method, "lpp or vpi");
  exp_cmd->add_option("--demos", exp_config.demo_count, "Demos for fixed-demo experiments");
  exp_cmd->add_option("--budget", exp_config.budget, "Enumeration budget");
  exp_cmd->add_option("--k", exp_config.ensemble, "Mixture size");
  exp_cmd->add_option("--restarts", exp_config.restarts, "Tree fits per iteration");
  exp_cmd->add_option("--epsilon", exp_config.epsilon, "Likelihood epsilon (fixed experiments)");
  exp_cmd->add_option("--episodes", exp_config.episodes, "Episodes per instance");
  exp_cmd->add_option("--threads", exp_config.threads, "Worker threads (0 = auto)");
  exp_cmd->add_option("--demo-counts", exp_counts, "Comma list for demo_sweep / noise");
  exp_cmd->add_option("--trials", exp_trials, "Trials per demo count");
  exp_cmd->add_option("--budgets", exp_budgets, "Comma list for program_sweep");
  exp_cmd->add_option("--epsilons", exp_epsilons, "Comma list for the noise experiment");
  exp_cmd->add_option("--noise-kinds", exp_noise_kinds, "none, independent, correlated");
  exp_cmd->add_option("--out", exp_out, "CSV output file");

  // render -------------------------------------------------------------------
  auto* render_cmd = app.add_subcommand("render", "ASCII-render a trajectory or instance file");
  CommonArgs render_args;
  std::string render_in;
  std::string render_out;
  add_common(render_cmd, render_args);
  render_cmd->add_option("--in", render_in, "Trajectory or instance JSON file")->required();
  render_cmd->add_option("--out", render_out, "Optional output file (default stdout)");

  // stats --------------------------------------------------------------------
  auto* stats_cmd = app.add_subcommand("stats", "Report MAP policy statistics for a mixture");
  CommonArgs stats_args;
  std::string stats_mixture = "mixture.json";
  add_common(stats_cmd, stats_args);
  stats_cmd->add_option("--mixture", stats_mixture, "Mixture file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    app.exit(e);
    return 0;
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  if (demos_cmd->parsed()) {
    const lpp::Game game = resolve_game(demos_args);
    const auto train_set = lpp::train_instances(game, demos_args.instance_seed);
    const auto demos = lpp::expert_demos(game, train_set, demos_n, demos_args.seed);
    fs::create_directories(demos_out);
    for (std::size_t i = 0; i < demos.size(); ++i) {
      char name[32];
      std::snprintf(name, sizeof(name), "demo-%02zu.json", i);
      lpp::write_file((fs::path(demos_out) / name).string(), lpp::serialize(demos[i]));
    }
    std::cout << "wrote " << demos.size() << " demos to " << demos_out << "\n";
    return 0;
  }

  if (train_cmd->parsed()) {
    const lpp::Game game = resolve_game(train_args);
    train_config.game = game;
    train_config.method = lpp::method_from_name(train_method);
    train_config.prior_mode = lpp::prior_mode_from_name(train_prior);
    train_config.master_seed = train_args.seed;
    train_config.instance_seed = train_args.instance_seed;
    std::vector<lpp::Trajectory> demos;
    if (!train_demo_dir.empty()) {
      demos = load_demo_dir(train_demo_dir);
    } else {
      const auto train_set = lpp::train_instances(game, train_args.instance_seed);
      demos = lpp::expert_demos(game, train_set, train_config.demo_count, train_args.seed);
    }
    const lpp::TrainOutput out = lpp::train(train_config, demos);
    lpp::write_file(train_out, lpp::serialize_mixture(out.mixture, lpp::vocabulary_for(game)));
    json meta{{"game", lpp::game_name(game)},
              {"method", train_method},
              {"demos", demos.size()},
              {"budget", train_config.budget},
              {"enumerated", out.learn.enumerated},
              {"early_stopped", out.learn.early_stopped},
              {"seconds", out.learn.seconds},
              {"components", out.mixture.size()},
              {"seed", train_args.seed}};
    if (!train_meta.empty()) lpp::write_file(train_meta, meta.dump(2));
    std::cout << meta.dump(2) << "\n";
    return 0;
  }

  if (eval_cmd->parsed()) {
    const lpp::Game game = resolve_game(eval_args);
    const auto mixture = lpp::deserialize_mixture(lpp::read_file(eval_mixture),
                                                  lpp::vocabulary_for(game));
    const auto instances = eval_split == "train"
                               ? lpp::train_instances(game, eval_args.instance_seed)
                               : lpp::test_instances(game, eval_args.instance_seed);
    lpp::ResultRow row;
    row.game = lpp::game_name(game);
    row.method = "eval";
    row.master_seed = eval_args.seed;
    row.instance_seed = eval_args.instance_seed;
    row.mean_success = lpp::evaluate_mixture(game, mixture, instances, eval_episodes,
                                             eval_args.seed, &row.per_instance);
    const std::string csv = lpp::csv_header() + lpp::to_csv_row(row);
    if (!eval_out.empty()) lpp::write_file(eval_out, csv);
    std::cout << row_to_json(row).dump(2) << "\n";
    return 0;
  }

  if (exp_cmd->parsed()) {
    const lpp::Game game = resolve_game(exp_args);
    exp_config.game = game;
    exp_config.method = lpp::method_from_name(exp_method);
    exp_config.master_seed = exp_args.seed;
    exp_config.instance_seed = exp_args.instance_seed;
    std::string csv;
    if (exp_name == "demo_sweep") {
      csv = lpp::experiment_demo_sweep(exp_config, parse_int_list(exp_counts), exp_trials);
    } else if (exp_name == "program_sweep") {
      csv = lpp::experiment_program_sweep(exp_config, parse_int_list(exp_budgets));
    } else if (exp_name == "ablation") {
      csv = lpp::experiment_ablation(exp_config);
    } else if (exp_name == "noise") {
      std::vector<lpp::DemoNoise> kinds;
      std::stringstream ss(exp_noise_kinds);
      std::string item;
      while (std::getline(ss, item, ',')) {
        if (!item.empty()) kinds.push_back(lpp::demo_noise_from_name(item));
      }
      csv = lpp::experiment_noise(exp_config, parse_double_list(exp_epsilons),
                                  parse_int_list(exp_counts), kinds);
    } else {
      throw lpp::ValidationError("unknown experiment: " + exp_name);
    }
    lpp::write_file(exp_out, csv);
    std::cout << csv;
    return 0;
  }

  if (render_cmd->parsed()) {
    const std::string text = lpp::read_file(render_in);
    std::string rendered;
    try {
      rendered = lpp::render(lpp::deserialize_trajectory(text));
    } catch (const lpp::JsonParseError&) {
      const lpp::TaskInstance inst = lpp::deserialize_instance(text);
      rendered = lpp::render(inst.initial_state, inst.game);
    }
    if (!render_out.empty()) {
      lpp::write_file(render_out, rendered);
    } else {
      std::cout << rendered;
    }
    return 0;
  }

  if (stats_cmd->parsed()) {
    const lpp::Game game = resolve_game(stats_args);
    const auto mixture = lpp::deserialize_mixture(lpp::read_file(stats_mixture),
                                                  lpp::vocabulary_for(game));
    const lpp::PolicyStats stats = lpp::map_policy_stats(mixture);
    std::cout << json{{"programs", stats.programs},
                      {"method_calls", stats.method_calls},
                      {"max_depth", stats.max_depth}}
                     .dump(2)
              << "\n";
    return 0;
  }

  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const lpp::ValidationError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const lpp::JsonParseError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}
