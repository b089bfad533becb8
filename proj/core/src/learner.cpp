#include "lpp/learner.hpp"

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <future>
#include <limits>
#include <thread>
#include <unordered_map>

#include "lpp/rng.hpp"

namespace lpp {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kTieTolerance = 1e-12;

int popcount_range(const std::vector<std::uint64_t>& bits, int begin, int end) {
  if (begin >= end) return 0;
  int first_word = begin >> 6;
  int last_word = (end - 1) >> 6;
  std::uint64_t first_mask = ~std::uint64_t{0} << (begin & 63);
  std::uint64_t last_mask = ~std::uint64_t{0} >> (63 - ((end - 1) & 63));
  if (first_word == last_word) {
    return std::popcount(bits[first_word] & first_mask & last_mask);
  }
  int n = std::popcount(bits[first_word] & first_mask);
  for (int w = first_word + 1; w < last_word; ++w) n += std::popcount(bits[w]);
  n += std::popcount(bits[last_word] & last_mask);
  return n;
}
}  // namespace

LabeledSet make_anti_demos(const std::vector<TrajectoryStep>& demos) {
  if (demos.empty()) throw ValidationError("make_anti_demos: no demonstrations");
  LabeledSet out;
  out.positives = demos;
  for (const auto& demo : demos) {
    if (!demo.state.in_bounds(demo.action)) {
      throw ValidationError("make_anti_demos: demo action out of bounds");
    }
    for (int r = 0; r < demo.state.height(); ++r) {
      for (int c = 0; c < demo.state.width(); ++c) {
        if (r == demo.action.row && c == demo.action.col) continue;
        out.negatives.push_back(TrajectoryStep{demo.state, Action{r, c}});
      }
    }
  }
  return out;
}

BinaryDataset::BinaryDataset(int rows) : rows_(rows), labels_((rows + 63) / 64, 0) {}

BinaryDataset BinaryDataset::from_columns(const std::vector<std::vector<std::uint8_t>>& columns,
                                          const std::vector<std::uint8_t>& labels) {
  BinaryDataset data(static_cast<int>(labels.size()));
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i]) set_bit(data.labels_, static_cast<int>(i));
  }
  for (const auto& col : columns) {
    if (col.size() != labels.size()) throw ValidationError("design matrix: ragged column");
    std::vector<std::uint64_t> bits(data.word_count(), 0);
    for (std::size_t i = 0; i < col.size(); ++i) {
      if (col[i]) set_bit(bits, static_cast<int>(i));
    }
    data.add_column(std::move(bits));
  }
  return data;
}

void BinaryDataset::set_label(int row, bool v) {
  if (v) {
    set_bit(labels_, row);
  } else {
    labels_[row >> 6] &= ~(std::uint64_t{1} << (row & 63));
  }
}

int BinaryDataset::add_column(std::vector<std::uint64_t> bits) {
  const int col = static_cast<int>(column_group_.size());
  std::size_t h = 1469598103934665603ull;
  for (std::uint64_t w : bits) {
    h ^= w;
    h *= 1099511628211ull;
  }
  auto& bucket = hash_buckets_[h];
  for (int g : bucket) {
    if (group_bits_[g] == bits) {
      groups_[g].members.push_back(col);
      column_group_.push_back(g);
      return col;
    }
  }
  const int g = static_cast<int>(groups_.size());
  const int ones = popcount_range(bits, 0, rows_);
  groups_.push_back(Group{{col}, ones == 0 || ones == rows_});
  group_bits_.push_back(std::move(bits));
  bucket.push_back(g);
  column_group_.push_back(g);
  return col;
}

bool DecisionTree::predict(const std::function<bool(int)>& column_value) const {
  if (nodes.empty()) return false;
  int at = 0;
  while (nodes[at].column >= 0) {
    at = column_value(nodes[at].column) ? nodes[at].if_true : nodes[at].if_false;
  }
  return nodes[at].prediction;
}

bool DecisionTree::predict_row(const BinaryDataset& data, int row) const {
  return predict([&data, row](int col) { return data.cell(row, col); });
}

namespace {

struct FitContext {
  const BinaryDataset& data;
  Rng rng;
  std::vector<TreeNode> nodes;
  std::vector<std::uint64_t> node_mask;     // scratch
  std::vector<double> group_decrease;       // scratch, by group
  std::vector<int> tie_columns;             // scratch
};

struct GroupStats {
  int ones = 0;
  int positive_ones = 0;
};

double gini(int pos, int n) {
  if (n == 0) return 0.0;
  const double p = static_cast<double>(pos) / n;
  return 1.0 - p * p - (1.0 - p) * (1.0 - p);
}

double split_decrease(int node_pos, int node_n, const GroupStats& st) {
  const int n_true = st.ones;
  const int n_false = node_n - n_true;
  if (n_true == 0 || n_false == 0) return 0.0;
  const int pos_true = st.positive_ones;
  const int pos_false = node_pos - pos_true;
  const double parent = gini(node_pos, node_n);
  const double weighted = (static_cast<double>(n_false) / node_n) * gini(pos_false, n_false) +
                          (static_cast<double>(n_true) / node_n) * gini(pos_true, n_true);
  return parent - weighted;
}

int build_node(FitContext& ctx, std::vector<int>& rows) {
  const BinaryDataset& data = ctx.data;
  const int n = static_cast<int>(rows.size());
  int node_pos = 0;
  for (int r : rows) node_pos += data.label(r) ? 1 : 0;

  auto make_leaf = [&ctx](bool prediction) {
    const int at = static_cast<int>(ctx.nodes.size());
    ctx.nodes.push_back(TreeNode{-1, prediction, -1, -1});
    return at;
  };

  if (node_pos == 0 || node_pos == n) return make_leaf(node_pos > 0);

  // Score every distinct column once. Dense nodes use word-parallel
  // popcounts over a node mask; small nodes iterate row indices.
  const int groups = data.group_count();
  ctx.group_decrease.assign(groups, 0.0);
  const int words = data.word_count();
  const bool dense = n >= words;
  std::vector<GroupStats> stats(groups);
  if (dense) {
    ctx.node_mask.assign(words, 0);
    for (int r : rows) BinaryDataset::set_bit(ctx.node_mask, r);
    const auto& labels = data.labels();
    for (int g = 0; g < groups; ++g) {
      if (data.group(g).constant) continue;
      const auto& col = data.group_column(g);
      int ones = 0;
      int pos_ones = 0;
      for (int w = 0; w < words; ++w) {
        const std::uint64_t masked = col[w] & ctx.node_mask[w];
        ones += std::popcount(masked);
        pos_ones += std::popcount(masked & labels[w]);
      }
      stats[g] = GroupStats{ones, pos_ones};
    }
  } else {
    for (int r : rows) {
      const bool is_pos = data.label(r);
      const int word = r >> 6;
      const std::uint64_t bit = std::uint64_t{1} << (r & 63);
      for (int g = 0; g < groups; ++g) {
        if (data.group_column(g)[word] & bit) {
          ++stats[g].ones;
          if (is_pos) ++stats[g].positive_ones;
        }
      }
    }
  }

  double best = 0.0;
  for (int g = 0; g < groups; ++g) {
    if (data.group(g).constant) continue;
    const double d = split_decrease(node_pos, n, stats[g]);
    ctx.group_decrease[g] = d;
    best = std::max(best, d);
  }
  if (best <= kTieTolerance) {
    return make_leaf(2 * node_pos > n);
  }

  ctx.tie_columns.clear();
  for (int g = 0; g < groups; ++g) {
    if (data.group(g).constant) continue;
    if (ctx.group_decrease[g] >= best - kTieTolerance) {
      for (int member : data.group(g).members) ctx.tie_columns.push_back(member);
    }
  }
  int chosen = ctx.tie_columns.front();
  if (ctx.tie_columns.size() > 1) {
    std::sort(ctx.tie_columns.begin(), ctx.tie_columns.end());
    chosen = ctx.tie_columns[ctx.rng.below(ctx.tie_columns.size())];
  }

  std::vector<int> rows_false;
  std::vector<int> rows_true;
  const auto& chosen_bits = data.column_bits(chosen);
  for (int r : rows) {
    if (BinaryDataset::test_bit(chosen_bits, r)) {
      rows_true.push_back(r);
    } else {
      rows_false.push_back(r);
    }
  }
  rows.clear();
  rows.shrink_to_fit();

  const int at = static_cast<int>(ctx.nodes.size());
  ctx.nodes.push_back(TreeNode{chosen, false, -1, -1});
  const int left = build_node(ctx, rows_false);
  ctx.nodes[at].if_false = left;
  const int right = build_node(ctx, rows_true);
  ctx.nodes[at].if_true = right;
  return at;
}

}  // namespace

DecisionTree fit_tree(const BinaryDataset& data, std::uint64_t seed) {
  DecisionTree tree;
  if (data.row_count() == 0 || data.column_count() == 0) {
    int pos = data.row_count() ? popcount_range(data.labels(), 0, data.row_count()) : 0;
    tree.nodes.push_back(TreeNode{-1, 2 * pos > data.row_count(), -1, -1});
    return tree;
  }
  FitContext ctx{data, Rng(seed), {}, {}, {}, {}};
  std::vector<int> rows(data.row_count());
  for (int i = 0; i < data.row_count(); ++i) rows[i] = i;
  build_node(ctx, rows);
  tree.nodes = std::move(ctx.nodes);
  return tree;
}

std::vector<IndexClause> tree_to_index_dnf(const DecisionTree& tree) {
  std::vector<IndexClause> clauses;
  if (tree.nodes.empty()) return clauses;
  IndexClause path;
  std::function<void(int)> walk = [&](int at) {
    const TreeNode& node = tree.nodes[at];
    if (node.column < 0) {
      if (node.prediction) clauses.push_back(path);
      return;
    }
    path.emplace_back(node.column, true);  // false branch: negated literal
    walk(node.if_false);
    path.back().second = false;
    walk(node.if_true);
    path.pop_back();
  };
  walk(0);
  return clauses;
}

DnfPolicy materialize_policy(const std::vector<IndexClause>& clauses,
                             const std::vector<EnumeratedProgram>& programs) {
  std::vector<std::vector<Literal>> lits;
  lits.reserve(clauses.size());
  for (const auto& clause : clauses) {
    std::vector<Literal> out;
    out.reserve(clause.size());
    for (const auto& [col, negated] : clause) {
      out.push_back(Literal{programs[col].program, negated, programs[col].text});
    }
    lits.push_back(std::move(out));
  }
  return DnfPolicy(std::move(lits));
}

// ---------------------------------------------------------------------------
// Policy enumeration (extended grammar)

namespace {

using detail::Tok;
using detail::TokKind;

std::vector<std::vector<Literal>> build_policy_literals(const std::vector<Tok>& toks,
                                                        std::size_t& pos,
                                                        const Vocabulary& vocab) {
  std::vector<std::vector<Literal>> clauses;
  bool more_clauses = true;
  while (more_clauses) {
    const Tok pol = toks[pos++];
    more_clauses = pol.kind == TokKind::kPolicyCons;
    std::vector<Literal> clause;
    bool more_lits = true;
    while (more_lits) {
      const Tok cl = toks[pos++];
      more_lits = cl.kind == TokKind::kClauseCons;
      const Tok lit = toks[pos++];
      const bool negated = lit.kind == TokKind::kLitNeg;
      FeatureProgram prog = detail::build_program(toks, pos);
      std::string text = print_program(prog, vocab);
      clause.push_back(Literal{std::move(prog), negated, std::move(text)});
    }
    clauses.push_back(std::move(clause));
  }
  return clauses;
}

}  // namespace

PolicyEnumerator::PolicyEnumerator(const Pcfg& grammar)
    : grammar_(grammar),
      core_(grammar.policy_table(), detail::kSymPolicy,
            [&grammar](const std::vector<Tok>& toks) {
              std::size_t pos = 0;
              DnfPolicy p(build_policy_literals(toks, pos, grammar.vocabulary()));
              return p.canonical_text();
            }) {}

PolicyEnumerator::Emission PolicyEnumerator::next() {
  detail::BestFirstCore::Emission e = core_.next();
  std::size_t pos = 0;
  DnfPolicy policy(build_policy_literals(e.tokens, pos, grammar_.vocabulary()));
  return Emission{std::move(policy), e.log_prob};
}

// ---------------------------------------------------------------------------
// Posterior mixture

PosteriorMixture::PosteriorMixture(int capacity) : capacity_(capacity) {
  if (capacity < 1) throw ValidationError("mixture capacity must be positive");
}

double PosteriorMixture::min_log_joint() const {
  return components_.empty() ? kNegInf : components_.back().log_joint();
}

bool PosteriorMixture::insert(ScoredPolicy candidate) {
  const double joint = candidate.log_joint();
  if (!(joint > kNegInf) || std::isnan(joint)) return false;
  if (canonical_.count(candidate.policy.canonical_text())) return false;
  if (!components_.empty() && joint <= min_log_joint()) return false;
  if (full()) {
    canonical_.erase(components_.back().policy.canonical_text());
    components_.pop_back();
  }
  canonical_.insert(candidate.policy.canonical_text());
  auto at = std::upper_bound(components_.begin(), components_.end(), joint,
                             [](double j, const ScoredPolicy& p) { return j > p.log_joint(); });
  components_.insert(at, std::move(candidate));
  return true;
}

std::vector<double> PosteriorMixture::weights() const {
  std::vector<double> w(components_.size(), 0.0);
  if (components_.empty()) return w;
  const double top = components_.front().log_joint();
  double total = 0.0;
  for (std::size_t i = 0; i < components_.size(); ++i) {
    w[i] = std::exp(components_[i].log_joint() - top);
    total += w[i];
  }
  for (double& x : w) x /= total;
  return w;
}

std::vector<MixtureComponent> PosteriorMixture::snapshot() const {
  std::vector<double> w = weights();
  std::vector<MixtureComponent> out;
  out.reserve(components_.size());
  for (std::size_t i = 0; i < components_.size(); ++i) {
    out.push_back(MixtureComponent{components_[i], w[i]});
  }
  return out;
}

Action map_action(const std::vector<MixtureComponent>& mixture, const GridState& s) {
  if (mixture.empty()) throw ValidationError("map_action: empty mixture");
  std::vector<double> score(s.cell_count(), 0.0);
  for (const auto& comp : mixture) {
    std::vector<double> probs = policy_action_distribution(comp.scored.policy, s);
    for (int i = 0; i < s.cell_count(); ++i) score[i] += comp.weight * probs[i];
  }
  int best = 0;
  for (int i = 1; i < s.cell_count(); ++i) {
    if (score[i] > score[best]) best = i;  // ties keep the smallest row-major index
  }
  return Action{best / s.width(), best % s.width()};
}

// ---------------------------------------------------------------------------
// Demo design matrix

namespace {

class DemoMatrix {
 public:
  explicit DemoMatrix(const std::vector<TrajectoryStep>& demos) : demos_(demos) {
    int rows = 0;
    blocks_.reserve(demos.size());
    for (const auto& demo : demos_) {
      if (!demo.state.in_bounds(demo.action)) {
        throw ValidationError("demo action out of bounds");
      }
      const int cells = demo.state.cell_count();
      Block b{rows, demo.state.width(), cells,
              rows + demo.action.row * demo.state.width() + demo.action.col};
      blocks_.push_back(b);
      rows += cells;
    }
    data_ = BinaryDataset(rows);
    for (const Block& b : blocks_) data_.set_label(b.action_index, true);
  }

  const BinaryDataset& data() const { return data_; }

  int add_program(const FeatureProgram& f) {
    std::vector<std::uint64_t> bits(data_.word_count(), 0);
    const bool action_dependent = f.attends_action();
    for (std::size_t p = 0; p < demos_.size(); ++p) {
      const GridState& s = demos_[p].state;
      const Block& b = blocks_[p];
      if (!action_dependent) {
        if (evaluate(f, s, Action{0, 0})) {
          for (int i = 0; i < b.cells; ++i) BinaryDataset::set_bit(bits, b.begin + i);
        }
        continue;
      }
      int row = b.begin;
      for (int r = 0; r < s.height(); ++r) {
        for (int c = 0; c < s.width(); ++c, ++row) {
          if (evaluate(f, s, Action{r, c})) BinaryDataset::set_bit(bits, row);
        }
      }
    }
    return data_.add_column(std::move(bits));
  }

  // Likelihood of a DNF over column indices, evaluated with bit operations
  // over the pair blocks.
  double clause_log_likelihood(const std::vector<IndexClause>& clauses, NoiseModel noise) const {
    const int words = data_.word_count();
    std::vector<std::uint64_t> selected(words, 0);
    std::vector<std::uint64_t> acc(words);
    if (!clauses.empty()) {
      for (const auto& clause : clauses) {
        std::fill(acc.begin(), acc.end(), ~std::uint64_t{0});
        for (const auto& [col, negated] : clause) {
          const auto& bits = data_.column_bits(col);
          if (negated) {
            for (int w = 0; w < words; ++w) acc[w] &= ~bits[w];
          } else {
            for (int w = 0; w < words; ++w) acc[w] &= bits[w];
          }
        }
        for (int w = 0; w < words; ++w) selected[w] |= acc[w];
      }
    }
    double total = 0.0;
    for (const Block& b : blocks_) {
      const int count = popcount_range(selected, b.begin, b.begin + b.cells);
      double pi;
      if (count == 0) {
        pi = 1.0 / b.cells;
      } else {
        pi = BinaryDataset::test_bit(selected, b.action_index) ? 1.0 / count : 0.0;
      }
      const double p = (1.0 - noise.epsilon) * pi + noise.epsilon / b.cells;
      if (p <= 0.0) return kNegInf;
      total += std::log(p);
    }
    return total;
  }

 private:
  struct Block {
    int begin;
    int width;
    int cells;
    int action_index;
  };

  std::vector<TrajectoryStep> demos_;
  std::vector<Block> blocks_;
  BinaryDataset data_;
};

int resolve_threads(int requested, int restarts) {
  if (requested > 0) return std::min(requested, restarts);
  const unsigned hc = std::thread::hardware_concurrency();
  return std::min(restarts, static_cast<int>(hc > 0 ? hc : 1));
}

void validate_options(const std::vector<TrajectoryStep>& demos, const LearnOptions& opt) {
  if (demos.empty()) throw ValidationError("learning requires at least one demo pair");
  if (opt.ensemble_size < 1) throw ValidationError("ensemble size must be >= 1");
  if (opt.budget < 1) throw ValidationError("budget must be >= 1");
  if (opt.restarts < 1) throw ValidationError("restarts must be >= 1");
  if (opt.noise.epsilon < 0.0 || opt.noise.epsilon > 1.0) {
    throw ValidationError("noise epsilon must lie in [0,1]");
  }
}

ScoredPolicy uniform_component(const DemoMatrix& matrix, const Pcfg& grammar,
                               const LearnOptions& opt) {
  ScoredPolicy uniform;
  uniform.policy = DnfPolicy();
  uniform.log_prior = policy_log_prior(uniform.policy, grammar, opt.prior_mode);
  uniform.log_likelihood = matrix.clause_log_likelihood({}, opt.noise);
  return uniform;
}

}  // namespace

LearnResult lpp_learn(const std::vector<TrajectoryStep>& demos, const Pcfg& grammar,
                      const LearnOptions& opt) {
  validate_options(demos, opt);
  const auto t0 = std::chrono::steady_clock::now();

  DemoMatrix matrix(demos);
  ProgramEnumerator enumerator(grammar);
  std::vector<EnumeratedProgram> programs;
  programs.reserve(opt.budget);

  LearnResult result{PosteriorMixture(opt.ensemble_size), 0, false, 0.0};
  result.mixture.insert(uniform_component(matrix, grammar, opt));

  // canonical policy text -> (log prior, log likelihood)
  std::unordered_map<std::string, std::pair<double, double>> memo;

  const int threads = resolve_threads(opt.threads, opt.restarts);
  std::size_t next_checkpoint = 0;

  for (int iteration = 1; iteration <= opt.budget; ++iteration) {
    EnumeratedProgram prog = enumerator.next();
    result.enumerated = iteration;
    if (result.mixture.full() && prog.log_prior < result.mixture.min_log_joint()) {
      result.early_stopped = true;
      break;
    }
    programs.push_back(std::move(prog));
    matrix.add_program(programs.back().program);

    std::vector<DecisionTree> trees(opt.restarts);
    if (threads <= 1) {
      for (int r = 0; r < opt.restarts; ++r) {
        trees[r] = fit_tree(matrix.data(), derive_seed(opt.seed, iteration, r));
      }
    } else {
      std::vector<std::future<DecisionTree>> jobs;
      jobs.reserve(opt.restarts - 1);
      for (int r = 1; r < opt.restarts; ++r) {
        jobs.push_back(std::async(std::launch::async, [&matrix, &opt, iteration, r]() {
          return fit_tree(matrix.data(), derive_seed(opt.seed, iteration, r));
        }));
      }
      trees[0] = fit_tree(matrix.data(), derive_seed(opt.seed, iteration, 0));
      for (int r = 1; r < opt.restarts; ++r) trees[r] = jobs[r - 1].get();
    }

    for (int r = 0; r < opt.restarts; ++r) {
      std::vector<IndexClause> clauses = tree_to_index_dnf(trees[r]);
      if (clauses.empty()) continue;  // the uniform policy is already seeded
      DnfPolicy policy = materialize_policy(clauses, programs);
      auto found = memo.find(policy.canonical_text());
      double log_prior;
      double ll;
      if (found == memo.end()) {
        log_prior = policy_log_prior(policy, grammar, opt.prior_mode);
        ll = matrix.clause_log_likelihood(clauses, opt.noise);
        memo.emplace(policy.canonical_text(), std::make_pair(log_prior, ll));
      } else {
        log_prior = found->second.first;
        ll = found->second.second;
      }
      result.mixture.insert(ScoredPolicy{std::move(policy), log_prior, ll});
    }

    while (next_checkpoint < opt.checkpoint_at.size() &&
           opt.checkpoint_at[next_checkpoint] <= iteration) {
      if (opt.on_checkpoint) opt.on_checkpoint(opt.checkpoint_at[next_checkpoint], result.mixture);
      ++next_checkpoint;
    }
  }

  result.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return result;
}

LearnResult vpi_learn(const std::vector<TrajectoryStep>& demos, const Pcfg& grammar,
                      const LearnOptions& opt) {
  validate_options(demos, opt);
  const auto t0 = std::chrono::steady_clock::now();

  DemoMatrix matrix(demos);
  PolicyEnumerator enumerator(grammar);

  LearnResult result{PosteriorMixture(opt.ensemble_size), 0, false, 0.0};
  result.mixture.insert(uniform_component(matrix, grammar, opt));

  std::unordered_map<std::string, int> program_columns;
  std::unordered_map<std::string, std::pair<double, double>> memo;
  std::size_t next_checkpoint = 0;

  for (int iteration = 1; iteration <= opt.budget; ++iteration) {
    PolicyEnumerator::Emission emission = enumerator.next();
    result.enumerated = iteration;
    DnfPolicy policy = std::move(emission.policy);

    auto found = memo.find(policy.canonical_text());
    double log_prior;
    double ll;
    if (found == memo.end()) {
      std::vector<IndexClause> clauses;
      clauses.reserve(policy.clauses().size());
      for (const auto& clause : policy.clauses()) {
        IndexClause ic;
        ic.reserve(clause.size());
        for (const auto& lit : clause) {
          auto at = program_columns.find(lit.text);
          int col;
          if (at == program_columns.end()) {
            col = matrix.add_program(lit.program);
            program_columns.emplace(lit.text, col);
          } else {
            col = at->second;
          }
          ic.emplace_back(col, lit.negated);
        }
        clauses.push_back(std::move(ic));
      }
      log_prior = policy_log_prior(policy, grammar, opt.prior_mode);
      ll = matrix.clause_log_likelihood(clauses, opt.noise);
      memo.emplace(policy.canonical_text(), std::make_pair(log_prior, ll));
    } else {
      log_prior = found->second.first;
      ll = found->second.second;
    }
    result.mixture.insert(ScoredPolicy{std::move(policy), log_prior, ll});

    while (next_checkpoint < opt.checkpoint_at.size() &&
           opt.checkpoint_at[next_checkpoint] <= iteration) {
      if (opt.on_checkpoint) opt.on_checkpoint(opt.checkpoint_at[next_checkpoint], result.mixture);
      ++next_checkpoint;
    }
  }

  result.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return result;
}

}  // namespace lpp
