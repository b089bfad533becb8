#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "lpp/policy.hpp"

namespace lpp {

// Anti-demonstrations: every non-demonstrated in-bounds action of each
// demonstrated state, kept per demo pair (duplicates across pairs and false
// negatives are intentional).
struct LabeledSet {
  std::vector<TrajectoryStep> positives;
  std::vector<TrajectoryStep> negatives;
};

LabeledSet make_anti_demos(const std::vector<TrajectoryStep>& demos);

// Row-major binary matrix with one label bit per row. Columns are stored as
// bitsets and deduplicated into groups of extensionally identical columns so
// the tree learner can score each distinct column once.
class BinaryDataset {
 public:
  BinaryDataset() = default;
  explicit BinaryDataset(int rows);

  static BinaryDataset from_columns(const std::vector<std::vector<std::uint8_t>>& columns,
                                    const std::vector<std::uint8_t>& labels);

  int row_count() const { return rows_; }
  int column_count() const { return static_cast<int>(column_group_.size()); }

  void set_label(int row, bool v);
  bool label(int row) const { return test_bit(labels_, row); }
  const std::vector<std::uint64_t>& labels() const { return labels_; }

  // Appends a column; returns its index.
  int add_column(std::vector<std::uint64_t> bits);

  bool cell(int row, int col) const { return test_bit(group_bits_[column_group_[col]], row); }
  const std::vector<std::uint64_t>& column_bits(int col) const {
    return group_bits_[column_group_[col]];
  }

  struct Group {
    std::vector<int> members;  // column indices, ascending
    bool constant;
  };
  int group_count() const { return static_cast<int>(groups_.size()); }
  const Group& group(int g) const { return groups_[g]; }
  const std::vector<std::uint64_t>& group_column(int g) const { return group_bits_[g]; }

  int word_count() const { return static_cast<int>((rows_ + 63) / 64); }

  static bool test_bit(const std::vector<std::uint64_t>& bits, int i) {
    return (bits[i >> 6] >> (i & 63)) & 1;
  }
  static void set_bit(std::vector<std::uint64_t>& bits, int i) {
    bits[i >> 6] |= std::uint64_t{1} << (i & 63);
  }

 private:
  int rows_ = 0;
  std::vector<std::uint64_t> labels_;
  std::vector<int> column_group_;               // column index -> group index
  std::vector<std::vector<std::uint64_t>> group_bits_;
  std::vector<Group> groups_;
  std::map<std::size_t, std::vector<int>> hash_buckets_;  // bits hash -> group ids
};

struct TreeNode {
  int column = -1;  // -1 marks a leaf
  bool prediction = false;
  int if_false = -1;
  int if_true = -1;
};

struct DecisionTree {
  std::vector<TreeNode> nodes;  // nodes[0] is the root; empty means predict-false

  bool predict(const std::function<bool(int)>& column_value) const;
  bool predict_row(const BinaryDataset& data, int row) const;
};

// CART with Gini impurity, grown until leaves are pure or no split reduces
// impurity. Splits within 1e-12 of the best impurity decrease are a tie;
// one is drawn uniformly at random from the seed (extensionally identical
// columns each count as separate candidates). Mixed-label leaves predict the
// majority, ties predicting 0.
DecisionTree fit_tree(const BinaryDataset& data, std::uint64_t seed);

// One conjunction per positive leaf; literals negated on false branches.
// A tree with no positive leaf yields the empty policy.
using IndexClause = std::vector<std::pair<int, bool>>;  // (column, negated)
std::vector<IndexClause> tree_to_index_dnf(const DecisionTree& tree);

DnfPolicy materialize_policy(const std::vector<IndexClause>& clauses,
                             const std::vector<EnumeratedProgram>& programs);

// Best-first stream of complete DNF policies from the extended grammar
// (clause and literal counts geometric with p = 0.5, literal sign uniform).
class PolicyEnumerator {
 public:
  explicit PolicyEnumerator(const Pcfg& grammar);

  struct Emission {
    DnfPolicy policy;
    double enumeration_log_prior;
  };
  Emission next();

 private:
  const Pcfg& grammar_;
  detail::BestFirstCore core_;
};

// Top-K weighted candidate set approximating the policy posterior. Starts
// from the uniform policy; a candidate enters only by beating the current
// minimum unnormalized log posterior, so the minimum never decreases.
class PosteriorMixture {
 public:
  explicit PosteriorMixture(int capacity);

  bool insert(ScoredPolicy candidate);
  bool full() const { return static_cast<int>(components_.size()) >= capacity_; }
  double min_log_joint() const;
  int size() const { return static_cast<int>(components_.size()); }
  int capacity() const { return capacity_; }

  const std::vector<ScoredPolicy>& components() const { return components_; }
  std::vector<double> weights() const;  // softmax of log joints, sums to 1
  std::vector<MixtureComponent> snapshot() const;

 private:
  int capacity_;
  std::vector<ScoredPolicy> components_;  // sorted descending by log joint
  std::set<std::string> canonical_;
};

Action map_action(const std::vector<MixtureComponent>& mixture, const GridState& s);

struct LearnOptions {
  int ensemble_size = 25;  // K
  int budget = 100;        // feature programs (lpp) or policies (vpi) to enumerate
  int restarts = 5;        // tree fits per iteration
  NoiseModel noise;
  PriorMode prior_mode = PriorMode::kGrammatical;
  std::uint64_t seed = 0;
  int threads = 0;  // 0 = hardware concurrency; results are thread-count independent

  // Invoked after the iteration matching each entry of checkpoint_at
  // (ascending); used by budget sweeps to snapshot one training run.
  std::vector<int> checkpoint_at;
  std::function<void(int, const PosteriorMixture&)> on_checkpoint;
};

struct LearnResult {
  PosteriorMixture mixture;
  int enumerated = 0;
  bool early_stopped = false;
  double seconds = 0.0;
};

// Incremental imitation learning: enumerate feature programs best-first,
// extend the design matrix one column at a time, fit randomized trees, and
// keep the top-K scored policies. Stops early once the next program's prior
// falls below every component's unnormalized posterior.
LearnResult lpp_learn(const std::vector<TrajectoryStep>& demos, const Pcfg& grammar,
                      const LearnOptions& options);

// Baseline: enumerate whole DNF policies from the extended grammar and score
// them with the same prior and likelihood; no Boolean learning.
LearnResult vpi_learn(const std::vector<TrajectoryStep>& demos, const Pcfg& grammar,
                      const LearnOptions& options);

}  // namespace lpp
