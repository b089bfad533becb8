#pragma once

#include <optional>
#include <string>
#include <vector>

#include "lpp/dsl.hpp"
#include "lpp/grammar.hpp"

namespace lpp {

struct Literal {
  FeatureProgram program;
  bool negated = false;
  std::string text;  // canonical program text, used for ordering and dedup

  bool holds(const GridState& s, Action a) const { return evaluate(program, s, a) != negated; }
};

// Disjunction of conjunctions of possibly negated feature programs. The
// empty policy (no clauses) selects nothing, which induces the uniform
// fallback distribution over all cells.
class DnfPolicy {
 public:
  DnfPolicy() = default;
  explicit DnfPolicy(std::vector<std::vector<Literal>> clauses);

  const std::vector<std::vector<Literal>>& clauses() const { return clauses_; }
  bool empty() const { return clauses_.empty(); }

  // Literal occurrences across all clauses (a program used twice counts twice).
  int literal_count() const;
  int method_call_count() const;
  int max_program_depth() const;

  bool selects(const GridState& s, Action a) const;

  // Canonical rendering: clauses and literals sorted, "!"-prefixed negation,
  // " & " and " | " separators. Used for mixture dedup.
  const std::string& canonical_text() const { return canonical_; }

  friend bool operator==(const DnfPolicy& a, const DnfPolicy& b) {
    return a.canonical_ == b.canonical_;
  }

 private:
  std::vector<std::vector<Literal>> clauses_;
  std::string canonical_;
};

enum class PriorMode { kGrammatical, kUniform, kSparsity };

PriorMode prior_mode_from_name(const std::string& name);
const std::string& prior_mode_name(PriorMode mode);

// Unnormalized log prior of a policy.
//   grammatical: sum of log grammar priors over literal occurrences
//   uniform:     0
//   sparsity:    -(literal occurrences) * log 2
double policy_log_prior(const DnfPolicy& policy, const Pcfg& grammar, PriorMode mode);

// pi(a|s): uniform over selected cells, or uniform over all cells when the
// policy selects none. Returned row-major, one entry per cell.
std::vector<double> policy_action_distribution(const DnfPolicy& policy, const GridState& s);

struct NoiseModel {
  double epsilon = 0.0;
};

// Sum over demo pairs of log[(1-eps) * pi(a|s) + eps / (H*W)]. With eps = 0 a
// single unexplained demo pair sends the result to -infinity.
double log_likelihood(const DnfPolicy& policy, const std::vector<TrajectoryStep>& demos,
                      NoiseModel noise);

struct ScoredPolicy {
  DnfPolicy policy;
  double log_prior = 0.0;
  double log_likelihood = 0.0;

  double log_joint() const { return log_prior + log_likelihood; }
};

// Policy / mixture JSON:
//   policy   {"clauses":[[{"program":text,"negated":bool},...],...],
//             "log_prior":p,"log_likelihood":l}
//   mixture  [{"policy":...,"weight":w},...]
std::string serialize(const ScoredPolicy& p, const Vocabulary& vocab);
ScoredPolicy deserialize_policy(const std::string& json_text, const Vocabulary& vocab);

struct MixtureComponent {
  ScoredPolicy scored;
  double weight = 0.0;
};

std::string serialize_mixture(const std::vector<MixtureComponent>& mixture,
                              const Vocabulary& vocab);
std::vector<MixtureComponent> deserialize_mixture(const std::string& json_text,
                                                  const Vocabulary& vocab);

}  // namespace lpp
