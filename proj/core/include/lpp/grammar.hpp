#pragma once

#include <cstdint>
#include <deque>
#include <functional>
#include <memory>
#include <queue>
#include <string>
#include <vector>

#include "lpp/dsl.hpp"
#include "lpp/rng.hpp"

namespace lpp {

struct GrammarError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

namespace detail {

// Derivations are emitted as token streams in prefix order and rebuilt into
// ASTs afterwards. One table drives both the feature grammar and the
// extended policy grammar used by full-policy enumeration.
enum class TokKind : std::uint8_t {
  kAtActionCell,
  kAtCellWithValue,
  kShifted,
  kScanning,
  kCellIs,
  kOffAxisX,   // (N, 0)
  kOffAxisY,   // (0, N)
  kOffDiag,    // (N, N)
  kNumPos,
  kNumNeg,
  kNat,        // payload: magnitude >= 1
  kValue,      // payload: cell value id
  kPolicyLast,
  kPolicyCons,
  kClauseLast,
  kClauseCons,
  kLitPos,
  kLitNeg,
};

struct Tok {
  TokKind kind;
  std::int16_t payload = 0;
};

enum Symbol : std::uint8_t {
  kSymProgram = 0,
  kSymCondition,
  kSymBase,
  kSymOffset,
  kSymNumber,
  kSymNat,
  kSymValue,
  kSymPolicy,
  kSymClause,
  kSymLiteral,
  kSymCount,
};

struct Production {
  double log_prob;
  bool has_token;
  Tok token;
  std::vector<std::uint8_t> rhs;
};

struct GrammarTable {
  std::vector<std::vector<Production>> productions;  // indexed by Symbol
  std::vector<double> log_bounds;                    // optimistic completion bounds

  void compute_bounds();
};

// Best-first search over partial derivations. Complete derivations pop in
// non-increasing probability; exact ties are ordered by the text rendering
// supplied by the caller.
class BestFirstCore {
 public:
  BestFirstCore(const GrammarTable& table, std::uint8_t start_symbol,
                std::function<std::string(const std::vector<Tok>&)> text_of);

  struct Emission {
    std::vector<Tok> tokens;
    double log_prob;
    std::string text;
  };

  Emission next();  // throws GrammarError when exhausted (never, in practice)
  std::size_t popped() const { return popped_; }

 private:
  struct StackEntry {
    std::uint8_t sym;
    std::int32_t nat_min;  // lazy lower bound for the numeric symbol
  };
  struct Item {
    double log_prob;
    double priority;
    std::vector<Tok> tokens;
    std::vector<StackEntry> stack;  // leftmost open symbol on top (back)
  };
  struct ItemCompare {
    bool operator()(const Item& a, const Item& b) const { return a.priority < b.priority; }
  };

  double entry_bound(const StackEntry& e) const;
  void expand(Item item);
  void refill_pending();

  const GrammarTable& table_;
  std::function<std::string(const std::vector<Tok>&)> text_of_;
  std::priority_queue<Item, std::vector<Item>, ItemCompare> frontier_;
  std::deque<Emission> pending_;
  std::size_t popped_ = 0;
};

}  // namespace detail

// The probabilistic grammar over feature programs for one game's value set
// (grid vocabulary plus the offscreen token). Production probabilities:
//   P -> at_cell_with_value(V, C)   0.5        C -> shifted(O, B)   0.5
//   P -> at_action_cell(C)          0.5        C -> B               0.5
//   B -> cell_is_value(V)           0.5        B -> scanning(O,C,C) 0.5
//   O -> (N,0) | (0,N) | (N,N)      0.25 / 0.25 / 0.5
//   N -> +nat | -nat                0.5 / 0.5,  nat = i w.p. 0.99 * 0.01^(i-1)
//   V -> each value                 1 / |V|
class Pcfg {
 public:
  explicit Pcfg(Vocabulary vocab);

  const Vocabulary& vocabulary() const { return vocab_; }
  int value_count() const { return vocab_.size(); }

  // Log probability of the unique derivation of f. Throws GrammarError if f
  // is not derivable (zero offset, shift nested directly under shift, or a
  // value outside the vocabulary).
  double log_prior(const FeatureProgram& f) const;

  // Log probability pieces, exposed for the enumerator and tests.
  double log_value() const { return log_value_; }

  // Random derivation; test utility. Recursion depth is capped by forcing
  // base conditions, which slightly truncates the tail of the distribution.
  FeatureProgram sample(Rng& rng, int max_depth = 12) const;

  const detail::GrammarTable& feature_table() const { return feature_table_; }
  const detail::GrammarTable& policy_table() const { return policy_table_; }

 private:
  Vocabulary vocab_;
  double log_value_;
  detail::GrammarTable feature_table_;
  detail::GrammarTable policy_table_;
};

struct EnumeratedProgram {
  FeatureProgram program;
  double log_prior;
  std::string text;
};

// Streams feature programs in non-increasing prior probability without
// duplicates; ties are in canonical text order.
class ProgramEnumerator {
 public:
  explicit ProgramEnumerator(const Pcfg& grammar);

  EnumeratedProgram next();
  int emitted() const { return emitted_; }

 private:
  const Pcfg& grammar_;
  detail::BestFirstCore core_;
  int emitted_ = 0;
};

std::vector<EnumeratedProgram> enumerate_programs(const Pcfg& grammar, int count);

// Builders shared with the policy enumerator.
namespace detail {
FeatureProgram build_program(const std::vector<Tok>& toks, std::size_t& pos);
std::string render_program_text(const std::vector<Tok>& toks, std::size_t& pos,
                                const Vocabulary& vocab);
}  // namespace detail

}  // namespace lpp
