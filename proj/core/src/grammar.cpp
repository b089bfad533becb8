#include "lpp/grammar.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <sstream>

namespace lpp {

namespace detail {

namespace {
constexpr double kLogHalf = -0.6931471805599453;
constexpr double kLogNatFirst = -0.01005033585350145;  // log 0.99
constexpr double kLogNatStep = -4.605170185988091;     // log 0.01
constexpr double kTieEps = 1e-9;

double log_nat(int magnitude) { return kLogNatFirst + (magnitude - 1) * kLogNatStep; }
}  // namespace

void GrammarTable::compute_bounds() {
  log_bounds.assign(kSymCount, -std::numeric_limits<double>::infinity());
  log_bounds[kSymNat] = kLogNatFirst;
  // Monotone iteration to the least fixpoint of the max-completion system.
  // The best completion of every symbol is a shallow derivation, so a few
  // dozen rounds converge exactly.
  for (int round = 0; round < 64; ++round) {
    bool changed = false;
    for (std::uint8_t s = 0; s < kSymCount; ++s) {
      if (s == kSymNat) continue;
      double best = -std::numeric_limits<double>::infinity();
      for (const Production& p : productions[s]) {
        double total = p.log_prob;
        for (std::uint8_t r : p.rhs) total += log_bounds[r];
        best = std::max(best, total);
      }
      if (best > log_bounds[s] + 1e-15) {
        log_bounds[s] = best;
        changed = true;
      }
    }
    if (!changed) break;
  }
}

BestFirstCore::BestFirstCore(const GrammarTable& table, std::uint8_t start_symbol,
                             std::function<std::string(const std::vector<Tok>&)> text_of)
    : table_(table), text_of_(std::move(text_of)) {
  Item root;
  root.log_prob = 0.0;
  root.stack.push_back(StackEntry{start_symbol, 1});
  root.priority = entry_bound(root.stack.back());
  frontier_.push(std::move(root));
}

double BestFirstCore::entry_bound(const StackEntry& e) const {
  if (e.sym == kSymNat) return log_nat(e.nat_min);
  return table_.log_bounds[e.sym];
}

void BestFirstCore::expand(Item item) {
  const StackEntry top = item.stack.back();
  item.stack.pop_back();
  double base_bound = item.priority - entry_bound(top);  // logp + bounds of the rest

  if (top.sym == kSymNat) {
    // Take the current magnitude, or defer to the rest of the stream.
    Item take = item;
    take.log_prob += log_nat(top.nat_min);
    take.tokens.push_back(Tok{TokKind::kNat, static_cast<std::int16_t>(top.nat_min)});
    take.priority = base_bound + log_nat(top.nat_min);
    frontier_.push(std::move(take));

    Item defer = std::move(item);
    defer.stack.push_back(StackEntry{kSymNat, top.nat_min + 1});
    defer.priority = base_bound + log_nat(top.nat_min + 1);
    frontier_.push(std::move(defer));
    return;
  }

  for (const Production& p : table_.productions[top.sym]) {
    Item child = item;
    child.log_prob += p.log_prob;
    if (p.has_token) child.tokens.push_back(p.token);
    // Push right-to-left so the leftmost symbol expands first.
    for (auto it = p.rhs.rbegin(); it != p.rhs.rend(); ++it) {
      child.stack.push_back(StackEntry{*it, 1});
    }
    child.priority = base_bound + p.log_prob;
    for (std::uint8_t r : p.rhs) child.priority += table_.log_bounds[r];
    frontier_.push(std::move(child));
  }
}

void BestFirstCore::refill_pending() {
  // Find the next complete derivation, then drain everything that could tie
  // with it so the batch can be ordered by text.
  while (!frontier_.empty()) {
    Item item = frontier_.top();
    frontier_.pop();
    ++popped_;
    if (!item.stack.empty()) {
      expand(std::move(item));
      continue;
    }
    const double level = item.log_prob;
    std::vector<Emission> batch;
    batch.push_back(Emission{std::move(item.tokens), level, {}});
    while (!frontier_.empty() && frontier_.top().priority >= level - kTieEps) {
      Item tied = frontier_.top();
      frontier_.pop();
      ++popped_;
      if (tied.stack.empty()) {
        batch.push_back(Emission{std::move(tied.tokens), tied.log_prob, {}});
      } else {
        expand(std::move(tied));
      }
    }
    for (Emission& e : batch) e.text = text_of_(e.tokens);
    std::sort(batch.begin(), batch.end(), [](const Emission& a, const Emission& b) {
      if (a.log_prob != b.log_prob) return a.log_prob > b.log_prob;
      return a.text < b.text;
    });
    for (Emission& e : batch) pending_.push_back(std::move(e));
    return;
  }
}

BestFirstCore::Emission BestFirstCore::next() {
  if (pending_.empty()) refill_pending();
  if (pending_.empty()) throw GrammarError("enumeration frontier exhausted");
  Emission e = std::move(pending_.front());
  pending_.pop_front();
  return e;
}

namespace {

Offset build_offset(const std::vector<Tok>& toks, std::size_t& pos) {
  const Tok shape = toks[pos++];
  auto number = [&toks, &pos]() {
    const Tok sign = toks[pos++];
    const Tok nat = toks[pos++];
    int magnitude = nat.payload;
    return sign.kind == TokKind::kNumNeg ? -magnitude : magnitude;
  };
  switch (shape.kind) {
    case TokKind::kOffAxisX:
      return Offset{number(), 0};
    case TokKind::kOffAxisY:
      return Offset{0, number()};
    default: {
      int x = number();
      int y = number();
      return Offset{x, y};
    }
  }
}

ConditionPtr build_condition(const std::vector<Tok>& toks, std::size_t& pos) {
  const Tok head = toks[pos++];
  switch (head.kind) {
    case TokKind::kCellIs: {
      const Tok v = toks[pos++];
      return make_cell_is(CellValue{static_cast<std::uint8_t>(v.payload)});
    }
    case TokKind::kShifted: {
      Offset o = build_offset(toks, pos);
      ConditionPtr inner = build_condition(toks, pos);
      return make_shifted(o, std::move(inner));
    }
    case TokKind::kScanning: {
      Offset o = build_offset(toks, pos);
      ConditionPtr hit = build_condition(toks, pos);
      ConditionPtr miss = build_condition(toks, pos);
      return make_scanning(o, std::move(hit), std::move(miss));
    }
    default:
      throw GrammarError("malformed derivation token stream");
  }
}

}  // namespace

FeatureProgram build_program(const std::vector<Tok>& toks, std::size_t& pos) {
  const Tok head = toks[pos++];
  if (head.kind == TokKind::kAtActionCell) {
    return make_at_action_cell(build_condition(toks, pos));
  }
  if (head.kind == TokKind::kAtCellWithValue) {
    const Tok v = toks[pos++];
    CellValue value{static_cast<std::uint8_t>(v.payload)};
    return make_at_cell_with_value(value, build_condition(toks, pos));
  }
  throw GrammarError("malformed derivation token stream");
}

std::string render_program_text(const std::vector<Tok>& toks, std::size_t& pos,
                                const Vocabulary& vocab) {
  FeatureProgram f = build_program(toks, pos);
  return print_program(f, vocab);
}

}  // namespace detail

namespace {

using detail::GrammarTable;
using detail::Production;
using detail::Tok;
using detail::TokKind;

constexpr double kLogHalf = -0.6931471805599453;
constexpr double kLogQuarter = -1.3862943611198906;
constexpr double kLogNatFirst = -0.01005033585350145;
constexpr double kLogNatStep = -4.605170185988091;

Production prod(double log_prob, TokKind kind, std::vector<std::uint8_t> rhs) {
  return Production{log_prob, true, Tok{kind, 0}, std::move(rhs)};
}

Production silent_prod(double log_prob, std::vector<std::uint8_t> rhs) {
  return Production{log_prob, false, Tok{TokKind::kNat, 0}, std::move(rhs)};
}

GrammarTable make_feature_table(int value_count, double log_value, bool with_policy_rules) {
  using namespace detail;
  GrammarTable t;
  t.productions.resize(kSymCount);
  t.productions[kSymProgram] = {
      prod(kLogHalf, TokKind::kAtCellWithValue, {kSymValue, kSymCondition}),
      prod(kLogHalf, TokKind::kAtActionCell, {kSymCondition}),
  };
  t.productions[kSymCondition] = {
      prod(kLogHalf, TokKind::kShifted, {kSymOffset, kSymBase}),
      silent_prod(kLogHalf, {kSymBase}),
  };
  t.productions[kSymBase] = {
      prod(kLogHalf, TokKind::kCellIs, {kSymValue}),
      prod(kLogHalf, TokKind::kScanning, {kSymOffset, kSymCondition, kSymCondition}),
  };
  t.productions[kSymOffset] = {
      prod(kLogQuarter, TokKind::kOffAxisX, {kSymNumber}),
      prod(kLogQuarter, TokKind::kOffAxisY, {kSymNumber}),
      prod(kLogHalf, TokKind::kOffDiag, {kSymNumber, kSymNumber}),
  };
  t.productions[kSymNumber] = {
      prod(kLogHalf, TokKind::kNumPos, {kSymNat}),
      prod(kLogHalf, TokKind::kNumNeg, {kSymNat}),
  };
  t.productions[kSymNat] = {};  // lazy geometric stream, handled by the core
  t.productions[kSymValue].reserve(value_count);
  for (int v = 0; v < value_count; ++v) {
    t.productions[kSymValue].push_back(
        Production{log_value, true, Tok{TokKind::kValue, static_cast<std::int16_t>(v)}, {}});
  }
  if (with_policy_rules) {
    t.productions[kSymPolicy] = {
        prod(kLogHalf, TokKind::kPolicyLast, {kSymClause}),
        prod(kLogHalf, TokKind::kPolicyCons, {kSymClause, kSymPolicy}),
    };
    t.productions[kSymClause] = {
        prod(kLogHalf, TokKind::kClauseLast, {kSymLiteral}),
        prod(kLogHalf, TokKind::kClauseCons, {kSymLiteral, kSymClause}),
    };
    t.productions[kSymLiteral] = {
        prod(kLogHalf, TokKind::kLitPos, {kSymProgram}),
        prod(kLogHalf, TokKind::kLitNeg, {kSymProgram}),
    };
  }
  t.compute_bounds();
  return t;
}

}  // namespace

Pcfg::Pcfg(Vocabulary vocab) : vocab_(std::move(vocab)) {
  if (vocab_.grid_value_count() < 1) {
    throw GrammarError("grammar requires at least one grid value");
  }
  log_value_ = -std::log(static_cast<double>(vocab_.size()));
  feature_table_ = make_feature_table(vocab_.size(), log_value_, false);
  policy_table_ = make_feature_table(vocab_.size(), log_value_, true);
}

namespace {

double log_number(int v) {
  if (v == 0) throw GrammarError("zero offset component is not derivable");
  return kLogHalf + kLogNatFirst + (std::abs(v) - 1) * kLogNatStep;
}

double log_offset(Offset o) {
  if (o.x != 0 && o.y == 0) return kLogQuarter + log_number(o.x);
  if (o.x == 0 && o.y != 0) return kLogQuarter + log_number(o.y);
  if (o.x != 0 && o.y != 0) return kLogHalf + log_number(o.x) + log_number(o.y);
  throw GrammarError("offset (0,0) is not derivable");
}

}  // namespace

double Pcfg::log_prior(const FeatureProgram& f) const {
  auto check_value = [this](CellValue v) {
    if (v.id >= vocab_.size()) throw GrammarError("value outside the grammar vocabulary");
    return log_value_;
  };

  // Mutually recursive over condition positions: a shift may appear at
  // condition position but not at base position.
  std::function<double(const Condition&)> base_pos;
  std::function<double(const Condition&)> cond_pos = [&](const Condition& c) -> double {
    if (const auto* sh = std::get_if<Shifted>(&c.node)) {
      return kLogHalf + log_offset(sh->offset) + base_pos(*sh->inner);
    }
    return kLogHalf + base_pos(c);
  };
  base_pos = [&](const Condition& c) -> double {
    if (const auto* cell_is = std::get_if<CellIs>(&c.node)) {
      return kLogHalf + check_value(cell_is->value);
    }
    if (const auto* scan = std::get_if<Scanning>(&c.node)) {
      return kLogHalf + log_offset(scan->offset) + cond_pos(*scan->hit) + cond_pos(*scan->miss);
    }
    throw GrammarError("a shift nested directly under a shift is not derivable");
  };

  if (const auto* at_action = std::get_if<AtActionCell>(&f.node)) {
    return kLogHalf + cond_pos(*at_action->cond);
  }
  const auto& wv = std::get<AtCellWithValue>(f.node);
  return kLogHalf + check_value(wv.value) + cond_pos(*wv.cond);
}

namespace {

int sample_nat(Rng& rng) {
  int i = 1;
  while (rng.uniform01() < 0.01) ++i;
  return i;
}

int sample_number(Rng& rng) {
  int magnitude = sample_nat(rng);
  return rng.coin() ? magnitude : -magnitude;
}

Offset sample_offset(Rng& rng) {
  double u = rng.uniform01();
  if (u < 0.25) return Offset{sample_number(rng), 0};
  if (u < 0.5) return Offset{0, sample_number(rng)};
  return Offset{sample_number(rng), sample_number(rng)};
}

CellValue sample_value(const Vocabulary& vocab, Rng& rng) {
  return CellValue{static_cast<std::uint8_t>(rng.below(vocab.size()))};
}

ConditionPtr sample_base(const Vocabulary& vocab, Rng& rng, int depth);

ConditionPtr sample_condition(const Vocabulary& vocab, Rng& rng, int depth) {
  if (depth <= 0) return make_cell_is(sample_value(vocab, rng));
  if (rng.coin()) {
    return make_shifted(sample_offset(rng), sample_base(vocab, rng, depth - 1));
  }
  return sample_base(vocab, rng, depth);
}

ConditionPtr sample_base(const Vocabulary& vocab, Rng& rng, int depth) {
  if (depth <= 0 || rng.coin()) return make_cell_is(sample_value(vocab, rng));
  Offset o = sample_offset(rng);
  ConditionPtr hit = sample_condition(vocab, rng, depth - 1);
  ConditionPtr miss = sample_condition(vocab, rng, depth - 1);
  return make_scanning(o, std::move(hit), std::move(miss));
}

}  // namespace

FeatureProgram Pcfg::sample(Rng& rng, int max_depth) const {
  if (rng.coin()) {
    return make_at_action_cell(sample_condition(vocab_, rng, max_depth));
  }
  return make_at_cell_with_value(sample_value(vocab_, rng),
                                 sample_condition(vocab_, rng, max_depth));
}

ProgramEnumerator::ProgramEnumerator(const Pcfg& grammar)
    : grammar_(grammar),
      core_(grammar.feature_table(), detail::kSymProgram,
            [&grammar](const std::vector<detail::Tok>& toks) {
              std::size_t pos = 0;
              return detail::render_program_text(toks, pos, grammar.vocabulary());
            }) {}

EnumeratedProgram ProgramEnumerator::next() {
  detail::BestFirstCore::Emission e = core_.next();
  std::size_t pos = 0;
  FeatureProgram f = detail::build_program(e.tokens, pos);
  ++emitted_;
  return EnumeratedProgram{std::move(f), e.log_prob, std::move(e.text)};
}

std::vector<EnumeratedProgram> enumerate_programs(const Pcfg& grammar, int count) {
  ProgramEnumerator it(grammar);
  std::vector<EnumeratedProgram> out;
  out.reserve(count);
  for (int i = 0; i < count; ++i) out.push_back(it.next());
  return out;
}

}  // namespace lpp
