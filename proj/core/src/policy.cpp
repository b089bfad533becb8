#include "lpp/policy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "json.hpp"
#include "lpp/io.hpp"

namespace lpp {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kLog2 = 0.6931471805599453;

std::string literal_text(const Literal& lit) {
  return lit.negated ? "!" + lit.text : lit.text;
}
}  // namespace

DnfPolicy::DnfPolicy(std::vector<std::vector<Literal>> clauses) : clauses_(std::move(clauses)) {
  for (auto& clause : clauses_) {
    if (clause.empty()) throw ValidationError("policy: empty clause");
    std::sort(clause.begin(), clause.end(), [](const Literal& a, const Literal& b) {
      if (a.text != b.text) return a.text < b.text;
      return a.negated < b.negated;
    });
    // Drop duplicate literals within a clause.
    clause.erase(std::unique(clause.begin(), clause.end(),
                             [](const Literal& a, const Literal& b) {
                               return a.text == b.text && a.negated == b.negated;
                             }),
                 clause.end());
  }
  std::sort(clauses_.begin(), clauses_.end(),
            [](const std::vector<Literal>& a, const std::vector<Literal>& b) {
              std::ostringstream sa, sb;
              for (const auto& l : a) sa << literal_text(l) << " & ";
              for (const auto& l : b) sb << literal_text(l) << " & ";
              return sa.str() < sb.str();
            });
  std::ostringstream out;
  for (std::size_t i = 0; i < clauses_.size(); ++i) {
    if (i) out << " | ";
    out << "(";
    for (std::size_t j = 0; j < clauses_[i].size(); ++j) {
      if (j) out << " & ";
      out << literal_text(clauses_[i][j]);
    }
    out << ")";
  }
  canonical_ = out.str();
}

int DnfPolicy::literal_count() const {
  int n = 0;
  for (const auto& clause : clauses_) n += static_cast<int>(clause.size());
  return n;
}

int DnfPolicy::method_call_count() const {
  int n = 0;
  for (const auto& clause : clauses_) {
    for (const auto& lit : clause) n += program_size(lit.program);
  }
  return n;
}

int DnfPolicy::max_program_depth() const {
  int d = 0;
  for (const auto& clause : clauses_) {
    for (const auto& lit : clause) d = std::max(d, program_depth(lit.program));
  }
  return d;
}

bool DnfPolicy::selects(const GridState& s, Action a) const {
  for (const auto& clause : clauses_) {
    bool all = true;
    for (const auto& lit : clause) {
      if (!lit.holds(s, a)) {
        all = false;
        break;
      }
    }
    if (all) return true;
  }
  return false;
}

PriorMode prior_mode_from_name(const std::string& name) {
  if (name == "grammatical") return PriorMode::kGrammatical;
  if (name == "uniform" || name == "no_prior") return PriorMode::kUniform;
  if (name == "sparsity" || name == "sparsity_prior") return PriorMode::kSparsity;
  throw ValidationError("unknown prior mode: " + name);
}

const std::string& prior_mode_name(PriorMode mode) {
  static const std::string names[] = {"grammatical", "uniform", "sparsity"};
  return names[static_cast<int>(mode)];
}

double policy_log_prior(const DnfPolicy& policy, const Pcfg& grammar, PriorMode mode) {
  switch (mode) {
    case PriorMode::kUniform:
      return 0.0;
    case PriorMode::kSparsity:
      return -policy.literal_count() * kLog2;
    case PriorMode::kGrammatical:
    default: {
      double total = 0.0;
      for (const auto& clause : policy.clauses()) {
        for (const auto& lit : clause) total += grammar.log_prior(lit.program);
      }
      return total;
    }
  }
}

std::vector<double> policy_action_distribution(const DnfPolicy& policy, const GridState& s) {
  const int n = s.cell_count();
  std::vector<double> probs(n, 0.0);
  int selected = 0;
  for (int r = 0; r < s.height(); ++r) {
    for (int c = 0; c < s.width(); ++c) {
      if (policy.selects(s, Action{r, c})) {
        probs[r * s.width() + c] = 1.0;
        ++selected;
      }
    }
  }
  if (selected == 0) {
    std::fill(probs.begin(), probs.end(), 1.0 / n);
  } else {
    for (double& p : probs) p /= selected;
  }
  return probs;
}

double log_likelihood(const DnfPolicy& policy, const std::vector<TrajectoryStep>& demos,
                      NoiseModel noise) {
  double total = 0.0;
  for (const auto& demo : demos) {
    const GridState& s = demo.state;
    const int cells = s.cell_count();
    int selected = 0;
    bool action_selected = false;
    for (int r = 0; r < s.height(); ++r) {
      for (int c = 0; c < s.width(); ++c) {
        if (policy.selects(s, Action{r, c})) {
          ++selected;
          if (r == demo.action.row && c == demo.action.col) action_selected = true;
        }
      }
    }
    double pi;
    if (selected == 0) {
      pi = 1.0 / cells;
    } else {
      pi = action_selected ? 1.0 / selected : 0.0;
    }
    double p = (1.0 - noise.epsilon) * pi + noise.epsilon / cells;
    if (p <= 0.0) return kNegInf;
    total += std::log(p);
  }
  return total;
}

using nlohmann::json;

namespace {

json policy_to_json(const ScoredPolicy& p, const Vocabulary& vocab) {
  json clauses = json::array();
  for (const auto& clause : p.policy.clauses()) {
    json jc = json::array();
    for (const auto& lit : clause) {
      jc.push_back(json{{"program", print_program(lit.program, vocab)}, {"negated", lit.negated}});
    }
    clauses.push_back(std::move(jc));
  }
  return json{{"clauses", std::move(clauses)},
              {"log_prior", p.log_prior},
              {"log_likelihood", p.log_likelihood}};
}

double number_field(const json& j, const char* name) {
  if (!j.contains(name)) throw JsonParseError(std::string("policy: missing field '") + name + "'");
  const json& v = j[name];
  if (v.is_null()) return kNegInf;  // JSON has no -inf literal
  if (!v.is_number()) throw JsonParseError(std::string("policy: non-numeric field '") + name + "'");
  return v.get<double>();
}

ScoredPolicy policy_from_json(const json& j, const Vocabulary& vocab) {
  if (!j.is_object() || !j.contains("clauses") || !j["clauses"].is_array()) {
    throw JsonParseError("policy: missing or non-array field 'clauses'");
  }
  std::vector<std::vector<Literal>> clauses;
  for (const json& jc : j["clauses"]) {
    if (!jc.is_array() || jc.empty()) throw JsonParseError("policy: each clause must be a non-empty array");
    std::vector<Literal> clause;
    for (const json& jl : jc) {
      if (!jl.is_object() || !jl.contains("program") || !jl["program"].is_string() ||
          !jl.contains("negated") || !jl["negated"].is_boolean()) {
        throw JsonParseError("policy: literal needs string 'program' and boolean 'negated'");
      }
      const std::string text = jl["program"].get<std::string>();
      FeatureProgram prog = parse_program(text, vocab);
      std::string canon = print_program(prog, vocab);
      clause.push_back(Literal{std::move(prog), jl["negated"].get<bool>(), std::move(canon)});
    }
    clauses.push_back(std::move(clause));
  }
  ScoredPolicy out;
  out.policy = DnfPolicy(std::move(clauses));
  out.log_prior = number_field(j, "log_prior");
  out.log_likelihood = number_field(j, "log_likelihood");
  return out;
}

}  // namespace

std::string serialize(const ScoredPolicy& p, const Vocabulary& vocab) {
  return policy_to_json(p, vocab).dump();
}

ScoredPolicy deserialize_policy(const std::string& text, const Vocabulary& vocab) {
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded()) throw JsonParseError("malformed JSON document");
  return policy_from_json(j, vocab);
}

std::string serialize_mixture(const std::vector<MixtureComponent>& mixture,
                              const Vocabulary& vocab) {
  json out = json::array();
  for (const auto& comp : mixture) {
    out.push_back(json{{"policy", policy_to_json(comp.scored, vocab)}, {"weight", comp.weight}});
  }
  return out.dump();
}

std::vector<MixtureComponent> deserialize_mixture(const std::string& text,
                                                  const Vocabulary& vocab) {
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded()) throw JsonParseError("malformed JSON document");
  if (!j.is_array()) throw JsonParseError("mixture: expected an array");
  std::vector<MixtureComponent> out;
  for (const json& jc : j) {
    if (!jc.is_object() || !jc.contains("policy") || !jc.contains("weight") ||
        !jc["weight"].is_number()) {
      throw JsonParseError("mixture: each entry needs 'policy' and numeric 'weight'");
    }
    out.push_back(MixtureComponent{policy_from_json(jc["policy"], vocab),
                                   jc["weight"].get<double>()});
  }
  return out;
}

}  // namespace lpp
