#include "lpp/dsl.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

namespace lpp {

ConditionPtr make_cell_is(CellValue v) {
  return std::make_shared<const Condition>(Condition{CellIs{v}});
}

ConditionPtr make_shifted(Offset o, ConditionPtr inner) {
  return std::make_shared<const Condition>(Condition{Shifted{o, std::move(inner)}});
}

ConditionPtr make_scanning(Offset o, ConditionPtr hit, ConditionPtr miss) {
  return std::make_shared<const Condition>(Condition{Scanning{o, std::move(hit), std::move(miss)}});
}

FeatureProgram make_at_action_cell(ConditionPtr cond) {
  return FeatureProgram{AtActionCell{std::move(cond)}};
}

FeatureProgram make_at_cell_with_value(CellValue v, ConditionPtr cond) {
  return FeatureProgram{AtCellWithValue{v, std::move(cond)}};
}

bool evaluate_condition(const Condition& c, const GridState& s, int row, int col) {
  if (const auto* cell_is = std::get_if<CellIs>(&c.node)) {
    return s.at(row, col) == cell_is->value;
  }
  if (const auto* shifted = std::get_if<Shifted>(&c.node)) {
    return evaluate_condition(*shifted->inner, s, row + shifted->offset.y,
                              col + shifted->offset.x);
  }
  const auto& scan = std::get<Scanning>(c.node);
  const int cap = s.height() + s.width() + 2;
  int r = row;
  int cc = col;
  for (int i = 0; i < cap; ++i) {
    r += scan.offset.y;
    cc += scan.offset.x;
    if (evaluate_condition(*scan.hit, s, r, cc)) return true;
    if (evaluate_condition(*scan.miss, s, r, cc)) return false;
  }
  return false;
}

bool evaluate(const FeatureProgram& f, const GridState& s, Action a) {
  if (const auto* at_action = std::get_if<AtActionCell>(&f.node)) {
    return evaluate_condition(*at_action->cond, s, a.row, a.col);
  }
  const auto& with_value = std::get<AtCellWithValue>(f.node);
  for (int r = 0; r < s.height(); ++r) {
    for (int c = 0; c < s.width(); ++c) {
      if (s.at(r, c) == with_value.value &&
          evaluate_condition(*with_value.cond, s, r, c)) {
        return true;
      }
    }
  }
  return false;
}

namespace {

int condition_size(const Condition& c) {
  if (std::holds_alternative<CellIs>(c.node)) return 1;
  if (const auto* sh = std::get_if<Shifted>(&c.node)) return 1 + condition_size(*sh->inner);
  const auto& scan = std::get<Scanning>(c.node);
  return 1 + condition_size(*scan.hit) + condition_size(*scan.miss);
}

int condition_depth(const Condition& c) {
  if (std::holds_alternative<CellIs>(c.node)) return 1;
  if (const auto* sh = std::get_if<Shifted>(&c.node)) return 1 + condition_depth(*sh->inner);
  const auto& scan = std::get<Scanning>(c.node);
  return 1 + std::max(condition_depth(*scan.hit), condition_depth(*scan.miss));
}

void print_condition(const Condition& c, const Vocabulary& vocab, std::ostringstream& out) {
  if (const auto* cell_is = std::get_if<CellIs>(&c.node)) {
    out << "cell_is_value(" << vocab.tag_of(cell_is->value) << ")";
    return;
  }
  if (const auto* sh = std::get_if<Shifted>(&c.node)) {
    out << "shifted((" << sh->offset.x << "," << sh->offset.y << "), ";
    print_condition(*sh->inner, vocab, out);
    out << ")";
    return;
  }
  const auto& scan = std::get<Scanning>(c.node);
  out << "scanning((" << scan.offset.x << "," << scan.offset.y << "), ";
  print_condition(*scan.hit, vocab, out);
  out << ", ";
  print_condition(*scan.miss, vocab, out);
  out << ")";
}

}  // namespace

int program_size(const FeatureProgram& f) {
  if (const auto* at_action = std::get_if<AtActionCell>(&f.node)) {
    return 1 + condition_size(*at_action->cond);
  }
  return 1 + condition_size(*std::get<AtCellWithValue>(f.node).cond);
}

int program_depth(const FeatureProgram& f) {
  if (const auto* at_action = std::get_if<AtActionCell>(&f.node)) {
    return 1 + condition_depth(*at_action->cond);
  }
  return 1 + condition_depth(*std::get<AtCellWithValue>(f.node).cond);
}

std::string print_program(const FeatureProgram& f, const Vocabulary& vocab) {
  std::ostringstream out;
  if (const auto* at_action = std::get_if<AtActionCell>(&f.node)) {
    out << "at_action_cell(";
    print_condition(*at_action->cond, vocab, out);
    out << ")";
  } else {
    const auto& wv = std::get<AtCellWithValue>(f.node);
    out << "at_cell_with_value(" << vocab.tag_of(wv.value) << ", ";
    print_condition(*wv.cond, vocab, out);
    out << ")";
  }
  return out.str();
}

namespace {

class Parser {
 public:
  Parser(const std::string& text, const Vocabulary& vocab) : text_(text), vocab_(vocab) {}

  FeatureProgram parse() {
    FeatureProgram f = parse_program_node();
    skip_ws();
    if (pos_ != text_.size()) throw DslSyntaxError("trailing input after program", pos_);
    return f;
  }

 private:
  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  void expect(char ch) {
    skip_ws();
    if (pos_ >= text_.size() || text_[pos_] != ch) {
      throw DslSyntaxError(std::string("expected '") + ch + "'", pos_);
    }
    ++pos_;
  }

  std::string identifier() {
    skip_ws();
    std::size_t start = pos_;
    while (pos_ < text_.size() &&
           (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
      ++pos_;
    }
    if (start == pos_) throw DslSyntaxError("expected an identifier", pos_);
    return text_.substr(start, pos_ - start);
  }

  int integer() {
    skip_ws();
    std::size_t start = pos_;
    if (pos_ < text_.size() && (text_[pos_] == '-' || text_[pos_] == '+')) ++pos_;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    if (pos_ == start || (pos_ == start + 1 && !std::isdigit(static_cast<unsigned char>(text_[start])))) {
      throw DslSyntaxError("expected an integer", pos_);
    }
    return std::stoi(text_.substr(start, pos_ - start));
  }

  Offset offset() {
    expect('(');
    int x = integer();
    expect(',');
    int y = integer();
    expect(')');
    if (std::abs(x) > kMaxGridDim || std::abs(y) > kMaxGridDim) {
      throw DslSyntaxError("offset component out of range", pos_);
    }
    return Offset{x, y};
  }

  CellValue value() {
    skip_ws();
    std::size_t at = pos_;
    std::string tag = identifier();
    if (!vocab_.contains(tag)) throw DslSyntaxError("unknown value tag '" + tag + "'", at);
    return vocab_.id_of(tag);
  }

  FeatureProgram parse_program_node() {
    skip_ws();
    std::size_t at = pos_;
    std::string head = identifier();
    if (head == "at_action_cell") {
      expect('(');
      ConditionPtr c = parse_condition();
      expect(')');
      return make_at_action_cell(std::move(c));
    }
    if (head == "at_cell_with_value") {
      expect('(');
      CellValue v = value();
      expect(',');
      ConditionPtr c = parse_condition();
      expect(')');
      return make_at_cell_with_value(v, std::move(c));
    }
    throw DslSyntaxError("expected 'at_action_cell' or 'at_cell_with_value'", at);
  }

  ConditionPtr parse_condition() {
    skip_ws();
    std::size_t at = pos_;
    std::string head = identifier();
    if (head == "cell_is_value") {
      expect('(');
      CellValue v = value();
      expect(')');
      return make_cell_is(v);
    }
    if (head == "shifted") {
      expect('(');
      Offset o = offset();
      expect(',');
      ConditionPtr inner = parse_condition();
      expect(')');
      return make_shifted(o, std::move(inner));
    }
    if (head == "scanning") {
      expect('(');
      Offset o = offset();
      expect(',');
      ConditionPtr hit = parse_condition();
      expect(',');
      ConditionPtr miss = parse_condition();
      expect(')');
      return make_scanning(o, std::move(hit), std::move(miss));
    }
    throw DslSyntaxError("expected 'cell_is_value', 'shifted' or 'scanning'", at);
  }

  const std::string& text_;
  const Vocabulary& vocab_;
  std::size_t pos_ = 0;
};

bool conditions_equal(const Condition& a, const Condition& b) {
  if (a.node.index() != b.node.index()) return false;
  if (const auto* ca = std::get_if<CellIs>(&a.node)) {
    return ca->value == std::get<CellIs>(b.node).value;
  }
  if (const auto* sa = std::get_if<Shifted>(&a.node)) {
    const auto& sb = std::get<Shifted>(b.node);
    return sa->offset == sb.offset && conditions_equal(*sa->inner, *sb.inner);
  }
  const auto& na = std::get<Scanning>(a.node);
  const auto& nb = std::get<Scanning>(b.node);
  return na.offset == nb.offset && conditions_equal(*na.hit, *nb.hit) &&
         conditions_equal(*na.miss, *nb.miss);
}

}  // namespace

FeatureProgram parse_program(const std::string& text, const Vocabulary& vocab) {
  return Parser(text, vocab).parse();
}

bool programs_equal(const FeatureProgram& a, const FeatureProgram& b) {
  if (a.node.index() != b.node.index()) return false;
  if (const auto* aa = std::get_if<AtActionCell>(&a.node)) {
    return conditions_equal(*aa->cond, *std::get<AtActionCell>(b.node).cond);
  }
  const auto& wa = std::get<AtCellWithValue>(a.node);
  const auto& wb = std::get<AtCellWithValue>(b.node);
  return wa.value == wb.value && conditions_equal(*wa.cond, *wb.cond);
}

}  // namespace lpp
