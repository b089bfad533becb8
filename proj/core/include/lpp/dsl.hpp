#pragma once

#include <memory>
#include <string>
#include <variant>

#include "lpp/grid.hpp"

namespace lpp {

// Feature detector programs map a (state, action) pair to one bit by moving
// an implicit attention pointer around the grid and checking cell values.
// Out-of-bounds reads see the offscreen token, so evaluation is total.
//
// Canonical text form:
//   P := at_action_cell(C) | at_cell_with_value(V, C)
//   C := shifted((x,y), C) | scanning((x,y), C, C) | cell_is_value(V)

struct Condition;
using ConditionPtr = std::shared_ptr<const Condition>;

struct CellIs {
  CellValue value;
};

struct Shifted {
  Offset offset;
  ConditionPtr inner;
};

struct Scanning {
  Offset offset;
  ConditionPtr hit;   // satisfied first -> 1
  ConditionPtr miss;  // satisfied first -> 0
};

struct Condition {
  std::variant<CellIs, Shifted, Scanning> node;
};

ConditionPtr make_cell_is(CellValue v);
ConditionPtr make_shifted(Offset o, ConditionPtr inner);
ConditionPtr make_scanning(Offset o, ConditionPtr hit, ConditionPtr miss);

struct AtActionCell {
  ConditionPtr cond;
};

struct AtCellWithValue {
  CellValue value;
  ConditionPtr cond;
};

struct FeatureProgram {
  std::variant<AtActionCell, AtCellWithValue> node;

  bool attends_action() const { return std::holds_alternative<AtActionCell>(node); }
};

FeatureProgram make_at_action_cell(ConditionPtr cond);
FeatureProgram make_at_cell_with_value(CellValue v, ConditionPtr cond);

// Evaluates the program on (s, a). a must be within bounds. Scanning loops
// are capped at height+width+2 shifts, after which the scan reports 0; by
// then the pointer is far offscreen and every outcome is constant anyway.
bool evaluate(const FeatureProgram& f, const GridState& s, Action a);

bool evaluate_condition(const Condition& c, const GridState& s, int row, int col);

// Number of method nodes (the five primitives) in the program.
int program_size(const FeatureProgram& f);

// Longest primitive chain from the root, counting the root.
int program_depth(const FeatureProgram& f);

std::string print_program(const FeatureProgram& f, const Vocabulary& vocab);

struct DslSyntaxError : std::runtime_error {
  DslSyntaxError(const std::string& msg, std::size_t position)
      : std::runtime_error(msg + " (at offset " + std::to_string(position) + ")"),
        position(position) {}
  std::size_t position;
};

// Parses the canonical text form; accepts arbitrary whitespace between
// tokens. print_program(parse_program(text)) is the identity on canonical
// text, and parse of a printed program returns an equal AST.
FeatureProgram parse_program(const std::string& text, const Vocabulary& vocab);

bool programs_equal(const FeatureProgram& a, const FeatureProgram& b);

}  // namespace lpp
