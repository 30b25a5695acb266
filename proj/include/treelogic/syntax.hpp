#pragma once

#include <map>
#include <string>
#include <string_view>

#include "treelogic/error.hpp"
#include "treelogic/formula.hpp"
#include "treelogic/tree.hpp"

namespace treelogic {

// Theory file format:
//   label NAME;                  declare a monadic predicate
//   const NAME;                  declare an individual constant
//   def NAME(params) := FORMULA; define a predicate
//   axiom FORMULA;               add an axiom
// Formula syntax: idom(x,y), dom(x,y), prec(x,y), x = y, P(x), X(x);
// connectives ! & | -> <-> with that precedence (-> right-associative,
// <-> left-associative); quantifiers all/ex/ex! over node variables
// (lowercase first letter) and All/Ex over set variables (uppercase first
// letter), with bodies extending as far right as possible.  '#' starts a
// comment running to end of line.
Theory parse_theory(std::string_view text);

// Parses a single formula against declarations in `theory`; `free` lists
// pre-bound free variables with their sorts.
FormulaPtr parse_formula(std::string_view text, const Theory& theory,
                         const std::map<std::string, Sort>& free = {});

// Tree file format: s-expressions `({L1,L2} child child ...)`; the empty
// label set is written `({})`; `@c` after the label set binds constant c
// to that node.
LabeledTree parse_tree(std::string_view text);

// Canonical printers; parse(print(v)) == v for every value, and printing
// is idempotent on parsed text.
std::string print_theory(const Theory& theory);
std::string print_tree(const LabeledTree& tree);
std::string print_formula(const FormulaPtr& f);

}  // namespace treelogic
