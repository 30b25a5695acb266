#pragma once

#include "treelogic/automaton.hpp"
#include "treelogic/formula.hpp"

namespace treelogic {

struct CompileOptions {
  std::size_t state_cap = 1'000'000;
};

// Compiles a closed formula to a bottom-up tree automaton over the
// theory's labels that accepts exactly the labeled trees of branching at
// most k satisfying the formula.  The formula is expanded, pushed to a
// core of atoms / conjunction / negation / existential quantification,
// node variables are encoded as singleton sets, and the automaton is
// assembled by product, complementation (determinizing as needed), and
// bit projection.  Constants must have been eliminated first.
TreeAutomaton compile(const Theory& theory, const FormulaPtr& f, uint32_t k,
                      const CompileOptions& opts = {});

// Same construction for a formula with free variables: each free variable
// becomes an alphabet bit (sorted by name after the label bits).  For free
// node variables the result is meaningful on annotations whose bit is a
// singleton; binding quantifiers add that constraint themselves.
TreeAutomaton compile_open(const Theory& theory, const FormulaPtr& f,
                           uint32_t k, const CompileOptions& opts = {});

// The three-state automaton forcing `bit` to hold at exactly one node.
TreeAutomaton singleton_automaton(const RankedAlphabet& alphabet,
                                  const std::string& bit);

}  // namespace treelogic
