#pragma once

#include <string>
#include <vector>

#include "treelogic/formula.hpp"

namespace treelogic {

struct Production {
  std::string lhs;
  std::vector<std::string> rhs;  // nonempty, over nonterminals + terminals
};

struct Grammar {
  std::vector<std::string> nonterminals;
  std::vector<std::string> terminals;
  std::string start;
  std::vector<Production> productions;

  void validate() const;  // throws Error on malformed grammars
};

// A theory whose models are exactly the derivation trees of g: the root
// carries the start symbol, every node exactly one symbol, internal nodes
// with their children match some production (one Rule<i> definition per
// production, in the Children pattern), terminal nodes are leaves and
// nonterminal nodes are internal.  Throws if a right-hand side is longer
// than k.
Theory cfg_to_theory(const Grammar& g, uint32_t k);

}  // namespace treelogic
