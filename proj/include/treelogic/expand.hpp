#pragma once

#include <map>
#include <string>

#include "treelogic/formula.hpp"

namespace treelogic {

// Resolves every defined-predicate application by capture-avoiding
// substitution and desugars exists-unique.  The result contains no Apply
// and no ExistsUnique nodes.  Throws SortError on undefined predicates,
// arity/sort mismatches, and cyclic definitions.  Idempotent.
FormulaPtr expand(const Theory& theory, const FormulaPtr& f);

// Capture-avoiding simultaneous substitution of node terms for node
// variables and set-variable names for set variables.
FormulaPtr substitute(const FormulaPtr& f,
                      const std::map<std::string, NodeTerm>& node_subst,
                      const std::map<std::string, std::string>& set_subst);

// Reinterprets constants as existentially bound variables: the output
// theory declares no constants, and its single combined axiom is the
// existential closure of the conjunction of the input's axioms.  Theories
// without constants are returned unchanged.  A tree satisfies the output
// iff some constant interpretation makes it satisfy the input.
Theory eliminate_constants(const Theory& theory);

// Negation normal form: negations pushed to atoms, Implies/Iff/ExistsUnique
// rewritten away.  Input must already be expanded.
FormulaPtr to_nnf(const FormulaPtr& f);

}  // namespace treelogic
