#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "treelogic/tree.hpp"

namespace treelogic {

using StateId = uint32_t;
using Bits = uint64_t;

// Ranked, bitvector-labeled alphabet.  A symbol is a bitvector over the
// label bits followed by the variable bits (labels occupy bit positions
// 0..labels.size()-1, variables the positions after them), together with
// an arity in 0..max_branching.
struct RankedAlphabet {
  std::vector<std::string> labels;
  std::vector<std::string> variables;
  uint32_t max_branching = 1;

  std::size_t bit_count() const { return labels.size() + variables.size(); }
  std::optional<std::size_t> bit_index(const std::string& name) const;
  const std::string& bit_name(std::size_t index) const;
  // All bit names in bit order; doubles as the label universe of witness
  // trees.
  std::vector<std::string> bit_names() const;

  bool operator==(const RankedAlphabet&) const = default;
};

struct Transition {
  Bits bits = 0;
  std::vector<StateId> children;  // size == arity
  StateId target = 0;

  bool operator==(const Transition&) const = default;
  auto operator<=>(const Transition&) const = default;
};

// Nondeterministic bottom-up tree automaton with an explicit transition
// table.  `deterministic` must be accurate (at most one target per
// (symbol, child-state tuple)); `complete` is a cached hint used to skip
// needless determinization and may safely be false.
struct TreeAutomaton {
  RankedAlphabet alphabet;
  StateId num_states = 0;
  std::vector<Transition> transitions;
  std::vector<StateId> final_states;
  bool deterministic = false;
  bool complete = false;

  void canonicalize();    // sort transitions and final states
  void validate() const;  // checks ids, arities, bit ranges, and the flag
};

struct AutomatonOptions {
  std::size_t state_cap = 1'000'000;
};

// True iff some bottom-up run reaches a final state at the root.  Throws
// Error if the tree branches wider than the alphabet's bound or carries a
// label that is not an alphabet bit.
bool run(const TreeAutomaton& aut, const LabeledTree& tree);

// Language intersection via the product construction.  Alphabets must be
// identical (same bit layout and branching bound).
TreeAutomaton product(const TreeAutomaton& a, const TreeAutomaton& b,
                      const AutomatonOptions& opts = {});

// Language union (disjoint sum; result is nondeterministic).
TreeAutomaton lang_union(const TreeAutomaton& a, const TreeAutomaton& b);

// Subset construction; the result is deterministic and complete.
TreeAutomaton determinize(const TreeAutomaton& a,
                          const AutomatonOptions& opts = {});

// All trees over the alphabet (branching within bound) not accepted by a.
TreeAutomaton complement(const TreeAutomaton& a,
                         const AutomatonOptions& opts = {});

// Erases one bit from every symbol: the language becomes the image of
// L(a) under removal of that bit.
TreeAutomaton project(const TreeAutomaton& a, const std::string& bit);

// Cylindrification: adds a variable bit (inserted at its sorted position
// among the variable bits) on which the language does not depend.
TreeAutomaton add_variable_bit(const TreeAutomaton& a,
                               const std::string& name);

// Drops states that are unreachable bottom-up or useless (never part of an
// accepting run).  Preserves the language but not completeness.
TreeAutomaton trim(const TreeAutomaton& a);

bool is_empty(const TreeAutomaton& a);

// A witness of minimum node count, or nothing if the language is empty.
// Ties are broken by the tree enumeration order over the alphabet's bit
// names (falling back to a deterministic reconstruction from the size
// table when enumeration would be too wide to be practical).
std::optional<LabeledTree> minimal_witness(const TreeAutomaton& a);

struct EquivalenceResult {
  bool equivalent = false;
  std::optional<LabeledTree> counterexample;
};

EquivalenceResult equivalent(const TreeAutomaton& a, const TreeAutomaton& b,
                             const AutomatonOptions& opts = {});

// Stable text format, versioned with "format_version".
std::string automaton_to_text(const TreeAutomaton& a);
TreeAutomaton automaton_from_text(const std::string& text);

}  // namespace treelogic
