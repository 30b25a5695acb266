#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "treelogic/formula.hpp"
#include "treelogic/tree.hpp"

namespace treelogic {

// Partial assignment of node variables to addresses and set variables to
// address sets.  All addresses must lie in the tree's domain at evaluation
// time.
struct Valuation {
  std::map<std::string, GornAddress> node_bindings;
  std::map<std::string, std::set<GornAddress>> set_bindings;
};

struct EvalOptions {
  // Set quantifiers enumerate all 2^n subsets; trees larger than this
  // signal BudgetExceeded instead of hanging.
  std::size_t node_budget = 20;
};

// Per-tree relation tables shared across evaluations of many formulas.
class TreeContext {
 public:
  explicit TreeContext(const LabeledTree& tree);
  const LabeledTree& tree() const { return *tree_; }

 private:
  friend class Evaluator;
  const LabeledTree* tree_;
  std::size_t n_;
  uint64_t id_;  // unique per context; invalidates evaluator memo tables
  std::vector<uint8_t> idom_, dom_, prec_;          // n*n matrices
  std::map<std::string, std::vector<uint8_t>> label_rows_;
  std::vector<uint8_t> empty_row_;
};

// Compiles an expanded formula once and evaluates it on trees.  Reuse
// across trees and valuations; not safe for concurrent use of a single
// instance (memoization state), but distinct instances are independent.
class Evaluator {
 public:
  Evaluator(const Theory& theory, FormulaPtr formula, EvalOptions opts = {});
  ~Evaluator();
  Evaluator(Evaluator&&) noexcept;
  Evaluator& operator=(Evaluator&&) noexcept;

  bool eval(const TreeContext& ctx, const Valuation& v = {});

  // Order and sorts of the formula's free variables (name-sorted).
  const std::vector<std::pair<std::string, Sort>>& free_slots() const;

  // Fast path: values[i] corresponds to free_slots()[i]; node variables
  // take a node index, set variables a bitmask over node indices.
  bool eval_raw(const TreeContext& ctx, const std::vector<uint64_t>& values);

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

// Standard Tarskian evaluation of `f` (expanded on the fly) on `tree`.
// Throws SortError on sort errors, Error on unbound variables or addresses
// outside the domain, BudgetExceeded past the subset budget.
bool eval(const LabeledTree& tree, const Theory& theory, const FormulaPtr& f,
          const Valuation& v = {}, const EvalOptions& opts = {});

struct SatisfactionResult {
  bool satisfied = true;
  // Index into the axiom list of the constant-eliminated theory.
  std::optional<std::size_t> failing_axiom;
};

// True iff every axiom holds after constant elimination; stops at the
// first failing axiom and reports which.
SatisfactionResult satisfies(const LabeledTree& tree, const Theory& theory,
                             const EvalOptions& opts = {});

struct FreeVarSpec {
  std::string name;
  Sort sort;
};

// Exactly the valuations over `vars` making `f` true, enumerated
// deterministically: variables vary in the given order with the last
// varying fastest; node variables run over addresses in domain order, set
// variables over subsets in ascending bitmask order.  `vars` must name
// exactly the free variables of `f`.
std::vector<Valuation> find_assignments(const LabeledTree& tree,
                                        const Theory& theory,
                                        const FormulaPtr& f,
                                        const std::vector<FreeVarSpec>& vars,
                                        const EvalOptions& opts = {});

}  // namespace treelogic
