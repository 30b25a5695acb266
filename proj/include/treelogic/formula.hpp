#pragma once

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace treelogic {

enum class Sort { Node, Set };

// A node-sorted term: a variable or a declared constant.
struct NodeTerm {
  std::string name;
  bool is_constant = false;

  static NodeTerm var(std::string n) { return {std::move(n), false}; }
  static NodeTerm constant(std::string n) { return {std::move(n), true}; }

  bool operator==(const NodeTerm&) const = default;
  auto operator<=>(const NodeTerm&) const = default;
};

struct SetVar {
  std::string name;
  bool operator==(const SetVar&) const = default;
};

// Argument of a defined-predicate application.
using ApplyArg = std::variant<NodeTerm, SetVar>;

enum class FormulaKind {
  Idom,
  Dom,
  Prec,
  Eq,
  HasLabel,
  InSet,
  Not,
  And,
  Or,
  Implies,
  Iff,
  ExistsNode,
  ForallNode,
  ExistsUnique,
  ExistsSet,
  ForallSet,
  Apply,
};

struct Formula;
using FormulaPtr = std::shared_ptr<const Formula>;

// Immutable formula AST over the tree-logic signature.  Atoms use t1/t2
// (HasLabel and InSet use name + t1); connectives use f1/f2 (Not only f1);
// quantifiers bind `name` in f1; Apply carries `name` and `args`.
struct Formula {
  FormulaKind kind;
  NodeTerm t1, t2;
  std::string name;
  FormulaPtr f1, f2;
  std::vector<ApplyArg> args;

  static FormulaPtr idom(NodeTerm x, NodeTerm y);
  static FormulaPtr dom(NodeTerm x, NodeTerm y);
  static FormulaPtr prec(NodeTerm x, NodeTerm y);
  static FormulaPtr eq(NodeTerm x, NodeTerm y);
  static FormulaPtr has_label(std::string label, NodeTerm x);
  static FormulaPtr in_set(std::string set_var, NodeTerm x);
  static FormulaPtr negate(FormulaPtr f);
  static FormulaPtr conj(FormulaPtr a, FormulaPtr b);
  static FormulaPtr disj(FormulaPtr a, FormulaPtr b);
  static FormulaPtr implies(FormulaPtr a, FormulaPtr b);
  static FormulaPtr iff(FormulaPtr a, FormulaPtr b);
  static FormulaPtr exists_node(std::string var, FormulaPtr body);
  static FormulaPtr forall_node(std::string var, FormulaPtr body);
  static FormulaPtr exists_unique(std::string var, FormulaPtr body);
  static FormulaPtr exists_set(std::string var, FormulaPtr body);
  static FormulaPtr forall_set(std::string var, FormulaPtr body);
  static FormulaPtr apply(std::string def, std::vector<ApplyArg> args);

  // Right folds; both require a nonempty list.
  static FormulaPtr conj_all(std::vector<FormulaPtr> fs);
  static FormulaPtr disj_all(std::vector<FormulaPtr> fs);

  bool is_quantifier() const;
};

bool equal(const FormulaPtr& a, const FormulaPtr& b);

struct FreeVars {
  std::set<std::string> nodes;
  std::set<std::string> sets;

  bool empty() const { return nodes.empty() && sets.empty(); }
  bool operator==(const FreeVars&) const = default;
};

FreeVars free_vars(const FormulaPtr& f);

// All constant names occurring in a formula (as atom terms or Apply args).
std::set<std::string> constants_in(const FormulaPtr& f);

struct Definition {
  std::string name;
  std::vector<std::pair<std::string, Sort>> params;
  FormulaPtr body;
};

// Declarations, definitions, and axioms.  Names share one namespace:
// a name may be declared at most once across labels, constants, and
// definitions.  Definition bodies may not mention constants (eliminate
// constants at the axiom level instead).
class Theory {
 public:
  void add_label(std::string name);
  void add_constant(std::string name);
  void add_definition(Definition def);
  void add_axiom(FormulaPtr axiom);

  const std::vector<std::string>& labels() const { return labels_; }
  const std::vector<std::string>& constant_names() const {
    return constants_;
  }
  const std::vector<Definition>& definitions() const { return definitions_; }
  const std::vector<FormulaPtr>& axioms() const { return axioms_; }

  bool has_label(const std::string& name) const;
  bool has_constant(const std::string& name) const;
  const Definition* find_definition(const std::string& name) const;

  // Checks that every definition body sort-checks against its parameters,
  // contains no constants, and that every axiom is a closed sentence.
  void validate() const;

 private:
  void check_fresh(const std::string& name) const;

  std::vector<std::string> labels_;
  std::vector<std::string> constants_;
  std::vector<Definition> definitions_;
  std::map<std::string, std::size_t> def_index_;
  std::vector<FormulaPtr> axioms_;
};

// Verifies sorts, arities, and declaredness of every name in `f`.  Free
// variables must appear in `free` with the right sort.  Throws SortError.
void sort_check(const Theory& theory, const FormulaPtr& f,
                const std::map<std::string, Sort>& free = {});

// Children<n>(x, y1..yn): the children of x are exactly y1..yn in order.
// Emitted with idom and prec plus an exhaustivity clause.
Definition children_definition(std::size_t arity);
std::string children_name(std::size_t arity);

}  // namespace treelogic
