#pragma once

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "treelogic/formula.hpp"

namespace treelogic {

// Feature literals on a rule position: labels the node must carry and
// labels it must not.
struct FeatureSpec {
  std::set<std::string> positive;
  std::set<std::string> negative;
};

// Immediate-dominance rule: a mother and an ordered sequence of daughters.
struct IdRule {
  std::string id;  // doubles as the emitted definition's name
  FeatureSpec mother;
  std::vector<FeatureSpec> daughters;
};

// A feature value: +f or -f.
struct FeatureLiteral {
  std::string feature;
  bool positive = true;
};

// One local-tree configuration in which two positions must agree on a
// feature.  Position 0 is the mother, positions 1..n the daughters.
struct LocalTreePattern {
  FeatureSpec mother;
  std::vector<FeatureSpec> daughters;
  std::size_t pos_a = 0;
  std::size_t pos_b = 1;
};

// The agreement configurations for one feature (the interface the
// agreement principles present: pairs of local-tree positions required to
// agree).  The emitted relation is symmetrized.
struct PropagationSpec {
  std::string feature;
  std::vector<LocalTreePattern> patterns;
};

// A feature default, optionally guarded: the literal must hold wherever
// the guard does, unless the node is privileged for that literal.
struct DefaultSpec {
  FeatureLiteral literal;
  std::optional<FeatureSpec> guard;
};

// Naming scheme for the per-literal definition families.
std::string literal_suffix(const FeatureLiteral& lit);  // "INV" / "not_INV"

// ID<id>(x, y1..yn) := Children<n>(x, ys) plus the label conjuncts of the
// rule.  The host theory must contain the Children definition of the
// matching arity (see children_definition).
Definition id_rule_to_definition(const IdRule& rule);

// Free_<lit>(x): the literal is compatible with the features x inherits
// from whichever rule position licenses it; nodes licensed by no daughter
// position (the root in particular) are free.
Definition build_free(const std::vector<IdRule>& rules,
                      const FeatureLiteral& lit);

// Subset(X,Y) := all x. (X(x) -> Y(x)).
Definition subset_definition();

// Emits Propagate_<f> from the patterns plus, for both literals +f and -f:
//   Pprime_<lit>(X)  := closure condition over non-free nodes and
//                       Propagate_<f>,
//   PrivSet_<lit>(X) := the smallest such set,
//   Privileged_<lit>(x) := membership in it.
// References Free_<lit> and Subset by name; the host theory must define
// them (build_free / subset_definition).
std::vector<Definition> emit_privilege(const std::string& feature,
                                       const PropagationSpec& prop);

// The default as an axiom: all x. (!Privileged_<lit>(x) -> lit(x)),
// guarded variants conjoin the guard on the left.
FormulaPtr fsd_to_axiom(const DefaultSpec& d);

// Shipped corpora.  gpsg_core_theory: Subset and Children1..3.
// gpsg_fsd_example_theory: a small grammar with an inverted-clause rule, a
// passive rule, head-feature propagation, and the two defaults -INV and
// BAR0 -> -PAS.
Theory gpsg_core_theory();
Theory gpsg_fsd_example_theory();
std::vector<IdRule> gpsg_example_rules();

}  // namespace treelogic
