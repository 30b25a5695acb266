#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "treelogic/error.hpp"
#include "treelogic/eval.hpp"
#include "treelogic/formula.hpp"
#include "treelogic/gorn.hpp"
#include "treelogic/tree.hpp"

namespace treelogic {

// Label-driven configuration of the movement theory: which labels mark
// A-positions, specifiers, barriers, movement endpoints (Target = landing
// site, Base = origin, Trace = any moved-from position), heads, and
// rightward landing sites; which features F.Eq compares; and how many
// referential indices are distinguished (as plain labels Idx1..IdxN).
struct GbConfig {
  std::string a_pos = "Apos";
  std::string spec = "Spec";
  std::string barrier = "Barrier";
  std::string target = "Target";
  std::string base = "Base";
  std::string trace = "Trace";
  std::string head = "X0";
  std::string right_landing = "RLand";
  std::vector<std::string> agreement = {"WH", "F1", "F2"};
  std::size_t index_bound = 4;
  bool enable_a = true;
  bool enable_abar_nonref = true;
  bool enable_abar_ref = true;
  bool enable_head = true;
  bool enable_right = true;

  std::vector<std::string> index_labels() const;
  std::vector<std::string> all_labels() const;
  void validate() const;
};

GbConfig gb_config_from_json_text(const std::string& text);
std::string gb_config_to_json_text(const GbConfig& cfg);

// Branches, ProperDom, CCommands (first-branching-node c-command),
// Intervenes (strict dominance betweenness), InterveningBarrier, FEq
// (agreement biconditionals), and AbarAntecedentGoverns in the
// three-part shape: potential antecedent in an A-bar position, no
// intervening barrier, minimality respected.
std::vector<Definition> emit_gb_core(const GbConfig& cfg);

// The five link relations (each gated by the movement marker labels) and
// their names, in a fixed order.
std::vector<Definition> emit_link_types(const GbConfig& cfg);
std::vector<std::string> enabled_link_names(const GbConfig& cfg);

// Link(x,y): disjunction of the enabled link relations.
Definition emit_link(const GbConfig& cfg);

// Mutual exclusivity of the enabled link relations, as checkable axioms.
std::vector<FormulaPtr> link_exclusivity_axioms(const GbConfig& cfg);

// Chain(X): exactly one Target, exactly one Base, unique antecedent for
// every non-Target, unique successor for every non-Base, closure under
// Link in both directions.
Definition emit_chain(const GbConfig& cfg);

// Core definitions only (shipped as gb_core.thy).
Theory gb_core_theory(const GbConfig& cfg);
// Full fragment: core + links + Chain + well-formedness axioms (shipped
// as gb_english_fragment.thy).
Theory gb_theory(const GbConfig& cfg);

struct ChainEntry {
  std::vector<GornAddress> members;  // Link order, Target first
  std::string type;                  // one of the link names, or "mixed"
  bool trivial = false;
};

struct ChainReport {
  std::vector<ChainEntry> chains;
  uint32_t max_overlap = 1;
};

// The tree's chains do not partition its nodes; the input falls outside
// the licensed class.
class PartitionViolation : public Error {
 public:
  PartitionViolation(const std::string& message, GornAddress node)
      : Error(message), node_(std::move(node)) {}
  const GornAddress& node() const { return node_; }

 private:
  GornAddress node_;
};

// Enumerates every X satisfying Chain(X), checks that the chains cover
// every node exactly once, orders each chain from Target to Base, tags it
// with the link type connecting its members, and computes the maximum
// number of same-type chains whose span (the dominance interval from the
// chain's least common ancestor down to its members) covers any node.
// Trivial chains carry no type and never count toward overlap.
ChainReport chain_report(const LabeledTree& tree, const GbConfig& cfg,
                         const EvalOptions& opts = {});

}  // namespace treelogic
