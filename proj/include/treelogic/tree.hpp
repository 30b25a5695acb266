#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "treelogic/gorn.hpp"

namespace treelogic {

// True iff the addresses form a nonempty tree domain: prefix-closed and
// left-sibling-closed (u.i present implies u.j present for all j < i).
bool is_tree_domain(const std::vector<GornAddress>& addresses);

// A finite labeled tree domain.  Nodes may carry any number of labels
// (labels are non-exclusive); constants name distinguished nodes.
// Immutable after construction; the constructor validates all invariants.
class LabeledTree {
 public:
  using LabelSet = std::set<std::string>;

  explicit LabeledTree(std::vector<GornAddress> domain,
                       std::map<GornAddress, LabelSet> labels = {},
                       std::map<std::string, GornAddress> constants = {});

  std::size_t size() const { return nodes_.size(); }

  // Nodes in ascending address order (root first); this is the canonical
  // node numbering used throughout.
  const std::vector<GornAddress>& nodes() const { return nodes_; }
  const GornAddress& node(std::size_t i) const { return nodes_[i]; }

  bool contains(const GornAddress& a) const;
  std::size_t index_of(const GornAddress& a) const;  // throws if absent

  const LabelSet& labels_at(std::size_t i) const { return labels_[i]; }
  const LabelSet& labels_at(const GornAddress& a) const;
  bool has_label(std::size_t i, const std::string& label) const;

  const std::map<std::string, GornAddress>& constants() const {
    return constants_;
  }
  std::optional<GornAddress> constant(const std::string& name) const;

  std::optional<std::size_t> parent_of(std::size_t i) const;
  const std::vector<std::size_t>& children_of(std::size_t i) const {
    return children_[i];
  }
  uint32_t branching() const;  // maximum child count over all nodes

  bool operator==(const LabeledTree& other) const;

 private:
  std::vector<GornAddress> nodes_;
  std::vector<LabelSet> labels_;
  std::map<std::string, GornAddress> constants_;
  std::vector<std::vector<std::size_t>> children_;
  std::vector<std::optional<std::size_t>> parents_;
};

enum class Rel { Idom, Dom, Prec, Eq };

// The four signature relations.  dom is reflexive; prec holds only between
// dominance-incomparable nodes and compares the first differing child index.
// Throws Error if either address is outside the tree's domain.
bool relation(const LabeledTree& tree, Rel rel, const GornAddress& x,
              const GornAddress& y);

// Streams every labeled tree with min_nodes..max_nodes nodes, branching at
// most max_branching, and each node labeled with any subset of `labels`.
// The order is deterministic and documented: ascending node count; within a
// node count, shapes by ascending child count of the root, then by the
// lexicographically least child-size composition, then recursively; within a
// shape, labelings as an odometer over nodes in address order with the last
// node cycling fastest (subsets ordered by bitmask over the given label
// order).  Emptiness checks and witness extraction rely on this order.
class TreeEnumerator {
 public:
  TreeEnumerator(std::size_t max_nodes, uint32_t max_branching,
                 std::vector<std::string> labels);
  TreeEnumerator(std::size_t min_nodes, std::size_t max_nodes,
                 uint32_t max_branching, std::vector<std::string> labels);

  std::optional<LabeledTree> next();

 private:
  using Shape = std::vector<GornAddress>;

  const std::vector<Shape>& shapes_of(std::size_t n);
  bool advance_labeling();
  LabeledTree current_tree() const;
  bool seek_first(std::size_t from_size);

  std::size_t min_nodes_;
  std::size_t max_nodes_;
  uint32_t max_branching_;
  std::vector<std::string> labels_;
  std::vector<std::vector<Shape>> shape_cache_;  // by node count
  std::size_t cur_size_ = 0;
  std::size_t cur_shape_ = 0;
  std::vector<uint64_t> cur_masks_;
  bool done_ = false;
  bool started_ = false;
};

}  // namespace treelogic
