#include "treelogic/tree.hpp"

#include <algorithm>

#include "treelogic/error.hpp"

namespace treelogic {

bool is_tree_domain(const std::vector<GornAddress>& addresses) {
  if (addresses.empty()) return false;
  std::set<GornAddress> dom(addresses.begin(), addresses.end());
  for (const GornAddress& a : dom) {
    if (a.is_root()) continue;
    if (!dom.count(a.parent())) return false;
    if (a.last_index() > 0) {
      GornAddress left = a.parent().child(a.last_index() - 1);
      if (!dom.count(left)) return false;
    }
  }
  return true;
}

LabeledTree::LabeledTree(std::vector<GornAddress> domain,
                         std::map<GornAddress, LabelSet> labels,
                         std::map<std::string, GornAddress> constants)
    : constants_(std::move(constants)) {
  if (!is_tree_domain(domain)) throw Error("not a tree domain");
  std::sort(domain.begin(), domain.end());
  domain.erase(std::unique(domain.begin(), domain.end()), domain.end());
  nodes_ = std::move(domain);

  labels_.resize(nodes_.size());
  for (auto& [addr, set] : labels) {
    if (!std::binary_search(nodes_.begin(), nodes_.end(), addr))
      throw Error("label on address outside the tree domain: " +
                  addr.to_string());
    labels_[index_of(addr)] = set;
  }
  for (const auto& [name, addr] : constants_) {
    if (!std::binary_search(nodes_.begin(), nodes_.end(), addr))
      throw Error("constant '" + name + "' bound outside the tree domain");
  }

  parents_.resize(nodes_.size());
  children_.resize(nodes_.size());
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    if (nodes_[i].is_root()) continue;
    std::size_t p = index_of(nodes_[i].parent());
    parents_[i] = p;
    children_[p].push_back(i);
  }
  // Children of a node are contiguous in index order only by address order;
  // sort by child index so children_of lists them left to right.
  for (auto& cs : children_) {
    std::sort(cs.begin(), cs.end(), [&](std::size_t a, std::size_t b) {
      return nodes_[a].last_index() < nodes_[b].last_index();
    });
  }
}

bool LabeledTree::contains(const GornAddress& a) const {
  return std::binary_search(nodes_.begin(), nodes_.end(), a);
}

std::size_t LabeledTree::index_of(const GornAddress& a) const {
  auto it = std::lower_bound(nodes_.begin(), nodes_.end(), a);
  if (it == nodes_.end() || *it != a)
    throw Error("address not in tree domain: " + a.to_string());
  return static_cast<std::size_t>(it - nodes_.begin());
}

const LabeledTree::LabelSet& LabeledTree::labels_at(
    const GornAddress& a) const {
  return labels_[index_of(a)];
}

bool LabeledTree::has_label(std::size_t i, const std::string& label) const {
  return labels_[i].count(label) > 0;
}

std::optional<GornAddress> LabeledTree::constant(
    const std::string& name) const {
  auto it = constants_.find(name);
  if (it == constants_.end()) return std::nullopt;
  return it->second;
}

std::optional<std::size_t> LabeledTree::parent_of(std::size_t i) const {
  return parents_[i];
}

uint32_t LabeledTree::branching() const {
  std::size_t best = 0;
  for (const auto& cs : children_) best = std::max(best, cs.size());
  return static_cast<uint32_t>(best);
}

bool LabeledTree::operator==(const LabeledTree& other) const {
  return nodes_ == other.nodes_ && labels_ == other.labels_ &&
         constants_ == other.constants_;
}

bool relation(const LabeledTree& tree, Rel rel, const GornAddress& x,
              const GornAddress& y) {
  tree.index_of(x);
  tree.index_of(y);
  switch (rel) {
    case Rel::Eq:
      return x == y;
    case Rel::Idom:
      return y.depth() == x.depth() + 1 && x.is_prefix_of(y);
    case Rel::Dom:
      return x.is_prefix_of(y);
    case Rel::Prec: {
      if (x.is_prefix_of(y) || y.is_prefix_of(x)) return false;
      const auto& px = x.path();
      const auto& py = y.path();
      for (std::size_t i = 0; i < std::min(px.size(), py.size()); ++i) {
        if (px[i] != py[i]) return px[i] < py[i];
      }
      return false;  // unreachable: one would be a prefix of the other
    }
  }
  throw Error("unknown relation");
}

TreeEnumerator::TreeEnumerator(std::size_t max_nodes, uint32_t max_branching,
                               std::vector<std::string> labels)
    : TreeEnumerator(1, max_nodes, max_branching, std::move(labels)) {}

TreeEnumerator::TreeEnumerator(std::size_t min_nodes, std::size_t max_nodes,
                               uint32_t max_branching,
                               std::vector<std::string> labels)
    : min_nodes_(std::max<std::size_t>(1, min_nodes)),
      max_nodes_(max_nodes),
      max_branching_(max_branching),
      labels_(std::move(labels)) {
  if (labels_.size() > 63) throw Error("too many labels to enumerate");
}

const std::vector<TreeEnumerator::Shape>& TreeEnumerator::shapes_of(
    std::size_t n) {
  if (shape_cache_.size() <= n) shape_cache_.resize(n + 1);
  if (n == 0 || !shape_cache_[n].empty()) return shape_cache_[n];
  std::vector<Shape> out;
  if (n == 1) {
    out.push_back({GornAddress::root()});
  } else {
    // Root plus an ordered forest of m subtrees totalling n-1 nodes.
    std::size_t rest = n - 1;
    std::size_t max_m = std::min<std::size_t>(max_branching_, rest);
    for (std::size_t m = 1; m <= max_m; ++m) {
      // Compositions of rest into m positive parts, lexicographically.
      auto emit = [&](const std::vector<std::size_t>& sizes) {
        std::vector<std::size_t> pick(m, 0);
        while (true) {
          Shape shape = {GornAddress::root()};
          for (std::size_t c = 0; c < m; ++c) {
            const Shape& sub = shapes_of(sizes[c])[pick[c]];
            for (const GornAddress& a : sub) {
              std::vector<uint32_t> p;
              p.reserve(a.path().size() + 1);
              p.push_back(static_cast<uint32_t>(c));
              p.insert(p.end(), a.path().begin(), a.path().end());
              shape.emplace_back(std::move(p));
            }
          }
          std::sort(shape.begin(), shape.end());
          out.push_back(std::move(shape));
          // Odometer over child-shape choices; last child fastest.
          std::size_t c = m;
          while (c > 0) {
            --c;
            if (++pick[c] < shapes_of(sizes[c]).size()) break;
            pick[c] = 0;
            if (c == 0) return;
          }
        }
      };
      // Generate compositions recursively in lexicographic order.
      std::vector<std::size_t> sizes;
      auto rec = [&](auto&& self, std::size_t remaining,
                     std::size_t slots) -> void {
        if (slots == 1) {
          sizes.push_back(remaining);
          emit(sizes);
          sizes.pop_back();
          return;
        }
        for (std::size_t first = 1; first + (slots - 1) <= remaining;
             ++first) {
          sizes.push_back(first);
          self(self, remaining - first, slots - 1);
          sizes.pop_back();
        }
      };
      rec(rec, rest, m);
    }
  }
  shape_cache_[n] = std::move(out);
  return shape_cache_[n];
}

bool TreeEnumerator::seek_first(std::size_t from_size) {
  for (std::size_t n = from_size; n <= max_nodes_; ++n) {
    if (!shapes_of(n).empty()) {
      cur_size_ = n;
      cur_shape_ = 0;
      cur_masks_.assign(n, 0);
      return true;
    }
  }
  return false;
}

bool TreeEnumerator::advance_labeling() {
  const uint64_t limit = uint64_t{1} << labels_.size();
  std::size_t i = cur_masks_.size();
  while (i > 0) {
    --i;
    if (++cur_masks_[i] < limit) return true;
    cur_masks_[i] = 0;
  }
  return false;
}

LabeledTree TreeEnumerator::current_tree() const {
  const Shape& shape = shape_cache_[cur_size_][cur_shape_];
  std::map<GornAddress, LabeledTree::LabelSet> labels;
  for (std::size_t i = 0; i < shape.size(); ++i) {
    LabeledTree::LabelSet set;
    for (std::size_t b = 0; b < labels_.size(); ++b) {
      if (cur_masks_[i] & (uint64_t{1} << b)) set.insert(labels_[b]);
    }
    if (!set.empty()) labels[shape[i]] = std::move(set);
  }
  return LabeledTree(shape, std::move(labels));
}

std::optional<LabeledTree> TreeEnumerator::next() {
  if (done_) return std::nullopt;
  if (!started_) {
    started_ = true;
    if (min_nodes_ > max_nodes_ || !seek_first(min_nodes_)) {
      done_ = true;
      return std::nullopt;
    }
    return current_tree();
  }
  if (advance_labeling()) return current_tree();
  cur_masks_.assign(cur_size_, 0);
  if (++cur_shape_ < shape_cache_[cur_size_].size()) return current_tree();
  if (cur_size_ + 1 <= max_nodes_ && seek_first(cur_size_ + 1))
    return current_tree();
  done_ = true;
  return std::nullopt;
}

}  // namespace treelogic
