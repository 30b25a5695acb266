#include <doctest.h>

#include <algorithm>
#include <set>

#include "treelogic/error.hpp"
#include "treelogic/tree.hpp"

using namespace treelogic;

namespace {

GornAddress addr(std::vector<uint32_t> path) {
  return GornAddress(std::move(path));
}

LabeledTree chain(std::size_t depth) {
  std::vector<GornAddress> dom;
  std::vector<uint32_t> path;
  dom.push_back(GornAddress::root());
  for (std::size_t i = 1; i < depth; ++i) {
    path.push_back(0);
    dom.push_back(GornAddress(path));
  }
  return LabeledTree(dom);
}

// Brute-force count of labeled trees: every subset of all candidate
// address sets that forms a tree domain, times labelings.
std::size_t brute_force_tree_count(std::size_t max_nodes, uint32_t k,
                                   std::size_t label_count) {
  // Candidate addresses: every address with entries < k and depth <
  // max_nodes.
  std::vector<GornAddress> candidates;
  auto gen = [&](auto&& self, const GornAddress& base) -> void {
    candidates.push_back(base);
    if (base.depth() + 1 >= max_nodes) return;
    for (uint32_t i = 0; i < k; ++i) self(self, base.child(i));
  };
  gen(gen, GornAddress::root());
  std::size_t count = 0;
  std::size_t total = std::size_t{1} << candidates.size();
  for (std::size_t mask = 0; mask < total; ++mask) {
    std::vector<GornAddress> dom;
    for (std::size_t i = 0; i < candidates.size(); ++i)
      if ((mask >> i) & 1) dom.push_back(candidates[i]);
    if (dom.empty() || dom.size() > max_nodes) continue;
    if (!is_tree_domain(dom)) continue;
    std::size_t labelings = 1;
    for (std::size_t i = 0; i < dom.size(); ++i)
      labelings *= std::size_t{1} << label_count;
    count += labelings;
  }
  return count;
}

}  // namespace

TEST_CASE("tree domain recognition") {
  CHECK(is_tree_domain({GornAddress::root()}));
  CHECK(is_tree_domain({GornAddress::root(), addr({0}), addr({1})}));
  // Left-sibling closure forces the presence of child 0.
  CHECK_FALSE(is_tree_domain({GornAddress::root(), addr({1})}));
  CHECK_FALSE(is_tree_domain({}));
  CHECK_FALSE(is_tree_domain({addr({0})}));
  CHECK(is_tree_domain(
      {GornAddress::root(), addr({0}), addr({0, 0}), addr({0, 1})}));
  CHECK_FALSE(is_tree_domain({GornAddress::root(), addr({0, 0})}));
}

TEST_CASE("tree construction validates invariants") {
  CHECK_THROWS_AS(LabeledTree({addr({1})}), Error);
  CHECK_THROWS_AS(LabeledTree({GornAddress::root()}, {{addr({0}), {"A"}}}),
                  Error);
  CHECK_THROWS_AS(
      LabeledTree({GornAddress::root()}, {}, {{"c", addr({0})}}), Error);
  LabeledTree t({GornAddress::root(), addr({0})}, {{addr({0}), {"A"}}},
                {{"c", addr({0})}});
  CHECK(t.size() == 2);
  CHECK(t.has_label(1, "A"));
  CHECK(t.constant("c") == addr({0}));
  CHECK(t.constant("d") == std::nullopt);
}

TEST_CASE("relations basic cases") {
  // Five-node tree: root, 0, 1, 1.0, 1.1
  LabeledTree t({GornAddress::root(), addr({0}), addr({1}), addr({1, 0}),
                 addr({1, 1})});
  GornAddress root = GornAddress::root();

  CHECK(relation(t, Rel::Dom, root, root));  // reflexive
  CHECK(relation(t, Rel::Idom, root, addr({0})));
  CHECK_FALSE(relation(t, Rel::Idom, root, addr({1, 0})));
  CHECK(relation(t, Rel::Prec, addr({0}), addr({1, 0})));
  CHECK_FALSE(relation(t, Rel::Prec, addr({1}), addr({1, 0})));
  CHECK(relation(t, Rel::Eq, addr({1}), addr({1})));
  CHECK_THROWS_AS(relation(t, Rel::Dom, addr({7}), root), Error);
}

TEST_CASE("prec agrees with the address definition on all pairs") {
  LabeledTree t({GornAddress::root(), addr({0}), addr({1}), addr({1, 0}),
                 addr({1, 1})});
  for (std::size_t i = 0; i < t.size(); ++i) {
    for (std::size_t j = 0; j < t.size(); ++j) {
      const GornAddress& x = t.node(i);
      const GornAddress& y = t.node(j);
      bool dom_xy = x.is_prefix_of(y);
      bool dom_yx = y.is_prefix_of(x);
      bool expected = false;
      if (!dom_xy && !dom_yx) {
        const auto& px = x.path();
        const auto& py = y.path();
        for (std::size_t d = 0; d < std::min(px.size(), py.size()); ++d) {
          if (px[d] != py[d]) {
            expected = px[d] < py[d];
            break;
          }
        }
      }
      CHECK(relation(t, Rel::Prec, x, y) == expected);
    }
  }
}

TEST_CASE("exhaustiveness: exactly one of dom/dom/prec/prec for distinct") {
  TreeEnumerator en(5, 3, {});
  while (auto t = en.next()) {
    for (std::size_t i = 0; i < t->size(); ++i) {
      for (std::size_t j = 0; j < t->size(); ++j) {
        if (i == j) continue;
        const GornAddress& x = t->node(i);
        const GornAddress& y = t->node(j);
        int holds = relation(*t, Rel::Dom, x, y) +
                    relation(*t, Rel::Dom, y, x) +
                    relation(*t, Rel::Prec, x, y) +
                    relation(*t, Rel::Prec, y, x);
        CHECK(holds == 1);
      }
    }
  }
}

TEST_CASE("relation algebra on enumerated trees") {
  TreeEnumerator en(5, 2, {});
  while (auto t = en.next()) {
    std::size_t n = t->size();
    for (std::size_t i = 0; i < n; ++i) {
      const GornAddress& x = t->node(i);
      CHECK(relation(*t, Rel::Dom, x, x));
      CHECK_FALSE(relation(*t, Rel::Prec, x, x));
      for (std::size_t j = 0; j < n; ++j) {
        const GornAddress& y = t->node(j);
        if (relation(*t, Rel::Idom, x, y)) CHECK(relation(*t, Rel::Dom, x, y));
        if (relation(*t, Rel::Dom, x, y) && relation(*t, Rel::Dom, y, x))
          CHECK(x == y);
        for (std::size_t l = 0; l < n; ++l) {
          const GornAddress& z = t->node(l);
          if (relation(*t, Rel::Dom, x, y) && relation(*t, Rel::Dom, y, z))
            CHECK(relation(*t, Rel::Dom, x, z));
          if (relation(*t, Rel::Prec, x, y) && relation(*t, Rel::Prec, y, z))
            CHECK(relation(*t, Rel::Prec, x, z));
        }
      }
    }
  }
}

TEST_CASE("prec is inherited downward") {
  TreeEnumerator en(6, 2, {});
  while (auto t = en.next()) {
    std::size_t n = t->size();
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        if (!relation(*t, Rel::Prec, t->node(i), t->node(j))) continue;
        for (std::size_t a = 0; a < n; ++a)
          for (std::size_t b = 0; b < n; ++b) {
            if (relation(*t, Rel::Dom, t->node(i), t->node(a)) &&
                relation(*t, Rel::Dom, t->node(j), t->node(b)))
              CHECK(relation(*t, Rel::Prec, t->node(a), t->node(b)));
          }
      }
  }
}

TEST_CASE("enumeration: counts from the examples") {
  auto count = [](std::size_t n, uint32_t k,
                  std::vector<std::string> labels) {
    TreeEnumerator en(n, k, std::move(labels));
    std::size_t c = 0;
    while (en.next()) ++c;
    return c;
  };
  CHECK(count(3, 2, {}) == 4);
  CHECK(count(1, 5, {"A"}) == 2);
  // One- and two-node chains with subsets of one label: 2 + 4.
  CHECK(count(2, 1, {"A"}) == 6);
}

TEST_CASE("enumeration matches brute force over address sets") {
  for (uint32_t k = 1; k <= 2; ++k) {
    for (std::size_t n = 1; n <= 4; ++n) {
      for (std::size_t labels = 0; labels <= 1; ++labels) {
        TreeEnumerator en(n, k,
                          labels ? std::vector<std::string>{"A"}
                                 : std::vector<std::string>{});
        std::size_t c = 0;
        while (en.next()) ++c;
        CHECK(c == brute_force_tree_count(n, k, labels));
      }
    }
  }
}

TEST_CASE("enumeration yields no duplicates and respects bounds") {
  TreeEnumerator en(5, 2, {"A"});
  std::set<std::string> seen;
  std::size_t count = 0;
  while (auto t = en.next()) {
    ++count;
    CHECK(t->size() <= 5);
    CHECK(t->branching() <= 2);
    std::string key;
    for (std::size_t i = 0; i < t->size(); ++i) {
      key += t->node(i).to_string() + "[";
      for (const auto& l : t->labels_at(i)) key += l;
      key += "]";
    }
    CHECK(seen.insert(key).second);
  }
  CHECK(count == seen.size());
}

TEST_CASE("first trees of the enumeration are in documented order") {
  TreeEnumerator en(3, 2, {});
  auto t1 = en.next();
  REQUIRE(t1);
  CHECK(t1->size() == 1);
  auto t2 = en.next();
  REQUIRE(t2);
  CHECK(t2->size() == 2);
  auto t3 = en.next();
  REQUIRE(t3);
  CHECK(t3->size() == 3);
  CHECK(t3->branching() == 1);  // chain before branching shape
  auto t4 = en.next();
  REQUIRE(t4);
  CHECK(t4->size() == 3);
  CHECK(t4->branching() == 2);
  CHECK_FALSE(en.next());
}
