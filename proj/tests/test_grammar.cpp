#include <doctest.h>

#include "treelogic/compile.hpp"
#include "treelogic/error.hpp"
#include "treelogic/eval.hpp"
#include "treelogic/expand.hpp"
#include "treelogic/grammar.hpp"
#include "treelogic/syntax.hpp"

#include "oracles.hpp"

using namespace treelogic;

namespace {

std::string tree_key(const LabeledTree& t) { return print_tree(t); }

// All single-label trees over `labels` within bounds that satisfy the
// theory.
std::set<std::string> satisfying_trees(const Theory& theory,
                                       const std::vector<std::string>& labels,
                                       std::size_t max_nodes, uint32_t k) {
  std::set<std::string> out;
  TreeEnumerator en(max_nodes, k, labels);
  while (auto t = en.next()) {
    if (satisfies(*t, theory).satisfied) out.insert(tree_key(*t));
  }
  return out;
}

}  // namespace

TEST_CASE("grammar validation") {
  Grammar g{{"S"}, {"a"}, "S", {{"S", {"a"}}}};
  CHECK_NOTHROW(g.validate());
  CHECK_THROWS_AS((Grammar{{"S"}, {}, "T", {}}.validate()), Error);
  CHECK_THROWS_AS((Grammar{{"S"}, {"S"}, "S", {}}.validate()), Error);
  CHECK_THROWS_AS((Grammar{{"S"}, {}, "S", {{"S", {}}}}.validate()), Error);
  CHECK_THROWS_AS((Grammar{{"S"}, {}, "S", {{"S", {"q"}}}}.validate()),
                  Error);
  CHECK_THROWS_AS(cfg_to_theory(Grammar{{"S"}, {"a", "b", "c"},
                                        "S",
                                        {{"S", {"a", "b", "c"}}}},
                                2),
                  Error);
}

TEST_CASE("S -> A B has exactly one 3-node model") {
  Grammar g{{"S"}, {"A", "B"}, "S", {{"S", {"A", "B"}}}};
  Theory theory = cfg_to_theory(g, 2);
  theory.validate();

  // Over all labelings (not only single-label trees), exactly one model.
  std::size_t models = 0;
  std::string found;
  TreeEnumerator en(3, 2, {"S", "A", "B"});
  while (auto t = en.next()) {
    if (satisfies(*t, theory).satisfied) {
      ++models;
      found = print_tree(*t);
    }
  }
  CHECK(models == 1);
  CHECK(found == "({S} ({A}) ({B}))");
}

TEST_CASE("single production to one terminal") {
  Grammar g{{"S"}, {"a"}, "S", {{"S", {"a"}}}};
  Theory theory = cfg_to_theory(g, 2);
  auto sat = satisfying_trees(theory, {"S", "a"}, 4, 2);
  CHECK(sat == std::set<std::string>{"({S} ({a}))"});
}

TEST_CASE("recursive grammar yields right-leaning combs") {
  Grammar g{{"S"}, {"A"}, "S", {{"S", {"A", "S"}}, {"S", {"A"}}}};
  Theory theory = cfg_to_theory(g, 2);

  auto derived = oracles::derivation_trees(g, 5);
  std::set<std::string> expected;
  for (const LabeledTree& t : derived) expected.insert(tree_key(t));
  // Hand count: S(A) has 2 nodes; S(A, S(A)) has 4 nodes.
  CHECK(expected.size() == 2);

  auto sat = satisfying_trees(theory, {"S", "A"}, 5, 2);
  CHECK(sat == expected);

  // Every derivation tree satisfies and is accepted by the compiled
  // automaton.
  Theory closed = eliminate_constants(theory);
  TreeAutomaton aut =
      compile(closed, Formula::conj_all(closed.axioms()), 2);
  for (const LabeledTree& t : derived) {
    CHECK(satisfies(t, theory).satisfied);
    CHECK(run(aut, t));
  }
}

TEST_CASE("derivation oracle agrees with satisfies over all small trees") {
  Grammar g{{"S"}, {"A"}, "S", {{"S", {"S", "S"}}, {"S", {"A"}}}};
  Theory theory = cfg_to_theory(g, 2);
  std::set<std::string> derived;
  for (const LabeledTree& t : oracles::derivation_trees(g, 6))
    derived.insert(tree_key(t));

  TreeEnumerator en(6, 2, {"S", "A"});
  while (auto t = en.next()) {
    bool expected = derived.count(tree_key(*t)) > 0;
    CHECK(satisfies(*t, theory).satisfied == expected);
  }
}

TEST_CASE("compiled grammar automaton has the right minimal witness") {
  Grammar g{{"S"}, {"A", "B"}, "S", {{"S", {"A", "B"}}}};
  Theory theory = cfg_to_theory(g, 2);
  TreeAutomaton aut =
      compile(theory, Formula::conj_all(theory.axioms()), 2);
  auto w = minimal_witness(aut);
  REQUIRE(w);
  CHECK(w->size() == 3);
  CHECK(print_tree(*w) == "({S} ({A}) ({B}))");
  CHECK(satisfies(*w, theory).satisfied);
}

TEST_CASE("nonterminals without productions can never occur") {
  Grammar g{{"S", "T"}, {"a"}, "S", {{"S", {"a"}}}};
  Theory theory = cfg_to_theory(g, 2);
  auto sat = satisfying_trees(theory, {"S", "T", "a"}, 4, 2);
  CHECK(sat == std::set<std::string>{"({S} ({a}))"});
}
