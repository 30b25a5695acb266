#include <doctest.h>

#include "treelogic/compile.hpp"
#include "treelogic/error.hpp"
#include "treelogic/eval.hpp"
#include "treelogic/expand.hpp"
#include "treelogic/syntax.hpp"

using namespace treelogic;

namespace {

Theory theory_ab() {
  Theory t;
  t.add_label("A");
  t.add_label("B");
  return t;
}

// The central oracle: automaton and checker agree on every small tree.
void check_agreement(const Theory& t, const char* text,
                     std::size_t max_nodes = 5) {
  FormulaPtr f = parse_formula(text, t);
  TreeAutomaton aut = compile(t, f, 2);
  Evaluator ev(t, f);
  TreeEnumerator en(max_nodes, 2, t.labels());
  while (auto tree = en.next()) {
    TreeContext ctx(*tree);
    CAPTURE(text);
    CAPTURE(print_tree(*tree));
    CHECK(run(aut, *tree) == ev.eval(ctx));
  }
}

}  // namespace

TEST_CASE("compile a label atom under an existential") {
  Theory t = theory_ab();
  TreeAutomaton a = compile(t, parse_formula("ex x. A(x)", t), 2);
  CHECK(a.alphabet.labels == std::vector<std::string>{"A", "B"});
  CHECK(a.alphabet.variables.empty());
  CHECK(run(a, parse_tree("({A})")));
  CHECK_FALSE(run(a, parse_tree("({})")));
  CHECK(run(a, parse_tree("({B} ({}) ({B,A}))")));
  auto w = minimal_witness(a);
  REQUIRE(w);
  CHECK(w->size() == 1);
  CHECK(print_tree(*w) == "({A})");
}

TEST_CASE("compile false yields the empty language") {
  Theory t = theory_ab();
  TreeAutomaton a = compile(t, parse_formula("ex x. !(x = x)", t), 2);
  CHECK(is_empty(a));
  CHECK_FALSE(minimal_witness(a));
  TreeEnumerator en(4, 2, {"A", "B"});
  while (auto tree = en.next()) CHECK_FALSE(run(a, *tree));
}

TEST_CASE("atoms against the checker, exhaustively") {
  Theory t = theory_ab();
  check_agreement(t, "ex x. ex y. idom(x,y)");
  check_agreement(t, "ex x. ex y. dom(x,y)");
  check_agreement(t, "ex x. ex y. prec(x,y)");
  check_agreement(t, "ex x. ex y. (dom(x,y) & !x = y)");
  check_agreement(t, "ex x. ex y. x = y");
  check_agreement(t, "all x. all y. (idom(x,y) -> dom(x,y))");
  check_agreement(t, "all x. all y. (prec(x,y) -> !dom(x,y))");
}

TEST_CASE("connectives against the checker") {
  Theory t = theory_ab();
  check_agreement(t, "ex x. (A(x) & B(x))");
  check_agreement(t, "ex x. (A(x) | B(x))");
  check_agreement(t, "all x. (A(x) -> B(x))");
  check_agreement(t, "all x. (A(x) <-> !B(x))");
  check_agreement(t, "ex x. !(A(x) | B(x))");
}

TEST_CASE("second-order quantification against the checker") {
  Theory t = theory_ab();
  check_agreement(t, "Ex X. all x. X(x)", 4);
  check_agreement(t, "Ex X. ((ex x. X(x)) & (all x. (X(x) -> A(x))))", 4);
  check_agreement(t,
                  "All X. ((all x. (X(x) -> A(x))) -> (all x. (X(x) -> (A(x) "
                  "| B(x)))))",
                  4);
  check_agreement(
      t, "Ex X. All Y. ((all x. (Y(x) -> X(x))) | (ex x. (Y(x) & !X(x))))",
      4);
}

TEST_CASE("vacuous quantification") {
  Theory t = theory_ab();
  check_agreement(t, "ex x. ex y. A(y)", 4);
  check_agreement(t, "Ex X. ex y. A(y)", 4);
  check_agreement(t, "all x. ex y. dom(y,x)", 4);
}

TEST_CASE("exists-unique compiles through expansion") {
  Theory t = theory_ab();
  check_agreement(t, "ex! x. A(x)", 4);
}

TEST_CASE("defined predicates compile through expansion") {
  Theory t = theory_ab();
  Definition leaf;
  leaf.name = "Leaf";
  leaf.params = {{"x", Sort::Node}};
  leaf.body = parse_formula("!(ex y. idom(x,y))", t, {{"x", Sort::Node}});
  t.add_definition(leaf);
  check_agreement(t, "all x. (Leaf(x) -> (A(x) | B(x)))", 4);
}

TEST_CASE("projection of the compile intermediate matches the quantifier") {
  Theory t = theory_ab();
  TreeAutomaton open_a =
      compile_open(t, parse_formula("A(x)", t, {{"x", Sort::Node}}), 2);
  CHECK(open_a.alphabet.variables == std::vector<std::string>{"x"});
  TreeAutomaton projected = project(open_a, "x");
  TreeAutomaton closed = compile(t, parse_formula("ex x. A(x)", t), 2);
  CHECK(equivalent(projected, closed).equivalent);
}

TEST_CASE("compiling the negation-normal form is equivalent") {
  Theory t = theory_ab();
  for (const char* text :
       {"all x. (A(x) -> ex y. (idom(x,y) & B(y)))",
        "ex x. !(A(x) | ex y. prec(x,y))",
        "Ex X. ((ex x. X(x)) & (all x. (X(x) -> A(x))))"}) {
    FormulaPtr f = parse_formula(text, t);
    FormulaPtr nnf = to_nnf(expand(t, f));
    EquivalenceResult eq = equivalent(compile(t, f, 2), compile(t, nnf, 2));
    CAPTURE(text);
    CHECK(eq.equivalent);
  }
}

TEST_CASE("compile rejects bad inputs") {
  Theory t = theory_ab();
  CHECK_THROWS_AS(compile(t, parse_formula("ex x. A(x)", t), 0), Error);
  CHECK_THROWS_AS(
      compile(t, parse_formula("A(x)", t, {{"x", Sort::Node}}), 2),
      SortError);
  Theory with_const = theory_ab();
  with_const.add_constant("c");
  CHECK_THROWS_AS(compile(with_const, parse_formula("A(c)", with_const), 2),
                  Error);
}

TEST_CASE("state cap aborts oversized constructions") {
  Theory t = theory_ab();
  CompileOptions tiny;
  tiny.state_cap = 2;
  CHECK_THROWS_AS(
      compile(t,
              parse_formula(
                  "All X. All Y. ((ex x. (X(x) & !Y(x))) | all x. X(x))", t),
              2, tiny),
      BudgetExceeded);
}

TEST_CASE("branching-1 compilation") {
  Theory t = theory_ab();
  FormulaPtr f = parse_formula("ex x. ex y. (idom(x,y) & A(y))", t);
  TreeAutomaton a = compile(t, f, 1);
  TreeEnumerator en(5, 1, {"A", "B"});
  Evaluator ev(t, f);
  while (auto tree = en.next()) {
    TreeContext ctx(*tree);
    CHECK(run(a, *tree) == ev.eval(ctx));
  }
}
