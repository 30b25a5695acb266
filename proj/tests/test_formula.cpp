#include <doctest.h>

#include "treelogic/error.hpp"
#include "treelogic/eval.hpp"
#include "treelogic/expand.hpp"
#include "treelogic/formula.hpp"
#include "treelogic/syntax.hpp"
#include "treelogic/tree.hpp"

using namespace treelogic;

namespace {

Theory theory_ab() {
  Theory t;
  t.add_label("A");
  t.add_label("B");
  return t;
}

}  // namespace

TEST_CASE("free variables") {
  Theory t = theory_ab();
  auto f1 = parse_formula("all x. X(x)", t, {{"X", Sort::Set}});
  CHECK(free_vars(f1).nodes.empty());
  CHECK(free_vars(f1).sets == std::set<std::string>{"X"});

  auto f2 = parse_formula("idom(x,y)", t,
                          {{"x", Sort::Node}, {"y", Sort::Node}});
  CHECK(free_vars(f2).nodes == std::set<std::string>{"x", "y"});
  CHECK(free_vars(f2).sets.empty());

  auto f3 = parse_formula("ex x. idom(x,y)", t, {{"y", Sort::Node}});
  CHECK(free_vars(f3).nodes == std::set<std::string>{"y"});
}

TEST_CASE("sort checking") {
  Theory t = theory_ab();
  CHECK_THROWS_AS(sort_check(t, Formula::has_label("C", NodeTerm::var("x"))),
                  SortError);
  // A name used both as a node and as a set variable.
  auto bad = Formula::conj(
      Formula::in_set("Z", NodeTerm::var("x")),
      Formula::eq(NodeTerm::var("Z"), NodeTerm::var("x")));
  CHECK_THROWS_AS(sort_check(t, bad), SortError);
  CHECK_THROWS_AS(sort_check(t, Formula::eq(NodeTerm::constant("c"),
                                            NodeTerm::var("x"))),
                  SortError);
}

TEST_CASE("expand substitutes definitions") {
  Theory t = theory_ab();
  Definition subset;
  subset.name = "Subset";
  subset.params = {{"X", Sort::Set}, {"Y", Sort::Set}};
  subset.body = parse_formula("all x. (X(x) -> Y(x))", t,
                              {{"X", Sort::Set}, {"Y", Sort::Set}});
  t.add_definition(subset);

  auto applied =
      Formula::apply("Subset", {ApplyArg(SetVar{"U"}), ApplyArg(SetVar{"V"})});
  auto expanded = expand(t, applied);
  auto expected = parse_formula("all x. (U(x) -> V(x))", t,
                                {{"U", Sort::Set}, {"V", Sort::Set}});
  CHECK(equal(expanded, expected));
}

TEST_CASE("expansion is capture avoiding") {
  Theory t = theory_ab();
  Definition d;
  d.name = "Above";
  d.params = {{"x", Sort::Node}};
  // Bound y inside the body must not capture the argument y.
  d.body = parse_formula("ex y. idom(y,x)", t, {{"x", Sort::Node}});
  t.add_definition(d);

  auto applied = Formula::apply("Above", {ApplyArg(NodeTerm::var("y"))});
  auto expanded = expand(t, applied);
  FreeVars fv = free_vars(expanded);
  CHECK(fv.nodes == std::set<std::string>{"y"});
  // The binder must have been renamed away from y.
  CHECK(expanded->kind == FormulaKind::ExistsNode);
  CHECK(expanded->name != "y");
}

TEST_CASE("exists-unique desugars") {
  Theory t = theory_ab();
  auto f = parse_formula("ex! x. A(x)", t);
  auto expanded = expand(t, f);
  CHECK(expanded->kind == FormulaKind::ExistsNode);
  CHECK(free_vars(expanded).empty());
  // Semantics: exactly one node labeled A.
  LabeledTree one_a({GornAddress::root(), GornAddress({0})},
                    {{GornAddress({0}), {"A"}}});
  LabeledTree two_a({GornAddress::root(), GornAddress({0})},
                    {{GornAddress::root(), {"A"}}, {GornAddress({0}), {"A"}}});
  LabeledTree no_a({GornAddress::root()});
  CHECK(eval(one_a, t, expanded));
  CHECK_FALSE(eval(two_a, t, expanded));
  CHECK_FALSE(eval(no_a, t, expanded));
  // The desugared form matches the standard shape.
  auto manual = parse_formula("ex x. (A(x) & all y. (A(y) -> y = x))", t);
  TreeEnumerator en(4, 2, {"A"});
  while (auto tree = en.next())
    CHECK(eval(*tree, t, expanded) == eval(*tree, t, manual));
}

TEST_CASE("cyclic definitions are rejected") {
  Theory t = theory_ab();
  Definition d;
  d.name = "D";
  d.params = {{"x", Sort::Node}};
  d.body = Formula::apply("D", {ApplyArg(NodeTerm::var("x"))});
  t.add_definition(d);
  CHECK_THROWS_AS(
      expand(t, Formula::apply("D", {ApplyArg(NodeTerm::var("x"))})),
      SortError);

  Theory t2 = theory_ab();
  Definition e1, e2;
  e1.name = "E1";
  e1.params = {{"x", Sort::Node}};
  e1.body = Formula::apply("E2", {ApplyArg(NodeTerm::var("x"))});
  e2.name = "E2";
  e2.params = {{"x", Sort::Node}};
  e2.body = Formula::apply("E1", {ApplyArg(NodeTerm::var("x"))});
  t2.add_definition(e1);
  t2.add_definition(e2);
  CHECK_THROWS_AS(
      expand(t2, Formula::apply("E1", {ApplyArg(NodeTerm::var("x"))})),
      SortError);
}

TEST_CASE("expand errors") {
  Theory t = theory_ab();
  CHECK_THROWS_AS(
      expand(t, Formula::apply("Nope", {ApplyArg(NodeTerm::var("x"))})),
      SortError);
  Definition d;
  d.name = "Two";
  d.params = {{"x", Sort::Node}, {"y", Sort::Node}};
  d.body = Formula::eq(NodeTerm::var("x"), NodeTerm::var("y"));
  t.add_definition(d);
  CHECK_THROWS_AS(
      expand(t, Formula::apply("Two", {ApplyArg(NodeTerm::var("x"))})),
      SortError);
  CHECK_THROWS_AS(expand(t, Formula::apply("Two", {ApplyArg(SetVar{"X"}),
                                                   ApplyArg(SetVar{"Y"})})),
                  SortError);
}

TEST_CASE("expand is idempotent") {
  Theory t = theory_ab();
  Definition subset;
  subset.name = "Subset";
  subset.params = {{"X", Sort::Set}, {"Y", Sort::Set}};
  subset.body = parse_formula("all x. (X(x) -> Y(x))", t,
                              {{"X", Sort::Set}, {"Y", Sort::Set}});
  t.add_definition(subset);
  for (const char* text :
       {"ex! x. A(x)", "All X. All Y. (Subset(X,Y) -> Subset(X,Y))",
        "ex x. (A(x) & ex y. (idom(x,y) | B(y)))"}) {
    auto f = parse_formula(text, t);
    auto once = expand(t, f);
    auto twice = expand(t, once);
    CHECK(equal(once, twice));
  }
}

TEST_CASE("expansion preserves semantics under eval") {
  Theory t = theory_ab();
  Definition leaf;
  leaf.name = "Leaf";
  leaf.params = {{"x", Sort::Node}};
  leaf.body = parse_formula("!(ex y. idom(x,y))", t, {{"x", Sort::Node}});
  t.add_definition(leaf);
  auto f = parse_formula("all x. (Leaf(x) -> (A(x) | !A(x)))", t);
  auto g = parse_formula("ex x. (Leaf(x) & A(x))", t);
  TreeEnumerator en(5, 2, {"A", "B"});
  while (auto tree = en.next()) {
    CHECK(eval(*tree, t, f) == eval(*tree, t, expand(t, f)));
    CHECK(eval(*tree, t, g) == eval(*tree, t, expand(t, g)));
  }
}

TEST_CASE("eliminate constants: no constants is identity") {
  Theory t = theory_ab();
  t.add_axiom(parse_formula("ex x. A(x)", t));
  Theory out = eliminate_constants(t);
  CHECK(out.constant_names().empty());
  REQUIRE(out.axioms().size() == 1);
  CHECK(equal(out.axioms()[0], t.axioms()[0]));
}

TEST_CASE("eliminate constants: single constant") {
  Theory t = theory_ab();
  t.add_constant("c");
  t.add_axiom(parse_formula("A(c)", t));
  Theory out = eliminate_constants(t);
  CHECK(out.constant_names().empty());
  REQUIRE(out.axioms().size() == 1);
  CHECK(equal(out.axioms()[0], parse_formula("ex c. A(c)", out)));
}

TEST_CASE("eliminate constants: shared witness, models coincide") {
  Theory t = theory_ab();
  t.add_constant("c");
  t.add_axiom(parse_formula("A(c)", t));
  t.add_axiom(parse_formula("B(c)", t));
  Theory out = eliminate_constants(t);
  REQUIRE(out.axioms().size() == 1);
  // Shared witness, not two independent quantifiers.
  CHECK(equal(out.axioms()[0], parse_formula("ex c. (A(c) & B(c))", out)));

  // A tree satisfies the output iff some constant interpretation makes it
  // satisfy the input: enumerate all 2-label trees up to 3 nodes.
  TreeEnumerator en(3, 2, {"A", "B"});
  while (auto tree = en.next()) {
    bool closed_ok = satisfies(*tree, out).satisfied;
    bool some_interp = false;
    for (std::size_t i = 0; i < tree->size() && !some_interp; ++i) {
      std::map<GornAddress, LabeledTree::LabelSet> ls;
      for (std::size_t j = 0; j < tree->size(); ++j)
        if (!tree->labels_at(j).empty()) ls[tree->node(j)] = tree->labels_at(j);
      LabeledTree with_c(std::vector<GornAddress>(tree->nodes()), ls,
                         {{"c", tree->node(i)}});
      if (satisfies(with_c, t).satisfied) some_interp = true;
    }
    CHECK(closed_ok == some_interp);
  }
}

TEST_CASE("constants are rejected in definition bodies") {
  Theory t = theory_ab();
  t.add_constant("c");
  Definition d;
  d.name = "NearC";
  d.params = {{"x", Sort::Node}};
  d.body = Formula::idom(NodeTerm::constant("c"), NodeTerm::var("x"));
  t.add_definition(d);
  CHECK_THROWS_AS(t.validate(), SortError);
}

TEST_CASE("to_nnf preserves semantics and normal form") {
  Theory t = theory_ab();
  for (const char* text :
       {"!(ex x. (A(x) & !B(x)))", "!(all x. (A(x) <-> B(x)))",
        "!(Ex X. all x. (X(x) -> A(x)))",
        "all x. !(A(x) -> (B(x) | !A(x)))"}) {
    auto f = parse_formula(text, t);
    auto nnf = to_nnf(expand(t, f));
    auto check_nnf = [](auto&& self, const FormulaPtr& g) -> bool {
      if (!g) return true;
      if (g->kind == FormulaKind::Not) {
        switch (g->f1->kind) {
          case FormulaKind::Idom:
          case FormulaKind::Dom:
          case FormulaKind::Prec:
          case FormulaKind::Eq:
          case FormulaKind::HasLabel:
          case FormulaKind::InSet:
            return true;
          default:
            return false;
        }
      }
      if (g->kind == FormulaKind::Implies || g->kind == FormulaKind::Iff)
        return false;
      return self(self, g->f1) && self(self, g->f2);
    };
    CHECK(check_nnf(check_nnf, nnf));
    TreeEnumerator en(4, 2, {"A", "B"});
    while (auto tree = en.next())
      CHECK(eval(*tree, t, f) == eval(*tree, t, nnf));
  }
}

TEST_CASE("children definition pins order and exhaustivity") {
  Theory t = theory_ab();
  t.add_definition(children_definition(2));
  auto f = Formula::apply(
      "Children2", {ApplyArg(NodeTerm::var("x")), ApplyArg(NodeTerm::var("y1")),
                    ApplyArg(NodeTerm::var("y2"))});
  std::vector<FreeVarSpec> vars = {
      {"x", Sort::Node}, {"y1", Sort::Node}, {"y2", Sort::Node}};

  LabeledTree two({GornAddress::root(), GornAddress({0}), GornAddress({1})});
  auto hits = find_assignments(two, t, f, vars);
  REQUIRE(hits.size() == 1);
  CHECK(hits[0].node_bindings.at("x") == GornAddress::root());
  CHECK(hits[0].node_bindings.at("y1") == GornAddress({0}));
  CHECK(hits[0].node_bindings.at("y2") == GornAddress({1}));

  LabeledTree three({GornAddress::root(), GornAddress({0}), GornAddress({1}),
                     GornAddress({2})});
  CHECK(find_assignments(three, t, f, vars).empty());
}

TEST_CASE("duplicate names are rejected across namespaces") {
  Theory t;
  t.add_label("A");
  CHECK_THROWS_AS(t.add_label("A"), SortError);
  CHECK_THROWS_AS(t.add_constant("A"), SortError);
  Definition d;
  d.name = "A";
  d.params = {{"x", Sort::Node}};
  d.body = Formula::eq(NodeTerm::var("x"), NodeTerm::var("x"));
  CHECK_THROWS_AS(t.add_definition(d), SortError);
}
