#include "treelogic/gpsg.hpp"

#include <algorithm>

#include "treelogic/error.hpp"

namespace treelogic {

namespace {

FormulaPtr literal_atom(const FeatureLiteral& lit, const NodeTerm& t) {
  FormulaPtr a = Formula::has_label(lit.feature, t);
  return lit.positive ? a : Formula::negate(a);
}

void spec_conjuncts(const FeatureSpec& spec, const NodeTerm& t,
                    std::vector<FormulaPtr>& out) {
  for (const std::string& f : spec.positive)
    out.push_back(Formula::has_label(f, t));
  for (const std::string& f : spec.negative)
    out.push_back(Formula::negate(Formula::has_label(f, t)));
}

bool conflicts(const FeatureSpec& spec, const FeatureLiteral& lit) {
  return lit.positive ? spec.negative.count(lit.feature) > 0
                      : spec.positive.count(lit.feature) > 0;
}

FormulaPtr trivially_true(const NodeTerm& t) {
  return Formula::eq(t, t);
}

}  // namespace

std::string literal_suffix(const FeatureLiteral& lit) {
  return lit.positive ? lit.feature : "not_" + lit.feature;
}

Definition id_rule_to_definition(const IdRule& rule) {
  if (rule.daughters.empty())
    throw Error("ID rule " + rule.id + " has no daughters");
  Definition def;
  def.name = rule.id;
  def.params.emplace_back("x", Sort::Node);
  NodeTerm x = NodeTerm::var("x");
  std::vector<ApplyArg> args = {x};
  for (std::size_t i = 0; i < rule.daughters.size(); ++i) {
    std::string y = "y" + std::to_string(i + 1);
    def.params.emplace_back(y, Sort::Node);
    args.emplace_back(NodeTerm::var(y));
  }
  std::vector<FormulaPtr> parts;
  parts.push_back(
      Formula::apply(children_name(rule.daughters.size()), std::move(args)));
  spec_conjuncts(rule.mother, x, parts);
  for (std::size_t i = 0; i < rule.daughters.size(); ++i)
    spec_conjuncts(rule.daughters[i], NodeTerm::var("y" + std::to_string(i + 1)),
                   parts);
  def.body = Formula::conj_all(std::move(parts));
  return def;
}

namespace {

// x sits in daughter position `pos` (1-based) of a local tree induced by
// the rule: existentially close the mother and the other daughters.
FormulaPtr licensed_at(const IdRule& rule, std::size_t pos) {
  std::vector<ApplyArg> args;
  args.emplace_back(NodeTerm::var("m"));
  for (std::size_t i = 1; i <= rule.daughters.size(); ++i) {
    if (i == pos)
      args.emplace_back(NodeTerm::var("x"));
    else
      args.emplace_back(NodeTerm::var("y" + std::to_string(i)));
  }
  FormulaPtr f = Formula::apply(rule.id, std::move(args));
  for (std::size_t i = rule.daughters.size(); i >= 1; --i) {
    if (i == pos) continue;
    f = Formula::exists_node("y" + std::to_string(i), f);
  }
  return Formula::exists_node("m", f);
}

}  // namespace

Definition build_free(const std::vector<IdRule>& rules,
                      const FeatureLiteral& lit) {
  Definition def;
  def.name = "Free_" + literal_suffix(lit);
  def.params.emplace_back("x", Sort::Node);
  NodeTerm x = NodeTerm::var("x");

  std::vector<FormulaPtr> compatible;
  std::vector<FormulaPtr> unruled;
  for (const IdRule& rule : rules) {
    for (std::size_t i = 1; i <= rule.daughters.size(); ++i) {
      FormulaPtr lic = licensed_at(rule, i);
      if (!conflicts(rule.daughters[i - 1], lit))
        compatible.push_back(lic);
      unruled.push_back(Formula::negate(lic));
    }
  }
  if (unruled.empty()) {
    def.body = trivially_true(x);
    return def;
  }
  // Free iff some compatible position licenses x, or no position does.
  std::vector<FormulaPtr> cases;
  if (!compatible.empty())
    cases.push_back(Formula::disj_all(std::move(compatible)));
  cases.push_back(Formula::conj_all(std::move(unruled)));
  def.body = Formula::disj_all(std::move(cases));
  return def;
}

Definition subset_definition() {
  Definition def;
  def.name = "Subset";
  def.params.emplace_back("X", Sort::Set);
  def.params.emplace_back("Y", Sort::Set);
  def.body = Formula::forall_node(
      "x", Formula::implies(Formula::in_set("X", NodeTerm::var("x")),
                            Formula::in_set("Y", NodeTerm::var("x"))));
  return def;
}

namespace {

// One direction of a pattern: a holds at pos_a, b at pos_b.
FormulaPtr pattern_formula(const LocalTreePattern& pat, const NodeTerm& a,
                           const NodeTerm& b) {
  std::size_t n = pat.daughters.size();
  if (pat.pos_a > n || pat.pos_b > n || pat.pos_a == pat.pos_b)
    throw Error("bad positions in propagation pattern");
  auto term_at = [&](std::size_t pos) -> NodeTerm {
    if (pos == pat.pos_a) return a;
    if (pos == pat.pos_b) return b;
    if (pos == 0) return NodeTerm::var("m");
    return NodeTerm::var("y" + std::to_string(pos));
  };
  std::vector<ApplyArg> args;
  for (std::size_t pos = 0; pos <= n; ++pos) args.emplace_back(term_at(pos));
  std::vector<FormulaPtr> parts;
  parts.push_back(Formula::apply(children_name(n), std::move(args)));
  spec_conjuncts(pat.mother, term_at(0), parts);
  for (std::size_t i = 1; i <= n; ++i)
    spec_conjuncts(pat.daughters[i - 1], term_at(i), parts);
  FormulaPtr f = Formula::conj_all(std::move(parts));
  for (std::size_t pos = n + 1; pos-- > 0;) {
    if (pos == pat.pos_a || pos == pat.pos_b) continue;
    f = Formula::exists_node(pos == 0 ? "m" : "y" + std::to_string(pos), f);
  }
  return f;
}

Definition propagate_definition(const PropagationSpec& prop) {
  Definition def;
  def.name = "Propagate_" + prop.feature;
  def.params.emplace_back("x", Sort::Node);
  def.params.emplace_back("y", Sort::Node);
  NodeTerm x = NodeTerm::var("x"), y = NodeTerm::var("y");
  std::vector<FormulaPtr> disjuncts;
  for (const LocalTreePattern& pat : prop.patterns) {
    disjuncts.push_back(pattern_formula(pat, x, y));
    disjuncts.push_back(pattern_formula(pat, y, x));
  }
  def.body = disjuncts.empty()
                 ? Formula::negate(Formula::eq(x, x))
                 : Formula::disj_all(std::move(disjuncts));
  return def;
}

std::vector<Definition> privilege_family(const std::string& feature,
                                         const FeatureLiteral& lit) {
  std::string suf = literal_suffix(lit);
  std::vector<Definition> out;

  // Pprime: contains every non-free node and is closed under propagation.
  Definition pprime;
  pprime.name = "Pprime_" + suf;
  pprime.params.emplace_back("X", Sort::Set);
  FormulaPtr seeds = Formula::forall_node(
      "x", Formula::implies(
               Formula::negate(Formula::apply(
                   "Free_" + suf, {ApplyArg(NodeTerm::var("x"))})),
               Formula::in_set("X", NodeTerm::var("x"))));
  FormulaPtr closed = Formula::forall_node(
      "x",
      Formula::implies(
          Formula::exists_node(
              "y", Formula::conj(
                       Formula::in_set("X", NodeTerm::var("y")),
                       Formula::apply("Propagate_" + feature,
                                      {ApplyArg(NodeTerm::var("x")),
                                       ApplyArg(NodeTerm::var("y"))}))),
          Formula::in_set("X", NodeTerm::var("x"))));
  pprime.body = Formula::conj(seeds, closed);
  out.push_back(std::move(pprime));

  // PrivSet: the smallest such set.
  Definition privset;
  privset.name = "PrivSet_" + suf;
  privset.params.emplace_back("X", Sort::Set);
  privset.body = Formula::conj(
      Formula::apply("Pprime_" + suf, {ApplyArg(SetVar{"X"})}),
      Formula::forall_set(
          "Y", Formula::implies(
                   Formula::apply("Pprime_" + suf, {ApplyArg(SetVar{"Y"})}),
                   Formula::apply("Subset", {ApplyArg(SetVar{"X"}),
                                             ApplyArg(SetVar{"Y"})}))));
  out.push_back(std::move(privset));

  Definition priv;
  priv.name = "Privileged_" + suf;
  priv.params.emplace_back("x", Sort::Node);
  priv.body = Formula::exists_set(
      "X",
      Formula::conj(Formula::apply("PrivSet_" + suf, {ApplyArg(SetVar{"X"})}),
                    Formula::in_set("X", NodeTerm::var("x"))));
  out.push_back(std::move(priv));
  return out;
}

}  // namespace

std::vector<Definition> emit_privilege(const std::string& feature,
                                       const PropagationSpec& prop) {
  if (prop.feature != feature)
    throw Error("propagation spec is for feature " + prop.feature +
                ", not " + feature);
  std::vector<Definition> out;
  out.push_back(propagate_definition(prop));
  for (Definition& d : privilege_family(feature, {feature, true}))
    out.push_back(std::move(d));
  for (Definition& d : privilege_family(feature, {feature, false}))
    out.push_back(std::move(d));
  return out;
}

FormulaPtr fsd_to_axiom(const DefaultSpec& d) {
  NodeTerm x = NodeTerm::var("x");
  FormulaPtr not_priv = Formula::negate(Formula::apply(
      "Privileged_" + literal_suffix(d.literal), {ApplyArg(x)}));
  FormulaPtr lhs = not_priv;
  if (d.guard) {
    std::vector<FormulaPtr> guard_parts;
    spec_conjuncts(*d.guard, x, guard_parts);
    guard_parts.push_back(not_priv);
    lhs = Formula::conj_all(std::move(guard_parts));
  }
  return Formula::forall_node(
      "x", Formula::implies(lhs, literal_atom(d.literal, x)));
}

Theory gpsg_core_theory() {
  Theory t;
  t.add_definition(subset_definition());
  t.add_definition(children_definition(1));
  t.add_definition(children_definition(2));
  t.add_definition(children_definition(3));
  return t;
}

std::vector<IdRule> gpsg_example_rules() {
  IdRule id5{"ID5",
             {{"V2"}, {}},
             {{{"H", "SUBCAT5"}, {}}, {{"N2"}, {}}, {{"N2"}, {}}}};
  IdRule r2{"R2", {{"S"}, {}}, {{{"V2", "INV"}, {}}, {{"N2"}, {}}}};
  IdRule r3{"R3",
            {{"V2", "PAS"}, {}},
            {{{"H", "BAR0", "PAS"}, {}}, {{"N2"}, {}}}};
  IdRule r4{"R4", {{"H"}, {}}, {{{"V0"}, {}}}};
  return {id5, r2, r3, r4};
}

Theory gpsg_fsd_example_theory() {
  Theory t;
  for (const char* l : {"S", "V2", "N2", "H", "V0", "SUBCAT5", "BAR0", "INV",
                        "PAS"})
    t.add_label(l);
  t.add_definition(subset_definition());
  t.add_definition(children_definition(1));
  t.add_definition(children_definition(2));
  t.add_definition(children_definition(3));

  std::vector<IdRule> rules = gpsg_example_rules();
  for (const IdRule& r : rules) t.add_definition(id_rule_to_definition(r));

  for (const char* f : {"INV", "PAS"}) {
    t.add_definition(build_free(rules, {f, true}));
    t.add_definition(build_free(rules, {f, false}));
  }

  // INV rides the head projection line; PAS agrees between a clause and
  // its head daughter.
  PropagationSpec inv{"INV",
                      {{{{"V2"}, {}},
                        {{{"H"}, {}}, {{"N2"}, {}}, {{"N2"}, {}}},
                        0,
                        1},
                       {{{"H"}, {}}, {{{"V0"}, {}}}, 0, 1}}};
  PropagationSpec pas{"PAS",
                      {{{{"V2"}, {}}, {{{"H"}, {}}, {{"N2"}, {}}}, 0, 1}}};
  for (Definition& d : emit_privilege("INV", inv)) t.add_definition(std::move(d));
  for (Definition& d : emit_privilege("PAS", pas)) t.add_definition(std::move(d));

  t.add_axiom(fsd_to_axiom({{"INV", false}, std::nullopt}));
  t.add_axiom(fsd_to_axiom({{"PAS", false}, FeatureSpec{{"BAR0"}, {}}}));
  return t;
}

}  // namespace treelogic
