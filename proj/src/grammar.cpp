#include "treelogic/grammar.hpp"

#include <algorithm>
#include <set>

#include "treelogic/error.hpp"

namespace treelogic {

void Grammar::validate() const {
  std::set<std::string> nts(nonterminals.begin(), nonterminals.end());
  std::set<std::string> ts(terminals.begin(), terminals.end());
  if (nts.size() != nonterminals.size() || ts.size() != terminals.size())
    throw Error("duplicate grammar symbol");
  for (const std::string& n : nonterminals)
    if (ts.count(n)) throw Error("symbol is both nonterminal and terminal: " + n);
  if (!nts.count(start)) throw Error("start symbol is not a nonterminal");
  for (const Production& p : productions) {
    if (!nts.count(p.lhs))
      throw Error("production left-hand side is not a nonterminal: " + p.lhs);
    if (p.rhs.empty())
      throw Error("empty right-hand sides are not supported");
    for (const std::string& s : p.rhs)
      if (!nts.count(s) && !ts.count(s))
        throw Error("undeclared symbol on a right-hand side: " + s);
  }
}

Theory cfg_to_theory(const Grammar& g, uint32_t k) {
  g.validate();
  for (const Production& p : g.productions)
    if (p.rhs.size() > k)
      throw Error("production right-hand side longer than the branching "
                  "bound k");

  Theory theory;
  for (const std::string& s : g.nonterminals) theory.add_label(s);
  for (const std::string& s : g.terminals) theory.add_label(s);

  std::set<std::size_t> arities;
  for (const Production& p : g.productions) arities.insert(p.rhs.size());
  for (std::size_t a : arities) theory.add_definition(children_definition(a));

  // Rule<i>(x, y1..yn): the local tree at x is induced by production i.
  for (std::size_t i = 0; i < g.productions.size(); ++i) {
    const Production& p = g.productions[i];
    Definition def;
    def.name = "Rule" + std::to_string(i + 1);
    def.params.emplace_back("x", Sort::Node);
    std::vector<ApplyArg> args = {NodeTerm::var("x")};
    std::vector<FormulaPtr> parts;
    for (std::size_t j = 0; j < p.rhs.size(); ++j) {
      std::string y = "y" + std::to_string(j + 1);
      def.params.emplace_back(y, Sort::Node);
      args.emplace_back(NodeTerm::var(y));
    }
    parts.push_back(Formula::apply(children_name(p.rhs.size()), args));
    parts.push_back(Formula::has_label(p.lhs, NodeTerm::var("x")));
    for (std::size_t j = 0; j < p.rhs.size(); ++j)
      parts.push_back(Formula::has_label(
          p.rhs[j], NodeTerm::var("y" + std::to_string(j + 1))));
    def.body = Formula::conj_all(std::move(parts));
    theory.add_definition(std::move(def));
  }

  NodeTerm x = NodeTerm::var("x");
  auto internal = [&]() {
    return Formula::exists_node("y",
                                Formula::idom(x, NodeTerm::var("y")));
  };

  // Every node carries exactly one grammar symbol.
  std::vector<std::string> symbols = g.nonterminals;
  symbols.insert(symbols.end(), g.terminals.begin(), g.terminals.end());
  {
    std::vector<FormulaPtr> choices;
    for (const std::string& s : symbols) {
      std::vector<FormulaPtr> conj = {Formula::has_label(s, x)};
      for (const std::string& t : symbols)
        if (t != s)
          conj.push_back(Formula::negate(Formula::has_label(t, x)));
      choices.push_back(Formula::conj_all(std::move(conj)));
    }
    theory.add_axiom(
        Formula::forall_node("x", Formula::disj_all(std::move(choices))));
  }

  // The root carries the start symbol.
  theory.add_axiom(Formula::forall_node(
      "x", Formula::implies(
               Formula::negate(Formula::exists_node(
                   "y", Formula::idom(NodeTerm::var("y"), x))),
               Formula::has_label(g.start, x))));

  // Internal nodes are induced by some production.
  {
    std::vector<FormulaPtr> options;
    for (std::size_t i = 0; i < g.productions.size(); ++i) {
      const Production& p = g.productions[i];
      std::vector<ApplyArg> args = {NodeTerm::var("x")};
      for (std::size_t j = 0; j < p.rhs.size(); ++j)
        args.emplace_back(NodeTerm::var("y" + std::to_string(j + 1)));
      FormulaPtr match =
          Formula::apply("Rule" + std::to_string(i + 1), std::move(args));
      for (std::size_t j = p.rhs.size(); j-- > 0;)
        match = Formula::exists_node("y" + std::to_string(j + 1), match);
      options.push_back(std::move(match));
    }
    FormulaPtr licensed =
        options.empty()
            ? Formula::negate(Formula::eq(x, x))
            : Formula::disj_all(std::move(options));
    theory.add_axiom(Formula::forall_node(
        "x", Formula::implies(internal(), std::move(licensed))));
  }

  // Terminal nodes are leaves; nonterminal nodes are internal.
  if (!g.terminals.empty()) {
    std::vector<FormulaPtr> terms;
    for (const std::string& t : g.terminals)
      terms.push_back(Formula::has_label(t, x));
    theory.add_axiom(Formula::forall_node(
        "x", Formula::implies(Formula::disj_all(std::move(terms)),
                              Formula::negate(internal()))));
  }
  {
    std::vector<FormulaPtr> nts;
    for (const std::string& n : g.nonterminals)
      nts.push_back(Formula::has_label(n, x));
    theory.add_axiom(Formula::forall_node(
        "x",
        Formula::implies(Formula::disj_all(std::move(nts)), internal())));
  }

  return theory;
}

}  // namespace treelogic
