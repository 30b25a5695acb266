#include "treelogic/expand.hpp"

#include <set>
#include <vector>

#include "treelogic/error.hpp"

namespace treelogic {

namespace {

void collect_names(const FormulaPtr& f, std::set<std::string>& out,
                   bool skip_constants = false) {
  if (!f) return;
  auto see_term = [&](const NodeTerm& t) {
    if (t.name.empty()) return;
    if (skip_constants && t.is_constant) return;
    out.insert(t.name);
  };
  see_term(f->t1);
  see_term(f->t2);
  if (!f->name.empty()) out.insert(f->name);
  for (const ApplyArg& a : f->args) {
    if (const NodeTerm* t = std::get_if<NodeTerm>(&a))
      see_term(*t);
    else
      out.insert(std::get<SetVar>(a).name);
  }
  collect_names(f->f1, out, skip_constants);
  collect_names(f->f2, out, skip_constants);
}

std::string fresh_name(const std::string& base,
                       const std::set<std::string>& used) {
  if (!used.count(base)) return base;
  for (int i = 1;; ++i) {
    std::string cand = base + "_" + std::to_string(i);
    if (!used.count(cand)) return cand;
  }
}

struct Subst {
  std::map<std::string, NodeTerm> nodes;
  std::map<std::string, std::string> sets;
  // Names that must not be captured by a binder: all names occurring in the
  // replacement terms.
  std::set<std::string> avoid;
};

FormulaPtr subst_rec(const FormulaPtr& f, const Subst& s);

// Rebind a quantified variable, renaming it when it would capture one of
// the substituted names or is itself being substituted away.
FormulaPtr subst_quantifier(const FormulaPtr& f, const Subst& s) {
  Subst inner = s;
  inner.nodes.erase(f->name);
  inner.sets.erase(f->name);
  std::string var = f->name;
  bool capture = s.avoid.count(var) > 0;
  if (capture) {
    std::set<std::string> used = s.avoid;
    collect_names(f->f1, used);
    var = fresh_name(var, used);
    if (f->kind == FormulaKind::ExistsSet || f->kind == FormulaKind::ForallSet)
      inner.sets[f->name] = var;
    else
      inner.nodes[f->name] = NodeTerm::var(var);
    inner.avoid.insert(var);
  }
  FormulaPtr body = subst_rec(f->f1, inner);
  if (body == f->f1 && var == f->name) return f;
  Formula g = *f;
  g.name = var;
  g.f1 = body;
  return std::make_shared<const Formula>(std::move(g));
}

FormulaPtr subst_rec(const FormulaPtr& f, const Subst& s) {
  if (!f) return f;
  auto term = [&](const NodeTerm& t) -> NodeTerm {
    if (t.is_constant) return t;
    auto it = s.nodes.find(t.name);
    return it == s.nodes.end() ? t : it->second;
  };
  switch (f->kind) {
    case FormulaKind::Idom:
    case FormulaKind::Dom:
    case FormulaKind::Prec:
    case FormulaKind::Eq: {
      NodeTerm a = term(f->t1), b = term(f->t2);
      if (a == f->t1 && b == f->t2) return f;
      Formula g = *f;
      g.t1 = a;
      g.t2 = b;
      return std::make_shared<const Formula>(std::move(g));
    }
    case FormulaKind::HasLabel: {
      NodeTerm a = term(f->t1);
      if (a == f->t1) return f;
      return Formula::has_label(f->name, a);
    }
    case FormulaKind::InSet: {
      NodeTerm a = term(f->t1);
      auto it = s.sets.find(f->name);
      std::string set = it == s.sets.end() ? f->name : it->second;
      if (a == f->t1 && set == f->name) return f;
      return Formula::in_set(set, a);
    }
    case FormulaKind::Apply: {
      bool changed = false;
      std::vector<ApplyArg> args;
      args.reserve(f->args.size());
      for (const ApplyArg& a : f->args) {
        if (const NodeTerm* t = std::get_if<NodeTerm>(&a)) {
          NodeTerm nt = term(*t);
          changed = changed || nt != *t;
          args.emplace_back(nt);
        } else {
          const SetVar& v = std::get<SetVar>(a);
          auto it = s.sets.find(v.name);
          std::string name = it == s.sets.end() ? v.name : it->second;
          changed = changed || name != v.name;
          args.emplace_back(SetVar{name});
        }
      }
      if (!changed) return f;
      return Formula::apply(f->name, std::move(args));
    }
    case FormulaKind::ExistsNode:
    case FormulaKind::ForallNode:
    case FormulaKind::ExistsUnique:
    case FormulaKind::ExistsSet:
    case FormulaKind::ForallSet:
      return subst_quantifier(f, s);
    default: {
      FormulaPtr a = subst_rec(f->f1, s);
      FormulaPtr b = subst_rec(f->f2, s);
      if (a == f->f1 && b == f->f2) return f;
      Formula g = *f;
      g.f1 = a;
      g.f2 = b;
      return std::make_shared<const Formula>(std::move(g));
    }
  }
}

FormulaPtr expand_rec(const Theory& theory, const FormulaPtr& f,
                      std::vector<std::string>& stack) {
  if (!f) return f;
  switch (f->kind) {
    case FormulaKind::Apply: {
      const Definition* def = theory.find_definition(f->name);
      if (!def) throw SortError("undefined predicate: " + f->name);
      for (const std::string& n : stack)
        if (n == f->name)
          throw SortError("cyclic definition: " + f->name);
      if (def->params.size() != f->args.size())
        throw SortError("predicate " + f->name + " expects " +
                        std::to_string(def->params.size()) +
                        " arguments, got " + std::to_string(f->args.size()));
      stack.push_back(f->name);
      FormulaPtr body = expand_rec(theory, def->body, stack);
      stack.pop_back();
      Subst s;
      for (std::size_t i = 0; i < f->args.size(); ++i) {
        const auto& [pname, sort] = def->params[i];
        if (const NodeTerm* t = std::get_if<NodeTerm>(&f->args[i])) {
          if (sort != Sort::Node)
            throw SortError("argument " + std::to_string(i + 1) + " of " +
                            f->name + " must be a set variable");
          s.nodes[pname] = *t;
          s.avoid.insert(t->name);
        } else {
          if (sort != Sort::Set)
            throw SortError("argument " + std::to_string(i + 1) + " of " +
                            f->name + " must be a node term");
          const SetVar& v = std::get<SetVar>(f->args[i]);
          s.sets[pname] = v.name;
          s.avoid.insert(v.name);
        }
      }
      return subst_rec(body, s);
    }
    case FormulaKind::ExistsUnique: {
      FormulaPtr body = expand_rec(theory, f->f1, stack);
      std::set<std::string> used;
      collect_names(body, used);
      used.insert(f->name);
      std::string other = fresh_name(f->name + "_uniq", used);
      Subst s;
      s.nodes[f->name] = NodeTerm::var(other);
      s.avoid.insert(other);
      FormulaPtr renamed = subst_rec(body, s);
      FormulaPtr unique = Formula::forall_node(
          other, Formula::implies(renamed,
                                  Formula::eq(NodeTerm::var(other),
                                              NodeTerm::var(f->name))));
      return Formula::exists_node(f->name, Formula::conj(body, unique));
    }
    default: {
      if (!f->f1 && !f->f2) return f;
      FormulaPtr a = expand_rec(theory, f->f1, stack);
      FormulaPtr b = expand_rec(theory, f->f2, stack);
      if (a == f->f1 && b == f->f2) return f;
      Formula g = *f;
      g.f1 = a;
      g.f2 = b;
      return std::make_shared<const Formula>(std::move(g));
    }
  }
}

// Swap constants for node terms.  The replacements are fresh names chosen
// against every name in the formula, so capture is impossible.
FormulaPtr replace_constants_with_terms(
    const FormulaPtr& f, const std::map<std::string, NodeTerm>& repl) {
  if (!f) return f;
  auto term = [&](const NodeTerm& t) -> NodeTerm {
    if (!t.is_constant) return t;
    auto it = repl.find(t.name);
    return it == repl.end() ? t : it->second;
  };
  Formula g = *f;
  g.t1 = term(f->t1);
  g.t2 = term(f->t2);
  for (ApplyArg& a : g.args) {
    if (NodeTerm* t = std::get_if<NodeTerm>(&a)) *t = term(*t);
  }
  g.f1 = replace_constants_with_terms(f->f1, repl);
  g.f2 = replace_constants_with_terms(f->f2, repl);
  if (g.t1 == f->t1 && g.t2 == f->t2 && g.f1 == f->f1 && g.f2 == f->f2 &&
      g.args == f->args)
    return f;
  return std::make_shared<const Formula>(std::move(g));
}

FormulaPtr nnf_rec(const FormulaPtr& f, bool negated) {
  switch (f->kind) {
    case FormulaKind::Idom:
    case FormulaKind::Dom:
    case FormulaKind::Prec:
    case FormulaKind::Eq:
    case FormulaKind::HasLabel:
    case FormulaKind::InSet:
      return negated ? Formula::negate(f) : f;
    case FormulaKind::Not:
      return nnf_rec(f->f1, !negated);
    case FormulaKind::And:
      return negated ? Formula::disj(nnf_rec(f->f1, true), nnf_rec(f->f2, true))
                     : Formula::conj(nnf_rec(f->f1, false),
                                     nnf_rec(f->f2, false));
    case FormulaKind::Or:
      return negated ? Formula::conj(nnf_rec(f->f1, true), nnf_rec(f->f2, true))
                     : Formula::disj(nnf_rec(f->f1, false),
                                     nnf_rec(f->f2, false));
    case FormulaKind::Implies:
      return negated ? Formula::conj(nnf_rec(f->f1, false),
                                     nnf_rec(f->f2, true))
                     : Formula::disj(nnf_rec(f->f1, true),
                                     nnf_rec(f->f2, false));
    case FormulaKind::Iff: {
      // a <-> b  ==  (a & b) | (!a & !b);  negated: (a & !b) | (!a & b).
      FormulaPtr pp = Formula::conj(nnf_rec(f->f1, false),
                                    nnf_rec(f->f2, negated));
      FormulaPtr nn = Formula::conj(nnf_rec(f->f1, true),
                                    nnf_rec(f->f2, !negated));
      return Formula::disj(pp, nn);
    }
    case FormulaKind::ExistsNode:
      return negated ? Formula::forall_node(f->name, nnf_rec(f->f1, true))
                     : Formula::exists_node(f->name, nnf_rec(f->f1, false));
    case FormulaKind::ForallNode:
      return negated ? Formula::exists_node(f->name, nnf_rec(f->f1, true))
                     : Formula::forall_node(f->name, nnf_rec(f->f1, false));
    case FormulaKind::ExistsSet:
      return negated ? Formula::forall_set(f->name, nnf_rec(f->f1, true))
                     : Formula::exists_set(f->name, nnf_rec(f->f1, false));
    case FormulaKind::ForallSet:
      return negated ? Formula::exists_set(f->name, nnf_rec(f->f1, true))
                     : Formula::forall_set(f->name, nnf_rec(f->f1, false));
    case FormulaKind::ExistsUnique:
    case FormulaKind::Apply:
      throw SortError("to_nnf requires an expanded formula");
  }
  throw SortError("unknown formula kind");
}

}  // namespace

FormulaPtr substitute(const FormulaPtr& f,
                      const std::map<std::string, NodeTerm>& node_subst,
                      const std::map<std::string, std::string>& set_subst) {
  Subst s;
  s.nodes = node_subst;
  s.sets = set_subst;
  for (const auto& [from, to] : node_subst) s.avoid.insert(to.name);
  for (const auto& [from, to] : set_subst) s.avoid.insert(to);
  return subst_rec(f, s);
}

FormulaPtr expand(const Theory& theory, const FormulaPtr& f) {
  std::vector<std::string> stack;
  return expand_rec(theory, f, stack);
}

Theory eliminate_constants(const Theory& theory) {
  if (theory.constant_names().empty()) return theory;
  Theory out;
  for (const std::string& l : theory.labels()) out.add_label(l);
  for (const Definition& d : theory.definitions()) out.add_definition(d);
  if (theory.axioms().empty()) return out;

  // Reuse a constant's own name for its witness variable when nothing else
  // (variable, label, or definition) already carries that name.
  std::set<std::string> used;
  for (const FormulaPtr& ax : theory.axioms())
    collect_names(ax, used, /*skip_constants=*/true);
  for (const std::string& l : theory.labels()) used.insert(l);
  for (const Definition& d : theory.definitions()) used.insert(d.name);

  std::map<std::string, NodeTerm> subst_map;
  std::vector<std::string> fresh_vars;
  for (const std::string& c : theory.constant_names()) {
    std::string v = fresh_name(c, used);
    used.insert(v);
    fresh_vars.push_back(v);
    subst_map[c] = NodeTerm::var(v);
  }

  // Conjoin all axioms, swap every constant for its variable, and close
  // existentially with one shared witness per constant.
  FormulaPtr body = Formula::conj_all(theory.axioms());
  FormulaPtr replaced = replace_constants_with_terms(body, subst_map);
  for (std::size_t i = fresh_vars.size(); i-- > 0;)
    replaced = Formula::exists_node(fresh_vars[i], replaced);
  out.add_axiom(replaced);
  return out;
}

FormulaPtr to_nnf(const FormulaPtr& f) { return nnf_rec(f, false); }

}  // namespace treelogic
