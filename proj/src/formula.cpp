#include "treelogic/formula.hpp"

#include <algorithm>

#include "treelogic/error.hpp"

namespace treelogic {

namespace {

FormulaPtr make(Formula f) { return std::make_shared<const Formula>(std::move(f)); }

FormulaPtr binary_atom(FormulaKind k, NodeTerm x, NodeTerm y) {
  Formula f;
  f.kind = k;
  f.t1 = std::move(x);
  f.t2 = std::move(y);
  return make(std::move(f));
}

FormulaPtr connective(FormulaKind k, FormulaPtr a, FormulaPtr b) {
  Formula f;
  f.kind = k;
  f.f1 = std::move(a);
  f.f2 = std::move(b);
  return make(std::move(f));
}

FormulaPtr quantifier(FormulaKind k, std::string var, FormulaPtr body) {
  Formula f;
  f.kind = k;
  f.name = std::move(var);
  f.f1 = std::move(body);
  return make(std::move(f));
}

}  // namespace

FormulaPtr Formula::idom(NodeTerm x, NodeTerm y) {
  return binary_atom(FormulaKind::Idom, std::move(x), std::move(y));
}
FormulaPtr Formula::dom(NodeTerm x, NodeTerm y) {
  return binary_atom(FormulaKind::Dom, std::move(x), std::move(y));
}
FormulaPtr Formula::prec(NodeTerm x, NodeTerm y) {
  return binary_atom(FormulaKind::Prec, std::move(x), std::move(y));
}
FormulaPtr Formula::eq(NodeTerm x, NodeTerm y) {
  return binary_atom(FormulaKind::Eq, std::move(x), std::move(y));
}

FormulaPtr Formula::has_label(std::string label, NodeTerm x) {
  Formula f;
  f.kind = FormulaKind::HasLabel;
  f.name = std::move(label);
  f.t1 = std::move(x);
  return make(std::move(f));
}

FormulaPtr Formula::in_set(std::string set_var, NodeTerm x) {
  Formula f;
  f.kind = FormulaKind::InSet;
  f.name = std::move(set_var);
  f.t1 = std::move(x);
  return make(std::move(f));
}

FormulaPtr Formula::negate(FormulaPtr f) {
  return connective(FormulaKind::Not, std::move(f), nullptr);
}
FormulaPtr Formula::conj(FormulaPtr a, FormulaPtr b) {
  return connective(FormulaKind::And, std::move(a), std::move(b));
}
FormulaPtr Formula::disj(FormulaPtr a, FormulaPtr b) {
  return connective(FormulaKind::Or, std::move(a), std::move(b));
}
FormulaPtr Formula::implies(FormulaPtr a, FormulaPtr b) {
  return connective(FormulaKind::Implies, std::move(a), std::move(b));
}
FormulaPtr Formula::iff(FormulaPtr a, FormulaPtr b) {
  return connective(FormulaKind::Iff, std::move(a), std::move(b));
}

FormulaPtr Formula::exists_node(std::string var, FormulaPtr body) {
  return quantifier(FormulaKind::ExistsNode, std::move(var), std::move(body));
}
FormulaPtr Formula::forall_node(std::string var, FormulaPtr body) {
  return quantifier(FormulaKind::ForallNode, std::move(var), std::move(body));
}
FormulaPtr Formula::exists_unique(std::string var, FormulaPtr body) {
  return quantifier(FormulaKind::ExistsUnique, std::move(var),
                    std::move(body));
}
FormulaPtr Formula::exists_set(std::string var, FormulaPtr body) {
  return quantifier(FormulaKind::ExistsSet, std::move(var), std::move(body));
}
FormulaPtr Formula::forall_set(std::string var, FormulaPtr body) {
  return quantifier(FormulaKind::ForallSet, std::move(var), std::move(body));
}

FormulaPtr Formula::apply(std::string def, std::vector<ApplyArg> args) {
  Formula f;
  f.kind = FormulaKind::Apply;
  f.name = std::move(def);
  f.args = std::move(args);
  return make(std::move(f));
}

FormulaPtr Formula::conj_all(std::vector<FormulaPtr> fs) {
  if (fs.empty()) throw Error("empty conjunction");
  FormulaPtr acc = fs.back();
  for (std::size_t i = fs.size() - 1; i-- > 0;) acc = conj(fs[i], acc);
  return acc;
}

FormulaPtr Formula::disj_all(std::vector<FormulaPtr> fs) {
  if (fs.empty()) throw Error("empty disjunction");
  FormulaPtr acc = fs.back();
  for (std::size_t i = fs.size() - 1; i-- > 0;) acc = disj(fs[i], acc);
  return acc;
}

bool Formula::is_quantifier() const {
  switch (kind) {
    case FormulaKind::ExistsNode:
    case FormulaKind::ForallNode:
    case FormulaKind::ExistsUnique:
    case FormulaKind::ExistsSet:
    case FormulaKind::ForallSet:
      return true;
    default:
      return false;
  }
}

bool equal(const FormulaPtr& a, const FormulaPtr& b) {
  if (a == b) return true;
  if (!a || !b) return false;
  if (a->kind != b->kind || a->t1 != b->t1 || a->t2 != b->t2 ||
      a->name != b->name || a->args != b->args)
    return false;
  return equal(a->f1, b->f1) && equal(a->f2, b->f2);
}

namespace {

void collect_free(const FormulaPtr& f, FreeVars& out,
                  std::set<std::string>& bound_nodes,
                  std::set<std::string>& bound_sets) {
  if (!f) return;
  auto see_term = [&](const NodeTerm& t) {
    if (!t.name.empty() && !t.is_constant && !bound_nodes.count(t.name))
      out.nodes.insert(t.name);
  };
  switch (f->kind) {
    case FormulaKind::Idom:
    case FormulaKind::Dom:
    case FormulaKind::Prec:
    case FormulaKind::Eq:
      see_term(f->t1);
      see_term(f->t2);
      return;
    case FormulaKind::HasLabel:
      see_term(f->t1);
      return;
    case FormulaKind::InSet:
      see_term(f->t1);
      if (!bound_sets.count(f->name)) out.sets.insert(f->name);
      return;
    case FormulaKind::Apply:
      for (const ApplyArg& a : f->args) {
        if (const NodeTerm* t = std::get_if<NodeTerm>(&a)) {
          see_term(*t);
        } else {
          const SetVar& v = std::get<SetVar>(a);
          if (!bound_sets.count(v.name)) out.sets.insert(v.name);
        }
      }
      return;
    case FormulaKind::ExistsNode:
    case FormulaKind::ForallNode:
    case FormulaKind::ExistsUnique: {
      bool was = bound_nodes.count(f->name) > 0;
      bound_nodes.insert(f->name);
      collect_free(f->f1, out, bound_nodes, bound_sets);
      if (!was) bound_nodes.erase(f->name);
      return;
    }
    case FormulaKind::ExistsSet:
    case FormulaKind::ForallSet: {
      bool was = bound_sets.count(f->name) > 0;
      bound_sets.insert(f->name);
      collect_free(f->f1, out, bound_nodes, bound_sets);
      if (!was) bound_sets.erase(f->name);
      return;
    }
    default:
      collect_free(f->f1, out, bound_nodes, bound_sets);
      collect_free(f->f2, out, bound_nodes, bound_sets);
      return;
  }
}

void collect_constants(const FormulaPtr& f, std::set<std::string>& out) {
  if (!f) return;
  auto see = [&](const NodeTerm& t) {
    if (t.is_constant) out.insert(t.name);
  };
  see(f->t1);
  see(f->t2);
  for (const ApplyArg& a : f->args) {
    if (const NodeTerm* t = std::get_if<NodeTerm>(&a)) see(*t);
  }
  collect_constants(f->f1, out);
  collect_constants(f->f2, out);
}

}  // namespace

FreeVars free_vars(const FormulaPtr& f) {
  FreeVars out;
  std::set<std::string> bn, bs;
  collect_free(f, out, bn, bs);
  return out;
}

std::set<std::string> constants_in(const FormulaPtr& f) {
  std::set<std::string> out;
  collect_constants(f, out);
  return out;
}

void Theory::check_fresh(const std::string& name) const {
  if (has_label(name) || has_constant(name) || find_definition(name))
    throw SortError("duplicate name: " + name);
}

void Theory::add_label(std::string name) {
  check_fresh(name);
  labels_.push_back(std::move(name));
}

void Theory::add_constant(std::string name) {
  check_fresh(name);
  constants_.push_back(std::move(name));
}

void Theory::add_definition(Definition def) {
  check_fresh(def.name);
  def_index_[def.name] = definitions_.size();
  definitions_.push_back(std::move(def));
}

void Theory::add_axiom(FormulaPtr axiom) { axioms_.push_back(std::move(axiom)); }

bool Theory::has_label(const std::string& name) const {
  return std::find(labels_.begin(), labels_.end(), name) != labels_.end();
}

bool Theory::has_constant(const std::string& name) const {
  return std::find(constants_.begin(), constants_.end(), name) !=
         constants_.end();
}

const Definition* Theory::find_definition(const std::string& name) const {
  auto it = def_index_.find(name);
  if (it == def_index_.end()) return nullptr;
  return &definitions_[it->second];
}

void Theory::validate() const {
  for (const Definition& d : definitions_) {
    std::map<std::string, Sort> env;
    for (const auto& [pname, sort] : d.params) {
      if (env.count(pname))
        throw SortError("duplicate parameter '" + pname + "' in definition " +
                        d.name);
      env[pname] = sort;
    }
    sort_check(*this, d.body, env);
    if (!constants_in(d.body).empty())
      throw SortError("definition '" + d.name +
                      "' mentions a constant; constants are only allowed in "
                      "axioms");
    FreeVars fv = free_vars(d.body);
    for (const std::string& v : fv.nodes)
      if (!env.count(v))
        throw SortError("definition '" + d.name + "' has unbound variable " +
                        v);
    for (const std::string& v : fv.sets)
      if (!env.count(v))
        throw SortError("definition '" + d.name + "' has unbound variable " +
                        v);
  }
  for (std::size_t i = 0; i < axioms_.size(); ++i) {
    sort_check(*this, axioms_[i]);
    if (!free_vars(axioms_[i]).empty())
      throw SortError("axiom " + std::to_string(i + 1) +
                      " is not a closed sentence");
  }
}

namespace {

void check_rec(const Theory& theory, const FormulaPtr& f,
               std::map<std::string, Sort>& env) {
  if (!f) throw SortError("null formula");
  auto check_term = [&](const NodeTerm& t) {
    if (t.is_constant) {
      if (!theory.has_constant(t.name))
        throw SortError("undeclared constant: " + t.name);
      return;
    }
    auto it = env.find(t.name);
    if (it == env.end()) {
      env[t.name] = Sort::Node;  // free variable: infer and pin its sort
    } else if (it->second != Sort::Node) {
      throw SortError("set variable '" + t.name +
                      "' used where a node term is expected");
    }
  };
  auto check_set_use = [&](const std::string& name) {
    auto it = env.find(name);
    if (it == env.end()) {
      env[name] = Sort::Set;
    } else if (it->second != Sort::Set) {
      throw SortError("node variable '" + name +
                      "' used where a set variable is expected");
    }
  };
  switch (f->kind) {
    case FormulaKind::Idom:
    case FormulaKind::Dom:
    case FormulaKind::Prec:
    case FormulaKind::Eq:
      check_term(f->t1);
      check_term(f->t2);
      return;
    case FormulaKind::HasLabel:
      if (!theory.has_label(f->name))
        throw SortError("undeclared label: " + f->name);
      check_term(f->t1);
      return;
    case FormulaKind::InSet:
      check_set_use(f->name);
      check_term(f->t1);
      return;
    case FormulaKind::Apply: {
      const Definition* def = theory.find_definition(f->name);
      if (!def) throw SortError("undefined predicate: " + f->name);
      if (def->params.size() != f->args.size())
        throw SortError("predicate " + f->name + " expects " +
                        std::to_string(def->params.size()) +
                        " arguments, got " + std::to_string(f->args.size()));
      for (std::size_t i = 0; i < f->args.size(); ++i) {
        Sort want = def->params[i].second;
        if (const NodeTerm* t = std::get_if<NodeTerm>(&f->args[i])) {
          if (want != Sort::Node)
            throw SortError("argument " + std::to_string(i + 1) + " of " +
                            f->name + " must be a set variable");
          check_term(*t);
        } else {
          const SetVar& v = std::get<SetVar>(f->args[i]);
          if (want != Sort::Set)
            throw SortError("argument " + std::to_string(i + 1) + " of " +
                            f->name + " must be a node term");
          check_set_use(v.name);
        }
      }
      return;
    }
    case FormulaKind::ExistsNode:
    case FormulaKind::ForallNode:
    case FormulaKind::ExistsUnique: {
      auto saved = env.find(f->name) != env.end()
                       ? std::optional<Sort>(env[f->name])
                       : std::nullopt;
      env[f->name] = Sort::Node;
      check_rec(theory, f->f1, env);
      if (saved)
        env[f->name] = *saved;
      else
        env.erase(f->name);
      return;
    }
    case FormulaKind::ExistsSet:
    case FormulaKind::ForallSet: {
      auto saved = env.find(f->name) != env.end()
                       ? std::optional<Sort>(env[f->name])
                       : std::nullopt;
      env[f->name] = Sort::Set;
      check_rec(theory, f->f1, env);
      if (saved)
        env[f->name] = *saved;
      else
        env.erase(f->name);
      return;
    }
    case FormulaKind::Not:
      check_rec(theory, f->f1, env);
      return;
    case FormulaKind::And:
    case FormulaKind::Or:
    case FormulaKind::Implies:
    case FormulaKind::Iff:
      check_rec(theory, f->f1, env);
      check_rec(theory, f->f2, env);
      return;
  }
  throw SortError("unknown formula kind");
}

}  // namespace

void sort_check(const Theory& theory, const FormulaPtr& f,
                const std::map<std::string, Sort>& free) {
  std::map<std::string, Sort> env = free;
  check_rec(theory, f, env);
}

std::string children_name(std::size_t arity) {
  return "Children" + std::to_string(arity);
}

Definition children_definition(std::size_t arity) {
  if (arity == 0) throw Error("Children needs at least one child");
  Definition def;
  def.name = children_name(arity);
  def.params.emplace_back("x", Sort::Node);
  std::vector<std::string> ys;
  for (std::size_t i = 1; i <= arity; ++i) {
    ys.push_back("y" + std::to_string(i));
    def.params.emplace_back(ys.back(), Sort::Node);
  }
  NodeTerm x = NodeTerm::var("x");
  std::vector<FormulaPtr> parts;
  for (const std::string& y : ys)
    parts.push_back(Formula::idom(x, NodeTerm::var(y)));
  for (std::size_t i = 0; i + 1 < ys.size(); ++i)
    parts.push_back(
        Formula::prec(NodeTerm::var(ys[i]), NodeTerm::var(ys[i + 1])));
  // Exhaustivity: every child of x is one of the ys.
  std::vector<FormulaPtr> is_some_y;
  for (const std::string& y : ys)
    is_some_y.push_back(Formula::eq(NodeTerm::var("z"), NodeTerm::var(y)));
  parts.push_back(Formula::forall_node(
      "z", Formula::implies(Formula::idom(x, NodeTerm::var("z")),
                            Formula::disj_all(std::move(is_some_y)))));
  def.body = Formula::conj_all(std::move(parts));
  return def;
}

}  // namespace treelogic
