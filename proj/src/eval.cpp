#include "treelogic/eval.hpp"

#include <algorithm>
#include <atomic>
#include <unordered_map>

#include "treelogic/error.hpp"
#include "treelogic/expand.hpp"

namespace treelogic {

namespace {
std::atomic<uint64_t> next_context_id{1};
}

TreeContext::TreeContext(const LabeledTree& tree)
    : tree_(&tree), n_(tree.size()), id_(next_context_id.fetch_add(1)) {
  idom_.assign(n_ * n_, 0);
  dom_.assign(n_ * n_, 0);
  prec_.assign(n_ * n_, 0);
  for (std::size_t i = 0; i < n_; ++i) {
    for (std::size_t j = 0; j < n_; ++j) {
      const GornAddress& a = tree.node(i);
      const GornAddress& b = tree.node(j);
      idom_[i * n_ + j] = relation(tree, Rel::Idom, a, b);
      dom_[i * n_ + j] = relation(tree, Rel::Dom, a, b);
      prec_[i * n_ + j] = relation(tree, Rel::Prec, a, b);
    }
  }
  for (std::size_t i = 0; i < n_; ++i) {
    for (const std::string& l : tree.labels_at(i)) {
      auto& row = label_rows_[l];
      if (row.empty()) row.assign(n_, 0);
      row[i] = 1;
    }
  }
  empty_row_.assign(n_, 0);
}

namespace {

struct MemoKeyHash {
  std::size_t operator()(const std::vector<uint64_t>& k) const {
    std::size_t h = 1469598103934665603ull;
    for (uint64_t v : k) {
      h ^= std::hash<uint64_t>()(v);
      h *= 1099511628211ull;
    }
    return h;
  }
};

// Prepared evaluation node; variables resolved to environment slots.
struct ENode {
  FormulaKind kind;
  // Terms: slot >= 0, or constant reference (resolved per tree by name).
  int a_slot = -1, b_slot = -1;
  std::string a_const, b_const;
  std::string label;   // HasLabel
  int set_slot = -1;   // InSet
  int bind_slot = -1;  // quantifiers
  std::unique_ptr<ENode> l, r;
  std::size_t size = 1;
  bool memo = false;
  std::vector<int> free_slots;
  std::unordered_map<std::vector<uint64_t>, bool, MemoKeyHash> cache;
};

void collect_slots(const ENode& e, std::set<int>& out) {
  if (e.a_slot >= 0) out.insert(e.a_slot);
  if (e.b_slot >= 0) out.insert(e.b_slot);
  if (e.set_slot >= 0) out.insert(e.set_slot);
  if (e.l) collect_slots(*e.l, out);
  if (e.r) collect_slots(*e.r, out);
  if (e.bind_slot >= 0) out.erase(e.bind_slot);
}

bool has_set_quantifier(const ENode& e) {
  if (e.kind == FormulaKind::ExistsSet || e.kind == FormulaKind::ForallSet)
    return true;
  if (e.l && has_set_quantifier(*e.l)) return true;
  if (e.r && has_set_quantifier(*e.r)) return true;
  return false;
}

}  // namespace

struct Evaluator::Impl {
  EvalOptions opts;
  std::unique_ptr<ENode> root;
  std::vector<std::pair<std::string, Sort>> free_vars;  // slot order
  std::size_t slot_count = 0;

  // evaluation state
  const TreeContext* ctx = nullptr;
  uint64_t ctx_id = 0;
  std::vector<uint64_t> env;

  std::unique_ptr<ENode> prepare(const FormulaPtr& f,
                                 std::map<std::string, int>& scope);
  void finish(ENode& e);
  bool run(ENode& e);
  void reset_caches(ENode& e);
};

std::unique_ptr<ENode> Evaluator::Impl::prepare(
    const FormulaPtr& f, std::map<std::string, int>& scope) {
  auto e = std::make_unique<ENode>();
  e->kind = f->kind;
  auto term = [&](const NodeTerm& t, int& slot, std::string& cname) {
    if (t.is_constant) {
      cname = t.name;
      return;
    }
    auto it = scope.find(t.name);
    if (it == scope.end()) throw Error("unbound variable: " + t.name);
    slot = it->second;
  };
  switch (f->kind) {
    case FormulaKind::Idom:
    case FormulaKind::Dom:
    case FormulaKind::Prec:
    case FormulaKind::Eq:
      term(f->t1, e->a_slot, e->a_const);
      term(f->t2, e->b_slot, e->b_const);
      break;
    case FormulaKind::HasLabel:
      e->label = f->name;
      term(f->t1, e->a_slot, e->a_const);
      break;
    case FormulaKind::InSet: {
      auto it = scope.find(f->name);
      if (it == scope.end()) throw Error("unbound variable: " + f->name);
      e->set_slot = it->second;
      term(f->t1, e->a_slot, e->a_const);
      break;
    }
    case FormulaKind::ExistsNode:
    case FormulaKind::ForallNode:
    case FormulaKind::ExistsSet:
    case FormulaKind::ForallSet: {
      int slot = static_cast<int>(slot_count++);
      e->bind_slot = slot;
      auto saved = scope.find(f->name) != scope.end()
                       ? std::optional<int>(scope[f->name])
                       : std::nullopt;
      scope[f->name] = slot;
      e->l = prepare(f->f1, scope);
      if (saved)
        scope[f->name] = *saved;
      else
        scope.erase(f->name);
      break;
    }
    case FormulaKind::Not:
      e->l = prepare(f->f1, scope);
      break;
    case FormulaKind::And:
    case FormulaKind::Or:
    case FormulaKind::Implies:
    case FormulaKind::Iff:
      e->l = prepare(f->f1, scope);
      e->r = prepare(f->f2, scope);
      break;
    case FormulaKind::Apply:
    case FormulaKind::ExistsUnique:
      throw Error("evaluator requires an expanded formula");
  }
  e->size = 1 + (e->l ? e->l->size : 0) + (e->r ? e->r->size : 0);
  return e;
}

void Evaluator::Impl::finish(ENode& e) {
  if (e.l) finish(*e.l);
  if (e.r) finish(*e.r);
  std::set<int> slots;
  collect_slots(e, slots);
  e.free_slots.assign(slots.begin(), slots.end());
  // Memoize subformulas that are expensive to recompute and keyed by few
  // variables; anything containing a set quantifier qualifies early.
  bool quantified = e.bind_slot >= 0 || has_set_quantifier(e);
  e.memo = e.free_slots.size() <= 3 &&
           ((has_set_quantifier(e) && e.size >= 4) ||
            (quantified && e.size >= 16) || e.size >= 24);
}

void Evaluator::Impl::reset_caches(ENode& e) {
  e.cache.clear();
  if (e.l) reset_caches(*e.l);
  if (e.r) reset_caches(*e.r);
}

bool Evaluator::Impl::run(ENode& e) {
  const TreeContext& c = *ctx;
  std::size_t n = c.n_;
  auto node_of = [&](int slot, const std::string& cname) -> std::size_t {
    if (slot >= 0) return static_cast<std::size_t>(env[slot]);
    auto addr = c.tree().constant(cname);
    if (!addr)
      throw Error("constant '" + cname +
                  "' has no interpretation in the tree");
    return c.tree().index_of(*addr);
  };

  std::vector<uint64_t> key;
  if (e.memo) {
    key.reserve(e.free_slots.size());
    for (int s : e.free_slots) key.push_back(env[s]);
    auto it = e.cache.find(key);
    if (it != e.cache.end()) return it->second;
  }

  bool result = false;
  switch (e.kind) {
    case FormulaKind::Idom:
      result = c.idom_[node_of(e.a_slot, e.a_const) * n +
                       node_of(e.b_slot, e.b_const)];
      break;
    case FormulaKind::Dom:
      result = c.dom_[node_of(e.a_slot, e.a_const) * n +
                      node_of(e.b_slot, e.b_const)];
      break;
    case FormulaKind::Prec:
      result = c.prec_[node_of(e.a_slot, e.a_const) * n +
                       node_of(e.b_slot, e.b_const)];
      break;
    case FormulaKind::Eq:
      result = node_of(e.a_slot, e.a_const) == node_of(e.b_slot, e.b_const);
      break;
    case FormulaKind::HasLabel: {
      auto it = c.label_rows_.find(e.label);
      const auto& row = it == c.label_rows_.end() ? c.empty_row_ : it->second;
      result = row[node_of(e.a_slot, e.a_const)];
      break;
    }
    case FormulaKind::InSet:
      result = (env[e.set_slot] >> node_of(e.a_slot, e.a_const)) & 1;
      break;
    case FormulaKind::Not:
      result = !run(*e.l);
      break;
    case FormulaKind::And:
      result = run(*e.l) && run(*e.r);
      break;
    case FormulaKind::Or:
      result = run(*e.l) || run(*e.r);
      break;
    case FormulaKind::Implies:
      result = !run(*e.l) || run(*e.r);
      break;
    case FormulaKind::Iff:
      result = run(*e.l) == run(*e.r);
      break;
    case FormulaKind::ExistsNode: {
      result = false;
      for (std::size_t i = 0; i < n; ++i) {
        env[e.bind_slot] = i;
        if (run(*e.l)) {
          result = true;
          break;
        }
      }
      break;
    }
    case FormulaKind::ForallNode: {
      result = true;
      for (std::size_t i = 0; i < n; ++i) {
        env[e.bind_slot] = i;
        if (!run(*e.l)) {
          result = false;
          break;
        }
      }
      break;
    }
    case FormulaKind::ExistsSet:
    case FormulaKind::ForallSet: {
      if (n > opts.node_budget || n > 63)
        throw BudgetExceeded(
            "subset budget exceeded: tree has " + std::to_string(n) +
            " nodes, budget is " + std::to_string(opts.node_budget));
      uint64_t limit = uint64_t{1} << n;
      bool exists = e.kind == FormulaKind::ExistsSet;
      result = !exists;
      for (uint64_t m = 0; m < limit; ++m) {
        env[e.bind_slot] = m;
        if (run(*e.l) == exists) {
          result = exists;
          break;
        }
      }
      break;
    }
    case FormulaKind::Apply:
    case FormulaKind::ExistsUnique:
      throw Error("evaluator requires an expanded formula");
  }

  if (e.memo) e.cache.emplace(std::move(key), result);
  return result;
}

Evaluator::Evaluator(const Theory& theory, FormulaPtr formula,
                     EvalOptions opts)
    : impl_(std::make_unique<Impl>()) {
  impl_->opts = opts;
  sort_check(theory, formula);
  FormulaPtr expanded = expand(theory, formula);
  FreeVars fv = free_vars(expanded);
  std::map<std::string, int> scope;
  for (const std::string& v : fv.nodes) {
    impl_->free_vars.emplace_back(v, Sort::Node);
    scope[v] = static_cast<int>(impl_->slot_count++);
  }
  for (const std::string& v : fv.sets) {
    impl_->free_vars.emplace_back(v, Sort::Set);
    scope[v] = static_cast<int>(impl_->slot_count++);
  }
  impl_->root = impl_->prepare(expanded, scope);
  impl_->finish(*impl_->root);
}

Evaluator::~Evaluator() = default;
Evaluator::Evaluator(Evaluator&&) noexcept = default;
Evaluator& Evaluator::operator=(Evaluator&&) noexcept = default;

const std::vector<std::pair<std::string, Sort>>& Evaluator::free_slots()
    const {
  return impl_->free_vars;
}

bool Evaluator::eval_raw(const TreeContext& ctx,
                         const std::vector<uint64_t>& values) {
  if (values.size() != impl_->free_vars.size())
    throw Error("wrong number of free-variable values");
  if (impl_->ctx_id != ctx.id_) {
    impl_->reset_caches(*impl_->root);
    impl_->ctx = &ctx;
    impl_->ctx_id = ctx.id_;
  } else {
    impl_->ctx = &ctx;
  }
  impl_->env.assign(impl_->slot_count, 0);
  for (std::size_t i = 0; i < values.size(); ++i) impl_->env[i] = values[i];
  return impl_->run(*impl_->root);
}

bool Evaluator::eval(const TreeContext& ctx, const Valuation& v) {
  std::vector<uint64_t> values;
  const LabeledTree& tree = ctx.tree();
  for (const auto& [name, sort] : impl_->free_vars) {
    if (sort == Sort::Node) {
      auto it = v.node_bindings.find(name);
      if (it == v.node_bindings.end())
        throw Error("unbound variable: " + name);
      values.push_back(tree.index_of(it->second));
    } else {
      auto it = v.set_bindings.find(name);
      if (it == v.set_bindings.end())
        throw Error("unbound variable: " + name);
      if (tree.size() > 63)
        throw BudgetExceeded("tree too large for set-valued bindings");
      uint64_t mask = 0;
      for (const GornAddress& a : it->second)
        mask |= uint64_t{1} << tree.index_of(a);
      values.push_back(mask);
    }
  }
  return eval_raw(ctx, values);
}

bool eval(const LabeledTree& tree, const Theory& theory, const FormulaPtr& f,
          const Valuation& v, const EvalOptions& opts) {
  Evaluator ev(theory, f, opts);
  TreeContext ctx(tree);
  return ev.eval(ctx, v);
}

SatisfactionResult satisfies(const LabeledTree& tree, const Theory& theory,
                             const EvalOptions& opts) {
  theory.validate();
  Theory closed = eliminate_constants(theory);
  TreeContext ctx(tree);
  for (std::size_t i = 0; i < closed.axioms().size(); ++i) {
    Evaluator ev(closed, closed.axioms()[i], opts);
    if (!ev.eval(ctx)) return {false, i};
  }
  return {true, std::nullopt};
}

std::vector<Valuation> find_assignments(const LabeledTree& tree,
                                        const Theory& theory,
                                        const FormulaPtr& f,
                                        const std::vector<FreeVarSpec>& vars,
                                        const EvalOptions& opts) {
  FormulaPtr expanded = expand(theory, f);
  FreeVars fv = free_vars(expanded);
  std::set<std::string> want_nodes, want_sets;
  for (const FreeVarSpec& v : vars)
    (v.sort == Sort::Node ? want_nodes : want_sets).insert(v.name);
  if (want_nodes != fv.nodes || want_sets != fv.sets)
    throw Error("variable list does not match the formula's free variables");

  Evaluator ev(theory, f, opts);
  TreeContext ctx(tree);
  std::size_t n = tree.size();
  bool has_sets = !want_sets.empty();
  if (has_sets && (n > opts.node_budget || n > 63))
    throw BudgetExceeded("subset budget exceeded: tree has " +
                         std::to_string(n) + " nodes, budget is " +
                         std::to_string(opts.node_budget));

  // Map enumeration order (vars, last fastest) onto evaluator slot order.
  const auto& slots = ev.free_slots();
  std::vector<std::size_t> slot_of;
  for (const FreeVarSpec& v : vars) {
    for (std::size_t i = 0; i < slots.size(); ++i) {
      if (slots[i].first == v.name) {
        slot_of.push_back(i);
        break;
      }
    }
  }

  std::vector<Valuation> out;
  std::vector<uint64_t> counters(vars.size(), 0);
  std::vector<uint64_t> limits(vars.size());
  for (std::size_t i = 0; i < vars.size(); ++i)
    limits[i] = vars[i].sort == Sort::Node
                    ? n
                    : uint64_t{1} << n;
  std::vector<uint64_t> values(slots.size(), 0);
  while (true) {
    for (std::size_t i = 0; i < vars.size(); ++i)
      values[slot_of[i]] = counters[i];
    if (ev.eval_raw(ctx, values)) {
      Valuation v;
      for (std::size_t i = 0; i < vars.size(); ++i) {
        if (vars[i].sort == Sort::Node) {
          v.node_bindings[vars[i].name] = tree.node(counters[i]);
        } else {
          std::set<GornAddress> set;
          for (std::size_t b = 0; b < n; ++b)
            if ((counters[i] >> b) & 1) set.insert(tree.node(b));
          v.set_bindings[vars[i].name] = std::move(set);
        }
      }
      out.push_back(std::move(v));
    }
    // Odometer, last variable fastest.
    std::size_t i = vars.size();
    bool advanced = false;
    while (i > 0) {
      --i;
      if (++counters[i] < limits[i]) {
        advanced = true;
        break;
      }
      counters[i] = 0;
    }
    if (!advanced) break;
  }
  return out;
}

}  // namespace treelogic
