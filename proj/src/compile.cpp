#include "treelogic/compile.hpp"

#include <algorithm>
#include <functional>
#include <set>

#include "treelogic/error.hpp"
#include "treelogic/expand.hpp"

namespace treelogic {

namespace {

// Builds a complete deterministic automaton from a transition function by
// enumerating every (symbol, child-state tuple) combination.
TreeAutomaton materialize(
    RankedAlphabet alphabet, StateId num_states,
    const std::function<StateId(Bits, const std::vector<StateId>&)>& delta,
    std::vector<StateId> finals) {
  TreeAutomaton out;
  out.alphabet = std::move(alphabet);
  out.num_states = num_states;
  out.final_states = std::move(finals);
  const Bits limit = Bits{1} << out.alphabet.bit_count();
  for (uint32_t arity = 0; arity <= out.alphabet.max_branching; ++arity) {
    std::vector<StateId> tuple(arity, 0);
    while (true) {
      for (Bits bits = 0; bits < limit; ++bits)
        out.transitions.push_back({bits, tuple, delta(bits, tuple)});
      std::size_t i = arity;
      bool advanced = false;
      while (i > 0) {
        --i;
        if (++tuple[i] < num_states) {
          advanced = true;
          break;
        }
        tuple[i] = 0;
      }
      if (!advanced) break;
    }
  }
  out.deterministic = true;
  out.complete = true;
  out.canonicalize();
  return out;
}

bool bit_of(Bits bits, std::size_t index) { return (bits >> index) & 1; }

// Exactly one node carries the x bit and one the y bit, and they are the
// same node.  States: 0 nothing seen, 1 the shared node seen, 2 dead.
TreeAutomaton eq_automaton(RankedAlphabet alphabet, std::size_t x,
                           std::size_t y) {
  auto delta = [x, y](Bits bits, const std::vector<StateId>& c) -> StateId {
    int done = 0;
    for (StateId s : c) {
      if (s == 2) return 2;
      if (s == 1) ++done;
    }
    bool bx = bit_of(bits, x), by = bit_of(bits, y);
    if (bx != by) return 2;
    if (bx) return done == 0 ? 1 : 2;
    return done <= 1 ? done : 2;
  };
  return materialize(std::move(alphabet), 3, delta, {1});
}

// The unique x-bit node is the parent of the unique y-bit node.
// States: 0 nothing, 1 y is the subtree root, 2 pattern complete, 3 dead.
TreeAutomaton idom_automaton(RankedAlphabet alphabet, std::size_t x,
                             std::size_t y) {
  auto delta = [x, y](Bits bits, const std::vector<StateId>& c) -> StateId {
    int pending_y = 0, done = 0;
    for (StateId s : c) {
      if (s == 3) return 3;
      if (s == 1) ++pending_y;
      if (s == 2) ++done;
    }
    bool bx = bit_of(bits, x), by = bit_of(bits, y);
    if (bx && by) return 3;
    if (by) return pending_y == 0 && done == 0 ? 1 : 3;
    if (bx) return pending_y == 1 && done == 0 ? 2 : 3;
    if (pending_y > 0) return 3;  // y's parent lacked the x bit
    if (done == 0) return 0;
    return done == 1 ? 2 : 3;
  };
  return materialize(std::move(alphabet), 4, delta, {2});
}

// The unique x-bit node dominates (reflexively) the unique y-bit node.
// States: 0 nothing, 1 y seen and x still due above, 2 complete, 3 dead.
TreeAutomaton dom_automaton(RankedAlphabet alphabet, std::size_t x,
                            std::size_t y) {
  auto delta = [x, y](Bits bits, const std::vector<StateId>& c) -> StateId {
    int pending_y = 0, done = 0;
    for (StateId s : c) {
      if (s == 3) return 3;
      if (s == 1) ++pending_y;
      if (s == 2) ++done;
    }
    bool bx = bit_of(bits, x), by = bit_of(bits, y);
    int ys = pending_y + done + (by ? 1 : 0);
    int xs = done + (bx ? 1 : 0);
    if (ys > 1 || xs > 1) return 3;
    if (bx && by) return 2;
    if (by) return 1;
    if (bx) return pending_y == 1 ? 2 : 3;  // x without y below is lost
    if (pending_y == 1) return 1;
    if (done == 1) return 2;
    return 0;
  };
  return materialize(std::move(alphabet), 4, delta, {2});
}

// The unique x-bit node precedes the unique y-bit node: dominance-
// incomparable, with x in an earlier sibling subtree.  States: 0 nothing,
// 1 x seen, 2 y seen, 3 complete, 4 dead.
TreeAutomaton prec_automaton(RankedAlphabet alphabet, std::size_t x,
                             std::size_t y) {
  auto delta = [x, y](Bits bits, const std::vector<StateId>& c) -> StateId {
    bool bx = bit_of(bits, x), by = bit_of(bits, y);
    int xs = bx ? 1 : 0, ys = by ? 1 : 0;
    for (StateId s : c) {
      if (s == 4) return 4;
      if (s == 1 || s == 3) ++xs;
      if (s == 2 || s == 3) ++ys;
    }
    if (xs > 1 || ys > 1) return 4;
    for (StateId s : c)
      if (s == 3) return 3;
    if (bx && by) return 4;
    if (bx) {
      for (StateId s : c)
        if (s == 2) return 4;  // x would dominate y
      return 1;
    }
    if (by) {
      for (StateId s : c)
        if (s == 1) return 4;  // y would dominate x
      return 2;
    }
    int xi = -1, yi = -1;
    for (std::size_t i = 0; i < c.size(); ++i) {
      if (c[i] == 1) xi = static_cast<int>(i);
      if (c[i] == 2) yi = static_cast<int>(i);
    }
    if (xi >= 0 && yi >= 0) return xi < yi ? 3 : 4;
    if (xi >= 0) return 1;
    if (yi >= 0) return 2;
    return 0;
  };
  return materialize(std::move(alphabet), 5, delta, {3});
}

// The unique x-bit node also carries `other` (a label bit or a set
// variable's bit).  States: 0 nothing, 1 complete, 2 dead.
TreeAutomaton member_automaton(RankedAlphabet alphabet, std::size_t other,
                               std::size_t x) {
  auto delta = [x, other](Bits bits,
                          const std::vector<StateId>& c) -> StateId {
    int done = 0;
    for (StateId s : c) {
      if (s == 2) return 2;
      if (s == 1) ++done;
    }
    bool bx = bit_of(bits, x);
    if (bx) return done == 0 && bit_of(bits, other) ? 1 : 2;
    return done <= 1 ? done : 2;
  };
  return materialize(std::move(alphabet), 3, delta, {1});
}

FormulaPtr rename_bound(const FormulaPtr& f, int& counter) {
  switch (f->kind) {
    case FormulaKind::ExistsNode:
    case FormulaKind::ForallNode:
    case FormulaKind::ExistsSet:
    case FormulaKind::ForallSet: {
      std::string fresh = f->name + "#" + std::to_string(++counter);
      bool set_sorted = f->kind == FormulaKind::ExistsSet ||
                        f->kind == FormulaKind::ForallSet;
      FormulaPtr body;
      if (set_sorted)
        body = substitute(f->f1, {}, {{f->name, fresh}});
      else
        body = substitute(f->f1, {{f->name, NodeTerm::var(fresh)}}, {});
      body = rename_bound(body, counter);
      Formula g = *f;
      g.name = fresh;
      g.f1 = body;
      return std::make_shared<const Formula>(std::move(g));
    }
    default: {
      if (!f->f1 && !f->f2) return f;
      Formula g = *f;
      if (f->f1) g.f1 = rename_bound(f->f1, counter);
      if (f->f2) g.f2 = rename_bound(f->f2, counter);
      return std::make_shared<const Formula>(std::move(g));
    }
  }
}

// Rewrites into the compilation core: atoms, And, Not, ExistsNode,
// ExistsSet.
FormulaPtr to_core(const FormulaPtr& f) {
  switch (f->kind) {
    case FormulaKind::Idom:
    case FormulaKind::Dom:
    case FormulaKind::Prec:
    case FormulaKind::Eq:
    case FormulaKind::HasLabel:
    case FormulaKind::InSet:
      return f;
    case FormulaKind::Not:
      return Formula::negate(to_core(f->f1));
    case FormulaKind::And:
      return Formula::conj(to_core(f->f1), to_core(f->f2));
    case FormulaKind::Or:
      return Formula::negate(Formula::conj(Formula::negate(to_core(f->f1)),
                                           Formula::negate(to_core(f->f2))));
    case FormulaKind::Implies:
      return Formula::negate(
          Formula::conj(to_core(f->f1), Formula::negate(to_core(f->f2))));
    case FormulaKind::Iff: {
      FormulaPtr a = to_core(f->f1);
      FormulaPtr b = to_core(f->f2);
      return Formula::conj(
          Formula::negate(Formula::conj(a, Formula::negate(b))),
          Formula::negate(Formula::conj(b, Formula::negate(a))));
    }
    case FormulaKind::ExistsNode:
      return Formula::exists_node(f->name, to_core(f->f1));
    case FormulaKind::ExistsSet:
      return Formula::exists_set(f->name, to_core(f->f1));
    case FormulaKind::ForallNode:
      return Formula::negate(Formula::exists_node(
          f->name, Formula::negate(to_core(f->f1))));
    case FormulaKind::ForallSet:
      return Formula::negate(Formula::exists_set(
          f->name, Formula::negate(to_core(f->f1))));
    case FormulaKind::ExistsUnique:
    case FormulaKind::Apply:
      throw Error("compiler requires an expanded formula");
  }
  throw Error("unknown formula kind");
}

class Compiler {
 public:
  Compiler(const Theory& theory, uint32_t k, const CompileOptions& opts)
      : k_(k), opts_{opts.state_cap} {
    labels_ = theory.labels();
  }

  TreeAutomaton build(const FormulaPtr& f) {
    switch (f->kind) {
      case FormulaKind::Idom:
      case FormulaKind::Dom:
      case FormulaKind::Prec:
      case FormulaKind::Eq: {
        RankedAlphabet al = atom_alphabet({f->t1.name, f->t2.name});
        std::size_t x = *al.bit_index(f->t1.name);
        std::size_t y = *al.bit_index(f->t2.name);
        switch (f->kind) {
          case FormulaKind::Idom: return trim(idom_automaton(al, x, y));
          case FormulaKind::Dom: return trim(dom_automaton(al, x, y));
          case FormulaKind::Prec: return trim(prec_automaton(al, x, y));
          default: return trim(eq_automaton(al, x, y));
        }
      }
      case FormulaKind::HasLabel: {
        RankedAlphabet al = atom_alphabet({f->t1.name});
        return trim(member_automaton(al, *al.bit_index(f->name),
                                     *al.bit_index(f->t1.name)));
      }
      case FormulaKind::InSet: {
        RankedAlphabet al = atom_alphabet({f->t1.name, f->name});
        return trim(member_automaton(al, *al.bit_index(f->name),
                                     *al.bit_index(f->t1.name)));
      }
      case FormulaKind::Not:
        return trim(complement(build(f->f1), opts_));
      case FormulaKind::And: {
        TreeAutomaton a = build(f->f1);
        TreeAutomaton b = build(f->f2);
        align(a, b);
        return trim(product(a, b, opts_));
      }
      case FormulaKind::ExistsNode: {
        TreeAutomaton a = build(f->f1);
        if (!a.alphabet.bit_index(f->name))
          a = add_variable_bit(a, f->name);
        TreeAutomaton sing = singleton_automaton(a.alphabet, f->name);
        a = product(a, sing, opts_);
        return trim(project(a, f->name));
      }
      case FormulaKind::ExistsSet: {
        TreeAutomaton a = build(f->f1);
        if (!a.alphabet.bit_index(f->name))
          a = add_variable_bit(a, f->name);
        return trim(project(a, f->name));
      }
      default:
        throw Error("formula not in compilation core");
    }
  }

 private:
  RankedAlphabet atom_alphabet(std::vector<std::string> vars) const {
    std::sort(vars.begin(), vars.end());
    vars.erase(std::unique(vars.begin(), vars.end()), vars.end());
    RankedAlphabet al;
    al.labels = labels_;
    al.variables = std::move(vars);
    al.max_branching = k_;
    return al;
  }

  void align(TreeAutomaton& a, TreeAutomaton& b) const {
    for (const std::string& v : b.alphabet.variables)
      if (!a.alphabet.bit_index(v)) a = add_variable_bit(a, v);
    for (const std::string& v : a.alphabet.variables)
      if (!b.alphabet.bit_index(v)) b = add_variable_bit(b, v);
  }

  uint32_t k_;
  AutomatonOptions opts_;
  std::vector<std::string> labels_;
};

}  // namespace

TreeAutomaton singleton_automaton(const RankedAlphabet& alphabet,
                                  const std::string& bit) {
  auto idx = alphabet.bit_index(bit);
  if (!idx) throw Error("no alphabet bit named " + bit);
  std::size_t v = *idx;
  auto delta = [v](Bits bits, const std::vector<StateId>& c) -> StateId {
    int count = bit_of(bits, v) ? 1 : 0;
    for (StateId s : c) {
      if (s == 2) return 2;
      count += s;
    }
    return count <= 1 ? count : 2;
  };
  return materialize(alphabet, 3, delta, {1});
}

TreeAutomaton compile_open(const Theory& theory, const FormulaPtr& f,
                           uint32_t k, const CompileOptions& opts) {
  if (k == 0) throw Error("branching bound k must be at least 1");
  sort_check(theory, f);
  FormulaPtr expanded = expand(theory, f);
  if (!constants_in(expanded).empty())
    throw Error("eliminate constants before compiling");
  int counter = 0;
  FormulaPtr renamed = rename_bound(expanded, counter);
  FormulaPtr core = to_core(renamed);
  Compiler compiler(theory, k, opts);
  TreeAutomaton out = compiler.build(core);

  // Vacuous free variables still deserve their alphabet bit.
  FreeVars fv = free_vars(expanded);
  for (const std::string& v : fv.nodes)
    if (!out.alphabet.bit_index(v)) out = add_variable_bit(out, v);
  for (const std::string& v : fv.sets)
    if (!out.alphabet.bit_index(v)) out = add_variable_bit(out, v);
  return out;
}

TreeAutomaton compile(const Theory& theory, const FormulaPtr& f, uint32_t k,
                      const CompileOptions& opts) {
  FormulaPtr expanded = expand(theory, f);
  if (!free_vars(expanded).empty())
    throw SortError("compile requires a closed formula");
  return compile_open(theory, f, k, opts);
}

}  // namespace treelogic
