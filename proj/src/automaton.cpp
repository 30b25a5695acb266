#include "treelogic/automaton.hpp"

#include <algorithm>
#include <deque>
#include <limits>
#include <map>
#include <set>

#include <json.hpp>

#include "treelogic/error.hpp"

namespace treelogic {

std::optional<std::size_t> RankedAlphabet::bit_index(
    const std::string& name) const {
  for (std::size_t i = 0; i < labels.size(); ++i)
    if (labels[i] == name) return i;
  for (std::size_t i = 0; i < variables.size(); ++i)
    if (variables[i] == name) return labels.size() + i;
  return std::nullopt;
}

const std::string& RankedAlphabet::bit_name(std::size_t index) const {
  if (index < labels.size()) return labels[index];
  index -= labels.size();
  if (index < variables.size()) return variables[index];
  throw Error("alphabet bit index out of range");
}

std::vector<std::string> RankedAlphabet::bit_names() const {
  std::vector<std::string> out = labels;
  out.insert(out.end(), variables.begin(), variables.end());
  return out;
}

void TreeAutomaton::canonicalize() {
  std::sort(transitions.begin(), transitions.end());
  transitions.erase(std::unique(transitions.begin(), transitions.end()),
                    transitions.end());
  std::sort(final_states.begin(), final_states.end());
  final_states.erase(std::unique(final_states.begin(), final_states.end()),
                     final_states.end());
}

void TreeAutomaton::validate() const {
  if (alphabet.bit_count() > 63) throw Error("alphabet too wide");
  Bits limit = alphabet.bit_count() >= 63
                   ? ~Bits{0}
                   : (Bits{1} << alphabet.bit_count());
  std::set<std::pair<Bits, std::vector<StateId>>> seen;
  bool repeated = false;
  for (const Transition& t : transitions) {
    if (t.bits >= limit) throw Error("transition bits outside the alphabet");
    if (t.children.size() > alphabet.max_branching)
      throw Error("transition arity exceeds the branching bound");
    if (t.target >= num_states) throw Error("transition target out of range");
    for (StateId c : t.children)
      if (c >= num_states) throw Error("transition child out of range");
    if (!seen.emplace(t.bits, t.children).second) repeated = true;
  }
  for (StateId f : final_states)
    if (f >= num_states) throw Error("final state out of range");
  if (deterministic && repeated)
    throw Error("automaton marked deterministic has conflicting transitions");
}

namespace {

using SymbolKey = std::pair<Bits, uint32_t>;

std::map<SymbolKey, std::vector<std::size_t>> index_by_symbol(
    const TreeAutomaton& a) {
  std::map<SymbolKey, std::vector<std::size_t>> out;
  for (std::size_t i = 0; i < a.transitions.size(); ++i) {
    const Transition& t = a.transitions[i];
    out[{t.bits, static_cast<uint32_t>(t.children.size())}].push_back(i);
  }
  return out;
}

void require_same_alphabet(const TreeAutomaton& a, const TreeAutomaton& b) {
  if (!(a.alphabet == b.alphabet))
    throw Error("alphabet mismatch between automata");
}

}  // namespace

bool run(const TreeAutomaton& aut, const LabeledTree& tree) {
  auto index = index_by_symbol(aut);
  std::size_t n = tree.size();
  std::vector<std::vector<char>> member(n,
                                        std::vector<char>(aut.num_states, 0));

  // Address order puts ancestors first, so a reverse sweep is bottom-up.
  for (std::size_t i = n; i-- > 0;) {
    const auto& children = tree.children_of(i);
    if (children.size() > aut.alphabet.max_branching)
      throw Error("tree branching exceeds the automaton bound at " +
                  tree.node(i).to_string());
    Bits bits = 0;
    for (const std::string& l : tree.labels_at(i)) {
      auto idx = aut.alphabet.bit_index(l);
      if (!idx) throw Error("unknown label: " + l);
      bits |= Bits{1} << *idx;
    }
    auto it = index.find({bits, static_cast<uint32_t>(children.size())});
    if (it == index.end()) continue;
    for (std::size_t ti : it->second) {
      const Transition& t = aut.transitions[ti];
      bool ok = true;
      for (std::size_t ci = 0; ci < children.size(); ++ci) {
        if (!member[children[ci]][t.children[ci]]) {
          ok = false;
          break;
        }
      }
      if (ok) member[i][t.target] = 1;
    }
  }
  for (StateId f : aut.final_states)
    if (member[0][f]) return true;
  return false;
}

TreeAutomaton product(const TreeAutomaton& a, const TreeAutomaton& b,
                      const AutomatonOptions& opts) {
  require_same_alphabet(a, b);
  auto ia = index_by_symbol(a);
  auto ib = index_by_symbol(b);

  std::map<std::pair<StateId, StateId>, StateId> pair_id;
  auto get_pair = [&](StateId x, StateId y) -> StateId {
    auto it = pair_id.find({x, y});
    if (it != pair_id.end()) return it->second;
    if (pair_id.size() >= opts.state_cap)
      throw BudgetExceeded("state cap exceeded during product");
    StateId id = static_cast<StateId>(pair_id.size());
    pair_id[{x, y}] = id;
    return id;
  };

  std::set<Transition> transitions;
  bool grew = true;
  while (grew) {
    grew = false;
    std::size_t before = pair_id.size();
    for (const auto& [sym, list_a] : ia) {
      auto itb = ib.find(sym);
      if (itb == ib.end()) continue;
      for (std::size_t tia : list_a) {
        const Transition& ta = a.transitions[tia];
        for (std::size_t tib : itb->second) {
          const Transition& tb = b.transitions[tib];
          bool ok = true;
          std::vector<StateId> kids;
          kids.reserve(ta.children.size());
          for (std::size_t i = 0; i < ta.children.size(); ++i) {
            auto it = pair_id.find({ta.children[i], tb.children[i]});
            if (it == pair_id.end()) {
              ok = false;
              break;
            }
            kids.push_back(it->second);
          }
          if (!ok) continue;
          Transition t{ta.bits, std::move(kids),
                       get_pair(ta.target, tb.target)};
          transitions.insert(std::move(t));
        }
      }
    }
    if (pair_id.size() > before) grew = true;
  }

  TreeAutomaton out;
  out.alphabet = a.alphabet;
  out.num_states = static_cast<StateId>(pair_id.size());
  out.transitions.assign(transitions.begin(), transitions.end());
  std::set<StateId> fa(a.final_states.begin(), a.final_states.end());
  std::set<StateId> fb(b.final_states.begin(), b.final_states.end());
  for (const auto& [pq, id] : pair_id)
    if (fa.count(pq.first) && fb.count(pq.second))
      out.final_states.push_back(id);
  out.deterministic = a.deterministic && b.deterministic;
  out.complete = a.complete && b.complete;
  out.canonicalize();
  return out;
}

TreeAutomaton lang_union(const TreeAutomaton& a, const TreeAutomaton& b) {
  require_same_alphabet(a, b);
  TreeAutomaton out;
  out.alphabet = a.alphabet;
  out.num_states = a.num_states + b.num_states;
  out.transitions = a.transitions;
  for (Transition t : b.transitions) {
    t.target += a.num_states;
    for (StateId& c : t.children) c += a.num_states;
    out.transitions.push_back(std::move(t));
  }
  out.final_states = a.final_states;
  for (StateId f : b.final_states) out.final_states.push_back(f + a.num_states);
  out.deterministic = false;
  out.complete = false;
  out.canonicalize();
  return out;
}

TreeAutomaton determinize(const TreeAutomaton& a,
                          const AutomatonOptions& opts) {
  const std::size_t bit_count = a.alphabet.bit_count();
  if (bit_count > 24) throw Error("alphabet too wide to determinize");
  const Bits symbol_limit = Bits{1} << bit_count;
  auto index = index_by_symbol(a);

  std::map<std::vector<StateId>, StateId> subset_id;
  std::vector<std::vector<StateId>> subsets;
  std::vector<std::vector<char>> bitmaps;
  std::vector<Transition> transitions;
  const std::size_t transition_cap = std::max<std::size_t>(
      opts.state_cap, 5'000'000);

  auto intern = [&](std::vector<StateId> key) -> StateId {
    auto it = subset_id.find(key);
    if (it != subset_id.end()) return it->second;
    if (subsets.size() >= opts.state_cap)
      throw BudgetExceeded("state cap exceeded during determinization");
    StateId id = static_cast<StateId>(subsets.size());
    subset_id.emplace(key, id);
    std::vector<char> bm(a.num_states, 0);
    for (StateId q : key) bm[q] = 1;
    subsets.push_back(std::move(key));
    bitmaps.push_back(std::move(bm));
    return id;
  };

  auto target_of = [&](Bits bits, uint32_t arity,
                       const std::vector<StateId>& tuple) {
    std::vector<StateId> result;
    auto it = index.find({bits, arity});
    if (it != index.end()) {
      std::vector<char> seen(a.num_states, 0);
      for (std::size_t ti : it->second) {
        const Transition& t = a.transitions[ti];
        bool ok = true;
        for (std::size_t i = 0; i < arity; ++i) {
          if (!bitmaps[tuple[i]][t.children[i]]) {
            ok = false;
            break;
          }
        }
        if (ok && !seen[t.target]) {
          seen[t.target] = 1;
          result.push_back(t.target);
        }
      }
      std::sort(result.begin(), result.end());
    }
    return result;
  };

  // Leaf symbols seed the subset space.
  std::size_t processed = 0;
  for (Bits bits = 0; bits < symbol_limit; ++bits) {
    StateId sid = intern(target_of(bits, 0, {}));
    transitions.push_back({bits, {}, sid});
  }

  // For each newly discovered subset, add every transition whose child
  // tuple mentions it (other positions from already-known subsets).
  while (processed < subsets.size()) {
    StateId fresh = static_cast<StateId>(processed);
    ++processed;
    for (uint32_t arity = 1; arity <= a.alphabet.max_branching; ++arity) {
      std::vector<StateId> tuple(arity);
      auto tuples = [&](auto&& self, uint32_t pos, bool used_fresh) -> void {
        if (pos == arity) {
          if (!used_fresh) return;
          for (Bits bits = 0; bits < symbol_limit; ++bits) {
            if (transitions.size() >= transition_cap)
              throw BudgetExceeded(
                  "transition budget exceeded during determinization");
            StateId sid = intern(target_of(bits, arity, tuple));
            transitions.push_back({bits, tuple, sid});
          }
          return;
        }
        for (StateId s = 0; s <= fresh; ++s) {
          tuple[pos] = s;
          self(self, pos + 1, used_fresh || s == fresh);
        }
      };
      tuples(tuples, 0, false);
    }
  }

  TreeAutomaton out;
  out.alphabet = a.alphabet;
  out.num_states = static_cast<StateId>(subsets.size());
  out.transitions = std::move(transitions);
  std::set<StateId> finals(a.final_states.begin(), a.final_states.end());
  for (StateId id = 0; id < out.num_states; ++id) {
    for (StateId q : subsets[id]) {
      if (finals.count(q)) {
        out.final_states.push_back(id);
        break;
      }
    }
  }
  out.deterministic = true;
  out.complete = true;
  out.canonicalize();
  return out;
}

TreeAutomaton trim(const TreeAutomaton& a) {
  // Bottom-up reachable states.
  std::vector<char> reachable(a.num_states, 0);
  bool grew = true;
  while (grew) {
    grew = false;
    for (const Transition& t : a.transitions) {
      if (reachable[t.target]) continue;
      bool ok = true;
      for (StateId c : t.children)
        if (!reachable[c]) {
          ok = false;
          break;
        }
      if (ok) {
        reachable[t.target] = 1;
        grew = true;
      }
    }
  }
  // Useful states: participate in some accepting run.
  std::vector<char> useful(a.num_states, 0);
  for (StateId f : a.final_states)
    if (reachable[f]) useful[f] = 1;
  grew = true;
  while (grew) {
    grew = false;
    for (const Transition& t : a.transitions) {
      if (!useful[t.target]) continue;
      bool all_reachable = true;
      for (StateId c : t.children)
        if (!reachable[c]) {
          all_reachable = false;
          break;
        }
      if (!all_reachable) continue;
      for (StateId c : t.children) {
        if (!useful[c]) {
          useful[c] = 1;
          grew = true;
        }
      }
    }
  }

  std::vector<StateId> remap(a.num_states, 0);
  StateId next = 0;
  for (StateId q = 0; q < a.num_states; ++q)
    if (reachable[q] && useful[q]) remap[q] = next++;
  TreeAutomaton out;
  out.alphabet = a.alphabet;
  out.num_states = next;
  for (const Transition& t : a.transitions) {
    if (!reachable[t.target] || !useful[t.target]) continue;
    bool ok = true;
    for (StateId c : t.children)
      if (!reachable[c] || !useful[c]) {
        ok = false;
        break;
      }
    if (!ok) continue;
    Transition nt = t;
    nt.target = remap[t.target];
    for (StateId& c : nt.children) c = remap[c];
    out.transitions.push_back(std::move(nt));
  }
  for (StateId f : a.final_states)
    if (reachable[f] && useful[f]) out.final_states.push_back(remap[f]);
  out.deterministic = a.deterministic;
  out.complete = false;
  out.canonicalize();
  return out;
}

TreeAutomaton complement(const TreeAutomaton& a,
                         const AutomatonOptions& opts) {
  TreeAutomaton d = (a.deterministic && a.complete)
                        ? a
                        : determinize(trim(a), opts);
  std::set<StateId> finals(d.final_states.begin(), d.final_states.end());
  d.final_states.clear();
  for (StateId q = 0; q < d.num_states; ++q)
    if (!finals.count(q)) d.final_states.push_back(q);
  return d;
}

TreeAutomaton project(const TreeAutomaton& a, const std::string& bit) {
  auto idx = a.alphabet.bit_index(bit);
  if (!idx) throw Error("no alphabet bit named " + bit);
  std::size_t p = *idx;

  TreeAutomaton out;
  out.alphabet = a.alphabet;
  if (p < out.alphabet.labels.size()) {
    out.alphabet.labels.erase(out.alphabet.labels.begin() + p);
  } else {
    out.alphabet.variables.erase(out.alphabet.variables.begin() +
                                 (p - out.alphabet.labels.size()));
  }
  out.num_states = a.num_states;
  Bits low_mask = (Bits{1} << p) - 1;
  for (Transition t : a.transitions) {
    t.bits = (t.bits & low_mask) | ((t.bits >> (p + 1)) << p);
    out.transitions.push_back(std::move(t));
  }
  out.final_states = a.final_states;
  out.deterministic = false;
  out.complete = false;
  out.canonicalize();
  return out;
}

TreeAutomaton add_variable_bit(const TreeAutomaton& a,
                               const std::string& name) {
  if (a.alphabet.bit_index(name))
    throw Error("alphabet already has a bit named " + name);
  TreeAutomaton out;
  out.alphabet = a.alphabet;
  auto& vars = out.alphabet.variables;
  std::size_t vpos = 0;
  while (vpos < vars.size() && vars[vpos] < name) ++vpos;
  vars.insert(vars.begin() + vpos, name);
  std::size_t p = out.alphabet.labels.size() + vpos;

  out.num_states = a.num_states;
  Bits low_mask = (Bits{1} << p) - 1;
  for (const Transition& t : a.transitions) {
    Bits base = (t.bits & low_mask) | ((t.bits >> p) << (p + 1));
    Transition t0 = t;
    t0.bits = base;
    out.transitions.push_back(t0);
    Transition t1 = t;
    t1.bits = base | (Bits{1} << p);
    out.transitions.push_back(std::move(t1));
  }
  out.final_states = a.final_states;
  out.deterministic = a.deterministic;
  out.complete = a.complete;
  out.canonicalize();
  return out;
}

namespace {

constexpr uint64_t kInf = std::numeric_limits<uint64_t>::max();

// Minimum node count of a tree reaching each state.
std::vector<uint64_t> state_costs(const TreeAutomaton& a) {
  std::vector<uint64_t> cost(a.num_states, kInf);
  bool grew = true;
  while (grew) {
    grew = false;
    for (const Transition& t : a.transitions) {
      uint64_t c = 1;
      bool ok = true;
      for (StateId ch : t.children) {
        if (cost[ch] == kInf) {
          ok = false;
          break;
        }
        c += cost[ch];
      }
      if (ok && c < cost[t.target]) {
        cost[t.target] = c;
        grew = true;
      }
    }
  }
  return cost;
}

// Deterministic reconstruction used when enumeration would be impractical:
// realize each state by the canonically least cost-achieving transition.
LabeledTree reconstruct_witness(const TreeAutomaton& a,
                                const std::vector<uint64_t>& cost,
                                StateId root_state) {
  std::vector<Transition> sorted = a.transitions;
  std::sort(sorted.begin(), sorted.end());
  std::vector<GornAddress> domain;
  std::map<GornAddress, LabeledTree::LabelSet> labels;
  auto rec = [&](auto&& self, StateId q, const GornAddress& at) -> void {
    for (const Transition& t : sorted) {
      if (t.target != q) continue;
      uint64_t c = 1;
      bool ok = true;
      for (StateId ch : t.children) {
        if (cost[ch] == kInf) {
          ok = false;
          break;
        }
        c += cost[ch];
      }
      if (!ok || c != cost[q]) continue;
      domain.push_back(at);
      LabeledTree::LabelSet set;
      for (std::size_t b = 0; b < a.alphabet.bit_count(); ++b)
        if ((t.bits >> b) & 1) set.insert(a.alphabet.bit_name(b));
      if (!set.empty()) labels[at] = std::move(set);
      for (std::size_t i = 0; i < t.children.size(); ++i)
        self(self, t.children[i], at.child(static_cast<uint32_t>(i)));
      return;
    }
    throw Error("witness reconstruction failed");
  };
  rec(rec, root_state, GornAddress::root());
  return LabeledTree(std::move(domain), std::move(labels));
}

}  // namespace

bool is_empty(const TreeAutomaton& a) {
  std::vector<uint64_t> cost = state_costs(a);
  for (StateId f : a.final_states)
    if (cost[f] != kInf) return false;
  return true;
}

std::optional<LabeledTree> minimal_witness(const TreeAutomaton& a) {
  std::vector<uint64_t> cost = state_costs(a);
  uint64_t best = kInf;
  StateId best_state = 0;
  for (StateId f : a.final_states) {
    if (cost[f] < best) {
      best = cost[f];
      best_state = f;
    }
  }
  if (best == kInf) return std::nullopt;

  // Tie-break by enumeration order when the search space is small enough.
  if (best <= 12 && a.alphabet.bit_count() * best <= 20) {
    TreeEnumerator en(best, best, a.alphabet.max_branching,
                      a.alphabet.bit_names());
    while (auto t = en.next()) {
      if (run(a, *t)) return t;
    }
  }
  return reconstruct_witness(a, cost, best_state);
}

EquivalenceResult equivalent(const TreeAutomaton& a, const TreeAutomaton& b,
                             const AutomatonOptions& opts) {
  require_same_alphabet(a, b);
  TreeAutomaton only_a = product(a, complement(b, opts), opts);
  if (auto w = minimal_witness(only_a)) return {false, w};
  TreeAutomaton only_b = product(b, complement(a, opts), opts);
  if (auto w = minimal_witness(only_b)) return {false, w};
  return {true, std::nullopt};
}

std::string automaton_to_text(const TreeAutomaton& a) {
  nlohmann::json j;
  j["format_version"] = 1;
  j["alphabet"] = {{"labels", a.alphabet.labels},
                   {"variables", a.alphabet.variables},
                   {"max_branching", a.alphabet.max_branching}};
  TreeAutomaton sorted = a;
  sorted.canonicalize();
  j["num_states"] = a.num_states;
  j["deterministic"] = a.deterministic;
  j["final_states"] = sorted.final_states;
  nlohmann::json ts = nlohmann::json::array();
  for (const Transition& t : sorted.transitions) {
    std::vector<std::string> bits;
    for (std::size_t b = 0; b < a.alphabet.bit_count(); ++b)
      if ((t.bits >> b) & 1) bits.push_back(a.alphabet.bit_name(b));
    ts.push_back({{"bits", bits}, {"children", t.children},
                  {"target", t.target}});
  }
  j["transitions"] = std::move(ts);
  return j.dump(2) + "\n";
}

TreeAutomaton automaton_from_text(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("malformed automaton file: ") + e.what());
  }
  try {
    if (j.at("format_version").get<int>() != 1)
      throw Error("unsupported automaton format version");
    TreeAutomaton a;
    const auto& al = j.at("alphabet");
    a.alphabet.labels = al.at("labels").get<std::vector<std::string>>();
    a.alphabet.variables = al.at("variables").get<std::vector<std::string>>();
    a.alphabet.max_branching = al.at("max_branching").get<uint32_t>();
    a.num_states = j.at("num_states").get<StateId>();
    a.deterministic = j.at("deterministic").get<bool>();
    a.final_states = j.at("final_states").get<std::vector<StateId>>();
    for (const auto& tj : j.at("transitions")) {
      Transition t;
      for (const auto& name : tj.at("bits")) {
        auto idx = a.alphabet.bit_index(name.get<std::string>());
        if (!idx)
          throw Error("transition bit is not an alphabet bit: " +
                      name.get<std::string>());
        t.bits |= Bits{1} << *idx;
      }
      t.children = tj.at("children").get<std::vector<StateId>>();
      t.target = tj.at("target").get<StateId>();
      a.transitions.push_back(std::move(t));
    }
    a.complete = false;
    a.canonicalize();
    a.validate();
    return a;
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("malformed automaton file: ") + e.what());
  }
}

}  // namespace treelogic
