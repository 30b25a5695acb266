#include "treelogic/gb.hpp"

#include <algorithm>
#include <map>
#include <set>

#include <json.hpp>

namespace treelogic {

std::vector<std::string> GbConfig::index_labels() const {
  std::vector<std::string> out;
  for (std::size_t i = 1; i <= index_bound; ++i)
    out.push_back("Idx" + std::to_string(i));
  return out;
}

std::vector<std::string> GbConfig::all_labels() const {
  std::vector<std::string> out = {a_pos, spec,  barrier,      target,
                                  base,  trace, head,         right_landing};
  for (const std::string& f : agreement) out.push_back(f);
  for (const std::string& i : index_labels()) out.push_back(i);
  return out;
}

void GbConfig::validate() const {
  std::set<std::string> seen;
  for (const std::string& l : all_labels()) {
    if (l.empty()) throw Error("empty label name in GB configuration");
    if (!seen.insert(l).second)
      throw Error("duplicate label in GB configuration: " + l);
  }
  if (!enable_a && !enable_abar_nonref && !enable_abar_ref && !enable_head &&
      !enable_right)
    throw Error("at least one link type must be enabled");
}

GbConfig gb_config_from_json_text(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("malformed GB configuration: ") + e.what());
  }
  GbConfig cfg;
  auto str = [&](const char* key, std::string& out) {
    if (j.contains(key)) out = j.at(key).get<std::string>();
  };
  str("a_pos", cfg.a_pos);
  str("spec", cfg.spec);
  str("barrier", cfg.barrier);
  str("target", cfg.target);
  str("base", cfg.base);
  str("trace", cfg.trace);
  str("head", cfg.head);
  str("right_landing", cfg.right_landing);
  if (j.contains("agreement"))
    cfg.agreement = j.at("agreement").get<std::vector<std::string>>();
  if (j.contains("index_bound"))
    cfg.index_bound = j.at("index_bound").get<std::size_t>();
  auto flag = [&](const char* key, bool& out) {
    if (j.contains(key)) out = j.at(key).get<bool>();
  };
  flag("enable_a", cfg.enable_a);
  flag("enable_abar_nonref", cfg.enable_abar_nonref);
  flag("enable_abar_ref", cfg.enable_abar_ref);
  flag("enable_head", cfg.enable_head);
  flag("enable_right", cfg.enable_right);
  cfg.validate();
  return cfg;
}

std::string gb_config_to_json_text(const GbConfig& cfg) {
  nlohmann::json j;
  j["a_pos"] = cfg.a_pos;
  j["spec"] = cfg.spec;
  j["barrier"] = cfg.barrier;
  j["target"] = cfg.target;
  j["base"] = cfg.base;
  j["trace"] = cfg.trace;
  j["head"] = cfg.head;
  j["right_landing"] = cfg.right_landing;
  j["agreement"] = cfg.agreement;
  j["index_bound"] = cfg.index_bound;
  j["enable_a"] = cfg.enable_a;
  j["enable_abar_nonref"] = cfg.enable_abar_nonref;
  j["enable_abar_ref"] = cfg.enable_abar_ref;
  j["enable_head"] = cfg.enable_head;
  j["enable_right"] = cfg.enable_right;
  return j.dump(2) + "\n";
}

namespace {

NodeTerm v(const char* name) { return NodeTerm::var(name); }

FormulaPtr label(const std::string& l, const NodeTerm& t) {
  return Formula::has_label(l, t);
}

FormulaPtr call(const std::string& def, std::vector<ApplyArg> args) {
  return Formula::apply(def, std::move(args));
}

// Disjunction over the index labels of idx(x) & idx(y); false when the
// bound is zero.
FormulaPtr same_index(const GbConfig& cfg, const NodeTerm& x,
                      const NodeTerm& y) {
  std::vector<FormulaPtr> parts;
  for (const std::string& i : cfg.index_labels())
    parts.push_back(Formula::conj(label(i, x), label(i, y)));
  if (parts.empty()) return Formula::negate(Formula::eq(x, x));
  return Formula::disj_all(std::move(parts));
}

FormulaPtr no_index(const GbConfig& cfg, const NodeTerm& x) {
  std::vector<FormulaPtr> parts;
  for (const std::string& i : cfg.index_labels())
    parts.push_back(Formula::negate(label(i, x)));
  if (parts.empty()) return Formula::eq(x, x);
  return Formula::conj_all(std::move(parts));
}

// x is a moved element: a landing site or an intermediate trace.
FormulaPtr mover(const GbConfig& cfg, const NodeTerm& x) {
  return Formula::disj(label(cfg.target, x), label(cfg.trace, x));
}

FormulaPtr no_barrier_between(const NodeTerm& x, const NodeTerm& y) {
  return Formula::negate(Formula::exists_node(
      "z", call("InterveningBarrier",
                {ApplyArg(v("z")), ApplyArg(x), ApplyArg(y)})));
}

// Minimality in the shape of the A-bar clause, with the intervener class
// given by `blocker`.
FormulaPtr minimality(const NodeTerm& x, const NodeTerm& y,
                      const FormulaPtr& blocker_of_z) {
  return Formula::negate(Formula::exists_node(
      "z",
      Formula::conj_all(
          {blocker_of_z,
           call("CCommands", {ApplyArg(v("z")), ApplyArg(x)}),
           call("Intervenes",
                {ApplyArg(v("z")), ApplyArg(x), ApplyArg(y)})})));
}

}  // namespace

std::vector<Definition> emit_gb_core(const GbConfig& cfg) {
  cfg.validate();
  std::vector<Definition> out;
  NodeTerm x = v("x"), y = v("y"), z = v("z");

  {
    Definition d;
    d.name = "Branches";
    d.params = {{"x", Sort::Node}};
    d.body = Formula::exists_node(
        "y", Formula::exists_node(
                 "z", Formula::conj_all(
                          {Formula::idom(x, y), Formula::idom(x, z),
                           Formula::negate(Formula::eq(y, z))})));
    out.push_back(std::move(d));
  }
  {
    Definition d;
    d.name = "ProperDom";
    d.params = {{"x", Sort::Node}, {"y", Sort::Node}};
    d.body = Formula::conj(Formula::dom(x, y),
                           Formula::negate(Formula::eq(x, y)));
    out.push_back(std::move(d));
  }
  {
    // Every branching node properly dominating x dominates y; equivalent
    // to the first-branching-node formulation on trees.
    Definition d;
    d.name = "CCommands";
    d.params = {{"x", Sort::Node}, {"y", Sort::Node}};
    d.body = Formula::conj_all(
        {Formula::negate(Formula::dom(x, y)),
         Formula::negate(Formula::dom(y, x)),
         Formula::forall_node(
             "z", Formula::implies(
                      Formula::conj(call("Branches", {ApplyArg(z)}),
                                    call("ProperDom",
                                         {ApplyArg(z), ApplyArg(x)})),
                      Formula::dom(z, y)))});
    out.push_back(std::move(d));
  }
  {
    Definition d;
    d.name = "Intervenes";
    d.params = {{"z", Sort::Node}, {"x", Sort::Node}, {"y", Sort::Node}};
    d.body = Formula::conj(call("ProperDom", {ApplyArg(z), ApplyArg(y)}),
                           Formula::negate(Formula::dom(z, x)));
    out.push_back(std::move(d));
  }
  {
    Definition d;
    d.name = "InterveningBarrier";
    d.params = {{"z", Sort::Node}, {"x", Sort::Node}, {"y", Sort::Node}};
    d.body = Formula::conj(
        label(cfg.barrier, z),
        call("Intervenes", {ApplyArg(z), ApplyArg(x), ApplyArg(y)}));
    out.push_back(std::move(d));
  }
  {
    Definition d;
    d.name = "FEq";
    d.params = {{"x", Sort::Node}, {"y", Sort::Node}};
    std::vector<FormulaPtr> parts;
    for (const std::string& f : cfg.agreement)
      parts.push_back(Formula::iff(label(f, x), label(f, y)));
    d.body = parts.empty() ? Formula::eq(x, x)
                           : Formula::conj_all(std::move(parts));
    out.push_back(std::move(d));
  }
  {
    Definition d;
    d.name = "AbarAntecedentGoverns";
    d.params = {{"x", Sort::Node}, {"y", Sort::Node}};
    d.body = Formula::conj_all(
        {Formula::negate(label(cfg.a_pos, x)),
         call("CCommands", {ApplyArg(x), ApplyArg(y)}),
         call("FEq", {ApplyArg(x), ApplyArg(y)}),
         no_barrier_between(x, y),
         minimality(x, y,
                    Formula::conj(label(cfg.spec, v("z")),
                                  Formula::negate(label(cfg.a_pos, v("z")))))});
    out.push_back(std::move(d));
  }
  return out;
}

std::vector<Definition> emit_link_types(const GbConfig& cfg) {
  cfg.validate();
  NodeTerm x = v("x"), y = v("y"), z = v("z");
  std::vector<Definition> out;
  auto mk = [&](const std::string& name, std::vector<FormulaPtr> parts) {
    Definition d;
    d.name = name;
    d.params = {{"x", Sort::Node}, {"y", Sort::Node}};
    d.body = Formula::conj_all(std::move(parts));
    out.push_back(std::move(d));
  };

  // Every link relates a mover to a trace and follows the closest-licensor
  // shape of antecedent government with its own intervener class.
  mk("ALink",
     {mover(cfg, x), label(cfg.trace, y), label(cfg.a_pos, x),
      label(cfg.a_pos, y), Formula::negate(label(cfg.head, x)),
      no_index(cfg, x), call("CCommands", {ApplyArg(x), ApplyArg(y)}),
      call("FEq", {ApplyArg(x), ApplyArg(y)}), no_barrier_between(x, y),
      minimality(x, y, label(cfg.a_pos, z))});

  mk("AbarNonRefLink",
     {mover(cfg, x), label(cfg.trace, y),
      Formula::negate(label(cfg.head, x)),
      Formula::negate(label(cfg.right_landing, x)), no_index(cfg, x),
      call("AbarAntecedentGoverns", {ApplyArg(x), ApplyArg(y)})});

  mk("AbarRefLink",
     {mover(cfg, x), label(cfg.trace, y),
      Formula::negate(label(cfg.head, x)),
      Formula::negate(label(cfg.right_landing, x)), same_index(cfg, x, y),
      call("CCommands", {ApplyArg(x), ApplyArg(y)}),
      call("FEq", {ApplyArg(x), ApplyArg(y)}),
      minimality(x, y, same_index(cfg, z, x))});

  mk("X0Link",
     {mover(cfg, x), label(cfg.trace, y), label(cfg.head, x),
      label(cfg.head, y), no_index(cfg, x),
      call("CCommands", {ApplyArg(x), ApplyArg(y)}),
      call("FEq", {ApplyArg(x), ApplyArg(y)}), no_barrier_between(x, y),
      minimality(x, y, label(cfg.head, z))});

  mk("RightLink",
     {mover(cfg, x), label(cfg.trace, y), label(cfg.right_landing, x),
      Formula::negate(label(cfg.head, x)),
      Formula::negate(label(cfg.a_pos, x)), no_index(cfg, x),
      Formula::prec(y, x), call("CCommands", {ApplyArg(x), ApplyArg(y)}),
      call("FEq", {ApplyArg(x), ApplyArg(y)}), no_barrier_between(x, y)});

  return out;
}

std::vector<std::string> enabled_link_names(const GbConfig& cfg) {
  std::vector<std::string> names;
  if (cfg.enable_a) names.push_back("ALink");
  if (cfg.enable_abar_nonref) names.push_back("AbarNonRefLink");
  if (cfg.enable_abar_ref) names.push_back("AbarRefLink");
  if (cfg.enable_head) names.push_back("X0Link");
  if (cfg.enable_right) names.push_back("RightLink");
  return names;
}

Definition emit_link(const GbConfig& cfg) {
  cfg.validate();
  Definition d;
  d.name = "Link";
  d.params = {{"x", Sort::Node}, {"y", Sort::Node}};
  std::vector<FormulaPtr> parts;
  for (const std::string& name : enabled_link_names(cfg))
    parts.push_back(
        call(name, {ApplyArg(v("x")), ApplyArg(v("y"))}));
  d.body = Formula::disj_all(std::move(parts));
  return d;
}

std::vector<FormulaPtr> link_exclusivity_axioms(const GbConfig& cfg) {
  std::vector<std::string> names = enabled_link_names(cfg);
  std::vector<FormulaPtr> out;
  for (std::size_t i = 0; i < names.size(); ++i) {
    for (std::size_t j = i + 1; j < names.size(); ++j) {
      out.push_back(Formula::forall_node(
          "x",
          Formula::forall_node(
              "y", Formula::negate(Formula::conj(
                       call(names[i], {ApplyArg(v("x")), ApplyArg(v("y"))}),
                       call(names[j],
                            {ApplyArg(v("x")), ApplyArg(v("y"))}))))));
    }
  }
  return out;
}

Definition emit_chain(const GbConfig& cfg) {
  cfg.validate();
  Definition d;
  d.name = "Chain";
  d.params = {{"X", Sort::Set}};
  NodeTerm x = v("x"), y = v("y");
  auto in_x = [&](const NodeTerm& t) { return Formula::in_set("X", t); };

  FormulaPtr one_target = Formula::exists_unique(
      "x", Formula::conj(in_x(x), label(cfg.target, x)));
  FormulaPtr one_base = Formula::exists_unique(
      "x", Formula::conj(in_x(x), label(cfg.base, x)));
  FormulaPtr unique_antecedent = Formula::forall_node(
      "x",
      Formula::implies(
          Formula::conj(in_x(x), Formula::negate(label(cfg.target, x))),
          Formula::exists_unique(
              "y", Formula::conj(in_x(y), call("Link", {ApplyArg(y),
                                                        ApplyArg(x)})))));
  FormulaPtr unique_successor = Formula::forall_node(
      "x",
      Formula::implies(
          Formula::conj(in_x(x), Formula::negate(label(cfg.base, x))),
          Formula::exists_unique(
              "y", Formula::conj(in_x(y), call("Link", {ApplyArg(x),
                                                        ApplyArg(y)})))));
  FormulaPtr closed = Formula::forall_node(
      "x",
      Formula::forall_node(
          "y",
          Formula::implies(
              Formula::conj(
                  in_x(x),
                  Formula::disj(call("Link", {ApplyArg(x), ApplyArg(y)}),
                                call("Link", {ApplyArg(y), ApplyArg(x)}))),
              in_x(y))));
  d.body = Formula::conj_all({one_target, one_base, unique_antecedent,
                              unique_successor, closed});
  return d;
}

Theory gb_core_theory(const GbConfig& cfg) {
  cfg.validate();
  Theory t;
  for (const std::string& l : cfg.all_labels()) t.add_label(l);
  for (Definition& d : emit_gb_core(cfg)) t.add_definition(std::move(d));
  return t;
}

Theory gb_theory(const GbConfig& cfg) {
  Theory t = gb_core_theory(cfg);
  for (Definition& d : emit_link_types(cfg)) t.add_definition(std::move(d));
  t.add_definition(emit_link(cfg));
  t.add_definition(emit_chain(cfg));
  for (FormulaPtr& ax : link_exclusivity_axioms(cfg))
    t.add_axiom(std::move(ax));
  // Nodes marked as trivial chains take part in no movement.
  NodeTerm x = v("x"), y = v("y");
  t.add_axiom(Formula::forall_node(
      "x",
      Formula::implies(
          Formula::conj(label(cfg.target, x), label(cfg.base, x)),
          Formula::negate(Formula::exists_node(
              "y",
              Formula::disj(call("Link", {ApplyArg(x), ApplyArg(y)}),
                            call("Link", {ApplyArg(y), ApplyArg(x)})))))));
  return t;
}

namespace {

std::string link_display_name(const std::string& def_name) {
  if (def_name == "ALink") return "a";
  if (def_name == "AbarNonRefLink") return "abar_nonref";
  if (def_name == "AbarRefLink") return "abar_ref";
  if (def_name == "X0Link") return "x0";
  if (def_name == "RightLink") return "right";
  return def_name;
}

}  // namespace

ChainReport chain_report(const LabeledTree& tree, const GbConfig& cfg,
                         const EvalOptions& opts) {
  cfg.validate();
  Theory theory = gb_theory(cfg);
  std::size_t n = tree.size();

  // All chains, via the Chain predicate itself.
  std::vector<Valuation> sets = find_assignments(
      tree, theory, Formula::apply("Chain", {ApplyArg(SetVar{"X"})}),
      {{"X", Sort::Set}}, opts);

  std::vector<std::set<std::size_t>> chains;
  std::vector<int> owner(n, -1);
  for (const Valuation& val : sets) {
    const auto& members = val.set_bindings.at("X");
    std::set<std::size_t> chain;
    for (const GornAddress& a : members) chain.insert(tree.index_of(a));
    for (std::size_t i : chain) {
      if (owner[i] >= 0)
        throw PartitionViolation(
            "node " + tree.node(i).to_string() +
                " belongs to more than one chain",
            tree.node(i));
      owner[i] = static_cast<int>(chains.size());
    }
    chains.push_back(std::move(chain));
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (owner[i] < 0)
      throw PartitionViolation(
          "node " + tree.node(i).to_string() + " is covered by no chain",
          tree.node(i));
  }

  // Types and Link order within each chain.
  TreeContext ctx(tree);
  std::vector<std::string> names = enabled_link_names(cfg);
  std::vector<Evaluator> evals;
  evals.reserve(names.size());
  for (const std::string& name : names)
    evals.emplace_back(theory,
                       Formula::apply(name, {ApplyArg(NodeTerm::var("x")),
                                             ApplyArg(NodeTerm::var("y"))}),
                       opts);

  ChainReport report;
  for (const auto& chain : chains) {
    ChainEntry entry;
    std::vector<std::size_t> members(chain.begin(), chain.end());
    std::set<std::string> types;
    std::map<std::size_t, std::size_t> successor;
    std::set<std::size_t> has_antecedent;
    for (std::size_t a : members) {
      for (std::size_t b : members) {
        if (a == b) continue;
        for (std::size_t t = 0; t < names.size(); ++t) {
          // Free variables are name-sorted: x precedes y.
          if (evals[t].eval_raw(ctx, {a, b})) {
            types.insert(link_display_name(names[t]));
            successor[a] = b;
            has_antecedent.insert(b);
          }
        }
      }
    }
    entry.trivial = members.size() == 1;
    if (entry.trivial) {
      entry.type = "";
      entry.members = {tree.node(members[0])};
    } else {
      entry.type = types.size() == 1 ? *types.begin() : "mixed";
      // Walk from the Target end down the successor map.
      std::size_t head = members[0];
      for (std::size_t m : members)
        if (!has_antecedent.count(m)) head = m;
      std::set<std::size_t> seen;
      std::size_t cur = head;
      while (true) {
        entry.members.push_back(tree.node(cur));
        seen.insert(cur);
        auto it = successor.find(cur);
        if (it == successor.end() || seen.count(it->second)) break;
        cur = it->second;
      }
      // Any member missed by the walk still gets listed.
      for (std::size_t m : members)
        if (!seen.count(m)) entry.members.push_back(tree.node(m));
    }
    report.chains.push_back(std::move(entry));
  }

  std::sort(report.chains.begin(), report.chains.end(),
            [](const ChainEntry& a, const ChainEntry& b) {
              if (a.trivial != b.trivial) return !a.trivial;
              return a.members.front() < b.members.front();
            });

  // Same-type span overlap; spans run from the chain's least common
  // ancestor down to each member.
  std::map<std::string, std::vector<std::vector<char>>> spans_by_type;
  for (std::size_t ci = 0; ci < report.chains.size(); ++ci) {
    const ChainEntry& entry = report.chains[ci];
    if (entry.trivial) continue;
    std::vector<uint32_t> lca_path = entry.members.front().path();
    for (const GornAddress& m : entry.members) {
      std::size_t common = 0;
      const auto& p = m.path();
      while (common < lca_path.size() && common < p.size() &&
             lca_path[common] == p[common])
        ++common;
      lca_path.resize(common);
    }
    GornAddress lca(std::move(lca_path));
    std::vector<char> span(n, 0);
    for (std::size_t i = 0; i < n; ++i) {
      if (!lca.is_prefix_of(tree.node(i))) continue;
      for (const GornAddress& m : entry.members) {
        if (tree.node(i).is_prefix_of(m)) {
          span[i] = 1;
          break;
        }
      }
    }
    spans_by_type[entry.type].push_back(std::move(span));
  }
  uint32_t max_overlap = 1;
  for (const auto& [type, spans] : spans_by_type) {
    for (std::size_t i = 0; i < n; ++i) {
      uint32_t count = 0;
      for (const auto& span : spans) count += span[i];
      max_overlap = std::max(max_overlap, count);
    }
  }
  report.max_overlap = max_overlap;
  return report;
}

}  // namespace treelogic
