#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "treelogic/automaton.hpp"
#include "treelogic/compile.hpp"
#include "treelogic/error.hpp"
#include "treelogic/eval.hpp"
#include "treelogic/expand.hpp"
#include "treelogic/gb.hpp"
#include "treelogic/syntax.hpp"
#include "treelogic/tree.hpp"

namespace {

using namespace treelogic;

constexpr int kExitHolds = 0;
constexpr int kExitFails = 1;
constexpr int kExitUsage = 2;
constexpr int kExitBudget = 3;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write file: " + path);
  out << text;
}

std::size_t default_node_budget() {
  if (const char* env = std::getenv("TREELOGIC_NODE_BUDGET")) {
    try {
      return static_cast<std::size_t>(std::stoull(env));
    } catch (...) {
      throw Error("TREELOGIC_NODE_BUDGET is not a number");
    }
  }
  return EvalOptions{}.node_budget;
}

nlohmann::json valuation_to_json(const Valuation& v) {
  nlohmann::json j = nlohmann::json::object();
  for (const auto& [name, addr] : v.node_bindings) j[name] = addr.to_string();
  for (const auto& [name, set] : v.set_bindings) {
    nlohmann::json arr = nlohmann::json::array();
    for (const GornAddress& a : set) arr.push_back(a.to_string());
    j[name] = std::move(arr);
  }
  return j;
}

std::string valuation_to_text(const Valuation& v) {
  std::string out;
  bool first = true;
  auto sep = [&]() {
    if (!first) out += ", ";
    first = false;
  };
  for (const auto& [name, addr] : v.node_bindings) {
    sep();
    out += name + " = " + addr.to_string();
  }
  for (const auto& [name, set] : v.set_bindings) {
    sep();
    out += name + " = {";
    bool f2 = true;
    for (const GornAddress& a : set) {
      if (!f2) out += ",";
      f2 = false;
      out += a.to_string();
    }
    out += "}";
  }
  return out;
}

// Counterexample bindings for a failing universal axiom: peel the leading
// universal quantifiers and search assignments falsifying the body.
std::vector<Valuation> counterexamples(const LabeledTree& tree,
                                       const Theory& theory,
                                       const FormulaPtr& axiom,
                                       const EvalOptions& opts) {
  FormulaPtr body = axiom;
  std::vector<FreeVarSpec> vars;
  while (body->kind == FormulaKind::ForallNode ||
         body->kind == FormulaKind::ForallSet) {
    vars.push_back({body->name, body->kind == FormulaKind::ForallNode
                                    ? Sort::Node
                                    : Sort::Set});
    body = body->f1;
  }
  if (vars.empty()) return {};
  return find_assignments(tree, theory, Formula::negate(body), vars, opts);
}

int cmd_check(const std::string& theory_path, const std::string& tree_path,
              bool assignments, bool json, std::size_t budget) {
  Theory theory = parse_theory(read_file(theory_path));
  LabeledTree tree = parse_tree(read_file(tree_path));
  EvalOptions opts{budget};
  SatisfactionResult res = satisfies(tree, theory, opts);
  if (res.satisfied) {
    if (json)
      std::cout << nlohmann::json{{"ok", true}}.dump(2) << "\n";
    else
      std::cout << "ok\n";
    return kExitHolds;
  }
  Theory closed = eliminate_constants(theory);
  const FormulaPtr& axiom = closed.axioms()[*res.failing_axiom];
  std::vector<Valuation> vals;
  if (assignments) vals = counterexamples(tree, closed, axiom, opts);
  if (json) {
    nlohmann::json j;
    j["ok"] = false;
    j["failing_axiom"] = *res.failing_axiom + 1;
    j["axiom"] = print_formula(axiom);
    if (assignments) {
      nlohmann::json arr = nlohmann::json::array();
      for (const Valuation& v : vals) arr.push_back(valuation_to_json(v));
      j["assignments"] = std::move(arr);
    }
    std::cout << j.dump(2) << "\n";
  } else {
    std::cout << "fails axiom " << (*res.failing_axiom + 1) << ": "
              << print_formula(axiom) << "\n";
    if (assignments) {
      for (const Valuation& v : vals)
        std::cout << "  violated at " << valuation_to_text(v) << "\n";
    }
  }
  return kExitFails;
}

int cmd_compile(const std::string& theory_path, uint32_t k,
                const std::string& out_path, std::size_t state_cap) {
  Theory theory = parse_theory(read_file(theory_path));
  theory.validate();
  Theory closed = eliminate_constants(theory);
  FormulaPtr phi =
      closed.axioms().empty()
          ? Formula::exists_node("x", Formula::eq(NodeTerm::var("x"),
                                                  NodeTerm::var("x")))
          : Formula::conj_all(closed.axioms());
  CompileOptions opts{state_cap};
  TreeAutomaton aut = compile(closed, phi, k, opts);
  write_file(out_path, automaton_to_text(aut));
  return kExitHolds;
}

int cmd_empty(const std::string& aut_path) {
  TreeAutomaton aut = automaton_from_text(read_file(aut_path));
  return is_empty(aut) ? kExitFails : kExitHolds;
}

int cmd_witness(const std::string& aut_path, bool json) {
  TreeAutomaton aut = automaton_from_text(read_file(aut_path));
  auto w = minimal_witness(aut);
  if (!w) return kExitFails;
  if (json)
    std::cout << nlohmann::json{{"witness", print_tree(*w)}}.dump(2) << "\n";
  else
    std::cout << print_tree(*w) << "\n";
  return kExitHolds;
}

int cmd_enumerate(const std::string& theory_path, std::size_t max_nodes,
                  uint32_t k, bool count_only, bool json,
                  std::size_t budget) {
  Theory theory = parse_theory(read_file(theory_path));
  theory.validate();
  EvalOptions opts{budget};
  TreeEnumerator en(max_nodes, k, theory.labels());
  std::vector<std::string> found;
  std::size_t count = 0;
  while (auto t = en.next()) {
    if (satisfies(*t, theory, opts).satisfied) {
      ++count;
      if (!count_only) found.push_back(print_tree(*t));
    }
  }
  if (json) {
    nlohmann::json j;
    j["count"] = count;
    if (!count_only) j["trees"] = found;
    std::cout << j.dump(2) << "\n";
  } else if (count_only) {
    std::cout << count << "\n";
  } else {
    for (const std::string& s : found) std::cout << s << "\n";
  }
  return kExitHolds;
}

int cmd_chains(const std::string& theory_path, const std::string& tree_path,
               const std::string& cfg_path, int max_overlap, bool json,
               std::size_t budget) {
  Theory theory = parse_theory(read_file(theory_path));
  LabeledTree tree = parse_tree(read_file(tree_path));
  GbConfig cfg = gb_config_from_json_text(read_file(cfg_path));
  EvalOptions opts{budget};

  SatisfactionResult sat = satisfies(tree, theory, opts);
  if (!sat.satisfied) {
    std::cerr << "tree does not satisfy the theory (axiom "
              << (*sat.failing_axiom + 1) << ")\n";
    return kExitFails;
  }

  ChainReport report;
  try {
    report = chain_report(tree, cfg, opts);
  } catch (const PartitionViolation& e) {
    if (json) {
      std::cout << nlohmann::json{{"error", "partition-violation"},
                                  {"node", e.node().to_string()},
                                  {"message", e.what()}}
                       .dump(2)
                << "\n";
    } else {
      std::cout << "partition violation: " << e.what() << "\n";
    }
    return kExitFails;
  }

  if (json) {
    nlohmann::json j;
    nlohmann::json arr = nlohmann::json::array();
    for (const ChainEntry& c : report.chains) {
      nlohmann::json members = nlohmann::json::array();
      for (const GornAddress& m : c.members) members.push_back(m.to_string());
      arr.push_back({{"type", c.type},
                     {"members", std::move(members)},
                     {"trivial", c.trivial}});
    }
    j["chains"] = std::move(arr);
    j["max_overlap"] = report.max_overlap;
    std::cout << j.dump(2) << "\n";
  } else {
    std::size_t idx = 0;
    std::string trivial;
    for (const ChainEntry& c : report.chains) {
      if (c.trivial) {
        if (!trivial.empty()) trivial += ", ";
        trivial += c.members.front().to_string();
        continue;
      }
      std::cout << "chain " << ++idx << ": type=" << c.type << " members:";
      for (const GornAddress& m : c.members) std::cout << " " << m.to_string();
      std::cout << "\n";
    }
    if (!trivial.empty()) std::cout << "trivial chains: " << trivial << "\n";
    std::cout << "max_overlap: " << report.max_overlap << "\n";
  }
  if (max_overlap >= 0 &&
      report.max_overlap > static_cast<uint32_t>(max_overlap))
    return kExitFails;
  return kExitHolds;
}

int cmd_expand(const std::string& theory_path, const std::string& name,
               bool json) {
  Theory theory = parse_theory(read_file(theory_path));
  const Definition* def = theory.find_definition(name);
  if (!def) throw Error("no definition named " + name);
  FormulaPtr body = expand(theory, def->body);
  if (json) {
    nlohmann::json j;
    j["name"] = def->name;
    nlohmann::json params = nlohmann::json::array();
    for (const auto& [p, sort] : def->params) params.push_back(p);
    j["params"] = std::move(params);
    j["body"] = print_formula(body);
    std::cout << j.dump(2) << "\n";
  } else {
    std::cout << print_formula(body) << "\n";
  }
  return kExitHolds;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"tree logic toolkit: model checking and tree automata"};
  app.require_subcommand(1);

  std::string theory_path, tree_path, aut_path, cfg_path, out_path, def_name;
  bool assignments = false, json = false, count_only = false;
  std::size_t max_nodes = 0;
  uint32_t k = 2;
  int max_overlap = -1;
  std::size_t budget = 0;
  std::size_t state_cap = CompileOptions{}.state_cap;

  auto add_budget = [&](CLI::App* cmd) {
    cmd->add_option("--node-budget", budget,
                    "subset budget for set quantification");
  };

  CLI::App* check = app.add_subcommand("check", "check a tree against a theory");
  check->add_option("theory", theory_path)->required();
  check->add_option("tree", tree_path)->required();
  check->add_flag("--assignments", assignments,
                  "show counterexample bindings for the failing axiom");
  check->add_flag("--json", json);
  add_budget(check);

  CLI::App* compile_cmd =
      app.add_subcommand("compile", "compile a theory to a tree automaton");
  compile_cmd->add_option("theory", theory_path)->required();
  compile_cmd->add_option("-k,--max-branching", k, "branching bound")
      ->required();
  compile_cmd->add_option("-o,--output", out_path)->required();
  compile_cmd->add_option("--state-cap", state_cap);

  CLI::App* empty_cmd =
      app.add_subcommand("empty", "exit 0 iff the automaton accepts some tree");
  empty_cmd->add_option("automaton", aut_path)->required();

  CLI::App* witness_cmd =
      app.add_subcommand("witness", "print a minimal accepted tree");
  witness_cmd->add_option("automaton", aut_path)->required();
  witness_cmd->add_flag("--json", json);

  CLI::App* enum_cmd =
      app.add_subcommand("enumerate", "list satisfying trees within bounds");
  enum_cmd->add_option("theory", theory_path)->required();
  enum_cmd->add_option("--max-nodes", max_nodes)->required();
  enum_cmd->add_option("-k,--max-branching", k, "branching bound")->required();
  enum_cmd->add_flag("--count", count_only);
  enum_cmd->add_flag("--json", json);
  add_budget(enum_cmd);

  CLI::App* chains_cmd =
      app.add_subcommand("chains", "report movement chains of a tree");
  chains_cmd->add_option("theory", theory_path)->required();
  chains_cmd->add_option("tree", tree_path)->required();
  chains_cmd->add_option("config", cfg_path)->required();
  chains_cmd->add_option("--max-overlap", max_overlap,
                         "fail when same-type chain overlap exceeds this");
  chains_cmd->add_flag("--json", json);
  add_budget(chains_cmd);

  CLI::App* expand_cmd =
      app.add_subcommand("expand", "print a definition's expanded formula");
  expand_cmd->add_option("theory", theory_path)->required();
  expand_cmd->add_option("name", def_name)->required();
  expand_cmd->add_flag("--json", json);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (budget == 0) budget = default_node_budget();
    if (check->parsed())
      return cmd_check(theory_path, tree_path, assignments, json, budget);
    if (compile_cmd->parsed())
      return cmd_compile(theory_path, k, out_path, state_cap);
    if (empty_cmd->parsed()) return cmd_empty(aut_path);
    if (witness_cmd->parsed()) return cmd_witness(aut_path, json);
    if (enum_cmd->parsed())
      return cmd_enumerate(theory_path, max_nodes, k, count_only, json,
                           budget);
    if (chains_cmd->parsed())
      return cmd_chains(theory_path, tree_path, cfg_path, max_overlap, json,
                        budget);
    if (expand_cmd->parsed()) return cmd_expand(theory_path, def_name, json);
  } catch (const BudgetExceeded& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitBudget;
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}
