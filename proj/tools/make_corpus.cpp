// Regenerates the shipped corpus from the theory emitters.  Run from the
// repository root: build/make_corpus [output-dir]
#include <fstream>
#include <iostream>
#include <string>

#include "treelogic/gb.hpp"
#include "treelogic/gpsg.hpp"
#include "treelogic/syntax.hpp"

using namespace treelogic;

namespace {

void write(const std::string& dir, const std::string& name,
           const std::string& text) {
  std::ofstream out(dir + "/" + name, std::ios::binary);
  if (!out) {
    std::cerr << "cannot write " << dir << "/" << name << "\n";
    std::exit(1);
  }
  out << text;
  std::cout << "wrote " << dir << "/" << name << "\n";
}

std::string canonical_tree(const std::string& text) {
  return print_tree(parse_tree(text)) + "\n";
}

}  // namespace

int main(int argc, char** argv) {
  std::string dir = argc > 1 ? argv[1] : "corpus";

  write(dir, "gpsg_core.thy", print_theory(gpsg_core_theory()));
  write(dir, "gpsg_fsd_example.thy", print_theory(gpsg_fsd_example_theory()));

  GbConfig cfg;
  write(dir, "gb_core.thy", print_theory(gb_core_theory(cfg)));
  write(dir, "gb_english_fragment.thy", print_theory(gb_theory(cfg)));
  write(dir, "gb_english.json", gb_config_to_json_text(cfg));

  // The worked local tree and the feature-default example trees.
  write(dir, "id5.tree", canonical_tree("({V2} ({H,SUBCAT5}) ({N2}) ({N2}))"));
  write(dir, "fsd_ok_inv.tree",
        canonical_tree("({S} ({INV,V2} ({H,SUBCAT5} ({INV,V0})) ({N2}) "
                       "({N2})) ({N2}))"));
  write(dir, "fsd_bad_inv.tree",
        canonical_tree("({S} ({INV,V2} ({H,SUBCAT5} ({INV,V0}) ({V0})) "
                       "({N2}) ({N2})) ({N2}))"));
  write(dir, "fsd_ok_pas.tree",
        canonical_tree("({PAS,V2} ({BAR0,H,PAS} ({V0})) ({N2}))"));
  write(dir, "fsd_bad_pas.tree",
        canonical_tree("({V2} ({BAR0,H,PAS} ({V0})) ({N2}))"));

  // Movement corpus: a wh-dependency, the shared-antecedent tree that no
  // chain partition covers, an all-trivial tree, and the crossed
  // head-movement tree whose same-type spans overlap.
  write(dir, "wh_movement.tree",
        canonical_tree(
            "({Base,Target} ({Spec,Target,WH}) ({Base,Target} "
            "({Base,Target}) ({Base,Target} ({Apos,Base,Target}) "
            "({Base,Target} ({Base,Target}) ({Apos,Base,Trace,WH})))))"));
  write(dir, "multi_trace.tree",
        canonical_tree("({Base,Target} ({Spec,Target,WH}) ({Base,Target} "
                       "({Apos,Base,Trace,WH}) ({Base,Target} "
                       "({Apos,Base,Trace,WH}) ({Base,Target}))))"));
  write(dir, "no_movement.tree",
        canonical_tree("({Base,Target} ({Base,Target}) ({Base,Target}))"));
  write(dir, "overlap.tree",
        canonical_tree(
            "({Base,Target} ({F1,Target,X0}) ({Base,Target} "
            "({F2,Target,X0}) ({Base,Target} ({Base,F1,Trace,X0}) "
            "({Base,Target} ({Base,F2,Trace,X0}) ({Base,Target})))))"));
  return 0;
}
