// Copyright 2026 The ctv Authors
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Library output against the checked-in golden files.

#include <doctest.h>

#include "support.hpp"

using namespace ctv;
using ctv::test::golden_path;
using ctv::test::load;
using ctv::test::slurp;

namespace {

const char* const kScripts[] = {"lookup",          "s4_modular",          "pipeline_accept",
                                "pipeline_reject", "pipeline_reject_accept", "pipeline_factored_modular",
                                "example3",        "example3_modular",    "pipeline_unanswered"};

std::string graph_report(const std::string& name) {
  const auto f = load(name);
  const ElaboratedDesign d = elaborate(f.program, true);
  const ProofArtifact a = infer(d, f.ann, false);
  const DepGraph g = build_depgraph(d, a);
  const ReducedGraph r = reduce(g, a.vartime, f.ann.sinks, true);
  std::string out = "graph\n" + dump_graph(g, a.vartime) + "reduced\n" + dump_graph(r.graph, a.vartime);
  out += "counterexample";
  for (const auto& n : counterexample(r).nets) out += " " + n;
  return out + "\n";
}

}  // namespace

TEST_CASE("scripted transcripts match the golden files") {
  for (const char* name : kScripts) {
    CAPTURE(name);
    const std::string dir = CTV_SCRIPTS_DIR;
    const Script sc = parse_script(slurp(dir + "/" + name + ".script"));
    const Program p = parse_program(slurp(dir + "/" + sc.design));
    const Annotations ann = validate_annotations(p, parse_annotations(slurp(dir + "/" + sc.annotations)));
    const ScriptedRun r = run_scripted(p, ann, sc.answers, {sc.modular.value_or(false)});
    CHECK(r.transcript == slurp(golden_path(std::string(name) + ".transcript")));
  }
}

TEST_CASE("Horn documents match the golden files") {
  SUBCASE("lookup") {
    const auto f = load("lookup");
    CHECK(export_horn(elaborate(f.program, true), f.ann, false) == slurp(golden_path("lookup.horn")));
  }
  SUBCASE("S4 modular") {
    const auto f = load("s4");
    CHECK(export_horn(elaborate(f.program, false), f.ann, true) == slurp(golden_path("s4_modular.horn")));
  }
  SUBCASE("factored pipeline modular") {
    const auto f = load("pipeline_factored");
    CHECK(export_horn(elaborate(f.program, false), f.ann, true) ==
          slurp(golden_path("pipeline_factored_modular.horn")));
  }
}

TEST_CASE("graph reports match the golden files") {
  CHECK(graph_report("pipeline_simple") == slurp(golden_path("pipeline_simple.graph")));
  CHECK(graph_report("example3") == slurp(golden_path("example3.graph")));
}
