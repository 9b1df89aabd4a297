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

#include <doctest.h>

#include <algorithm>
#include <random>

#include "support.hpp"

using namespace ctv;
using ctv::test::infer_fixture;
using ctv::test::load;

namespace {

size_t count(const std::string& text, const std::string& needle) {
  size_t n = 0;
  for (size_t at = text.find(needle); at != std::string::npos; at = text.find(needle, at + 1)) ++n;
  return n;
}

std::vector<std::string> clause_lines(const std::string& doc) {
  std::vector<std::string> out;
  std::istringstream in(doc);
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.rfind("(declare", 0) != 0) out.push_back(line);
  }
  return out;
}

bool same_class(const std::vector<std::vector<std::string>>& classes, const std::string& a, const std::string& b) {
  for (const auto& c : classes) {
    const bool ha = std::find(c.begin(), c.end(), a) != c.end();
    const bool hb = std::find(c.begin(), c.end(), b) != c.end();
    if (ha || hb) return ha && hb;
  }
  return false;
}

// Checks the artifact invariants shared by every run.
void check_artifact(const ProofArtifact& a, const Annotations& ann) {
  for (const auto& n : a.nets) {
    CAPTURE(n);
    CHECK((a.vartime.count(n) == 0) == (a.final_state.ct.count(n) > 0));
  }
  bool all = true;
  for (const auto& s : ann.sinks) all = all && a.final_state.ct.count(s) > 0;
  CHECK(a.verified == all);
  for (const auto& [n, r] : a.vartime) CHECK(r >= 1);
  for (const auto& [n, r] : a.secret) CHECK(r >= 1);
}

}  // namespace

TEST_CASE("lookup verifies with an empty variable-time map") {
  const auto f = load("lookup");
  for (bool modular : {false, true}) {
    const ProofArtifact a = infer_fixture(f, modular);
    CHECK(a.verified);
    CHECK(a.vartime.empty());
    CHECK(a.failed_sinks.empty());
    check_artifact(a, f.ann);
  }
}

TEST_CASE("table module summary is ct(in) implies ct(out)") {
  const Program p = load("lookup").program;
  const ModuleSummary s = infer_summary(p, "S");
  REQUIRE(s.ct_clause("out") != nullptr);
  CHECK(s.ct_clause("out")->render() == "ct(in) ⇒ ct(out)");
  REQUIRE(s.pub_clause("out") != nullptr);
  CHECK(s.pub_clause("out")->pub_premise == std::vector<std::string>{"in"});
  CHECK(s.cones.at("out") == std::vector<std::string>{"in"});
}

TEST_CASE("pipeline fails with the expected variable-time order") {
  const auto f = load("pipeline_simple");
  const ProofArtifact a = infer_fixture(f, false);
  CHECK_FALSE(a.verified);
  CHECK(a.failed_sinks == std::vector<std::string>{"ID_instr"});
  check_artifact(a, f.ann);
  const auto& v = a.vartime;
  CHECK(v.count("IF_pc") == 0);
  CHECK(v.count("IF_inst") == 0);
  REQUIRE(v.size() == 4);
  CHECK(v.at("ID_instr") < v.at("ID_rt"));
  CHECK(v.at("ID_rt") < v.at("Stall"));
  CHECK(v.at("ID_rt") < v.at("EX_rt"));
  CHECK(v.at("Stall") == v.at("EX_rt"));
  CHECK(v.at("ID_instr") == 1);
}

TEST_CASE("pipeline verifies with IF_pc public and the rest flushed") {
  const auto f = load("pipeline_simple");
  Annotations ann = f.ann;
  ann.assumptions.publics = {"IF_pc"};
  ann.assumptions.flush = {"IF_inst", "ID_instr", "ID_rt", "Stall", "EX_rt"};
  const ProofArtifact a = infer(elaborate(f.program, true), ann, false);
  CHECK(a.verified);
  CHECK(a.final_state.pub.count("IF_pc"));
  CHECK(a.final_state.pub.count("Stall"));
  check_artifact(a, ann);
}

TEST_CASE("factored decode stage summary needs a public stall") {
  const Program p = load("pipeline_factored").program;
  const ModuleSummary s = infer_summary(p, "ID_stage");
  REQUIRE(s.ct_clause("ID_instr") != nullptr);
  CHECK(s.ct_clause("ID_instr")->render() == "ct(IF_instr) ∧ pub(Stall) ⇒ ct(ID_instr)");
}

TEST_CASE("constant output summaries") {
  SUBCASE("a constant wire is unconditional") {
    const Program p = parse_program(
        "module k(clk, a, o); input clk; input [3:0] a; output [3:0] o;\n"
        "assign o = 4'd9;\nendmodule");
    const ModuleSummary s = infer_summary(p, "k");
    REQUIRE(s.clauses.size() == 1);
    CHECK(s.clauses[0].render() == "ct(o) ∧ pub(o)");
  }
  SUBCASE("a constant register is public only once flushed") {
    // Its reset contents may differ between the two runs.
    const Program p = parse_program(
        "module k(clk, a, o); input clk; input [3:0] a; output reg [3:0] o;\n"
        "always @(posedge clk) o <= 4'd9;\nendmodule");
    const ModuleSummary s = infer_summary(p, "k");
    REQUIRE(s.clauses.size() == 2);
    CHECK(s.clauses[0].render() == "ct(o)");
    CHECK(s.clauses[1].render() == "flush(o) ⇒ pub(o)");
  }
}

TEST_CASE("Example 3 fails at out and verifies once stall is public") {
  const auto f = load("example3");
  const ProofArtifact a = infer_fixture(f, false);
  CHECK_FALSE(a.verified);
  CHECK(a.vartime.at("r3") < a.vartime.at("out"));
  check_artifact(a, f.ann);

  Annotations ann = f.ann;
  ann.assumptions.publics = {"stall"};
  ann.assumptions.flush = {"in", "out", "r2", "r3", "tmp1", "tmp2", "cond"};
  for (bool modular : {false, true}) {
    const ProofArtifact b = infer(elaborate(f.program, !modular), ann, modular);
    CHECK(b.verified);
    CHECK_FALSE(b.final_state.pub.count("cond"));
  }
}

TEST_CASE("color equivalence") {
  SUBCASE("Example 3 merges tmp1 and tmp2") {
    const auto f = load("example3");
    const auto classes = color_equivalence(f.program, f.program.top_module(), f.ann.sources);
    CHECK(same_class(classes, "tmp1", "tmp2"));
    CHECK_FALSE(same_class(classes, "r2", "r3"));
  }
  SUBCASE("lookup classes are singletons") {
    const auto f = load("lookup");
    for (const auto& c : color_equivalence(f.program, f.program.top_module(), f.ann.sources)) {
      CHECK(c.size() == 1);
    }
  }
  SUBCASE("identical right-hand sides share a class") {
    const Program p = parse_program(
        "module m(clk, a, x, y); input clk; input [3:0] a; output [3:0] x; output [3:0] y;\n"
        "assign x = a + 4'd1; assign y = a + 4'd1;\nendmodule");
    CHECK(same_class(color_equivalence(p, p.top_module(), {"a"}), "x", "y"));
  }
  SUBCASE("classes agree with simulated liveness") {
    // Oracle: nets in one class carry equal liveness bits in every run.
    const auto f = load("example3");
    const auto classes = color_equivalence(f.program, f.program.top_module(), f.ann.sources);
    const ElaboratedDesign d = elaborate(f.program, true);
    const Simulator sim(d);
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 200; ++trial) {
      std::vector<InputMap> l(10), r(10);
      for (int c = 0; c < 10; ++c) {
        for (const auto& i : sim.inputs()) {
          l[static_cast<size_t>(c)][i] = rng() & 0xff;
          r[static_cast<size_t>(c)][i] = rng() & 0xff;
        }
      }
      const int t = 1 + static_cast<int>(rng() % 8);
      const PairTrace tr = run_pair(sim, f.ann.sources, t, 10, l, r, {});
      for (const auto& cls : classes) {
        for (int c = 0; c < 10; ++c) {
          for (int side = 0; side < 2; ++side) {
            for (const auto& n : cls) CHECK(tr.live(c, side, n) == tr.live(c, side, cls.front()));
          }
        }
      }
    }
  }
}

TEST_CASE("infer rejects a design elaborated for the other mode") {
  const auto f = load("s4");
  CHECK_THROWS_AS(infer(elaborate(f.program, true), f.ann, true), Error);
  CHECK_THROWS_AS(infer(elaborate(f.program, false), f.ann, false), Error);
}

TEST_CASE("Horn export") {
  SUBCASE("lookup monolithic has init, cons and one ct clause") {
    const auto f = load("lookup");
    const std::string doc = export_horn(elaborate(f.program, true), f.ann, false);
    const auto lines = clause_lines(doc);
    REQUIRE(lines.size() == 3);
    CHECK(lines[0].rfind("(init ", 0) == 0);
    CHECK(lines[1].rfind("(cons ", 0) == 0);
    CHECK(lines[2].rfind("(ct ", 0) == 0);
    CHECK(doc.rfind("(declare (vars ", 0) == 0);
    CHECK(count(doc, "(inv ") >= 3);
  }
  SUBCASE("S4 modular references one summary per instance") {
    const auto f = load("s4");
    const std::string mod = export_horn(elaborate(f.program, false), f.ann, true);
    const std::string flat = export_horn(elaborate(f.program, true), f.ann, false);
    const auto lines = clause_lines(mod);
    CHECK(lines.size() == 3 + 2 * 1);
    const std::string body = mod.substr(mod.find('\n') + 1);
    // four uses in the top cons clause plus the defining sum clause
    CHECK(count(body, "(sum_S ") == 4 + 1);
    // premise and head of the step clause, premise of the sum clause
    CHECK(count(body, "(inv_S ") == 3);
    // one copy of the table instead of four
    const size_t table = count(mod, "(_ bv99 8)");
    CHECK(table > 0);
    CHECK(count(flat, "(_ bv99 8)") == 4 * table);
    CHECK(mod.size() < flat.size());
  }
  SUBCASE("export is deterministic") {
    const auto f = load("pipeline_factored");
    CHECK(export_horn(elaborate(f.program, false), f.ann, true) ==
          export_horn(elaborate(f.program, false), f.ann, true));
  }
}

TEST_CASE("modular and inlined verdicts agree on every fixture") {
  for (const char* name : test::kFixtures) {
    CAPTURE(name);
    const auto f = load(name);
    CHECK(infer_fixture(f, false).verified == infer_fixture(f, true).verified);
  }
}

TEST_CASE("verified fixtures have no simulator witness") {
  for (const char* name : test::kFixtures) {
    const auto f = load(name);
    const ProofArtifact a = infer_fixture(f, false);
    if (!a.verified) continue;
    CAPTURE(name);
    SearchOptions o;
    o.budget = 1 << 16;
    CHECK_FALSE(search_witness(elaborate(f.program, true), f.ann, o).has_value());
  }
}
