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

#include "support.hpp"

using namespace ctv;
using ctv::test::load;

namespace {

struct Round {
  test::Fixture fixture;
  ProofArtifact artifact;
  DepGraph graph;
  Counterexample cex;
  std::vector<std::string> blame_set;
};

Round round_of(const std::string& name) {
  Round r;
  r.fixture = load(name);
  const ElaboratedDesign d = elaborate(r.fixture.program, true);
  r.artifact = infer(d, r.fixture.ann, false);
  r.graph = build_depgraph(d, r.artifact);
  r.cex = counterexample(reduce(r.graph, r.artifact.vartime, r.fixture.ann.sinks, true));
  r.blame_set = blame(r.graph, r.cex);
  return r;
}

IlpProblem ilp_of(const Round& r, const std::set<std::string>& no = {}) {
  return build_ilp(r.artifact, r.graph, r.blame_set, no, r.fixture.ann.sources);
}

std::vector<std::string> texts(const IlpProblem& p) {
  std::vector<std::string> out;
  for (const auto& c : p.constraints()) out.push_back(c.text());
  return out;
}

bool contains(const std::vector<std::string>& v, const std::string& x) {
  return std::find(v.begin(), v.end(), x) != v.end();
}

}  // namespace

TEST_CASE("blame sets") {
  CHECK(round_of("pipeline_simple").blame_set == std::vector<std::string>{"Stall"});
  CHECK(round_of("example3").blame_set == std::vector<std::string>{"stall"});
  DepGraph g;
  g.nodes = {"a", "b"};
  g.data = {{"a", "b"}};
  Counterexample cex;
  cex.nets = {"b"};
  CHECK(blame(g, cex).empty());
}

TEST_CASE("pipeline ILP constraints and objective") {
  const Round r = round_of("pipeline_simple");
  const IlpProblem p = ilp_of(r);
  const auto t = texts(p);
  CHECK(contains(t, "m_IF_inst + p_IF_pc >= p_IF_inst"));
  CHECK(contains(t, "m_ID_instr + (p_IF_inst + p_Stall)/2 >= p_ID_instr"));
  CHECK(contains(t, "m_IF_pc >= p_IF_pc"));
  CHECK(contains(t, "p_Stall = 1"));
  CHECK(p.weight.at("IF_pc") == 1);
  CHECK(p.weight.at("IF_inst") == 2);
  CHECK(p.weight.at("ID_instr") == 3);
  const std::string obj = p.objective();
  CHECK(obj.find("1 m_IF_pc") != std::string::npos);
  CHECK(obj.find("2 m_IF_inst") != std::string::npos);
  CHECK(obj.find("3 m_ID_instr") != std::string::npos);
  CHECK(p.nets.size() == 6);
}

TEST_CASE("pipeline ILP optimum marks IF_pc") {
  const Round r = round_of("pipeline_simple");
  const IlpProblem p = ilp_of(r);
  const IlpSolution s = solve_ilp(p);
  REQUIRE(s.feasible);
  CHECK(s.objective == 1);
  CHECK(s.marked == std::vector<std::string>{"IF_pc"});
  for (const auto& [v, mp] : s.assignment) CHECK(mp.first == (v == "IF_pc" ? 1 : 0));
  CHECK(s.assignment.at("Stall").second == 1);

  const AssumptionSet a = decode(s, p.nets);
  CHECK(a.publics == std::set<std::string>{"IF_pc"});
  CHECK(a.flush == std::set<std::string>{"IF_inst", "ID_instr", "ID_rt", "Stall", "EX_rt"});
}

TEST_CASE("excluding IF_pc moves the optimum to IF_inst") {
  const Round r = round_of("pipeline_simple");
  const IlpProblem p = ilp_of(r, {"IF_pc"});
  CHECK(contains(texts(p), "m_IF_pc = 0"));
  const IlpSolution s = solve_ilp(p);
  REQUIRE(s.feasible);
  CHECK(s.marked == std::vector<std::string>{"IF_inst"});
  CHECK(s.objective == 2);
  const IlpSolution e = solve_ilp(p, IlpStrategy::kExhaustive);
  CHECK(e.marked == s.marked);
  CHECK(e.objective == s.objective);
}

TEST_CASE("excluding every cut is infeasible") {
  const Round r = round_of("pipeline_simple");
  const IlpProblem p = ilp_of(r, {"IF_pc", "IF_inst", "ID_instr", "ID_rt", "Stall", "EX_rt"});
  CHECK(p.forced.empty());
  // Stall is excluded, so nothing is forced: the empty marking is optimal.
  const IlpSolution s = solve_ilp(p);
  CHECK(s.feasible);
  CHECK(s.marked.empty());

  IlpProblem q = ilp_of(r, {"IF_pc", "IF_inst", "ID_instr", "ID_rt", "EX_rt"});
  q.excluded.insert("Stall");
  CHECK_FALSE(solve_ilp(q).feasible);
}

TEST_CASE("Example 3 ILP marks stall") {
  const Round r = round_of("example3");
  const IlpProblem p = ilp_of(r);
  const IlpSolution s = solve_ilp(p);
  REQUIRE(s.feasible);
  CHECK(s.marked == std::vector<std::string>{"stall"});
  CHECK(decode(s, p.nets).publics == std::set<std::string>{"stall"});
}

TEST_CASE("empty blame gives the all-zero optimum") {
  const Round r = round_of("pipeline_simple");
  const IlpProblem p = build_ilp(r.artifact, r.graph, {}, {}, r.fixture.ann.sources);
  const IlpSolution s = solve_ilp(p);
  CHECK(s.feasible);
  CHECK(s.objective == 0);
  CHECK(s.marked.empty());
  const AssumptionSet a = decode(s, p.nets);
  CHECK(a.publics.empty());
  CHECK(a.flush.size() == p.nets.size());
}

TEST_CASE("a blame net outside the synthesis graph is stale") {
  const Round r = round_of("pipeline_simple");
  try {
    build_ilp(r.artifact, r.graph, {"nope"}, {}, r.fixture.ann.sources);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("stale artifact") != std::string::npos);
  }
}

TEST_CASE("LP dump") {
  const Round r = round_of("pipeline_simple");
  const std::string dump = ilp_of(r).dump();
  CHECK(dump.rfind("min\n obj: ", 0) == 0);
  CHECK(dump.find("\nst\n") != std::string::npos);
  CHECK(dump.find("2 m_ID_instr + p_IF_inst + p_Stall - 2 p_ID_instr >= 0") != std::string::npos);
  CHECK(dump.find("\nbinary\n") != std::string::npos);
  CHECK(dump.size() > 4);
  CHECK(dump.substr(dump.size() - 4) == "end\n");
}

TEST_CASE("decoded marks make every blame net public") {
  for (const char* name : {"pipeline_simple", "example3"}) {
    const Round r = round_of(name);
    const IlpProblem p = ilp_of(r);
    const IlpSolution s = solve_ilp(p);
    const auto pub = provably_public(p, {s.marked.begin(), s.marked.end()});
    for (const auto& b : r.blame_set) CHECK(pub.count(b));
  }
}

TEST_CASE("accepting the decoded assumptions grows the public set") {
  for (const char* name : {"pipeline_simple", "example3"}) {
    CAPTURE(name);
    const Round r = round_of(name);
    const IlpProblem p = ilp_of(r);
    const AssumptionSet a = decode(solve_ilp(p), p.nets);
    Annotations ann = r.fixture.ann;
    ann.assumptions = a;
    const ProofArtifact next = infer(elaborate(r.fixture.program, true), ann, false);
    const auto& before = r.artifact.final_state.pub;
    const auto& after = next.final_state.pub;
    CHECK(std::includes(after.begin(), after.end(), before.begin(), before.end()));
    CHECK(after.size() > before.size());
  }
}

TEST_CASE("exhaustive strategy is limited to 20 candidates") {
  IlpProblem p;
  for (int i = 0; i < 21; ++i) {
    const std::string v = "n" + std::to_string(i);
    p.nets.push_back(v);
    p.preds[v] = {};
    p.weight[v] = 1;
  }
  CHECK_THROWS_AS(solve_ilp(p, IlpStrategy::kExhaustive), Error);
  CHECK(solve_ilp(p).objective == 0);
}
