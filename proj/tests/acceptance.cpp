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

// Acceptance run: one PASS/FAIL line per criterion, non-zero exit on any
// failure.

#include <sys/wait.h>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <random>

#include "gen.hpp"
#include "support.hpp"

using namespace ctv;
using ctv::test::load;
using ctv::test::slurp;

namespace {

// Collects failed expectations for one criterion.
class Checker {
 public:
  void expect(bool ok, const std::string& what) {
    if (!ok) failures_.push_back(what);
  }
  const std::vector<std::string>& failures() const { return failures_; }

 private:
  std::vector<std::string> failures_;
};

struct Criterion {
  const char* name;
  double limit_s;  // 0: no limit
  std::function<void(Checker&)> body;
};

std::set<std::string> set_of(const std::vector<std::string>& v) { return {v.begin(), v.end()}; }

bool contains(const std::vector<IlpConstraint>& cs, const std::string& text) {
  for (const auto& c : cs) {
    if (c.text() == text) return true;
  }
  return false;
}

int run_command(const std::string& cmd, std::string* out = nullptr) {
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return -1;
  char buf[4096];
  size_t n;
  while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) {
    if (out) out->append(buf, n);
  }
  const int raw = pclose(pipe);
  return WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
}

void lookup_trace(Checker& c) {
  const auto f = load("lookup");
  const PairTrace tr = run_pair(elaborate(f.program, true), {"in"}, 1, 3, std::vector<InputMap>(3, {{"in", 0x00}}),
                                std::vector<InputMap>(3, {{"in", 0xff}}), {});
  c.expect(tr.size() == 3, "three cycles");
  c.expect(tr.value(1, kLeft, "in") == 0x00 && tr.value(1, kRight, "in") == 0xff, "inputs at cycle 1");
  c.expect(tr.value(2, kLeft, "out") == 0x63, "left out at cycle 2 is 0x63");
  c.expect(tr.value(2, kRight, "out") == 0x2c, "right out at cycle 2 is 0x2c");
  // Expected liveness (in, out) per cycle, identical in both runs.
  const bool table[3][2] = {{false, false}, {true, false}, {false, true}};
  for (int cyc = 0; cyc < 3; ++cyc) {
    for (int side : {kLeft, kRight}) {
      c.expect(tr.live(cyc, side, "in") == table[cyc][0], "in liveness at cycle " + std::to_string(cyc));
      c.expect(tr.live(cyc, side, "out") == table[cyc][1], "out liveness at cycle " + std::to_string(cyc));
    }
  }
  c.expect(check_ct_on_trace(tr, {"out"}).constant_time, "trace is constant-time");
}

void lookup_verification(Checker& c) {
  const auto f = load("lookup");
  const ElaboratedDesign d = elaborate(f.program, true);
  const ProofArtifact a = infer(d, f.ann, false);
  c.expect(a.verified, "verified");
  const ModuleSummary s = infer_summary(f.program, "S");
  c.expect(s.ct_clause("out") && s.ct_clause("out")->render() == "ct(in) ⇒ ct(out)", "summary ct(in) ⇒ ct(out)");
  SearchStats stats;
  const auto w = search_witness(d, f.ann, {}, &stats);
  c.expect(!w.has_value(), "no witness");
  c.expect(stats.exhaustive, "sweep is exhaustive");
  // every (inL, inR) byte pair for each injection cycle
  c.expect(stats.trials == 7 * 65536, "65,536 pairs per injection cycle");
}

void pipeline_chain(Checker& c) {
  const auto f = load("pipeline_simple");
  const ElaboratedDesign d = elaborate(f.program, true);
  const ProofArtifact a = infer(d, f.ann, false);
  c.expect(!a.verified, "fails without assumptions");
  const auto& v = a.vartime;
  const bool have = v.count("ID_instr") && v.count("ID_rt") && v.count("Stall") && v.count("EX_rt");
  c.expect(have && v.size() == 4, "four variable-time nets");
  if (have) {
    c.expect(v.at("ID_instr") < v.at("ID_rt"), "ID_instr < ID_rt");
    c.expect(v.at("ID_rt") < v.at("Stall"), "ID_rt < Stall");
    c.expect(v.at("ID_rt") < v.at("EX_rt"), "ID_rt < EX_rt");
    c.expect(v.at("Stall") == v.at("EX_rt"), "Stall = EX_rt");
  }
  c.expect(!v.count("IF_pc") && !v.count("IF_inst"), "IF_pc and IF_inst are bottom");

  const DepGraph g = build_depgraph(d, a);
  const ReducedGraph r = reduce(g, v, f.ann.sinks, false);
  c.expect(set_of(r.graph.nodes) == std::set<std::string>{"ID_instr", "ID_rt", "Stall", "EX_rt"}, "reduced nodes");
  c.expect(r.graph.data ==
               std::set<Edge>{{"ID_instr", "ID_rt"}, {"ID_rt", "Stall"}, {"ID_rt", "EX_rt"}, {"EX_rt", "Stall"}},
           "reduced data edges");
  c.expect(r.graph.ctrl == std::set<Edge>{{"Stall", "EX_rt"}}, "reduced control edges");

  const Counterexample cex = counterexample(reduce(g, v, f.ann.sinks, true));
  c.expect(cex.nets == std::vector<std::string>{"ID_instr"}, "counterexample {ID_instr}");
  const auto b = blame(g, cex);
  c.expect(b == std::vector<std::string>{"Stall"}, "blame {Stall}");

  const IlpProblem p = build_ilp(a, g, b, {}, f.ann.sources);
  const auto cs = p.constraints();
  c.expect(contains(cs, "m_IF_inst + p_IF_pc >= p_IF_inst"), "constraint for IF_inst");
  c.expect(contains(cs, "m_ID_instr + (p_IF_inst + p_Stall)/2 >= p_ID_instr"), "constraint for ID_instr");
  const IlpSolution s = solve_ilp(p);
  c.expect(s.feasible && s.objective == 1, "objective 1");
  c.expect(s.marked == std::vector<std::string>{"IF_pc"}, "marks exactly IF_pc");

  SessionState session = start(f.program, f.ann);
  c.expect(session.suggestion && session.suggestion->candidate == "IF_pc", "session suggests IF_pc");
  if (session.suggestion) respond(session, Answer::kAccept);
  c.expect(session.status == SessionStatus::kVerified, "accepting verifies");
}

void example3(Checker& c) {
  const auto f = load("example3");
  for (bool modular : {false, true}) {
    const std::string mode = modular ? " (modular)" : " (inline)";
    SessionState s = start(f.program, f.ann, {modular});
    c.expect(s.cex.nets == std::vector<std::string>{"r3"}, "counterexample {r3}" + mode);
    c.expect(s.suggestion && s.suggestion->candidate == "stall", "suggestion stall" + mode);
    if (!s.suggestion) continue;
    respond(s, Answer::kAccept);
    c.expect(s.status == SessionStatus::kVerified, "verified" + mode);
    c.expect(s.ann.assumptions.publics == std::set<std::string>{"stall"}, "Public = {stall}" + mode);
    c.expect(!s.ann.assumptions.publics.count("cond") && !s.artifact.final_state.pub.count("cond"),
             "cond not public" + mode);
  }
}

void modularity(Checker& c) {
  const auto f = load("s4");
  const ElaboratedDesign flat = elaborate(f.program, true);
  const ElaboratedDesign mod = elaborate(f.program, false);
  const size_t hf = export_horn(flat, f.ann, false).size();
  const size_t hm = export_horn(mod, f.ann, true).size();
  c.expect(hm * 10 <= hf * 4, "Horn export at least 60% smaller (" + std::to_string(hm) + " vs " +
                                  std::to_string(hf) + " bytes)");
  const DepGraph gf = build_depgraph(flat, infer(flat, f.ann, false));
  const DepGraph gm = build_depgraph(mod, infer(mod, f.ann, true));
  const size_t sf = gf.nodes.size() + gf.edge_count();
  const size_t sm = gm.nodes.size() + gm.edge_count();
  c.expect(sm * 10 <= sf * 4,
           "graph at least 60% smaller (" + std::to_string(sm) + " vs " + std::to_string(sf) + " nodes+edges)");
  for (const char* name : test::kFixtures) {
    const auto g = load(name);
    c.expect(test::infer_fixture(g, false).verified == test::infer_fixture(g, true).verified,
             std::string("verdicts agree on ") + name);
  }
}

void ilp_oracle(Checker& c) {
  std::mt19937_64 rng(2026);
  int agree = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 1 + static_cast<int>(rng() % 15);
    const IlpProblem p = test::random_ilp(rng, n);
    const IlpSolution want = test::brute_force_ilp(p);
    const IlpSolution got = solve_ilp(p);
    const bool same = got.feasible == want.feasible &&
                      (!want.feasible || (got.objective == want.objective && got.marked == want.marked));
    if (same) ++agree;
    c.expect(same, "trial " + std::to_string(trial));
  }
  c.expect(agree == 200, std::to_string(agree) + "/200 agree");
}

void property_suites(Checker& c) {
  const int rc = run_command(std::string(CTV_PROPERTY_BIN) + " 2>&1");
  c.expect(rc == 0, "property suite exit status " + std::to_string(rc));
}

void replay(Checker& c) {
  for (const char* name : {"lookup", "s4_modular", "pipeline_accept", "pipeline_reject", "pipeline_reject_accept",
                           "pipeline_factored_modular", "example3", "example3_modular", "pipeline_unanswered"}) {
    std::string out;
    run_command(std::string(CTV_BIN) + " replay --script " + CTV_SCRIPTS_DIR + "/" + name + ".script 2>/dev/null",
                &out);
    c.expect(out == slurp(test::golden_path(std::string(name) + ".transcript")), std::string("transcript ") + name);
  }
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {"lookup pair trace and liveness table", 1.0, lookup_trace},
      {"lookup verification and exhaustive sweep", 5.0, lookup_verification},
      {"pipeline localization chain", 5.0, pipeline_chain},
      {"Example 3 suggestion", 5.0, example3},
      {"S4 modularity", 0.0, modularity},
      {"ILP brute-force agreement", 60.0, ilp_oracle},
      {"property suites", 0.0, property_suites},
      {"scripted replay", 0.0, replay},
  };
  int failed = 0;
  for (const auto& cr : criteria) {
    Checker c;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      cr.body(c);
    } catch (const std::exception& e) {
      c.expect(false, std::string("exception: ") + e.what());
    }
    const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (cr.limit_s > 0 && s >= cr.limit_s) c.expect(false, "time limit exceeded");
    const bool ok = c.failures().empty();
    failed += ok ? 0 : 1;
    char timing[32];
    std::snprintf(timing, sizeof timing, "%.3f s", s);
    std::cout << (ok ? "PASS" : "FAIL") << "  " << cr.name << "  (" << timing << ")\n";
    for (const auto& f : c.failures()) std::cout << "      " << f << "\n";
  }
  return failed == 0 ? 0 : 1;
}
