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

#include "support.hpp"

using namespace ctv;
using ctv::test::load;

namespace {

std::vector<InputMap> constant_stream(const std::string& net, uint64_t v, int n) {
  return std::vector<InputMap>(static_cast<size_t>(n), InputMap{{net, v}});
}

// Two runs of the lookup table at t=1 with in=0x00 / in=0xff.
PairTrace lookup_trace() {
  const auto f = load("lookup");
  return run_pair(elaborate(f.program, true), {"in"}, 1, 3, constant_stream("in", 0x00, 3),
                  constant_stream("in", 0xff, 3), {});
}

}  // namespace

TEST_CASE("lookup pair run matches the liveness table") {
  const PairTrace tr = lookup_trace();
  REQUIRE(tr.size() == 3);
  // cycle 1: input live, output dead in both runs
  CHECK(tr.live(1, kLeft, "in"));
  CHECK(tr.live(1, kRight, "in"));
  CHECK_FALSE(tr.live(1, kLeft, "out"));
  CHECK_FALSE(tr.live(1, kRight, "out"));
  // cycle 2: the table output is live, the input no longer is
  CHECK(tr.value(2, kLeft, "out") == 0x63);
  CHECK(tr.value(2, kRight, "out") == 0x2c);
  CHECK_FALSE(tr.live(2, kLeft, "in"));
  CHECK_FALSE(tr.live(2, kRight, "in"));
  CHECK(tr.live(2, kLeft, "out"));
  CHECK(tr.live(2, kRight, "out"));
  CHECK(tr.value(1, kLeft, "in") == 0x00);
  CHECK(tr.value(1, kRight, "in") == 0xff);
  CHECK(check_ct_on_trace(tr, {"out"}) == Verdict::ok());
}

TEST_CASE("every liveness bit is dead at cycle 0") {
  for (const char* name : test::kFixtures) {
    const auto f = load(name);
    const ElaboratedDesign d = elaborate(f.program, true);
    const Simulator sim(d);
    std::vector<InputMap> in(4);
    for (auto& m : in) {
      for (const auto& i : sim.inputs()) m[i] = 1;
    }
    const PairTrace tr = run_pair(sim, f.ann.sources, 1, 4, in, in, {});
    for (int side = 0; side < 2; ++side) {
      for (uint8_t b : tr.configs[0].live[side]) CHECK(b == 0);
    }
  }
}

TEST_CASE("trace dump is tab separated per cycle and run") {
  const std::string dump = dump_trace(lookup_trace());
  CHECK(dump.find("2\tL\tin=0x00:0\tout=0x63:1\n") != std::string::npos);
  CHECK(dump.find("2\tR\tin=0xff:0\tout=0x2c:1\n") != std::string::npos);
  CHECK(dump.rfind("0\tL\t", 0) == 0);
}

TEST_CASE("hand-built stall trace violates at the write-back register in cycle 3") {
  // Columns: stall, ID_jmp, then liveness of IF_inst, ID_inst, EX_rt, WB_reg.
  PairTrace tr;
  tr.nets = {"stall", "ID_jmp", "IF_inst", "ID_inst", "EX_rt", "WB_reg"};
  tr.widths = std::vector<int>(6, 1);
  struct Row {
    uint64_t stall[2], jmp[2];
    uint8_t live[4][2];
  };
  const Row rows[] = {
      {{0, 0}, {0, 0}, {{0, 0}, {0, 0}, {0, 0}, {0, 0}}},
      {{0, 1}, {1, 0}, {{1, 1}, {0, 0}, {0, 0}, {0, 0}}},
      {{0, 0}, {0, 1}, {{0, 1}, {1, 0}, {0, 0}, {0, 0}}},
      {{0, 0}, {0, 0}, {{1, 0}, {1, 1}, {1, 0}, {1, 0}}},
  };
  int cycle = 0;
  for (const Row& r : rows) {
    PairConfiguration c;
    c.cycle = cycle++;
    c.t = 1;
    for (int s = 0; s < 2; ++s) {
      c.store[s] = {r.stall[s], r.jmp[s], 0, 0, 0, 0};
      c.live[s] = {0, 0, r.live[0][s], r.live[1][s], r.live[2][s], r.live[3][s]};
    }
    tr.configs.push_back(c);
  }
  CHECK(check_ct_on_trace(tr, {"WB_reg"}) == Verdict::violation("WB_reg", 3, true, false));
  CHECK(check_ct_on_trace(tr, {"stall"}) == Verdict::ok());
}

TEST_CASE("single dead cycle is constant-time") {
  PairTrace tr;
  tr.nets = {"o"};
  tr.widths = {1};
  PairConfiguration c;
  c.store[0] = c.store[1] = {0};
  c.live[0] = c.live[1] = {0};
  tr.configs.push_back(c);
  CHECK(check_ct_on_trace(tr, {"o"}).constant_time);
}

TEST_CASE("identical input streams keep every net equal") {
  const auto f = load("pipeline_simple");
  const ElaboratedDesign d = elaborate(f.program, true);
  std::vector<InputMap> in;
  for (uint64_t c = 0; c < 10; ++c) in.push_back({{"IF_pc", (c * 37) & 0xff}});
  const PairTrace tr = run_pair(d, f.ann.sources, 2, 10, in, in, {});
  for (const auto& cfg : tr.configs) {
    CHECK(cfg.store[kLeft] == cfg.store[kRight]);
    CHECK(cfg.live[kLeft] == cfg.live[kRight]);
  }
  CHECK_FALSE(tr.assumption_violated);
}

TEST_CASE("a stall in the right run only changes the sink's liveness") {
  const auto f = load("pipeline_simple");
  const ElaboratedDesign d = elaborate(f.program, true);
  // Left: decoded target register 0, never a hazard. Right: target 1,
  // which collides with the previous instruction and stalls at cycle 2,
  // so the right run never latches the live instruction fetched then.
  const PairTrace tr =
      run_pair(d, f.ann.sources, 2, 8, constant_stream("IF_pc", 0x5a, 8), constant_stream("IF_pc", 0x5b, 8), {});
  bool right_stalls = false, left_stalls = false;
  for (int c = 0; c < 8; ++c) {
    right_stalls = right_stalls || tr.value(c, kRight, "Stall") == 1;
    left_stalls = left_stalls || tr.value(c, kLeft, "Stall") == 1;
  }
  CHECK(right_stalls);
  CHECK_FALSE(left_stalls);
  const Verdict v = check_ct_on_trace(tr, {"ID_instr"});
  CHECK_FALSE(v.constant_time);
  CHECK(v.sink == "ID_instr");
  CHECK(v.cycle == 3);
  CHECK(v.live_left);
  CHECK_FALSE(v.live_right);
}

TEST_CASE("step is deterministic and the left run equals a single run") {
  const auto f = load("example3");
  const ElaboratedDesign d = elaborate(f.program, true);
  const Simulator sim(d);
  std::vector<InputMap> l, r;
  for (uint64_t c = 0; c < 12; ++c) {
    l.push_back({{"in", c * 11 & 0xff}, {"cond", c & 1}, {"stall", (c >> 1) & 1}});
    r.push_back({{"in", c * 5 & 0xff}, {"cond", (c >> 2) & 1}, {"stall", c % 3 == 0}});
  }
  const PairTrace a = run_pair(sim, f.ann.sources, 2, 12, l, r, {});
  const PairTrace b = run_pair(sim, f.ann.sources, 2, 12, l, r, {});
  CHECK(dump_trace(a) == dump_trace(b));

  Simulator::Run run = sim.initial(l[0]);
  for (int c = 0; c < 12; ++c) {
    if (c > 0) run = sim.next(run, c, 2, f.ann.sources, l[static_cast<size_t>(c)]);
    CHECK(run.value == a.configs[static_cast<size_t>(c)].store[kLeft]);
    CHECK(run.live == a.configs[static_cast<size_t>(c)].live[kLeft]);
  }

  PairConfiguration next = step(sim, a.configs[4], l[5], r[5]);
  CHECK(next.store[kLeft] == a.configs[5].store[kLeft]);
  CHECK(next.live[kRight] == a.configs[5].live[kRight]);
  CHECK(next.cycle == 5);
}

TEST_CASE("values are masked to the declared width") {
  const Program p = parse_program(
      "module m(clk, a, o); input clk; input [3:0] a; output reg [3:0] o;\n"
      "always @(posedge clk) o <= a + 4'd15;\nendmodule");
  const PairTrace tr = run_pair(elaborate(p, true), {"a"}, 1, 3, constant_stream("a", 0x1f, 3),
                                constant_stream("a", 3, 3), {});
  CHECK(tr.value(0, kLeft, "a") == 0xf);
  CHECK(tr.value(1, kLeft, "o") == 0xe);
  CHECK(tr.value(1, kRight, "o") == 0x2);
}

TEST_CASE("run_pair argument errors") {
  const auto f = load("lookup");
  const ElaboratedDesign d = elaborate(f.program, true);
  CHECK_THROWS_AS(run_pair(d, {"in"}, 1, 0, {}, {}, {}), Error);
  CHECK_THROWS_AS(run_pair(d, {"in"}, 3, 3, constant_stream("in", 0, 3), constant_stream("in", 0, 3), {}), Error);
  CHECK_THROWS_AS(run_pair(d, {"in"}, 1, 3, std::vector<InputMap>(3), std::vector<InputMap>(3), {}), Error);
}

TEST_CASE("public input forcing copies the left stream") {
  const auto f = load("lookup");
  AssumptionSet a;
  a.publics = {"in"};
  const PairTrace tr = run_pair(elaborate(f.program, true), {"in"}, 1, 3, constant_stream("in", 0x10, 3),
                                constant_stream("in", 0x20, 3), a);
  CHECK(tr.value(2, kRight, "in") == 0x10);
  CHECK(tr.value(2, kRight, "out") == tr.value(2, kLeft, "out"));
  CHECK_FALSE(tr.assumption_violated);
}

TEST_CASE("a public internal net that differs flags the trace") {
  const auto f = load("lookup");
  AssumptionSet a;
  a.publics = {"out"};
  const PairTrace tr = run_pair(elaborate(f.program, true), {"in"}, 1, 3, constant_stream("in", 0x00, 3),
                                constant_stream("in", 0xff, 3), a);
  CHECK(tr.assumption_violated);
  CHECK_FALSE(tr.violation_note.empty());
}

TEST_CASE("witness search") {
  SUBCASE("lookup has no witness over all 65536 input pairs") {
    const auto f = load("lookup");
    SearchStats st;
    const auto w = search_witness(elaborate(f.program, true), f.ann, {}, &st);
    CHECK_FALSE(w.has_value());
    CHECK(st.exhaustive);
    // every (inL, inR) pair for each initial cycle t = 1..7
    CHECK(st.trials == 7 * 65536);
  }
  SUBCASE("pipeline has a witness that checks out") {
    const auto f = load("pipeline_simple");
    const auto w = search_witness(elaborate(f.program, true), f.ann);
    REQUIRE(w.has_value());
    CHECK_FALSE(w->assumption_violated);
    CHECK_FALSE(check_ct_on_trace(*w, f.ann.sinks).constant_time);
  }
  SUBCASE("no sources, no witness") {
    const auto f = load("pipeline_simple");
    Annotations a = f.ann;
    a.sources.clear();
    SearchOptions o;
    o.budget = 4096;
    CHECK_FALSE(search_witness(elaborate(f.program, true), a, o).has_value());
  }
  SUBCASE("search is deterministic") {
    const auto f = load("example3");
    SearchOptions o;
    o.budget = 2048;
    const auto a = search_witness(elaborate(f.program, true), f.ann, o);
    const auto b = search_witness(elaborate(f.program, true), f.ann, o);
    REQUIRE(a.has_value());
    REQUIRE(b.has_value());
    CHECK(dump_trace(*a) == dump_trace(*b));
  }
}
