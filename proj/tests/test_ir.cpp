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
using ctv::test::slurp;

namespace {

std::set<std::string> net_names(const ModuleDef& m) {
  std::set<std::string> out;
  for (const auto& n : m.nets) out.insert(n.name);
  return out;
}

int count_case_processes(const ModuleDef& m) {
  int n = 0;
  for (const auto& p : m.processes) {
    if (p.kind == ProcessKind::kClocked && p.body->kind == Stmt::Kind::kCase) ++n;
  }
  return n;
}

}  // namespace

TEST_CASE("lookup parses to one module with a clocked case over in") {
  const Program p = load("lookup").program;
  REQUIRE(p.modules.size() == 1);
  const ModuleDef& m = p.top_module();
  CHECK(m.name == "S");
  CHECK(m.find_net("in")->width == 8);
  CHECK(m.find_net("in")->is_input());
  CHECK(m.find_net("out")->width == 8);
  CHECK(m.find_net("out")->is_output());
  CHECK(m.find_net("clk")->width == 1);
  CHECK(m.clock == "clk");
  REQUIRE(m.processes.size() == 1);
  CHECK(m.processes[0].kind == ProcessKind::kClocked);
  REQUIRE(m.processes[0].body->kind == Stmt::Kind::kCase);
  CHECK(print_expr(*m.processes[0].body->cond) == "in");
  CHECK(m.processes[0].body->arms.size() == 256);
}

TEST_CASE("empty module has no nets and no processes") {
  const Program p = parse_program("module m(); endmodule");
  REQUIRE(p.modules.size() == 1);
  CHECK(p.top == "m");
  CHECK(p.top_module().nets.empty());
  CHECK(p.top_module().processes.empty());
}

TEST_CASE("pipeline fixture declares exactly the graph nets plus the clock") {
  const Program p = load("pipeline_simple").program;
  CHECK(net_names(p.top_module()) ==
        std::set<std::string>{"clk", "IF_pc", "IF_inst", "ID_instr", "ID_rt", "Stall", "EX_rt"});
}

TEST_CASE("parse, print, parse is stable on every fixture") {
  for (const char* name : test::kFixtures) {
    CAPTURE(name);
    const Program p = load(name).program;
    const Program again = parse_program(print_program(p));
    CHECK(again == p);
    CHECK(print_program(again) == print_program(p));
  }
}

TEST_CASE("syntax errors carry line and column") {
  try {
    parse_program("module m(a);\n  input a\nendmodule\n");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line() >= 2);
    CHECK(e.column() >= 1);
  }
}

TEST_CASE("semantic errors are rejected") {
  SUBCASE("duplicate declaration") {
    CHECK_THROWS_AS(parse_program("module m(a); input a; wire a; endmodule"), Error);
  }
  SUBCASE("unresolved identifier") {
    CHECK_THROWS_AS(parse_program("module m(a, b); input a; output b; assign b = c; endmodule"), Error);
  }
  SUBCASE("two drivers for one wire") {
    CHECK_THROWS_AS(parse_program("module m(a, b); input a; output b; assign b = a; assign b = ~a; endmodule"),
                    Error);
  }
  SUBCASE("reg assigned in two clocked processes") {
    CHECK_THROWS_AS(parse_program("module m(clk, a); input clk; input a; reg r;\n"
                                  "always @(posedge clk) r <= a;\n"
                                  "always @(posedge clk) r <= ~a;\nendmodule"),
                    Error);
  }
  SUBCASE("combinational loop") {
    CHECK_THROWS_AS(parse_program("module m(a, b); input a; output b; wire c;\n"
                                  "assign c = b ^ a; assign b = c; endmodule"),
                    Error);
  }
  SUBCASE("recursive instantiation") {
    CHECK_THROWS_AS(parse_program("module m(clk, a); input clk; input a; m u(.clk(clk), .a(a)); endmodule"), Error);
  }
}

TEST_CASE("elaborating S4 inline copies the table four times") {
  const Program p = load("s4").program;
  const ElaboratedDesign flat = elaborate(p, true);
  REQUIRE(flat.inlined);
  REQUIRE(flat.program.modules.size() == 1);
  const ModuleDef& top = flat.top();
  CHECK(count_case_processes(top) == 4);
  for (const char* inst : {"S_0", "S_1", "S_2", "S_3"}) {
    CHECK(top.find_net(std::string(inst) + ".in") != nullptr);
    CHECK(top.find_net(std::string(inst) + ".out") != nullptr);
  }
  CHECK(top.instances.empty());
}

TEST_CASE("elaborating S4 modular keeps two modules and four instances") {
  const Program p = load("s4").program;
  const ElaboratedDesign mod = elaborate(p, false);
  CHECK_FALSE(mod.inlined);
  CHECK(mod.program.modules.size() == 2);
  CHECK(mod.top().instances.size() == 4);
  CHECK(mod.child_modules() == std::vector<std::string>{"S"});
  CHECK(mod.tree.children.size() == 4);
  CHECK(count_case_processes(mod.module("S")) == 1);
}

TEST_CASE("a design without instances elaborates to itself either way") {
  const Program p = load("pipeline_simple").program;
  const ElaboratedDesign a = elaborate(p, true);
  const ElaboratedDesign b = elaborate(p, false);
  CHECK(a.top() == p.top_module());
  CHECK(b.top() == p.top_module());
}

TEST_CASE("elaboration errors") {
  SUBCASE("port width mismatch") {
    CHECK_THROWS_AS(elaborate(parse_program("module c(clk, x); input clk; input [3:0] x; endmodule\n"
                                            "module t(clk, a); input clk; input [7:0] a; c u(.clk(clk), .x(a));\n"
                                            "endmodule"),
                              true),
                    Error);
  }
  SUBCASE("unbound port") {
    CHECK_THROWS_AS(elaborate(parse_program("module c(clk, x); input clk; input x; endmodule\n"
                                            "module t(clk, a); input clk; input a; c u(.clk(clk));\n"
                                            "endmodule"),
                              true),
                    Error);
  }
}

TEST_CASE("annotations") {
  const Program p = load("lookup").program;
  SUBCASE("lookup sources and sinks are accepted") {
    const Annotations a = validate_annotations(p, parse_annotations("sources: in\nsinks: out\n"));
    CHECK(a.sources == std::set<std::string>{"in"});
    CHECK(a.sinks == std::set<std::string>{"out"});
  }
  SUBCASE("no sinks") {
    try {
      validate_annotations(p, parse_annotations("sources: in\n"));
      FAIL("expected an error");
    } catch (const Error& e) {
      CHECK(std::string(e.what()).find("no sinks") != std::string::npos);
    }
  }
  SUBCASE("unknown net") {
    CHECK_THROWS_AS(validate_annotations(p, parse_annotations("sources: nope\nsinks: out\n")), Error);
  }
  SUBCASE("source inside a child instance") {
    const Program s4 = load("s4").program;
    CHECK_THROWS_AS(validate_annotations(s4, parse_annotations("sources: S_0.in\nsinks: out\n")), Error);
  }
  SUBCASE("excluded and public overlap") {
    CHECK_THROWS_AS(validate_annotations(p, parse_annotations("sources: in\nsinks: out\npublic: out\nexcluded: out\n")),
                    Error);
  }
  SUBCASE("unknown key") { CHECK_THROWS_AS(parse_annotations("sauces: in\n"), ParseError); }
  SUBCASE("print and parse round trip") {
    const Annotations a = parse_annotations("sources: in\nsinks: out\nflush: out\n# note\nexcluded:\n");
    CHECK(parse_annotations(print_annotations(a)) == a);
  }
}
