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

// Runs the ctv binary and checks its output and exit codes.

#include <doctest.h>
#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <json.hpp>

#include "support.hpp"

using ctv::test::circuit_path;
using ctv::test::golden_path;
using ctv::test::slurp;

namespace {

struct Result {
  int status = -1;
  std::string out;
};

// stderr is discarded; only stdout is captured.
Result run(const std::string& args) {
  const std::string cmd = std::string(CTV_BIN) + " " + args + " 2>/dev/null";
  Result r;
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  char buf[4096];
  size_t n;
  while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, n);
  const int raw = pclose(pipe);
  r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  return r;
}

std::string inputs(const std::string& name) { return circuit_path(name + ".v") + " " + circuit_path(name + ".ann"); }

std::string script(const std::string& name) { return std::string(CTV_SCRIPTS_DIR) + "/" + name + ".script"; }

}  // namespace

TEST_CASE("check exit codes") {
  CHECK(run("check " + inputs("lookup")).status == 0);
  CHECK(run("check " + inputs("example3")).status == 1);
  CHECK(run("check --modular " + inputs("s4")).status == 0);
  const Result r = run("check " + inputs("pipeline_simple"));
  CHECK(r.status == 1);
  CHECK(r.out == slurp(golden_path("pipeline_simple.check")));
}

TEST_CASE("usage and input errors exit with 2") {
  CHECK(run("").status == 2);
  CHECK(run("frobnicate").status == 2);
  CHECK(run("check /nonexistent.v " + circuit_path("lookup.ann")).status == 2);
  CHECK(run("check --modular --inline " + inputs("lookup")).status == 2);
  CHECK(run("check --top Nope " + inputs("lookup")).status == 2);
  CHECK(run("serve --port 70000").status == 2);
  CHECK(run("replay").status == 2);
  CHECK(run("--help").status == 0);
}

TEST_CASE("replay reproduces the golden transcripts byte for byte") {
  for (const char* name : {"lookup", "s4_modular", "pipeline_accept", "pipeline_reject", "pipeline_reject_accept",
                           "pipeline_factored_modular", "example3", "example3_modular", "pipeline_unanswered"}) {
    CAPTURE(name);
    const Result r = run("replay --script " + script(name));
    CHECK(r.out == slurp(golden_path(std::string(name) + ".transcript")));
    const bool verified = r.out.find("status: verified\n") != std::string::npos;
    CHECK(r.status == (verified ? 0 : 1));
  }
}

TEST_CASE("replay flags override the script") {
  const Result r = run("replay --inline --script " + script("example3_modular"));
  CHECK(r.out == slurp(golden_path("example3.transcript")));
  const Result p = run("replay --script " + script("pipeline_accept") + " " + inputs("example3"));
  CHECK(p.out == slurp(golden_path("example3.transcript")));
}

TEST_CASE("graph and Horn output") {
  CHECK(run("graph " + inputs("pipeline_simple")).out == slurp(golden_path("pipeline_simple.graph")));
  const auto j = nlohmann::json::parse(run("graph --json " + inputs("pipeline_simple")).out);
  CHECK(j.at("counterexample") == nlohmann::json::array({"ID_instr"}));

  CHECK(run("export-horn " + inputs("lookup")).out == slurp(golden_path("lookup.horn")));
  const auto tmp = std::filesystem::temp_directory_path() / "ctv_cli_test.horn";
  CHECK(run("export-horn --modular -o " + tmp.string() + " " + inputs("s4")).status == 0);
  CHECK(slurp(tmp.string()) == slurp(golden_path("s4_modular.horn")));
  std::filesystem::remove(tmp);
}

TEST_CASE("suggest prints the first prompt") {
  const Result r = run("suggest " + inputs("example3"));
  CHECK(r.status == 1);
  CHECK(r.out.find("> Mark 'stall' as PUBLIC? [Y/n]") != std::string::npos);
}
