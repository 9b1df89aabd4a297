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

#pragma once

#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "ctv/annotations.hpp"
#include "ctv/parser.hpp"
#include "ctv/session.hpp"

namespace ctv::test {

inline const char* const kFixtures[] = {"lookup", "s4", "pipeline_simple", "pipeline_factored", "example3"};

inline std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read '" + path + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

inline std::string circuit_path(const std::string& file) { return std::string(CTV_CIRCUITS_DIR) + "/" + file; }
inline std::string golden_path(const std::string& file) { return std::string(CTV_GOLDEN_DIR) + "/" + file; }

struct Fixture {
  Program program;
  Annotations ann;
};

inline Fixture load(const std::string& name) {
  Fixture f;
  f.program = parse_program(slurp(circuit_path(name + ".v")));
  f.ann = validate_annotations(f.program, parse_annotations(slurp(circuit_path(name + ".ann"))));
  return f;
}

inline ProofArtifact infer_fixture(const Fixture& f, bool modular) {
  return infer(elaborate(f.program, !modular), f.ann, modular);
}

inline std::set<std::string> as_set(const std::vector<std::string>& v) { return {v.begin(), v.end()}; }

}  // namespace ctv::test
