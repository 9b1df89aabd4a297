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

// Per-net view of a module: which process or instance drives each net and,
// for process-driven nets, every control path through the process projected
// onto that net.

#include <map>
#include <set>
#include <string>
#include <vector>

#include "ctv/ir.hpp"

namespace ctv {

struct PathInfo {
  // Canonical rendering of every branch decision taken on the path.
  std::string guard_key;
  // Nets read by those decisions.
  std::set<std::string> cond_reads;
  // Nets read by the selected right-hand side (empty on keep paths).
  std::set<std::string> data_reads;
  // Nets whose liveness flows into the target: conditions enclosing the
  // final assignment plus `data_reads`. On keep paths: the target itself.
  std::set<std::string> live_reads;
  // Register not assigned on this path; it keeps value and liveness.
  bool keep = false;
  ExprPtr rhs;
};

enum class DriverKind { kInput, kProcess, kInstance };

struct OutputSlice {
  std::string port;
  int hi = 0;
  int lo = 0;
};

struct NetDriver {
  DriverKind kind = DriverKind::kInput;
  int process = -1;
  std::vector<PathInfo> paths;
  // kInstance: driving instance and its output ports (several for slices).
  int instance = -1;
  std::vector<int> slice_instances;
  std::vector<OutputSlice> slices;
  // Every net read by any path, conditions included; excludes the target
  // on keep paths.
  std::set<std::string> reads;
  std::set<std::string> cond_reads;
  std::set<std::string> data_reads;
};

struct ModuleModel {
  const ModuleDef* def = nullptr;
  std::map<std::string, NetDriver> drivers;
  // Wires driven by processes, topologically ordered by their reads.
  // Instance-driven nets are not ordered here.
  std::vector<std::string> wire_order;

  const NetDriver& driver(const std::string& net) const;
  int width(const std::string& net) const;
};

// Enumerates the paths of `body` that matter for `net`. Statements that do
// not assign `net` are skipped. Throws "latch" errors for wires left
// unassigned on some path.
std::vector<PathInfo> enumerate_paths(const ModuleDef& m, const Stmt& body, const std::string& net);

// Builds drivers for every net of `m`; `p` resolves instantiated modules.
// Throws on combinational cycles among process-driven wires.
ModuleModel build_model(const Program& p, const ModuleDef& m);

}  // namespace ctv
