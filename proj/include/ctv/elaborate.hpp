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

#include <string>
#include <vector>

#include "ctv/ir.hpp"

namespace ctv {

struct InstanceTree {
  std::string name;    // instance name; empty at the root
  std::string module;
  std::string path;    // dot-separated prefix, e.g. "S_0." ; empty at the root
  std::vector<InstanceTree> children;
};

struct ElaboratedDesign {
  // Inlined: exactly one module (the flattened top). Modular: every module
  // reachable from the top, children before parents, top last.
  Program program;
  bool inlined = false;
  InstanceTree tree;

  const ModuleDef& top() const { return program.top_module(); }
  const ModuleDef& module(const std::string& name) const;
  // Instantiated module definitions (excluding the top), children first.
  std::vector<std::string> child_modules() const;
};

// Checks the instantiation graph (acyclic, all ports bound, widths match)
// and either flattens it or keeps it hierarchical.
//
// Flattening prefixes every child net with "<instance>." . Child input ports
// become wires driven by the binding expression; parent nets bound to child
// outputs are driven by the child net (or, for part-select bindings, by a
// concatenation of the slices). Child clock ports are dropped; their
// processes run on the top clock.
ElaboratedDesign elaborate(const Program& p, bool inline_instances);

// Closes an assumption set over plain aliases: a net defined as a whole
// copy of another net (a continuous `assign x = y;`, or a parent net bound
// to an entire child output port) passes flush and public assumptions on
// to the net it copies. Names are hierarchical ("id.ID_instr").
AssumptionSet expand_aliases(const ElaboratedDesign& design, const AssumptionSet& a);

// Width of `e` in module `m`; unsized literals report 32.
int expr_width_in(const ModuleDef& m, const Expr& e);

}  // namespace ctv
