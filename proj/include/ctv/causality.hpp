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

// Dependency graphs, their reduction against a round map, and
// counterexample extraction. Edges point from the influencing net to the
// influenced one.

#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "ctv/verifier.hpp"

namespace ctv {

using Edge = std::pair<std::string, std::string>;
// Round in which a net lost a predicate; absent means never (⊥).
using RoundMap = std::map<std::string, int>;

struct DepGraph {
  // Declaration order.
  std::vector<std::string> nodes;
  std::set<Edge> data;
  std::set<Edge> ctrl;

  bool has_node(const std::string& n) const;
  // Predecessors / successors over data and control edges, sorted.
  std::vector<std::string> preds(const std::string& n) const;
  std::vector<std::string> succs(const std::string& n) const;
  size_t edge_count() const { return data.size() + ctrl.size(); }

  friend bool operator==(const DepGraph&, const DepGraph&) = default;
};

// Flat designs: one edge per read of every assignment. Modular designs:
// top-level nets only; each instance output gets a data edge from the
// binding of every ct-premise input and a control edge from the binding of
// every pub-premise input of its summary (data edges from the whole cone
// when no ct clause exists). Throws when a summary is missing.
DepGraph build_depgraph(const ElaboratedDesign& design, const std::map<std::string, ModuleSummary>& summaries);
DepGraph build_depgraph(const ElaboratedDesign& design, const ProofArtifact& artifact);

struct ReducedGraph {
  DepGraph graph;
  RoundMap map;
  std::set<std::string> sinks;
  bool reach = false;
};

// Largest subgraph where every node has a round, every edge goes from a
// lower-or-equal round to a higher-or-equal one and, with `apply_reach`,
// every node reaches a sink.
ReducedGraph reduce(const DepGraph& g, const RoundMap& map, const std::set<std::string>& sinks, bool apply_reach);

struct Counterexample {
  // Sorted by name.
  std::vector<std::string> nets;
  // Per net: a shortest path to a sink in the reduced graph.
  std::map<std::string, std::vector<std::string>> justifications;
  bool scc_fallback = false;
  // Empty reduced graph: nothing to localize.
  bool none() const { return nets.empty(); }
};

inline constexpr const char* kNoCounterexample = "no counterexample: verified or vacuous";

// Nodes without predecessors; when cycles leave none, every member of a
// source component of the condensation.
Counterexample counterexample(const ReducedGraph& rg);

// "node <name> <round|⊥> <ct|vartime>" lines, then "edge <v> <w> data|ctrl"
// lines. Nodes outside `map` are reported as ct.
std::string dump_graph(const DepGraph& g, const RoundMap& map);

}  // namespace ctv
