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

// Secrecy-assumption synthesis. For every net v of the synthesis graph
// there are two binaries: m_v (marked public by the user) and p_v
// (provably public). A net is provably public when marked or, if it has
// predecessors, when all of them are. Blame nets must be provably public;
// excluded nets cannot be marked. The objective charges each mark by the
// net's distance from the sources.

#include <map>
#include <set>
#include <string>
#include <vector>

#include "ctv/causality.hpp"

namespace ctv {

// Nets with a control edge into some counterexample net, sorted.
std::vector<std::string> blame(const DepGraph& g, const Counterexample& cex);

struct IlpConstraint {
  enum class Kind { kNoPreds, kPreds, kForced, kExcluded };
  Kind kind = Kind::kNoPreds;
  std::string net;
  std::vector<std::string> preds;  // kPreds only, sorted

  // "m_v + (p_a + p_b)/2 >= p_v"
  std::string text() const;
  // Integer form used by the LP dump: "2 m_v + p_a + p_b - 2 p_v >= 0".
  std::string lp() const;
};

struct IlpProblem {
  // Nodes of the synthesis graph, declaration order.
  std::vector<std::string> nets;
  std::map<std::string, std::vector<std::string>> preds;
  std::map<std::string, int> weight;
  std::set<std::string> forced;    // p_v = 1
  std::set<std::string> excluded;  // m_v = 0

  std::vector<IlpConstraint> constraints() const;
  // Objective text: "1 m_IF_pc + 2 m_IF_inst + ..." in net order.
  std::string objective() const;
  // LP-style dump: min / st / binary / end.
  std::string dump() const;
};

// Synthesis graph: g reduced against the secret map without the sink
// condition. Weights are 1 + BFS hops over all edges of `g` from the
// nearest source, or |V| + 1 when no source reaches the net. Throws
// "stale artifact" when a blame net is not in the synthesis graph.
IlpProblem build_ilp(const ProofArtifact& artifact, const DepGraph& g, const std::vector<std::string>& blame,
                     const std::set<std::string>& no, const std::set<std::string>& sources);

struct IlpSolution {
  bool feasible = false;
  int objective = 0;
  // Marked nets, sorted by name.
  std::vector<std::string> marked;
  // Per net: (m, p). p is the largest value the constraints allow.
  std::map<std::string, std::pair<int, int>> assignment;

  // Marked nets by ascending weight, ties by name.
  std::vector<std::string> by_weight(const IlpProblem& p) const;
};

enum class IlpStrategy { kBranchAndBound, kExhaustive };

// Exact optimum; among optimal markings the name-sorted list is
// lexicographically least. kExhaustive accepts at most 20 candidates.
IlpSolution solve_ilp(const IlpProblem& p, IlpStrategy strategy = IlpStrategy::kBranchAndBound);

// Largest p for a marking (net -> provably public).
std::set<std::string> provably_public(const IlpProblem& p, const std::set<std::string>& marked);

// Public = marked nets; Flush = graph nets that are not public.
AssumptionSet decode(const IlpSolution& sol, const std::vector<std::string>& graph_nets);

}  // namespace ctv
