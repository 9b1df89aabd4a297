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

// Constant-time verification by round-based weakening.
//
// Two predicates per net: pub(x) (equal values in both runs at every cycle)
// and ct(x) (equal liveness bits in both runs at every cycle). Both start
// optimistic and lose nets round by round until nothing changes. pub is
// solved first; ct is then solved against the final pub set. The round in
// which a net lost a predicate is recorded (secret map, variable-time map).

#include <map>
#include <set>
#include <string>
#include <vector>

#include "ctv/elaborate.hpp"

namespace ctv {

struct PredicateState {
  std::set<std::string> ct;
  std::set<std::string> pub;
  // Nets whose liveness bits are equal to each other at every cycle of
  // every run. Members in declaration order; classes ordered by first
  // member.
  std::vector<std::vector<std::string>> eq_classes;

  // Index of the class holding `net`, or -1.
  int color(const std::string& net) const;
};

struct SummaryClause {
  enum class Conclusion { kCt, kPub, kCtPub };

  std::string output;
  // Input ports, in declaration order.
  std::vector<std::string> ct_premise;
  std::vector<std::string> pub_premise;
  // The module's output registers are flushed (pub conclusions only).
  bool flush_premise = false;
  Conclusion conclusion = Conclusion::kCt;

  bool concludes_ct() const { return conclusion != Conclusion::kPub; }
  bool concludes_pub() const { return conclusion != Conclusion::kCt; }
  // "ct(IF_instr) ∧ pub(Stall) ⇒ ct(ID_instr)"; unconditional clauses
  // render without an arrow.
  std::string render() const;
};

struct ModuleSummary {
  std::string module;
  // Output ports in declaration order; for each, the ct clause before the
  // pub clause (or one merged clause).
  std::vector<SummaryClause> clauses;
  // Input ports in the cone of influence of each output.
  std::map<std::string, std::vector<std::string>> cones;

  const SummaryClause* ct_clause(const std::string& output) const;
  const SummaryClause* pub_clause(const std::string& output) const;
  // One clause per line.
  std::string render() const;
};

struct ProofArtifact {
  PredicateState final_state;
  std::map<std::string, int> vartime;
  std::map<std::string, int> secret;
  std::map<std::string, ModuleSummary> summaries;
  bool verified = false;
  // Sinks outside the ct set, sorted.
  std::vector<std::string> failed_sinks;
  // Analyzed nets in declaration order: every net of the flattened top, or
  // the top-level nets in modular mode. Clocks are not analyzed.
  std::vector<std::string> nets;
  bool modular = false;
  int ct_rounds = 0;
  int pub_rounds = 0;

  // Stable text rendering of the sets and maps; used for digests and
  // golden comparisons.
  std::string render() const;
};

// Runs the fixpoint on the top module. `modular` must match the design:
// modular analysis needs a hierarchical design and substitutes every
// instance by its module summary.
ProofArtifact infer(const ElaboratedDesign& design, const Annotations& ann, bool modular);

// Summary of `module` analyzed in isolation. `children` supplies summaries
// for the modules it instantiates.
ModuleSummary infer_summary(const Program& program, const std::string& module,
                            const std::map<std::string, ModuleSummary>& children);
// Same, computing child summaries first.
ModuleSummary infer_summary(const Program& program, const std::string& module);

// Partition refinement over the nets of `m` (clock excluded). Top-level
// inputs are grouped by source status; with `isolated`, every input is its
// own class (its liveness is unconstrained).
std::vector<std::vector<std::string>> color_equivalence(const Program& program, const ModuleDef& m,
                                                        const std::set<std::string>& sources,
                                                        bool isolated = false);

// Horn-clause rendering of the verification conditions. One clause per
// line after a header line. Kinds: init, cons, ct (per sink) and, in
// modular mode, one cons and one sum clause per instantiated module.
std::string export_horn(const ElaboratedDesign& design, const Annotations& ann, bool modular);

}  // namespace ctv
