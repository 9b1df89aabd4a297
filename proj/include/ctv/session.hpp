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

// The interactive loop: verify, localize, suggest one net to assume
// public, and repeat after the user accepts or rejects it.

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "ctv/sim.hpp"
#include "ctv/synth.hpp"

namespace ctv {

enum class SessionStatus { kNeedsInput, kVerified, kVariableTime, kExhausted };
enum class Answer { kAccept, kReject };

// "needs-input", "verified", "variable-time", "exhausted".
const char* to_string(SessionStatus s);
const char* to_string(Answer a);

struct Suggestion {
  std::string candidate;
  int weight = 0;
  std::vector<std::string> counterexample;
  std::vector<std::string> blame;
  // Counterexample net -> path to a sink.
  std::map<std::string, std::vector<std::string>> rationale;
};

struct HistoryEntry {
  int iteration = 0;
  std::string digest;  // of the proof artifact
  std::vector<std::string> counterexample;
  std::string suggestion;  // empty when none
  std::string response;    // "accept", "reject" or empty
};

struct SessionOptions {
  bool modular = false;
};

struct SessionState {
  Program program;
  ElaboratedDesign design;
  SessionOptions options;
  // Current assumptions live in ann.assumptions.
  Annotations ann;
  // Nets the user refused (plus the annotation's excluded set).
  std::set<std::string> no;
  int iteration = 0;
  SessionStatus status = SessionStatus::kNeedsInput;
  std::optional<Suggestion> suggestion;
  std::vector<HistoryEntry> history;

  // Results of the latest round.
  ProofArtifact artifact;
  DepGraph graph;
  ReducedGraph reduced;
  Counterexample cex;
  std::vector<std::string> blame_set;
  std::optional<IlpProblem> ilp;
  std::optional<IlpSolution> solution;
  std::string note;

  // Transcript lines so far (see run_scripted).
  std::vector<std::string> transcript;

  bool terminal() const { return status != SessionStatus::kNeedsInput; }
};

// Runs the first round with the annotation's assumptions (normally empty).
SessionState start(const Program& program, const Annotations& ann, const SessionOptions& options = {});

// Accept adds the candidate to Public and the non-public nets of the
// synthesis graph to Flush; reject adds it to the excluded set. Then runs
// the next round. Throws on a terminal session.
void respond(SessionState& s, Answer answer);

// The prompt shown for a suggestion: "> Mark '<net>' as PUBLIC? [Y/n]".
std::string prompt(const Suggestion& s);

struct ScriptedRun {
  SessionState state;
  std::string transcript;
  // The script ran out while the session still needed input.
  bool script_exhausted = false;
};

ScriptedRun run_scripted(const Program& program, const Annotations& ann, const std::vector<Answer>& script,
                         const SessionOptions& options = {});

// Script text: one answer per line ("accept"/"y"/"yes" or
// "reject"/"n"/"no"); '#' starts a comment. Lines "design <path>",
// "annotations <path>" and "mode inline|modular" are directives.
struct Script {
  std::vector<Answer> answers;
  std::string design;
  std::string annotations;
  std::optional<bool> modular;
};
Script parse_script(const std::string& text);

// Counterexample witness under the current assumptions, if the simulator
// finds one within `budget` trials.
std::optional<PairTrace> find_witness(const SessionState& s, uint64_t budget = uint64_t{1} << 16);

}  // namespace ctv
