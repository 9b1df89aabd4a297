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

#include "ctv/session.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>

namespace ctv {
namespace {

std::string digest(const std::string& text) {
  uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string list(const std::vector<std::string>& xs) {
  if (xs.empty()) return "(none)";
  std::string out;
  for (const auto& x : xs) out += (out.empty() ? "" : " ") + x;
  return out;
}

std::string list(const std::set<std::string>& xs) { return list(std::vector<std::string>(xs.begin(), xs.end())); }

void emit(SessionState& s, std::string line) { s.transcript.push_back(std::move(line)); }

void finish(SessionState& s) {
  emit(s, std::string("status: ") + to_string(s.status));
  emit(s, "public: " + list(s.ann.assumptions.publics));
  emit(s, "flush: " + list(s.ann.assumptions.flush));
  emit(s, "excluded: " + list(s.no));
  emit(s, "iterations: " + std::to_string(s.iteration));
}

void round(SessionState& s) {
  ++s.iteration;
  s.suggestion.reset();
  s.ilp.reset();
  s.solution.reset();
  s.cex = {};
  s.blame_set.clear();
  s.note.clear();

  const bool modular = s.options.modular;
  s.artifact = infer(s.design, s.ann, modular);
  s.graph = build_depgraph(s.design, s.artifact);
  s.reduced = reduce(s.graph, s.artifact.vartime, s.ann.sinks, true);

  HistoryEntry h;
  h.iteration = s.iteration;
  h.digest = digest(s.artifact.render());
  emit(s, "iteration " + std::to_string(s.iteration));

  if (s.artifact.verified) {
    s.status = SessionStatus::kVerified;
    emit(s, "  verdict: verified");
    s.history.push_back(h);
    finish(s);
    return;
  }
  emit(s, "  verdict: variable-time (" + list(s.artifact.failed_sinks) + ")");
  s.cex = counterexample(s.reduced);
  h.counterexample = s.cex.nets;
  if (s.cex.none()) {
    s.status = SessionStatus::kVariableTime;
    s.note = kNoCounterexample;
    emit(s, std::string("  ") + kNoCounterexample);
    s.history.push_back(h);
    finish(s);
    return;
  }
  emit(s, "  counterexample: " + list(s.cex.nets) + (s.cex.scc_fallback ? " (cycle)" : ""));
  s.blame_set = blame(s.graph, s.cex);
  emit(s, "  blame: " + list(s.blame_set));
  if (s.blame_set.empty()) {
    s.status = SessionStatus::kVariableTime;
    s.note = "no control dependency reaches the counterexample; the leak is data flow only";
    emit(s, "  " + s.note);
    s.history.push_back(h);
    finish(s);
    return;
  }
  // Blamed nets already proven public need no assumption; only the secret
  // ones constrain the ILP.
  std::vector<std::string> secret_blame;
  for (const auto& b : s.blame_set) {
    if (s.artifact.secret.count(b)) secret_blame.push_back(b);
  }
  if (secret_blame.empty()) {
    s.status = SessionStatus::kVariableTime;
    s.note = "every blamed net is already public; the leak is data flow only";
    emit(s, "  " + s.note);
    s.history.push_back(h);
    finish(s);
    return;
  }
  s.ilp = build_ilp(s.artifact, s.graph, secret_blame, s.no, s.ann.sources);
  s.solution = solve_ilp(*s.ilp);
  if (!s.solution->feasible || s.solution->marked.empty()) {
    s.status = SessionStatus::kExhausted;
    s.note = "no assumption left to suggest: every cut uses an excluded net";
    emit(s, "  " + s.note);
    s.history.push_back(h);
    finish(s);
    return;
  }
  Suggestion sug;
  sug.candidate = s.solution->by_weight(*s.ilp).front();
  sug.weight = s.ilp->weight.at(sug.candidate);
  sug.counterexample = s.cex.nets;
  sug.blame = s.blame_set;
  sug.rationale = s.cex.justifications;
  h.suggestion = sug.candidate;
  emit(s, "  suggestion: " + sug.candidate + " (weight " + std::to_string(sug.weight) + ")");
  s.suggestion = std::move(sug);
  s.status = SessionStatus::kNeedsInput;
  s.history.push_back(h);
}

}  // namespace

const char* to_string(SessionStatus s) {
  switch (s) {
    case SessionStatus::kNeedsInput: return "needs-input";
    case SessionStatus::kVerified: return "verified";
    case SessionStatus::kVariableTime: return "variable-time";
    case SessionStatus::kExhausted: return "exhausted";
  }
  return "?";
}

const char* to_string(Answer a) { return a == Answer::kAccept ? "accept" : "reject"; }

std::string prompt(const Suggestion& s) { return "> Mark '" + s.candidate + "' as PUBLIC? [Y/n]"; }

SessionState start(const Program& program, const Annotations& ann, const SessionOptions& options) {
  SessionState s;
  s.program = program;
  s.options = options;
  s.design = elaborate(s.program, !options.modular);
  s.ann = ann;
  s.no = ann.excluded;
  emit(s, "session " + program.top + " (" + (options.modular ? "modular" : "inline") + ")");
  round(s);
  return s;
}

void respond(SessionState& s, Answer answer) {
  if (s.terminal()) throw Error(std::string("session is ") + to_string(s.status) + "; no response expected");
  const std::string c = s.suggestion->candidate;
  emit(s, prompt(*s.suggestion) + (answer == Answer::kAccept ? " y" : " n"));
  s.history.back().response = to_string(answer);
  if (answer == Answer::kAccept) {
    AssumptionSet& a = s.ann.assumptions;
    a.publics.insert(c);
    const AssumptionSet decoded = decode(*s.solution, s.ilp->nets);
    a.flush.insert(decoded.flush.begin(), decoded.flush.end());
    for (const auto& p : a.publics) a.flush.erase(p);
  } else {
    s.no.insert(c);
  }
  round(s);
}

ScriptedRun run_scripted(const Program& program, const Annotations& ann, const std::vector<Answer>& script,
                         const SessionOptions& options) {
  ScriptedRun r;
  r.state = start(program, ann, options);
  size_t next = 0;
  while (!r.state.terminal() && next < script.size()) respond(r.state, script[next++]);
  if (!r.state.terminal()) {
    r.script_exhausted = true;
    emit(r.state, prompt(*r.state.suggestion));
    emit(r.state, "script ended while input was needed");
    finish(r.state);
  }
  for (const auto& line : r.state.transcript) r.transcript += line + "\n";
  return r;
}

Script parse_script(const std::string& text) {
  Script sc;
  std::istringstream in(text);
  std::string line;
  int n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::string word, arg;
    if (!(ls >> word)) continue;
    std::string lower = word;
    std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
    if (lower == "design" || lower == "annotations" || lower == "mode") {
      if (!(ls >> arg)) throw ParseError("'" + word + "' needs an argument", n, 1);
      if (lower == "design") {
        sc.design = arg;
      } else if (lower == "annotations") {
        sc.annotations = arg;
      } else if (arg == "inline" || arg == "modular") {
        sc.modular = arg == "modular";
      } else {
        throw ParseError("mode must be inline or modular", n, 1);
      }
    } else if (lower == "accept" || lower == "y" || lower == "yes") {
      sc.answers.push_back(Answer::kAccept);
    } else if (lower == "reject" || lower == "n" || lower == "no") {
      sc.answers.push_back(Answer::kReject);
    } else {
      throw ParseError("unknown script entry '" + word + "'", n, 1);
    }
    if (ls >> arg) throw ParseError("trailing text after '" + word + "'", n, 1);
  }
  return sc;
}

std::optional<PairTrace> find_witness(const SessionState& s, uint64_t budget) {
  if (s.status == SessionStatus::kVerified) return std::nullopt;
  SearchOptions o;
  o.budget = budget;
  return search_witness(s.design, s.ann, o);
}

}  // namespace ctv
