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

#include "ctv/synth.hpp"

#include <algorithm>
#include <deque>
#include <sstream>

namespace ctv {
namespace {

std::string sum_of(const std::vector<std::string>& preds) {
  std::string out;
  for (const auto& w : preds) out += (out.empty() ? "" : " + ") + ("p_" + w);
  return out;
}

struct Search {
  const IlpProblem& p;
  std::vector<std::string> candidates;  // by weight, then name
  int best = -1;
  std::vector<std::vector<std::string>> ties;

  bool feasible(const std::set<std::string>& marked) const {
    const auto pub = provably_public(p, marked);
    return std::includes(pub.begin(), pub.end(), p.forced.begin(), p.forced.end());
  }

  void record(const std::set<std::string>& marked, int cost) {
    if (best >= 0 && cost > best) return;
    if (cost < best || best < 0) {
      best = cost;
      ties.clear();
    }
    ties.emplace_back(marked.begin(), marked.end());
  }

  void branch(size_t i, std::set<std::string>& marked, int cost) {
    if (best >= 0 && cost > best) return;
    if (feasible(marked)) {
      // Weights are positive, so adding marks only costs more.
      record(marked, cost);
      return;
    }
    if (i == candidates.size()) return;
    // Bound: even marking every remaining candidate must suffice.
    std::set<std::string> all = marked;
    all.insert(candidates.begin() + static_cast<std::ptrdiff_t>(i), candidates.end());
    if (!feasible(all)) return;
    const std::string& v = candidates[i];
    marked.insert(v);
    branch(i + 1, marked, cost + p.weight.at(v));
    marked.erase(v);
    branch(i + 1, marked, cost);
  }
};

}  // namespace

std::vector<std::string> blame(const DepGraph& g, const Counterexample& cex) {
  std::set<std::string> out;
  for (const auto& [v, w] : g.ctrl) {
    if (std::find(cex.nets.begin(), cex.nets.end(), w) != cex.nets.end()) out.insert(v);
  }
  return {out.begin(), out.end()};
}

std::string IlpConstraint::text() const {
  switch (kind) {
    case Kind::kNoPreds:
      return "m_" + net + " >= p_" + net;
    case Kind::kPreds:
      if (preds.size() == 1) return "m_" + net + " + " + sum_of(preds) + " >= p_" + net;
      return "m_" + net + " + (" + sum_of(preds) + ")/" + std::to_string(preds.size()) + " >= p_" + net;
    case Kind::kForced:
      return "p_" + net + " = 1";
    case Kind::kExcluded:
      return "m_" + net + " = 0";
  }
  return "";
}

std::string IlpConstraint::lp() const {
  switch (kind) {
    case Kind::kNoPreds:
      return "m_" + net + " - p_" + net + " >= 0";
    case Kind::kPreds: {
      const std::string k = preds.size() == 1 ? "" : std::to_string(preds.size()) + " ";
      return k + "m_" + net + " + " + sum_of(preds) + " - " + k + "p_" + net + " >= 0";
    }
    case Kind::kForced:
    case Kind::kExcluded:
      return text();
  }
  return "";
}

std::vector<IlpConstraint> IlpProblem::constraints() const {
  std::vector<IlpConstraint> out;
  for (const auto& v : nets) {
    const auto& pre = preds.at(v);
    IlpConstraint c;
    c.net = v;
    c.kind = pre.empty() ? IlpConstraint::Kind::kNoPreds : IlpConstraint::Kind::kPreds;
    c.preds = pre;
    out.push_back(std::move(c));
  }
  for (const auto& v : nets) {
    if (forced.count(v)) out.push_back({IlpConstraint::Kind::kForced, v, {}});
  }
  for (const auto& v : nets) {
    if (excluded.count(v)) out.push_back({IlpConstraint::Kind::kExcluded, v, {}});
  }
  return out;
}

std::string IlpProblem::objective() const {
  std::string out;
  for (const auto& v : nets) out += (out.empty() ? "" : " + ") + std::to_string(weight.at(v)) + " m_" + v;
  return out.empty() ? "0" : out;
}

std::string IlpProblem::dump() const {
  std::ostringstream os;
  os << "min\n obj: " << objective() << "\nst\n";
  int i = 0;
  for (const auto& c : constraints()) os << " c" << ++i << ": " << c.lp() << "\n";
  os << "binary\n";
  for (const auto& v : nets) os << " m_" << v << " p_" << v << "\n";
  os << "end\n";
  return os.str();
}

IlpProblem build_ilp(const ProofArtifact& artifact, const DepGraph& g, const std::vector<std::string>& blame_set,
                     const std::set<std::string>& no, const std::set<std::string>& sources) {
  const ReducedGraph syn = reduce(g, artifact.secret, {}, false);
  IlpProblem p;
  p.nets = syn.graph.nodes;
  for (const auto& b : blame_set) {
    if (!syn.graph.has_node(b)) {
      throw Error("stale artifact: blame net '" + b + "' is not in the synthesis graph");
    }
    if (!no.count(b)) p.forced.insert(b);
  }
  for (const auto& v : p.nets) {
    p.preds[v] = syn.graph.preds(v);
    if (no.count(v)) p.excluded.insert(v);
  }
  // BFS over the full graph from every source.
  std::map<std::string, int> dist;
  std::deque<std::string> work;
  for (const auto& s : sources) {
    if (g.has_node(s)) {
      dist[s] = 0;
      work.push_back(s);
    }
  }
  while (!work.empty()) {
    const std::string v = work.front();
    work.pop_front();
    for (const auto& w : g.succs(v)) {
      if (!dist.count(w)) {
        dist[w] = dist[v] + 1;
        work.push_back(w);
      }
    }
  }
  const int unreachable = static_cast<int>(g.nodes.size()) + 1;
  for (const auto& v : p.nets) {
    auto it = dist.find(v);
    p.weight[v] = it == dist.end() ? unreachable : 1 + it->second;
  }
  return p;
}

std::set<std::string> provably_public(const IlpProblem& p, const std::set<std::string>& marked) {
  std::set<std::string> pub(p.nets.begin(), p.nets.end());
  for (bool changed = true; changed;) {
    changed = false;
    for (const auto& v : p.nets) {
      if (!pub.count(v) || marked.count(v)) continue;
      const auto& pre = p.preds.at(v);
      const bool ok = !pre.empty() && std::all_of(pre.begin(), pre.end(), [&](const std::string& w) {
        return pub.count(w) > 0;
      });
      if (!ok) {
        pub.erase(v);
        changed = true;
      }
    }
  }
  return pub;
}

std::vector<std::string> IlpSolution::by_weight(const IlpProblem& p) const {
  std::vector<std::string> out = marked;
  std::stable_sort(out.begin(), out.end(), [&](const std::string& a, const std::string& b) {
    return p.weight.at(a) < p.weight.at(b);
  });
  return out;
}

IlpSolution solve_ilp(const IlpProblem& p, IlpStrategy strategy) {
  Search s{p, {}, -1, {}};
  for (const auto& v : p.nets) {
    if (!p.excluded.count(v)) s.candidates.push_back(v);
  }
  std::stable_sort(s.candidates.begin(), s.candidates.end(), [&](const std::string& a, const std::string& b) {
    const int wa = p.weight.at(a);
    const int wb = p.weight.at(b);
    return wa != wb ? wa < wb : a < b;
  });
  if (strategy == IlpStrategy::kExhaustive) {
    if (s.candidates.size() > 20) throw Error("exhaustive strategy supports at most 20 candidates");
    const uint32_t n = static_cast<uint32_t>(s.candidates.size());
    for (uint32_t mask = 0; mask < (uint32_t{1} << n); ++mask) {
      std::set<std::string> marked;
      int cost = 0;
      for (uint32_t i = 0; i < n; ++i) {
        if (mask & (uint32_t{1} << i)) {
          marked.insert(s.candidates[i]);
          cost += p.weight.at(s.candidates[i]);
        }
      }
      if (s.feasible(marked)) s.record(marked, cost);
    }
  } else {
    std::set<std::string> marked;
    s.branch(0, marked, 0);
  }
  IlpSolution sol;
  if (s.best < 0) return sol;
  sol.feasible = true;
  sol.objective = s.best;
  sol.marked = *std::min_element(s.ties.begin(), s.ties.end());
  const std::set<std::string> marked(sol.marked.begin(), sol.marked.end());
  const auto pub = provably_public(p, marked);
  for (const auto& v : p.nets) sol.assignment[v] = {marked.count(v) ? 1 : 0, pub.count(v) ? 1 : 0};
  return sol;
}

AssumptionSet decode(const IlpSolution& sol, const std::vector<std::string>& graph_nets) {
  AssumptionSet a;
  a.publics.insert(sol.marked.begin(), sol.marked.end());
  for (const auto& v : graph_nets) {
    if (!a.publics.count(v)) a.flush.insert(v);
  }
  return a;
}

}  // namespace ctv
