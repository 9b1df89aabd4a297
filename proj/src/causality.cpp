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

#include "ctv/causality.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <sstream>

#include "ctv/model.hpp"

namespace ctv {
namespace {

std::set<std::string> binding_reads(const Instance& inst, const std::string& port) {
  for (const auto& b : inst.bindings) {
    if (b.port == port) return reads_of(*b.expr);
  }
  return {};
}

}  // namespace

bool DepGraph::has_node(const std::string& n) const {
  return std::find(nodes.begin(), nodes.end(), n) != nodes.end();
}

std::vector<std::string> DepGraph::preds(const std::string& n) const {
  std::set<std::string> out;
  for (const auto* edges : {&data, &ctrl}) {
    for (const auto& [v, w] : *edges) {
      if (w == n) out.insert(v);
    }
  }
  return {out.begin(), out.end()};
}

std::vector<std::string> DepGraph::succs(const std::string& n) const {
  std::set<std::string> out;
  for (const auto* edges : {&data, &ctrl}) {
    for (auto it = edges->lower_bound({n, ""}); it != edges->end() && it->first == n; ++it) out.insert(it->second);
  }
  return {out.begin(), out.end()};
}

DepGraph build_depgraph(const ElaboratedDesign& design, const std::map<std::string, ModuleSummary>& summaries) {
  const ModuleDef& top = design.top();
  const ModuleModel model = build_model(design.program, top);
  DepGraph g;
  for (const auto& n : top.nets) {
    if (n.name != top.clock) g.nodes.push_back(n.name);
  }
  for (const auto& w : g.nodes) {
    const NetDriver& d = model.driver(w);
    if (d.kind == DriverKind::kProcess) {
      for (const auto& v : d.data_reads) g.data.insert({v, w});
      for (const auto& v : d.cond_reads) g.ctrl.insert({v, w});
      continue;
    }
    if (d.kind != DriverKind::kInstance) continue;
    std::vector<std::pair<int, std::string>> ports;
    if (d.instance >= 0) {
      ports.emplace_back(d.instance, d.slices.front().port);
    } else {
      for (size_t i = 0; i < d.slices.size(); ++i) ports.emplace_back(d.slice_instances[i], d.slices[i].port);
    }
    for (const auto& [idx, port] : ports) {
      const Instance& inst = top.instances[static_cast<size_t>(idx)];
      auto it = summaries.find(inst.module);
      if (it == summaries.end()) throw Error("missing summary for module '" + inst.module + "'");
      const ModuleSummary& s = it->second;
      const SummaryClause* c = s.ct_clause(port);
      auto add = [&](const std::vector<std::string>& ins, std::set<Edge>& edges) {
        for (const auto& in : ins) {
          for (const auto& v : binding_reads(inst, in)) edges.insert({v, w});
        }
      };
      if (c) {
        add(c->ct_premise, g.data);
        add(c->pub_premise, g.ctrl);
      } else {
        auto cone = s.cones.find(port);
        if (cone != s.cones.end()) add(cone->second, g.data);
      }
    }
  }
  return g;
}

DepGraph build_depgraph(const ElaboratedDesign& design, const ProofArtifact& artifact) {
  return build_depgraph(design, artifact.summaries);
}

ReducedGraph reduce(const DepGraph& g, const RoundMap& map, const std::set<std::string>& sinks, bool apply_reach) {
  ReducedGraph rg;
  rg.map = map;
  rg.sinks = sinks;
  rg.reach = apply_reach;
  std::set<std::string> keep;
  for (const auto& n : g.nodes) {
    if (map.count(n)) keep.insert(n);
  }
  auto edge_ok = [&](const Edge& e) {
    return keep.count(e.first) && keep.count(e.second) && map.at(e.first) <= map.at(e.second);
  };
  if (apply_reach) {
    // Backward search from the surviving sinks.
    std::set<std::string> reaches;
    std::deque<std::string> work;
    for (const auto& s : sinks) {
      if (keep.count(s)) {
        reaches.insert(s);
        work.push_back(s);
      }
    }
    while (!work.empty()) {
      const std::string w = work.front();
      work.pop_front();
      for (const auto* edges : {&g.data, &g.ctrl}) {
        for (const auto& e : *edges) {
          if (e.second == w && edge_ok(e) && reaches.insert(e.first).second) work.push_back(e.first);
        }
      }
    }
    keep = std::move(reaches);
  }
  for (const auto& n : g.nodes) {
    if (keep.count(n)) rg.graph.nodes.push_back(n);
  }
  for (const auto& e : g.data) {
    if (edge_ok(e)) rg.graph.data.insert(e);
  }
  for (const auto& e : g.ctrl) {
    if (edge_ok(e)) rg.graph.ctrl.insert(e);
  }
  return rg;
}

Counterexample counterexample(const ReducedGraph& rg) {
  const DepGraph& g = rg.graph;
  Counterexample cex;
  if (g.nodes.empty()) return cex;
  for (const auto& n : g.nodes) {
    if (g.preds(n).empty()) cex.nets.push_back(n);
  }
  if (cex.nets.empty()) {
    // Tarjan's algorithm; then keep components without incoming edges.
    std::map<std::string, int> index, low, comp;
    std::vector<std::string> stack;
    std::set<std::string> on_stack;
    int counter = 0;
    int ncomp = 0;
    std::function<void(const std::string&)> strong = [&](const std::string& v) {
      index[v] = low[v] = counter++;
      stack.push_back(v);
      on_stack.insert(v);
      for (const auto& w : g.succs(v)) {
        if (!index.count(w)) {
          strong(w);
          low[v] = std::min(low[v], low[w]);
        } else if (on_stack.count(w)) {
          low[v] = std::min(low[v], index[w]);
        }
      }
      if (low[v] == index[v]) {
        for (;;) {
          const std::string w = stack.back();
          stack.pop_back();
          on_stack.erase(w);
          comp[w] = ncomp;
          if (w == v) break;
        }
        ++ncomp;
      }
    };
    for (const auto& n : g.nodes) {
      if (!index.count(n)) strong(n);
    }
    std::set<int> entered;
    for (const auto* edges : {&g.data, &g.ctrl}) {
      for (const auto& [v, w] : *edges) {
        if (comp[v] != comp[w]) entered.insert(comp[w]);
      }
    }
    for (const auto& n : g.nodes) {
      if (!entered.count(comp[n])) cex.nets.push_back(n);
    }
    cex.scc_fallback = true;
  }
  std::sort(cex.nets.begin(), cex.nets.end());

  // Distance to the nearest sink, then the lexicographically least
  // shortest path.
  std::map<std::string, int> dist;
  std::deque<std::string> work;
  for (const auto& s : rg.sinks) {
    if (g.has_node(s)) {
      dist[s] = 0;
      work.push_back(s);
    }
  }
  while (!work.empty()) {
    const std::string w = work.front();
    work.pop_front();
    for (const auto& v : g.preds(w)) {
      if (!dist.count(v)) {
        dist[v] = dist[w] + 1;
        work.push_back(v);
      }
    }
  }
  for (const auto& n : cex.nets) {
    std::vector<std::string> path{n};
    if (!dist.count(n)) continue;
    std::string cur = n;
    while (dist[cur] > 0) {
      for (const auto& s : g.succs(cur)) {
        auto it = dist.find(s);
        if (it != dist.end() && it->second == dist[cur] - 1) {
          cur = s;
          break;
        }
      }
      path.push_back(cur);
    }
    cex.justifications[n] = std::move(path);
  }
  return cex;
}

std::string dump_graph(const DepGraph& g, const RoundMap& map) {
  std::ostringstream os;
  for (const auto& n : g.nodes) {
    auto it = map.find(n);
    if (it == map.end()) {
      os << "node " << n << " ⊥ ct\n";
    } else {
      os << "node " << n << " " << it->second << " vartime\n";
    }
  }
  std::map<std::string, size_t> pos;
  for (size_t i = 0; i < g.nodes.size(); ++i) pos[g.nodes[i]] = i;
  struct Row {
    size_t v, w;
    int kind;
    std::string text;
  };
  std::vector<Row> rows;
  for (const auto& [v, w] : g.data) rows.push_back({pos[v], pos[w], 0, "edge " + v + " " + w + " data"});
  for (const auto& [v, w] : g.ctrl) rows.push_back({pos[v], pos[w], 1, "edge " + v + " " + w + " ctrl"});
  std::sort(rows.begin(), rows.end(),
            [](const Row& a, const Row& b) { return std::tie(a.v, a.w, a.kind) < std::tie(b.v, b.w, b.kind); });
  for (const auto& r : rows) os << r.text << "\n";
  return os.str();
}

}  // namespace ctv
