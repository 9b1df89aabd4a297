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

#include "ctv/model.hpp"

#include <functional>

#include "ctv/elaborate.hpp"
#include "ctv/parser.hpp"

namespace ctv {
namespace {

struct PathState {
  std::vector<std::string> decisions;
  std::set<std::string> cond_reads;
  std::set<std::string> enclosing;
  bool assigned = false;
  ExprPtr rhs;
  std::set<std::string> assign_enclosing;
};

// True when the case labels cover every value of the subject.
bool covers_all(const ModuleDef& m, const Stmt& s) {
  const int w = expr_width_in(m, *s.cond);
  if (w > 20) return false;
  std::set<uint64_t> seen;
  for (const auto& arm : s.arms) {
    for (const auto& l : arm.labels) seen.insert(l->value & width_mask(w));
  }
  return seen.size() == (size_t{1} << w);
}

void walk(const ModuleDef& m, const Stmt& s, const std::string& net, std::vector<PathState>& states) {
  switch (s.kind) {
    case Stmt::Kind::kAssign:
      if (s.lhs != net) return;
      for (auto& st : states) {
        st.assigned = true;
        st.rhs = s.rhs;
        st.assign_enclosing = st.enclosing;
      }
      return;
    case Stmt::Kind::kBlock:
      for (const auto& b : s.body) walk(m, *b, net, states);
      return;
    case Stmt::Kind::kIf:
    case Stmt::Kind::kCase:
      break;
  }
  if (!assigns(s, net)) return;
  const std::set<std::string> reads = reads_of(*s.cond);
  const std::string subject = print_expr(*s.cond);
  // Each branch: decision text and body (may be null).
  std::vector<std::pair<std::string, const Stmt*>> branches;
  if (s.kind == Stmt::Kind::kIf) {
    branches.emplace_back("if(" + subject + ")", s.then_s.get());
    branches.emplace_back("!if(" + subject + ")", s.else_s.get());
  } else {
    for (const auto& arm : s.arms) {
      std::string labels;
      for (const auto& l : arm.labels) labels += (labels.empty() ? "" : ",") + print_expr(*l);
      branches.emplace_back("case(" + subject + ")=" + labels, arm.body.get());
    }
    if (s.default_s) {
      branches.emplace_back("case(" + subject + ")=default", s.default_s.get());
    } else if (!covers_all(m, s)) {
      branches.emplace_back("case(" + subject + ")=none", nullptr);
    }
  }
  std::vector<PathState> out;
  for (const auto& st : states) {
    for (const auto& [decision, body] : branches) {
      std::vector<PathState> sub{st};
      PathState& b = sub.front();
      b.decisions.push_back(decision);
      b.cond_reads.insert(reads.begin(), reads.end());
      b.enclosing.insert(reads.begin(), reads.end());
      if (body) walk(m, *body, net, sub);
      for (auto& r : sub) {
        r.enclosing = st.enclosing;
        out.push_back(std::move(r));
      }
    }
  }
  states = std::move(out);
}

}  // namespace

std::vector<PathInfo> enumerate_paths(const ModuleDef& m, const Stmt& body, const std::string& net) {
  const Net* n = m.find_net(net);
  if (!n) throw Error("unknown net '" + net + "'");
  std::vector<PathState> states(1);
  walk(m, body, net, states);
  std::vector<PathInfo> out;
  for (const auto& st : states) {
    PathInfo p;
    for (const auto& d : st.decisions) p.guard_key += (p.guard_key.empty() ? "" : ";") + d;
    p.cond_reads = st.cond_reads;
    if (st.assigned) {
      p.rhs = st.rhs;
      p.data_reads = reads_of(*st.rhs);
      p.live_reads = st.assign_enclosing;
      p.live_reads.insert(p.data_reads.begin(), p.data_reads.end());
    } else {
      if (n->kind == NetKind::kWire) {
        throw Error("latch: wire '" + net + "' in module '" + m.name + "' is not assigned on path [" +
                    p.guard_key + "]");
      }
      p.keep = true;
      p.live_reads = {net};
    }
    out.push_back(std::move(p));
  }
  return out;
}

const NetDriver& ModuleModel::driver(const std::string& net) const {
  auto it = drivers.find(net);
  if (it == drivers.end()) throw Error("no driver recorded for '" + net + "'");
  return it->second;
}

int ModuleModel::width(const std::string& net) const {
  const Net* n = def->find_net(net);
  if (!n) throw Error("unknown net '" + net + "'");
  return n->width;
}

ModuleModel build_model(const Program& p, const ModuleDef& m) {
  ModuleModel model;
  model.def = &m;
  for (const auto& n : m.nets) {
    if (n.is_input()) model.drivers[n.name].kind = DriverKind::kInput;
  }
  for (size_t i = 0; i < m.processes.size(); ++i) {
    std::set<std::string> targets;
    collect_targets(*m.processes[i].body, targets);
    for (const auto& t : targets) {
      NetDriver& d = model.drivers[t];
      d.kind = DriverKind::kProcess;
      d.process = static_cast<int>(i);
      d.paths = enumerate_paths(m, *m.processes[i].body, t);
      for (const auto& p : d.paths) {
        d.cond_reads.insert(p.cond_reads.begin(), p.cond_reads.end());
        d.data_reads.insert(p.data_reads.begin(), p.data_reads.end());
      }
      d.reads = d.cond_reads;
      d.reads.insert(d.data_reads.begin(), d.data_reads.end());
    }
  }
  for (size_t i = 0; i < m.instances.size(); ++i) {
    const Instance& inst = m.instances[i];
    const ModuleDef* child = p.find(inst.module);
    if (!child) throw Error("unknown module '" + inst.module + "'");
    for (const auto& b : inst.bindings) {
      const Net* port = child->find_net(b.port);
      if (!port || !port->is_output()) continue;
      NetDriver& d = model.drivers[b.expr->name];
      d.kind = DriverKind::kInstance;
      if (b.expr->kind == Expr::Kind::kVar) {
        d.instance = static_cast<int>(i);
        d.slices.push_back({b.port, port->width - 1, 0});
      } else {
        d.slice_instances.push_back(static_cast<int>(i));
        d.slices.push_back({b.port, b.expr->hi, b.expr->lo});
      }
    }
  }
  for (const auto& n : m.nets) {
    if (!model.drivers.count(n.name)) throw Error("net '" + n.name + "' has no driver");
  }

  // Topological order of process-driven wires.
  std::map<std::string, int> state;
  std::vector<std::string> stack;
  std::function<void(const std::string&)> visit = [&](const std::string& w) {
    const int s = state[w];
    if (s == 2) return;
    if (s == 1) {
      std::string cycle;
      bool on = false;
      for (const auto& x : stack) {
        if (x == w) on = true;
        if (on) cycle += x + " -> ";
      }
      throw Error("combinational cycle in module '" + m.name + "': " + cycle + w);
    }
    state[w] = 1;
    stack.push_back(w);
    for (const auto& r : model.drivers.at(w).reads) {
      const Net* rn = m.find_net(r);
      const NetDriver& rd = model.drivers.at(r);
      if (rn->kind == NetKind::kWire && rd.kind == DriverKind::kProcess) visit(r);
    }
    stack.pop_back();
    state[w] = 2;
    model.wire_order.push_back(w);
  };
  for (const auto& n : m.nets) {
    const NetDriver& d = model.drivers.at(n.name);
    if (n.kind == NetKind::kWire && d.kind == DriverKind::kProcess) visit(n.name);
  }
  return model;
}

}  // namespace ctv
