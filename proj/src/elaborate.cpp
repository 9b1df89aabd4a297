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

#include "ctv/elaborate.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace ctv {
namespace {

ExprPtr rename(const ExprPtr& e, const std::string& prefix) {
  if (prefix.empty()) return e;
  switch (e->kind) {
    case Expr::Kind::kConst:
      return e;
    case Expr::Kind::kVar:
      return Expr::var(prefix + e->name);
    case Expr::Kind::kSelect:
      return Expr::select(prefix + e->name, e->hi, e->lo);
    default: {
      auto copy = std::make_shared<Expr>(*e);
      for (auto& a : copy->args) a = rename(a, prefix);
      return copy;
    }
  }
}

StmtPtr rename(const StmtPtr& s, const std::string& prefix) {
  if (!s || prefix.empty()) return s;
  auto copy = std::make_shared<Stmt>(*s);
  switch (s->kind) {
    case Stmt::Kind::kAssign:
      copy->lhs = prefix + s->lhs;
      copy->rhs = rename(s->rhs, prefix);
      break;
    case Stmt::Kind::kIf:
      copy->cond = rename(s->cond, prefix);
      copy->then_s = rename(s->then_s, prefix);
      copy->else_s = rename(s->else_s, prefix);
      break;
    case Stmt::Kind::kCase:
      copy->cond = rename(s->cond, prefix);
      for (auto& arm : copy->arms) arm.body = rename(arm.body, prefix);
      copy->default_s = rename(s->default_s, prefix);
      break;
    case Stmt::Kind::kBlock:
      for (auto& b : copy->body) b = rename(b, prefix);
      break;
  }
  return copy;
}

const ModuleDef& lookup(const Program& p, const std::string& name, int line) {
  const ModuleDef* m = p.find(name);
  if (!m) throw ParseError("unknown module '" + name + "'", line, 1);
  return *m;
}

void check_instances(const Program& p, const ModuleDef& m) {
  for (const auto& inst : m.instances) {
    const ModuleDef& child = lookup(p, inst.module, inst.line);
    for (const auto& port : child.port_order) {
      auto it = std::find_if(inst.bindings.begin(), inst.bindings.end(),
                             [&](const PortBinding& b) { return b.port == port; });
      if (it == inst.bindings.end()) {
        throw Error("unbound port '" + port + "' of instance '" + inst.name + "' in module '" + m.name + "'");
      }
      const Net* pn = child.find_net(port);
      const Expr& e = *it->expr;
      if (e.kind == Expr::Kind::kConst && !e.sized) continue;
      const int w = expr_width_in(m, e);
      if (w != pn->width) {
        throw Error("width mismatch binding port '" + port + "' of instance '" + inst.name + "': port is " +
                    std::to_string(pn->width) + " bits, expression is " + std::to_string(w));
      }
    }
  }
}

// Reachable modules in post order (children first); throws on cycles.
void order_modules(const Program& p, const std::string& name, std::map<std::string, int>& state,
                   std::vector<std::string>& out, std::vector<std::string>& stack) {
  const int s = state[name];
  if (s == 2) return;
  stack.push_back(name);
  if (s == 1) {
    std::string cycle;
    for (const auto& n : stack) cycle += (cycle.empty() ? "" : " -> ") + n;
    throw Error("instantiation cycle: " + cycle);
  }
  state[name] = 1;
  const ModuleDef& m = lookup(p, name, 0);
  for (const auto& inst : m.instances) order_modules(p, inst.module, state, out, stack);
  check_instances(p, m);
  state[name] = 2;
  stack.pop_back();
  out.push_back(name);
}

InstanceTree build_tree(const Program& p, const std::string& module, const std::string& name,
                        const std::string& path) {
  InstanceTree t;
  t.name = name;
  t.module = module;
  t.path = path;
  for (const auto& inst : p.find(module)->instances) {
    t.children.push_back(build_tree(p, inst.module, inst.name, path + inst.name + "."));
  }
  return t;
}

void flatten(const Program& p, const ModuleDef& m, const std::string& prefix, bool is_top, ModuleDef& flat) {
  for (const auto& n : m.nets) {
    if (!is_top && n.name == m.clock) continue;
    Net copy = n;
    copy.name = prefix + n.name;
    if (!is_top) copy.dir = PortDir::kNone;
    flat.nets.push_back(copy);
    if (is_top && n.is_port()) flat.port_order.push_back(copy.name);
  }
  for (const auto& proc : m.processes) {
    Process copy = proc;
    copy.body = rename(proc.body, prefix);
    flat.processes.push_back(copy);
  }
  struct Slice {
    int lo;
    std::string child_net;
  };
  std::map<std::string, std::vector<Slice>> slices;
  std::vector<std::string> slice_order;
  for (const auto& inst : m.instances) {
    const ModuleDef& child = *p.find(inst.module);
    const std::string child_prefix = prefix + inst.name + ".";
    flatten(p, child, child_prefix, false, flat);
    for (const auto& b : inst.bindings) {
      if (b.port == child.clock) continue;
      const Net* port = child.find_net(b.port);
      if (port->is_input()) {
        Process assign;
        assign.kind = ProcessKind::kContinuous;
        assign.line = inst.line;
        assign.body = Stmt::assign(child_prefix + b.port, rename(b.expr, prefix), true);
        flat.processes.push_back(assign);
      } else if (b.expr->kind == Expr::Kind::kVar) {
        Process assign;
        assign.kind = ProcessKind::kContinuous;
        assign.line = inst.line;
        assign.body = Stmt::assign(prefix + b.expr->name, Expr::var(child_prefix + b.port), true);
        flat.processes.push_back(assign);
      } else {
        const std::string target = prefix + b.expr->name;
        if (!slices.count(target)) slice_order.push_back(target);
        slices[target].push_back({b.expr->lo, child_prefix + b.port});
      }
    }
  }
  for (const auto& target : slice_order) {
    auto parts = slices[target];
    std::sort(parts.begin(), parts.end(), [](const Slice& a, const Slice& b) { return a.lo > b.lo; });
    std::vector<ExprPtr> args;
    for (const auto& s : parts) args.push_back(Expr::var(s.child_net));
    Process assign;
    assign.kind = ProcessKind::kContinuous;
    assign.body = Stmt::assign(target, args.size() == 1 ? args[0] : Expr::concat(std::move(args)), true);
    flat.processes.push_back(assign);
  }
}

}  // namespace

int expr_width_in(const ModuleDef& m, const Expr& e) {
  return expr_width(e, [&](const std::string& n) {
    const Net* net = m.find_net(n);
    if (!net) throw Error("unresolved identifier '" + n + "' in module '" + m.name + "'");
    return net->width;
  });
}

const ModuleDef& ElaboratedDesign::module(const std::string& name) const {
  const ModuleDef* m = program.find(name);
  if (!m) throw Error("module '" + name + "' not in elaborated design");
  return *m;
}

std::vector<std::string> ElaboratedDesign::child_modules() const {
  std::vector<std::string> out;
  for (const auto& m : program.modules) {
    if (m.name != program.top) out.push_back(m.name);
  }
  return out;
}

namespace {

void collect_aliases(const Program& p, const ModuleDef& m, const std::string& prefix,
                     std::multimap<std::string, std::string>& out) {
  for (const auto& proc : m.processes) {
    const Stmt& s = *proc.body;
    if (proc.kind != ProcessKind::kContinuous || s.kind != Stmt::Kind::kAssign) continue;
    if (s.rhs->kind != Expr::Kind::kVar) continue;
    const Net* a = m.find_net(s.lhs);
    const Net* b = m.find_net(s.rhs->name);
    if (a && b && a->width == b->width) out.emplace(prefix + s.lhs, prefix + s.rhs->name);
  }
  for (const auto& inst : m.instances) {
    const ModuleDef* child = p.find(inst.module);
    if (!child) continue;
    const std::string child_prefix = prefix + inst.name + ".";
    for (const auto& b : inst.bindings) {
      const Net* port = child->find_net(b.port);
      if (port && port->is_output() && b.expr->kind == Expr::Kind::kVar) {
        out.emplace(prefix + b.expr->name, child_prefix + b.port);
      }
    }
    collect_aliases(p, *child, child_prefix, out);
  }
}

std::set<std::string> close_over(const std::multimap<std::string, std::string>& aliases,
                                 const std::set<std::string>& names) {
  std::set<std::string> out = names;
  std::vector<std::string> work(names.begin(), names.end());
  while (!work.empty()) {
    const std::string n = work.back();
    work.pop_back();
    auto [lo, hi] = aliases.equal_range(n);
    for (auto it = lo; it != hi; ++it) {
      if (out.insert(it->second).second) work.push_back(it->second);
    }
  }
  return out;
}

}  // namespace

AssumptionSet expand_aliases(const ElaboratedDesign& design, const AssumptionSet& a) {
  std::multimap<std::string, std::string> aliases;
  collect_aliases(design.program, design.top(), "", aliases);
  return {close_over(aliases, a.flush), close_over(aliases, a.publics)};
}

ElaboratedDesign elaborate(const Program& p, bool inline_instances) {
  const ModuleDef& top = p.top_module();
  std::map<std::string, int> state;
  std::vector<std::string> order;
  std::vector<std::string> stack;
  order_modules(p, top.name, state, order, stack);

  ElaboratedDesign d;
  d.inlined = inline_instances;
  d.tree = build_tree(p, top.name, "", "");
  d.program.top = top.name;
  if (inline_instances) {
    ModuleDef flat;
    flat.name = top.name;
    flat.clock = top.clock;
    flatten(p, top, "", true, flat);
    // Header order of the top ports is preserved.
    flat.port_order = top.port_order;
    d.program.modules.push_back(std::move(flat));
  } else {
    for (const auto& name : order) d.program.modules.push_back(*p.find(name));
  }
  return d;
}

}  // namespace ctv
