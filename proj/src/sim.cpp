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

#include "ctv/sim.hpp"

#include <algorithm>
#include <bit>
#include <cstdio>
#include <random>

#include "ctv/model.hpp"

namespace ctv {
namespace detail {

struct CExpr {
  Expr::Kind kind = Expr::Kind::kConst;
  UnaryOp uop = UnaryOp::kNot;
  BinaryOp bop = BinaryOp::kAnd;
  uint64_t value = 0;
  int slot = -1;
  int hi = 0;
  int lo = 0;
  int width = 1;
  std::vector<CExpr> args;
};

struct CStmt {
  Stmt::Kind kind = Stmt::Kind::kBlock;
  CExpr expr;
  std::vector<int> reads;
  std::vector<CStmt> kids;
  bool has_else = false;
  std::vector<std::vector<uint64_t>> labels;
  std::vector<int32_t> table;
  int default_arm = -1;
};

struct CInput {
  int child_slot = -1;
  int width = 1;
  CExpr expr;
  std::vector<int> reads;
};

struct CSlice {
  int instance = -1;
  int child_slot = -1;
  int lo = 0;
};

// A parent net driven by instance outputs, possibly assembled from slices.
struct COutput {
  int parent_slot = -1;
  std::vector<CSlice> slices;
};

struct CInstance {
  std::vector<CInput> inputs;
};

struct CModule {
  const ModuleDef* def = nullptr;
  std::map<std::string, int> local;
  std::vector<std::string> names;
  std::vector<int> widths;
  std::vector<uint8_t> is_reg;
  std::vector<uint8_t> is_input;
  std::vector<int> wires;
  std::vector<int> regs;
  std::vector<CStmt> prog;
  std::vector<uint8_t> has_prog;
  std::vector<CInstance> instances;
  std::vector<COutput> outputs;
};

struct Node {
  int module = -1;
  int offset = 0;
  std::vector<int> children;
};

struct Engine {
  std::vector<CModule> modules;
  std::vector<Node> nodes;
  int slots = 0;
  int top_slots = 0;
  std::vector<std::string> names;
  std::vector<int> widths;
  std::vector<uint8_t> is_reg;
  std::vector<std::string> inputs;
  std::vector<int> input_slots;
  std::map<std::string, int> index;
  bool flat = true;

  void init_run(Simulator::Run& r, const uint64_t* in, const InputMap* initial) const;
  void advance(const Simulator::Run& prev, Simulator::Run& out, const uint8_t* force, const uint64_t* in) const;
  bool settle(int node, uint64_t* v, uint8_t* l, const uint8_t* force) const;
};

namespace {

uint64_t eval(const CExpr& e, const uint64_t* v) {
  switch (e.kind) {
    case Expr::Kind::kConst:
      return e.value;
    case Expr::Kind::kVar:
      return v[e.slot];
    case Expr::Kind::kSelect:
      return (v[e.slot] >> e.lo) & width_mask(e.hi - e.lo + 1);
    case Expr::Kind::kUnary: {
      const uint64_t a = eval(e.args[0], v);
      switch (e.uop) {
        case UnaryOp::kNot: return ~a & width_mask(e.width);
        case UnaryOp::kLogicalNot: return a == 0;
        case UnaryOp::kNeg: return (~a + 1) & width_mask(e.width);
        case UnaryOp::kReduceAnd: return a == width_mask(e.args[0].width);
        case UnaryOp::kReduceOr: return a != 0;
        case UnaryOp::kReduceXor: return static_cast<uint64_t>(std::popcount(a) & 1);
      }
      return 0;
    }
    case Expr::Kind::kBinary: {
      const uint64_t a = eval(e.args[0], v);
      const uint64_t b = eval(e.args[1], v);
      const uint64_t m = width_mask(e.width);
      switch (e.bop) {
        case BinaryOp::kAnd: return a & b;
        case BinaryOp::kOr: return a | b;
        case BinaryOp::kXor: return a ^ b;
        case BinaryOp::kLogicalAnd: return a != 0 && b != 0;
        case BinaryOp::kLogicalOr: return a != 0 || b != 0;
        case BinaryOp::kAdd: return (a + b) & m;
        case BinaryOp::kSub: return (a - b) & m;
        case BinaryOp::kShl: return b >= 64 ? 0 : (a << b) & m;
        case BinaryOp::kShr: return b >= 64 ? 0 : a >> b;
        case BinaryOp::kEq: return a == b;
        case BinaryOp::kNeq: return a != b;
        case BinaryOp::kLt: return a < b;
        case BinaryOp::kLe: return a <= b;
        case BinaryOp::kGt: return a > b;
        case BinaryOp::kGe: return a >= b;
      }
      return 0;
    }
    case Expr::Kind::kMux:
      return (eval(e.args[0], v) != 0 ? eval(e.args[1], v) : eval(e.args[2], v)) & width_mask(e.width);
    case Expr::Kind::kConcat: {
      uint64_t acc = 0;
      for (const auto& a : e.args) acc = (a.width >= 64 ? 0 : acc << a.width) | eval(a, v);
      return acc & width_mask(e.width);
    }
  }
  return 0;
}

bool any_live(const std::vector<int>& reads, const uint8_t* l) {
  for (int r : reads) {
    if (l[r]) return true;
  }
  return false;
}

struct Out {
  bool assigned = false;
  uint64_t value = 0;
  bool live = false;
};

void exec(const CStmt& s, const uint64_t* v, const uint8_t* l, bool enclosing, Out& out) {
  switch (s.kind) {
    case Stmt::Kind::kAssign:
      out.assigned = true;
      out.value = eval(s.expr, v);
      out.live = enclosing || any_live(s.reads, l);
      return;
    case Stmt::Kind::kBlock:
      for (const auto& k : s.kids) exec(k, v, l, enclosing, out);
      return;
    case Stmt::Kind::kIf: {
      const bool lc = enclosing || any_live(s.reads, l);
      if (eval(s.expr, v) != 0) {
        exec(s.kids[0], v, l, lc, out);
      } else if (s.has_else) {
        exec(s.kids[1], v, l, lc, out);
      }
      return;
    }
    case Stmt::Kind::kCase: {
      const bool lc = enclosing || any_live(s.reads, l);
      const uint64_t subject = eval(s.expr, v);
      int arm = -1;
      if (!s.table.empty()) {
        arm = subject < s.table.size() ? s.table[subject] : -1;
      } else {
        for (size_t i = 0; i < s.labels.size() && arm < 0; ++i) {
          for (uint64_t lab : s.labels[i]) {
            if (lab == subject) {
              arm = static_cast<int>(i);
              break;
            }
          }
        }
      }
      if (arm >= 0) {
        exec(s.kids[static_cast<size_t>(arm)], v, l, lc, out);
      } else if (s.default_arm >= 0) {
        exec(s.kids[static_cast<size_t>(s.default_arm)], v, l, lc, out);
      }
      return;
    }
  }
}

class Compiler {
 public:
  explicit Compiler(const CModule& m) : m_(m) {}

  CExpr expr(const Expr& e) const {
    CExpr c;
    c.kind = e.kind;
    c.width = expr_width(e, [&](const std::string& n) { return m_.widths.at(static_cast<size_t>(slot(n))); });
    switch (e.kind) {
      case Expr::Kind::kConst:
        c.value = e.value;
        break;
      case Expr::Kind::kVar:
        c.slot = slot(e.name);
        break;
      case Expr::Kind::kSelect:
        c.slot = slot(e.name);
        c.hi = e.hi;
        c.lo = e.lo;
        break;
      default:
        c.uop = e.unary_op;
        c.bop = e.binary_op;
        for (const auto& a : e.args) c.args.push_back(expr(*a));
        break;
    }
    return c;
  }

  std::vector<int> reads(const Expr& e) const {
    std::vector<int> out;
    for (const auto& n : reads_of(e)) out.push_back(slot(n));
    return out;
  }

  // Projection of `s` onto `net`.
  CStmt stmt(const Stmt& s, const std::string& net) const {
    CStmt c;
    c.kind = s.kind;
    switch (s.kind) {
      case Stmt::Kind::kAssign:
        c.expr = expr(*s.rhs);
        c.reads = reads(*s.rhs);
        break;
      case Stmt::Kind::kBlock:
        for (const auto& b : s.body) {
          if (assigns(*b, net)) c.kids.push_back(stmt(*b, net));
        }
        break;
      case Stmt::Kind::kIf:
        c.expr = expr(*s.cond);
        c.reads = reads(*s.cond);
        c.kids.push_back(assigns(*s.then_s, net) ? stmt(*s.then_s, net) : CStmt{});
        if (s.else_s) {
          c.has_else = true;
          c.kids.push_back(assigns(*s.else_s, net) ? stmt(*s.else_s, net) : CStmt{});
        }
        break;
      case Stmt::Kind::kCase: {
        c.expr = expr(*s.cond);
        c.reads = reads(*s.cond);
        for (const auto& arm : s.arms) {
          std::vector<uint64_t> labels;
          for (const auto& l : arm.labels) labels.push_back(l->value);
          c.labels.push_back(labels);
          c.kids.push_back(assigns(*arm.body, net) ? stmt(*arm.body, net) : CStmt{});
        }
        if (s.default_s) {
          c.default_arm = static_cast<int>(c.kids.size());
          c.kids.push_back(assigns(*s.default_s, net) ? stmt(*s.default_s, net) : CStmt{});
        }
        const int w = c.expr.width;
        if (w <= 16) {
          c.table.assign(size_t{1} << w, -1);
          for (size_t i = c.labels.size(); i-- > 0;) {
            for (uint64_t lab : c.labels[i]) {
              if (lab < c.table.size()) c.table[lab] = static_cast<int32_t>(i);
            }
          }
        }
        break;
      }
    }
    return c;
  }

  int slot(const std::string& n) const {
    auto it = m_.local.find(n);
    if (it == m_.local.end()) throw Error("net '" + n + "' is not simulated in module '" + m_.def->name + "'");
    return it->second;
  }

 private:
  const CModule& m_;
};

CModule compile_module(const Program& p, const ModuleDef& def) {
  CModule m;
  m.def = &def;
  for (const auto& n : def.nets) {
    if (n.name == def.clock) continue;
    m.local[n.name] = static_cast<int>(m.names.size());
    m.names.push_back(n.name);
    m.widths.push_back(n.width);
    m.is_reg.push_back(n.kind == NetKind::kReg);
    m.is_input.push_back(n.is_input());
  }
  const ModuleModel model = build_model(p, def);
  Compiler comp(m);
  m.prog.resize(m.names.size());
  m.has_prog.assign(m.names.size(), 0);
  for (const auto& [name, d] : model.drivers) {
    if (d.kind != DriverKind::kProcess) continue;
    const int s = comp.slot(name);
    m.prog[static_cast<size_t>(s)] = comp.stmt(*def.processes[static_cast<size_t>(d.process)].body, name);
    m.has_prog[static_cast<size_t>(s)] = 1;
    if (m.is_reg[static_cast<size_t>(s)]) m.regs.push_back(s);
  }
  std::sort(m.regs.begin(), m.regs.end());
  for (const auto& w : model.wire_order) m.wires.push_back(comp.slot(w));
  std::map<std::string, size_t> out_index;
  for (size_t ii = 0; ii < def.instances.size(); ++ii) {
    const Instance& inst = def.instances[ii];
    const ModuleDef& child = *p.find(inst.module);
    CInstance ci;
    int child_slot = 0;
    for (const auto& b : inst.bindings) {
      if (b.port == child.clock) continue;
      // Child slots follow the child's declaration order without its clock.
      child_slot = 0;
      for (const auto& n : child.nets) {
        if (n.name == child.clock) continue;
        if (n.name == b.port) break;
        ++child_slot;
      }
      const Net* port = child.find_net(b.port);
      if (port->is_input()) {
        CInput in;
        in.child_slot = child_slot;
        in.width = port->width;
        in.expr = comp.expr(*b.expr);
        in.reads = comp.reads(*b.expr);
        ci.inputs.push_back(std::move(in));
      } else {
        const std::string& target = b.expr->name;
        auto it = out_index.find(target);
        if (it == out_index.end()) {
          it = out_index.emplace(target, m.outputs.size()).first;
          COutput o;
          o.parent_slot = comp.slot(target);
          m.outputs.push_back(o);
        }
        const int lo = b.expr->kind == Expr::Kind::kSelect ? b.expr->lo : 0;
        m.outputs[it->second].slices.push_back({static_cast<int>(ii), child_slot, lo});
      }
    }
    m.instances.push_back(std::move(ci));
  }
  return m;
}

}  // namespace

bool Engine::settle(int node_index, uint64_t* v, uint8_t* l, const uint8_t* force) const {
  const Node& node = nodes[static_cast<size_t>(node_index)];
  const CModule& m = modules[static_cast<size_t>(node.module)];
  uint64_t* mv = v + node.offset;
  uint8_t* ml = l + node.offset;
  const uint8_t* mf = force ? force + node.offset : nullptr;
  auto write = [&](int s, uint64_t value, bool live) {
    const uint8_t lv = static_cast<uint8_t>(live || (mf && mf[s]));
    if (mv[s] == value && ml[s] == lv) return false;
    mv[s] = value;
    ml[s] = lv;
    return true;
  };
  auto settle_wires = [&]() {
    bool changed = false;
    for (int w : m.wires) {
      Out o;
      exec(m.prog[static_cast<size_t>(w)], mv, ml, false, o);
      changed |= write(w, o.value & width_mask(m.widths[static_cast<size_t>(w)]), o.live);
    }
    return changed;
  };
  if (m.instances.empty()) return settle_wires();

  bool any = false;
  const int limit = slots + 4;
  for (int iter = 0;; ++iter) {
    if (iter > limit) throw Error("combinational loop through instances of module '" + m.def->name + "'");
    bool changed = settle_wires();
    for (size_t i = 0; i < m.instances.size(); ++i) {
      const CInstance& ci = m.instances[i];
      const int child = node.children[i];
      const Node& cn = nodes[static_cast<size_t>(child)];
      for (const auto& in : ci.inputs) {
        const uint64_t value = eval(in.expr, mv) & width_mask(in.width);
        const uint8_t lv = any_live(in.reads, ml);
        const size_t s = static_cast<size_t>(cn.offset + in.child_slot);
        if (v[s] != value || l[s] != lv) {
          v[s] = value;
          l[s] = lv;
          changed = true;
        }
      }
      changed |= settle(child, v, l, force);
    }
    for (const auto& o : m.outputs) {
      uint64_t value = 0;
      bool lv = false;
      for (const auto& sl : o.slices) {
        const Node& cn = nodes[static_cast<size_t>(node.children[static_cast<size_t>(sl.instance)])];
        const size_t s = static_cast<size_t>(cn.offset + sl.child_slot);
        value |= v[s] << sl.lo;
        lv = lv || l[s];
      }
      changed |= write(o.parent_slot, value & width_mask(m.widths[static_cast<size_t>(o.parent_slot)]), lv);
    }
    any |= changed;
    if (!changed) break;
  }
  return any;
}

void Engine::init_run(Simulator::Run& r, const uint64_t* in, const InputMap* initial) const {
  r.value.assign(static_cast<size_t>(slots), 0);
  r.live.assign(static_cast<size_t>(slots), 0);
  if (initial) {
    for (const auto& [name, value] : *initial) {
      auto it = index.find(name);
      if (it == index.end() || !is_reg[static_cast<size_t>(it->second)]) {
        throw Error("initial value for '" + name + "', which is not a register");
      }
      r.value[static_cast<size_t>(it->second)] = value & width_mask(widths[static_cast<size_t>(it->second)]);
    }
  }
  for (size_t i = 0; i < input_slots.size(); ++i) {
    const size_t s = static_cast<size_t>(input_slots[i]);
    r.value[s] = in[i] & width_mask(widths[s]);
  }
  settle(0, r.value.data(), r.live.data(), nullptr);
}

void Engine::advance(const Simulator::Run& prev, Simulator::Run& out, const uint8_t* force,
                     const uint64_t* in) const {
  out.value = prev.value;
  out.live = prev.live;
  for (const auto& node : nodes) {
    const CModule& m = modules[static_cast<size_t>(node.module)];
    const uint64_t* pv = prev.value.data() + node.offset;
    const uint8_t* pl = prev.live.data() + node.offset;
    for (int r : m.regs) {
      Out o;
      exec(m.prog[static_cast<size_t>(r)], pv, pl, false, o);
      if (!o.assigned) continue;
      const size_t s = static_cast<size_t>(node.offset + r);
      out.value[s] = o.value & width_mask(m.widths[static_cast<size_t>(r)]);
      out.live[s] = o.live;
    }
  }
  for (size_t i = 0; i < input_slots.size(); ++i) {
    const size_t s = static_cast<size_t>(input_slots[i]);
    out.value[s] = in[i] & width_mask(widths[s]);
    out.live[s] = 0;
  }
  if (force) {
    for (int s = 0; s < top_slots; ++s) {
      if (force[s]) out.live[static_cast<size_t>(s)] = 1;
    }
  }
  settle(0, out.value.data(), out.live.data(), force);
}

}  // namespace detail

namespace {

using detail::Engine;

int build_nodes(Engine& e, const std::map<std::string, int>& module_index, const std::string& module,
                const std::string& path) {
  const int idx = static_cast<int>(e.nodes.size());
  e.nodes.push_back({});
  const int mi = module_index.at(module);
  const detail::CModule& m = e.modules[static_cast<size_t>(mi)];
  e.nodes[static_cast<size_t>(idx)].module = mi;
  e.nodes[static_cast<size_t>(idx)].offset = e.slots;
  for (size_t i = 0; i < m.names.size(); ++i) {
    e.index[path + m.names[i]] = e.slots + static_cast<int>(i);
    e.names.push_back(path + m.names[i]);
    e.widths.push_back(m.widths[i]);
    e.is_reg.push_back(m.is_reg[i]);
  }
  e.slots += static_cast<int>(m.names.size());
  for (const auto& inst : m.def->instances) {
    const int child = build_nodes(e, module_index, inst.module, path + inst.name + ".");
    e.nodes[static_cast<size_t>(idx)].children.push_back(child);
  }
  return idx;
}

std::vector<uint64_t> input_vector(const Engine& e, const InputMap& inputs) {
  std::vector<uint64_t> out(e.inputs.size(), 0);
  for (size_t i = 0; i < e.inputs.size(); ++i) {
    auto it = inputs.find(e.inputs[i]);
    if (it == inputs.end()) throw Error("missing input value for '" + e.inputs[i] + "'");
    out[i] = it->second;
  }
  return out;
}

std::vector<uint8_t> force_mask(const Engine& e, const std::set<std::string>& sources) {
  std::vector<uint8_t> force(static_cast<size_t>(e.slots), 0);
  for (const auto& s : sources) {
    auto it = e.index.find(s);
    if (it == e.index.end() || it->second >= e.top_slots) throw Error("source '" + s + "' is not a top-level net");
    force[static_cast<size_t>(it->second)] = 1;
  }
  return force;
}

std::string hex_value(uint64_t v, int width) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%0*llx", (width + 3) / 4, static_cast<unsigned long long>(v));
  return buf;
}

}  // namespace

Simulator::Simulator(const ElaboratedDesign& design) : engine_(std::make_unique<Engine>()) {
  Engine& e = *engine_;
  std::map<std::string, int> module_index;
  for (const auto& m : design.program.modules) {
    module_index[m.name] = static_cast<int>(e.modules.size());
    e.modules.push_back(detail::compile_module(design.program, m));
  }
  const ModuleDef& top = design.top();
  build_nodes(e, module_index, top.name, "");
  e.top_slots = static_cast<int>(e.modules[static_cast<size_t>(module_index.at(top.name))].names.size());
  e.flat = e.nodes.size() == 1;
  for (const auto* in : top.inputs()) {
    if (in->name == top.clock) continue;
    e.inputs.push_back(in->name);
    e.input_slots.push_back(e.index.at(in->name));
  }
}

Simulator::~Simulator() = default;
Simulator::Simulator(Simulator&&) noexcept = default;
Simulator& Simulator::operator=(Simulator&&) noexcept = default;

const std::vector<std::string>& Simulator::nets() const { return engine_->names; }
const std::vector<int>& Simulator::widths() const { return engine_->widths; }
const std::vector<std::string>& Simulator::inputs() const { return engine_->inputs; }

std::vector<std::string> Simulator::registers() const {
  std::vector<std::string> out;
  for (size_t i = 0; i < engine_->names.size(); ++i) {
    if (engine_->is_reg[i]) out.push_back(engine_->names[i]);
  }
  return out;
}

int Simulator::index(const std::string& net) const {
  auto it = engine_->index.find(net);
  return it == engine_->index.end() ? -1 : it->second;
}

bool Simulator::is_top_level(const std::string& net) const {
  const int i = index(net);
  return i >= 0 && i < engine_->top_slots;
}

Simulator::Run Simulator::initial(const InputMap& inputs, const InputMap* initial) const {
  Run r;
  const auto in = input_vector(*engine_, inputs);
  engine_->init_run(r, in.data(), initial);
  return r;
}

Simulator::Run Simulator::next(const Run& prev, int next_cycle, int t, const std::set<std::string>& sources,
                               const InputMap& inputs) const {
  Run r;
  const auto in = input_vector(*engine_, inputs);
  if (next_cycle == t) {
    const auto force = force_mask(*engine_, sources);
    engine_->advance(prev, r, force.data(), in.data());
    for (size_t i = 0; i < engine_->input_slots.size(); ++i) {
      const size_t s = static_cast<size_t>(engine_->input_slots[i]);
      r.live[s] = force[s];
    }
  } else {
    engine_->advance(prev, r, nullptr, in.data());
  }
  return r;
}

int PairTrace::index(const std::string& net) const {
  auto it = std::find(nets.begin(), nets.end(), net);
  if (it == nets.end()) throw Error("net '" + net + "' not in trace");
  return static_cast<int>(it - nets.begin());
}

uint64_t PairTrace::value(int cycle, int run, const std::string& net) const {
  return configs.at(static_cast<size_t>(cycle)).store[run][static_cast<size_t>(index(net))];
}

bool PairTrace::live(int cycle, int run, const std::string& net) const {
  return configs.at(static_cast<size_t>(cycle)).live[run][static_cast<size_t>(index(net))] != 0;
}

PairConfiguration step(const Simulator& sim, const PairConfiguration& cfg, const InputMap& inputs_left,
                       const InputMap& inputs_right) {
  PairConfiguration next;
  next.cycle = cfg.cycle + 1;
  next.t = cfg.t;
  next.sources = cfg.sources;
  const InputMap* in[2] = {&inputs_left, &inputs_right};
  for (int run = 0; run < 2; ++run) {
    Simulator::Run prev{cfg.store[run], cfg.live[run]};
    Simulator::Run r = sim.next(prev, next.cycle, cfg.t, cfg.sources, *in[run]);
    next.store[run] = std::move(r.value);
    next.live[run] = std::move(r.live);
  }
  return next;
}

PairConfiguration step(const PairConfiguration& cfg, const ElaboratedDesign& design, const InputMap& inputs_left,
                       const InputMap& inputs_right) {
  Simulator sim(design);
  return step(sim, cfg, inputs_left, inputs_right);
}

PairTrace run_pair(const Simulator& sim, const std::set<std::string>& sources, int t, int n,
                   const std::vector<InputMap>& inputs_left, const std::vector<InputMap>& inputs_right,
                   const AssumptionSet& assumptions, const InputMap* initial_left, const InputMap* initial_right) {
  if (n <= 0) throw Error("run length must be positive");
  if (t < 1) throw Error("initial cycle t must be at least 1");
  if (t >= n) throw Error("initial cycle t must be smaller than the run length");
  if (static_cast<int>(inputs_left.size()) < n || static_cast<int>(inputs_right.size()) < n) {
    throw Error("input streams shorter than the run length");
  }
  for (const auto& s : sources) {
    if (!sim.is_top_level(s)) throw Error("source '" + s + "' is not a top-level net");
  }
  PairTrace tr;
  tr.nets = sim.nets();
  tr.widths = sim.widths();
  tr.inputs[kLeft].assign(inputs_left.begin(), inputs_left.begin() + n);
  tr.inputs[kRight].assign(inputs_right.begin(), inputs_right.begin() + n);
  for (const auto& in : sim.inputs()) {
    if (assumptions.publics.count(in)) {
      for (int c = 0; c < n; ++c) tr.inputs[kRight][static_cast<size_t>(c)][in] = tr.inputs[kLeft][static_cast<size_t>(c)].at(in);
    } else if (assumptions.flush.count(in)) {
      tr.inputs[kRight][0][in] = tr.inputs[kLeft][0].at(in);
    }
  }
  InputMap init[2];
  if (initial_left) init[kLeft] = *initial_left;
  if (initial_right) init[kRight] = *initial_right;
  for (const auto& r : sim.registers()) {
    if (!assumptions.flush.count(r) && !assumptions.publics.count(r)) continue;
    auto it = init[kLeft].find(r);
    init[kRight][r] = it == init[kLeft].end() ? 0 : it->second;
  }

  Simulator::Run run[2];
  for (int side = 0; side < 2; ++side) run[side] = sim.initial(tr.inputs[side][0], &init[side]);
  auto record = [&](int cycle) {
    PairConfiguration cfg;
    cfg.cycle = cycle;
    cfg.t = t;
    cfg.sources = sources;
    for (int side = 0; side < 2; ++side) {
      cfg.store[side] = run[side].value;
      cfg.live[side] = run[side].live;
    }
    tr.configs.push_back(std::move(cfg));
  };
  record(0);
  for (int c = 1; c < n; ++c) {
    for (int side = 0; side < 2; ++side) {
      run[side] = sim.next(run[side], c, t, sources, tr.inputs[side][static_cast<size_t>(c)]);
    }
    record(c);
  }

  for (const auto& net : assumptions.publics) {
    const int i = sim.index(net);
    if (i < 0) continue;
    for (const auto& cfg : tr.configs) {
      const size_t s = static_cast<size_t>(i);
      if (cfg.store[kLeft][s] != cfg.store[kRight][s] || cfg.live[kLeft][s] != cfg.live[kRight][s]) {
        tr.assumption_violated = true;
        tr.violation_note = "public net '" + net + "' differs at cycle " + std::to_string(cfg.cycle);
        return tr;
      }
    }
  }
  for (const auto& net : assumptions.flush) {
    const int i = sim.index(net);
    if (i < 0) continue;
    const size_t s = static_cast<size_t>(i);
    if (tr.configs[0].store[kLeft][s] != tr.configs[0].store[kRight][s]) {
      tr.assumption_violated = true;
      tr.violation_note = "flushed net '" + net + "' differs at cycle 0";
      return tr;
    }
  }
  return tr;
}

PairTrace run_pair(const ElaboratedDesign& design, const std::set<std::string>& sources, int t, int n,
                   const std::vector<InputMap>& inputs_left, const std::vector<InputMap>& inputs_right,
                   const AssumptionSet& assumptions) {
  Simulator sim(design);
  return run_pair(sim, sources, t, n, inputs_left, inputs_right, expand_aliases(design, assumptions));
}

Verdict check_ct_on_trace(const PairTrace& trace, const std::set<std::string>& sinks) {
  std::vector<std::pair<std::string, size_t>> idx;
  for (const auto& s : sinks) idx.emplace_back(s, static_cast<size_t>(trace.index(s)));
  for (const auto& cfg : trace.configs) {
    for (const auto& [name, i] : idx) {
      const bool l = cfg.live[kLeft][i] != 0;
      const bool r = cfg.live[kRight][i] != 0;
      if (l != r) return Verdict::violation(name, cfg.cycle, l, r);
    }
  }
  return Verdict::ok();
}

namespace {

// What a single run contributes to the pair check.
struct Signature {
  std::vector<uint8_t> sink_live;       // cycle-major
  std::vector<uint64_t> public_values;  // cycle-major, non-input publics
  std::vector<uint8_t> public_live;
  std::vector<uint64_t> flush_values;   // cycle 0 only
  bool operator_eq_public(const Signature& o) const {
    return public_values == o.public_values && public_live == o.public_live && flush_values == o.flush_values;
  }
};

struct SearchContext {
  const Engine* e = nullptr;
  std::vector<size_t> sink_slots;
  std::vector<size_t> public_slots;
  std::vector<size_t> flush_slots;
  std::vector<uint8_t> force;
  int bound = 0;
};

Signature simulate_constant(const SearchContext& ctx, const std::vector<uint64_t>& in, int t) {
  Signature sig;
  Simulator::Run run, next;
  const std::vector<uint64_t> zeros(in.size(), 0);
  ctx.e->init_run(run, zeros.data(), nullptr);
  for (size_t s : ctx.flush_slots) sig.flush_values.push_back(run.value[s]);
  for (int c = 0; c < ctx.bound; ++c) {
    if (c > 0) {
      ctx.e->advance(run, next, c == t ? ctx.force.data() : nullptr, in.data());
      if (c == t) {
        for (size_t i = 0; i < ctx.e->input_slots.size(); ++i) {
          const size_t s = static_cast<size_t>(ctx.e->input_slots[i]);
          next.live[s] = ctx.force[s];
        }
      }
      std::swap(run, next);
    }
    for (size_t s : ctx.sink_slots) sig.sink_live.push_back(run.live[s]);
    for (size_t s : ctx.public_slots) {
      sig.public_values.push_back(run.value[s]);
      sig.public_live.push_back(run.live[s]);
    }
  }
  return sig;
}

}  // namespace

std::optional<PairTrace> search_witness(const ElaboratedDesign& design, const Annotations& ann_in,
                                        const SearchOptions& options, SearchStats* stats) {
  Annotations expanded = ann_in;
  expanded.assumptions = expand_aliases(design, ann_in.assumptions);
  const Annotations& ann = expanded;
  if (options.bound < 2) throw Error("search bound must be at least 2");
  Simulator sim(design);
  const Engine& e = sim.engine();
  SearchStats local_stats;
  SearchStats& st = stats ? *stats : local_stats;
  st = {};
  if (ann.sources.empty()) return std::nullopt;

  SearchContext ctx;
  ctx.e = &e;
  ctx.bound = options.bound;
  ctx.force = force_mask(e, ann.sources);
  for (const auto& s : ann.sinks) {
    const int i = sim.index(s);
    if (i < 0) throw Error("sink '" + s + "' is not simulated");
    ctx.sink_slots.push_back(static_cast<size_t>(i));
  }
  const std::set<std::string> input_set(e.inputs.begin(), e.inputs.end());
  for (const auto& p : ann.assumptions.publics) {
    const int i = sim.index(p);
    if (i >= 0 && !input_set.count(p)) ctx.public_slots.push_back(static_cast<size_t>(i));
  }
  for (const auto& f : ann.assumptions.flush) {
    const int i = sim.index(f);
    if (i >= 0 && !input_set.count(f)) ctx.flush_slots.push_back(static_cast<size_t>(i));
  }

  // Input layout: the first input occupies the most significant bits.
  std::vector<int> in_width;
  int bits_left = 0;
  int bits_right = 0;
  std::vector<uint8_t> copied(e.inputs.size(), 0);
  for (size_t i = 0; i < e.inputs.size(); ++i) {
    const int w = e.widths[static_cast<size_t>(e.input_slots[i])];
    in_width.push_back(w);
    bits_left += w;
    const std::string& name = e.inputs[i];
    // Cycle-0 inputs are zero in both runs, so flushed inputs vary freely.
    copied[i] = ann.assumptions.publics.count(name) > 0;
    if (!copied[i]) bits_right += w;
  }
  const int n_t = options.bound - 1;
  const int bits = bits_left + bits_right;
  const bool exhaustive =
      bits <= 40 && (uint64_t{1} << bits) <= options.budget / static_cast<uint64_t>(n_t);
  st.exhaustive = exhaustive;

  auto build = [&](int t, const std::vector<InputMap>& l, const std::vector<InputMap>& r, const InputMap* il,
                   const InputMap* ir) -> std::optional<PairTrace> {
    PairTrace tr = run_pair(sim, ann.sources, t, options.bound, l, r, ann.assumptions, il, ir);
    if (tr.assumption_violated || check_ct_on_trace(tr, ann.sinks).constant_time) return std::nullopt;
    return tr;
  };

  if (exhaustive) {
    auto decode = [&](uint64_t a) {
      std::vector<uint64_t> in(e.inputs.size(), 0);
      int shift = bits_left;
      for (size_t i = 0; i < in.size(); ++i) {
        shift -= in_width[i];
        in[i] = (a >> shift) & width_mask(in_width[i]);
      }
      return in;
    };
    auto merge = [&](uint64_t a, uint64_t b) {
      // Right assignment: copied inputs from `a`, the rest from `b`.
      uint64_t full = 0;
      int shift_a = bits_left;
      int shift_b = bits_right;
      for (size_t i = 0; i < e.inputs.size(); ++i) {
        shift_a -= in_width[i];
        uint64_t v;
        if (copied[i]) {
          v = (a >> shift_a) & width_mask(in_width[i]);
        } else {
          shift_b -= in_width[i];
          v = (b >> shift_b) & width_mask(in_width[i]);
        }
        full |= v << shift_a;
      }
      return full;
    };
    const uint64_t n_left = uint64_t{1} << bits_left;
    const uint64_t n_right = uint64_t{1} << bits_right;
    for (int t = 1; t <= n_t; ++t) {
      std::vector<std::optional<Signature>> cache(static_cast<size_t>(n_left));
      auto sig = [&](uint64_t a) -> const Signature& {
        auto& slot = cache[static_cast<size_t>(a)];
        if (!slot) slot = simulate_constant(ctx, decode(a), t);
        return *slot;
      };
      for (uint64_t a = 0; a < n_left; ++a) {
        for (uint64_t b = 0; b < n_right; ++b) {
          ++st.trials;
          const uint64_t r = merge(a, b);
          const Signature& sl = sig(a);
          const Signature& sr = sig(r);
          if (!sl.operator_eq_public(sr) || sl.sink_live == sr.sink_live) continue;
          auto to_maps = [&](uint64_t x) {
            const auto in = decode(x);
            InputMap m;
            for (size_t i = 0; i < in.size(); ++i) m[e.inputs[i]] = in[i];
            std::vector<InputMap> stream(static_cast<size_t>(options.bound), m);
            for (auto& [name, v] : stream.front()) v = 0;
            return stream;
          };
          if (auto tr = build(t, to_maps(a), to_maps(r), nullptr, nullptr)) return tr;
        }
      }
    }
    return std::nullopt;
  }

  std::mt19937_64 rng(options.seed);
  const auto regs = sim.registers();
  for (uint64_t trial = 0; trial < options.budget; ++trial) {
    ++st.trials;
    const int t = 1 + static_cast<int>(rng() % static_cast<uint64_t>(n_t));
    std::vector<InputMap> in[2];
    for (int side = 0; side < 2; ++side) in[side].resize(static_cast<size_t>(options.bound));
    for (int c = 0; c < options.bound; ++c) {
      for (size_t i = 0; i < e.inputs.size(); ++i) {
        const uint64_t l = rng() & width_mask(in_width[i]);
        const uint64_t r = rng() & width_mask(in_width[i]);
        in[kLeft][static_cast<size_t>(c)][e.inputs[i]] = l;
        in[kRight][static_cast<size_t>(c)][e.inputs[i]] = r;
      }
    }
    InputMap init[2];
    for (const auto& r : regs) {
      const uint64_t mask = width_mask(e.widths[static_cast<size_t>(sim.index(r))]);
      init[kLeft][r] = rng() & mask;
      init[kRight][r] = rng() & mask;
    }
    // Cheap check first: only sink liveness, then the full trace.
    Simulator::Run run[2], next;
    std::vector<uint64_t> vin[2];
    bool differs = false;
    for (int side = 0; side < 2; ++side) {
      for (size_t i = 0; i < e.inputs.size(); ++i) {
        const std::string& name = e.inputs[i];
        uint64_t v = in[side][0].at(name);
        if (side == kRight && copied[i]) v = in[kLeft][0].at(name);
        vin[side].push_back(v);
      }
      InputMap init_side = init[side];
      if (side == kRight) {
        for (const auto& r : regs) {
          if (ann.assumptions.flush.count(r) || ann.assumptions.publics.count(r)) init_side[r] = init[kLeft][r];
        }
      }
      e.init_run(run[side], vin[side].data(), &init_side);
    }
    for (int c = 1; c < options.bound && !differs; ++c) {
      for (int side = 0; side < 2; ++side) {
        for (size_t i = 0; i < e.inputs.size(); ++i) {
          const std::string& name = e.inputs[i];
          const bool pub = ann.assumptions.publics.count(name) > 0;
          vin[side][i] = in[side == kRight && pub ? kLeft : side][static_cast<size_t>(c)].at(name);
        }
        e.advance(run[side], next, c == t ? ctx.force.data() : nullptr, vin[side].data());
        if (c == t) {
          for (size_t i = 0; i < e.input_slots.size(); ++i) {
            const size_t s = static_cast<size_t>(e.input_slots[i]);
            next.live[s] = ctx.force[s];
          }
        }
        std::swap(run[side], next);
      }
      for (size_t s : ctx.sink_slots) differs = differs || run[kLeft].live[s] != run[kRight].live[s];
    }
    if (!differs) continue;
    if (auto tr = build(t, in[kLeft], in[kRight], &init[kLeft], &init[kRight])) return tr;
  }
  return std::nullopt;
}

std::string dump_trace(const PairTrace& trace) {
  std::string out;
  for (const auto& cfg : trace.configs) {
    for (int side = 0; side < 2; ++side) {
      out += std::to_string(cfg.cycle);
      out += side == kLeft ? "\tL" : "\tR";
      for (size_t i = 0; i < trace.nets.size(); ++i) {
        out += "\t" + trace.nets[i] + "=0x" + hex_value(cfg.store[side][i], trace.widths[i]) + ":" +
               (cfg.live[side][i] ? "1" : "0");
      }
      out += "\n";
    }
  }
  return out;
}

}  // namespace ctv
