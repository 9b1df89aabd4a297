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

// Horn-clause export.
//
// Every net x of a module contributes four state variables: x!L, x!R (the
// values in the two runs) and x!lL, x!lR (the liveness bits); a trailing
// quote marks the next cycle. Variables of instantiated modules are scoped
// as "<module>:<net>". c is the cycle, c' the next cycle, t the cycle at
// which sources become live.

#include <algorithm>
#include <sstream>

#include "ctv/model.hpp"
#include "ctv/verifier.hpp"

namespace ctv {
namespace {

const char* kRun[2] = {"L", "R"};

std::string join(const std::vector<std::string>& xs, const std::string& sep = " ") {
  std::string out;
  for (const auto& x : xs) out += (out.empty() ? "" : sep) + x;
  return out;
}

std::string conj(const std::vector<std::string>& xs) {
  if (xs.empty()) return "true";
  if (xs.size() == 1) return xs.front();
  return "(and " + join(xs) + ")";
}

std::string disj(std::set<std::string> xs) {
  if (xs.empty()) return "false";
  if (xs.size() == 1) return *xs.begin();
  return "(or " + join({xs.begin(), xs.end()}) + ")";
}

std::string ite(const std::string& c, const std::string& a, const std::string& b) {
  return a == b ? a : "(ite " + c + " " + a + " " + b + ")";
}

const char* op_name(UnaryOp op) {
  switch (op) {
    case UnaryOp::kNot: return "bvnot";
    case UnaryOp::kLogicalNot: return "lnot";
    case UnaryOp::kNeg: return "bvneg";
    case UnaryOp::kReduceAnd: return "redand";
    case UnaryOp::kReduceOr: return "redor";
    case UnaryOp::kReduceXor: return "redxor";
  }
  return "?";
}

const char* op_name(BinaryOp op) {
  switch (op) {
    case BinaryOp::kAnd: return "bvand";
    case BinaryOp::kOr: return "bvor";
    case BinaryOp::kXor: return "bvxor";
    case BinaryOp::kLogicalAnd: return "land";
    case BinaryOp::kLogicalOr: return "lor";
    case BinaryOp::kAdd: return "bvadd";
    case BinaryOp::kSub: return "bvsub";
    case BinaryOp::kShl: return "bvshl";
    case BinaryOp::kShr: return "bvlshr";
    case BinaryOp::kEq: return "=";
    case BinaryOp::kNeq: return "distinct";
    case BinaryOp::kLt: return "bvult";
    case BinaryOp::kLe: return "bvule";
    case BinaryOp::kGt: return "bvugt";
    case BinaryOp::kGe: return "bvuge";
  }
  return "?";
}

// Renders one module's transition relation and its relation arguments.
class ModuleWriter {
 public:
  ModuleWriter(const Program& p, const ModuleDef& m, std::string scope)
      : p_(p), m_(m), model_(build_model(p, m)), scope_(std::move(scope)) {
    for (const auto& n : m.nets) {
      if (n.name != m.clock) nets_.push_back(&n);
    }
  }

  const std::vector<const Net*>& nets() const { return nets_; }

  std::string var(const std::string& net, int run, bool live, bool primed) const {
    return scope_ + net + "!" + (live ? "l" : "") + kRun[run] + (primed ? "'" : "");
  }

  // Relation arguments: four variables per net.
  std::vector<std::string> state(bool primed) const {
    std::vector<std::string> out;
    for (const Net* n : nets_) {
      for (bool live : {false, true}) {
        for (int run = 0; run < 2; ++run) out.push_back(var(n->name, run, live, primed));
      }
    }
    return out;
  }

  std::vector<std::string> port_state(bool primed) const {
    std::vector<std::string> out;
    for (const auto& port : m_.port_order) {
      if (port == m_.clock) continue;
      for (bool live : {false, true}) {
        for (int run = 0; run < 2; ++run) out.push_back(var(port, run, live, primed));
      }
    }
    return out;
  }

  std::vector<std::string> declarations() const {
    std::vector<std::string> out;
    for (bool primed : {false, true}) {
      for (const Net* n : nets_) {
        for (int run = 0; run < 2; ++run) {
          out.push_back("(" + var(n->name, run, false, primed) + " (_ BitVec " + std::to_string(n->width) + "))");
        }
        for (int run = 0; run < 2; ++run) out.push_back("(" + var(n->name, run, true, primed) + " Bool)");
      }
    }
    return out;
  }

  std::string expr(const Expr& e, int run, bool primed) const {
    switch (e.kind) {
      case Expr::Kind::kConst:
        return "(_ bv" + std::to_string(e.value) + " " + std::to_string(e.sized ? e.width : 32) + ")";
      case Expr::Kind::kVar:
        return var(e.name, run, false, primed);
      case Expr::Kind::kSelect:
        return "((_ extract " + std::to_string(e.hi) + " " + std::to_string(e.lo) + ") " +
               var(e.name, run, false, primed) + ")";
      case Expr::Kind::kUnary:
        return std::string("(") + op_name(e.unary_op) + " " + expr(*e.args[0], run, primed) + ")";
      case Expr::Kind::kBinary:
        return std::string("(") + op_name(e.binary_op) + " " + expr(*e.args[0], run, primed) + " " +
               expr(*e.args[1], run, primed) + ")";
      case Expr::Kind::kMux:
        return "(ite " + expr(*e.args[0], run, primed) + " " + expr(*e.args[1], run, primed) + " " +
               expr(*e.args[2], run, primed) + ")";
      case Expr::Kind::kConcat: {
        std::vector<std::string> parts;
        for (const auto& a : e.args) parts.push_back(expr(*a, run, primed));
        return "(concat " + join(parts) + ")";
      }
    }
    return "?";
  }

  std::set<std::string> live_of(const Expr& e, int run, bool primed) const {
    std::set<std::string> out;
    for (const auto& r : reads_of(e)) out.insert(var(r, run, true, primed));
    return out;
  }

  // Value (or liveness) of `net` after `s`, given `cur` before it. Reads
  // are taken at `primed`.
  std::string next(const Stmt& s, const std::string& net, const std::string& cur, int run, bool primed, bool live,
                   const std::set<std::string>& enclosing) const {
    switch (s.kind) {
      case Stmt::Kind::kAssign:
        if (s.lhs != net) return cur;
        if (!live) return expr(*s.rhs, run, primed);
        {
          std::set<std::string> l = enclosing;
          auto r = live_of(*s.rhs, run, primed);
          l.insert(r.begin(), r.end());
          return disj(l);
        }
      case Stmt::Kind::kBlock: {
        std::string acc = cur;
        for (const auto& b : s.body) acc = next(*b, net, acc, run, primed, live, enclosing);
        return acc;
      }
      case Stmt::Kind::kIf:
      case Stmt::Kind::kCase:
        break;
    }
    if (!assigns(s, net)) return cur;
    std::set<std::string> inner = enclosing;
    auto cl = live_of(*s.cond, run, primed);
    inner.insert(cl.begin(), cl.end());
    const std::string c = expr(*s.cond, run, primed);
    if (s.kind == Stmt::Kind::kIf) {
      const std::string a = s.then_s ? next(*s.then_s, net, cur, run, primed, live, inner) : cur;
      const std::string b = s.else_s ? next(*s.else_s, net, cur, run, primed, live, inner) : cur;
      return ite(c, a, b);
    }
    std::string acc = s.default_s ? next(*s.default_s, net, cur, run, primed, live, inner) : cur;
    for (auto it = s.arms.rbegin(); it != s.arms.rend(); ++it) {
      std::vector<std::string> tests;
      for (const auto& l : it->labels) tests.push_back("(= " + c + " " + expr(*l, run, primed) + ")");
      const std::string test = tests.size() == 1 ? tests.front() : "(or " + join(tests) + ")";
      const std::string a = it->body ? next(*it->body, net, cur, run, primed, live, inner) : cur;
      acc = ite(test, a, acc);
    }
    return acc;
  }

  // Combinational constraints at one time point: process-driven wires.
  std::vector<std::string> wires(bool primed) const {
    std::vector<std::string> out;
    for (const auto& w : model_.wire_order) {
      const NetDriver& d = model_.driver(w);
      const Stmt& body = *m_.processes[static_cast<size_t>(d.process)].body;
      for (int run = 0; run < 2; ++run) {
        out.push_back("(= " + var(w, run, false, primed) + " " +
                      next(body, w, var(w, run, false, primed), run, primed, false, {}) + ")");
      }
      for (int run = 0; run < 2; ++run) {
        std::string l = next(body, w, "false", run, primed, true, {});
        if (forced_.count(w)) l = "(or (= c' t) " + l + ")";
        out.push_back("(= " + var(w, run, true, primed) + " " + l + ")");
      }
    }
    return out;
  }

  // Register updates from the unprimed to the primed state.
  std::vector<std::string> registers() const {
    std::vector<std::string> out;
    for (const Net* n : nets_) {
      const NetDriver& d = model_.driver(n->name);
      if (d.kind != DriverKind::kProcess || n->kind != NetKind::kReg) continue;
      const Stmt& body = *m_.processes[static_cast<size_t>(d.process)].body;
      for (int run = 0; run < 2; ++run) {
        out.push_back("(= " + var(n->name, run, false, true) + " " +
                      next(body, n->name, var(n->name, run, false, false), run, false, false, {}) + ")");
      }
      for (int run = 0; run < 2; ++run) {
        std::string l = next(body, n->name, var(n->name, run, true, false), run, false, true, {});
        if (forced_.count(n->name)) l = "(or (= c' t) " + l + ")";
        out.push_back("(= " + var(n->name, run, true, true) + " " + l + ")");
      }
    }
    return out;
  }

  // Liveness of top-level inputs in the primed state.
  std::vector<std::string> inputs() const {
    std::vector<std::string> out;
    for (const Net* n : nets_) {
      if (!n->is_input()) continue;
      for (int run = 0; run < 2; ++run) {
        const std::string v = var(n->name, run, true, true);
        out.push_back(forced_.count(n->name) ? "(= " + v + " (= c' t))" : "(not " + v + ")");
      }
    }
    return out;
  }

  // One sum_<module> reference per instance, over primed variables.
  std::vector<std::string> instances() const {
    std::vector<std::string> out;
    for (const auto& inst : m_.instances) {
      const ModuleDef& child = *p_.find(inst.module);
      std::vector<std::string> args;
      for (const auto& port : child.port_order) {
        if (port == child.clock) continue;
        const ExprPtr& e = std::find_if(inst.bindings.begin(), inst.bindings.end(),
                                        [&](const PortBinding& b) { return b.port == port; })
                               ->expr;
        for (int run = 0; run < 2; ++run) args.push_back(expr(*e, run, true));
        for (int run = 0; run < 2; ++run) args.push_back(disj(live_of(*e, run, true)));
      }
      out.push_back("(sum_" + inst.module + " " + join(args) + ")");
    }
    return out;
  }

  std::vector<std::string> dead(bool primed) const {
    std::vector<std::string> out;
    for (const Net* n : nets_) {
      for (int run = 0; run < 2; ++run) out.push_back("(not " + var(n->name, run, true, primed) + ")");
    }
    return out;
  }

  void set_forced(std::set<std::string> f) { forced_ = std::move(f); }

 private:
  const Program& p_;
  const ModuleDef& m_;
  ModuleModel model_;
  std::string scope_;
  std::vector<const Net*> nets_;
  std::set<std::string> forced_;
};

}  // namespace

std::string export_horn(const ElaboratedDesign& design, const Annotations& ann, bool modular) {
  if (modular == design.inlined) {
    throw Error(modular ? "modular export needs a hierarchical design" : "inlined export needs a flattened design");
  }
  const ModuleDef& top = design.top();
  ModuleWriter w(design.program, top, "");
  w.set_forced(ann.sources);

  std::vector<std::string> decls{"(c Int)", "(c' Int)", "(t Int)"};
  auto d = w.declarations();
  decls.insert(decls.end(), d.begin(), d.end());
  auto state = w.state(false);
  state.push_back("c");
  state.push_back("t");
  auto next_state = w.state(true);
  next_state.push_back("c'");
  next_state.push_back("t");
  std::vector<std::string> rels{"(inv " + std::to_string(state.size()) + ")"};

  std::vector<std::string> clauses;
  // init
  {
    std::vector<std::string> body{"(= c 0)", "(>= t 1)"};
    auto dead = w.dead(false);
    body.insert(body.end(), dead.begin(), dead.end());
    for (const Net* n : w.nets()) {
      if (ann.assumptions.flush.count(n->name) || ann.assumptions.publics.count(n->name)) {
        body.push_back("(= " + w.var(n->name, 0, false, false) + " " + w.var(n->name, 1, false, false) + ")");
      }
      if (ann.assumptions.publics.count(n->name)) {
        body.push_back("(= " + w.var(n->name, 0, true, false) + " " + w.var(n->name, 1, true, false) + ")");
      }
    }
    clauses.push_back("(init (=> " + conj(body) + " (inv " + join(state) + ")))");
  }
  // cons
  {
    std::vector<std::string> body{"(inv " + join(state) + ")", "(= c' (+ c 1))"};
    for (auto part : {w.registers(), w.wires(true), w.inputs(), w.instances()}) {
      body.insert(body.end(), part.begin(), part.end());
    }
    for (const Net* n : w.nets()) {
      if (!ann.assumptions.publics.count(n->name)) continue;
      for (bool live : {false, true}) {
        body.push_back("(= " + w.var(n->name, 0, live, true) + " " + w.var(n->name, 1, live, true) + ")");
      }
    }
    clauses.push_back("(cons (=> " + conj(body) + " (inv " + join(next_state) + ")))");
  }
  // ct, one per sink
  for (const Net* n : w.nets()) {
    if (!ann.sinks.count(n->name)) continue;
    clauses.push_back("(ct (=> (inv " + join(state) + ") (= " + w.var(n->name, 0, true, false) + " " +
                      w.var(n->name, 1, true, false) + ")))");
  }
  // Per instantiated module: transition (init folded in) and summary.
  if (modular) {
    for (const auto& name : design.child_modules()) {
      ModuleWriter cw(design.program, design.module(name), name + ":");
      auto cd = cw.declarations();
      decls.insert(decls.end(), cd.begin(), cd.end());
      auto cs = cw.state(false);
      cs.push_back("c");
      cs.push_back("t");
      auto cn = cw.state(true);
      cn.push_back("c'");
      cn.push_back("t");
      const auto ports = cw.port_state(false);
      rels.push_back("(inv_" + name + " " + std::to_string(cs.size()) + ")");
      rels.push_back("(sum_" + name + " " + std::to_string(ports.size()) + ")");

      std::vector<std::string> step{"(inv_" + name + " " + join(cs) + ")", "(= c' (+ c 1))"};
      for (auto part : {cw.registers(), cw.instances()}) step.insert(step.end(), part.begin(), part.end());
      std::vector<std::string> start{"(= c' 0)"};
      auto dead = cw.dead(true);
      start.insert(start.end(), dead.begin(), dead.end());
      std::vector<std::string> body = cw.wires(true);
      body.push_back("(or " + conj(start) + " " + conj(step) + ")");
      clauses.push_back("(cons (=> " + conj(body) + " (inv_" + name + " " + join(cn) + ")))");
      clauses.push_back("(sum (=> (inv_" + name + " " + join(cs) + ") (sum_" + name + " " + join(ports) + ")))");
    }
  }

  std::ostringstream os;
  os << "(declare (vars " << join(decls) << ") (rels " << join(rels) << "))\n";
  for (const auto& c : clauses) os << c << "\n";
  return os.str();
}

}  // namespace ctv
