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

#include "ctv/ir.hpp"

#include <algorithm>

namespace ctv {

const char* to_string(UnaryOp op) {
  switch (op) {
    case UnaryOp::kNot: return "~";
    case UnaryOp::kLogicalNot: return "!";
    case UnaryOp::kNeg: return "-";
    case UnaryOp::kReduceAnd: return "&";
    case UnaryOp::kReduceOr: return "|";
    case UnaryOp::kReduceXor: return "^";
  }
  return "?";
}

const char* to_string(BinaryOp op) {
  switch (op) {
    case BinaryOp::kAnd: return "&";
    case BinaryOp::kOr: return "|";
    case BinaryOp::kXor: return "^";
    case BinaryOp::kLogicalAnd: return "&&";
    case BinaryOp::kLogicalOr: return "||";
    case BinaryOp::kAdd: return "+";
    case BinaryOp::kSub: return "-";
    case BinaryOp::kShl: return "<<";
    case BinaryOp::kShr: return ">>";
    case BinaryOp::kEq: return "==";
    case BinaryOp::kNeq: return "!=";
    case BinaryOp::kLt: return "<";
    case BinaryOp::kLe: return "<=";
    case BinaryOp::kGt: return ">";
    case BinaryOp::kGe: return ">=";
  }
  return "?";
}

ExprPtr Expr::constant(uint64_t value, int width, bool sized) {
  auto e = std::make_shared<Expr>();
  e->kind = Kind::kConst;
  e->width = width;
  e->value = value & width_mask(width);
  e->sized = sized;
  return e;
}

ExprPtr Expr::var(std::string name) {
  auto e = std::make_shared<Expr>();
  e->kind = Kind::kVar;
  e->name = std::move(name);
  return e;
}

ExprPtr Expr::select(std::string name, int hi, int lo) {
  auto e = std::make_shared<Expr>();
  e->kind = Kind::kSelect;
  e->name = std::move(name);
  e->hi = hi;
  e->lo = lo;
  return e;
}

ExprPtr Expr::unary(UnaryOp op, ExprPtr a) {
  auto e = std::make_shared<Expr>();
  e->kind = Kind::kUnary;
  e->unary_op = op;
  e->args = {std::move(a)};
  return e;
}

ExprPtr Expr::binary(BinaryOp op, ExprPtr a, ExprPtr b) {
  auto e = std::make_shared<Expr>();
  e->kind = Kind::kBinary;
  e->binary_op = op;
  e->args = {std::move(a), std::move(b)};
  return e;
}

ExprPtr Expr::mux(ExprPtr cond, ExprPtr then_e, ExprPtr else_e) {
  auto e = std::make_shared<Expr>();
  e->kind = Kind::kMux;
  e->args = {std::move(cond), std::move(then_e), std::move(else_e)};
  return e;
}

ExprPtr Expr::concat(std::vector<ExprPtr> parts) {
  auto e = std::make_shared<Expr>();
  e->kind = Kind::kConcat;
  e->args = std::move(parts);
  return e;
}

bool operator==(const Expr& a, const Expr& b) {
  if (a.kind != b.kind) return false;
  switch (a.kind) {
    case Expr::Kind::kConst:
      return a.value == b.value && a.width == b.width && a.sized == b.sized;
    case Expr::Kind::kVar:
      return a.name == b.name;
    case Expr::Kind::kSelect:
      return a.name == b.name && a.hi == b.hi && a.lo == b.lo;
    case Expr::Kind::kUnary:
      if (a.unary_op != b.unary_op) return false;
      break;
    case Expr::Kind::kBinary:
      if (a.binary_op != b.binary_op) return false;
      break;
    case Expr::Kind::kMux:
    case Expr::Kind::kConcat:
      break;
  }
  if (a.args.size() != b.args.size()) return false;
  for (size_t i = 0; i < a.args.size(); ++i) {
    if (!equal(a.args[i], b.args[i])) return false;
  }
  return true;
}

bool equal(const ExprPtr& a, const ExprPtr& b) {
  if (!a || !b) return !a && !b;
  return *a == *b;
}

int expr_width(const Expr& e, const std::function<int(const std::string&)>& net_width) {
  switch (e.kind) {
    case Expr::Kind::kConst:
      return e.width;
    case Expr::Kind::kVar:
      return net_width(e.name);
    case Expr::Kind::kSelect:
      return e.hi - e.lo + 1;
    case Expr::Kind::kUnary:
      switch (e.unary_op) {
        case UnaryOp::kNot:
        case UnaryOp::kNeg:
          return expr_width(*e.args[0], net_width);
        default:
          return 1;
      }
    case Expr::Kind::kBinary: {
      const int wa = expr_width(*e.args[0], net_width);
      const int wb = expr_width(*e.args[1], net_width);
      switch (e.binary_op) {
        case BinaryOp::kAnd:
        case BinaryOp::kOr:
        case BinaryOp::kXor:
        case BinaryOp::kAdd:
        case BinaryOp::kSub:
          return std::max(wa, wb);
        case BinaryOp::kShl:
        case BinaryOp::kShr:
          return wa;
        default:
          return 1;
      }
    }
    case Expr::Kind::kMux:
      return std::max(expr_width(*e.args[1], net_width), expr_width(*e.args[2], net_width));
    case Expr::Kind::kConcat: {
      int w = 0;
      for (const auto& a : e.args) w += expr_width(*a, net_width);
      return w;
    }
  }
  return 1;
}

void collect_reads(const Expr& e, std::set<std::string>& out) {
  if (e.kind == Expr::Kind::kVar || e.kind == Expr::Kind::kSelect) {
    out.insert(e.name);
    return;
  }
  for (const auto& a : e.args) collect_reads(*a, out);
}

std::set<std::string> reads_of(const Expr& e) {
  std::set<std::string> out;
  collect_reads(e, out);
  return out;
}

StmtPtr Stmt::assign(std::string lhs, ExprPtr rhs, bool blocking) {
  auto s = std::make_shared<Stmt>();
  s->kind = Kind::kAssign;
  s->lhs = std::move(lhs);
  s->rhs = std::move(rhs);
  s->blocking = blocking;
  return s;
}

StmtPtr Stmt::if_(ExprPtr cond, StmtPtr then_s, StmtPtr else_s) {
  auto s = std::make_shared<Stmt>();
  s->kind = Kind::kIf;
  s->cond = std::move(cond);
  s->then_s = std::move(then_s);
  s->else_s = std::move(else_s);
  return s;
}

StmtPtr Stmt::case_(ExprPtr subject, std::vector<CaseArm> arms, StmtPtr default_s) {
  auto s = std::make_shared<Stmt>();
  s->kind = Kind::kCase;
  s->cond = std::move(subject);
  s->arms = std::move(arms);
  s->default_s = std::move(default_s);
  return s;
}

StmtPtr Stmt::block(std::vector<StmtPtr> body) {
  auto s = std::make_shared<Stmt>();
  s->kind = Kind::kBlock;
  s->body = std::move(body);
  return s;
}

bool operator==(const Stmt& a, const Stmt& b) {
  if (a.kind != b.kind) return false;
  switch (a.kind) {
    case Stmt::Kind::kAssign:
      return a.lhs == b.lhs && a.blocking == b.blocking && equal(a.rhs, b.rhs);
    case Stmt::Kind::kIf:
      return equal(a.cond, b.cond) && equal(a.then_s, b.then_s) && equal(a.else_s, b.else_s);
    case Stmt::Kind::kCase:
      if (!equal(a.cond, b.cond) || !equal(a.default_s, b.default_s)) return false;
      if (a.arms.size() != b.arms.size()) return false;
      for (size_t i = 0; i < a.arms.size(); ++i) {
        const auto& x = a.arms[i];
        const auto& y = b.arms[i];
        if (x.labels.size() != y.labels.size() || !equal(x.body, y.body)) return false;
        for (size_t j = 0; j < x.labels.size(); ++j) {
          if (!equal(x.labels[j], y.labels[j])) return false;
        }
      }
      return true;
    case Stmt::Kind::kBlock:
      if (a.body.size() != b.body.size()) return false;
      for (size_t i = 0; i < a.body.size(); ++i) {
        if (!equal(a.body[i], b.body[i])) return false;
      }
      return true;
  }
  return false;
}

bool equal(const StmtPtr& a, const StmtPtr& b) {
  if (!a || !b) return !a && !b;
  return *a == *b;
}

void collect_targets(const Stmt& s, std::set<std::string>& out) {
  switch (s.kind) {
    case Stmt::Kind::kAssign:
      out.insert(s.lhs);
      break;
    case Stmt::Kind::kIf:
      if (s.then_s) collect_targets(*s.then_s, out);
      if (s.else_s) collect_targets(*s.else_s, out);
      break;
    case Stmt::Kind::kCase:
      for (const auto& arm : s.arms) collect_targets(*arm.body, out);
      if (s.default_s) collect_targets(*s.default_s, out);
      break;
    case Stmt::Kind::kBlock:
      for (const auto& b : s.body) collect_targets(*b, out);
      break;
  }
}

bool assigns(const Stmt& s, const std::string& net) {
  switch (s.kind) {
    case Stmt::Kind::kAssign:
      return s.lhs == net;
    case Stmt::Kind::kIf:
      return (s.then_s && assigns(*s.then_s, net)) || (s.else_s && assigns(*s.else_s, net));
    case Stmt::Kind::kCase:
      for (const auto& arm : s.arms) {
        if (assigns(*arm.body, net)) return true;
      }
      return s.default_s && assigns(*s.default_s, net);
    case Stmt::Kind::kBlock:
      return std::any_of(s.body.begin(), s.body.end(),
                         [&](const StmtPtr& b) { return assigns(*b, net); });
  }
  return false;
}

bool operator==(const Process& a, const Process& b) {
  return a.kind == b.kind && equal(a.body, b.body);
}

bool operator==(const Instance& a, const Instance& b) {
  if (a.name != b.name || a.module != b.module || a.bindings.size() != b.bindings.size()) {
    return false;
  }
  for (size_t i = 0; i < a.bindings.size(); ++i) {
    if (a.bindings[i].port != b.bindings[i].port || !equal(a.bindings[i].expr, b.bindings[i].expr)) {
      return false;
    }
  }
  return true;
}

const Net* ModuleDef::find_net(const std::string& n) const {
  for (const auto& net : nets) {
    if (net.name == n) return &net;
  }
  return nullptr;
}

const Instance* ModuleDef::find_instance(const std::string& n) const {
  for (const auto& inst : instances) {
    if (inst.name == n) return &inst;
  }
  return nullptr;
}

std::vector<const Net*> ModuleDef::inputs() const {
  std::vector<const Net*> out;
  for (const auto& p : port_order) {
    const Net* n = find_net(p);
    if (n && n->is_input()) out.push_back(n);
  }
  return out;
}

std::vector<const Net*> ModuleDef::outputs() const {
  std::vector<const Net*> out;
  for (const auto& p : port_order) {
    const Net* n = find_net(p);
    if (n && n->is_output()) out.push_back(n);
  }
  return out;
}

bool operator==(const ModuleDef& a, const ModuleDef& b) {
  return a.name == b.name && a.port_order == b.port_order && a.nets == b.nets &&
         a.processes == b.processes && a.instances == b.instances && a.clock == b.clock;
}

const ModuleDef* Program::find(const std::string& name) const {
  for (const auto& m : modules) {
    if (m.name == name) return &m;
  }
  return nullptr;
}

const ModuleDef& Program::top_module() const {
  const ModuleDef* m = find(top);
  if (!m) throw Error("top module '" + top + "' not found");
  return *m;
}

bool operator==(const Program& a, const Program& b) {
  return a.top == b.top && a.modules == b.modules;
}

}  // namespace ctv
