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

// Circuit IR for the MiniVerilog subset: expressions, statements,
// processes, modules and programs. Nodes are immutable once built and are
// shared through std::shared_ptr<const T>.

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace ctv {

class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Syntax or semantic error tied to a source position (1-based).
class ParseError : public Error {
 public:
  ParseError(const std::string& what, int line, int column)
      : Error(std::to_string(line) + ":" + std::to_string(column) + ": " + what),
        line_(line),
        column_(column) {}
  int line() const { return line_; }
  int column() const { return column_; }

 private:
  int line_;
  int column_;
};

constexpr int kMaxWidth = 64;

inline uint64_t width_mask(int width) {
  return width >= 64 ? ~uint64_t{0} : ((uint64_t{1} << width) - 1);
}

enum class UnaryOp { kNot, kLogicalNot, kNeg, kReduceAnd, kReduceOr, kReduceXor };

enum class BinaryOp {
  kAnd, kOr, kXor, kLogicalAnd, kLogicalOr,
  kAdd, kSub, kShl, kShr,
  kEq, kNeq, kLt, kLe, kGt, kGe,
};

const char* to_string(UnaryOp op);
const char* to_string(BinaryOp op);

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct Expr {
  enum class Kind { kConst, kVar, kSelect, kUnary, kBinary, kMux, kConcat };

  Kind kind = Kind::kConst;
  // kConst
  uint64_t value = 0;
  bool sized = true;
  // kVar / kSelect
  std::string name;
  int hi = 0;
  int lo = 0;
  // kUnary / kBinary
  UnaryOp unary_op = UnaryOp::kNot;
  BinaryOp binary_op = BinaryOp::kAnd;
  // operands: unary {a}, binary {a, b}, mux {cond, then, else}, concat {msb..lsb}
  std::vector<ExprPtr> args;
  // Literal width (kConst only). Other widths depend on declarations; see
  // expr_width().
  int width = 0;

  static ExprPtr constant(uint64_t value, int width, bool sized = true);
  static ExprPtr var(std::string name);
  static ExprPtr select(std::string name, int hi, int lo);
  static ExprPtr unary(UnaryOp op, ExprPtr a);
  static ExprPtr binary(BinaryOp op, ExprPtr a, ExprPtr b);
  static ExprPtr mux(ExprPtr cond, ExprPtr then_e, ExprPtr else_e);
  static ExprPtr concat(std::vector<ExprPtr> parts);
};

bool operator==(const Expr& a, const Expr& b);

// Self-determined width of `e`; `net_width` resolves declared names.
int expr_width(const Expr& e, const std::function<int(const std::string&)>& net_width);
bool equal(const ExprPtr& a, const ExprPtr& b);

// Every net name read by `e`, inserted into `out`.
void collect_reads(const Expr& e, std::set<std::string>& out);
std::set<std::string> reads_of(const Expr& e);

struct Stmt;
using StmtPtr = std::shared_ptr<const Stmt>;

struct CaseArm {
  std::vector<ExprPtr> labels;
  StmtPtr body;
};

struct Stmt {
  enum class Kind { kAssign, kIf, kCase, kBlock };

  Kind kind = Kind::kBlock;
  // kAssign
  std::string lhs;
  ExprPtr rhs;
  bool blocking = false;
  // kIf: cond/then_s/else_s (else may be null); kCase: cond is the subject
  ExprPtr cond;
  StmtPtr then_s;
  StmtPtr else_s;
  std::vector<CaseArm> arms;
  StmtPtr default_s;
  // kBlock
  std::vector<StmtPtr> body;

  static StmtPtr assign(std::string lhs, ExprPtr rhs, bool blocking);
  static StmtPtr if_(ExprPtr cond, StmtPtr then_s, StmtPtr else_s);
  static StmtPtr case_(ExprPtr subject, std::vector<CaseArm> arms, StmtPtr default_s);
  static StmtPtr block(std::vector<StmtPtr> body);
};

bool operator==(const Stmt& a, const Stmt& b);
bool equal(const StmtPtr& a, const StmtPtr& b);

// Left-hand sides assigned anywhere in `s`.
void collect_targets(const Stmt& s, std::set<std::string>& out);
bool assigns(const Stmt& s, const std::string& net);

enum class ProcessKind { kContinuous, kCombinational, kClocked };

struct Process {
  ProcessKind kind = ProcessKind::kContinuous;
  StmtPtr body;
  int line = 0;
};

bool operator==(const Process& a, const Process& b);

enum class PortDir { kNone, kInput, kOutput };
enum class NetKind { kWire, kReg };

struct Net {
  std::string name;
  NetKind kind = NetKind::kWire;
  PortDir dir = PortDir::kNone;
  int width = 1;

  bool is_port() const { return dir != PortDir::kNone; }
  bool is_input() const { return dir == PortDir::kInput; }
  bool is_output() const { return dir == PortDir::kOutput; }
  friend bool operator==(const Net&, const Net&) = default;
};

// A port binding. Input ports bind any expression; output ports bind a
// parent net or a constant part-select of one.
struct PortBinding {
  std::string port;
  ExprPtr expr;
};

struct Instance {
  std::string name;
  std::string module;
  std::vector<PortBinding> bindings;
  int line = 0;
};

bool operator==(const Instance& a, const Instance& b);

struct ModuleDef {
  std::string name;
  // Port names in header order.
  std::vector<std::string> port_order;
  // All declared nets (ports included) in declaration order.
  std::vector<Net> nets;
  std::vector<Process> processes;
  std::vector<Instance> instances;
  // Clock input named by posedge processes or bound to child clocks; empty
  // for purely combinational modules.
  std::string clock;

  const Net* find_net(const std::string& name) const;
  const Instance* find_instance(const std::string& name) const;
  std::vector<const Net*> inputs() const;
  std::vector<const Net*> outputs() const;
};

bool operator==(const ModuleDef& a, const ModuleDef& b);

struct Program {
  std::vector<ModuleDef> modules;
  std::string top;

  const ModuleDef* find(const std::string& name) const;
  const ModuleDef& top_module() const;
};

bool operator==(const Program& a, const Program& b);

struct AssumptionSet {
  std::set<std::string> flush;
  std::set<std::string> publics;

  friend bool operator==(const AssumptionSet&, const AssumptionSet&) = default;
};

struct Annotations {
  std::set<std::string> sources;
  std::set<std::string> sinks;
  AssumptionSet assumptions;
  std::set<std::string> excluded;

  friend bool operator==(const Annotations&, const Annotations&) = default;
};

}  // namespace ctv
