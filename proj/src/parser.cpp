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

#include "ctv/parser.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <optional>
#include <sstream>

#include "ctv/model.hpp"

namespace ctv {
namespace {

enum class Tok { kIdent, kNumber, kSymbol, kEnd };

struct Token {
  Tok kind = Tok::kEnd;
  std::string text;
  // kNumber
  uint64_t value = 0;
  int width = 32;
  bool sized = false;
  int line = 1;
  int column = 1;
};

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    for (;;) {
      skip_space();
      Token t;
      t.line = line_;
      t.column = col_;
      if (pos_ >= src_.size()) {
        t.kind = Tok::kEnd;
        out.push_back(t);
        return out;
      }
      const char c = src_[pos_];
      if (std::isalpha(static_cast<unsigned char>(c)) || c == '_' || c == '$') {
        t.kind = Tok::kIdent;
        while (pos_ < src_.size() && is_ident_char(src_[pos_])) t.text += advance();
      } else if (c == '\\') {
        advance();
        t.kind = Tok::kIdent;
        while (pos_ < src_.size() && !std::isspace(static_cast<unsigned char>(src_[pos_]))) {
          t.text += advance();
        }
        if (t.text.empty()) throw ParseError("empty escaped identifier", t.line, t.column);
      } else if (std::isdigit(static_cast<unsigned char>(c)) || c == '\'') {
        lex_number(t);
      } else {
        t.kind = Tok::kSymbol;
        static const char* kTwo[] = {"<=", ">=", "==", "!=", "&&", "||", "<<", ">>"};
        for (const char* two : kTwo) {
          if (src_.substr(pos_, 2) == two) {
            t.text = two;
            advance();
            advance();
            break;
          }
        }
        if (t.text.empty()) {
          static const std::string kOne = "()[]{};,:.@#=<>+-~!&|^?*";
          if (kOne.find(c) == std::string::npos) {
            throw ParseError(std::string("unexpected character '") + c + "'", line_, col_);
          }
          t.text = std::string(1, advance());
        }
      }
      out.push_back(t);
    }
  }

 private:
  static bool is_ident_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '$';
  }

  char advance() {
    const char c = src_[pos_++];
    if (c == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    return c;
  }

  void skip_space() {
    for (;;) {
      while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) advance();
      if (src_.substr(pos_, 2) == "//") {
        while (pos_ < src_.size() && src_[pos_] != '\n') advance();
      } else if (src_.substr(pos_, 2) == "/*") {
        const int l = line_, c = col_;
        advance();
        advance();
        while (pos_ < src_.size() && src_.substr(pos_, 2) != "*/") advance();
        if (pos_ >= src_.size()) throw ParseError("unterminated comment", l, c);
        advance();
        advance();
      } else {
        return;
      }
    }
  }

  std::string digits(bool allow_hex) {
    std::string s;
    while (pos_ < src_.size()) {
      const char c = src_[pos_];
      if (c == '_') {
        advance();
        continue;
      }
      if (allow_hex ? std::isxdigit(static_cast<unsigned char>(c)) : std::isdigit(static_cast<unsigned char>(c))) {
        s += advance();
      } else {
        break;
      }
    }
    return s;
  }

  void lex_number(Token& t) {
    t.kind = Tok::kNumber;
    std::string size_digits;
    if (src_[pos_] != '\'') size_digits = digits(false);
    if (pos_ < src_.size() && src_[pos_] == '\'') {
      advance();
      if (pos_ >= src_.size()) throw ParseError("truncated literal", t.line, t.column);
      const char base = static_cast<char>(std::tolower(static_cast<unsigned char>(advance())));
      int radix = 0;
      switch (base) {
        case 'h': radix = 16; break;
        case 'd': radix = 10; break;
        case 'b': radix = 2; break;
        case 'o': radix = 8; break;
        default: throw ParseError(std::string("bad literal base '") + base + "'", t.line, t.column);
      }
      const std::string body = digits(true);
      if (body.empty()) throw ParseError("literal without digits", t.line, t.column);
      uint64_t v = 0;
      for (char d : body) {
        const int dv = std::isdigit(static_cast<unsigned char>(d)) ? d - '0' : std::tolower(d) - 'a' + 10;
        if (dv >= radix) throw ParseError("digit out of range for base", t.line, t.column);
        v = v * static_cast<uint64_t>(radix) + static_cast<uint64_t>(dv);
      }
      if (!size_digits.empty()) {
        t.width = std::stoi(size_digits);
        t.sized = true;
        if (t.width < 1 || t.width > kMaxWidth) {
          throw ParseError("literal width out of range 1.." + std::to_string(kMaxWidth), t.line, t.column);
        }
      }
      t.value = v & width_mask(t.width);
      t.text = size_digits + "'" + base + body;
    } else {
      t.value = std::stoull(size_digits);
      t.width = 32;
      t.sized = false;
      t.text = size_digits;
    }
  }

  std::string_view src_;
  size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
};

bool is_keyword(const std::string& s) {
  static const std::set<std::string> kKeywords = {
      "module", "endmodule", "input", "output", "wire", "reg", "assign", "always", "posedge",
      "if", "else", "case", "endcase", "default", "begin", "end"};
  return kKeywords.count(s) > 0;
}

struct NetDecl {
  int line = 0;
  int column = 0;
};

// Per-module bookkeeping used only during parsing and validation.
struct ModuleSource {
  ModuleDef def;
  int line = 0;
  std::map<std::string, NetDecl> decl_pos;
  std::vector<std::pair<std::string, int>> posedge_clocks;  // name, line
  std::vector<std::vector<std::string>> positional;          // per instance, when positional
};

class Parser {
 public:
  explicit Parser(std::vector<Token> toks) : toks_(std::move(toks)) {}

  std::vector<ModuleSource> run() {
    std::vector<ModuleSource> mods;
    while (peek().kind != Tok::kEnd) mods.push_back(parse_module());
    return mods;
  }

 private:
  const Token& peek(size_t k = 0) const { return toks_[std::min(pos_ + k, toks_.size() - 1)]; }
  bool at(const std::string& s) const {
    const Token& t = peek();
    return (t.kind == Tok::kSymbol || t.kind == Tok::kIdent) && t.text == s;
  }
  Token take() { return toks_[std::min(pos_++, toks_.size() - 1)]; }
  [[noreturn]] void fail(const std::string& msg, const Token& t) const {
    throw ParseError(msg, t.line, t.column);
  }
  [[noreturn]] void fail(const std::string& msg) const { fail(msg, peek()); }
  Token expect(const std::string& s) {
    if (!at(s)) fail("expected '" + s + "' but found '" + describe(peek()) + "'");
    return take();
  }
  bool accept(const std::string& s) {
    if (at(s)) {
      take();
      return true;
    }
    return false;
  }
  static std::string describe(const Token& t) {
    return t.kind == Tok::kEnd ? "end of input" : t.text;
  }
  std::string ident() {
    const Token& t = peek();
    if (t.kind != Tok::kIdent || is_keyword(t.text)) fail("expected identifier but found '" + describe(t) + "'");
    return take().text;
  }
  int small_int() {
    const Token& t = peek();
    if (t.kind != Tok::kNumber) fail("expected integer");
    return static_cast<int>(take().value);
  }

  // Optional `[hi:lo]` declaration range; returns the width.
  int opt_range() {
    if (!accept("[")) return 1;
    const Token start = peek();
    const int hi = small_int();
    expect(":");
    const int lo = small_int();
    expect("]");
    if (lo != 0) fail("declaration ranges must be [N:0]", start);
    if (hi < 0 || hi + 1 > kMaxWidth) fail("net width out of range 1.." + std::to_string(kMaxWidth), start);
    return hi + 1;
  }

  void declare(ModuleSource& m, const Token& at_tok, const std::string& name, NetKind kind, PortDir dir,
               int width, bool explicit_kind) {
    for (auto& n : m.def.nets) {
      if (n.name != name) continue;
      // `output x; reg x;` style redeclaration of a port's kind.
      if (n.is_port() && dir == PortDir::kNone && n.kind == NetKind::kWire && kind == NetKind::kReg &&
          explicit_kind && n.width == width) {
        n.kind = NetKind::kReg;
        return;
      }
      fail("duplicate declaration of '" + name + "'", at_tok);
    }
    Net n;
    n.name = name;
    n.kind = kind;
    n.dir = dir;
    n.width = width;
    m.def.nets.push_back(n);
    m.decl_pos[name] = {at_tok.line, at_tok.column};
  }

  // input/output/wire/reg declaration after its keyword was peeked.
  void parse_decl(ModuleSource& m, bool in_header) {
    const Token kw = take();
    PortDir dir = PortDir::kNone;
    NetKind kind = NetKind::kWire;
    bool explicit_kind = false;
    if (kw.text == "input") {
      dir = PortDir::kInput;
    } else if (kw.text == "output") {
      dir = PortDir::kOutput;
    } else if (kw.text == "reg") {
      kind = NetKind::kReg;
      explicit_kind = true;
    } else {
      explicit_kind = true;
    }
    if (dir != PortDir::kNone) {
      if (accept("reg")) {
        kind = NetKind::kReg;
        explicit_kind = true;
      } else if (accept("wire")) {
        explicit_kind = true;
      }
    }
    if (dir == PortDir::kInput && kind == NetKind::kReg) fail("input ports cannot be reg", kw);
    const int width = opt_range();
    for (;;) {
      const Token name_tok = peek();
      const std::string name = ident();
      declare(m, name_tok, name, kind, dir, width, explicit_kind);
      if (in_header) {
        m.def.port_order.push_back(name);
        // In an ANSI header a comma may be followed by another direction.
        if (!at(",")) return;
        if (peek(1).kind == Tok::kIdent && (peek(1).text == "input" || peek(1).text == "output")) return;
        take();
        continue;
      }
      if (!accept(",")) break;
    }
    expect(";");
  }

  ModuleSource parse_module() {
    ModuleSource m;
    const Token kw = expect("module");
    m.line = kw.line;
    m.def.name = ident();
    if (accept("(")) {
      if (!at(")")) {
        if (at("input") || at("output")) {
          for (;;) {
            if (!(at("input") || at("output"))) fail("expected port direction");
            parse_decl(m, true);
            if (!accept(",")) break;
          }
        } else {
          for (;;) {
            m.def.port_order.push_back(ident());
            if (!accept(",")) break;
          }
        }
      }
      expect(")");
    }
    expect(";");
    while (!at("endmodule")) {
      if (peek().kind == Tok::kEnd) fail("missing 'endmodule'");
      parse_item(m);
    }
    take();
    return m;
  }

  void parse_item(ModuleSource& m) {
    const Token& t = peek();
    if (t.kind == Tok::kIdent && (t.text == "input" || t.text == "output" || t.text == "wire" || t.text == "reg")) {
      parse_decl(m, false);
      return;
    }
    if (at("assign")) {
      const Token kw = take();
      const std::string lhs = ident();
      expect("=");
      ExprPtr rhs = parse_expr();
      expect(";");
      Process p;
      p.kind = ProcessKind::kContinuous;
      p.body = Stmt::assign(lhs, rhs, true);
      p.line = kw.line;
      m.def.processes.push_back(p);
      return;
    }
    if (at("always")) {
      const Token kw = take();
      expect("@");
      Process p;
      p.line = kw.line;
      if (accept("*")) {
        p.kind = ProcessKind::kCombinational;
      } else {
        expect("(");
        if (accept("*")) {
          p.kind = ProcessKind::kCombinational;
        } else if (accept("posedge")) {
          p.kind = ProcessKind::kClocked;
          m.posedge_clocks.emplace_back(ident(), kw.line);
        } else {
          fail("expected '*' or 'posedge' in sensitivity list");
        }
        expect(")");
      }
      p.body = parse_stmt();
      m.def.processes.push_back(p);
      return;
    }
    if (t.kind == Tok::kIdent && !is_keyword(t.text)) {
      parse_instances(m);
      return;
    }
    fail("unexpected '" + describe(t) + "' in module body");
  }

  void parse_instances(ModuleSource& m) {
    const Token mod_tok = take();
    for (;;) {
      Instance inst;
      inst.module = mod_tok.text;
      inst.line = peek().line;
      inst.name = ident();
      expect("(");
      std::vector<std::string> positional;
      if (!at(")")) {
        if (at(".")) {
          for (;;) {
            expect(".");
            PortBinding b;
            b.port = ident();
            expect("(");
            b.expr = parse_expr();
            expect(")");
            inst.bindings.push_back(b);
            if (!accept(",")) break;
          }
        } else {
          for (;;) {
            PortBinding b;
            b.expr = parse_expr();
            inst.bindings.push_back(b);
            if (!accept(",")) break;
          }
          positional.assign(inst.bindings.size(), "");
        }
      }
      expect(")");
      m.def.instances.push_back(inst);
      m.positional.push_back(positional);
      if (!accept(",")) break;
    }
    expect(";");
  }

  StmtPtr parse_stmt() {
    if (accept(";")) return Stmt::block({});
    if (accept("begin")) {
      if (accept(":")) ident();
      std::vector<StmtPtr> body;
      while (!at("end")) {
        if (peek().kind == Tok::kEnd) fail("missing 'end'");
        body.push_back(parse_stmt());
      }
      take();
      return Stmt::block(std::move(body));
    }
    if (accept("if")) {
      expect("(");
      ExprPtr c = parse_expr();
      expect(")");
      StmtPtr then_s = parse_stmt();
      StmtPtr else_s;
      if (accept("else")) else_s = parse_stmt();
      return Stmt::if_(c, then_s, else_s);
    }
    if (accept("case")) {
      expect("(");
      ExprPtr subject = parse_expr();
      expect(")");
      std::vector<CaseArm> arms;
      StmtPtr def;
      while (!at("endcase")) {
        if (peek().kind == Tok::kEnd) fail("missing 'endcase'");
        if (at("default")) {
          const Token d = take();
          if (def) fail("duplicate default arm", d);
          accept(":");
          def = parse_stmt();
          continue;
        }
        CaseArm arm;
        for (;;) {
          const Token lt = peek();
          ExprPtr label = parse_expr();
          if (label->kind != Expr::Kind::kConst) fail("case labels must be constants", lt);
          arm.labels.push_back(label);
          if (!accept(",")) break;
        }
        expect(":");
        arm.body = parse_stmt();
        arms.push_back(arm);
      }
      take();
      return Stmt::case_(subject, std::move(arms), def);
    }
    const std::string lhs = ident();
    bool blocking = true;
    if (accept("<=")) {
      blocking = false;
    } else {
      expect("=");
    }
    ExprPtr rhs = parse_expr();
    expect(";");
    return Stmt::assign(lhs, rhs, blocking);
  }

  // Precedence climbing, lowest first.
  ExprPtr parse_expr() {
    ExprPtr c = parse_binary(0);
    if (accept("?")) {
      ExprPtr a = parse_expr();
      expect(":");
      ExprPtr b = parse_expr();
      return Expr::mux(c, a, b);
    }
    return c;
  }

  static int precedence(const std::string& op) {
    static const std::map<std::string, int> kPrec = {
        {"||", 1}, {"&&", 2}, {"|", 3}, {"^", 4}, {"&", 5}, {"==", 6}, {"!=", 6},
        {"<", 7},  {"<=", 7}, {">", 7}, {">=", 7}, {"<<", 8}, {">>", 8}, {"+", 9}, {"-", 9}};
    auto it = kPrec.find(op);
    return it == kPrec.end() ? -1 : it->second;
  }

  static BinaryOp binary_op(const std::string& op) {
    static const std::map<std::string, BinaryOp> kOps = {
        {"||", BinaryOp::kLogicalOr}, {"&&", BinaryOp::kLogicalAnd}, {"|", BinaryOp::kOr},
        {"^", BinaryOp::kXor},        {"&", BinaryOp::kAnd},         {"==", BinaryOp::kEq},
        {"!=", BinaryOp::kNeq},       {"<", BinaryOp::kLt},          {"<=", BinaryOp::kLe},
        {">", BinaryOp::kGt},         {">=", BinaryOp::kGe},         {"<<", BinaryOp::kShl},
        {">>", BinaryOp::kShr},       {"+", BinaryOp::kAdd},         {"-", BinaryOp::kSub}};
    return kOps.at(op);
  }

  ExprPtr parse_binary(int min_prec) {
    ExprPtr lhs = parse_unary();
    for (;;) {
      const Token& t = peek();
      if (t.kind != Tok::kSymbol) return lhs;
      const int p = precedence(t.text);
      if (p < 0 || p <= min_prec - 1 || p < min_prec) return lhs;
      const std::string op = take().text;
      ExprPtr rhs = parse_binary(p + 1);
      lhs = Expr::binary(binary_op(op), lhs, rhs);
    }
  }

  ExprPtr parse_unary() {
    if (accept("~")) return Expr::unary(UnaryOp::kNot, parse_unary());
    if (accept("!")) return Expr::unary(UnaryOp::kLogicalNot, parse_unary());
    if (accept("-")) return Expr::unary(UnaryOp::kNeg, parse_unary());
    if (accept("&")) return Expr::unary(UnaryOp::kReduceAnd, parse_unary());
    if (accept("|")) return Expr::unary(UnaryOp::kReduceOr, parse_unary());
    if (accept("^")) return Expr::unary(UnaryOp::kReduceXor, parse_unary());
    return parse_primary();
  }

  ExprPtr parse_primary() {
    const Token t = peek();
    if (t.kind == Tok::kNumber) {
      take();
      return Expr::constant(t.value, t.width, t.sized);
    }
    if (accept("(")) {
      ExprPtr e = parse_expr();
      expect(")");
      return e;
    }
    if (accept("{")) {
      std::vector<ExprPtr> parts;
      for (;;) {
        parts.push_back(parse_expr());
        if (!accept(",")) break;
      }
      expect("}");
      return Expr::concat(std::move(parts));
    }
    if (t.kind == Tok::kIdent && !is_keyword(t.text)) {
      const std::string name = take().text;
      if (accept("[")) {
        const int hi = small_int();
        int lo = hi;
        if (accept(":")) lo = small_int();
        expect("]");
        if (lo > hi) fail("part-select must be [hi:lo] with hi >= lo", t);
        return Expr::select(name, hi, lo);
      }
      return Expr::var(name);
    }
    fail("expected expression but found '" + describe(t) + "'");
  }

  std::vector<Token> toks_;
  size_t pos_ = 0;
};

// ---------------------------------------------------------------------------
// Semantic validation

[[noreturn]] void semantic_error(const std::string& msg, int line) { throw ParseError(msg, line, 1); }

void check_reads(const ModuleSource& m, const Expr& e, int line) {
  std::set<std::string> rs;
  collect_reads(e, rs);
  for (const auto& r : rs) {
    const Net* n = m.def.find_net(r);
    if (!n) semantic_error("unresolved identifier '" + r + "' in module '" + m.def.name + "'", line);
  }
  // Selects must stay inside the declared range.
  if (e.kind == Expr::Kind::kSelect) {
    const Net* n = m.def.find_net(e.name);
    if (e.hi >= n->width) semantic_error("select " + e.name + "[" + std::to_string(e.hi) + "] out of range", line);
  }
  for (const auto& a : e.args) check_reads(m, *a, line);
}

void check_stmt(const ModuleSource& m, const Stmt& s, ProcessKind kind, int line) {
  switch (s.kind) {
    case Stmt::Kind::kAssign: {
      const Net* n = m.def.find_net(s.lhs);
      if (!n) semantic_error("unresolved identifier '" + s.lhs + "' in module '" + m.def.name + "'", line);
      if (n->is_input()) semantic_error("cannot assign input port '" + s.lhs + "'", line);
      if (kind == ProcessKind::kClocked && n->kind != NetKind::kReg) {
        semantic_error("clocked assignment to non-reg '" + s.lhs + "'", line);
      }
      if (kind != ProcessKind::kClocked && n->kind != NetKind::kWire) {
        semantic_error("combinational assignment to reg '" + s.lhs + "'", line);
      }
      check_reads(m, *s.rhs, line);
      break;
    }
    case Stmt::Kind::kIf:
      check_reads(m, *s.cond, line);
      check_stmt(m, *s.then_s, kind, line);
      if (s.else_s) check_stmt(m, *s.else_s, kind, line);
      break;
    case Stmt::Kind::kCase:
      check_reads(m, *s.cond, line);
      for (const auto& arm : s.arms) check_stmt(m, *arm.body, kind, line);
      if (s.default_s) check_stmt(m, *s.default_s, kind, line);
      break;
    case Stmt::Kind::kBlock:
      for (const auto& b : s.body) check_stmt(m, *b, kind, line);
      break;
  }
}

void resolve_positional(std::vector<ModuleSource>& mods, const std::map<std::string, size_t>& index) {
  for (auto& m : mods) {
    for (size_t i = 0; i < m.def.instances.size(); ++i) {
      auto& inst = m.def.instances[i];
      auto it = index.find(inst.module);
      if (it == index.end()) {
        semantic_error("unknown module '" + inst.module + "' instantiated as '" + inst.name + "'", inst.line);
      }
      const ModuleDef& child = mods[it->second].def;
      if (!m.positional[i].empty()) {
        if (inst.bindings.size() > child.port_order.size()) {
          semantic_error("too many positional ports for instance '" + inst.name + "'", inst.line);
        }
        for (size_t k = 0; k < inst.bindings.size(); ++k) inst.bindings[k].port = child.port_order[k];
      }
      std::set<std::string> seen;
      for (const auto& b : inst.bindings) {
        const Net* port = child.find_net(b.port);
        if (!port || !port->is_port()) {
          semantic_error("module '" + child.name + "' has no port '" + b.port + "'", inst.line);
        }
        if (!seen.insert(b.port).second) semantic_error("port '" + b.port + "' bound twice", inst.line);
        check_reads(m, *b.expr, inst.line);
        if (port->is_output() && b.expr->kind != Expr::Kind::kVar && b.expr->kind != Expr::Kind::kSelect) {
          semantic_error("output port '" + b.port + "' must bind a net or a part-select", inst.line);
        }
      }
    }
  }
}

// Clock of each module: posedge nets plus nets bound to child clock ports.
void resolve_clocks(std::vector<ModuleSource>& mods, const std::map<std::string, size_t>& index) {
  std::vector<int> state(mods.size(), 0);
  std::function<void(size_t)> visit = [&](size_t i) {
    if (state[i] == 2) return;
    if (state[i] == 1) return;  // cycles are reported by elaborate()
    state[i] = 1;
    ModuleSource& m = mods[i];
    std::string clock;
    auto set_clock = [&](const std::string& c, int line) {
      const Net* n = m.def.find_net(c);
      if (!n) semantic_error("unresolved clock '" + c + "'", line);
      if (!n->is_input() || n->width != 1) semantic_error("clock '" + c + "' must be a 1-bit input port", line);
      if (!clock.empty() && clock != c) {
        semantic_error("module '" + m.def.name + "' uses more than one clock", line);
      }
      clock = c;
    };
    for (const auto& [c, line] : m.posedge_clocks) set_clock(c, line);
    for (const auto& inst : m.def.instances) {
      const size_t ci = index.at(inst.module);
      visit(ci);
      const std::string& child_clock = mods[ci].def.clock;
      if (child_clock.empty()) continue;
      for (const auto& b : inst.bindings) {
        if (b.port != child_clock) continue;
        if (b.expr->kind != Expr::Kind::kVar) {
          semantic_error("clock port of '" + inst.name + "' must bind the clock net", inst.line);
        }
        set_clock(b.expr->name, inst.line);
      }
    }
    m.def.clock = clock;
    state[i] = 2;
  };
  for (size_t i = 0; i < mods.size(); ++i) visit(i);
}

void validate_module(const ModuleSource& m, const std::map<std::string, size_t>& index,
                     const std::vector<ModuleSource>& mods) {
  const ModuleDef& d = m.def;
  std::set<std::string> ports;
  for (const auto& p : d.port_order) {
    const Net* n = d.find_net(p);
    if (!n || !n->is_port()) semantic_error("port '" + p + "' of module '" + d.name + "' has no direction", m.line);
    if (!ports.insert(p).second) semantic_error("port '" + p + "' listed twice", m.line);
  }
  for (const auto& n : d.nets) {
    if (n.is_port() && !ports.count(n.name)) {
      semantic_error("'" + n.name + "' declared as port but missing from the port list", m.decl_pos.at(n.name).line);
    }
  }
  std::map<std::string, int> drivers;
  for (const auto& p : d.processes) {
    check_stmt(m, *p.body, p.kind, p.line);
    std::set<std::string> targets;
    collect_targets(*p.body, targets);
    for (const auto& t : targets) ++drivers[t];
  }
  // Slice-driven nets: instance outputs bound to part-selects.
  std::map<std::string, std::vector<std::pair<int, int>>> slices;
  for (const auto& inst : d.instances) {
    const ModuleDef& child = mods[index.at(inst.module)].def;
    for (const auto& b : inst.bindings) {
      if (!child.find_net(b.port)->is_output()) continue;
      const Net* target = d.find_net(b.expr->name);
      if (target->is_input()) semantic_error("instance output bound to input '" + target->name + "'", inst.line);
      if (target->kind == NetKind::kReg) {
        semantic_error("instance output bound to reg '" + target->name + "'", inst.line);
      }
      if (b.expr->kind == Expr::Kind::kSelect) {
        slices[target->name].emplace_back(b.expr->hi, b.expr->lo);
      } else {
        ++drivers[target->name];
      }
    }
  }
  for (auto& [name, ranges] : slices) {
    std::sort(ranges.begin(), ranges.end(), [](auto a, auto b) { return a.second < b.second; });
    int next = 0;
    for (const auto& [hi, lo] : ranges) {
      if (lo != next) semantic_error("slices of '" + name + "' overlap or leave gaps", m.line);
      next = hi + 1;
    }
    if (next != d.find_net(name)->width) semantic_error("slices of '" + name + "' do not cover the net", m.line);
    ++drivers[name];
  }
  for (const auto& n : d.nets) {
    if (n.is_input()) continue;
    const int count = drivers.count(n.name) ? drivers.at(n.name) : 0;
    const int line = m.decl_pos.count(n.name) ? m.decl_pos.at(n.name).line : m.line;
    if (count == 0) semantic_error("net '" + n.name + "' has no driver", line);
    if (count > 1) semantic_error("net '" + n.name + "' has " + std::to_string(count) + " drivers", line);
  }
  if (!d.clock.empty()) {
    std::set<std::string> data_reads;
    for (const auto& p : d.processes) {
      std::function<void(const Stmt&)> walk = [&](const Stmt& s) {
        if (s.rhs) collect_reads(*s.rhs, data_reads);
        if (s.cond) collect_reads(*s.cond, data_reads);
        if (s.then_s) walk(*s.then_s);
        if (s.else_s) walk(*s.else_s);
        for (const auto& a : s.arms) walk(*a.body);
        if (s.default_s) walk(*s.default_s);
        for (const auto& b : s.body) walk(*b);
      };
      walk(*p.body);
    }
    if (data_reads.count(d.clock)) semantic_error("clock '" + d.clock + "' used as data", m.line);
  }
}

}  // namespace

Program parse_program(std::string_view text, const std::string& top) {
  Lexer lexer(text);
  Parser parser(lexer.run());
  std::vector<ModuleSource> mods = parser.run();

  std::map<std::string, size_t> index;
  for (size_t i = 0; i < mods.size(); ++i) {
    if (!index.emplace(mods[i].def.name, i).second) {
      semantic_error("duplicate module '" + mods[i].def.name + "'", mods[i].line);
    }
  }
  resolve_positional(mods, index);
  resolve_clocks(mods, index);
  for (const auto& m : mods) validate_module(m, index, mods);

  Program p;
  for (auto& m : mods) p.modules.push_back(std::move(m.def));
  if (p.modules.empty()) throw Error("no modules in input");
  if (!top.empty()) {
    if (!p.find(top)) throw Error("top module '" + top + "' not found");
    p.top = top;
  } else {
    std::set<std::string> instantiated;
    for (const auto& m : p.modules) {
      for (const auto& i : m.instances) instantiated.insert(i.module);
    }
    for (const auto& m : p.modules) {
      if (!instantiated.count(m.name)) p.top = m.name;
    }
    if (p.top.empty()) throw Error("every module is instantiated; instantiation graph is cyclic");
  }
  // Driver analysis rejects undriven nets and combinational cycles up front.
  for (const auto& m : p.modules) build_model(p, m);
  return p;
}

// ---------------------------------------------------------------------------
// Printing

std::string source_identifier(const std::string& name) {
  const bool plain = !name.empty() && (std::isalpha(static_cast<unsigned char>(name[0])) || name[0] == '_') &&
                     std::all_of(name.begin(), name.end(), [](char c) {
                       return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '$';
                     }) &&
                     !is_keyword(name);
  return plain ? name : "\\" + name + " ";
}

namespace {

std::string hex(uint64_t v) {
  std::ostringstream os;
  os << std::hex << v;
  return os.str();
}

std::string atom(const Expr& e) {
  const std::string s = print_expr(e);
  switch (e.kind) {
    case Expr::Kind::kConst:
    case Expr::Kind::kVar:
    case Expr::Kind::kSelect:
    case Expr::Kind::kConcat:
      return s;
    default:
      return "(" + s + ")";
  }
}

std::string range(int width) { return width == 1 ? "" : "[" + std::to_string(width - 1) + ":0] "; }

}  // namespace

std::string print_expr(const Expr& e) {
  switch (e.kind) {
    case Expr::Kind::kConst:
      if (!e.sized) return std::to_string(e.value);
      return std::to_string(e.width) + "'h" + hex(e.value);
    case Expr::Kind::kVar:
      return source_identifier(e.name);
    case Expr::Kind::kSelect:
      if (e.hi == e.lo) return source_identifier(e.name) + "[" + std::to_string(e.hi) + "]";
      return source_identifier(e.name) + "[" + std::to_string(e.hi) + ":" + std::to_string(e.lo) + "]";
    case Expr::Kind::kUnary:
      return std::string(to_string(e.unary_op)) + atom(*e.args[0]);
    case Expr::Kind::kBinary:
      return atom(*e.args[0]) + " " + to_string(e.binary_op) + " " + atom(*e.args[1]);
    case Expr::Kind::kMux:
      return atom(*e.args[0]) + " ? " + atom(*e.args[1]) + " : " + atom(*e.args[2]);
    case Expr::Kind::kConcat: {
      std::string s = "{";
      for (size_t i = 0; i < e.args.size(); ++i) {
        if (i) s += ", ";
        s += print_expr(*e.args[i]);
      }
      return s + "}";
    }
  }
  return "";
}

std::string print_stmt(const Stmt& s, int indent) {
  const std::string pad(static_cast<size_t>(indent), ' ');
  switch (s.kind) {
    case Stmt::Kind::kAssign:
      return pad + source_identifier(s.lhs) + (s.blocking ? " = " : " <= ") + print_expr(*s.rhs) + ";\n";
    case Stmt::Kind::kIf: {
      std::string out = pad + "if (" + print_expr(*s.cond) + ")\n" + print_stmt(*s.then_s, indent + 2);
      if (s.else_s) out += pad + "else\n" + print_stmt(*s.else_s, indent + 2);
      return out;
    }
    case Stmt::Kind::kCase: {
      std::string out = pad + "case (" + print_expr(*s.cond) + ")\n";
      for (const auto& arm : s.arms) {
        out += pad + "  ";
        for (size_t i = 0; i < arm.labels.size(); ++i) {
          if (i) out += ", ";
          out += print_expr(*arm.labels[i]);
        }
        out += ":\n" + print_stmt(*arm.body, indent + 4);
      }
      if (s.default_s) out += pad + "  default:\n" + print_stmt(*s.default_s, indent + 4);
      return out + pad + "endcase\n";
    }
    case Stmt::Kind::kBlock: {
      std::string out = pad + "begin\n";
      for (const auto& b : s.body) out += print_stmt(*b, indent + 2);
      return out + pad + "end\n";
    }
  }
  return "";
}

std::string print_module(const ModuleDef& m) {
  std::string out = "module " + source_identifier(m.name) + "(";
  for (size_t i = 0; i < m.port_order.size(); ++i) {
    if (i) out += ", ";
    out += source_identifier(m.port_order[i]);
  }
  out += ");\n";
  for (const auto& n : m.nets) {
    out += "  ";
    if (n.is_input()) {
      out += "input ";
    } else if (n.is_output()) {
      out += n.kind == NetKind::kReg ? "output reg " : "output ";
    } else {
      out += n.kind == NetKind::kReg ? "reg " : "wire ";
    }
    out += range(n.width) + source_identifier(n.name) + ";\n";
  }
  for (const auto& p : m.processes) {
    switch (p.kind) {
      case ProcessKind::kContinuous:
        out += "  assign " + source_identifier(p.body->lhs) + " = " + print_expr(*p.body->rhs) + ";\n";
        break;
      case ProcessKind::kCombinational:
        out += "  always @(*)\n" + print_stmt(*p.body, 4);
        break;
      case ProcessKind::kClocked:
        out += "  always @(posedge " + source_identifier(m.clock) + ")\n" + print_stmt(*p.body, 4);
        break;
    }
  }
  for (const auto& inst : m.instances) {
    out += "  " + source_identifier(inst.module) + " " + source_identifier(inst.name) + "(";
    for (size_t i = 0; i < inst.bindings.size(); ++i) {
      if (i) out += ", ";
      out += "." + source_identifier(inst.bindings[i].port) + "(" + print_expr(*inst.bindings[i].expr) + ")";
    }
    out += ");\n";
  }
  return out + "endmodule\n";
}

std::string print_program(const Program& p) {
  std::string out;
  for (size_t i = 0; i < p.modules.size(); ++i) {
    if (i) out += "\n";
    out += print_module(p.modules[i]);
  }
  return out;
}

}  // namespace ctv
