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

#include <string>
#include <string_view>

#include "ctv/ir.hpp"

namespace ctv {

/// Parses MiniVerilog source text into a validated Program.
///
/// The accepted subset: one implicit positive-edge clock, `assign`,
/// `always @(*)`, `always @(posedge clk)`, `if`/`case`/`begin..end`,
/// named or positional instance port lists, sized and decimal literals.
/// Throws ParseError (with line/column) on syntax errors, duplicate
/// declarations, unresolved identifiers and single-driver violations.
///
/// `top` selects the top module; when empty the last module that no other
/// module instantiates is used.
Program parse_program(std::string_view text, const std::string& top = "");

// Canonical source text. parse_program(print_program(p)) == p.
std::string print_program(const Program& p);
std::string print_module(const ModuleDef& m);
std::string print_expr(const Expr& e);
std::string print_stmt(const Stmt& s, int indent = 0);

// Identifier as it must appear in source (escaped when it contains '.').
std::string source_identifier(const std::string& name);

}  // namespace ctv
