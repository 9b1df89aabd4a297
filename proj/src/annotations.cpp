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

#include "ctv/annotations.hpp"

#include <cctype>
#include <sstream>

namespace ctv {
namespace {

std::string trim(std::string_view s) {
  size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

std::set<std::string>* field(Annotations& a, const std::string& key) {
  if (key == "sources") return &a.sources;
  if (key == "sinks") return &a.sinks;
  if (key == "flush") return &a.assumptions.flush;
  if (key == "public") return &a.assumptions.publics;
  if (key == "excluded") return &a.excluded;
  return nullptr;
}

void add_names(std::set<std::string>& out, const std::string& list) {
  std::string cur;
  for (char c : list) {
    if (c == ',' || std::isspace(static_cast<unsigned char>(c))) {
      if (!cur.empty()) out.insert(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (!cur.empty()) out.insert(cur);
}

std::string join(const std::set<std::string>& names) {
  std::string out;
  for (const auto& n : names) {
    if (!out.empty()) out += ", ";
    out += n;
  }
  return out;
}

}  // namespace

Annotations parse_annotations(std::string_view text) {
  Annotations a;
  std::set<std::string>* current = nullptr;
  std::set<std::string> seen;
  std::istringstream in{std::string(text)};
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const size_t hash = raw.find('#');
    if (hash != std::string::npos) raw.resize(hash);
    if (trim(raw).empty()) continue;
    const bool continuation = std::isspace(static_cast<unsigned char>(raw[0]));
    const size_t colon = raw.find(':');
    if (continuation && colon == std::string::npos) {
      if (!current) throw ParseError("continuation line without a key", line_no, 1);
      add_names(*current, raw);
      continue;
    }
    if (colon == std::string::npos) throw ParseError("expected 'key: names'", line_no, 1);
    const std::string key = trim(std::string_view(raw).substr(0, colon));
    current = field(a, key);
    if (!current) throw ParseError("unknown annotation key '" + key + "'", line_no, 1);
    if (!seen.insert(key).second) throw ParseError("duplicate annotation key '" + key + "'", line_no, 1);
    add_names(*current, raw.substr(colon + 1));
  }
  return a;
}

std::string print_annotations(const Annotations& a) {
  std::string out;
  out += "sources: " + join(a.sources) + "\n";
  out += "sinks: " + join(a.sinks) + "\n";
  out += "flush: " + join(a.assumptions.flush) + "\n";
  out += "public: " + join(a.assumptions.publics) + "\n";
  out += "excluded: " + join(a.excluded) + "\n";
  // Keep trailing spaces out of empty lists.
  std::string cleaned;
  std::istringstream in(out);
  std::string line;
  while (std::getline(in, line)) cleaned += trim(line) + "\n";
  return cleaned;
}

Annotations validate_annotations(const Program& p, const Annotations& a) {
  const ModuleDef& top = p.top_module();
  if (a.sinks.empty()) throw Error("no sinks");
  auto check = [&](const std::set<std::string>& names, const char* what) {
    for (const auto& n : names) {
      if (top.find_net(n)) continue;
      if (n.find('.') != std::string::npos) {
        throw Error(std::string(what) + " '" + n + "' is not a net of the top-level module '" + top.name + "'");
      }
      throw Error(std::string("unknown net '") + n + "' in " + what);
    }
  };
  check(a.sources, "sources");
  check(a.sinks, "sinks");
  check(a.assumptions.flush, "flush");
  check(a.assumptions.publics, "public");
  check(a.excluded, "excluded");
  for (const auto& n : a.excluded) {
    if (a.assumptions.publics.count(n)) throw Error("net '" + n + "' is both excluded and public");
  }
  if (!top.clock.empty() && (a.sources.count(top.clock) || a.sinks.count(top.clock))) {
    throw Error("clock '" + top.clock + "' cannot be a source or sink");
  }
  return a;
}

}  // namespace ctv
