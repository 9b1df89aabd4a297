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

#include "ctv/verifier.hpp"

#include <algorithm>
#include <functional>
#include <optional>
#include <sstream>

#include "ctv/model.hpp"

namespace ctv {
namespace {

using NetSet = std::set<std::string>;

bool subset(const NetSet& a, const NetSet& b) {
  return std::includes(b.begin(), b.end(), a.begin(), a.end());
}

// One module prepared for analysis.
struct Context {
  const Program* program = nullptr;
  const ModuleDef* m = nullptr;
  ModuleModel model;
  const std::map<std::string, ModuleSummary>* summaries = nullptr;
  std::vector<std::string> nets;  // declaration order, clock excluded
  std::vector<std::string> inputs;
  // Nets each net depends on (process reads, or binding reads of the
  // child inputs in the cone of an instance output).
  std::map<std::string, NetSet> deps;

  const NetDriver& driver(const std::string& n) const { return model.driver(n); }
  const Net& net(const std::string& n) const { return *m->find_net(n); }
};

std::vector<std::pair<int, std::string>> instance_ports(const NetDriver& d) {
  std::vector<std::pair<int, std::string>> out;
  if (d.instance >= 0) {
    out.emplace_back(d.instance, d.slices.front().port);
  } else {
    for (size_t i = 0; i < d.slices.size(); ++i) out.emplace_back(d.slice_instances[i], d.slices[i].port);
  }
  return out;
}

const ModuleSummary& child_summary(const Context& ctx, int inst) {
  const std::string& mod = ctx.m->instances[static_cast<size_t>(inst)].module;
  if (!ctx.summaries) throw Error("missing summary for module '" + mod + "'");
  auto it = ctx.summaries->find(mod);
  if (it == ctx.summaries->end()) throw Error("missing summary for module '" + mod + "'");
  return it->second;
}

NetSet binding_reads(const Context& ctx, int inst, const std::string& port) {
  for (const auto& b : ctx.m->instances[static_cast<size_t>(inst)].bindings) {
    if (b.port == port) return reads_of(*b.expr);
  }
  return {};
}

Context make_context(const Program& program, const ModuleDef& m,
                     const std::map<std::string, ModuleSummary>* summaries) {
  Context ctx;
  ctx.program = &program;
  ctx.m = &m;
  ctx.model = build_model(program, m);
  ctx.summaries = summaries;
  for (const auto& n : m.nets) {
    if (n.name == m.clock) continue;
    ctx.nets.push_back(n.name);
    if (n.is_input()) ctx.inputs.push_back(n.name);
  }
  for (const auto& n : ctx.nets) {
    const NetDriver& d = ctx.driver(n);
    NetSet& deps = ctx.deps[n];
    if (d.kind == DriverKind::kProcess) {
      deps = d.reads;
    } else if (d.kind == DriverKind::kInstance) {
      for (const auto& [inst, port] : instance_ports(d)) {
        const ModuleSummary& s = child_summary(ctx, inst);
        auto cone = s.cones.find(port);
        if (cone == s.cones.end()) continue;
        for (const auto& in : cone->second) {
          NetSet r = binding_reads(ctx, inst, in);
          deps.insert(r.begin(), r.end());
        }
      }
    }
    deps.erase(m.clock);
  }
  return ctx;
}

struct Setting {
  NetSet sources;      // forced live at t (top level only)
  NetSet publics;
  NetSet flush;
  NetSet ct_inputs;    // inputs that are ct by assumption
  NetSet taint_seeds;  // nets whose liveness may be set from outside
  bool isolated = false;
};

struct Partition {
  std::map<std::string, int> color;
  std::vector<std::vector<std::string>> classes;
};

Partition refine(const Context& ctx, const NetSet& sources, bool isolated) {
  std::map<std::string, int> color;
  auto renumber = [&](const std::map<std::string, std::string>& keys) {
    std::map<std::string, int> ids;
    std::map<std::string, int> out;
    for (const auto& n : ctx.nets) {
      auto [it, fresh] = ids.emplace(keys.at(n), static_cast<int>(ids.size()));
      out[n] = it->second;
    }
    return out;
  };
  std::map<std::string, std::string> keys;
  for (const auto& n : ctx.nets) {
    const NetDriver& d = ctx.driver(n);
    const std::string src = sources.count(n) ? "+src" : "";
    switch (d.kind) {
      case DriverKind::kInput:
        keys[n] = isolated ? "in:" + n : "in" + src;
        break;
      case DriverKind::kInstance:
        keys[n] = "inst:" + n;
        break;
      case DriverKind::kProcess:
        keys[n] = (ctx.net(n).kind == NetKind::kReg ? "reg" : "wire") + src;
        break;
    }
  }
  color = renumber(keys);
  size_t count = 0;
  for (;;) {
    std::map<std::string, std::string> sig;
    for (const auto& n : ctx.nets) {
      std::ostringstream os;
      os << color[n];
      const NetDriver& d = ctx.driver(n);
      if (d.kind == DriverKind::kProcess) {
        for (const auto& p : d.paths) {
          std::set<int> ids;
          for (const auto& r : p.live_reads) {
            auto it = color.find(r);
            if (it != color.end()) ids.insert(it->second);
          }
          os << "|" << p.guard_key << (p.keep ? "#k" : "#a");
          for (int i : ids) os << "," << i;
        }
      }
      sig[n] = os.str();
    }
    std::map<std::string, int> next = renumber(sig);
    std::set<int> distinct;
    for (const auto& [n, c] : next) distinct.insert(c);
    color = std::move(next);
    if (distinct.size() == count) break;
    count = distinct.size();
  }
  Partition p;
  p.color = color;
  std::map<int, int> slot;
  for (const auto& n : ctx.nets) {
    auto [it, fresh] = slot.emplace(color[n], static_cast<int>(p.classes.size()));
    if (fresh) p.classes.emplace_back();
    p.classes[static_cast<size_t>(it->second)].push_back(n);
    p.color[n] = it->second;
  }
  return p;
}

struct Fixpoint {
  NetSet pub;
  NetSet ct;
  std::map<std::string, int> secret;
  std::map<std::string, int> vartime;
  int pub_rounds = 0;
  int ct_rounds = 0;
  Partition partition;
};

class Solver {
 public:
  Solver(const Context& ctx, const Setting& s) : ctx_(ctx), s_(s) {}

  Fixpoint run() {
    Fixpoint f;
    f.partition = refine(ctx_, s_.sources, s_.isolated);
    solve_pub(f);
    solve_ct(f);
    return f;
  }

 private:
  bool assumed_equal(const std::string& n) const { return s_.publics.count(n) || s_.flush.count(n); }

  // Equal in both runs at cycle 0.
  bool init_eq(const std::string& n) {
    auto it = init_memo_.find(n);
    if (it != init_memo_.end()) return it->second;
    init_memo_[n] = false;  // cycles are not init-equal
    bool r = assumed_equal(n);
    if (!r) {
      const NetDriver& d = ctx_.driver(n);
      if (d.kind == DriverKind::kProcess && ctx_.net(n).kind == NetKind::kWire) {
        r = std::all_of(d.reads.begin(), d.reads.end(), [&](const std::string& x) { return init_eq(x); });
      } else if (d.kind == DriverKind::kInstance) {
        r = true;
        for (const auto& [inst, port] : instance_ports(d)) {
          const SummaryClause* c = child_summary(ctx_, inst).pub_clause(port);
          if (!c || c->flush_premise) {
            r = false;
            break;
          }
          for (const auto& in : c->pub_premise) {
            for (const auto& x : binding_reads(ctx_, inst, in)) r = r && init_eq(x);
          }
        }
      }
    }
    init_memo_[n] = r;
    return r;
  }

  bool pub_supported(const std::string& n, const NetSet& pub) const {
    const NetDriver& d = ctx_.driver(n);
    switch (d.kind) {
      case DriverKind::kInput:
        return false;
      case DriverKind::kProcess:
        return subset(d.reads, pub);
      case DriverKind::kInstance:
        for (const auto& [inst, port] : instance_ports(d)) {
          const SummaryClause* c = child_summary(ctx_, inst).pub_clause(port);
          if (!c) return false;
          if (c->flush_premise && !assumed_equal(n)) return false;
          for (const auto& in : c->pub_premise) {
            if (!subset(binding_reads(ctx_, inst, in), pub)) return false;
          }
        }
        return true;
    }
    return false;
  }

  void solve_pub(Fixpoint& f) {
    NetSet pub(ctx_.nets.begin(), ctx_.nets.end());
    for (int round = 1;; ++round) {
      std::vector<std::string> drop;
      for (const auto& n : ctx_.nets) {
        if (!pub.count(n) || s_.publics.count(n)) continue;
        if ((round == 1 && !init_eq(n)) || !pub_supported(n, pub)) drop.push_back(n);
      }
      if (drop.empty()) break;
      for (const auto& n : drop) {
        pub.erase(n);
        f.secret[n] = round;
      }
      f.pub_rounds = round;
    }
    f.pub = std::move(pub);
  }

  NetSet tainted() const {
    NetSet t = s_.taint_seeds;
    for (bool changed = true; changed;) {
      changed = false;
      for (const auto& n : ctx_.nets) {
        if (t.count(n)) continue;
        const NetSet& deps = ctx_.deps.at(n);
        if (std::any_of(deps.begin(), deps.end(), [&](const std::string& x) { return t.count(x) > 0; })) {
          t.insert(n);
          changed = true;
        }
      }
    }
    return t;
  }

  bool ct_supported(const std::string& n, const NetSet& ct, const Fixpoint& f) const {
    const NetDriver& d = ctx_.driver(n);
    auto pub_ct = [&](const NetSet& xs) {
      return std::all_of(xs.begin(), xs.end(), [&](const std::string& x) { return ct.count(x) && f.pub.count(x); });
    };
    switch (d.kind) {
      case DriverKind::kInput:
        return false;
      case DriverKind::kInstance:
        for (const auto& [inst, port] : instance_ports(d)) {
          const SummaryClause* c = child_summary(ctx_, inst).ct_clause(port);
          if (!c) return false;
          for (const auto& in : c->ct_premise) {
            if (!subset(binding_reads(ctx_, inst, in), ct)) return false;
          }
          for (const auto& in : c->pub_premise) {
            if (!pub_ct(binding_reads(ctx_, inst, in))) return false;
          }
        }
        return true;
      case DriverKind::kProcess:
        break;
    }
    for (const auto& p : d.paths) {
      if (!subset(p.live_reads, ct)) return false;
    }
    // Same path in both runs: each path's bit is an OR of ct bits.
    if (pub_ct(d.cond_reads)) return true;
    // Paths may differ, but every path reads the same color classes.
    std::set<int> first;
    for (size_t i = 0; i < d.paths.size(); ++i) {
      std::set<int> ids;
      for (const auto& r : d.paths[i].live_reads) ids.insert(f.partition.color.at(r));
      if (i == 0) {
        first = std::move(ids);
      } else if (ids != first) {
        return false;
      }
    }
    return true;
  }

  void solve_ct(Fixpoint& f) {
    const NetSet taint = tainted();
    NetSet always = s_.publics;
    for (const auto& n : ctx_.nets) {
      if (!taint.count(n)) always.insert(n);
    }
    always.insert(s_.ct_inputs.begin(), s_.ct_inputs.end());
    NetSet ct(ctx_.nets.begin(), ctx_.nets.end());
    for (int round = 1;; ++round) {
      std::vector<std::string> drop;
      for (const auto& n : ctx_.nets) {
        if (!ct.count(n) || always.count(n)) continue;
        if (!ct_supported(n, ct, f)) drop.push_back(n);
      }
      if (drop.empty()) break;
      for (const auto& n : drop) {
        ct.erase(n);
        f.vartime[n] = round;
      }
      f.ct_rounds = round;
    }
    f.ct = std::move(ct);
  }

  const Context& ctx_;
  const Setting& s_;
  std::map<std::string, bool> init_memo_;
};

Fixpoint solve(const Context& ctx, const Setting& s) { return Solver(ctx, s).run(); }

// Input ports in the cone of influence of `out`.
std::vector<std::string> cone_of(const Context& ctx, const std::string& out) {
  NetSet seen;
  std::vector<std::string> work{out};
  while (!work.empty()) {
    const std::string n = work.back();
    work.pop_back();
    if (!seen.insert(n).second) continue;
    for (const auto& d : ctx.deps.at(n)) work.push_back(d);
  }
  std::vector<std::string> cone;
  for (const auto& in : ctx.inputs) {
    if (seen.count(in)) cone.push_back(in);
  }
  return cone;
}

// Subsets of `items` by size, then lexicographically by index. Large cones
// only get subsets of size <= 2.
std::vector<std::vector<std::string>> subsets_by_size(const std::vector<std::string>& items) {
  std::vector<std::vector<std::string>> out;
  const size_t n = items.size();
  const size_t max_size = n > 12 ? std::min<size_t>(2, n) : n;
  for (size_t k = 0; k <= max_size; ++k) {
    std::vector<size_t> idx(k);
    for (size_t i = 0; i < k; ++i) idx[i] = i;
    for (;;) {
      std::vector<std::string> s;
      for (size_t i : idx) s.push_back(items[i]);
      out.push_back(std::move(s));
      // next combination
      size_t i = k;
      while (i > 0 && idx[i - 1] == n - k + i - 1) --i;
      if (i == 0) break;
      ++idx[i - 1];
      for (size_t j = i; j < k; ++j) idx[j] = idx[j - 1] + 1;
    }
  }
  return out;
}

ModuleSummary summarize(const Context& ctx) {
  ModuleSummary sum;
  sum.module = ctx.m->name;
  NetSet output_regs;
  std::vector<std::string> outputs;
  for (const auto& n : ctx.nets) {
    if (!ctx.net(n).is_output()) continue;
    outputs.push_back(n);
    if (ctx.net(n).kind == NetKind::kReg) output_regs.insert(n);
  }
  const NetSet all_inputs(ctx.inputs.begin(), ctx.inputs.end());
  std::map<std::string, Fixpoint> cache;
  auto run = [&](const NetSet& ct_in, const NetSet& pub_in, bool flush) -> const Fixpoint& {
    std::string key;
    for (const auto& x : ct_in) key += x + ",";
    key += "|";
    for (const auto& x : pub_in) key += x + ",";
    key += flush ? "|f" : "|";
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    Setting s;
    s.isolated = true;
    s.ct_inputs = ct_in;
    s.publics = pub_in;
    if (flush) s.flush = output_regs;
    s.taint_seeds = all_inputs;
    return cache.emplace(key, solve(ctx, s)).first->second;
  };

  for (const auto& o : outputs) {
    const std::vector<std::string> cone = cone_of(ctx, o);
    sum.cones[o] = cone;
    const NetSet cone_set(cone.begin(), cone.end());
    const auto subsets = subsets_by_size(cone);

    std::optional<SummaryClause> ct_clause;
    auto try_ct = [&](const NetSet& ct_in, const std::vector<std::string>& pub_in) {
      if (ct_clause) return;
      if (!run(ct_in, NetSet(pub_in.begin(), pub_in.end()), false).ct.count(o)) return;
      SummaryClause c;
      c.output = o;
      for (const auto& in : cone) {
        if (ct_in.count(in) && std::find(pub_in.begin(), pub_in.end(), in) == pub_in.end()) {
          c.ct_premise.push_back(in);
        }
      }
      c.pub_premise = pub_in;
      c.conclusion = SummaryClause::Conclusion::kCt;
      ct_clause = c;
    };
    try_ct({}, {});
    try_ct(cone_set, {});
    for (const auto& s : subsets) {
      if (!s.empty()) try_ct(cone_set, s);
    }

    std::optional<SummaryClause> pub_clause;
    for (const auto& s : subsets) {
      for (bool flush : {false, true}) {
        if (pub_clause) break;
        if (flush && !output_regs.count(o)) continue;
        if (!run({}, NetSet(s.begin(), s.end()), flush).pub.count(o)) continue;
        SummaryClause c;
        c.output = o;
        c.pub_premise = s;
        c.flush_premise = flush;
        c.conclusion = SummaryClause::Conclusion::kPub;
        pub_clause = c;
      }
    }

    if (ct_clause && pub_clause && ct_clause->ct_premise.empty() && !pub_clause->flush_premise &&
        ct_clause->pub_premise == pub_clause->pub_premise) {
      ct_clause->conclusion = SummaryClause::Conclusion::kCtPub;
      sum.clauses.push_back(*ct_clause);
      continue;
    }
    if (ct_clause) sum.clauses.push_back(*ct_clause);
    if (pub_clause) sum.clauses.push_back(*pub_clause);
  }
  return sum;
}

}  // namespace

int PredicateState::color(const std::string& net) const {
  for (size_t i = 0; i < eq_classes.size(); ++i) {
    if (std::find(eq_classes[i].begin(), eq_classes[i].end(), net) != eq_classes[i].end()) {
      return static_cast<int>(i);
    }
  }
  return -1;
}

std::string SummaryClause::render() const {
  std::vector<std::string> premise;
  for (const auto& p : ct_premise) premise.push_back("ct(" + p + ")");
  for (const auto& p : pub_premise) premise.push_back("pub(" + p + ")");
  if (flush_premise) premise.push_back("flush(" + output + ")");
  std::string conclusion;
  switch (this->conclusion) {
    case Conclusion::kCt:
      conclusion = "ct(" + output + ")";
      break;
    case Conclusion::kPub:
      conclusion = "pub(" + output + ")";
      break;
    case Conclusion::kCtPub:
      conclusion = "ct(" + output + ") ∧ pub(" + output + ")";
      break;
  }
  std::string out;
  for (const auto& p : premise) out += (out.empty() ? "" : " ∧ ") + p;
  return out.empty() ? conclusion : out + " ⇒ " + conclusion;
}

const SummaryClause* ModuleSummary::ct_clause(const std::string& output) const {
  for (const auto& c : clauses) {
    if (c.output == output && c.concludes_ct()) return &c;
  }
  return nullptr;
}

const SummaryClause* ModuleSummary::pub_clause(const std::string& output) const {
  for (const auto& c : clauses) {
    if (c.output == output && c.concludes_pub()) return &c;
  }
  return nullptr;
}

std::string ModuleSummary::render() const {
  std::string out;
  for (const auto& c : clauses) out += c.render() + "\n";
  return out;
}

std::string ProofArtifact::render() const {
  std::ostringstream os;
  os << "verdict " << (verified ? "verified" : "failed");
  for (const auto& s : failed_sinks) os << " " << s;
  os << "\n";
  for (const auto& n : nets) {
    os << "net " << n;
    auto v = vartime.find(n);
    auto s = secret.find(n);
    os << " vartime=" << (v == vartime.end() ? "⊥" : std::to_string(v->second));
    os << " secret=" << (s == secret.end() ? "⊥" : std::to_string(s->second));
    os << " color=" << final_state.color(n) << "\n";
  }
  for (const auto& [m, s] : summaries) {
    for (const auto& c : s.clauses) os << "summary " << m << " " << c.render() << "\n";
  }
  return os.str();
}

std::vector<std::vector<std::string>> color_equivalence(const Program& program, const ModuleDef& m,
                                                        const std::set<std::string>& sources, bool isolated) {
  // Instance outputs get singleton classes, so child summaries are not
  // needed here.
  Context ctx;
  ctx.program = &program;
  ctx.m = &m;
  ctx.model = build_model(program, m);
  for (const auto& n : m.nets) {
    if (n.name != m.clock) ctx.nets.push_back(n.name);
  }
  return refine(ctx, sources, isolated).classes;
}

ModuleSummary infer_summary(const Program& program, const std::string& module,
                            const std::map<std::string, ModuleSummary>& children) {
  const ModuleDef* m = program.find(module);
  if (!m) throw Error("unknown module '" + module + "'");
  return summarize(make_context(program, *m, &children));
}

ModuleSummary infer_summary(const Program& program, const std::string& module) {
  std::map<std::string, ModuleSummary> done;
  std::function<void(const std::string&)> visit = [&](const std::string& name) {
    if (done.count(name)) return;
    const ModuleDef* m = program.find(name);
    if (!m) throw Error("unknown module '" + name + "'");
    for (const auto& inst : m->instances) visit(inst.module);
    done[name] = infer_summary(program, name, done);
  };
  visit(module);
  return done.at(module);
}

ProofArtifact infer(const ElaboratedDesign& design, const Annotations& ann, bool modular) {
  if (modular == design.inlined) {
    throw Error(modular ? "modular analysis needs a hierarchical design" : "inlined analysis needs a flattened design");
  }
  ProofArtifact art;
  art.modular = modular;
  for (const auto& name : design.child_modules()) {
    art.summaries[name] = infer_summary(design.program, name, art.summaries);
  }
  const ModuleDef& top = design.top();
  const Context ctx = make_context(design.program, top, &art.summaries);
  art.summaries[top.name] = summarize(ctx);

  Setting s;
  s.sources = ann.sources;
  s.taint_seeds = ann.sources;
  const AssumptionSet a = modular ? ann.assumptions : expand_aliases(design, ann.assumptions);
  s.publics = a.publics;
  s.flush = a.flush;
  s.ct_inputs.insert(ctx.inputs.begin(), ctx.inputs.end());
  const Fixpoint f = solve(ctx, s);

  art.nets = ctx.nets;
  art.final_state.ct = f.ct;
  art.final_state.pub = f.pub;
  art.final_state.eq_classes = f.partition.classes;
  art.vartime = f.vartime;
  art.secret = f.secret;
  art.ct_rounds = f.ct_rounds;
  art.pub_rounds = f.pub_rounds;
  for (const auto& sink : ann.sinks) {
    if (!f.ct.count(sink)) art.failed_sinks.push_back(sink);
  }
  art.verified = art.failed_sinks.empty();
  return art;
}

}  // namespace ctv
