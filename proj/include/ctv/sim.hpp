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

// Two-run simulation with liveness bits.
//
// A configuration at cycle c holds the register values latched at the end
// of cycle c-1, the inputs of cycle c, and every wire settled from those.
// Liveness: an assigned net takes the OR of the bits of the nets read by
// the selected right-hand side and of the conditions enclosing that
// assignment. A register not assigned in a cycle keeps value and bit.
// Inputs are live only at c == t and only when they are sources; every
// source is forced live at c == t. All bits are dead at cycle 0, so t >= 1.
//
// Operators use self-determined widths (see expr_width); results are
// masked to the target width. Registers start at zero unless an initial
// store is given.

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "ctv/elaborate.hpp"

namespace ctv {

using InputMap = std::map<std::string, uint64_t>;

constexpr int kLeft = 0;
constexpr int kRight = 1;

struct PairConfiguration {
  int cycle = 0;
  int t = 1;
  std::set<std::string> sources;
  // Indexed like Simulator::nets().
  std::vector<uint64_t> store[2];
  std::vector<uint8_t> live[2];
};

struct PairTrace {
  std::vector<std::string> nets;
  std::vector<int> widths;
  std::vector<PairConfiguration> configs;
  std::vector<InputMap> inputs[2];
  // A non-input public net differed between the runs, or a flushed net
  // differed at cycle 0. Such traces do not witness anything.
  bool assumption_violated = false;
  std::string violation_note;

  int index(const std::string& net) const;
  uint64_t value(int cycle, int run, const std::string& net) const;
  bool live(int cycle, int run, const std::string& net) const;
  size_t size() const { return configs.size(); }
};

struct Verdict {
  bool constant_time = true;
  std::string sink;
  int cycle = 0;
  bool live_left = false;
  bool live_right = false;

  static Verdict ok() { return {}; }
  static Verdict violation(std::string sink, int cycle, bool l, bool r) {
    return {false, std::move(sink), cycle, l, r};
  }
  friend bool operator==(const Verdict&, const Verdict&) = default;
};

namespace detail {
struct Engine;
}

// Compiled single-run simulator over an elaborated design. Inlined designs
// settle in one topological pass; modular designs keep one state block per
// instance and settle by relaxation across instance boundaries. Traced net
// names are hierarchical ("S_0.out") and identical for both forms; clocks
// are not traced.
class Simulator {
 public:
  explicit Simulator(const ElaboratedDesign& design);
  ~Simulator();
  Simulator(Simulator&&) noexcept;
  Simulator& operator=(Simulator&&) noexcept;

  const std::vector<std::string>& nets() const;
  const std::vector<int>& widths() const;
  // Top-level inputs excluding the clock, in port order.
  const std::vector<std::string>& inputs() const;
  // Registers (hierarchical names) in trace order.
  std::vector<std::string> registers() const;
  int index(const std::string& net) const;  // -1 when not traced
  bool is_top_level(const std::string& net) const;

  struct Run {
    std::vector<uint64_t> value;
    std::vector<uint8_t> live;
  };
  // Configuration at cycle 0. `initial` optionally sets register values.
  Run initial(const InputMap& inputs, const InputMap* initial = nullptr) const;
  // Configuration at cycle `next_cycle` from the one before it.
  Run next(const Run& prev, int next_cycle, int t, const std::set<std::string>& sources,
           const InputMap& inputs) const;

  const detail::Engine& engine() const { return *engine_; }

 private:
  std::unique_ptr<detail::Engine> engine_;
};

// One product step: both runs advance from cfg.cycle to cfg.cycle + 1.
PairConfiguration step(const Simulator& sim, const PairConfiguration& cfg, const InputMap& inputs_left,
                       const InputMap& inputs_right);
PairConfiguration step(const PairConfiguration& cfg, const ElaboratedDesign& design, const InputMap& inputs_left,
                       const InputMap& inputs_right);

// Runs both executions for n cycles (0..n-1). Public inputs are copied from
// the left stream to the right at every cycle; flushed inputs at cycle 0.
// `initial` gives per-run initial register values (optional); flushed and
// public registers are copied left to right. The design overload first
// closes the assumptions over aliases (expand_aliases); search_witness too.
PairTrace run_pair(const Simulator& sim, const std::set<std::string>& sources, int t, int n,
                   const std::vector<InputMap>& inputs_left, const std::vector<InputMap>& inputs_right,
                   const AssumptionSet& assumptions, const InputMap* initial_left = nullptr,
                   const InputMap* initial_right = nullptr);
PairTrace run_pair(const ElaboratedDesign& design, const std::set<std::string>& sources, int t, int n,
                   const std::vector<InputMap>& inputs_left, const std::vector<InputMap>& inputs_right,
                   const AssumptionSet& assumptions);

// ConstantTime iff every sink has equal liveness in both runs at every
// cycle. Otherwise the earliest violation (ties broken by sink name).
Verdict check_ct_on_trace(const PairTrace& trace, const std::set<std::string>& sinks);

struct SearchOptions {
  int bound = 8;
  uint64_t budget = uint64_t{1} << 20;
  uint64_t seed = 0x5eed;
};

struct SearchStats {
  bool exhaustive = false;
  uint64_t trials = 0;
};

// Looks for a pair of runs that violates constant time under `assumptions`.
// Exhaustive when the number of input pairs times the number of initial
// cycles fits in the budget: zero registers, zero inputs at cycle 0, inputs
// constant from cycle 1 on, t ascending, then left and right inputs in
// lexicographic order. Otherwise `budget` seeded random trials with
// per-cycle inputs and random initial registers.
std::optional<PairTrace> search_witness(const ElaboratedDesign& design, const Annotations& ann,
                                        const SearchOptions& options = {}, SearchStats* stats = nullptr);

// Tab-separated dump: one line per cycle per run,
// "<cycle>\t<L|R>\t<net>=0x<hex>:<bit>\t...".
std::string dump_trace(const PairTrace& trace);

}  // namespace ctv
