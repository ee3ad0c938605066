// Copyright 2026 The maskcg Authors
//
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

#include "maskcg/solver.hpp"

#include <algorithm>
#include <chrono>
#include <climits>
#include <functional>

namespace maskcg {

namespace {

using Clock = std::chrono::steady_clock;

struct Enforce {
  bool rpairs = false;
  bool spairs = false;
  bool mmpairs = false;
  bool mspairs = false;

  static Enforce from(const ExtendedModel& m) {
    if (!m.secure) return {};
    return {true, true, true, true};
  }
  bool any() const { return rpairs || spairs || mmpairs || mspairs; }
};

enum class Mode : std::uint8_t { Optimize, Enumerate, First };

struct Settings {
  Mode mode = Mode::Optimize;
  Enforce enforce;
  bool allow_optional = true;
  bool source_order = false;
  std::size_t limit = SIZE_MAX;
};

struct State {
  std::vector<int> cycle;  // per op, -1 while unissued
  std::vector<Instr> instr;
  std::vector<int> sel;    // per operand
  std::vector<int> reg;    // per temp, -1 until defined
  std::vector<int> le;     // per temp, grows with uses
  std::vector<int> occ;    // per location, last temp written there
  std::vector<int> pending;  // per value, unissued mandatory uses
  int last = 0;
  int span = 0;
  int last_mem = -1;
  int free_used = 0;
  int slots_used = 0;
  int body_left = 0;
};

class Engine {
 public:
  Engine(const ExtendedModel& m, Settings st, const SolveBudget& b)
      : m_(m), st_(st), budget_(b), start_(Clock::now()) {
    const int nloc = m.target.num_locations();
    free_index_.assign(nloc, -1);
    for (size_t i = 0; i < m.free_registers.size(); ++i) free_index_[m.free_registers[i]] = static_cast<int>(i);
    copy_op_.assign(m.program.num_temps(), -1);
    reload_op_.assign(m.program.num_temps(), -1);
    mem_preds_.assign(m.num_ops(), {});
    for (const auto& [a, b2] : m.memory_order) mem_preds_[b2].push_back(a);
    for (const auto& op : m.ops) {
      if (op.kind == OpKind::Copy) copy_op_[m.temps[op.defs[0]].source] = op.id;
      if (op.kind == OpKind::Reload) reload_op_[m.temps[op.defs[0]].source] = op.id;
      if (op.kind == OpKind::Body) body_ops_.push_back(op.id);
    }
    compute_tails();
  }

  void run() {
    State s;
    s.cycle.assign(m_.num_ops(), -1);
    s.instr.assign(m_.num_ops(), Instr::None);
    s.sel.assign(m_.num_operands, -1);
    s.reg.assign(m_.num_temps(), -1);
    s.le.assign(m_.num_temps(), 0);
    s.occ.assign(m_.target.num_locations(), -1);
    s.pending.assign(m_.program.num_temps(), 0);
    s.cycle[m_.in_op()] = 0;
    s.instr[m_.in_op()] = Instr::Pseudo;
    for (TempId t : m_.ops[m_.in_op()].defs) {
      s.reg[t] = m_.temps[t].domain.front();
      s.le[t] = 1;
      s.occ[s.reg[t]] = t;
    }
    for (const auto& op : m_.ops) {
      if (!op.mandatory || op.kind == OpKind::In) continue;
      for (const auto& mo : op.operands) {
        if (!mo.literal) ++s.pending[value_of(mo)];
      }
    }
    s.body_left = static_cast<int>(body_ops_.size());
    dfs(s);
  }

  bool exhausted() const { return !stopped_; }
  std::int64_t nodes() const { return nodes_; }
  std::optional<Solution>& best() { return best_; }
  std::vector<Solution>& all() { return all_; }
  void set_incumbent(const Solution& s) {
    best_ = s;
    best_obj_ = s.objective;
  }

 private:
  const ExtendedModel& m_;
  Settings st_;
  SolveBudget budget_;
  Clock::time_point start_;
  std::int64_t nodes_ = 0;
  bool stopped_ = false;
  bool done_ = false;
  int best_obj_ = INT_MAX;
  std::optional<Solution> best_;
  std::vector<Solution> all_;
  std::vector<int> free_index_;
  std::vector<OpId> copy_op_, reload_op_, body_ops_;
  std::vector<std::vector<OpId>> mem_preds_;
  std::vector<int> tail_;

  TempId value_of(const ModelOperand& mo) const { return m_.temps[mo.alternatives.front()].source; }

  int completion(const State& s, OpId o) const { return s.cycle[o] + m_.latency(o, s.instr[o]); }

  bool alive(const State& s, TempId t) const { return s.reg[t] >= 0 && s.occ[s.reg[t]] == t; }

  void compute_tails() {
    tail_.assign(m_.num_ops(), 0);
    for (auto it = body_ops_.rbegin(); it != body_ops_.rend(); ++it) {
      OpId o = *it;
      const ModelOp& op = m_.ops[o];
      int lat = m_.latency(o, op.instrs.front());
      int after = 0;
      for (OpId d : body_ops_) {
        if (d <= o) continue;
        bool dep = false;
        for (const auto& mo : m_.ops[d].operands) {
          if (!mo.literal && !op.defs.empty() && value_of(mo) == m_.temps[op.defs[0]].source) dep = true;
        }
        for (OpId p : mem_preds_[d]) dep |= p == o;
        if (dep) after = std::max(after, tail_[d]);
      }
      tail_[o] = lat + after;
    }
  }

  bool out_of_budget() {
    ++nodes_;
    if (nodes_ > budget_.max_nodes) stopped_ = true;
    if ((nodes_ & 1023) == 0) {
      double el = std::chrono::duration<double>(Clock::now() - start_).count();
      if (el > budget_.seconds) stopped_ = true;
    }
    return stopped_;
  }

  int lower_bound(const State& s) const {
    int lb = s.span;
    // Outputs already computed but not in their result register need a copy.
    int moves = 0;
    const ModelOp& out = m_.ops[m_.out_op()];
    for (size_t i = 0; i < out.operands.size(); ++i) {
      TempId v = value_of(out.operands[i]);
      TempId orig = m_.members[v].front();
      if (s.cycle[m_.temps[orig].def_op] < 0) continue;
      TempId at = s.occ[m_.target.results[i]];
      if (at < 0 || m_.temps[at].source != v) ++moves;
    }
    if (s.body_left + moves > 0) lb = std::max(lb, s.last + s.body_left + moves + 1);
    if (s.body_left > 0) {
      for (OpId o : body_ops_) {
        if (s.cycle[o] < 0) lb = std::max(lb, s.last + 1 + tail_[o]);
      }
    }
    return lb;
  }

  // Every value that still has mandatory uses must stay reachable.
  bool values_reachable(const State& s) const {
    for (TempId v = 0; v < m_.program.num_temps(); ++v) {
      if (s.pending[v] == 0) continue;
      if (s.cycle[m_.temps[m_.members[v].front()].def_op] < 0) continue;
      bool ok = false;
      for (TempId t : m_.members[v]) {
        if (!alive(s, t)) continue;
        if (m_.is_hw(s.reg[t])) {
          ok = true;
        } else if (reload_op_[v] >= 0 && s.cycle[reload_op_[v]] < 0 && st_.allow_optional) {
          ok = true;
        }
        if (ok) break;
      }
      if (!ok) return false;
    }
    return true;
  }

  // Register sequence rules for writing t over the current occupant of loc.
  bool register_write_ok(const State& s, TempId t, int loc) const {
    if (!m_.is_hw(loc)) return true;
    const Enforce& e = st_.enforce;
    const SecuritySets& ss = m_.sets;
    TempId prev = s.occ[loc];
    if (e.spairs) {
      auto key = ss.spairs.find(t);
      if (key != ss.spairs.end() && (prev < 0 || !key->second.count(prev))) return false;
      if (prev >= 0) {
        auto pk = ss.spairs.find(prev);
        if (pk != ss.spairs.end() && !pk->second.count(t)) return false;
        auto en = ss.entry.find(prev);
        if (en != ss.entry.end() && !en->second.count(t)) return false;
      }
    }
    if (e.rpairs && prev >= 0 && ss.has_rpair(prev, t)) return false;
    return true;
  }

  bool memory_write_ok(const State& s, OpId o) const {
    const Enforce& e = st_.enforce;
    const SecuritySets& ss = m_.sets;
    int prev = s.last_mem;
    if (e.mspairs) {
      auto key = ss.mspairs.find(o);
      if (key != ss.mspairs.end() && (prev < 0 || !key->second.count(prev))) return false;
      if (prev >= 0) {
        auto pk = ss.mspairs.find(prev);
        if (pk != ss.mspairs.end() && !pk->second.count(o)) return false;
      }
    }
    if (e.mmpairs && prev >= 0 && ss.has_mmpair(prev, o)) return false;
    return true;
  }

  bool leaf_ok(const State& s) const {
    const Enforce& e = st_.enforce;
    if (e.spairs) {
      for (int loc = 0; loc < m_.target.num_registers(); ++loc) {
        if (s.occ[loc] >= 0 && m_.sets.spairs.count(s.occ[loc])) return false;
      }
    }
    if (e.mspairs && s.last_mem >= 0 && m_.sets.mspairs.count(s.last_mem)) return false;
    return true;
  }

  Solution to_solution(const State& s) const {
    Solution sol = empty_solution(m_);
    for (OpId o = 0; o < m_.num_ops(); ++o) {
      sol.active[o] = s.cycle[o] >= 0 || m_.ops[o].kind == OpKind::Out;
      sol.cycle[o] = s.cycle[o];
      sol.instr[o] = s.instr[o];
    }
    for (TempId t = 0; t < m_.num_temps(); ++t) sol.reg[t] = s.reg[t];
    sol.sel = s.sel;
    derive(m_, sol);
    return sol;
  }

  void record(const State& s) {
    Solution sol = to_solution(s);
    switch (st_.mode) {
      case Mode::Enumerate:
        all_.push_back(std::move(sol));
        if (all_.size() >= st_.limit) done_ = true;
        break;
      case Mode::First:
        best_ = std::move(sol);
        done_ = true;
        break;
      case Mode::Optimize:
        if (sol.objective < best_obj_) {
          best_obj_ = sol.objective;
          best_ = std::move(sol);
        }
        break;
    }
  }

  void try_out(State s) {
    const ModelOp& out = m_.ops[m_.out_op()];
    for (size_t i = 0; i < out.operands.size(); ++i) {
      int loc = m_.target.results[i];
      TempId t = s.occ[loc];
      TempId v = value_of(out.operands[i]);
      if (t < 0 || m_.temps[t].source != v) return;
      s.sel[out.operands[i].id] = t;
    }
    if (!leaf_ok(s)) return;
    record(s);
  }

  // Useless when no security constraint can make use of the extra write.
  bool pointless_optional(const State& s, const ModelOp& op) const {
    if (st_.mode != Mode::Optimize || st_.enforce.any()) return false;
    return s.pending[m_.temps[op.defs[0]].source] == 0;
  }

  bool op_enabled(const State& s, const ModelOp& op) const {
    if (s.cycle[op.id] >= 0) return false;
    if (op.kind == OpKind::Copy || op.kind == OpKind::Reload) {
      if (!st_.allow_optional || pointless_optional(s, op)) return false;
      if (op.kind == OpKind::Reload && s.cycle[copy_op_[m_.temps[op.defs[0]].source]] < 0) return false;
    }
    for (OpId p : mem_preds_[op.id]) {
      if (s.cycle[p] < 0) return false;
    }
    return true;
  }

  std::vector<std::vector<TempId>> operand_choices(const State& s, const ModelOp& op) const {
    std::vector<std::vector<TempId>> out;
    for (const auto& mo : op.operands) {
      std::vector<TempId> c;
      if (mo.literal) {
        c.push_back(-1);
      } else {
        for (TempId t : mo.alternatives) {
          if (!alive(s, t)) continue;
          if (mo.needs_slot ? m_.is_slot(s.reg[t]) : m_.is_hw(s.reg[t])) c.push_back(t);
        }
      }
      out.push_back(std::move(c));
    }
    return out;
  }

  std::vector<int> destinations(const State& s, const ModelOp& op, TempId t, int c) const {
    std::vector<int> preferred, rest;
    std::vector<int> allowed = m_.temps[t].domain;
    if (op.kind == OpKind::Body && is_binary(op.opcode) && m_.target.op(op.opcode).two_address) {
      std::vector<int> two;
      two.push_back(s.reg[s.sel[op.operands[0].id]]);
      if (is_commutative(op.opcode) && !op.operands[1].literal) two.push_back(s.reg[s.sel[op.operands[1].id]]);
      std::vector<int> keep;
      for (int r : allowed) {
        if (std::find(two.begin(), two.end(), r) != two.end()) keep.push_back(r);
      }
      allowed = keep;
    }
    const bool canon = m_.options.break_symmetry;
    const int nregs = m_.target.num_registers();
    for (int loc : allowed) {
      TempId u = s.occ[loc];
      if (u < 0) {
        if (canon && free_index_[loc] >= 0 && free_index_[loc] != s.free_used) continue;
        if (canon && loc >= nregs && loc - nregs != s.slots_used) continue;
        preferred.push_back(loc);
        continue;
      }
      if (s.le[u] > c) continue;
      if (s.pending[m_.temps[u].source] == 0) {
        preferred.push_back(loc);
      } else {
        rest.push_back(loc);
      }
    }
    preferred.insert(preferred.end(), rest.begin(), rest.end());
    return preferred;
  }

  void issue(const State& s, const ModelOp& op) {
    auto choices = operand_choices(s, op);
    for (const auto& c : choices) {
      if (c.empty()) return;
    }
    std::vector<size_t> idx(choices.size(), 0);
    while (true) {
      issue_with(s, op, choices, idx);
      if (done_ || stopped_) return;
      size_t k = 0;
      for (; k < idx.size(); ++k) {
        if (++idx[k] < choices[k].size()) break;
        idx[k] = 0;
      }
      if (k == idx.size()) return;
    }
  }

  void issue_with(const State& base, const ModelOp& op, const std::vector<std::vector<TempId>>& choices,
                  const std::vector<size_t>& idx) {
    State s = base;
    int ready = 0;
    for (size_t k = 0; k < op.operands.size(); ++k) {
      TempId t = choices[k][idx[k]];
      s.sel[op.operands[k].id] = t;
      if (t >= 0) ready = std::max(ready, completion(s, m_.temps[t].def_op));
    }
    for (OpId p : mem_preds_[op.id]) ready = std::max(ready, completion(s, p));
    const int c = std::max(s.last + 1, ready);
    for (size_t k = 0; k < op.operands.size(); ++k) {
      TempId t = s.sel[op.operands[k].id];
      if (t >= 0) s.le[t] = std::max(s.le[t], c);
    }
    if (op.mandatory) {
      for (const auto& mo : op.operands) {
        if (!mo.literal) --s.pending[value_of(mo)];
      }
    }
    if (op.kind == OpKind::Body) --s.body_left;
    s.cycle[op.id] = c;
    s.last = c;

    if (op.defs.empty()) {
      s.instr[op.id] = op.instrs.front();
      finish(s, op);
      return;
    }
    TempId t = op.defs[0];
    for (int loc : destinations(s, op, t, c)) {
      State n = s;
      Instr ins = op.kind == OpKind::Copy ? (m_.is_slot(loc) ? Instr::SpillStore : Instr::Move) : op.instrs.front();
      if (std::find(op.instrs.begin(), op.instrs.end(), ins) == op.instrs.end()) continue;
      n.instr[op.id] = ins;
      if (!register_write_ok(n, t, loc)) continue;
      if (n.occ[loc] < 0) {
        if (free_index_[loc] >= 0) ++n.free_used;
        if (m_.is_slot(loc)) ++n.slots_used;
      }
      n.reg[t] = loc;
      n.le[t] = c + 1;
      n.occ[loc] = t;
      finish(n, op);
      if (done_ || stopped_) return;
    }
  }

  void finish(State& s, const ModelOp& op) {
    if (m_.is_memory(op.id, s.instr[op.id])) {
      if (!memory_write_ok(s, op.id)) return;
      s.last_mem = op.id;
    }
    s.span = std::max(s.span, completion(s, op.id));
    if (!values_reachable(s)) return;
    dfs(s);
  }

  void dfs(const State& s) {
    if (done_ || out_of_budget()) return;
    if (st_.mode == Mode::Optimize && lower_bound(s) >= best_obj_) return;
    if (s.body_left == 0) {
      try_out(s);
      if (done_ || stopped_) return;
    }
    std::vector<OpId> cand;
    for (OpId o : body_ops_) {
      if (!op_enabled(s, m_.ops[o])) continue;
      cand.push_back(o);
      if (st_.source_order) break;
    }
    for (const auto& op : m_.ops) {
      if ((op.kind == OpKind::Copy || op.kind == OpKind::Reload) && op_enabled(s, op)) cand.push_back(op.id);
    }
    for (OpId o : cand) {
      issue(s, m_.ops[o]);
      if (done_ || stopped_) return;
    }
  }
};

double elapsed(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

// Hider sets that are empty for a mandatory secret write.
std::string trivially_infeasible(const ExtendedModel& m) {
  if (!m.secure) return "";
  for (const auto& [ts, hiders] : m.sets.spairs) {
    if (hiders.empty() && m.ops[m.temps[ts].def_op].mandatory) return "Spairs";
  }
  for (const auto& [os, hiders] : m.sets.mspairs) {
    if (hiders.empty() && m.ops[os].mandatory) return "Mspairs";
  }
  return "";
}

}  // namespace

std::string_view to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Optimal: return "optimal";
    case SolveStatus::Feasible: return "feasible";
    case SolveStatus::Infeasible: return "infeasible";
    case SolveStatus::Timeout: return "timeout";
  }
  return "?";
}

SolveOutcome solve(const ExtendedModel& m, const SolveBudget& budget) {
  auto t0 = Clock::now();
  SolveOutcome out;
  if (std::string g = trivially_infeasible(m); !g.empty()) {
    out.status = SolveStatus::Infeasible;
    out.infeasible_group = g;
    out.seconds = elapsed(t0);
    return out;
  }

  // A quick dive without copies usually yields a good incumbent.
  std::optional<Solution> incumbent;
  {
    Settings st;
    st.enforce = Enforce::from(m);
    st.allow_optional = false;
    SolveBudget b{budget.max_nodes / 10, budget.seconds / 10};
    Engine e(m, st, b);
    e.run();
    out.nodes += e.nodes();
    incumbent = e.best();
  }
  Settings st;
  st.enforce = Enforce::from(m);
  SolveBudget rest{budget.max_nodes - out.nodes, budget.seconds - elapsed(t0)};
  Engine e(m, st, rest);
  if (incumbent) e.set_incumbent(*incumbent);
  e.run();
  out.nodes += e.nodes();
  out.solution = e.best();
  if (e.exhausted()) {
    out.status = out.solution ? SolveStatus::Optimal : SolveStatus::Infeasible;
  } else {
    out.status = out.solution ? SolveStatus::Feasible : SolveStatus::Timeout;
  }

  if (out.status == SolveStatus::Infeasible && m.secure) {
    // Name the first group whose removal restores feasibility.
    const std::pair<const char*, bool Enforce::*> groups[] = {
        {"Spairs", &Enforce::spairs}, {"Rpairs", &Enforce::rpairs},
        {"Mspairs", &Enforce::mspairs}, {"Mmpairs", &Enforce::mmpairs}};
    for (const auto& [name, field] : groups) {
      Settings relax;
      relax.mode = Mode::First;
      relax.enforce = Enforce::from(m);
      relax.enforce.*field = false;
      Engine r(m, relax, SolveBudget{budget.max_nodes, std::max(0.0, budget.seconds - elapsed(t0))});
      r.run();
      out.nodes += r.nodes();
      if (r.best()) {
        out.infeasible_group = name;
        break;
      }
    }
    if (out.infeasible_group.empty()) out.infeasible_group = "base";
  }
  out.seconds = elapsed(t0);
  return out;
}

std::optional<std::vector<Solution>> enumerate(const ExtendedModel& m, std::size_t limit,
                                               const SolveBudget& budget) {
  Settings st;
  st.mode = Mode::Enumerate;
  st.enforce = Enforce::from(m);
  st.limit = limit;
  Engine e(m, st, budget);
  e.run();
  if (!e.exhausted()) return std::nullopt;
  return std::move(e.all());
}

std::optional<Solution> naive_solution(const ExtendedModel& m, const SolveBudget& budget) {
  for (bool optional : {false, true}) {
    Settings st;
    st.mode = Mode::First;
    st.source_order = true;
    st.allow_optional = optional;
    Engine e(m, st, budget);
    e.run();
    if (e.best()) return e.best();
  }
  return std::nullopt;
}

}  // namespace maskcg
