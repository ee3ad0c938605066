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

#include "maskcg/oracle.hpp"

#include <algorithm>
#include <map>
#include <sstream>

namespace maskcg {

namespace {

// Stages: activeness, copy instructions, operand temps, issue order and
// cycles, locations. Each stage only rejects assignments that already
// violate a constraint whose variables are all fixed; the full checker
// decides at the leaves.
class Generator {
 public:
  Generator(const ExtendedModel& m, BruteForce& out) : m_(m), out_(out) {
    for (const auto& op : m.ops) {
      if (op.is_pseudo()) continue;
      if (!op.mandatory) optional_.push_back(op.id);
      for (Instr i : op.instrs) max_lat_ = std::max(max_lat_, m.latency(op.id, i));
    }
    by_temp_.assign(m.num_temps(), {});
    by_op_.assign(m.num_ops(), {});
    for (size_t i = 0; i < m.constraints.size(); ++i) {
      const Constraint& c = m.constraints[i];
      switch (c.family) {
        case Family::NoOverlap:
          by_temp_[c.args[0]].push_back(i);
          by_temp_[c.args[1]].push_back(i);
          break;
        case Family::Location:
          by_temp_[c.args[0]].push_back(i);
          break;
        case Family::Precedence:
          by_op_[m.operand_owner(c.args[0])].push_back(i);
          break;
        case Family::MemoryOrder:
          by_op_[c.args[1]].push_back(i);
          break;
        case Family::Compact: case Family::TwoAddress: case Family::Instruction:
          by_op_[c.args[0]].push_back(i);
          break;
        case Family::Symmetry:
          symmetry_ = static_cast<int>(i);
          break;
        default:
          break;
      }
    }
  }

  void run() {
    const std::uint64_t subsets = 1ULL << optional_.size();
    for (std::uint64_t mask = 0; mask < subsets; ++mask) {
      s_ = empty_solution(m_);
      for (size_t k = 0; k < optional_.size(); ++k) s_.active[optional_[k]] = (mask >> k) & 1;
      for (const auto& op : m_.ops) {
        if (s_.active[op.id]) s_.instr[op.id] = op.instrs.front();
      }
      copies_.clear();
      for (const auto& op : m_.ops) {
        if (s_.active[op.id] && op.kind == OpKind::Copy) copies_.push_back(op.id);
      }
      choose_instr(0);
    }
  }

 private:
  const ExtendedModel& m_;
  BruteForce& out_;
  Solution s_;
  std::vector<OpId> optional_, copies_, order_;
  std::vector<std::vector<std::size_t>> by_temp_, by_op_;
  std::vector<TempId> to_place_;
  int symmetry_ = -1;
  int max_lat_ = 1;

  bool holds_all(const std::vector<std::size_t>& ids, Family f) const {
    for (std::size_t i : ids) {
      if (m_.constraints[i].family == f && !holds(m_, s_, m_.constraints[i])) return false;
    }
    return true;
  }

  void choose_instr(size_t k) {
    if (k == copies_.size()) {
      choose_sel(0);
      return;
    }
    for (Instr i : m_.ops[copies_[k]].instrs) {
      s_.instr[copies_[k]] = i;
      choose_instr(k + 1);
    }
  }

  void choose_sel(int p) {
    if (p == m_.num_operands) {
      std::vector<bool> placed(m_.num_ops(), false);
      placed[m_.in_op()] = true;
      int n = 0;
      for (OpId o = 0; o < m_.num_ops(); ++o) n += s_.active[o] && !m_.ops[o].is_pseudo();
      s_.cycle.assign(m_.num_ops(), -1);
      s_.cycle[m_.in_op()] = 0;
      schedule(placed, 0, n);
      return;
    }
    const ModelOperand& mo = m_.operand(p);
    if (!s_.active[m_.operand_owner(p)] || mo.literal) {
      s_.sel[p] = -1;
      choose_sel(p + 1);
      return;
    }
    for (TempId t : mo.alternatives) {
      if (!s_.active[m_.temps[t].def_op]) continue;
      s_.sel[p] = t;
      choose_sel(p + 1);
    }
    s_.sel[p] = -1;
  }

  bool placeable(OpId o, const std::vector<bool>& placed) const {
    for (const auto& mo : m_.ops[o].operands) {
      TempId t = s_.sel[mo.id];
      if (t >= 0 && !placed[m_.temps[t].def_op]) return false;
    }
    for (const auto& [a, b] : m_.memory_order) {
      if (b == o && !placed[a]) return false;
    }
    return true;
  }

  void schedule(std::vector<bool>& placed, int last, int left) {
    if (left == 0) {
      finish_schedule();
      return;
    }
    for (OpId o = 0; o < m_.num_ops(); ++o) {
      if (!s_.active[o] || placed[o] || m_.ops[o].is_pseudo() || !placeable(o, placed)) continue;
      for (int gap = 0; gap <= max_lat_; ++gap) {
        s_.cycle[o] = last + 1 + gap;
        if (holds_all(by_op_[o], Family::Precedence) && holds_all(by_op_[o], Family::MemoryOrder) &&
            holds_all(by_op_[o], Family::Compact)) {
          placed[o] = true;
          schedule(placed, s_.cycle[o], left - 1);
          placed[o] = false;
        }
      }
      s_.cycle[o] = -1;
    }
  }

  void finish_schedule() {
    int span = 0;
    for (OpId o = 0; o < m_.num_ops(); ++o) {
      if (s_.active[o] && !m_.ops[o].is_pseudo()) span = std::max(span, s_.cycle[o] + m_.latency(o, s_.instr[o]));
    }
    s_.cycle[m_.out_op()] = span;
    s_.objective = span;
    to_place_.clear();
    for (const auto& mt : m_.temps) {
      s_.reg[mt.id] = -1;
      s_.live[mt.id] = false;
      if (mt.kind == TempKind::Pseudo) {
        s_.reg[mt.id] = mt.domain.front();
        s_.ls[mt.id] = s_.le[mt.id] = 0;
        continue;
      }
      if (!s_.active[mt.def_op]) {
        s_.ls[mt.id] = s_.le[mt.id] = 0;
        continue;
      }
      s_.live[mt.id] = true;
      s_.ls[mt.id] = s_.cycle[mt.def_op];
      int end = s_.ls[mt.id] + 1;
      for (int p = 0; p < m_.num_operands; ++p) {
        if (s_.sel[p] == mt.id) end = std::max(end, s_.cycle[m_.operand_owner(p)]);
      }
      s_.le[mt.id] = end;
      if (mt.kind == TempKind::Input) {
        s_.reg[mt.id] = mt.domain.front();
      } else {
        to_place_.push_back(mt.id);
      }
    }
    std::sort(to_place_.begin(), to_place_.end(), [&](TempId a, TempId b) {
      return std::tie(s_.ls[a], a) < std::tie(s_.ls[b], b);
    });
    place(0);
  }

  bool placed_ok(TempId t) const {
    for (std::size_t i : by_temp_[t]) {
      const Constraint& c = m_.constraints[i];
      if (c.family == Family::NoOverlap) {
        TempId other = c.args[0] == t ? c.args[1] : c.args[0];
        if (s_.reg[other] < 0) continue;
      }
      if (!holds(m_, s_, c)) return false;
    }
    OpId d = m_.temps[t].def_op;
    if (!holds_all(by_op_[d], Family::Instruction) || !holds_all(by_op_[d], Family::TwoAddress)) return false;
    return symmetry_ < 0 || holds(m_, s_, m_.constraints[symmetry_]);
  }

  void place(size_t k) {
    if (k == to_place_.size()) {
      Solution cand = s_;
      derive(m_, cand);
      ++out_.candidates;
      if (check(m_, cand).empty()) out_.solutions.push_back(std::move(cand));
      return;
    }
    TempId t = to_place_[k];
    for (int loc : m_.temps[t].domain) {
      s_.reg[t] = loc;
      if (placed_ok(t)) place(k + 1);
    }
    s_.reg[t] = -1;
  }
};

std::string pair_text(const ExtendedModel& m, std::pair<int, int> p, bool ops) {
  if (ops) return m.ops[p.first].name() + "," + m.ops[p.second].name();
  return m.temps[p.first].name + "," + m.temps[p.second].name;
}

template <typename Set>
std::string diff_text(const ExtendedModel& m, const Set& a, const Set& b, bool ops) {
  std::ostringstream os;
  for (const auto& x : a) {
    if (!b.count(x)) os << " +(" << pair_text(m, x, ops) << ")";
  }
  for (const auto& x : b) {
    if (!a.count(x)) os << " -(" << pair_text(m, x, ops) << ")";
  }
  return os.str();
}

std::optional<int> optimum_of(const std::vector<Solution>& sols) {
  std::optional<int> best;
  for (const auto& s : sols) {
    if (!best || s.objective < *best) best = s.objective;
  }
  return best;
}

}  // namespace

int count_ops(const ExtendedModel& m) {
  int n = 0;
  for (const auto& op : m.ops) n += !op.is_pseudo();
  return n;
}

BruteForce brute_force(const ExtendedModel& m, int bound) {
  int n = count_ops(m);
  if (n > bound) {
    throw OracleError("model has " + std::to_string(n) + " operations, above the oracle bound " +
                      std::to_string(bound));
  }
  BruteForce out;
  Generator g(m, out);
  g.run();
  std::sort(out.solutions.begin(), out.solutions.end());
  out.optimum = optimum_of(out.solutions);
  return out;
}

std::set<std::pair<TempId, TempId>> trace_subseq(const ExtendedModel& m, const Solution& s) {
  std::set<std::pair<TempId, TempId>> out;
  std::map<int, TempId> last;
  for (OpId o : linearize(m, s)) {
    const ModelOp& op = m.ops[o];
    if (op.kind == OpKind::Out) continue;
    for (TempId t : op.defs) {
      int loc = s.reg[t];
      auto it = last.find(loc);
      if (it != last.end()) out.insert({it->second, t});
      last[loc] = t;
    }
  }
  return out;
}

std::set<std::pair<OpId, OpId>> trace_msubseq(const ExtendedModel& m, const Solution& s) {
  std::set<std::pair<OpId, OpId>> out;
  OpId prev = -1;
  for (OpId o : linearize(m, s)) {
    if (!m.is_memory(o, s.instr[o])) continue;
    if (prev >= 0) out.insert({prev, o});
    prev = o;
  }
  return out;
}

std::set<std::pair<TempId, TempId>> predicate_subseq(const ExtendedModel& m, const Solution& s) {
  std::set<std::pair<TempId, TempId>> out;
  for (TempId a = 0; a < m.num_temps(); ++a) {
    for (TempId b = 0; b < m.num_temps(); ++b) {
      if (a != b && subseq(m, s, a, b)) out.insert({a, b});
    }
  }
  return out;
}

std::set<std::pair<OpId, OpId>> predicate_msubseq(const ExtendedModel& m, const Solution& s) {
  std::set<std::pair<OpId, OpId>> out;
  for (OpId a = 0; a < m.num_ops(); ++a) {
    for (OpId b = 0; b < m.num_ops(); ++b) {
      if (a != b && msubseq(m, s, a, b)) out.insert({a, b});
    }
  }
  return out;
}

OracleReport cross_check(const Program& p, const TargetDesc& t, const ModelOptions& options, int bound,
                         const SolveBudget& budget) {
  OracleReport r;
  r.program = p.name;
  r.target = t.name;
  ExtendedModel base = build_model(p, t, false, false, options);
  ExtendedModel secure = build_model(p, t, true, true, options);
  ExtendedModel plain = build_model(p, t, true, false, options);
  r.ops = count_ops(base);
  auto add = [&](std::string kind, std::string detail) { r.discrepancies.push_back({std::move(kind), std::move(detail)}); };

  BruteForce bf_base = brute_force(base, bound);
  BruteForce bf_secure = brute_force(secure, bound);
  BruteForce bf_plain = brute_force(plain, bound);
  r.insecure_optimum = bf_base.optimum;
  r.secure_optimum = bf_secure.optimum;
  r.insecure_solutions = bf_base.solutions.size();
  r.secure_solutions = bf_secure.solutions.size();

  auto compare_enumeration = [&](const ExtendedModel& m, const BruteForce& bf, const std::string& label) {
    auto en = enumerate(m, SIZE_MAX, budget);
    if (!en) {
      add("enumeration", label + ": enumeration ran out of budget");
      return;
    }
    std::sort(en->begin(), en->end());
    if (*en != bf.solutions) {
      add("enumeration", label + ": solver enumerates " + std::to_string(en->size()) + " solutions, oracle " +
                             std::to_string(bf.solutions.size()));
    }
  };
  compare_enumeration(base, bf_base, "base");
  compare_enumeration(secure, bf_secure, "secure");

  auto compare_optimum = [&](const ExtendedModel& m, const BruteForce& bf, const std::string& label,
                             std::optional<int>& solver_obj) {
    SolveOutcome o = solve(m, budget);
    if (o.solution) {
      solver_obj = o.solution->objective;
      if (auto v = check(m, *o.solution); !v.empty()) add("soundness", label + ": solver solution violates " + v.front().message);
    }
    if (!bf.optimum) {
      if (o.status != SolveStatus::Infeasible) add("optimum", label + ": oracle finds no solution, solver reports " + std::string(to_string(o.status)));
      return;
    }
    if (o.status != SolveStatus::Optimal || !o.solution || o.solution->objective != *bf.optimum) {
      add("optimum", label + ": oracle optimum " + std::to_string(*bf.optimum) + ", solver " +
                         std::string(to_string(o.status)) +
                         (o.solution ? " " + std::to_string(o.solution->objective) : std::string()));
    }
  };
  compare_optimum(base, bf_base, "base", r.solver_insecure);
  compare_optimum(secure, bf_secure, "secure", r.solver_secure);

  if (bf_secure.solutions != bf_plain.solutions) {
    add("implied", "implied constraints change the secure solution set (" + std::to_string(bf_secure.solutions.size()) +
                       " vs " + std::to_string(bf_plain.solutions.size()) + ")");
  }
  for (const auto& s : bf_secure.solutions) {
    if (!std::binary_search(bf_base.solutions.begin(), bf_base.solutions.end(), s)) {
      add("subset", "secure solution missing from the base model");
      break;
    }
  }
  for (const auto& s : bf_base.solutions) {
    ++r.solutions_checked;
    auto ts = trace_subseq(base, s);
    auto ps = predicate_subseq(base, s);
    if (ts != ps) add("subseq", diff_text(base, ts, ps, false));
    auto tm = trace_msubseq(base, s);
    auto pm = predicate_msubseq(base, s);
    if (tm != pm) add("msubseq", diff_text(base, tm, pm, true));
  }
  return r;
}

}  // namespace maskcg
