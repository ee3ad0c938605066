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

#include "maskcg/model.hpp"

#include <algorithm>
#include <climits>
#include <sstream>
#include <tuple>

namespace maskcg {

namespace {

constexpr int kNoUse = INT_MAX;

bool is_nonpseudo_active(const ExtendedModel& m, const Solution& s, OpId o) {
  return s.active[o] && !m.ops[o].is_pseudo();
}

int completion(const ExtendedModel& m, const Solution& s, OpId o) {
  return s.cycle[o] + m.latency(o, s.instr[o]);
}

int first_use(const ExtendedModel& m, const Solution& s, int loc) {
  int best = kNoUse;
  for (TempId t = 0; t < m.num_temps(); ++t) {
    if (s.live[t] && s.reg[t] == loc) best = std::min(best, s.ls[t]);
  }
  return best;
}

bool ordered_first_uses(const ExtendedModel& m, const Solution& s, const std::vector<int>& locs) {
  for (size_t j = 1; j < locs.size(); ++j) {
    int cur = first_use(m, s, locs[j]);
    if (cur == kNoUse) continue;
    if (first_use(m, s, locs[j - 1]) >= cur) return false;
  }
  return true;
}

std::vector<int> slot_locations(const ExtendedModel& m) {
  std::vector<int> out;
  for (int i = 0; i < m.target.stack_slots; ++i) out.push_back(m.target.num_registers() + i);
  return out;
}

}  // namespace

std::string_view to_string(Instr i) {
  switch (i) {
    case Instr::None: return "-";
    case Instr::Pseudo: return "pseudo";
    case Instr::Alu: return "alu";
    case Instr::Move: return "move";
    case Instr::SpillStore: return "spill_store";
    case Instr::SpillLoad: return "spill_load";
    case Instr::Load: return "load";
    case Instr::Store: return "store";
  }
  return "?";
}

std::string_view to_string(Tag t) {
  switch (t) {
    case Tag::Base: return "base";
    case Tag::Security: return "security";
    case Tag::Implied: return "implied";
  }
  return "?";
}

std::string_view to_string(Family f) {
  switch (f) {
    case Family::Mandatory: return "mandatory";
    case Family::Instruction: return "instruction";
    case Family::Operand: return "operand";
    case Family::Location: return "location";
    case Family::Preassign: return "preassign";
    case Family::Liveness: return "liveness";
    case Family::LiveStart: return "live_start";
    case Family::LiveEnd: return "live_end";
    case Family::Precedence: return "precedence";
    case Family::MemoryOrder: return "memory_order";
    case Family::SingleIssue: return "single_issue";
    case Family::Compact: return "compact";
    case Family::Makespan: return "makespan";
    case Family::NoOverlap: return "no_overlap";
    case Family::TwoAddress: return "two_address";
    case Family::Symmetry: return "symmetry";
    case Family::Rpairs: return "rpairs";
    case Family::SpairsPre: return "spairs_pre";
    case Family::SpairsPost: return "spairs_post";
    case Family::Entry: return "entry";
    case Family::Mmpairs: return "mmpairs";
    case Family::MspairsPre: return "mspairs_pre";
    case Family::MspairsPost: return "mspairs_post";
    case Family::Accumulator: return "accumulator";
    case Family::Interposition: return "interposition";
  }
  return "?";
}

Tag tag_of(Family f) {
  switch (f) {
    case Family::Rpairs: case Family::SpairsPre: case Family::SpairsPost: case Family::Entry:
    case Family::Mmpairs: case Family::MspairsPre: case Family::MspairsPost:
      return Tag::Security;
    case Family::Accumulator: case Family::Interposition:
      return Tag::Implied;
    default:
      return Tag::Base;
  }
}

std::string_view family_group(Family f) {
  switch (f) {
    case Family::Rpairs: return "Rpairs";
    case Family::SpairsPre: case Family::SpairsPost: case Family::Entry: return "Spairs";
    case Family::Mmpairs: return "Mmpairs";
    case Family::MspairsPre: case Family::MspairsPost: return "Mspairs";
    default: return to_string(f);
  }
}

bool Solution::operator<(const Solution& o) const {
  return std::tie(objective, active, cycle, reg, sel) <
         std::tie(o.objective, o.active, o.cycle, o.reg, o.sel);
}

OpId ExtendedModel::out_op() const {
  for (const auto& op : ops) {
    if (op.kind == OpKind::Out) return op.id;
  }
  return -1;
}

const ModelOperand& ExtendedModel::operand(int id) const {
  return ops.at(operand_owner_.at(id)).operands.at(operand_slot_.at(id));
}

OpId ExtendedModel::operand_owner(int id) const { return operand_owner_.at(id); }

std::optional<TempId> ExtendedModel::find_temp(std::string_view name) const {
  for (const auto& t : temps) {
    if (t.name == name) return t.id;
  }
  return std::nullopt;
}

std::optional<OpId> ExtendedModel::find_op(std::string_view name) const {
  for (const auto& o : ops) {
    if (o.name() == name) return o.id;
  }
  return std::nullopt;
}

int ExtendedModel::latency(OpId o, Instr i) const {
  switch (i) {
    case Instr::None: case Instr::Pseudo: return 0;
    case Instr::Alu: return target.op(ops[o].opcode).latency;
    case Instr::Move: return target.copy_latency;
    case Instr::SpillStore: case Instr::Store: return target.op(Opcode::Store).latency;
    case Instr::SpillLoad: case Instr::Load: return target.op(Opcode::Load).latency;
  }
  return 0;
}

bool ExtendedModel::is_memory(OpId, Instr i) const {
  return i == Instr::SpillStore || i == Instr::SpillLoad || i == Instr::Load ||
         i == Instr::Store;
}

ExtendedModel build_base_model(const Program& p, const TargetDesc& t, const ModelOptions& options) {
  if (auto d = validate(p); !d.empty()) throw ModelError("invalid program: " + d.front().message);
  if (p.inputs.size() > t.args.size()) {
    throw ModelError("calling convention: " + std::to_string(p.inputs.size()) +
                     " inputs but target " + t.name + " has " + std::to_string(t.args.size()) +
                     " argument registers");
  }
  if (p.outputs.size() > t.results.size()) {
    throw ModelError("calling convention: " + std::to_string(p.outputs.size()) +
                     " outputs but target " + t.name + " has " +
                     std::to_string(t.results.size()) + " result registers");
  }
  for (const auto& op : p.body) {
    if (!t.supports(op.opcode)) {
      throw ModelError("target " + t.name + " has no " + std::string(to_string(op.opcode)));
    }
  }

  ExtendedModel m;
  m.program = p;
  m.target = t;
  m.options = options;
  const bool copies = options.register_copies || options.spills;
  const int nregs = t.num_registers();
  std::vector<int> hw;
  for (int r = 0; r < nregs; ++r) hw.push_back(r);
  std::vector<int> copy_domain;
  if (options.register_copies) copy_domain = hw;
  if (options.spills) {
    for (int s = 0; s < t.stack_slots; ++s) copy_domain.push_back(nregs + s);
  }
  if (copies && copy_domain.empty()) throw ModelError("copies need registers or stack slots");

  m.members.assign(p.num_temps(), {});
  auto add_temp = [&](TempKind kind, TempId source, OpId def, std::vector<int> domain) {
    ModelTemp mt;
    mt.id = m.num_temps();
    mt.name = "t" + std::to_string(mt.id);
    mt.kind = kind;
    mt.source = source;
    mt.def_op = def;
    mt.domain = std::move(domain);
    m.temps.push_back(mt);
    if (kind != TempKind::Pseudo) m.members[source].push_back(mt.id);
    return mt.id;
  };
  auto add_op = [&](OpKind kind, Opcode opc, bool mandatory, std::vector<Instr> ins) -> ModelOp& {
    ModelOp op;
    op.id = m.num_ops();
    op.kind = kind;
    op.opcode = opc;
    op.mandatory = mandatory;
    op.instrs = std::move(ins);
    m.ops.push_back(std::move(op));
    return m.ops.back();
  };
  std::vector<Instr> copy_instrs;
  if (options.register_copies) copy_instrs.push_back(Instr::Move);
  if (options.spills) copy_instrs.push_back(Instr::SpillStore);

  // Operands refer to value classes until every temp exists.
  struct PendingOperand {
    OpId op;
    size_t index;
    TempId value;  // program temp, or -1 for fixed alternatives
  };
  std::vector<PendingOperand> pending;
  std::vector<TempId> copy_of(p.num_temps(), -1);

  for (const auto& n : options.copy_values) {
    if (!p.find_temp(n)) throw ModelError("copy_values: unknown temp " + n);
  }
  auto add_copy = [&](TempId value) {
    if (!copies) return;
    if (!options.copy_values.empty() &&
        std::find(options.copy_values.begin(), options.copy_values.end(), p.temp_names[value]) ==
            options.copy_values.end()) {
      return;
    }
    ModelOp& op = add_op(OpKind::Copy, Opcode::Copy, false, copy_instrs);
    ModelOperand src;
    src.alternatives = {m.members[value].front()};
    op.operands.push_back(src);
    OpId id = op.id;
    TempId ct = add_temp(TempKind::Copy, value, id, copy_domain);
    m.ops[id].defs.push_back(ct);
    copy_of[value] = ct;
  };

  {
    ModelOp& in = add_op(OpKind::In, Opcode::In, true, {Instr::Pseudo});
    OpId id = in.id;
    for (size_t i = 0; i < p.inputs.size(); ++i) {
      TempId tt = add_temp(TempKind::Input, p.inputs[i].temp, id, {t.args[i]});
      m.ops[id].defs.push_back(tt);
    }
  }
  for (const auto& in : p.inputs) add_copy(in.temp);
  for (size_t bi = 0; bi < p.body.size(); ++bi) {
    const IrOperation& src = p.body[bi];
    Instr ins = src.opcode == Opcode::Load ? Instr::Load
                : src.opcode == Opcode::Store ? Instr::Store : Instr::Alu;
    ModelOp& op = add_op(OpKind::Body, src.opcode, true, {ins});
    op.body_index = static_cast<int>(bi);
    OpId id = op.id;
    for (size_t k = 0; k < src.uses.size(); ++k) {
      ModelOperand mo;
      if (!src.uses[k].is_temp()) {
        mo.literal = true;
        mo.value = src.uses[k].value;
      } else {
        pending.push_back({id, k, src.uses[k].temp});
      }
      m.ops[id].operands.push_back(mo);
    }
    if (src.def) {
      TempId dt = add_temp(TempKind::Def, *src.def, id, hw);
      m.ops[id].defs.push_back(dt);
      add_copy(*src.def);
    }
  }
  {
    ModelOp& out = add_op(OpKind::Out, Opcode::Out, true, {Instr::Pseudo});
    OpId id = out.id;
    for (size_t i = 0; i < p.outputs.size(); ++i) {
      m.ops[id].operands.push_back(ModelOperand{});
      pending.push_back({id, i, p.outputs[i]});
      TempId pt = add_temp(TempKind::Pseudo, p.outputs[i], id, {t.results[i]});
      m.ops[id].defs.push_back(pt);
    }
  }
  if (options.spills) {
    for (TempId v = 0; v < p.num_temps(); ++v) {
      if (copy_of[v] < 0) continue;
      ModelOp& op = add_op(OpKind::Reload, Opcode::Load, false, {Instr::SpillLoad});
      ModelOperand src;
      src.alternatives = {copy_of[v]};
      src.needs_slot = true;
      op.operands.push_back(src);
      OpId id = op.id;
      TempId rt = add_temp(TempKind::Reload, v, id, hw);
      m.ops[id].defs.push_back(rt);
    }
  }
  for (const auto& pd : pending) m.ops[pd.op].operands[pd.index].alternatives = m.members[pd.value];
  for (auto& op : m.ops) {
    for (size_t k = 0; k < op.operands.size(); ++k) {
      op.operands[k].id = m.num_operands++;
      m.operand_owner_.push_back(op.id);
      m.operand_slot_.push_back(static_cast<int>(k));
    }
  }

  std::vector<TempInfo> infos;
  for (const auto& mt : m.temps) infos.push_back({mt.name, mt.kind, mt.source});
  m.types = infer_types(p, infos);

  std::vector<OpId> source_mem;
  for (const auto& op : m.ops) {
    if (op.kind == OpKind::Copy && options.spills) m.memops.push_back({op.id, op.defs[0]});
    if (op.kind == OpKind::Reload) m.memops.push_back({op.id, op.defs[0]});
    if (op.kind == OpKind::Body && op.opcode == Opcode::Load) {
      m.memops.push_back({op.id, op.defs[0]});
      source_mem.push_back(op.id);
    }
    if (op.kind == OpKind::Body && op.opcode == Opcode::Store) {
      m.memops.push_back({op.id, op.operands[1].alternatives.front()});
      source_mem.push_back(op.id);
    }
  }
  std::sort(m.memops.begin(), m.memops.end(), [](const MemOp& a, const MemOp& b) { return a.op < b.op; });
  for (size_t i = 0; i < source_mem.size(); ++i) {
    for (size_t j = i + 1; j < source_mem.size(); ++j) {
      const auto& a = p.body[m.ops[source_mem[i]].body_index];
      const auto& b = p.body[m.ops[source_mem[j]].body_index];
      if ((a.opcode == Opcode::Store || b.opcode == Opcode::Store) && may_alias(a.uses[0], b.uses[0])) {
        m.memory_order.push_back({source_mem[i], source_mem[j]});
      }
    }
  }
  for (int r = 0; r < nregs; ++r) {
    bool holds_input = false;
    for (size_t i = 0; i < p.inputs.size(); ++i) holds_input |= t.args[i] == r;
    bool is_result = std::find(t.results.begin(), t.results.end(), r) != t.results.end();
    if (!holds_input && !is_result) m.free_registers.push_back(r);
  }

  m.maxc = kFirstCycle;
  for (const auto& op : m.ops) {
    if (op.is_pseudo()) continue;
    int lat = 0;
    for (Instr i : op.instrs) lat = std::max(lat, m.latency(op.id, i));
    m.maxc += lat + (op.mandatory ? 0 : 1);
  }

  auto& cs = m.constraints;
  for (const auto& op : m.ops) {
    if (op.mandatory) cs.push_back({Family::Mandatory, {op.id}});
    cs.push_back({Family::Instruction, {op.id}});
    if (!op.is_pseudo()) cs.push_back({Family::Compact, {op.id}});
    for (const auto& mo : op.operands) {
      cs.push_back({Family::Operand, {mo.id}});
      if (!mo.literal) cs.push_back({Family::Precedence, {mo.id}});
    }
    if (op.kind == OpKind::Body && is_binary(op.opcode) && t.op(op.opcode).two_address) {
      cs.push_back({Family::TwoAddress, {op.id}});
    }
  }
  OpId out = m.out_op();
  for (size_t i = 0; i < m.ops[out].operands.size(); ++i) {
    cs.push_back({Family::Preassign, {1, m.ops[out].operands[i].id, t.results[i]}});
  }
  for (const auto& mt : m.temps) {
    cs.push_back({Family::Location, {mt.id}});
    if (mt.kind == TempKind::Input) cs.push_back({Family::Preassign, {0, mt.id}});
    if (mt.kind == TempKind::Pseudo) continue;
    cs.push_back({Family::Liveness, {mt.id}});
    cs.push_back({Family::LiveStart, {mt.id}});
    cs.push_back({Family::LiveEnd, {mt.id}});
  }
  for (const auto& [a, b] : m.memory_order) cs.push_back({Family::MemoryOrder, {a, b}});
  cs.push_back({Family::SingleIssue, {}});
  cs.push_back({Family::Makespan, {}});
  for (TempId a = 0; a < m.num_temps(); ++a) {
    if (m.temps[a].kind == TempKind::Pseudo) continue;
    for (TempId b = a + 1; b < m.num_temps(); ++b) {
      if (m.temps[b].kind == TempKind::Pseudo) continue;
      const auto& da = m.temps[a].domain;
      const auto& db = m.temps[b].domain;
      bool shared = std::any_of(da.begin(), da.end(), [&](int r) {
        return std::find(db.begin(), db.end(), r) != db.end();
      });
      if (shared) cs.push_back({Family::NoOverlap, {a, b}});
    }
  }
  if (options.break_symmetry) cs.push_back({Family::Symmetry, {}});
  return m;
}

std::vector<MemOp> select_memops(const ExtendedModel& m, const std::vector<std::string>& names) {
  if (names.empty()) return m.memops;
  std::vector<MemOp> out;
  for (const auto& n : names) {
    auto id = m.find_op(n);
    if (!id) throw ModelError("unknown operation " + n);
    const ModelOp& op = m.ops[*id];
    if (op.kind == OpKind::Copy) {
      out.push_back({op.id, op.defs[0]});
      continue;
    }
    auto it = std::find_if(m.memops.begin(), m.memops.end(), [&](const MemOp& x) { return x.op == op.id; });
    if (it == m.memops.end()) throw ModelError(n + " is not a potential memory operation");
    out.push_back(*it);
  }
  return out;
}

ExtendedModel add_security_constraints(ExtendedModel m, const SecuritySets& s) {
  m.sets = s;
  m.secure = true;
  auto& cs = m.constraints;
  for (const auto& [a, b] : s.rpairs) cs.push_back({Family::Rpairs, {a, b}});
  for (const auto& [ts, hiders] : s.spairs) {
    cs.push_back({Family::SpairsPre, {ts}});
    cs.push_back({Family::SpairsPost, {ts}});
  }
  for (const auto& [ts, next] : s.entry) cs.push_back({Family::Entry, {ts}});
  for (const auto& [a, b] : s.mmpairs) cs.push_back({Family::Mmpairs, {a, b}});
  for (const auto& [os, hiders] : s.mspairs) {
    cs.push_back({Family::MspairsPre, {os}});
    cs.push_back({Family::MspairsPost, {os}});
  }
  return m;
}

ExtendedModel add_implied_constraints(ExtendedModel m, const SecuritySets& s) {
  m.implied = true;
  auto& cs = m.constraints;
  for (const auto& [a, b] : s.rpairs) {
    for (auto [t1, t2] : {std::pair{a, b}, std::pair{b, a}}) {
      OpId o = m.temps[t1].def_op;
      for (const auto& mo : m.ops[o].operands) {
        if (std::find(mo.alternatives.begin(), mo.alternatives.end(), t2) != mo.alternatives.end()) {
          cs.push_back({Family::Accumulator, {t1, t2, mo.id}});
        }
      }
    }
    if (m.temps[a].kind == TempKind::Input && m.temps[b].kind == TempKind::Input) {
      cs.push_back({Family::Interposition, {a, b}});
    }
  }
  return m;
}

ExtendedModel build_model(const Program& p, const TargetDesc& t, bool secure, bool implied,
                          const ModelOptions& options) {
  ExtendedModel m = build_base_model(p, t, options);
  SecuritySets sets = compute_security_sets(m.types, m.memops);
  if (secure) {
    m = add_security_constraints(std::move(m), sets);
    if (implied) m = add_implied_constraints(std::move(m), sets);
  } else {
    m.sets = sets;
  }
  return m;
}

bool samereg(const ExtendedModel&, const Solution& s, TempId t1, TempId t2) {
  return s.live[t1] && s.live[t2] && s.reg[t1] == s.reg[t2];
}

bool is_before(const ExtendedModel& m, const Solution& s, TempId t1, TempId t2) {
  return samereg(m, s, t1, t2) && s.le[t1] <= s.ls[t2];
}

int lk(const ExtendedModel& m, const Solution& s, TempId t) {
  int best = -1;
  for (TempId u = 0; u < m.num_temps(); ++u) {
    if (is_before(m, s, u, t)) best = std::max(best, s.le[u]);
  }
  return best;
}

bool subseq(const ExtendedModel& m, const Solution& s, TempId t1, TempId t2) {
  return samereg(m, s, t1, t2) && lk(m, s, t2) == s.le[t1];
}

bool mem_active(const ExtendedModel& m, const Solution& s, OpId o) {
  return s.active[o] && m.is_memory(o, s.instr[o]);
}

bool is_before_mem(const ExtendedModel& m, const Solution& s, OpId o1, OpId o2) {
  return o1 != o2 && mem_active(m, s, o1) && s.cycle[o1] <= s.cycle[o2];
}

int ok(const ExtendedModel& m, const Solution& s, OpId o) {
  int best = -1;
  for (OpId u = 0; u < m.num_ops(); ++u) {
    if (is_before_mem(m, s, u, o)) best = std::max(best, s.cycle[u]);
  }
  return best;
}

bool msubseq(const ExtendedModel& m, const Solution& s, OpId o1, OpId o2) {
  return mem_active(m, s, o1) && mem_active(m, s, o2) && ok(m, s, o2) == s.cycle[o1];
}

bool holds(const ExtendedModel& m, const Solution& s, const Constraint& c) {
  const auto& a = c.args;
  switch (c.family) {
    case Family::Mandatory:
      return s.active[a[0]];
    case Family::Instruction: {
      const ModelOp& op = m.ops[a[0]];
      if (!s.active[a[0]]) return s.instr[a[0]] == Instr::None && s.cycle[a[0]] == -1;
      if (std::find(op.instrs.begin(), op.instrs.end(), s.instr[a[0]]) == op.instrs.end()) return false;
      if (op.kind == OpKind::Copy) {
        bool slot = m.is_slot(s.reg[op.defs[0]]);
        return slot == (s.instr[a[0]] == Instr::SpillStore);
      }
      return true;
    }
    case Family::Operand: {
      OpId o = m.operand_owner(a[0]);
      const ModelOperand& mo = m.operand(a[0]);
      TempId sel = s.sel[a[0]];
      if (!s.active[o] || mo.literal) return sel == -1;
      if (std::find(mo.alternatives.begin(), mo.alternatives.end(), sel) == mo.alternatives.end()) return false;
      if (!s.active[m.temps[sel].def_op]) return false;
      return mo.needs_slot ? m.is_slot(s.reg[sel]) : m.is_hw(s.reg[sel]);
    }
    case Family::Location: {
      const ModelTemp& mt = m.temps[a[0]];
      if (mt.kind == TempKind::Pseudo) return s.reg[a[0]] == mt.domain.front();
      if (!s.live[a[0]]) return s.reg[a[0]] == -1;
      return std::find(mt.domain.begin(), mt.domain.end(), s.reg[a[0]]) != mt.domain.end();
    }
    case Family::Preassign:
      if (a[0] == 0) return s.reg[a[1]] == m.temps[a[1]].domain.front();
      return s.sel[a[1]] >= 0 && s.reg[s.sel[a[1]]] == a[2];
    case Family::Liveness:
      return s.live[a[0]] == static_cast<bool>(s.active[m.temps[a[0]].def_op]);
    case Family::LiveStart:
      return !s.live[a[0]] || s.ls[a[0]] == s.cycle[m.temps[a[0]].def_op];
    case Family::LiveEnd: {
      if (!s.live[a[0]]) return true;
      int end = s.ls[a[0]] + 1;
      for (int p = 0; p < m.num_operands; ++p) {
        if (s.sel[p] == a[0] && s.active[m.operand_owner(p)]) {
          end = std::max(end, s.cycle[m.operand_owner(p)]);
        }
      }
      return s.le[a[0]] == end;
    }
    case Family::Precedence: {
      OpId o = m.operand_owner(a[0]);
      TempId sel = s.sel[a[0]];
      if (!s.active[o] || sel < 0) return true;
      OpId d = m.temps[sel].def_op;
      return s.active[d] && completion(m, s, d) <= s.cycle[o];
    }
    case Family::MemoryOrder:
      return completion(m, s, a[0]) <= s.cycle[a[1]];
    case Family::SingleIssue: {
      std::vector<int> cycles;
      for (OpId o = 0; o < m.num_ops(); ++o) {
        if (!is_nonpseudo_active(m, s, o)) continue;
        if (s.cycle[o] < kFirstCycle || s.cycle[o] > m.maxc) return false;
        cycles.push_back(s.cycle[o]);
      }
      std::sort(cycles.begin(), cycles.end());
      return std::adjacent_find(cycles.begin(), cycles.end()) == cycles.end() &&
             s.cycle[m.in_op()] == 0;
    }
    case Family::Compact: {
      OpId o = a[0];
      if (!s.active[o]) return true;
      int c = s.cycle[o];
      if (c == kFirstCycle) return true;
      for (OpId u = 0; u < m.num_ops(); ++u) {
        if (is_nonpseudo_active(m, s, u) && s.cycle[u] == c - 1) return true;
      }
      for (const auto& mo : m.ops[o].operands) {
        TempId sel = s.sel[mo.id];
        if (sel >= 0 && completion(m, s, m.temps[sel].def_op) == c) return true;
      }
      for (const auto& [x, y] : m.memory_order) {
        if (y == o && completion(m, s, x) == c) return true;
      }
      return false;
    }
    case Family::Makespan: {
      int span = 0;
      for (OpId o = 0; o < m.num_ops(); ++o) {
        if (is_nonpseudo_active(m, s, o)) span = std::max(span, completion(m, s, o));
      }
      return s.cycle[m.out_op()] == span && s.objective == span;
    }
    case Family::NoOverlap: {
      TempId x = a[0], y = a[1];
      if (!samereg(m, s, x, y)) return true;
      return s.ls[x] >= s.le[y] || s.ls[y] >= s.le[x];
    }
    case Family::TwoAddress: {
      OpId o = a[0];
      if (!s.active[o]) return true;
      const ModelOp& op = m.ops[o];
      int d = s.reg[op.defs[0]];
      if (s.sel[op.operands[0].id] < 0) return false;
      if (s.reg[s.sel[op.operands[0].id]] == d) return true;
      return !op.operands[1].literal && is_commutative(op.opcode) &&
             s.sel[op.operands[1].id] >= 0 && s.reg[s.sel[op.operands[1].id]] == d;
    }
    case Family::Symmetry:
      return ordered_first_uses(m, s, m.free_registers) &&
             ordered_first_uses(m, s, slot_locations(m));
    case Family::Rpairs: {
      TempId x = a[0], y = a[1];
      if (!samereg(m, s, x, y) || !m.is_hw(s.reg[x])) return true;
      return !subseq(m, s, x, y) && !subseq(m, s, y, x);
    }
    case Family::SpairsPre:
    case Family::SpairsPost: {
      TempId ts = a[0];
      if (!s.live[ts] || !m.is_hw(s.reg[ts])) return true;
      for (TempId tr : m.sets.spairs.at(ts)) {
        bool ok_pair = c.family == Family::SpairsPre ? subseq(m, s, tr, ts) : subseq(m, s, ts, tr);
        if (s.live[tr] && ok_pair) return true;
      }
      return false;
    }
    case Family::Entry: {
      TempId ts = a[0];
      if (!s.live[ts] || !m.is_hw(s.reg[ts])) return true;
      const auto& allowed = m.sets.entry.at(ts);
      for (TempId t = 0; t < m.num_temps(); ++t) {
        if (subseq(m, s, ts, t) && !allowed.count(t)) return false;
      }
      return true;
    }
    case Family::Mmpairs: {
      if (!mem_active(m, s, a[0]) || !mem_active(m, s, a[1])) return true;
      return !msubseq(m, s, a[0], a[1]) && !msubseq(m, s, a[1], a[0]);
    }
    case Family::MspairsPre:
    case Family::MspairsPost: {
      OpId os = a[0];
      if (!mem_active(m, s, os)) return true;
      for (OpId orr : m.sets.mspairs.at(os)) {
        bool ok_pair = c.family == Family::MspairsPre ? msubseq(m, s, orr, os) : msubseq(m, s, os, orr);
        if (ok_pair) return true;
      }
      return false;
    }
    case Family::Accumulator: {
      TempId t1 = a[0], t2 = a[1];
      OpId o = m.temps[t1].def_op;
      if (!s.active[o] || s.sel[a[2]] != t2) return true;
      return !samereg(m, s, t1, t2);
    }
    case Family::Interposition: {
      TempId t1 = a[0], t2 = a[1];
      if (!samereg(m, s, t1, t2)) return true;
      auto has_neighbour = [&](TempId x) {
        for (TempId t = 0; t < m.num_temps(); ++t) {
          if (subseq(m, s, x, t) || subseq(m, s, t, x)) return true;
        }
        return false;
      };
      return has_neighbour(t1) && has_neighbour(t2);
    }
  }
  return false;
}

std::vector<Violation> check(const ExtendedModel& m, const Solution& s) {
  std::vector<Violation> out;
  if (static_cast<int>(s.active.size()) != m.num_ops() || static_cast<int>(s.reg.size()) != m.num_temps() ||
      static_cast<int>(s.sel.size()) != m.num_operands) {
    out.push_back({-1, Family::Mandatory, "solution shape does not match model"});
    return out;
  }
  for (size_t i = 0; i < m.constraints.size(); ++i) {
    const Constraint& c = m.constraints[i];
    if (!holds(m, s, c)) {
      std::ostringstream os;
      os << to_string(c.family);
      for (int x : c.args) os << " " << x;
      out.push_back({static_cast<int>(i), c.family, os.str()});
    }
  }
  return out;
}

std::vector<Violation> check(const ExtendedModel& m, const Solution& s, Tag only) {
  auto all = check(m, s);
  std::vector<Violation> out;
  for (auto& v : all) {
    if (tag_of(v.family) == only) out.push_back(v);
  }
  return out;
}

std::vector<OpId> linearize(const ExtendedModel& m, const Solution& s) {
  std::vector<OpId> order;
  for (OpId o = 0; o < m.num_ops(); ++o) {
    if (is_nonpseudo_active(m, s, o)) order.push_back(o);
  }
  std::sort(order.begin(), order.end(), [&](OpId x, OpId y) {
    return std::tie(s.cycle[x], x) < std::tie(s.cycle[y], y);
  });
  order.insert(order.begin(), m.in_op());
  order.push_back(m.out_op());
  return order;
}

Solution empty_solution(const ExtendedModel& m) {
  Solution s;
  s.active.assign(m.num_ops(), false);
  s.instr.assign(m.num_ops(), Instr::None);
  s.cycle.assign(m.num_ops(), -1);
  s.reg.assign(m.num_temps(), -1);
  s.live.assign(m.num_temps(), false);
  s.ls.assign(m.num_temps(), 0);
  s.le.assign(m.num_temps(), 0);
  s.sel.assign(m.num_operands, -1);
  for (const auto& op : m.ops) {
    if (op.mandatory) s.active[op.id] = true;
  }
  return s;
}

void derive(const ExtendedModel& m, Solution& s) {
  for (const auto& op : m.ops) {
    if (!s.active[op.id]) {
      s.instr[op.id] = Instr::None;
      s.cycle[op.id] = -1;
      for (const auto& mo : op.operands) s.sel[mo.id] = -1;
      continue;
    }
    if (op.kind == OpKind::Copy) {
      s.instr[op.id] = m.is_slot(s.reg[op.defs[0]]) ? Instr::SpillStore : Instr::Move;
    } else {
      s.instr[op.id] = op.instrs.front();
    }
  }
  s.cycle[m.in_op()] = 0;
  int span = 0;
  for (OpId o = 0; o < m.num_ops(); ++o) {
    if (is_nonpseudo_active(m, s, o)) span = std::max(span, completion(m, s, o));
  }
  s.cycle[m.out_op()] = span;
  s.objective = span;
  for (const auto& mt : m.temps) {
    if (mt.kind == TempKind::Pseudo) {
      s.live[mt.id] = false;
      s.reg[mt.id] = mt.domain.front();
      s.ls[mt.id] = s.le[mt.id] = 0;
      continue;
    }
    if (mt.kind == TempKind::Input) s.reg[mt.id] = mt.domain.front();
    s.live[mt.id] = s.active[mt.def_op];
    if (!s.live[mt.id]) {
      s.reg[mt.id] = -1;
      s.ls[mt.id] = s.le[mt.id] = 0;
      continue;
    }
    s.ls[mt.id] = s.cycle[mt.def_op];
    s.le[mt.id] = s.ls[mt.id] + 1;
  }
  for (int p = 0; p < m.num_operands; ++p) {
    TempId t = s.sel[p];
    OpId o = m.operand_owner(p);
    if (t >= 0 && s.active[o] && s.live[t]) s.le[t] = std::max(s.le[t], s.cycle[o]);
  }
}

std::string describe(const ExtendedModel& m, const Solution& s) {
  std::ostringstream os;
  auto loc = [&](TempId t) { return m.temps[t].name + ":" + m.target.location_name(s.reg[t]); };
  for (OpId o : linearize(m, s)) {
    const ModelOp& op = m.ops[o];
    os << op.name() << ": ";
    if (op.kind == OpKind::In || op.kind == OpKind::Out) {
      os << (op.kind == OpKind::In ? "in [" : "out [");
      for (size_t i = 0; i < op.defs.size(); ++i) {
        if (i) os << ", ";
        if (op.kind == OpKind::Out) {
          os << m.temps[op.defs[i]].name << ":" << m.target.location_name(s.reg[op.defs[i]])
             << " <- " << loc(s.sel[op.operands[i].id]);
        } else {
          os << loc(op.defs[i]);
        }
      }
      os << "]";
    } else {
      if (!op.defs.empty()) os << loc(op.defs[0]) << " <- ";
      os << (op.kind == OpKind::Copy || op.kind == OpKind::Reload ? std::string(to_string(s.instr[o]))
                                                                   : std::string(to_string(op.opcode)));
      for (const auto& mo : op.operands) {
        os << " ";
        if (mo.literal) {
          os << "#" << mo.value;
        } else {
          os << loc(s.sel[mo.id]);
        }
      }
      os << "  @" << s.cycle[o];
    }
    os << "\n";
  }
  return os.str();
}

}  // namespace maskcg
