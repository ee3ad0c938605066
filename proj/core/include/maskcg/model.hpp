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

// Combined register allocation and scheduling model.
//
// The source program is expanded with optional copy operations:
//
//   o1: in [t0 t1 t2]          inputs, preassigned to argument registers
//   o2: t3 <- [-, move, store] t0
//   ...
//   o5: t6 <- xor [t1,t4,..] [t2,t5,..]
//   o6: t7 <- [-, move, store] t6
//   ...
//   o9: out [t10 <- [t8,t9,..]]
//   o10..: reloads, t <- [-, reload] copy
//
// Operations are numbered from 0 internally and printed from o1.

#ifndef MASKCG_MODEL_HPP_
#define MASKCG_MODEL_HPP_

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "maskcg/ir.hpp"
#include "maskcg/secsets.hpp"
#include "maskcg/target.hpp"
#include "maskcg/typeinf.hpp"

namespace maskcg {

// The in pseudo-op owns cycle 0; real operations issue from cycle 1.
inline constexpr int kFirstCycle = 1;

enum class OpKind : std::uint8_t { In, Body, Copy, Reload, Out };

enum class Instr : std::uint8_t { None, Pseudo, Alu, Move, SpillStore, SpillLoad, Load, Store };

std::string_view to_string(Instr i);

struct ModelOptions {
  bool register_copies = true;
  bool spills = true;
  // Rejects solutions that differ only by a renaming of free registers or
  // stack slots.
  bool break_symmetry = true;
  // Program temps that get copy and reload operations; empty means all.
  std::vector<std::string> copy_values;
};

struct ModelOperand {
  int id = -1;  // global operand index
  bool literal = false;
  std::uint64_t value = 0;
  std::vector<TempId> alternatives;
  bool needs_slot = false;  // reload source; every other operand needs a register
};

struct ModelOp {
  OpId id = 0;
  OpKind kind = OpKind::Body;
  Opcode opcode = Opcode::Xor;
  int body_index = -1;
  std::vector<ModelOperand> operands;
  std::vector<TempId> defs;
  bool mandatory = true;
  std::vector<Instr> instrs;  // instructions it may issue as, None excluded

  std::string name() const { return "o" + std::to_string(id + 1); }
  bool is_pseudo() const { return kind == OpKind::In || kind == OpKind::Out; }
};

struct ModelTemp {
  TempId id = 0;
  std::string name;
  TempKind kind = TempKind::Def;
  TempId source = -1;  // program temp with the same value
  OpId def_op = -1;
  std::vector<int> domain;  // admissible locations
};

enum class Tag : std::uint8_t { Base, Security, Implied };

enum class Family : std::uint8_t {
  Mandatory, Instruction, Operand, Location, Preassign, Liveness, LiveStart, LiveEnd,
  Precedence, MemoryOrder, SingleIssue, Compact, Makespan, NoOverlap, TwoAddress, Symmetry,
  Rpairs, SpairsPre, SpairsPost, Entry, Mmpairs, MspairsPre, MspairsPost,
  Accumulator, Interposition,
};

std::string_view to_string(Tag t);
std::string_view to_string(Family f);
Tag tag_of(Family f);
// Name used when reporting which group of constraints could not be met.
std::string_view family_group(Family f);

struct Constraint {
  Family family;
  std::vector<int> args;
};

struct Solution {
  std::vector<bool> active;
  std::vector<Instr> instr;
  std::vector<int> cycle;  // -1 when inactive
  std::vector<int> reg;    // -1 when not live, except pseudo temps
  std::vector<bool> live;
  std::vector<int> ls;
  std::vector<int> le;
  std::vector<TempId> sel;  // per operand, -1 for literals and inactive ops
  int objective = 0;

  bool operator==(const Solution&) const = default;
  bool operator<(const Solution& o) const;
};

struct ExtendedModel {
  Program program;
  TargetDesc target;
  ModelOptions options;
  std::vector<ModelTemp> temps;
  std::vector<ModelOp> ops;
  int num_operands = 0;
  int maxc = 0;
  TypeEnv types;
  SecuritySets sets;
  std::vector<MemOp> memops;  // potential memory operations
  std::vector<std::vector<TempId>> members;  // program temp -> model temps
  std::vector<std::pair<OpId, OpId>> memory_order;
  std::vector<int> free_registers;  // interchangeable hardware registers
  std::vector<Constraint> constraints;
  bool secure = false;
  bool implied = false;

  OpId in_op() const { return 0; }
  OpId out_op() const;
  int num_temps() const { return static_cast<int>(temps.size()); }
  int num_ops() const { return static_cast<int>(ops.size()); }
  const ModelOperand& operand(int id) const;
  OpId operand_owner(int id) const;
  std::optional<TempId> find_temp(std::string_view name) const;
  std::optional<OpId> find_op(std::string_view name) const;
  bool is_hw(int loc) const { return loc >= 0 && loc < target.num_registers(); }
  bool is_slot(int loc) const { return loc >= target.num_registers(); }
  // Latency of op o when issued as instruction i.
  int latency(OpId o, Instr i) const;
  // Memory operation under instruction i (spill store/load or source memory op).
  bool is_memory(OpId o, Instr i) const;
  std::vector<MemOp> all_memops() const { return memops; }

 private:
  std::vector<OpId> operand_owner_;
  std::vector<int> operand_slot_;
  friend ExtendedModel build_base_model(const Program&, const TargetDesc&, const ModelOptions&);
};

class ModelError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

ExtendedModel build_base_model(const Program& p, const TargetDesc& t,
                               const ModelOptions& options = {});

// Memory operations named by op name, or all potential ones when empty.
std::vector<MemOp> select_memops(const ExtendedModel& m, const std::vector<std::string>& names);

ExtendedModel add_security_constraints(ExtendedModel m, const SecuritySets& s);
ExtendedModel add_implied_constraints(ExtendedModel m, const SecuritySets& s);

// Convenience: base model plus security sets over all potential memory
// operations, with security and optionally implied constraints.
ExtendedModel build_model(const Program& p, const TargetDesc& t, bool secure, bool implied,
                          const ModelOptions& options = {});

// Predicates over complete solutions.
bool samereg(const ExtendedModel& m, const Solution& s, TempId t1, TempId t2);
bool is_before(const ExtendedModel& m, const Solution& s, TempId t1, TempId t2);
int lk(const ExtendedModel& m, const Solution& s, TempId t);
bool subseq(const ExtendedModel& m, const Solution& s, TempId t1, TempId t2);
bool mem_active(const ExtendedModel& m, const Solution& s, OpId o);
bool is_before_mem(const ExtendedModel& m, const Solution& s, OpId o1, OpId o2);
int ok(const ExtendedModel& m, const Solution& s, OpId o);
bool msubseq(const ExtendedModel& m, const Solution& s, OpId o1, OpId o2);

struct Violation {
  int constraint = -1;
  Family family;
  std::string message;
};

bool holds(const ExtendedModel& m, const Solution& s, const Constraint& c);
std::vector<Violation> check(const ExtendedModel& m, const Solution& s);
std::vector<Violation> check(const ExtendedModel& m, const Solution& s, Tag only);

// Active operations sorted by cycle, in first and out last.
std::vector<OpId> linearize(const ExtendedModel& m, const Solution& s);

// Fills instr, live, ls, le and objective from activeness, cycles,
// registers and operand selections.
void derive(const ExtendedModel& m, Solution& s);

// Starts from an all-inactive solution with mandatory ops active.
Solution empty_solution(const ExtendedModel& m);

std::string describe(const ExtendedModel& m, const Solution& s);

}  // namespace maskcg

#endif  // MASKCG_MODEL_HPP_
