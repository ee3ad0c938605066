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

// Linear assembly for the toy ISA.
//
//   .func xor
//   .target thumb-like
//   .width 4
//   .registers R0 R1 R2 R3 R4 R5 R6 R7
//   .slots 4
//   .in R0 t0 public
//   .out R0
//       xor    R1, R1, R2      ; c1 t6 <- t1 t2
//       mov    R3, R1
//       spill  S0, R1
//       reload R4, S0
//       store  0x10, R2
//       load   R5, 0x10
//
// Stack slots are locations numbered after the hardware registers.

#ifndef MASKCG_ASM_HPP_
#define MASKCG_ASM_HPP_

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "maskcg/ir.hpp"
#include "maskcg/model.hpp"

namespace maskcg {

enum class AsmKind : std::uint8_t { Alu, Move, Spill, Reload, Store, Load };

struct AsmInstr {
  AsmKind kind = AsmKind::Alu;
  Opcode opcode = Opcode::Xor;  // Alu only
  int dst = -1;                 // written location, -1 for stores
  std::vector<int> src;         // read locations
  std::optional<std::uint64_t> imm;  // literal operand or memory address
  int cycle = -1;
  std::string note;

  bool writes_register(int num_registers) const { return dst >= 0 && dst < num_registers; }
  bool is_memory() const {
    return kind == AsmKind::Spill || kind == AsmKind::Reload || kind == AsmKind::Store ||
           kind == AsmKind::Load;
  }
  bool operator==(const AsmInstr& o) const {
    return kind == o.kind && opcode == o.opcode && dst == o.dst && src == o.src && imm == o.imm;
  }
};

struct AsmInput {
  int reg = 0;
  std::string name;
  SecurityClass cls = SecurityClass::Public;
  bool operator==(const AsmInput&) const = default;
};

struct AsmProgram {
  std::string name;
  std::string target;
  int width = 4;
  std::vector<std::string> registers;
  int stack_slots = 0;
  std::vector<AsmInput> inputs;
  std::vector<int> outputs;
  std::vector<AsmInstr> code;

  int num_registers() const { return static_cast<int>(registers.size()); }
  std::string location_name(int loc) const;
  // Location index of a register or slot name, -1 when unknown.
  int location(std::string_view n) const;
  bool operator==(const AsmProgram& o) const {
    return name == o.name && target == o.target && width == o.width &&
           registers == o.registers && stack_slots == o.stack_slots &&
           inputs == o.inputs && outputs == o.outputs && code == o.code;
  }
};

class AsmError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// One instruction per active non-pseudo operation, in cycle order.
AsmProgram to_asm(const ExtendedModel& m, const Solution& s);

std::string render_asm(const AsmProgram& a);
AsmProgram parse_asm(std::string_view text);

}  // namespace maskcg

#endif  // MASKCG_ASM_HPP_
