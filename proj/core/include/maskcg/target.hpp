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

// Parametric single-issue machine description.
//
// Config format, one entry per line, '#' comments:
//
//   target = thumb-like
//   registers = R0 R1 R2 R3 R4 R5 R6 R7
//   stack_slots = 4
//   args = R0 R1 R2 R3
//   result = R0 R1
//   copy latency=1
//   op xor latency=1 two_address=true
//   op load latency=2 memory=true

#ifndef MASKCG_TARGET_HPP_
#define MASKCG_TARGET_HPP_

#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "maskcg/ir.hpp"

namespace maskcg {

struct OpDesc {
  int latency = 1;
  bool two_address = false;
  bool is_memory = false;
  bool operator==(const OpDesc&) const = default;
};

class TargetError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct TargetDesc {
  std::string name;
  std::vector<std::string> registers;
  int stack_slots = 0;
  std::map<Opcode, OpDesc> ops;
  int copy_latency = 1;
  std::vector<int> args;     // indices into registers
  std::vector<int> results;  // output i goes to results[i]

  int num_registers() const { return static_cast<int>(registers.size()); }
  // Locations are hardware registers followed by stack slots.
  int num_locations() const { return num_registers() + stack_slots; }
  bool is_slot(int loc) const { return loc >= num_registers(); }
  std::string location_name(int loc) const;
  int register_index(std::string_view name) const;
  bool supports(Opcode op) const { return ops.count(op) != 0; }
  const OpDesc& op(Opcode o) const;

  bool operator==(const TargetDesc&) const = default;
};

TargetDesc load_target(std::string_view text);
std::string render_target(const TargetDesc& t);

// "thumb-like", "mips-like" or "tiny".
TargetDesc preset_target(std::string_view name);
std::vector<std::string> preset_names();

}  // namespace maskcg

#endif  // MASKCG_TARGET_HPP_
