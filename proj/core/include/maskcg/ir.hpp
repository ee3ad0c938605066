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

// Straight-line intermediate representation with security-annotated inputs.
//
// Text format, one statement per line, '#' starts a comment:
//
//   func <name> width <4|8|16|32>
//   in <temp>:<secret|public|random> ...
//   <temp> = <opcode> <operand>[, <operand>]
//   store <addr>, <temp>
//   <temp> = load <addr>
//   out <temp> ...

#ifndef MASKCG_IR_HPP_
#define MASKCG_IR_HPP_

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace maskcg {

enum class SecurityClass : std::uint8_t { Secret, Public, Random };

std::string_view to_string(SecurityClass c);
std::optional<SecurityClass> parse_security_class(std::string_view s);

enum class Opcode : std::uint8_t {
  In, Out, Xor, And, Or, Not, GfMul, Add, Copy, Load, Store
};

std::string_view to_string(Opcode op);
std::optional<Opcode> parse_opcode(std::string_view s);
bool is_binary(Opcode op);
bool is_unary(Opcode op);
bool is_commutative(Opcode op);

// Temps and operations are addressed by dense indices.
using TempId = int;
using OpId = int;

struct Operand {
  enum class Kind : std::uint8_t { Temp, Literal };
  Kind kind = Kind::Temp;
  TempId temp = -1;
  std::uint64_t value = 0;

  static Operand of_temp(TempId t) { return {Kind::Temp, t, 0}; }
  static Operand of_literal(std::uint64_t v) { return {Kind::Literal, -1, v}; }
  bool is_temp() const { return kind == Kind::Temp; }
  bool operator==(const Operand&) const = default;
};

// For load, uses = {addr}. For store, uses = {addr, data}.
struct IrOperation {
  OpId id = 0;
  Opcode opcode = Opcode::Xor;
  std::vector<Operand> uses;
  std::optional<TempId> def;
  bool mandatory = true;
  int line = 0;

  bool operator==(const IrOperation& o) const {
    return id == o.id && opcode == o.opcode && uses == o.uses && def == o.def &&
           mandatory == o.mandatory;
  }
};

struct ProgramInput {
  TempId temp = 0;
  SecurityClass cls = SecurityClass::Public;
  bool operator==(const ProgramInput&) const = default;
};

struct Program {
  std::string name;
  int width = 4;
  std::vector<ProgramInput> inputs;
  std::vector<IrOperation> body;
  std::vector<TempId> outputs;
  std::vector<std::string> temp_names;

  int num_temps() const { return static_cast<int>(temp_names.size()); }
  const std::string& temp_name(TempId t) const { return temp_names.at(t); }
  std::optional<TempId> find_temp(std::string_view name) const;
  // Index into body of the defining operation, or -1 for inputs.
  int defining_op(TempId t) const;
  // Input position of t, or -1.
  int input_index(TempId t) const;
  std::uint64_t mask() const;

  bool operator==(const Program& o) const {
    return name == o.name && width == o.width && inputs == o.inputs &&
           body == o.body && outputs == o.outputs && temp_names == o.temp_names;
  }
};

struct Diagnostic {
  std::string code;
  OpId op = -1;
  std::string message;
};

class ParseError : public std::runtime_error {
 public:
  ParseError(int line, int column, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ":" +
                           std::to_string(column) + ": " + what),
        line_(line),
        column_(column) {}
  int line() const { return line_; }
  int column() const { return column_; }

 private:
  int line_;
  int column_;
};

// Parses and validates. Throws ParseError on syntax errors and on any
// validation diagnostic.
Program parse_program(std::string_view text);

// Empty iff every Program invariant holds.
std::vector<Diagnostic> validate(const Program& p);

std::string render_program(const Program& p);

// Index into body of the store whose data a load observes.
// Requires a validated program and a load at body index `load`.
int resolve_load(const Program& p, int load);

// True when two memory operations may touch the same address.
bool may_alias(const Operand& a, const Operand& b);

}  // namespace maskcg

#endif  // MASKCG_IR_HPP_
