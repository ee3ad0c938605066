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

#include "maskcg/asm.hpp"

#include <charconv>
#include <iomanip>
#include <sstream>

namespace maskcg {

namespace {

std::string hex(std::uint64_t v) {
  std::ostringstream os;
  os << "0x" << std::hex << v;
  return os.str();
}

std::vector<std::string> tokens(std::string_view line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ' ' || c == '\t' || c == ',' || c == '\r') {
      if (!cur.empty()) out.push_back(std::move(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

std::optional<std::uint64_t> number(const std::string& s) {
  std::uint64_t v = 0;
  int base = 10;
  size_t off = 0;
  if (s.size() > 2 && s[0] == '0' && (s[1] == 'x' || s[1] == 'X')) {
    base = 16;
    off = 2;
  }
  auto [p, ec] = std::from_chars(s.data() + off, s.data() + s.size(), v, base);
  if (ec != std::errc() || p != s.data() + s.size() || off == s.size()) return std::nullopt;
  return v;
}

std::string_view mnemonic(const AsmInstr& i) {
  switch (i.kind) {
    case AsmKind::Alu: return to_string(i.opcode);
    case AsmKind::Move: return "mov";
    case AsmKind::Spill: return "spill";
    case AsmKind::Reload: return "reload";
    case AsmKind::Store: return "store";
    case AsmKind::Load: return "load";
  }
  return "?";
}

}  // namespace

std::string AsmProgram::location_name(int loc) const {
  if (loc < 0) return "-";
  if (loc < num_registers()) return registers[loc];
  return "S" + std::to_string(loc - num_registers());
}

int AsmProgram::location(std::string_view n) const {
  for (int i = 0; i < num_registers(); ++i) {
    if (registers[i] == n) return i;
  }
  if (n.size() > 1 && n[0] == 'S') {
    auto v = number(std::string(n.substr(1)));
    if (v && static_cast<int>(*v) < stack_slots) return num_registers() + static_cast<int>(*v);
  }
  return -1;
}

AsmProgram to_asm(const ExtendedModel& m, const Solution& s) {
  AsmProgram a;
  a.name = m.program.name;
  a.target = m.target.name;
  a.width = m.program.width;
  a.registers = m.target.registers;
  a.stack_slots = m.target.stack_slots;
  for (size_t i = 0; i < m.program.inputs.size(); ++i) {
    const auto& in = m.program.inputs[i];
    a.inputs.push_back({m.target.args[i], m.program.temp_name(in.temp), in.cls});
  }
  for (size_t i = 0; i < m.program.outputs.size(); ++i) a.outputs.push_back(m.target.results[i]);

  for (OpId o : linearize(m, s)) {
    const ModelOp& op = m.ops[o];
    if (op.is_pseudo()) continue;
    AsmInstr ins;
    ins.cycle = s.cycle[o];
    std::ostringstream note;
    if (!op.defs.empty()) note << m.temps[op.defs[0]].name << " <-";
    for (const auto& mo : op.operands) {
      if (mo.literal) {
        ins.imm = mo.value;
      } else {
        ins.src.push_back(s.reg[s.sel[mo.id]]);
        note << " " << m.temps[s.sel[mo.id]].name;
      }
    }
    if (!op.defs.empty()) ins.dst = s.reg[op.defs[0]];
    switch (s.instr[o]) {
      case Instr::Alu:
        ins.kind = AsmKind::Alu;
        ins.opcode = op.opcode;
        break;
      case Instr::Move: ins.kind = AsmKind::Move; break;
      case Instr::SpillStore: ins.kind = AsmKind::Spill; break;
      case Instr::SpillLoad: ins.kind = AsmKind::Reload; break;
      case Instr::Load: ins.kind = AsmKind::Load; break;
      case Instr::Store: ins.kind = AsmKind::Store; break;
      default: throw AsmError("operation " + op.name() + " has no instruction");
    }
    std::string n = note.str();
    ins.note = n.empty() ? op.name() : op.name() + " " + n;
    a.code.push_back(std::move(ins));
  }
  return a;
}

std::string render_asm(const AsmProgram& a) {
  std::ostringstream os;
  os << ".func " << a.name << "\n.target " << a.target << "\n.width " << a.width << "\n.registers";
  for (const auto& r : a.registers) os << " " << r;
  os << "\n.slots " << a.stack_slots << "\n";
  for (const auto& in : a.inputs) {
    os << ".in " << a.location_name(in.reg) << " " << in.name << " " << to_string(in.cls) << "\n";
  }
  os << ".out";
  for (int r : a.outputs) os << " " << a.location_name(r);
  os << "\n";
  for (const auto& i : a.code) {
    std::ostringstream ins;
    ins << std::left << std::setw(7) << mnemonic(i) << " ";
    std::vector<std::string> ops;
    switch (i.kind) {
      case AsmKind::Store:
        ops = {hex(i.imm.value_or(0)), a.location_name(i.src.at(0))};
        break;
      case AsmKind::Load:
        ops = {a.location_name(i.dst), hex(i.imm.value_or(0))};
        break;
      default:
        ops.push_back(a.location_name(i.dst));
        for (int r : i.src) ops.push_back(a.location_name(r));
        if (i.imm) ops.push_back(hex(*i.imm));
    }
    for (size_t k = 0; k < ops.size(); ++k) ins << (k ? ", " : "") << ops[k];
    os << "    " << std::left << std::setw(24) << ins.str();
    if (i.cycle >= 0 || !i.note.empty()) {
      os << "; ";
      if (i.cycle >= 0) os << "c" << i.cycle << " ";
      os << i.note;
    }
    os << "\n";
  }
  return os.str();
}

AsmProgram parse_asm(std::string_view text) {
  AsmProgram a;
  std::istringstream is{std::string(text)};
  std::string raw;
  int line_no = 0;
  bool have_regs = false;
  auto fail = [&](const std::string& msg) -> AsmError {
    return AsmError("line " + std::to_string(line_no) + ": " + msg);
  };
  while (std::getline(is, raw)) {
    ++line_no;
    std::string comment;
    if (auto semi = raw.find(';'); semi != std::string::npos) {
      comment = raw.substr(semi + 1);
      raw = raw.substr(0, semi);
    }
    if (auto hash = raw.find('#'); hash != std::string::npos) raw = raw.substr(0, hash);
    auto t = tokens(raw);
    if (t.empty()) continue;
    auto loc = [&](const std::string& n) {
      int l = a.location(n);
      if (l < 0) throw fail("unknown location " + n);
      return l;
    };
    auto reg = [&](const std::string& n) {
      int l = loc(n);
      if (l >= a.num_registers()) throw fail(n + " is not a register");
      return l;
    };
    auto slot = [&](const std::string& n) {
      int l = loc(n);
      if (l < a.num_registers()) throw fail(n + " is not a stack slot");
      return l;
    };
    auto num = [&](const std::string& n) {
      auto v = number(n);
      if (!v) throw fail("bad number " + n);
      return *v;
    };
    auto arity = [&](size_t n) {
      if (t.size() != n) throw fail("expected " + std::to_string(n - 1) + " operands for " + t[0]);
    };
    const std::string& head = t[0];
    if (head[0] == '.') {
      if (head == ".func" && t.size() == 2) {
        a.name = t[1];
      } else if (head == ".target" && t.size() == 2) {
        a.target = t[1];
      } else if (head == ".width" && t.size() == 2) {
        a.width = static_cast<int>(num(t[1]));
      } else if (head == ".registers") {
        a.registers.assign(t.begin() + 1, t.end());
        have_regs = true;
      } else if (head == ".slots" && t.size() == 2) {
        a.stack_slots = static_cast<int>(num(t[1]));
      } else if (head == ".in" && t.size() == 4) {
        auto cls = parse_security_class(t[3]);
        if (!cls) throw fail("unknown security class " + t[3]);
        a.inputs.push_back({reg(t[1]), t[2], *cls});
      } else if (head == ".out") {
        for (size_t k = 1; k < t.size(); ++k) a.outputs.push_back(reg(t[k]));
      } else {
        throw fail("bad directive " + head);
      }
      continue;
    }
    if (!have_regs) throw fail("instruction before .registers");
    AsmInstr ins;
    if (head == "mov") {
      arity(3);
      ins.kind = AsmKind::Move;
      ins.dst = reg(t[1]);
      ins.src = {reg(t[2])};
    } else if (head == "spill") {
      arity(3);
      ins.kind = AsmKind::Spill;
      ins.dst = slot(t[1]);
      ins.src = {reg(t[2])};
    } else if (head == "reload") {
      arity(3);
      ins.kind = AsmKind::Reload;
      ins.dst = reg(t[1]);
      ins.src = {slot(t[2])};
    } else if (head == "store") {
      arity(3);
      ins.kind = AsmKind::Store;
      ins.imm = num(t[1]);
      ins.src = {reg(t[2])};
    } else if (head == "load") {
      arity(3);
      ins.kind = AsmKind::Load;
      ins.dst = reg(t[1]);
      ins.imm = num(t[2]);
    } else {
      auto opc = parse_opcode(head);
      if (!opc || !(is_binary(*opc) || is_unary(*opc)) || *opc == Opcode::Copy) {
        throw fail("unknown mnemonic " + head);
      }
      ins.kind = AsmKind::Alu;
      ins.opcode = *opc;
      arity(is_binary(*opc) ? 4 : 3);
      ins.dst = reg(t[1]);
      ins.src = {reg(t[2])};
      if (is_binary(*opc)) {
        if (std::isdigit(static_cast<unsigned char>(t[3][0]))) {
          ins.imm = num(t[3]);
        } else {
          ins.src.push_back(reg(t[3]));
        }
      }
    }
    if (comment.size() > 1 && comment[0] == ' ') comment.erase(0, 1);
    if (comment.size() > 1 && comment[0] == 'c') {
      auto sp = comment.find(' ');
      if (auto c = number(comment.substr(1, sp == std::string::npos ? sp : sp - 1))) {
        ins.cycle = static_cast<int>(*c);
        comment = sp == std::string::npos ? "" : comment.substr(sp + 1);
      }
    }
    while (!comment.empty() && std::isspace(static_cast<unsigned char>(comment.back()))) comment.pop_back();
    ins.note = comment;
    a.code.push_back(std::move(ins));
  }
  if (!have_regs) throw AsmError("missing .registers");
  return a;
}

}  // namespace maskcg
