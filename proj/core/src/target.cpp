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

#include "maskcg/target.hpp"

#include <algorithm>
#include <charconv>
#include <set>
#include <sstream>

namespace maskcg {

namespace {

std::vector<std::string> split_ws(std::string_view s) {
  std::vector<std::string> out;
  std::istringstream is{std::string(s)};
  std::string w;
  while (is >> w) out.push_back(w);
  return out;
}

std::string trim(std::string_view s) {
  size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return "";
  size_t e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

int parse_int(const std::string& s, int line) {
  int v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size()) {
    throw TargetError("line " + std::to_string(line) + ": bad integer '" + s + "'");
  }
  return v;
}

bool parse_bool(const std::string& s, int line) {
  if (s == "true") return true;
  if (s == "false") return false;
  throw TargetError("line " + std::to_string(line) + ": bad boolean '" + s + "'");
}

std::vector<std::string> numbered(const std::string& prefix, int n) {
  std::vector<std::string> out;
  for (int i = 0; i < n; ++i) out.push_back(prefix + std::to_string(i));
  return out;
}

void validate(const TargetDesc& t) {
  if (t.name.empty()) throw TargetError("missing target name");
  if (t.registers.empty()) throw TargetError("no registers");
  std::set<std::string> seen;
  for (const auto& r : t.registers) {
    if (!seen.insert(r).second) throw TargetError("duplicate register " + r);
  }
  if (t.stack_slots < 0) throw TargetError("negative stack_slots");
  if (t.copy_latency < 1) throw TargetError("copy latency must be at least 1");
  std::set<int> args(t.args.begin(), t.args.end());
  if (args.size() != t.args.size()) throw TargetError("argument registers must be distinct");
  for (size_t i = 0; i < t.args.size(); ++i) {
    if (t.args[i] != static_cast<int>(i)) {
      throw TargetError("argument registers must be a prefix of the register list");
    }
  }
  if (t.results.empty()) throw TargetError("missing result register");
  std::set<int> res(t.results.begin(), t.results.end());
  if (res.size() != t.results.size()) throw TargetError("result registers must be distinct");
  for (const auto& [op, d] : t.ops) {
    std::string n(to_string(op));
    if (d.latency < 1) throw TargetError("op " + n + ": latency must be at least 1");
    if (d.two_address && !is_binary(op)) throw TargetError("op " + n + ": two_address on non-binary opcode");
    bool mem = op == Opcode::Load || op == Opcode::Store;
    if (d.is_memory != mem) throw TargetError("op " + n + ": memory flag must be set exactly on load/store");
  }
  for (Opcode need : {Opcode::Load, Opcode::Store}) {
    if (!t.ops.count(need)) throw TargetError("target must define " + std::string(to_string(need)));
  }
}

}  // namespace

std::string TargetDesc::location_name(int loc) const {
  if (loc < 0) return "-";
  if (loc < num_registers()) return registers[loc];
  return "S" + std::to_string(loc - num_registers());
}

int TargetDesc::register_index(std::string_view n) const {
  for (size_t i = 0; i < registers.size(); ++i) {
    if (registers[i] == n) return static_cast<int>(i);
  }
  return -1;
}

const OpDesc& TargetDesc::op(Opcode o) const {
  auto it = ops.find(o);
  if (it == ops.end()) throw TargetError("target " + name + " has no " + std::string(to_string(o)));
  return it->second;
}

TargetDesc load_target(std::string_view text) {
  TargetDesc t;
  bool have_result = false;
  int line_no = 0;
  std::istringstream is{std::string(text)};
  std::string raw;
  std::vector<std::string> arg_names, result_names;
  while (std::getline(is, raw)) {
    ++line_no;
    std::string line = raw.substr(0, raw.find('#'));
    line = trim(line);
    if (line.empty()) continue;
    auto where = [&] { return "line " + std::to_string(line_no) + ": "; };
    auto eq = line.find('=');
    auto words = split_ws(line);
    if (words[0] == "op" || words[0] == "copy") {
      std::string opname = words[0] == "op" ? (words.size() > 1 ? words[1] : "") : "copy";
      OpDesc d;
      bool lat = false;
      for (size_t i = words[0] == "op" ? 2 : 1; i < words.size(); ++i) {
        auto e = words[i].find('=');
        if (e == std::string::npos) throw TargetError(where() + "expected key=value, got '" + words[i] + "'");
        std::string k = words[i].substr(0, e), v = words[i].substr(e + 1);
        if (k == "latency") {
          d.latency = parse_int(v, line_no);
          lat = true;
        } else if (k == "two_address") {
          d.two_address = parse_bool(v, line_no);
        } else if (k == "memory") {
          d.is_memory = parse_bool(v, line_no);
        } else {
          throw TargetError(where() + "unknown key '" + k + "'");
        }
      }
      if (!lat) throw TargetError(where() + "missing latency");
      if (d.latency < 1) throw TargetError(where() + "latency must be at least 1");
      if (opname == "copy") {
        t.copy_latency = d.latency;
        continue;
      }
      auto opc = parse_opcode(opname);
      if (!opc || *opc == Opcode::In || *opc == Opcode::Out || *opc == Opcode::Copy) {
        throw TargetError(where() + "unknown opcode '" + opname + "'");
      }
      if (t.ops.count(*opc)) throw TargetError(where() + "duplicate op " + opname);
      t.ops[*opc] = d;
      continue;
    }
    if (eq == std::string::npos) throw TargetError(where() + "expected key = value");
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (key == "target") {
      t.name = value;
    } else if (key == "registers") {
      t.registers = split_ws(value);
    } else if (key == "stack_slots") {
      t.stack_slots = parse_int(value, line_no);
    } else if (key == "args") {
      arg_names = split_ws(value);
    } else if (key == "result") {
      result_names = split_ws(value);
      have_result = true;
    } else {
      throw TargetError(where() + "unknown key '" + key + "'");
    }
  }
  std::set<std::string> seen;
  for (const auto& r : t.registers) {
    if (!seen.insert(r).second) throw TargetError("duplicate register " + r);
  }
  auto resolve = [&](const std::string& n) {
    int i = t.register_index(n);
    if (i < 0) throw TargetError("unknown register " + n);
    return i;
  };
  for (const auto& n : arg_names) t.args.push_back(resolve(n));
  for (const auto& n : result_names) t.results.push_back(resolve(n));
  if (!have_result) throw TargetError("missing result register");
  validate(t);
  return t;
}

std::string render_target(const TargetDesc& t) {
  std::ostringstream os;
  os << "target = " << t.name << "\n";
  os << "registers =";
  for (const auto& r : t.registers) os << " " << r;
  os << "\nstack_slots = " << t.stack_slots << "\n";
  os << "args =";
  for (int a : t.args) os << " " << t.registers[a];
  os << "\nresult =";
  for (int r : t.results) os << " " << t.registers[r];
  os << "\ncopy latency=" << t.copy_latency << "\n";
  for (const auto& [op, d] : t.ops) {
    os << "op " << to_string(op) << " latency=" << d.latency;
    if (d.two_address) os << " two_address=true";
    if (d.is_memory) os << " memory=true";
    os << "\n";
  }
  return os.str();
}

TargetDesc preset_target(std::string_view name) {
  TargetDesc t;
  t.name = std::string(name);
  bool two_address = false;
  if (name == "thumb-like") {
    t.registers = numbered("R", 8);
    t.stack_slots = 4;
    t.args = {0, 1, 2, 3};
    t.results = {0, 1};
    two_address = true;
  } else if (name == "mips-like") {
    t.registers = numbered("R", 16);
    t.stack_slots = 4;
    t.args = {0, 1, 2, 3, 4, 5, 6, 7};
    t.results = {0, 1};
  } else if (name == "tiny") {
    t.registers = numbered("R", 3);
    t.stack_slots = 2;
    t.args = {0, 1, 2};
    t.results = {0, 1};
  } else {
    throw TargetError("unknown target preset '" + std::string(name) + "'");
  }
  for (Opcode op : {Opcode::Xor, Opcode::And, Opcode::Or, Opcode::Add, Opcode::GfMul}) {
    t.ops[op] = {1, two_address, false};
  }
  t.ops[Opcode::Not] = {1, false, false};
  t.ops[Opcode::Load] = {2, false, true};
  t.ops[Opcode::Store] = {2, false, true};
  t.copy_latency = 1;
  validate(t);
  return t;
}

std::vector<std::string> preset_names() { return {"thumb-like", "mips-like", "tiny"}; }

}  // namespace maskcg
