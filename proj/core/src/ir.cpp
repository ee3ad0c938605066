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

#include "maskcg/ir.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <map>
#include <sstream>

namespace maskcg {

namespace {

constexpr std::pair<Opcode, std::string_view> kOpcodeNames[] = {
    {Opcode::In, "in"},       {Opcode::Out, "out"},   {Opcode::Xor, "xor"},
    {Opcode::And, "and"},     {Opcode::Or, "or"},     {Opcode::Not, "not"},
    {Opcode::GfMul, "gf_mul"}, {Opcode::Add, "add"},  {Opcode::Copy, "copy"},
    {Opcode::Load, "load"},   {Opcode::Store, "store"},
};

struct Token {
  std::string_view text;
  int column;
};

std::vector<Token> tokenize(std::string_view line) {
  std::vector<Token> out;
  size_t i = 0;
  while (i < line.size()) {
    char ch = line[i];
    if (std::isspace(static_cast<unsigned char>(ch)) || ch == ',') {
      ++i;
      continue;
    }
    size_t j = i;
    while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j])) &&
           line[j] != ',') {
      ++j;
    }
    out.push_back({line.substr(i, j - i), static_cast<int>(i) + 1});
    i = j;
  }
  return out;
}

bool is_identifier(std::string_view s) {
  if (s.empty()) return false;
  if (!std::isalpha(static_cast<unsigned char>(s[0])) && s[0] != '_') return false;
  return std::all_of(s.begin(), s.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
  });
}

std::optional<std::uint64_t> parse_literal(std::string_view s) {
  std::uint64_t v = 0;
  int base = 10;
  if (s.size() > 2 && s[0] == '0' && (s[1] == 'x' || s[1] == 'X')) {
    s.remove_prefix(2);
    base = 16;
  }
  if (s.empty()) return std::nullopt;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v, base);
  if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

std::string literal_text(std::uint64_t v) {
  std::ostringstream os;
  os << "0x" << std::hex << v;
  return os.str();
}

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  Program run() {
    int line_no = 0;
    size_t pos = 0;
    while (pos <= text_.size()) {
      size_t nl = text_.find('\n', pos);
      if (nl == std::string_view::npos) nl = text_.size();
      std::string_view line = text_.substr(pos, nl - pos);
      pos = nl + 1;
      ++line_no;
      if (auto hash = line.find('#'); hash != std::string_view::npos) {
        line = line.substr(0, hash);
      }
      auto toks = tokenize(line);
      if (!toks.empty()) statement(line_no, toks);
    }
    if (!seen_func_) throw ParseError(line_no, 1, "missing func header");
    if (!seen_in_) throw ParseError(line_no, 1, "missing in statement");
    if (!seen_out_) throw ParseError(line_no, 1, "missing out statement");
    return std::move(p_);
  }

 private:
  [[noreturn]] void fail(int line, const Token& t, const std::string& msg) {
    throw ParseError(line, t.column, msg);
  }

  void statement(int line, const std::vector<Token>& toks) {
    const Token& head = toks[0];
    if (seen_out_) fail(line, head, "statement after out");
    if (head.text == "func") {
      if (seen_func_) fail(line, head, "duplicate func header");
      if (toks.size() != 4 || toks[2].text != "width") {
        fail(line, head, "expected 'func <name> width <bits>'");
      }
      if (!is_identifier(toks[1].text)) fail(line, toks[1], "bad function name");
      auto w = parse_literal(toks[3].text);
      if (!w) fail(line, toks[3], "bad width");
      p_.name = std::string(toks[1].text);
      p_.width = static_cast<int>(*w);
      seen_func_ = true;
      return;
    }
    if (!seen_func_) fail(line, head, "expected func header first");
    if (head.text == "in") {
      if (seen_in_) fail(line, head, "duplicate in statement");
      for (size_t i = 1; i < toks.size(); ++i) {
        auto colon = toks[i].text.find(':');
        if (colon == std::string_view::npos) fail(line, toks[i], "expected <temp>:<class>");
        auto name = toks[i].text.substr(0, colon);
        auto cls = parse_security_class(toks[i].text.substr(colon + 1));
        if (!cls) fail(line, toks[i], "unknown security class");
        TempId t = define(line, {name, toks[i].column});
        p_.inputs.push_back({t, *cls});
      }
      seen_in_ = true;
      return;
    }
    if (!seen_in_) fail(line, head, "expected in statement before body");
    if (head.text == "out") {
      for (size_t i = 1; i < toks.size(); ++i) p_.outputs.push_back(use(line, toks[i]));
      seen_out_ = true;
      return;
    }
    IrOperation op;
    op.id = static_cast<OpId>(p_.body.size());
    op.line = line;
    size_t first_operand = 0;
    if (head.text == "store") {
      op.opcode = Opcode::Store;
      first_operand = 1;
    } else {
      if (toks.size() < 3 || toks[1].text != "=") fail(line, head, "expected '<temp> = <opcode> ...'");
      auto opc = parse_opcode(toks[2].text);
      if (!opc || *opc == Opcode::In || *opc == Opcode::Out || *opc == Opcode::Store) {
        fail(line, toks[2], "unknown opcode '" + std::string(toks[2].text) + "'");
      }
      op.opcode = *opc;
      first_operand = 3;
    }
    for (size_t i = first_operand; i < toks.size(); ++i) {
      op.uses.push_back(operand(line, toks[i]));
    }
    if (op.opcode != Opcode::Store) op.def = define(line, toks[0]);
    p_.body.push_back(std::move(op));
  }

  Operand operand(int line, const Token& t) {
    if (!t.text.empty() && std::isdigit(static_cast<unsigned char>(t.text[0]))) {
      auto v = parse_literal(t.text);
      if (!v) fail(line, t, "bad literal '" + std::string(t.text) + "'");
      return Operand::of_literal(*v);
    }
    return Operand::of_temp(use(line, t));
  }

  TempId use(int line, const Token& t) {
    auto it = names_.find(std::string(t.text));
    if (it == names_.end()) {
      if (!is_identifier(t.text)) fail(line, t, "bad operand '" + std::string(t.text) + "'");
      fail(line, t, "use-before-def " + std::string(t.text));
    }
    return it->second;
  }

  TempId define(int line, const Token& t) {
    if (!is_identifier(t.text)) fail(line, t, "bad temp name '" + std::string(t.text) + "'");
    std::string name(t.text);
    if (names_.count(name)) fail(line, t, "duplicate-definition " + name);
    TempId id = static_cast<TempId>(p_.temp_names.size());
    names_[name] = id;
    p_.temp_names.push_back(name);
    return id;
  }

  std::string_view text_;
  Program p_;
  std::map<std::string, TempId> names_;
  bool seen_func_ = false;
  bool seen_in_ = false;
  bool seen_out_ = false;
};

}  // namespace

std::string_view to_string(SecurityClass c) {
  switch (c) {
    case SecurityClass::Secret: return "secret";
    case SecurityClass::Public: return "public";
    case SecurityClass::Random: return "random";
  }
  return "?";
}

std::optional<SecurityClass> parse_security_class(std::string_view s) {
  if (s == "secret") return SecurityClass::Secret;
  if (s == "public") return SecurityClass::Public;
  if (s == "random") return SecurityClass::Random;
  return std::nullopt;
}

std::string_view to_string(Opcode op) {
  for (auto& [o, n] : kOpcodeNames) {
    if (o == op) return n;
  }
  return "?";
}

std::optional<Opcode> parse_opcode(std::string_view s) {
  for (auto& [o, n] : kOpcodeNames) {
    if (n == s) return o;
  }
  return std::nullopt;
}

bool is_binary(Opcode op) {
  switch (op) {
    case Opcode::Xor: case Opcode::And: case Opcode::Or:
    case Opcode::GfMul: case Opcode::Add:
      return true;
    default:
      return false;
  }
}

bool is_unary(Opcode op) { return op == Opcode::Not || op == Opcode::Copy; }

bool is_commutative(Opcode op) { return is_binary(op); }

std::optional<TempId> Program::find_temp(std::string_view n) const {
  for (size_t i = 0; i < temp_names.size(); ++i) {
    if (temp_names[i] == n) return static_cast<TempId>(i);
  }
  return std::nullopt;
}

int Program::defining_op(TempId t) const {
  for (size_t i = 0; i < body.size(); ++i) {
    if (body[i].def == t) return static_cast<int>(i);
  }
  return -1;
}

int Program::input_index(TempId t) const {
  for (size_t i = 0; i < inputs.size(); ++i) {
    if (inputs[i].temp == t) return static_cast<int>(i);
  }
  return -1;
}

std::uint64_t Program::mask() const {
  return width >= 64 ? ~0ULL : ((1ULL << width) - 1);
}

bool may_alias(const Operand& a, const Operand& b) {
  if (!a.is_temp() && !b.is_temp()) return a.value == b.value;
  return true;
}

int resolve_load(const Program& p, int load) {
  const Operand& addr = p.body.at(load).uses.at(0);
  for (int i = load - 1; i >= 0; --i) {
    const IrOperation& op = p.body[i];
    if (op.opcode != Opcode::Store || op.uses.empty()) continue;
    if (op.uses[0] == addr) return i;
    if (may_alias(op.uses[0], addr)) return -1;
  }
  return -1;
}

std::vector<Diagnostic> validate(const Program& p) {
  std::vector<Diagnostic> out;
  auto diag = [&](std::string code, OpId op, std::string msg) {
    out.push_back({std::move(code), op, std::move(msg)});
  };
  auto name = [&](TempId t) {
    return t >= 0 && t < p.num_temps() ? p.temp_names[t] : "t?" + std::to_string(t);
  };
  if (p.width != 4 && p.width != 8 && p.width != 16 && p.width != 32) {
    diag("bad-width", -1, "width must be 4, 8, 16 or 32");
  }
  if (p.inputs.empty()) diag("no-inputs", -1, "program has no inputs");
  if (p.inputs.size() > 64) diag("too-many-inputs", -1, "at most 64 inputs");

  const int n = p.num_temps();
  std::vector<int> defs(std::max(n, 0), 0);
  std::vector<bool> defined(std::max(n, 0), false);
  auto def_temp = [&](TempId t, OpId op) {
    if (t < 0 || t >= n) {
      diag("unknown-temp", op, "definition of unknown temp " + std::to_string(t));
      return;
    }
    if (++defs[t] > 1) diag("duplicate-definition", op, "duplicate-definition " + name(t));
    defined[t] = true;
  };
  auto use_temp = [&](TempId t, OpId op) {
    if (t < 0 || t >= n) {
      diag("unknown-temp", op, "use of unknown temp " + std::to_string(t));
    } else if (!defined[t]) {
      diag("use-before-def", op, "use-before-def " + name(t));
    }
  };
  for (const auto& in : p.inputs) def_temp(in.temp, -1);

  for (size_t i = 0; i < p.body.size(); ++i) {
    const IrOperation& op = p.body[i];
    OpId id = static_cast<OpId>(i);
    if (op.id != id) diag("bad-op-id", id, "operation ids must be dense");
    if (!op.mandatory) diag("optional-in-source", id, "source operations are mandatory");
    size_t want = 0;
    switch (op.opcode) {
      case Opcode::In: case Opcode::Out:
        diag("pseudo-in-body", id, "in/out cannot appear in the body");
        continue;
      case Opcode::Copy:
        diag("copy-in-source", id, "copies are synthesized, not written in source");
        continue;
      case Opcode::Not: want = 1; break;
      case Opcode::Load: want = 1; break;
      case Opcode::Store: want = 2; break;
      default: want = 2; break;
    }
    if (op.uses.size() != want) {
      diag("arity", id, std::string(to_string(op.opcode)) + " expects " +
                            std::to_string(want) + " operands");
    }
    for (size_t k = 0; k < op.uses.size(); ++k) {
      const Operand& u = op.uses[k];
      if (u.is_temp()) {
        use_temp(u.temp, id);
        continue;
      }
      bool allowed = (is_binary(op.opcode) && k == 1) ||
                     ((op.opcode == Opcode::Load || op.opcode == Opcode::Store) && k == 0);
      if (!allowed) diag("literal-position", id, "literal not allowed here");
      if (is_binary(op.opcode) && (u.value & ~p.mask()) != 0) {
        diag("literal-range", id, "literal exceeds word width");
      }
    }
    if (op.opcode == Opcode::Store) {
      if (op.def) diag("store-has-def", id, "store-has-def");
    } else if (!op.def) {
      diag("missing-def", id, std::string(to_string(op.opcode)) + " needs a definition");
    } else {
      def_temp(*op.def, id);
    }
    if (op.opcode == Opcode::Load && op.uses.size() == 1 &&
        resolve_load(p, static_cast<int>(i)) < 0) {
      diag("unresolved-load", id, "load does not observe a unique earlier store");
    }
  }
  if (p.outputs.empty()) diag("no-outputs", -1, "program has no outputs");
  for (TempId t : p.outputs) use_temp(t, -1);
  for (int t = 0; t < n; ++t) {
    if (defs[t] == 0) diag("undefined-temp", -1, "temp " + name(t) + " is never defined");
  }
  return out;
}

Program parse_program(std::string_view text) {
  Program p = Parser(text).run();
  auto diags = validate(p);
  if (!diags.empty()) {
    const Diagnostic& d = diags.front();
    int line = d.op >= 0 && d.op < static_cast<int>(p.body.size()) ? p.body[d.op].line : 0;
    throw ParseError(line, 1, d.message);
  }
  return p;
}

std::string render_program(const Program& p) {
  std::ostringstream os;
  os << "func " << p.name << " width " << p.width << "\n";
  os << "in";
  for (const auto& in : p.inputs) {
    os << " " << p.temp_name(in.temp) << ":" << to_string(in.cls);
  }
  os << "\n";
  auto operand = [&](const Operand& o) {
    return o.is_temp() ? p.temp_name(o.temp) : literal_text(o.value);
  };
  for (const auto& op : p.body) {
    if (op.opcode == Opcode::Store) {
      os << "store";
    } else {
      os << p.temp_name(*op.def) << " = " << to_string(op.opcode);
    }
    for (size_t k = 0; k < op.uses.size(); ++k) {
      os << (k == 0 ? " " : ", ") << operand(op.uses[k]);
    }
    os << "\n";
  }
  os << "out";
  for (TempId t : p.outputs) os << " " << p.temp_name(t);
  os << "\n";
  return os.str();
}

}  // namespace maskcg
