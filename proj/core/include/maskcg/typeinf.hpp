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

// Security type inference over symbolic expressions.
//
// Every temp is mapped to an expression over program inputs by forward
// substitution. Expressions are hash-consed, so structurally equal
// expressions share one node and copies of a temp share its node.

#ifndef MASKCG_TYPEINF_HPP_
#define MASKCG_TYPEINF_HPP_

#include <cstdint>
#include <deque>
#include <map>
#include <memory>
#include <string>
#include <tuple>
#include <vector>

#include "maskcg/ir.hpp"

namespace maskcg {

// Bit i stands for program input i.
using InputSet = std::uint64_t;

struct Expr {
  enum class Kind : std::uint8_t { Input, Const, Unary, Binary };
  Kind kind = Kind::Const;
  Opcode op = Opcode::Xor;
  const Expr* a = nullptr;
  const Expr* b = nullptr;
  int input = -1;
  std::uint64_t value = 0;

  // Filled in bottom-up when the node is created.
  bool xor_only = true;
  InputSet supp = 0;  // with xor cancellation
  InputSet vars = 0;  // every input syntactically present
  InputSet unq = 0;
  InputSet dom = 0;

  bool is_xor() const { return kind == Kind::Binary && op == Opcode::Xor; }
};

using ExprRef = const Expr*;

class ExprPool {
 public:
  ExprPool(std::vector<SecurityClass> input_classes, std::vector<std::string> input_names,
           int width);

  ExprRef input(int index);
  ExprRef constant(std::uint64_t v);
  ExprRef unary(Opcode op, ExprRef a);
  ExprRef binary(Opcode op, ExprRef a, ExprRef b);

  int width() const { return width_; }
  int num_inputs() const { return static_cast<int>(classes_.size()); }
  SecurityClass input_class(int i) const { return classes_.at(i); }
  InputSet secret_inputs() const { return secret_; }
  InputSet random_inputs() const { return random_; }
  const std::string& input_name(int i) const { return names_.at(i); }

  std::string to_string(ExprRef e) const;
  std::vector<std::string> names(InputSet s) const;

  // Value of e for an assignment of all inputs.
  std::uint64_t evaluate(ExprRef e, const std::vector<std::uint64_t>& inputs) const;

 private:
  ExprRef intern(Expr e);

  std::vector<SecurityClass> classes_;
  std::vector<std::string> names_;
  int width_;
  InputSet secret_ = 0;
  InputSet random_ = 0;
  std::deque<Expr> nodes_;
  std::map<std::tuple<int, int, const void*, const void*, int, std::uint64_t>, ExprRef> index_;
};

bool xor_only(ExprRef e);
InputSet supp(ExprRef e);
InputSet unq(ExprRef e);
InputSet dom(ExprRef e);

// Full rule set. Unary nodes take the class of their operand.
SecurityClass classify(ExprPool& pool, ExprRef e);

// Class of the value e1 xor e2 observed when one overwrites the other.
// Judged by the two basic rules only and without cancellation, so any
// pair sharing a secret in its support is Secret unless a random input
// occurs on exactly one side and dominates it.
SecurityClass classify_transition(const ExprPool& pool, ExprRef e1, ExprRef e2);

enum class TempKind : std::uint8_t { Input, Def, Copy, Reload, Pseudo };

std::string_view to_string(TempKind k);

// A temp of some extended temp universe and the program temp it equals.
struct TempInfo {
  std::string name;
  TempKind kind = TempKind::Def;
  TempId source = -1;
};

struct TypeEnv {
  std::shared_ptr<ExprPool> pool;
  std::vector<TempInfo> temps;
  std::vector<SecurityClass> cls;
  std::vector<ExprRef> expr;

  int size() const { return static_cast<int>(temps.size()); }
  SecurityClass type(TempId t) const { return cls.at(t); }
  bool is_input(TempId t) const { return temps.at(t).kind == TempKind::Input; }
  bool is_pseudo(TempId t) const { return temps.at(t).kind == TempKind::Pseudo; }
};

// Program temp -> expression. Loads take the expression of the stored data.
std::vector<ExprRef> build_exprs(ExprPool& pool, const Program& p);

std::shared_ptr<ExprPool> make_pool(const Program& p);

// Types over the program's own temps.
TypeEnv infer_types(const Program& p);

// Types over an extended temp universe (copies, reloads, pseudo temps).
TypeEnv infer_types(const Program& p, const std::vector<TempInfo>& temps);

}  // namespace maskcg

#endif  // MASKCG_TYPEINF_HPP_
