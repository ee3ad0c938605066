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

#include "maskcg/typeinf.hpp"

#include <sstream>
#include <stdexcept>
#include <unordered_map>

#include "maskcg/gf.hpp"

namespace maskcg {

namespace {

constexpr int kRewriteDepth = 3;

using SC = SecurityClass;

std::string op_symbol(Opcode op) {
  switch (op) {
    case Opcode::Xor: return "^";
    case Opcode::And: return "&";
    case Opcode::Or: return "|";
    case Opcode::Add: return "+";
    case Opcode::GfMul: return "*";
    default: return std::string(to_string(op));
  }
}

bool is_op(ExprRef e, Opcode op) { return e->kind == Expr::Kind::Binary && e->op == op; }

// Other child of a binary node when one child is x, else nullptr.
ExprRef other_child(ExprRef node, ExprRef x) {
  if (node->a == x) return node->b;
  if (node->b == x) return node->a;
  return nullptr;
}

class Classifier {
 public:
  explicit Classifier(ExprPool& pool) : pool_(pool) {}

  SC run(ExprRef e, int depth) {
    auto key = std::make_pair(e, depth);
    if (auto it = memo_.find(key); it != memo_.end()) return it->second;
    SC c = compute(e, depth);
    memo_[key] = c;
    return c;
  }

 private:
  struct KeyHash {
    size_t operator()(const std::pair<ExprRef, int>& k) const {
      return std::hash<const void*>()(k.first) * 31 + static_cast<size_t>(k.second);
    }
  };

  SC compute(ExprRef e, int depth) {
    if (e->dom != 0) return SC::Random;  // RAND
    if ((e->supp & pool_.secret_inputs()) == 0) return SC::Public;  // PUB1
    if (e->kind == Expr::Kind::Unary) return run(e->a, depth);
    if (e->kind != Expr::Kind::Binary) return SC::Secret;

    ExprRef t[2] = {e->a, e->b};
    SC c[2] = {run(t[0], 0), run(t[1], 0)};
    const bool x = e->op == Opcode::Xor;
    const bool gf = e->op == Opcode::GfMul;
    const bool circ = !x && !gf;
    const InputSet rnd = pool_.random_inputs();

    // PUB2
    if (c[0] == SC::Public && c[1] == SC::Public && (t[0]->supp & t[1]->supp) == 0) {
      return SC::Public;
    }
    // PUB3
    if (circ && c[0] == SC::Random && c[1] == SC::Random &&
        ((t[0]->dom & ~t[1]->supp) != 0 || (t[1]->dom & ~t[0]->supp) != 0)) {
      return SC::Public;
    }
    // PUB4
    if (gf && c[0] == SC::Random && c[1] == SC::Random &&
        ((t[0]->dom & ~t[1]->dom) != 0 || (t[1]->dom & ~t[0]->dom) != 0)) {
      return SC::Public;
    }
    for (int i = 0; i < 2; ++i) {
      int j = 1 - i;
      // PUB5
      if (c[i] == SC::Random && (t[i]->dom & ~t[j]->supp) == 0 && t[i]->dom == t[j]->dom &&
          t[i]->supp == t[j]->supp) {
        return SC::Public;
      }
      // PUB6
      if (gf && c[i] == SC::Random && c[j] == SC::Public && (t[i]->dom & ~t[j]->supp) != 0) {
        return SC::Public;
      }
      // PUB7
      if (circ && c[i] == SC::Public && c[j] == SC::Random && (t[i]->supp & t[j]->supp) == 0) {
        return SC::Public;
      }
      // PUB8: t_i = t_j * u
      if (x && is_op(t[i], Opcode::GfMul)) {
        if (ExprRef u = other_child(t[i], t[j])) {
          if (c[j] != SC::Secret && run(u, 0) != SC::Secret) return SC::Public;
        }
      }
    }
    // PUB9
    if (x && c[0] == SC::Public && c[1] == SC::Public &&
        (t[0]->supp & t[1]->supp & rnd) == 0) {
      return SC::Public;
    }
    if (!x || depth >= kRewriteDepth) return SC::Secret;

    for (int i = 0; i < 2; ++i) {
      ExprRef n = t[i];
      ExprRef o = t[1 - i];
      if (n->kind != Expr::Kind::Binary) continue;
      ExprRef u = other_child(n, o);
      if (!u) continue;
      SC r = SC::Secret;
      if (n->op == Opcode::Xor) {  // NEST1: (o ^ u) ^ o
        r = run(u, depth + 1);
      } else if (n->op == Opcode::Or) {  // NEST2: (o | u) ^ o = ~o & u
        r = run(pool_.binary(Opcode::And, pool_.unary(Opcode::Not, o), u), depth + 1);
      } else if (n->op == Opcode::And) {  // NEST3: (o & u) ^ o = o & ~u
        r = run(pool_.binary(Opcode::And, o, pool_.unary(Opcode::Not, u)), depth + 1);
      }
      if (r != SC::Secret) return r;
    }
    // DISTR0-3: (f*g) ^ (f*h) = f * (g ^ h), shared factor in any position.
    if (is_op(t[0], Opcode::GfMul) && is_op(t[1], Opcode::GfMul)) {
      for (ExprRef f : {t[0]->a, t[0]->b}) {
        ExprRef g = other_child(t[0], f);
        ExprRef h = other_child(t[1], f);
        if (!h) continue;
        SC r = run(pool_.binary(Opcode::GfMul, f, pool_.binary(Opcode::Xor, g, h)), depth + 1);
        if (r != SC::Secret) return r;
      }
    }
    return SC::Secret;
  }

  ExprPool& pool_;
  std::unordered_map<std::pair<ExprRef, int>, SC, KeyHash> memo_;
};

}  // namespace

ExprPool::ExprPool(std::vector<SecurityClass> input_classes, std::vector<std::string> input_names,
                   int width)
    : classes_(std::move(input_classes)), names_(std::move(input_names)), width_(width) {
  if (classes_.size() > 64) throw std::invalid_argument("at most 64 inputs");
  for (size_t i = 0; i < classes_.size(); ++i) {
    if (classes_[i] == SecurityClass::Secret) secret_ |= 1ULL << i;
    if (classes_[i] == SecurityClass::Random) random_ |= 1ULL << i;
  }
}

ExprRef ExprPool::intern(Expr e) {
  auto key = std::make_tuple(static_cast<int>(e.kind), static_cast<int>(e.op),
                             static_cast<const void*>(e.a), static_cast<const void*>(e.b),
                             e.input, e.value);
  if (auto it = index_.find(key); it != index_.end()) return it->second;
  nodes_.push_back(e);
  ExprRef r = &nodes_.back();
  index_.emplace(key, r);
  return r;
}

ExprRef ExprPool::input(int index) {
  Expr e;
  e.kind = Expr::Kind::Input;
  e.input = index;
  InputSet bit = 1ULL << index;
  e.supp = e.vars = bit;
  if (classes_.at(index) == SecurityClass::Random) e.unq = e.dom = bit;
  return intern(e);
}

ExprRef ExprPool::constant(std::uint64_t v) {
  Expr e;
  e.kind = Expr::Kind::Const;
  e.op = Opcode::Xor;
  e.value = v & word_mask(width_);
  return intern(e);
}

ExprRef ExprPool::unary(Opcode op, ExprRef a) {
  Expr e = *a;
  e.kind = Expr::Kind::Unary;
  e.op = op;
  e.a = a;
  e.b = nullptr;
  e.input = -1;
  e.value = 0;
  return intern(e);
}

ExprRef ExprPool::binary(Opcode op, ExprRef a, ExprRef b) {
  Expr e;
  e.kind = Expr::Kind::Binary;
  e.op = op;
  e.a = a;
  e.b = b;
  const bool x = op == Opcode::Xor;
  e.xor_only = x && a->xor_only && b->xor_only;
  e.vars = a->vars | b->vars;
  if (x && e.xor_only) {
    e.supp = a->supp ^ b->supp;
  } else if (x && b->is_xor() && other_child(b, a)) {
    e.supp = other_child(b, a)->supp;
  } else if (x && a->is_xor() && other_child(a, b)) {
    e.supp = other_child(a, b)->supp;
  } else {
    e.supp = a->supp | b->supp;
  }
  e.unq = (a->unq | b->unq) & ~(a->supp & b->supp);
  e.dom = x ? ((a->dom | b->dom) & e.unq) : 0;
  return intern(e);
}

std::string ExprPool::to_string(ExprRef e) const {
  switch (e->kind) {
    case Expr::Kind::Input: return names_.at(e->input);
    case Expr::Kind::Const: {
      std::ostringstream os;
      os << "0x" << std::hex << e->value;
      return os.str();
    }
    case Expr::Kind::Unary: return "~" + to_string(e->a);
    case Expr::Kind::Binary:
      return "(" + to_string(e->a) + " " + op_symbol(e->op) + " " + to_string(e->b) + ")";
  }
  return "?";
}

std::vector<std::string> ExprPool::names(InputSet s) const {
  std::vector<std::string> out;
  for (int i = 0; i < num_inputs(); ++i) {
    if (s >> i & 1) out.push_back(names_[i]);
  }
  return out;
}

std::uint64_t ExprPool::evaluate(ExprRef e, const std::vector<std::uint64_t>& in) const {
  switch (e->kind) {
    case Expr::Kind::Input: return in.at(e->input) & word_mask(width_);
    case Expr::Kind::Const: return e->value;
    case Expr::Kind::Unary: return eval_op(e->op, evaluate(e->a, in), 0, width_);
    case Expr::Kind::Binary:
      return eval_op(e->op, evaluate(e->a, in), evaluate(e->b, in), width_);
  }
  return 0;
}

bool xor_only(ExprRef e) { return e->xor_only; }
InputSet supp(ExprRef e) { return e->supp; }
InputSet unq(ExprRef e) { return e->unq; }
InputSet dom(ExprRef e) { return e->dom; }

SecurityClass classify(ExprPool& pool, ExprRef e) { return Classifier(pool).run(e, 0); }

SecurityClass classify_transition(const ExprPool& pool, ExprRef e1, ExprRef e2) {
  InputSet shared = e1->vars & e2->vars;
  InputSet u = (e1->unq | e2->unq) & ~shared;
  InputSet d = (e1->dom | e2->dom) & u;
  if (d != 0) return SC::Random;
  if (((e1->vars | e2->vars) & pool.secret_inputs()) == 0) return SC::Public;
  return SC::Secret;
}

std::string_view to_string(TempKind k) {
  switch (k) {
    case TempKind::Input: return "input";
    case TempKind::Def: return "def";
    case TempKind::Copy: return "copy";
    case TempKind::Reload: return "reload";
    case TempKind::Pseudo: return "pseudo";
  }
  return "?";
}

std::shared_ptr<ExprPool> make_pool(const Program& p) {
  std::vector<SecurityClass> classes;
  std::vector<std::string> names;
  for (const auto& in : p.inputs) {
    classes.push_back(in.cls);
    names.push_back(p.temp_name(in.temp));
  }
  return std::make_shared<ExprPool>(std::move(classes), std::move(names), p.width);
}

std::vector<ExprRef> build_exprs(ExprPool& pool, const Program& p) {
  std::vector<ExprRef> ex(p.num_temps(), nullptr);
  for (size_t i = 0; i < p.inputs.size(); ++i) ex[p.inputs[i].temp] = pool.input(static_cast<int>(i));
  auto operand = [&](const Operand& o) {
    return o.is_temp() ? ex.at(o.temp) : pool.constant(o.value);
  };
  for (size_t i = 0; i < p.body.size(); ++i) {
    const IrOperation& op = p.body[i];
    if (!op.def) continue;
    ExprRef e = nullptr;
    if (op.opcode == Opcode::Load) {
      int st = resolve_load(p, static_cast<int>(i));
      if (st < 0) throw std::invalid_argument("unresolved load in " + p.name);
      e = operand(p.body[st].uses.at(1));
    } else if (op.opcode == Opcode::Copy) {
      e = operand(op.uses.at(0));
    } else if (is_unary(op.opcode)) {
      e = pool.unary(op.opcode, operand(op.uses.at(0)));
    } else {
      e = pool.binary(op.opcode, operand(op.uses.at(0)), operand(op.uses.at(1)));
    }
    ex[*op.def] = e;
  }
  return ex;
}

TypeEnv infer_types(const Program& p, const std::vector<TempInfo>& temps) {
  TypeEnv env;
  env.pool = make_pool(p);
  env.temps = temps;
  auto ex = build_exprs(*env.pool, p);
  Classifier cl(*env.pool);
  for (const auto& t : temps) {
    ExprRef e = ex.at(t.source);
    env.expr.push_back(e);
    env.cls.push_back(cl.run(e, 0));
  }
  return env;
}

TypeEnv infer_types(const Program& p) {
  std::vector<TempInfo> temps;
  for (int t = 0; t < p.num_temps(); ++t) {
    temps.push_back({p.temp_name(t), p.input_index(t) >= 0 ? TempKind::Input : TempKind::Def, t});
  }
  return infer_types(p, temps);
}

}  // namespace maskcg
