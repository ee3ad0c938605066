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

#include "maskcg/secsets.hpp"

namespace maskcg {

namespace {

using SC = SecurityClass;

// Temps that can be written by an instruction. Inputs are written by the
// caller and pseudo temps never reach a register.
bool writable(const TypeEnv& env, TempId t) { return !env.is_input(t) && !env.is_pseudo(t); }

}  // namespace

SecurityClass xor_class(const TypeEnv& env, TempId t1, TempId t2) {
  if (t1 == t2) return SC::Public;
  return classify_transition(*env.pool, env.expr.at(t1), env.expr.at(t2));
}

std::set<std::pair<TempId, TempId>> compute_rpairs(const TypeEnv& env) {
  std::set<std::pair<TempId, TempId>> out;
  for (TempId a = 0; a < env.size(); ++a) {
    if (env.is_pseudo(a) || env.type(a) == SC::Secret) continue;
    for (TempId b = a + 1; b < env.size(); ++b) {
      if (env.is_pseudo(b) || env.type(b) == SC::Secret) continue;
      if (xor_class(env, a, b) == SC::Secret) out.insert({a, b});
    }
  }
  return out;
}

std::map<TempId, std::set<TempId>> compute_spairs(const TypeEnv& env) {
  std::map<TempId, std::set<TempId>> out;
  for (TempId s = 0; s < env.size(); ++s) {
    if (!writable(env, s) || env.type(s) != SC::Secret) continue;
    auto& hiders = out[s];
    for (TempId r = 0; r < env.size(); ++r) {
      if (!writable(env, r) || env.type(r) != SC::Random) continue;
      if (xor_class(env, r, s) == SC::Random) hiders.insert(r);
    }
  }
  return out;
}

std::map<TempId, std::set<TempId>> compute_entry(const TypeEnv& env) {
  std::map<TempId, std::set<TempId>> out;
  for (TempId s = 0; s < env.size(); ++s) {
    if (!env.is_input(s) || env.type(s) != SC::Secret) continue;
    auto& next = out[s];
    for (TempId r = 0; r < env.size(); ++r) {
      if (writable(env, r) && xor_class(env, s, r) != SC::Secret) next.insert(r);
    }
  }
  return out;
}

std::set<std::pair<OpId, OpId>> compute_mmpairs(const TypeEnv& env, const std::vector<MemOp>& memops) {
  std::set<std::pair<OpId, OpId>> out;
  for (size_t i = 0; i < memops.size(); ++i) {
    const MemOp& a = memops[i];
    if (env.type(a.data) == SC::Secret) continue;
    for (size_t j = i + 1; j < memops.size(); ++j) {
      const MemOp& b = memops[j];
      if (env.type(b.data) == SC::Secret) continue;
      if (xor_class(env, a.data, b.data) == SC::Secret) {
        out.insert({std::min(a.op, b.op), std::max(a.op, b.op)});
      }
    }
  }
  return out;
}

std::map<OpId, std::set<OpId>> compute_mspairs(const TypeEnv& env, const std::vector<MemOp>& memops) {
  std::map<OpId, std::set<OpId>> out;
  for (const MemOp& s : memops) {
    if (env.type(s.data) != SC::Secret) continue;
    auto& hiders = out[s.op];
    for (const MemOp& r : memops) {
      if (env.type(r.data) != SC::Random) continue;
      if (xor_class(env, r.data, s.data) == SC::Random) hiders.insert(r.op);
    }
  }
  return out;
}

SecuritySets compute_security_sets(const TypeEnv& env, const std::vector<MemOp>& memops) {
  SecuritySets s;
  s.rpairs = compute_rpairs(env);
  s.spairs = compute_spairs(env);
  s.entry = compute_entry(env);
  s.mmpairs = compute_mmpairs(env, memops);
  s.mspairs = compute_mspairs(env, memops);
  for (const MemOp& m : memops) s.tm[m.op] = m.data;
  return s;
}

}  // namespace maskcg
