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

// Sets of temps and memory operations whose adjacency must be controlled.

#ifndef MASKCG_SECSETS_HPP_
#define MASKCG_SECSETS_HPP_

#include <map>
#include <set>
#include <utility>
#include <vector>

#include "maskcg/typeinf.hpp"

namespace maskcg {

// A potential memory operation and the temp whose value crosses the bus.
struct MemOp {
  OpId op = -1;
  TempId data = -1;
};

struct SecuritySets {
  // Unordered pairs stored with first < second.
  std::set<std::pair<TempId, TempId>> rpairs;
  // Secret temp -> temps that may sit next to it in a register.
  std::map<TempId, std::set<TempId>> spairs;
  // Secret input -> temps allowed to overwrite it. Inputs start out in
  // registers, so only the following neighbour can be chosen.
  std::map<TempId, std::set<TempId>> entry;
  std::set<std::pair<OpId, OpId>> mmpairs;
  std::map<OpId, std::set<OpId>> mspairs;
  std::map<OpId, TempId> tm;

  bool empty() const {
    return rpairs.empty() && spairs.empty() && entry.empty() && mmpairs.empty() &&
           mspairs.empty();
  }
  bool has_rpair(TempId a, TempId b) const {
    return rpairs.count({std::min(a, b), std::max(a, b)}) != 0;
  }
  bool has_mmpair(OpId a, OpId b) const {
    return mmpairs.count({std::min(a, b), std::max(a, b)}) != 0;
  }
};

SecurityClass xor_class(const TypeEnv& env, TempId t1, TempId t2);

std::set<std::pair<TempId, TempId>> compute_rpairs(const TypeEnv& env);
std::map<TempId, std::set<TempId>> compute_spairs(const TypeEnv& env);
std::map<TempId, std::set<TempId>> compute_entry(const TypeEnv& env);
std::set<std::pair<OpId, OpId>> compute_mmpairs(const TypeEnv& env, const std::vector<MemOp>& memops);
std::map<OpId, std::set<OpId>> compute_mspairs(const TypeEnv& env, const std::vector<MemOp>& memops);

SecuritySets compute_security_sets(const TypeEnv& env, const std::vector<MemOp>& memops);

}  // namespace maskcg

#endif  // MASKCG_SECSETS_HPP_
