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

// Generate-and-test reference for small models. Shares the Solution type
// and the constraint checker with the model, nothing with the solver.

#ifndef MASKCG_ORACLE_HPP_
#define MASKCG_ORACLE_HPP_

#include <cstdint>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "maskcg/model.hpp"
#include "maskcg/solver.hpp"

namespace maskcg {

inline constexpr int kOracleBound = 8;

class OracleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

int count_ops(const ExtendedModel& m);

struct BruteForce {
  std::vector<Solution> solutions;  // sorted
  std::optional<int> optimum;
  std::uint64_t candidates = 0;     // complete assignments handed to the checker
};

// Every solution of m. Throws OracleError when m has more than bound
// non-pseudo operations.
BruteForce brute_force(const ExtendedModel& m, int bound = kOracleBound);

// Pairs of temps written one after the other to the same location,
// found by walking the linearized solution.
std::set<std::pair<TempId, TempId>> trace_subseq(const ExtendedModel& m, const Solution& s);
// Consecutive memory operations of the linearized solution.
std::set<std::pair<OpId, OpId>> trace_msubseq(const ExtendedModel& m, const Solution& s);

std::set<std::pair<TempId, TempId>> predicate_subseq(const ExtendedModel& m, const Solution& s);
std::set<std::pair<OpId, OpId>> predicate_msubseq(const ExtendedModel& m, const Solution& s);

struct Discrepancy {
  std::string kind;
  std::string detail;
};

struct OracleReport {
  std::string program;
  std::string target;
  int ops = 0;
  std::optional<int> insecure_optimum, secure_optimum;
  std::optional<int> solver_insecure, solver_secure;
  std::size_t insecure_solutions = 0, secure_solutions = 0;
  std::size_t solutions_checked = 0;  // for the trace characterizations
  std::vector<Discrepancy> discrepancies;
};

// Cross-checks solver, enumeration and the predicates against brute force
// on the base model and the extended model with and without implied
// constraints.
OracleReport cross_check(const Program& p, const TargetDesc& t, const ModelOptions& options,
                         int bound = kOracleBound, const SolveBudget& budget = {});

}  // namespace maskcg

#endif  // MASKCG_ORACLE_HPP_
