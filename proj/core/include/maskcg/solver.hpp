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

// Branch and bound over issue orders.
//
// Each search node issues one operation at the earliest compact cycle,
// picks its operand temps and the location of its definition. Security
// constraints are checked when a location is overwritten and again at
// the leaves.

#ifndef MASKCG_SOLVER_HPP_
#define MASKCG_SOLVER_HPP_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "maskcg/model.hpp"

namespace maskcg {

struct SolveBudget {
  std::int64_t max_nodes = 5'000'000;
  double seconds = 60.0;
};

enum class SolveStatus : std::uint8_t { Optimal, Feasible, Infeasible, Timeout };

std::string_view to_string(SolveStatus s);

struct SolveOutcome {
  SolveStatus status = SolveStatus::Timeout;
  std::optional<Solution> solution;
  std::int64_t nodes = 0;
  double seconds = 0;
  // Constraint group that makes the model infeasible, when one was found.
  std::string infeasible_group;
};

SolveOutcome solve(const ExtendedModel& m, const SolveBudget& budget = {});

// All solutions of m, up to limit. Returns nullopt when the budget runs out.
std::optional<std::vector<Solution>> enumerate(const ExtendedModel& m, std::size_t limit = SIZE_MAX,
                                               const SolveBudget& budget = {});

// Source order, no copies, first register that is free, no security.
std::optional<Solution> naive_solution(const ExtendedModel& m, const SolveBudget& budget = {});

}  // namespace maskcg

#endif  // MASKCG_SOLVER_HPP_
