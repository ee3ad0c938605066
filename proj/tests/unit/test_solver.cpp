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

#include <gtest/gtest.h>

#include <set>

#include "maskcg/model.hpp"
#include "maskcg/solver.hpp"
#include "support.hpp"

namespace maskcg {
namespace {

using testing::Case;
using testing::describe_case;
using testing::fixture;

std::string show(const std::vector<Violation>& v) {
  std::string out;
  for (const auto& x : v) out += std::string(to_string(x.family)) + ": " + x.message + "\n";
  return out;
}

class XorOverhead : public ::testing::TestWithParam<const char*> {};

TEST_P(XorOverhead, SecureMatchesInsecure) {
  Program p = fixture("xor");
  TargetDesc t = preset_target(GetParam());
  SolveOutcome a = solve(build_model(p, t, false, false));
  SolveOutcome b = solve(build_model(p, t, true, true));
  ASSERT_EQ(a.status, SolveStatus::Optimal);
  ASSERT_EQ(b.status, SolveStatus::Optimal);
  EXPECT_EQ(a.solution->objective, b.solution->objective);
}

INSTANTIATE_TEST_SUITE_P(Presets, XorOverhead, ::testing::Values("thumb-like", "mips-like"));

class SecureCase : public ::testing::TestWithParam<Case> {};

TEST_P(SecureCase, SolutionSatisfiesModel) {
  const Case& c = GetParam();
  ExtendedModel m = build_model(fixture(c.fixture), preset_target(c.target), true, true, c.options);
  SolveOutcome r = solve(m);
  ASSERT_TRUE(r.solution) << to_string(r.status);
  EXPECT_EQ(r.status, SolveStatus::Optimal);
  auto v = check(m, *r.solution);
  EXPECT_TRUE(v.empty()) << show(v) << describe(m, *r.solution);
  Solution again = *r.solution;
  derive(m, again);
  EXPECT_EQ(again, *r.solution);
}

TEST_P(SecureCase, NoBetterThanBase) {
  const Case& c = GetParam();
  Program p = fixture(c.fixture);
  TargetDesc t = preset_target(c.target);
  SolveOutcome a = solve(build_model(p, t, false, false, c.options));
  SolveOutcome b = solve(build_model(p, t, true, true, c.options));
  ASSERT_TRUE(a.solution && b.solution);
  EXPECT_LE(a.solution->objective, b.solution->objective);
}

TEST_P(SecureCase, Deterministic) {
  const Case& c = GetParam();
  ExtendedModel m = build_model(fixture(c.fixture), preset_target(c.target), true, true, c.options);
  EXPECT_EQ(solve(m).solution, solve(m).solution);
}

INSTANTIATE_TEST_SUITE_P(Fixtures, SecureCase, ::testing::ValuesIn(testing::secure_cases()),
                         [](const auto& info) {
                           std::string n = describe_case(info.param);
                           for (char& ch : n) {
                             if (!std::isalnum(static_cast<unsigned char>(ch))) ch = '_';
                           }
                           return n;
                         });

TEST(Solver, InfeasibleNamesSpairs) {
  ExtendedModel m = build_model(fixture("infeasible"), preset_target("thumb-like"), true, true);
  SolveOutcome r = solve(m);
  EXPECT_EQ(r.status, SolveStatus::Infeasible);
  EXPECT_FALSE(r.solution);
  EXPECT_EQ(r.infeasible_group, "Spairs");
}

TEST(Solver, InfeasibleBaseIsFeasible) {
  ExtendedModel m = build_model(fixture("infeasible"), preset_target("thumb-like"), false, false);
  EXPECT_EQ(solve(m).status, SolveStatus::Optimal);
}

TEST(Solver, NodeBudgetTimesOut) {
  ExtendedModel m = build_model(fixture("trichina_and"), preset_target("mips-like"), true, true);
  SolveOutcome r = solve(m, SolveBudget{1, 60.0});
  EXPECT_EQ(r.status, SolveStatus::Timeout);
  EXPECT_FALSE(r.solution);
  EXPECT_LE(r.nodes, 2);
}

TEST(Solver, TimeBudgetIsHonoured) {
  ExtendedModel m = build_model(fixture("secmult"), preset_target("mips-like"), true, true);
  SolveOutcome r = solve(m, SolveBudget{1'000'000'000, 0.0});
  EXPECT_NE(r.status, SolveStatus::Optimal);
  EXPECT_NE(r.status, SolveStatus::Infeasible);
}

TEST(Solver, EnumerateXor) {
  ModelOptions o = testing::copies_of({"t6"}, true, false);
  ExtendedModel m = build_model(fixture("xor"), preset_target("mips-like"), true, true, o);
  auto all = enumerate(m);
  ASSERT_TRUE(all);
  ASSERT_FALSE(all->empty());
  std::set<Solution> distinct(all->begin(), all->end());
  EXPECT_EQ(distinct.size(), all->size());
  int best = all->front().objective;
  for (const auto& s : *all) {
    EXPECT_TRUE(check(m, s).empty()) << describe(m, s);
    best = std::min(best, s.objective);
  }
  EXPECT_EQ(best, solve(m).solution->objective);
  auto some = enumerate(m, 2);
  ASSERT_TRUE(some);
  EXPECT_EQ(some->size(), std::min<size_t>(2, all->size()));
}

TEST(Solver, EnumerateBudget) {
  ExtendedModel m = build_model(fixture("secmult"), preset_target("mips-like"), false, false);
  EXPECT_FALSE(enumerate(m, SIZE_MAX, SolveBudget{10, 60.0}));
}

TEST(Solver, NaiveSolution) {
  for (const char* name : {"xor", "goubin", "secmult", "trichina_and", "load_store"}) {
    ExtendedModel m = build_model(fixture(name), preset_target("mips-like"), false, false);
    auto s = naive_solution(m);
    ASSERT_TRUE(s) << name;
    EXPECT_TRUE(check(m, *s).empty()) << name << "\n" << show(check(m, *s));
  }
}

TEST(Solver, StatusNames) {
  EXPECT_EQ(to_string(SolveStatus::Optimal), "optimal");
  EXPECT_EQ(to_string(SolveStatus::Timeout), "timeout");
}

}  // namespace
}  // namespace maskcg
