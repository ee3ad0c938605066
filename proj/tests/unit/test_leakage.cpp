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

#include <random>

#include "maskcg/leakage.hpp"
#include "maskcg/solver.hpp"
#include "support.hpp"

namespace maskcg {
namespace {

using testing::fixture;

const char* kWorked = R"(.func worked
.target t
.width 4
.registers R0 R1 R2 R3
.slots 0
.in R0 v1 public
.in R2 v2 public
.in R3 v3 public
.out R1
    mov     R1, R0
    store   0xa, R2
    mov     R1, R3
    store   0xb, R1
)";

// t6 written over t1 in R1: the value leaked is HW(k).
const char* kVulnerableXor = R"(.func xor
.target thumb-like
.width 4
.registers R0 R1 R2 R3 R4 R5 R6 R7
.slots 0
.in R0 p public
.in R1 m random
.in R2 k secret
.out R0
    xor     R1, R1, R2
    xor     R0, R0, R1
)";

AsmProgram secure_xor() {
  ExtendedModel m = build_model(fixture("xor"), preset_target("thumb-like"), true, true);
  return to_asm(m, *solve(m).solution);
}

std::vector<int> values(const LeakTrace& t) {
  std::vector<int> v;
  for (const auto& o : t) v.push_back(o.value);
  return v;
}

TEST(Leakage, HammingWeight) {
  EXPECT_EQ(hw(0), 0);
  EXPECT_EQ(hw(0b1010), 2);
  EXPECT_EQ(hw(0xFF), 8);
}

TEST(Leakage, WorkedExample) {
  AsmProgram a = parse_asm(kWorked);
  LeakTrace t = simulate(a, {0b0011, 0b0101, 0b1111});
  ASSERT_EQ(t.size(), 4u);
  EXPECT_EQ(values(t), (std::vector<int>{2, 2, 2, 2}));
  EXPECT_EQ(t[0].kind, LeakKind::ROT);
  EXPECT_EQ(t[1].kind, LeakKind::MRE);
  EXPECT_EQ(t[3].kind, LeakKind::MRE);
}

TEST(Leakage, WorkedExampleSymbolic) {
  AsmProgram a = parse_asm(kWorked);
  std::mt19937_64 rng(7);
  for (int i = 0; i < 50; ++i) {
    std::uint64_t v1 = rng() & 0xF, v2 = rng() & 0xF, v3 = rng() & 0xF;
    LeakTrace t = simulate(a, {v1, v2, v3});
    EXPECT_EQ(values(t), (std::vector<int>{hw(v1), hw(v2), hw(v3 ^ v1), hw(v3 ^ v2)}));
  }
}

TEST(Leakage, LoadEmitsBusThenRegister) {
  AsmProgram a = parse_asm(R"(.func f
.target t
.width 4
.registers R0 R1
.slots 0
.in R0 x public
.out R1
    store   0x10, R0
    load    R1, 0x10
)");
  LeakTrace t = simulate(a, std::vector<std::uint64_t>{0x7});
  ASSERT_EQ(t.size(), 3u);
  EXPECT_EQ(t[1].kind, LeakKind::MRE);
  EXPECT_EQ(t[2].kind, LeakKind::ROT);
  EXPECT_EQ(t[1].instr, 1);
  EXPECT_EQ(t[2].instr, 1);
  EXPECT_EQ(values(t), (std::vector<int>{3, 0, 3}));
}

TEST(Leakage, InitialState) {
  AsmProgram a = parse_asm(kVulnerableXor);
  MachineState st = MachineState::initial(a, {1, 2, 3});
  EXPECT_EQ(st.regs[0], 1u);
  EXPECT_EQ(st.regs[2], 3u);
  EXPECT_EQ(st.regs[5], 0u);
  EXPECT_EQ(st.bus, 0u);
  auto [end, trace] = simulate(a, st);
  EXPECT_EQ(end.regs[1], 2u ^ 3u);
  EXPECT_EQ(end.regs[0], 1u ^ 2u ^ 3u);
  EXPECT_EQ(trace.size(), 2u);
}

TEST(Leakage, VulnerableXorLeaksKey) {
  AsmProgram a = parse_asm(kVulnerableXor);
  for (std::uint64_t k = 0; k < 16; ++k) {
    LeakStats s = leak_stats(a, {0}, {k}, Sampling::all());
    ASSERT_TRUE(s.exact);
    EXPECT_EQ(s.samples, 16u);
    EXPECT_EQ(s.positions[0].mean, Rational(hw(k)));
    EXPECT_EQ(s.positions[0].var, Rational(0));
  }
  Verdict v = check_equivalence(a, {0}, {0x0}, {0xF}, Sampling::all());
  EXPECT_FALSE(v.equivalent);
  ASSERT_FALSE(v.differing.empty());
  EXPECT_EQ(v.differing[0].position, 0);
  EXPECT_EQ(v.differing[0].dmean_q, Rational(4));
}

TEST(Leakage, SecureXorIsEquivalent) {
  AsmProgram a = secure_xor();
  for (std::uint64_t k = 0; k < 16; ++k) {
    LeakStats s = leak_stats(a, {0}, {k}, Sampling::all());
    EXPECT_EQ(s.positions[0].mean, Rational(2));
    EXPECT_EQ(s.positions[0].var, Rational(1));
  }
  Verdict v = check_equivalence(a, {0}, {0x0}, {0xF}, Sampling::all());
  EXPECT_TRUE(v.equivalent);
  EXPECT_TRUE(v.differing.empty());
  EXPECT_EQ(v.dsum_mean, Rational(0));
}

TEST(Leakage, SameSecretIsEquivalent) {
  AsmProgram a = parse_asm(kVulnerableXor);
  EXPECT_TRUE(check_equivalence(a, {3}, {0x5}, {0x5}, Sampling::all()).equivalent);
}

TEST(Leakage, NoRandomnessNoVariance) {
  AsmProgram a = parse_asm(kWorked);
  LeakStats s = leak_stats(a, {1, 2, 3}, {}, Sampling::all());
  EXPECT_EQ(s.samples, 1u);
  for (const auto& p : s.positions) EXPECT_EQ(p.var, Rational(0));
}

TEST(Leakage, MonteCarlo) {
  AsmProgram a = parse_asm(kVulnerableXor);
  Verdict bad = check_equivalence(a, {0}, {0x0}, {0xF}, Sampling::monte_carlo(2000, 3));
  EXPECT_FALSE(bad.first.exact);
  EXPECT_FALSE(bad.equivalent);
  Verdict good = check_equivalence(secure_xor(), {0}, {0x0}, {0xF}, Sampling::monte_carlo(2000, 3));
  EXPECT_TRUE(good.equivalent);
  // Matched seeds give identical statistics.
  LeakStats s1 = leak_stats(a, {0}, {1}, Sampling::monte_carlo(500, 9));
  LeakStats s2 = leak_stats(a, {0}, {1}, Sampling::monte_carlo(500, 9));
  EXPECT_EQ(s1.sum_mean_f, s2.sum_mean_f);
  EXPECT_EQ(s1.sum_var_f, s2.sum_var_f);
}

TEST(Leakage, ExhaustiveBound) {
  AsmProgram a = parse_asm(kVulnerableXor);
  a.width = 32;
  EXPECT_THROW(leak_stats(a, {0}, {1}, Sampling::all()), LeakageError);
}

TEST(Leakage, AssembleInputs) {
  AsmProgram a = parse_asm(kVulnerableXor);
  EXPECT_EQ(assemble_inputs(a, {0xA}, {0xB}, {0xC}), (std::vector<std::uint64_t>{0xA, 0xC, 0xB}));
  EXPECT_THROW(assemble_inputs(a, {}, {0xB}, {0xC}), LeakageError);
  EXPECT_THROW(assemble_inputs(a, {1, 2}, {0xB}, {0xC}), LeakageError);
}

TEST(Leakage, RecursiveMatchesSimulation) {
  std::mt19937_64 rng(11);
  for (const auto& c : testing::secure_cases()) {
    ExtendedModel m = build_model(fixture(c.fixture), preset_target(c.target), true, true, c.options);
    for (bool secure : {true, false}) {
      ExtendedModel mm = secure ? m : build_model(fixture(c.fixture), preset_target(c.target), false, false, c.options);
      SolveOutcome r = solve(mm);
      ASSERT_TRUE(r.solution);
      AsmProgram a = to_asm(mm, *r.solution);
      for (int i = 0; i < 20; ++i) {
        std::vector<std::uint64_t> in;
        for (size_t j = 0; j < a.inputs.size(); ++j) in.push_back(rng() & 0xF);
        MachineState st = MachineState::initial(a, in);
        EXPECT_EQ(recursive_leakage(a, st), values(simulate(a, st).second))
            << testing::describe_case(c);
      }
    }
  }
  AsmProgram w = parse_asm(kWorked);
  MachineState st = MachineState::initial(w, {3, 5, 15});
  EXPECT_EQ(recursive_leakage(w, st), (std::vector<int>{2, 2, 2, 2}));
}

}  // namespace
}  // namespace maskcg
