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

#include <algorithm>

#include "maskcg/asm.hpp"
#include "maskcg/solver.hpp"
#include "support.hpp"

namespace maskcg {
namespace {

using testing::fixture;

AsmProgram compile_secure(const testing::Case& c) {
  ExtendedModel m = build_model(fixture(c.fixture), preset_target(c.target), true, true, c.options);
  SolveOutcome r = solve(m);
  if (!r.solution) throw std::runtime_error("no solution for " + testing::describe_case(c));
  return to_asm(m, *r.solution);
}

TEST(Asm, XorSecure) {
  AsmProgram a = compile_secure({"xor", "thumb-like", {}});
  EXPECT_EQ(a.name, "xor");
  EXPECT_EQ(a.target, "thumb-like");
  ASSERT_EQ(a.inputs.size(), 3u);
  EXPECT_EQ(a.inputs[2].cls, SecurityClass::Secret);
  ASSERT_EQ(a.code.size(), 2u);
  EXPECT_EQ(a.code[0].kind, AsmKind::Alu);
  EXPECT_EQ(a.code[0].dst, 2);
  EXPECT_EQ(a.outputs, std::vector<int>{0});
  std::string text = render_asm(a);
  EXPECT_NE(text.find("xor     R2, R1, R2"), std::string::npos) << text;
}

TEST(Asm, OneInstructionPerActiveOperation) {
  for (const auto& c : testing::secure_cases()) {
    ExtendedModel m = build_model(fixture(c.fixture), preset_target(c.target), true, true, c.options);
    SolveOutcome r = solve(m);
    ASSERT_TRUE(r.solution);
    AsmProgram a = to_asm(m, *r.solution);
    int active = 0;
    for (const auto& op : m.ops) active += r.solution->active[op.id] && !op.is_pseudo();
    EXPECT_EQ(static_cast<int>(a.code.size()), active) << testing::describe_case(c);
    EXPECT_TRUE(std::is_sorted(a.code.begin(), a.code.end(),
                               [](const AsmInstr& x, const AsmInstr& y) { return x.cycle < y.cycle; }));
    for (const auto& in : a.code) {
      for (int s : in.src) EXPECT_LT(s, a.num_registers() + a.stack_slots);
    }
  }
}

TEST(Asm, RoundTrip) {
  for (const auto& c : testing::secure_cases()) {
    AsmProgram a = compile_secure(c);
    AsmProgram b = parse_asm(render_asm(a));
    EXPECT_EQ(a, b) << testing::describe_case(c) << "\n" << render_asm(a);
    EXPECT_EQ(render_asm(a), render_asm(b));
  }
}

TEST(Asm, SpillsOnTiny) {
  AsmProgram a = compile_secure({"spill_pressure", "tiny", {}});
  bool spill = false, reload = false;
  for (const auto& in : a.code) {
    spill = spill || in.kind == AsmKind::Spill;
    reload = reload || in.kind == AsmKind::Reload;
  }
  EXPECT_TRUE(spill && reload) << render_asm(a);
}

TEST(Asm, MemoryInstructions) {
  AsmProgram a = parse_asm(R"(.func f
.target t
.width 4
.registers R0 R1
.slots 1
.in R0 x secret
.out R1
    store   0x10, R0
    load    R1, 0x10
    spill   S0, R1
    reload  R0, S0
)");
  ASSERT_EQ(a.code.size(), 4u);
  EXPECT_EQ(a.code[0].kind, AsmKind::Store);
  EXPECT_EQ(a.code[0].imm, 0x10u);
  EXPECT_EQ(a.code[1].kind, AsmKind::Load);
  EXPECT_EQ(a.code[1].dst, 1);
  EXPECT_EQ(a.code[2].dst, 2);
  EXPECT_TRUE(a.code[3].is_memory());
  EXPECT_EQ(a.location("S0"), 2);
  EXPECT_EQ(a.location("R9"), -1);
}

TEST(Asm, Errors) {
  const std::string head = ".func f\n.target t\n.width 4\n.registers R0 R1\n.slots 1\n.out R0\n";
  EXPECT_THROW(parse_asm(head + "    frob R0, R1\n"), AsmError);
  EXPECT_THROW(parse_asm(head + "    xor R0, R7, R1\n"), AsmError);
  EXPECT_THROW(parse_asm(head + "    mov R0\n"), AsmError);
  EXPECT_THROW(parse_asm(head + "    spill R0, R1\n"), AsmError);
  EXPECT_THROW(parse_asm(".func f\n    mov R0, R1\n"), AsmError);
  EXPECT_THROW(parse_asm(head + ".in R0 x hidden\n"), AsmError);
}

}  // namespace
}  // namespace maskcg
