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

#include "maskcg/model.hpp"
#include "maskcg/solver.hpp"
#include "support.hpp"

namespace maskcg {
namespace {

using testing::fixture;
using testing::op;
using testing::temp;
using testing::naive_xor;
using testing::copied_xor;
using testing::place;
using testing::select;

std::string violations(const ExtendedModel& m, const std::vector<Violation>& v) {
  std::string out;
  for (const auto& x : v) out += std::string(to_string(x.family)) + ": " + x.message + "\n";
  (void)m;
  return out;
}

bool has_family(const std::vector<Violation>& v, Family f) {
  return std::any_of(v.begin(), v.end(), [&](const Violation& x) { return x.family == f; });
}

class XorModel : public ::testing::Test {
 protected:
  Program p = fixture("xor");
  TargetDesc thumb = preset_target("thumb-like");
  ExtendedModel base = build_model(p, thumb, false, false);
  ExtendedModel secure = build_model(p, thumb, true, true);
};

TEST_F(XorModel, Shape) {
  const std::vector<std::pair<const char*, OpKind>> want{
      {"o1", OpKind::In},   {"o2", OpKind::Copy}, {"o3", OpKind::Copy},
      {"o4", OpKind::Copy}, {"o5", OpKind::Body}, {"o6", OpKind::Copy},
      {"o7", OpKind::Body}, {"o8", OpKind::Copy}, {"o9", OpKind::Out}};
  for (const auto& [name, kind] : want) {
    const ModelOp& o = base.ops[op(base, name)];
    EXPECT_EQ(o.kind, kind) << name;
    EXPECT_EQ(o.mandatory, kind != OpKind::Copy) << name;
  }
  const ModelOp& o5 = base.ops[op(base, "o5")];
  ASSERT_EQ(o5.operands.size(), 2u);
  EXPECT_EQ(o5.operands[0].alternatives.front(), temp(base, "t1"));
  EXPECT_NE(std::find(o5.operands[0].alternatives.begin(), o5.operands[0].alternatives.end(),
                      temp(base, "t4")),
            o5.operands[0].alternatives.end());
  EXPECT_EQ(o5.defs, std::vector<TempId>{temp(base, "t6")});
  // One reload per copy.
  int reloads = static_cast<int>(std::count_if(base.ops.begin(), base.ops.end(),
                                               [](const ModelOp& o) { return o.kind == OpKind::Reload; }));
  EXPECT_EQ(reloads, 5);
  EXPECT_GT(base.maxc, 0);
  EXPECT_EQ(base.out_op(), op(base, "o9"));
}

TEST_F(XorModel, NoSpillsNoReloads) {
  ModelOptions o;
  o.spills = false;
  ExtendedModel m = build_model(p, thumb, false, false, o);
  EXPECT_EQ(std::count_if(m.ops.begin(), m.ops.end(),
                          [](const ModelOp& x) { return x.kind == OpKind::Reload; }),
            0);
  EXPECT_EQ(m.num_temps(), 11);
}

TEST_F(XorModel, CopyValuesRestrictsCopies) {
  ModelOptions o;
  o.copy_values = {"t6"};
  ExtendedModel m = build_model(p, thumb, false, false, o);
  EXPECT_EQ(std::count_if(m.ops.begin(), m.ops.end(),
                          [](const ModelOp& x) { return x.kind == OpKind::Copy; }),
            1);
  o.copy_values = {"nope"};
  EXPECT_THROW(build_model(p, thumb, false, false, o), ModelError);
}

TEST_F(XorModel, NaiveXorSatisfiesBase) {
  Solution s = naive_xor(base);
  auto v = check(base, s);
  EXPECT_TRUE(v.empty()) << violations(base, v) << describe(base, s);
  EXPECT_EQ(s.objective, 3);
  EXPECT_EQ(s.ls[temp(base, "t1")], 0);
  EXPECT_EQ(s.le[temp(base, "t1")], 1);
}

TEST_F(XorModel, NaiveXorPredicates) {
  Solution s = naive_xor(base);
  auto t = [&](const char* n) { return temp(base, n); };
  EXPECT_TRUE(samereg(base, s, t("t0"), t("t8")));
  EXPECT_FALSE(samereg(base, s, t("t2"), t("t6")));
  EXPECT_FALSE(samereg(base, s, t("t1"), t("t7")));
  EXPECT_TRUE(is_before(base, s, t("t1"), t("t6")));
  EXPECT_FALSE(is_before(base, s, t("t6"), t("t6")));
  EXPECT_FALSE(is_before(base, s, t("t2"), t("t6")));
  EXPECT_EQ(lk(base, s, t("t6")), s.le[t("t1")]);
  EXPECT_EQ(lk(base, s, t("t0")), -1);
  EXPECT_TRUE(subseq(base, s, t("t1"), t("t6")));
  EXPECT_TRUE(subseq(base, s, t("t0"), t("t8")));
  EXPECT_FALSE(subseq(base, s, t("t2"), t("t6")));
}

TEST_F(XorModel, NaiveXorViolatesRpairs) {
  Solution s = naive_xor(secure);
  auto v = check(secure, s, Tag::Security);
  EXPECT_TRUE(has_family(v, Family::Rpairs)) << violations(secure, v);
  EXPECT_TRUE(check(secure, s, Tag::Base).empty());
}

TEST_F(XorModel, CopiedXorPredicates) {
  Solution s = copied_xor(base);
  auto t = [&](const char* n) { return temp(base, n); };
  EXPECT_TRUE(subseq(base, s, t("t4"), t("t5")));
  EXPECT_TRUE(subseq(base, s, t("t5"), t("t6")));
  EXPECT_FALSE(subseq(base, s, t("t4"), t("t6")));
}

TEST_F(XorModel, CopiedXorSatisfiesSecurity) {
  Solution s = copied_xor(secure);
  auto v = check(secure, s);
  EXPECT_TRUE(v.empty()) << violations(secure, v) << describe(secure, s);
}

TEST_F(XorModel, CopiedXorSpillOrder) {
  // o3 and o4 as spill stores into two stack slots.
  Solution s = empty_solution(base);
  const int s0 = thumb.num_registers();
  place(base, s, "o3", 1, "t4", s0);
  select(base, s, "o3", 0, "t1");
  place(base, s, "o4", 2, "t5", s0 + 1);
  select(base, s, "o4", 0, "t2");
  place(base, s, "o5", 3, "t6", 2);
  select(base, s, "o5", 0, "t1");
  select(base, s, "o5", 1, "t2");
  place(base, s, "o7", 4, "t8", 0);
  select(base, s, "o7", 0, "t0");
  select(base, s, "o7", 1, "t6");
  select(base, s, "o9", 0, "t8");
  derive(base, s);
  OpId o3 = op(base, "o3"), o4 = op(base, "o4");
  EXPECT_EQ(s.instr[o3], Instr::SpillStore);
  EXPECT_TRUE(mem_active(base, s, o3));
  EXPECT_TRUE(mem_active(base, s, o4));
  EXPECT_EQ(ok(base, s, o4), s.cycle[o3]);
  EXPECT_TRUE(is_before_mem(base, s, o3, o4));
  EXPECT_TRUE(msubseq(base, s, o3, o4));
  EXPECT_FALSE(msubseq(base, s, o4, o3));
  EXPECT_FALSE(mem_active(base, s, op(base, "o5")));
  EXPECT_TRUE(check(base, s).empty()) << violations(base, check(base, s)) << describe(base, s);
}

TEST_F(XorModel, OverlapIsRejected) {
  ExtendedModel mips = build_model(p, preset_target("mips-like"), false, false);
  Solution s = naive_xor(mips);
  s.reg[temp(mips, "t6")] = 0;  // t0 still lives in R0 until o7
  derive(mips, s);
  EXPECT_TRUE(has_family(check(mips, s), Family::NoOverlap)) << describe(mips, s);
}

TEST_F(XorModel, TwoAddressRejectsFreshDestination) {
  Solution s = naive_xor(base);
  s.reg[temp(base, "t6")] = 5;
  derive(base, s);
  EXPECT_TRUE(has_family(check(base, s), Family::TwoAddress));
}

TEST_F(XorModel, Linearize) {
  Solution s = naive_xor(base);
  auto order = linearize(base, s);
  ASSERT_EQ(order.size(), 4u);
  EXPECT_EQ(order.front(), base.in_op());
  EXPECT_EQ(order.back(), base.out_op());
  EXPECT_EQ(order[1], op(base, "o5"));
}

TEST_F(XorModel, ImpliedConstraintsAreTagged) {
  ExtendedModel plain = build_model(p, thumb, true, false);
  EXPECT_GT(secure.constraints.size(), plain.constraints.size());
  for (size_t i = plain.constraints.size(); i < secure.constraints.size(); ++i) {
    EXPECT_EQ(tag_of(secure.constraints[i].family), Tag::Implied);
  }
}

TEST(Model, SecureResultLandsInSecretRegister) {
  // Two-address xor: writing t6 over t1 would leak k, so R2 is chosen.
  ExtendedModel m = build_model(fixture("xor"), preset_target("thumb-like"), true, true);
  SolveOutcome r = solve(m);
  ASSERT_TRUE(r.solution);
  EXPECT_EQ(r.solution->reg[temp(m, "t6")], 2);
  EXPECT_TRUE(check(m, *r.solution).empty());
}

TEST(Model, EmptySetsLeaveOptimumUnchanged) {
  Program p = fixture("all_public");
  TargetDesc t = preset_target("thumb-like");
  SolveOutcome a = solve(build_model(p, t, false, false));
  SolveOutcome b = solve(build_model(p, t, true, true));
  ASSERT_TRUE(a.solution && b.solution);
  EXPECT_EQ(a.solution->objective, b.solution->objective);
}

TEST(Model, CallingConvention) {
  Program p = parse_program(
      "func f width 4\nin a:public b:public c:public d:public e:public\nx = xor a, e\nout x\n");
  EXPECT_THROW(build_base_model(p, preset_target("thumb-like")), ModelError);
  Program q = parse_program(
      "func f width 4\nin a:public b:public\nx = xor a, b\ny = not a\nz = not b\nout x y z\n");
  EXPECT_THROW(build_base_model(q, preset_target("thumb-like")), ModelError);
}

TEST(Model, UnsupportedOpcode) {
  TargetDesc t = preset_target("mips-like");
  t.ops.erase(Opcode::GfMul);
  EXPECT_THROW(build_base_model(fixture("secmult"), t), ModelError);
}

TEST(Model, SelectMemops) {
  ExtendedModel m = build_model(fixture("xor"), preset_target("thumb-like"), false, false);
  auto sel = select_memops(m, {"o3", "o6"});
  ASSERT_EQ(sel.size(), 2u);
  EXPECT_EQ(sel[0].op, op(m, "o3"));
  EXPECT_THROW(select_memops(m, {"o5"}), ModelError);
  EXPECT_EQ(select_memops(m, {}).size(), m.memops.size());
}

}  // namespace
}  // namespace maskcg
