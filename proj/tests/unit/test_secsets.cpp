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

#include "maskcg/model.hpp"
#include "maskcg/secsets.hpp"
#include "maskcg/typeinf.hpp"
#include "support.hpp"

namespace maskcg {
namespace {

using testing::fixture;
using testing::op;
using testing::temp;

using TempPairs = std::set<std::pair<TempId, TempId>>;

// Sets of the xor fixture over t0..t10 with o3, o4, o6 and o8 as the
// potential memory operations.
struct XorSets {
  ExtendedModel m = build_model(fixture("xor"), preset_target("thumb-like"), false, false);
  TypeEnv env;
  SecuritySets sets;

  XorSets() {
    std::vector<TempInfo> infos;
    for (int t = 0; t <= temp(m, "t10"); ++t) {
      infos.push_back({m.temps[t].name, m.temps[t].kind, m.temps[t].source});
    }
    env = infer_types(m.program, infos);
    sets = compute_security_sets(env, select_memops(m, {"o3", "o4", "o6", "o8"}));
  }

  TempId t(const char* n) const { return temp(m, n); }
  OpId o(const char* n) const { return op(m, n); }
};

TEST(SecSets, XorClass) {
  XorSets x;
  // t1 is m, t6 is m^k, t2 is k.
  EXPECT_EQ(xor_class(x.env, x.t("t1"), x.t("t6")), SecurityClass::Secret);
  EXPECT_EQ(xor_class(x.env, x.t("t2"), x.t("t6")), SecurityClass::Random);
  EXPECT_EQ(xor_class(x.env, x.t("t6"), x.t("t6")), SecurityClass::Public);
}

TEST(SecSets, RunningExampleRpairs) {
  XorSets x;
  TempPairs want;
  for (auto [a, b] : std::vector<std::pair<const char*, const char*>>{
           {"t1", "t6"}, {"t1", "t7"}, {"t1", "t8"}, {"t1", "t9"}, {"t4", "t6"},
           {"t4", "t7"}, {"t4", "t8"}, {"t4", "t9"}, {"t6", "t7"}, {"t6", "t8"},
           {"t6", "t9"}, {"t7", "t8"}, {"t7", "t9"}, {"t8", "t9"}}) {
    want.insert({x.t(a), x.t(b)});
  }
  EXPECT_EQ(x.sets.rpairs, want);
  EXPECT_EQ(x.sets.rpairs.size(), 14u);
  EXPECT_TRUE(x.sets.has_rpair(x.t("t6"), x.t("t1")));
}

TEST(SecSets, RunningExampleSpairs) {
  XorSets x;
  std::map<TempId, std::set<TempId>> want{
      {x.t("t5"), {x.t("t4"), x.t("t6"), x.t("t7"), x.t("t8"), x.t("t9")}}};
  EXPECT_EQ(x.sets.spairs, want);
}

TEST(SecSets, RunningExampleMemoryPairs) {
  XorSets x;
  std::set<std::pair<OpId, OpId>> mm{
      {x.o("o3"), x.o("o6")}, {x.o("o3"), x.o("o8")}, {x.o("o6"), x.o("o8")}};
  EXPECT_EQ(x.sets.mmpairs, mm);
  std::map<OpId, std::set<OpId>> ms{{x.o("o4"), {x.o("o3"), x.o("o6"), x.o("o8")}}};
  EXPECT_EQ(x.sets.mspairs, ms);
}

TEST(SecSets, EntryOfSecretInput) {
  XorSets x;
  ASSERT_EQ(x.sets.entry.count(x.t("t2")), 1u);
  EXPECT_TRUE(x.sets.entry.at(x.t("t2")).count(x.t("t6")));
  EXPECT_FALSE(x.sets.entry.at(x.t("t2")).count(x.t("t1")));
}

TEST(SecSets, AllPublicIsEmpty) {
  ExtendedModel m = build_model(fixture("all_public"), preset_target("thumb-like"), true, true);
  EXPECT_TRUE(m.sets.empty());
}

TEST(SecSets, IndependentRandomsHaveNoRpairs) {
  Program p = parse_program("func f width 4\nin m1:random m2:random\nt = xor m1, m2\nout t\n");
  TypeEnv env = infer_types(p);
  EXPECT_TRUE(compute_rpairs(env).empty());
  EXPECT_TRUE(compute_spairs(env).empty());
}

TEST(SecSets, SecretHiddenByRandom) {
  Program p = parse_program("func f width 4\nin k:secret m:random\ns = not k\nt = xor s, m\nout t\n");
  TypeEnv env = infer_types(p);
  auto sp = compute_spairs(env);
  TempId s = *p.find_temp("s"), t = *p.find_temp("t");
  ASSERT_EQ(sp.count(s), 1u);
  // m hides s too, but inputs are never written after s.
  EXPECT_EQ(sp.at(s), (std::set<TempId>{t}));
  // Inputs start in registers, so a secret input is guarded by the entry set.
  auto entry = compute_entry(env);
  TempId k = *p.find_temp("k");
  EXPECT_EQ(sp.count(k), 0u);
  ASSERT_EQ(entry.count(k), 1u);
  EXPECT_TRUE(entry.at(k).count(t));
}

TEST(SecSets, NoMemoryOps) {
  Program p = fixture("xor");
  TypeEnv env = infer_types(p);
  EXPECT_TRUE(compute_mmpairs(env, {}).empty());
  EXPECT_TRUE(compute_mspairs(env, {}).empty());
}

TEST(SecSets, InfeasibleHasNoHider) {
  ExtendedModel m = build_model(fixture("infeasible"), preset_target("thumb-like"), true, false);
  ASSERT_FALSE(m.sets.spairs.empty());
  for (const auto& [key, hiders] : m.sets.spairs) {
    EXPECT_EQ(m.types.type(key), SecurityClass::Secret);
    EXPECT_TRUE(hiders.empty()) << m.temps[key].name;
  }
}

}  // namespace
}  // namespace maskcg
