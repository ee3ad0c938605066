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

// Acceptance checks. Prints one PASS/FAIL line per criterion; with a
// numeric argument runs that criterion alone.

#include <sys/wait.h>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "driver.hpp"
#include "maskcg/oracle.hpp"
#include "maskcg/secsets.hpp"
#include "properties.hpp"

#ifndef MASKCG_CLI
#error "MASKCG_CLI must be defined"
#endif

namespace maskcg {
namespace {

using testing::fixture;

struct Outcome {
  bool pass = true;
  std::string detail;

  void fail(const std::string& why) {
    if (pass) detail.clear();
    pass = false;
    if (detail.size() < 600) detail += (detail.empty() ? "" : "; ") + why;
  }
};

struct Criterion {
  int id;
  std::string title;
  double limit_seconds;
  std::function<Outcome()> run;
};

Outcome xor_types() {
  Outcome r;
  cli::Json j = cli::analyze(fixture("xor"), preset_target("thumb-like"), {});
  std::map<std::string, std::string> got;
  for (const auto& t : j["types"]) got[t["temp"].get<std::string>()] = t["class"].get<std::string>();
  const std::map<std::string, std::string> want{
      {"t0", "public"}, {"t1", "random"}, {"t2", "secret"}, {"t3", "public"},
      {"t4", "random"}, {"t5", "secret"}, {"t6", "random"}, {"t7", "random"},
      {"t8", "random"}, {"t9", "random"}, {"t10", "random"}};
  for (const auto& [t, c] : want) {
    auto it = got.find(t);
    if (it == got.end()) {
      r.fail(t + " missing");
    } else if (it->second != c) {
      r.fail(t + " is " + it->second + ", expected " + c);
    }
  }
  if (r.pass) r.detail = "t0..t10 match";
  return r;
}

Outcome xor_sets() {
  Outcome r;
  ExtendedModel m = build_model(fixture("xor"), preset_target("thumb-like"), false, false);
  std::vector<TempInfo> infos;
  for (int t = 0; t <= testing::temp(m, "t10"); ++t) {
    infos.push_back({m.temps[t].name, m.temps[t].kind, m.temps[t].source});
  }
  TypeEnv env = infer_types(m.program, infos);
  SecuritySets s = compute_security_sets(env, select_memops(m, {"o3", "o4", "o6", "o8"}));
  auto tn = [&](TempId t) { return m.temps[t].name; };
  auto on = [&](OpId o) { return m.ops[o].name(); };

  std::set<std::pair<std::string, std::string>> rp;
  for (auto [a, b] : s.rpairs) rp.insert({tn(a), tn(b)});
  const std::set<std::pair<std::string, std::string>> want_rp{
      {"t1", "t6"}, {"t1", "t7"}, {"t1", "t8"}, {"t1", "t9"}, {"t4", "t6"}, {"t4", "t7"}, {"t4", "t8"},
      {"t4", "t9"}, {"t6", "t7"}, {"t6", "t8"}, {"t6", "t9"}, {"t7", "t8"}, {"t7", "t9"}, {"t8", "t9"}};
  if (rp != want_rp) r.fail("Rpairs has " + std::to_string(rp.size()) + " pairs, differs from the 14 expected");

  std::map<std::string, std::set<std::string>> sp;
  for (const auto& [k, vs] : s.spairs) {
    for (TempId v : vs) sp[tn(k)].insert(tn(v));
  }
  if (sp != std::map<std::string, std::set<std::string>>{{"t5", {"t4", "t6", "t7", "t8", "t9"}}}) {
    r.fail("Spairs differs");
  }

  std::set<std::pair<std::string, std::string>> mm;
  for (auto [a, b] : s.mmpairs) mm.insert({on(a), on(b)});
  if (mm != std::set<std::pair<std::string, std::string>>{{"o3", "o6"}, {"o3", "o8"}, {"o6", "o8"}}) {
    r.fail("Mmpairs differs");
  }

  std::map<std::string, std::set<std::string>> ms;
  for (const auto& [k, vs] : s.mspairs) {
    for (OpId v : vs) ms[on(k)].insert(on(v));
  }
  if (ms != std::map<std::string, std::set<std::string>>{{"o4", {"o3", "o6", "o8"}}}) r.fail("Mspairs differs");
  if (r.pass) r.detail = "14 Rpairs, Spairs, Mmpairs, Mspairs match";
  return r;
}

Outcome zero_overhead(const std::string& target) {
  Outcome r;
  auto t0 = std::chrono::steady_clock::now();
  Program p = fixture("xor");
  TargetDesc t = preset_target(target);
  SolveOutcome a = solve(build_model(p, t, false, false));
  SolveOutcome b = solve(build_model(p, t, true, true));
  if (a.status != SolveStatus::Optimal || b.status != SolveStatus::Optimal) {
    r.fail(target + ": not solved to optimality");
    return r;
  }
  int x = a.solution->objective, y = b.solution->objective;
  r.detail = target + " insecure " + std::to_string(x) + ", secure " + std::to_string(y);
  if (x != y) r.fail(r.detail + " (overhead " + std::to_string(100.0 * (y - x) / x) + "%)");
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (secs > 10.0) r.fail(target + " took " + std::to_string(secs) + " s");
  return r;
}

Outcome leak_detection() {
  Outcome r;
  ExtendedModel m = build_model(fixture("xor"), preset_target("thumb-like"), false, false);
  Solution s = testing::naive_xor(m);
  if (auto v = check(m, s); !v.empty()) {
    r.fail("reference allocation violates " + v.front().message);
    return r;
  }
  AsmProgram a = to_asm(m, s);
  Verdict v = check_equivalence(a, {0}, {0x0}, {0xF}, Sampling::all());
  if (v.equivalent) r.fail("judged Equivalent");
  if (!v.first.exact) r.fail("not exhaustive");
  bool four = false;
  for (const auto& d : v.differing) four = four || d.dmean_q == Rational(4);
  if (!four) r.fail("no leaky position with mean difference 4");
  if (r.pass) {
    r.detail = "Leaky at position " + std::to_string(v.differing.front().position) + ", dmean " +
               std::to_string(v.differing.front().dmean_q.numerator()) + "/" +
               std::to_string(v.differing.front().dmean_q.denominator());
  }
  return r;
}

Outcome secure_solutions_equivalent() {
  Outcome r;
  std::set<std::string> fixtures;
  std::size_t solutions = 0;
  for (const auto& c : testing::secure_cases()) {
    ExtendedModel m = build_model(fixture(c.fixture), preset_target(c.target), true, true, c.options);
    auto sols = testing::secure_solutions(m, 20);
    if (sols.empty()) {
      r.fail(testing::describe_case(c) + " has no secure solution");
      continue;
    }
    fixtures.insert(c.fixture);
    for (const auto& s : sols) {
      ++solutions;
      for (const auto& f : testing::leak_failures(to_asm(m, s), 10, 1)) r.fail(testing::describe_case(c) + " " + f);
    }
  }
  // Small models: every secure solution, not just a sample.
  for (const auto& c : testing::oracle_cases()) {
    ExtendedModel m = build_model(fixture(c.fixture), preset_target(c.target), true, true, c.options);
    auto all = enumerate(m, SIZE_MAX, SolveBudget{2'000'000, 60.0});
    if (!all) {
      r.fail(testing::describe_case(c) + " enumeration out of budget");
      continue;
    }
    for (const auto& s : *all) {
      ++solutions;
      for (const auto& f : testing::leak_failures(to_asm(m, s), 10, 1)) r.fail(testing::describe_case(c) + " " + f);
    }
  }
  if (fixtures.size() < 8) r.fail("only " + std::to_string(fixtures.size()) + " fixtures");
  if (r.pass) {
    r.detail = std::to_string(fixtures.size()) + " fixtures, " + std::to_string(solutions) +
               " solutions, 10 secret pairs each";
  }
  return r;
}

Outcome oracle(const std::set<std::string>& kinds, const std::string& what) {
  Outcome r;
  std::size_t checked = 0, cases = 0;
  for (const auto& c : testing::oracle_cases()) {
    OracleReport o = cross_check(fixture(c.fixture), preset_target(c.target), c.options);
    ++cases;
    checked += o.solutions_checked;
    for (const auto& d : o.discrepancies) {
      if (kinds.count(d.kind)) r.fail(testing::describe_case(c) + " " + d.kind + ": " + d.detail);
    }
  }
  if (r.pass) r.detail = std::to_string(cases) + " cases, " + std::to_string(checked) + " solutions, " + what;
  return r;
}

Outcome type_soundness() {
  Outcome r;
  int checked = 0;
  for (const char* f : {"xor", "goubin", "secmult", "trichina_and", "square", "all_public", "load_store",
                        "spill_small", "spill_pressure", "infeasible"}) {
    Program p = fixture(f);
    int randoms = 0;
    for (const auto& in : p.inputs) randoms += in.cls == SecurityClass::Random;
    if (p.width != 4 || randoms > 3) {
      r.fail(std::string(f) + " outside width 4 with at most 3 randoms");
      continue;
    }
    ++checked;
    for (const auto& x : testing::soundness_failures(p)) r.fail(x);
  }
  if (r.pass) r.detail = std::to_string(checked) + " fixtures";
  return r;
}

Outcome infeasibility() {
  Outcome r;
  std::string cmd = std::string("\"") + MASKCG_CLI + "\" compile \"" + testing::fixture_path("infeasible") +
                    "\" --out-dir \"" + std::filesystem::temp_directory_path().string() + "\" 2>&1";
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) {
    r.fail("cannot run " + cmd);
    return r;
  }
  std::string out;
  char buf[256];
  while (std::fgets(buf, sizeof buf, pipe)) out += buf;
  int status = pclose(pipe);
  int code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  while (!out.empty() && out.back() == '\n') out.pop_back();
  if (code != 3) r.fail("exit " + std::to_string(code));
  if (out.find("Spairs") == std::string::npos) r.fail("Spairs not named");
  if (r.pass) r.detail = "exit 3: " + out;
  return r;
}

std::vector<Criterion> criteria() {
  return {
      {1, "type inference golden", 1.0, xor_types},
      {2, "security set golden", 1.0, xor_sets},
      {3, "zero overhead on xor", 20.0,
       [] {
         Outcome a = zero_overhead("thumb-like");
         Outcome b = zero_overhead("mips-like");
         if (!b.pass) return b;
         if (a.pass) a.detail += "; " + b.detail;
         return a;
       }},
      {4, "leak detection", 5.0, leak_detection},
      {5, "secure solutions are leakage equivalent", 300.0, secure_solutions_equivalent},
      {6, "subseq and msubseq match the trace", 300.0,
       [] { return oracle({"subseq", "msubseq"}, "predicates match the trace"); }},
      {7, "solver optimum matches brute force", 300.0,
       [] { return oracle({"optimum", "enumeration", "soundness"}, "base and extended optima match"); }},
      {8, "type soundness", 120.0, type_soundness},
      {9, "infeasibility surfacing", 1.0, infeasibility},
  };
}

}  // namespace
}  // namespace maskcg

int main(int argc, char** argv) {
  using Clock = std::chrono::steady_clock;
  int only = argc > 1 ? std::atoi(argv[1]) : 0;
  bool all_pass = true;
  for (const auto& c : maskcg::criteria()) {
    if (only && c.id != only) continue;
    auto t0 = Clock::now();
    maskcg::Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.fail(std::string("exception: ") + e.what());
    }
    double secs = std::chrono::duration<double>(Clock::now() - t0).count();
    if (secs > c.limit_seconds) o.fail("took " + std::to_string(secs) + " s, limit " + std::to_string(c.limit_seconds));
    all_pass = all_pass && o.pass;
    std::printf("criterion %d: %s  %s (%.2f s) %s\n", c.id, o.pass ? "PASS" : "FAIL", c.title.c_str(), secs,
                o.detail.c_str());
    std::fflush(stdout);
  }
  return all_pass ? 0 : 1;
}
