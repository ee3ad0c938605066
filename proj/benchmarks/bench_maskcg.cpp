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

#include <benchmark/benchmark.h>

#include <fstream>
#include <sstream>
#include <string>

#include "maskcg/leakage.hpp"
#include "maskcg/oracle.hpp"
#include "maskcg/solver.hpp"

namespace maskcg {
namespace {

Program load(const std::string& name) {
  std::ifstream is(std::string(MASKCG_FIXTURE_DIR) + "/" + name + ".ir");
  std::stringstream ss;
  ss << is.rdbuf();
  return parse_program(ss.str());
}

struct Fixture {
  const char* program;
  const char* target;
};

constexpr Fixture kFixtures[] = {
    {"xor", "thumb-like"},     {"xor", "mips-like"},          {"goubin", "mips-like"},
    {"secmult", "mips-like"},  {"trichina_and", "mips-like"}, {"square", "mips-like"},
    {"load_store", "thumb-like"}, {"spill_small", "tiny"},    {"spill_pressure", "tiny"},
};

void BM_Solve(benchmark::State& state) {
  const Fixture& f = kFixtures[state.range(0)];
  const bool secure = state.range(1) != 0;
  ExtendedModel m = build_model(load(f.program), preset_target(f.target), secure, secure);
  std::int64_t nodes = 0;
  int objective = -1;
  for (auto _ : state) {
    SolveOutcome r = solve(m);
    nodes = r.nodes;
    objective = r.solution ? r.solution->objective : -1;
    benchmark::DoNotOptimize(r);
  }
  state.SetLabel(std::string(f.program) + "@" + f.target + (secure ? " secure" : " insecure"));
  state.counters["nodes"] = static_cast<double>(nodes);
  state.counters["objective"] = objective;
}
BENCHMARK(BM_Solve)
    ->ArgsProduct({benchmark::CreateDenseRange(0, std::size(kFixtures) - 1, 1), {0, 1}})
    ->Unit(benchmark::kMillisecond);

void BM_BuildModel(benchmark::State& state) {
  const Fixture& f = kFixtures[state.range(0)];
  Program p = load(f.program);
  TargetDesc t = preset_target(f.target);
  for (auto _ : state) benchmark::DoNotOptimize(build_model(p, t, true, true));
  state.SetLabel(std::string(f.program) + "@" + f.target);
}
BENCHMARK(BM_BuildModel)->DenseRange(0, std::size(kFixtures) - 1)->Unit(benchmark::kMicrosecond);

void BM_LeakStatsExhaustive(benchmark::State& state) {
  const Fixture& f = kFixtures[state.range(0)];
  ExtendedModel m = build_model(load(f.program), preset_target(f.target), true, true);
  AsmProgram a = to_asm(m, *solve(m).solution);
  int npub = 0, nsec = 0;
  for (const auto& in : a.inputs) {
    npub += in.cls == SecurityClass::Public;
    nsec += in.cls == SecurityClass::Secret;
  }
  std::vector<std::uint64_t> pub(npub, 0), sec(nsec, 0x5);
  for (auto _ : state) benchmark::DoNotOptimize(leak_stats(a, pub, sec, Sampling::all()));
  state.SetLabel(std::string(f.program) + "@" + f.target);
}
BENCHMARK(BM_LeakStatsExhaustive)->DenseRange(0, std::size(kFixtures) - 1)->Unit(benchmark::kMicrosecond);

void BM_LeakStatsMonteCarlo(benchmark::State& state) {
  ExtendedModel m = build_model(load("secmult"), preset_target("mips-like"), true, true);
  AsmProgram a = to_asm(m, *solve(m).solution);
  const auto samples = static_cast<std::uint64_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(leak_stats(a, {}, {0x3, 0xc}, Sampling::monte_carlo(samples, 1)));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_LeakStatsMonteCarlo)->RangeMultiplier(10)->Range(1000, 100000)->Unit(benchmark::kMillisecond);

void BM_Oracle(benchmark::State& state) {
  ModelOptions o;
  o.spills = false;
  o.copy_values = {"t1", "t2"};
  Program p = load("xor");
  TargetDesc t = preset_target("thumb-like");
  for (auto _ : state) benchmark::DoNotOptimize(cross_check(p, t, o));
}
BENCHMARK(BM_Oracle)->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace maskcg

BENCHMARK_MAIN();
