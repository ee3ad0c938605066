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

#ifndef MASKCG_TESTS_SUPPORT_HPP_
#define MASKCG_TESTS_SUPPORT_HPP_

#include <fstream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "maskcg/asm.hpp"
#include "maskcg/ir.hpp"
#include "maskcg/model.hpp"
#include "maskcg/target.hpp"

#ifndef MASKCG_FIXTURE_DIR
#error "MASKCG_FIXTURE_DIR must be defined"
#endif

namespace maskcg::testing {

inline std::string fixture_path(const std::string& name) {
  return std::string(MASKCG_FIXTURE_DIR) + "/" + name + ".ir";
}

inline std::string slurp(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open " + path);
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

inline Program fixture(const std::string& name) { return parse_program(slurp(fixture_path(name))); }

// Fixture, target and model options for which secure solutions exist.
struct Case {
  std::string fixture;
  std::string target;
  ModelOptions options;
};

inline ModelOptions no_copies() {
  ModelOptions o;
  o.register_copies = false;
  o.spills = false;
  return o;
}

inline ModelOptions copies_of(std::vector<std::string> values, bool registers = true, bool spills = true) {
  ModelOptions o;
  o.register_copies = registers;
  o.spills = spills;
  o.copy_values = std::move(values);
  return o;
}

// Feasible secure cases, at least one per fixture that has a secure solution.
inline std::vector<Case> secure_cases() {
  return {
      {"xor", "thumb-like", {}},
      {"xor", "mips-like", {}},
      {"goubin", "mips-like", {}},
      {"secmult", "mips-like", {}},
      {"trichina_and", "mips-like", {}},
      {"square", "mips-like", {}},
      {"all_public", "thumb-like", {}},
      {"load_store", "thumb-like", {}},
      {"spill_small", "thumb-like", {}},
      {"spill_small", "tiny", {}},
      {"spill_pressure", "tiny", {}},
  };
}

// Cases small enough for the brute-force oracle.
inline std::vector<Case> oracle_cases() {
  return {
      {"xor", "thumb-like", copies_of({"t1", "t2"}, true, false)},
      {"xor", "mips-like", copies_of({"t6"}, true, false)},
      {"spill_small", "thumb-like", copies_of({}, false, true)},
      {"spill_small", "tiny", {}},
      {"load_store", "thumb-like", copies_of({}, true, false)},
      {"load_store", "thumb-like", copies_of({"x"})},
      {"infeasible", "thumb-like", copies_of({}, true, false)},
      {"goubin", "mips-like", no_copies()},
      {"square", "mips-like", copies_of({"a"}, true, false)},
      {"all_public", "thumb-like", copies_of({"c"}, true, false)},
  };
}

inline std::string describe_case(const Case& c) {
  std::string s = c.fixture + "@" + c.target;
  if (!c.options.register_copies) s += " -regcopies";
  if (!c.options.spills) s += " -spills";
  if (!c.options.copy_values.empty()) {
    s += " copies{";
    for (size_t i = 0; i < c.options.copy_values.size(); ++i) s += (i ? "," : "") + c.options.copy_values[i];
    s += "}";
  }
  return s;
}

inline void PrintTo(const Case& c, std::ostream* os) { *os << describe_case(c); }

inline TempId temp(const ExtendedModel& m, const std::string& name) {
  auto t = m.find_temp(name);
  if (!t) throw std::runtime_error("no temp " + name);
  return *t;
}

inline OpId op(const ExtendedModel& m, const std::string& name) {
  auto o = m.find_op(name);
  if (!o) throw std::runtime_error("no op " + name);
  return *o;
}

// Sets operand k of op o to temp t.
inline void select(const ExtendedModel& m, Solution& s, const std::string& o, int k, const std::string& t) {
  s.sel[m.ops[op(m, o)].operands.at(k).id] = temp(m, t);
}

inline void place(const ExtendedModel& m, Solution& s, const std::string& o, int cycle,
                  const std::string& t, int reg) {
  s.active[op(m, o)] = true;
  s.cycle[op(m, o)] = cycle;
  s.reg[temp(m, t)] = reg;
}

// in; t6:R1 <- xor t1 t2; t8:R0 <- xor t0 t6; out. No copies.
inline Solution naive_xor(const ExtendedModel& m) {
  Solution s = empty_solution(m);
  place(m, s, "o5", 1, "t6", 1);
  select(m, s, "o5", 0, "t1");
  select(m, s, "o5", 1, "t2");
  place(m, s, "o7", 2, "t8", 0);
  select(m, s, "o7", 0, "t0");
  select(m, s, "o7", 1, "t6");
  select(m, s, "o9", 0, "t8");
  derive(m, s);
  return s;
}

// t4 and t5 copied into R3 ahead of the first xor, which then writes R3.
inline Solution copied_xor(const ExtendedModel& m) {
  Solution s = empty_solution(m);
  place(m, s, "o3", 1, "t4", 3);
  select(m, s, "o3", 0, "t1");
  place(m, s, "o4", 2, "t5", 3);
  select(m, s, "o4", 0, "t2");
  place(m, s, "o5", 3, "t6", 3);
  select(m, s, "o5", 0, "t1");
  select(m, s, "o5", 1, "t5");
  place(m, s, "o7", 4, "t8", 0);
  select(m, s, "o7", 0, "t0");
  select(m, s, "o7", 1, "t6");
  select(m, s, "o9", 0, "t8");
  derive(m, s);
  return s;
}

}  // namespace maskcg::testing

#endif  // MASKCG_TESTS_SUPPORT_HPP_
