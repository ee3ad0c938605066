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

// Hamming-distance leakage of linear assembly.
//
// A register write leaks HW(new ^ old) of that register. A memory access
// leaks HW(data ^ bus), where bus is the last word that crossed the memory
// bus. Loads leak on the bus first, then on the destination register.

#ifndef MASKCG_LEAKAGE_HPP_
#define MASKCG_LEAKAGE_HPP_

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <boost/rational.hpp>

#include "maskcg/asm.hpp"

namespace maskcg {

using Rational = boost::rational<std::int64_t>;

int hw(std::uint64_t x);

enum class LeakKind : std::uint8_t { ROT, MRE };
std::string_view to_string(LeakKind k);

struct Observation {
  int position = 0;  // index in the trace
  int instr = 0;     // index in the code
  LeakKind kind = LeakKind::ROT;
  int value = 0;
  bool operator==(const Observation&) const = default;
};

using LeakTrace = std::vector<Observation>;

class LeakageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct MachineState {
  int width = 4;
  std::vector<std::uint64_t> regs;
  std::vector<std::optional<std::uint64_t>> slots;
  std::map<std::uint64_t, std::uint64_t> memory;
  std::uint64_t bus = 0;

  // Arguments in their registers, every other register and the bus at
  // fill.
  static MachineState initial(const AsmProgram& a, const std::vector<std::uint64_t>& inputs,
                              std::uint64_t fill = 0);
};

std::pair<MachineState, LeakTrace> simulate(const AsmProgram& a, MachineState st0);
LeakTrace simulate(const AsmProgram& a, const std::vector<std::uint64_t>& inputs);

// The leakage equations evaluated recursively on prefixes of the code.
// Kept separate from simulate so the two can be compared.
std::vector<int> recursive_leakage(const AsmProgram& a, const MachineState& st0);

// Input vector in declaration order, built from values per class.
std::vector<std::uint64_t> assemble_inputs(const AsmProgram& a, const std::vector<std::uint64_t>& pub,
                                           const std::vector<std::uint64_t>& sec,
                                           const std::vector<std::uint64_t>& rand);

inline constexpr int kExhaustiveLog2 = 20;

struct Sampling {
  bool exhaustive = true;
  std::uint64_t samples = 100000;
  std::uint64_t seed = 1;

  static Sampling all() { return {}; }
  static Sampling monte_carlo(std::uint64_t n, std::uint64_t seed) { return {false, n, seed}; }
};

struct PositionStats {
  int position = 0;
  int instr = 0;
  LeakKind kind = LeakKind::ROT;
  Rational mean, var;   // exhaustive only
  double mean_f = 0, var_f = 0;
};

struct LeakStats {
  bool exact = true;
  std::uint64_t samples = 0;
  std::vector<PositionStats> positions;
  Rational sum_mean, sum_var;
  double sum_mean_f = 0, sum_var_f = 0;
};

// Mean and variance of every observation over the random inputs, with
// public and secret inputs fixed.
LeakStats leak_stats(const AsmProgram& a, const std::vector<std::uint64_t>& pub,
                     const std::vector<std::uint64_t>& sec, const Sampling& sampling);

struct PositionDiff {
  int position = 0;
  int instr = 0;
  LeakKind kind = LeakKind::ROT;
  double dmean = 0, dvar = 0;
  Rational dmean_q, dvar_q;
};

struct Verdict {
  bool equivalent = true;
  std::vector<PositionDiff> differing;  // positions whose statistics differ
  Rational dsum_mean, dsum_var;
  double dsum_mean_f = 0, dsum_var_f = 0;
  LeakStats first, second;
};

Verdict check_equivalence(const AsmProgram& a, const std::vector<std::uint64_t>& pub,
                          const std::vector<std::uint64_t>& sec1, const std::vector<std::uint64_t>& sec2,
                          const Sampling& sampling);

}  // namespace maskcg

#endif  // MASKCG_LEAKAGE_HPP_
