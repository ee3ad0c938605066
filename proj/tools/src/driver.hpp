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

// Command-line pipeline: parse, analyze, build the model, solve, emit.

#ifndef MASKCG_TOOLS_DRIVER_HPP_
#define MASKCG_TOOLS_DRIVER_HPP_

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "maskcg/asm.hpp"
#include "maskcg/leakage.hpp"
#include "maskcg/model.hpp"
#include "maskcg/oracle.hpp"
#include "maskcg/solver.hpp"

namespace maskcg::cli {

using Json = nlohmann::ordered_json;

enum ExitCode : int {
  kOk = 0,
  kDiscrepancy = 1,
  kInputError = 2,
  kInfeasible = 3,
  kTimeout = 4,
  kLeaky = 5,
};

// Thrown for unreadable or malformed inputs; maps to kInputError.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using SecretPair = std::pair<std::vector<std::uint64_t>, std::vector<std::uint64_t>>;

struct VerifyOptions {
  std::vector<SecretPair> secrets;  // empty: default_secret_pairs
  std::vector<std::uint64_t> pub;   // empty: all zero
  std::optional<std::uint64_t> samples;  // Monte Carlo when set
  std::uint64_t seed = 1;
};

struct CompileOptions {
  bool secure = true;
  bool implied = true;
  bool verify = false;
  SolveBudget budget;
  ModelOptions model;
  VerifyOptions check;
  std::string out_dir = ".";
  bool write_files = true;
  std::optional<std::string> dump_solution;
  std::optional<std::string> dump_model;
};

struct CompileResult {
  int exit_code = kOk;
  std::string message;
  Json report;
  std::optional<AsmProgram> program;
  std::string listing;
};

std::string read_file(const std::string& path);
Program read_program(const std::string& path);
// Preset name, or path to a target description.
TargetDesc resolve_target(const std::string& spec);

// One pair with all-zero against all-one secrets, then seeded random pairs.
std::vector<SecretPair> default_secret_pairs(const AsmProgram& a, int count, std::uint64_t seed);

CompileResult compile(const Program& p, const TargetDesc& t, const CompileOptions& o);

Json analyze(const Program& p, const TargetDesc& t, const ModelOptions& o);
Json model_json(const ExtendedModel& m);
Json solution_json(const ExtendedModel& m, const Solution& s);
Json sets_json(const ExtendedModel& m, const SecuritySets& s);
Json verdict_json(const AsmProgram& a, const SecretPair& secrets, const Verdict& v);
Json oracle_json(const OracleReport& r);

// Entry point of the maskcg executable.
int run(int argc, char** argv);

}  // namespace maskcg::cli

#endif  // MASKCG_TOOLS_DRIVER_HPP_
