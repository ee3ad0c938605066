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

#include "driver.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include "CLI11.hpp"
#include "maskcg/secsets.hpp"
#include "maskcg/target.hpp"
#include "maskcg/typeinf.hpp"

namespace maskcg::cli {

namespace fs = std::filesystem;

namespace {

std::string hex(std::uint64_t v) {
  std::ostringstream os;
  os << "0x" << std::hex << v;
  return os.str();
}

std::string rational_str(const Rational& q) {
  if (q.denominator() == 1) return std::to_string(q.numerator());
  return std::to_string(q.numerator()) + "/" + std::to_string(q.denominator());
}

std::uint64_t parse_hex(const std::string& s) {
  if (s.empty()) throw InputError("empty hex value");
  std::size_t used = 0;
  std::uint64_t v = 0;
  try {
    v = std::stoull(s, &used, 16);
  } catch (const std::exception&) {
    throw InputError("bad hex value '" + s + "'");
  }
  if (used != s.size()) throw InputError("bad hex value '" + s + "'");
  return v;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream is(s);
  while (std::getline(is, cur, sep)) out.push_back(cur);
  if (!s.empty() && s.back() == sep) out.emplace_back();
  return out;
}

// "a,b" with each side a colon-separated value per secret input.
SecretPair parse_secret_pair(const std::string& s) {
  auto sides = split(s, ',');
  if (sides.size() != 2) throw InputError("--secrets expects two values separated by ','");
  SecretPair out;
  for (const auto& part : split(sides[0], ':')) out.first.push_back(parse_hex(part));
  for (const auto& part : split(sides[1], ':')) out.second.push_back(parse_hex(part));
  return out;
}

std::vector<std::uint64_t> parse_hex_list(const std::vector<std::string>& items) {
  std::vector<std::uint64_t> out;
  for (const auto& item : items) {
    for (const auto& part : split(item, ',')) {
      for (const auto& v : split(part, ':')) out.push_back(parse_hex(v));
    }
  }
  return out;
}

int count_class(const AsmProgram& a, SecurityClass c) {
  return static_cast<int>(std::count_if(a.inputs.begin(), a.inputs.end(),
                                        [&](const AsmInput& in) { return in.cls == c; }));
}

Sampling pick_sampling(const AsmProgram& a, const VerifyOptions& v) {
  if (v.samples) return Sampling::monte_carlo(*v.samples, v.seed);
  if (a.width * count_class(a, SecurityClass::Random) <= kExhaustiveLog2) {
    Sampling s = Sampling::all();
    s.seed = v.seed;
    return s;
  }
  return Sampling::monte_carlo(Sampling{}.samples, v.seed);
}

void check_arity(const AsmProgram& a, const VerifyOptions& v) {
  int nsec = count_class(a, SecurityClass::Secret);
  int npub = count_class(a, SecurityClass::Public);
  for (const auto& [s1, s2] : v.secrets) {
    if (static_cast<int>(s1.size()) != nsec || static_cast<int>(s2.size()) != nsec) {
      throw InputError("--secrets needs " + std::to_string(nsec) + " value(s) per side");
    }
  }
  if (!v.pub.empty() && static_cast<int>(v.pub.size()) != npub) {
    throw InputError("--pub needs " + std::to_string(npub) + " value(s)");
  }
}

Json set_names(const ExprPool& pool, InputSet s) { return pool.names(s); }

Json temp_types(const ExtendedModel& m) {
  Json out = Json::array();
  const ExprPool& pool = *m.types.pool;
  for (const auto& t : m.temps) {
    ExprRef e = m.types.expr.at(t.id);
    Json j;
    j["temp"] = t.name;
    j["kind"] = to_string(t.kind);
    j["source"] = t.source >= 0 ? Json(m.program.temp_name(t.source)) : Json(nullptr);
    j["class"] = to_string(m.types.type(t.id));
    j["expr"] = pool.to_string(e);
    j["supp"] = set_names(pool, supp(e));
    j["unq"] = set_names(pool, unq(e));
    j["dom"] = set_names(pool, dom(e));
    out.push_back(std::move(j));
  }
  return out;
}

// Instruction lines of the listing, without indentation.
Json asm_json(const AsmProgram& a) {
  Json code = Json::array();
  std::istringstream is(render_asm(a));
  std::string l;
  while (std::getline(is, l)) {
    if (l.empty() || l[0] == '.') continue;
    auto b = l.find_first_not_of(' ');
    auto e = l.find_last_not_of(' ');
    code.push_back(l.substr(b, e - b + 1));
  }
  return code;
}

Json solver_json(const SolveOutcome& r) {
  Json j;
  j["status"] = to_string(r.status);
  j["nodes"] = r.nodes;
  j["seconds"] = r.seconds;
  j["infeasible_group"] = r.infeasible_group.empty() ? Json(nullptr) : Json(r.infeasible_group);
  return j;
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream os(path);
  if (!os) throw InputError("cannot write " + path.string());
  os << text;
}

}  // namespace

std::string read_file(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw InputError("cannot read " + path);
  std::ostringstream os;
  os << is.rdbuf();
  return os.str();
}

Program read_program(const std::string& path) {
  std::string text = read_file(path);
  Program p;
  try {
    p = parse_program(text);
  } catch (const ParseError& e) {
    throw InputError(path + ":" + std::to_string(e.line()) + ":" + std::to_string(e.column()) +
                     ": " + e.what());
  }
  auto diags = validate(p);
  if (!diags.empty()) {
    std::string msg;
    for (const auto& d : diags) {
      if (!msg.empty()) msg += "\n";
      msg += path + ": " + d.code + ": " + d.message;
    }
    throw InputError(msg);
  }
  if (p.name.empty()) p.name = fs::path(path).stem().string();
  return p;
}

TargetDesc resolve_target(const std::string& spec) {
  auto names = preset_names();
  if (std::find(names.begin(), names.end(), spec) != names.end()) return preset_target(spec);
  if (!fs::exists(spec)) throw InputError("no target preset or file named '" + spec + "'");
  try {
    return load_target(read_file(spec));
  } catch (const TargetError& e) {
    throw InputError(spec + ": " + e.what());
  }
}

std::vector<SecretPair> default_secret_pairs(const AsmProgram& a, int count, std::uint64_t seed) {
  int nsec = count_class(a, SecurityClass::Secret);
  std::uint64_t mask = a.width >= 64 ? ~0ULL : ((1ULL << a.width) - 1);
  std::vector<SecretPair> out;
  if (count <= 0) return out;
  out.emplace_back(std::vector<std::uint64_t>(nsec, 0), std::vector<std::uint64_t>(nsec, mask));
  if (nsec == 0) return out;
  std::mt19937_64 rng(seed);
  while (static_cast<int>(out.size()) < count) {
    SecretPair p;
    for (int i = 0; i < nsec; ++i) {
      p.first.push_back(rng() & mask);
      p.second.push_back(rng() & mask);
    }
    if (p.first != p.second) out.push_back(std::move(p));
  }
  return out;
}

Json model_json(const ExtendedModel& m) {
  Json j;
  j["program"] = m.program.name;
  j["target"] = m.target.name;
  j["secure"] = m.secure;
  j["implied"] = m.implied;
  j["maxc"] = m.maxc;
  Json locs = Json::array();
  for (int l = 0; l < m.target.num_locations(); ++l) locs.push_back(m.target.location_name(l));
  j["locations"] = locs;

  Json ops = Json::array();
  for (const auto& op : m.ops) {
    Json o;
    o["op"] = op.name();
    o["kind"] = op.kind == OpKind::In       ? "in"
                : op.kind == OpKind::Out    ? "out"
                : op.kind == OpKind::Copy   ? "copy"
                : op.kind == OpKind::Reload ? "reload"
                                            : std::string(to_string(op.opcode));
    o["mandatory"] = op.mandatory;
    Json instrs = Json::array();
    for (Instr i : op.instrs) instrs.push_back(to_string(i));
    o["instructions"] = instrs;
    Json operands = Json::array();
    for (const auto& mo : op.operands) {
      Json p;
      p["operand"] = "p" + std::to_string(mo.id);
      if (mo.literal) {
        p["literal"] = hex(mo.value);
      } else {
        Json alts = Json::array();
        for (TempId t : mo.alternatives) alts.push_back(m.temps[t].name);
        p["alternatives"] = alts;
      }
      operands.push_back(std::move(p));
    }
    o["operands"] = operands;
    Json defs = Json::array();
    for (TempId t : op.defs) defs.push_back(m.temps[t].name);
    o["defs"] = defs;
    ops.push_back(std::move(o));
  }
  j["operations"] = ops;

  Json temps = Json::array();
  for (const auto& t : m.temps) {
    Json tj;
    tj["temp"] = t.name;
    tj["kind"] = to_string(t.kind);
    tj["def"] = t.def_op >= 0 ? Json(m.ops[t.def_op].name()) : Json(nullptr);
    Json dom = Json::array();
    for (int l : t.domain) dom.push_back(m.target.location_name(l));
    tj["domain"] = dom;
    temps.push_back(std::move(tj));
  }
  j["temps"] = temps;

  Json cs = Json::array();
  for (const auto& c : m.constraints) {
    Json cj;
    cj["family"] = to_string(c.family);
    cj["tag"] = to_string(tag_of(c.family));
    cj["args"] = c.args;
    cs.push_back(std::move(cj));
  }
  j["constraints"] = cs;
  return j;
}

Json solution_json(const ExtendedModel& m, const Solution& s) {
  Json j;
  j["objective"] = s.objective;
  Json ops = Json::array();
  for (const auto& op : m.ops) {
    Json o;
    o["op"] = op.name();
    o["active"] = static_cast<bool>(s.active[op.id]);
    o["instruction"] = to_string(s.instr[op.id]);
    o["cycle"] = s.cycle[op.id];
    ops.push_back(std::move(o));
  }
  j["operations"] = ops;
  Json temps = Json::array();
  for (const auto& t : m.temps) {
    Json tj;
    tj["temp"] = t.name;
    tj["live"] = static_cast<bool>(s.live[t.id]);
    tj["register"] = s.reg[t.id] >= 0 ? Json(m.target.location_name(s.reg[t.id])) : Json(nullptr);
    tj["ls"] = s.ls[t.id];
    tj["le"] = s.le[t.id];
    temps.push_back(std::move(tj));
  }
  j["temps"] = temps;
  Json sel = Json::array();
  for (int p = 0; p < m.num_operands; ++p) {
    sel.push_back({{"operand", "p" + std::to_string(p)},
                   {"temp", s.sel[p] >= 0 ? Json(m.temps[s.sel[p]].name) : Json(nullptr)}});
  }
  j["operands"] = sel;
  return j;
}

Json sets_json(const ExtendedModel& m, const SecuritySets& s) {
  auto tn = [&](TempId t) { return m.temps[t].name; };
  auto on = [&](OpId o) { return m.ops[o].name(); };
  Json j;
  Json rp = Json::array();
  for (const auto& [a, b] : s.rpairs) rp.push_back(Json::array({tn(a), tn(b)}));
  j["rpairs"] = rp;
  auto temp_map = [&](const std::map<TempId, std::set<TempId>>& mp) {
    Json out = Json::object();
    for (const auto& [k, vs] : mp) {
      Json arr = Json::array();
      for (TempId v : vs) arr.push_back(tn(v));
      out[tn(k)] = arr;
    }
    return out;
  };
  j["spairs"] = temp_map(s.spairs);
  j["entry"] = temp_map(s.entry);
  Json mm = Json::array();
  for (const auto& [a, b] : s.mmpairs) mm.push_back(Json::array({on(a), on(b)}));
  j["mmpairs"] = mm;
  Json ms = Json::object();
  for (const auto& [k, vs] : s.mspairs) {
    Json arr = Json::array();
    for (OpId v : vs) arr.push_back(on(v));
    ms[on(k)] = arr;
  }
  j["mspairs"] = ms;
  return j;
}

Json verdict_json(const AsmProgram& a, const SecretPair& secrets, const Verdict& v) {
  Json j;
  auto hexes = [](const std::vector<std::uint64_t>& xs) {
    Json arr = Json::array();
    for (auto x : xs) arr.push_back(hex(x));
    return arr;
  };
  Json listing = asm_json(a);
  j["secrets"] = Json::array({hexes(secrets.first), hexes(secrets.second)});
  j["verdict"] = v.equivalent ? "Equivalent" : "Leaky";
  j["exact"] = v.first.exact;
  j["samples"] = v.first.samples;
  Json sums;
  if (v.first.exact) {
    sums["mean"] = Json::array({rational_str(v.first.sum_mean), rational_str(v.second.sum_mean)});
    sums["variance"] = Json::array({rational_str(v.first.sum_var), rational_str(v.second.sum_var)});
  } else {
    sums["mean"] = Json::array({v.first.sum_mean_f, v.second.sum_mean_f});
    sums["variance"] = Json::array({v.first.sum_var_f, v.second.sum_var_f});
  }
  j["sums"] = sums;
  Json diffs = Json::array();
  for (const auto& d : v.differing) {
    Json dj;
    dj["position"] = d.position;
    dj["instr"] = d.instr;
    dj["kind"] = to_string(d.kind);
    dj["asm"] = d.instr >= 0 && d.instr < static_cast<int>(listing.size()) ? listing[d.instr]
                                                                          : Json(nullptr);
    if (v.first.exact) {
      dj["dmean"] = rational_str(d.dmean_q);
      dj["dvar"] = rational_str(d.dvar_q);
    } else {
      dj["dmean"] = d.dmean;
      dj["dvar"] = d.dvar;
    }
    diffs.push_back(std::move(dj));
  }
  j["differing"] = diffs;
  return j;
}

Json oracle_json(const OracleReport& r) {
  auto opt = [](const std::optional<int>& x) { return x ? Json(*x) : Json(nullptr); };
  Json j;
  j["program"] = r.program;
  j["target"] = r.target;
  j["ops"] = r.ops;
  j["insecure_optimum"] = opt(r.insecure_optimum);
  j["secure_optimum"] = opt(r.secure_optimum);
  j["solver_insecure"] = opt(r.solver_insecure);
  j["solver_secure"] = opt(r.solver_secure);
  j["insecure_solutions"] = r.insecure_solutions;
  j["secure_solutions"] = r.secure_solutions;
  j["solutions_checked"] = r.solutions_checked;
  Json ds = Json::array();
  for (const auto& d : r.discrepancies) ds.push_back({{"kind", d.kind}, {"detail", d.detail}});
  j["discrepancies"] = ds;
  return j;
}

Json analyze(const Program& p, const TargetDesc& t, const ModelOptions& o) {
  ExtendedModel m = build_model(p, t, true, false, o);
  const ExprPool& pool = *m.types.pool;
  Json j;
  j["program"] = p.name;
  j["target"] = t.name;
  j["width"] = p.width;
  Json inputs = Json::array();
  for (int i = 0; i < pool.num_inputs(); ++i) {
    inputs.push_back({{"name", pool.input_name(i)}, {"class", to_string(pool.input_class(i))}});
  }
  j["inputs"] = inputs;
  j["types"] = temp_types(m);
  Json memops = Json::array();
  for (const auto& mo : m.memops) {
    memops.push_back({{"op", m.ops[mo.op].name()}, {"data", m.temps[mo.data].name}});
  }
  j["memops"] = memops;
  j["sets"] = sets_json(m, m.sets);
  return j;
}

CompileResult compile(const Program& p, const TargetDesc& t, const CompileOptions& o) {
  CompileResult res;
  Json& rep = res.report;
  rep["program"] = p.name;
  rep["target"] = t.name;
  rep["width"] = p.width;
  rep["mode"] = o.secure ? "secure" : "insecure";
  rep["implied"] = o.secure && o.implied;

  ExtendedModel m;
  try {
    m = build_model(p, t, o.secure, o.secure && o.implied, o.model);
  } catch (const ModelError& e) {
    res.exit_code = kInfeasible;
    res.message = std::string("model: ") + e.what();
    rep["status"] = to_string(SolveStatus::Infeasible);
    rep["message"] = res.message;
    return res;
  }
  if (o.dump_model) write_text(*o.dump_model, model_json(m).dump(2) + "\n");

  rep["types"] = temp_types(m);
  rep["sets"] = sets_json(m, m.sets);

  SolveOutcome r = solve(m, o.budget);
  rep["solver"] = solver_json(r);
  rep["status"] = to_string(r.status);

  if (!r.solution) {
    rep["objective"] = nullptr;
    if (r.status == SolveStatus::Infeasible) {
      res.exit_code = kInfeasible;
      res.message = "infeasible: constraint family " +
                    (r.infeasible_group.empty() ? std::string("base") : r.infeasible_group) +
                    " cannot be satisfied";
    } else {
      res.exit_code = kTimeout;
      res.message = "timeout: no solution within the budget (" + std::to_string(r.nodes) +
                    " nodes, " + std::to_string(r.seconds) + " s)";
    }
    rep["message"] = res.message;
    return res;
  }

  const Solution& sol = *r.solution;
  rep["objective"] = sol.objective;
  if (o.dump_solution) write_text(*o.dump_solution, solution_json(m, sol).dump(2) + "\n");

  // Insecure baseline for the overhead figure.
  if (o.secure) {
    ExtendedModel base = build_model(p, t, false, false, o.model);
    SolveOutcome b = solve(base, o.budget);
    Json bj = solver_json(b);
    bj["objective"] = b.solution ? Json(b.solution->objective) : Json(nullptr);
    rep["baseline"] = bj;
    if (b.solution && b.solution->objective > 0) {
      rep["overhead_percent"] =
          100.0 * (sol.objective - b.solution->objective) / b.solution->objective;
    } else {
      rep["overhead_percent"] = nullptr;
    }
  } else {
    rep["baseline"] = nullptr;
    rep["overhead_percent"] = 0.0;
  }

  AsmProgram a = to_asm(m, sol);
  res.listing = render_asm(a);
  rep["asm"] = asm_json(a);

  Json verdicts = Json::array();
  bool leaky = false;
  if (o.verify) {
    check_arity(a, o.check);
    auto pairs = o.check.secrets.empty() ? default_secret_pairs(a, 10, o.check.seed) : o.check.secrets;
    auto pub = o.check.pub.empty()
                   ? std::vector<std::uint64_t>(count_class(a, SecurityClass::Public), 0)
                   : o.check.pub;
    Sampling sampling = pick_sampling(a, o.check);
    for (const auto& pair : pairs) {
      Verdict v = check_equivalence(a, pub, pair.first, pair.second, sampling);
      leaky = leaky || !v.equivalent;
      verdicts.push_back(verdict_json(a, pair, v));
    }
  }
  rep["verified"] = o.verify;
  rep["verdicts"] = verdicts;
  rep["security"] = !o.verify ? (o.secure ? "constrained" : "unconstrained")
                              : (leaky ? "Leaky" : "Equivalent");

  if (leaky) {
    res.exit_code = kLeaky;
    res.message = "leaky: the emitted code fails the leakage equivalence check";
    rep["message"] = res.message;
  } else {
    rep["message"] = nullptr;
  }

  if (o.write_files) {
    fs::path dir(o.out_dir);
    write_text(dir / (p.name + ".s"), res.listing);
    write_text(dir / (p.name + ".report.json"), rep.dump(2) + "\n");
  }
  res.program = std::move(a);
  return res;
}

namespace {

struct Globals {
  std::string target = "thumb-like";
  bool json = false;
  std::uint64_t seed = 1;
};

struct ModelFlags {
  bool no_copies = false;
  bool no_spills = false;
  std::vector<std::string> copy_values;

  ModelOptions get() const {
    ModelOptions o;
    o.register_copies = !no_copies;
    o.spills = !no_spills;
    o.copy_values = copy_values;
    return o;
  }
};

void add_model_flags(CLI::App* cmd, ModelFlags& f) {
  cmd->add_flag("--no-copies", f.no_copies, "Disable register copies");
  cmd->add_flag("--no-spills", f.no_spills, "Disable spills to the stack");
  cmd->add_option("--copy-values", f.copy_values, "Program temps that may be copied")
      ->delimiter(',');
}

void print_json(const Json& j) { std::cout << j.dump(2) << "\n"; }

int fail(int code, const std::string& msg) {
  std::cerr << "maskcg: " << msg << "\n";
  return code;
}

// Solver gave up or proved the model infeasible while preparing a simulation.
struct NoSolution : std::runtime_error {
  ExitCode code;
  NoSolution(ExitCode c, const std::string& what) : std::runtime_error(what), code(c) {}
};

AsmProgram load_for_simulation(const std::string& path, const Globals& g, const ModelFlags& mf,
                               bool secure, const SolveBudget& budget) {
  if (fs::path(path).extension() == ".s") {
    try {
      return parse_asm(read_file(path));
    } catch (const AsmError& e) {
      throw InputError(path + ": " + e.what());
    }
  }
  Program p = read_program(path);
  TargetDesc t = resolve_target(g.target);
  ExtendedModel m = build_model(p, t, secure, secure, mf.get());
  SolveOutcome r = solve(m, budget);
  if (r.status == SolveStatus::Infeasible) {
    throw NoSolution(kInfeasible, "infeasible: constraint family " + r.infeasible_group + " cannot be satisfied");
  }
  if (!r.solution) throw NoSolution(kTimeout, "timeout: no solution within budget");
  return to_asm(m, *r.solution);
}

}  // namespace

int run(int argc, char** argv) {
  CLI::App app{"Secure register allocation and scheduling for masked code", "maskcg"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--target", g.target, "Target preset or description file")
      ->capture_default_str();
  app.add_flag("--json", g.json, "Print JSON to stdout");
  app.add_option("--seed", g.seed, "Seed for random secrets and Monte Carlo")->capture_default_str();

  // compile
  auto* compile_cmd = app.add_subcommand("compile", "Compile an IR file to assembly");
  std::string ir_path;
  bool insecure = false, secure_flag = false, no_implied = false, verify = false;
  double budget_seconds = SolveBudget{}.seconds;
  std::int64_t budget_nodes = SolveBudget{}.max_nodes;
  std::string dump_solution, dump_model, out_dir = ".";
  std::vector<std::string> secrets, pub;
  std::optional<std::uint64_t> samples;
  ModelFlags mf;
  compile_cmd->add_option("ir", ir_path, "IR file")->required();
  auto* sec_opt = compile_cmd->add_flag("--secure", secure_flag, "Add security constraints (default)");
  compile_cmd->add_flag("--insecure", insecure, "Skip security constraints")->excludes(sec_opt);
  compile_cmd->add_flag("--no-implied", no_implied, "Leave out implied constraints");
  compile_cmd->add_flag("--verify", verify, "Check leakage equivalence of the result");
  compile_cmd->add_option("--budget-seconds", budget_seconds, "Solver time budget");
  compile_cmd->add_option("--budget-nodes", budget_nodes, "Solver node budget");
  compile_cmd->add_option("--dump-solution", dump_solution, "Write the solution as JSON");
  compile_cmd->add_option("--dump-model", dump_model, "Write the constraint model as JSON");
  compile_cmd->add_option("--out-dir", out_dir, "Directory for .s and .report.json");
  compile_cmd->add_option("--secrets", secrets, "Secret pairs a,b (colon-separated per input)");
  compile_cmd->add_option("--pub", pub, "Public input values (hex)");
  compile_cmd->add_option("--samples", samples, "Monte Carlo samples for --verify");
  add_model_flags(compile_cmd, mf);

  // analyze
  auto* analyze_cmd = app.add_subcommand("analyze", "Print types and security sets");
  std::string analyze_path;
  ModelFlags amf;
  analyze_cmd->add_option("ir", analyze_path, "IR file")->required();
  add_model_flags(analyze_cmd, amf);

  // simulate
  auto* sim_cmd = app.add_subcommand("simulate", "Leakage statistics of an IR or .s file");
  std::string sim_path;
  std::optional<int> sim_width;
  std::vector<std::string> sim_secrets, sim_pub;
  bool sim_exhaustive = false;
  bool sim_insecure = false;
  std::optional<std::uint64_t> sim_samples;
  ModelFlags smf;
  sim_cmd->add_option("file", sim_path, "IR or assembly file")->required();
  sim_cmd->add_option("--width", sim_width, "Word width in bits");
  sim_cmd->add_option("--secrets", sim_secrets, "Secret pair a,b (colon-separated per input)");
  sim_cmd->add_option("--pub", sim_pub, "Public input values (hex)");
  sim_cmd->add_flag("--insecure", sim_insecure, "Compile an IR file without security constraints");
  auto* ex = sim_cmd->add_flag("--exhaustive", sim_exhaustive, "Enumerate all random inputs");
  sim_cmd->add_option("--samples", sim_samples, "Monte Carlo samples")->excludes(ex);
  add_model_flags(sim_cmd, smf);

  // oracle
  auto* oracle_cmd = app.add_subcommand("oracle", "Cross-check the solver against brute force");
  std::string oracle_path;
  int bound = kOracleBound;
  ModelFlags omf;
  oracle_cmd->add_option("ir", oracle_path, "IR file")->required();
  oracle_cmd->add_option("--bound", bound, "Largest operation count to enumerate")
      ->capture_default_str();
  add_model_flags(oracle_cmd, omf);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kOk : kInputError;
  }

  try {
    if (*compile_cmd) {
      Program p = read_program(ir_path);
      TargetDesc t = resolve_target(g.target);
      CompileOptions o;
      o.secure = !insecure;
      o.implied = !no_implied;
      o.verify = verify;
      o.budget = SolveBudget{budget_nodes, budget_seconds};
      o.model = mf.get();
      o.out_dir = out_dir;
      if (!dump_solution.empty()) o.dump_solution = dump_solution;
      if (!dump_model.empty()) o.dump_model = dump_model;
      for (const auto& s : secrets) o.check.secrets.push_back(parse_secret_pair(s));
      o.check.pub = parse_hex_list(pub);
      o.check.samples = samples;
      o.check.seed = g.seed;
      CompileResult r = compile(p, t, o);
      if (g.json) {
        print_json(r.report);
      } else if (r.program) {
        std::cout << r.listing;
        std::cout << "; objective " << r.report["objective"] << ", status "
                  << r.report["status"].get<std::string>() << ", security "
                  << r.report["security"].get<std::string>() << "\n";
      }
      if (r.exit_code != kOk) return fail(r.exit_code, r.message);
      return kOk;
    }
    if (*analyze_cmd) {
      Program p = read_program(analyze_path);
      TargetDesc t = resolve_target(g.target);
      print_json(analyze(p, t, amf.get()));
      return kOk;
    }
    if (*sim_cmd) {
      AsmProgram a = load_for_simulation(sim_path, g, smf, !sim_insecure, SolveBudget{});
      if (sim_width) a.width = *sim_width;
      VerifyOptions v;
      v.seed = g.seed;
      v.samples = sim_samples;
      for (const auto& s : sim_secrets) v.secrets.push_back(parse_secret_pair(s));
      v.pub = parse_hex_list(sim_pub);
      check_arity(a, v);
      if (v.secrets.empty()) v.secrets = default_secret_pairs(a, 1, v.seed);
      auto pub_values = v.pub.empty()
                            ? std::vector<std::uint64_t>(count_class(a, SecurityClass::Public), 0)
                            : v.pub;
      Sampling sampling = pick_sampling(a, v);
      if (sim_exhaustive && !sampling.exhaustive) {
        throw InputError("--exhaustive needs width x random inputs <= " +
                         std::to_string(kExhaustiveLog2));
      }
      Json j;
      j["program"] = a.name;
      j["target"] = a.target;
      j["width"] = a.width;
      j["asm"] = asm_json(a);
      bool leaky = false;
      Json verdicts = Json::array();
      for (const auto& pair : v.secrets) {
        Verdict vd = check_equivalence(a, pub_values, pair.first, pair.second, sampling);
        leaky = leaky || !vd.equivalent;
        Json vj = verdict_json(a, pair, vd);
        Json stats = Json::array();
        for (size_t i = 0; i < vd.first.positions.size(); ++i) {
          const auto& s1 = vd.first.positions[i];
          const auto& s2 = vd.second.positions[i];
          Json sj;
          sj["position"] = s1.position;
          sj["instr"] = s1.instr;
          sj["kind"] = to_string(s1.kind);
          if (vd.first.exact) {
            sj["mean"] = Json::array({rational_str(s1.mean), rational_str(s2.mean)});
            sj["variance"] = Json::array({rational_str(s1.var), rational_str(s2.var)});
          } else {
            sj["mean"] = Json::array({s1.mean_f, s2.mean_f});
            sj["variance"] = Json::array({s1.var_f, s2.var_f});
          }
          stats.push_back(std::move(sj));
        }
        vj["positions"] = stats;
        verdicts.push_back(std::move(vj));
      }
      j["verdict"] = leaky ? "Leaky" : "Equivalent";
      j["verdicts"] = verdicts;
      // One concrete run: first secret, every random input zero.
      auto inputs = assemble_inputs(a, pub_values, v.secrets.front().first,
                                    std::vector<std::uint64_t>(count_class(a, SecurityClass::Random), 0));
      Json trace = Json::array();
      for (const auto& ob : simulate(a, inputs)) {
        trace.push_back({{"position", ob.position}, {"instr", ob.instr},
                         {"kind", to_string(ob.kind)}, {"value", ob.value}});
      }
      j["trace_sample"] = trace;
      print_json(j);
      return leaky ? kLeaky : kOk;
    }
    if (*oracle_cmd) {
      Program p = read_program(oracle_path);
      TargetDesc t = resolve_target(g.target);
      OracleReport r = cross_check(p, t, omf.get(), bound);
      print_json(oracle_json(r));
      if (!r.discrepancies.empty()) {
        return fail(kDiscrepancy, std::to_string(r.discrepancies.size()) + " discrepancies");
      }
      return kOk;
    }
  } catch (const NoSolution& e) {
    return fail(e.code, e.what());
  } catch (const InputError& e) {
    return fail(kInputError, e.what());
  } catch (const OracleError& e) {
    return fail(kInputError, std::string("oracle: ") + e.what());
  } catch (const LeakageError& e) {
    return fail(kInputError, std::string("leakage: ") + e.what());
  } catch (const ModelError& e) {
    return fail(kInfeasible, std::string("model: ") + e.what());
  } catch (const std::exception& e) {
    return fail(kInputError, e.what());
  }
  return kInputError;
}

}  // namespace maskcg::cli
