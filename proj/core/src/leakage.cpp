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

#include "maskcg/leakage.hpp"

#include <bit>
#include <cmath>
#include <functional>
#include <random>

#include "maskcg/gf.hpp"

namespace maskcg {

namespace {

std::uint64_t read_memory(const MachineState& st, std::uint64_t addr) {
  auto it = st.memory.find(addr);
  if (it == st.memory.end()) throw LeakageError("read of uninitialized address " + std::to_string(addr));
  return it->second;
}

int slot_index(const AsmProgram& a, int loc) { return loc - a.num_registers(); }

std::vector<int> indices_of(const AsmProgram& a, SecurityClass c) {
  std::vector<int> out;
  for (size_t i = 0; i < a.inputs.size(); ++i) {
    if (a.inputs[i].cls == c) out.push_back(static_cast<int>(i));
  }
  return out;
}

struct Accumulator {
  std::vector<std::int64_t> sum, sumsq;
  std::vector<double> fsum, fsumsq;
  LeakTrace shape;

  void add(const LeakTrace& t) {
    if (shape.empty()) {
      shape = t;
      sum.assign(t.size(), 0);
      sumsq.assign(t.size(), 0);
      fsum.assign(t.size(), 0);
      fsumsq.assign(t.size(), 0);
    }
    for (size_t i = 0; i < t.size(); ++i) {
      sum[i] += t[i].value;
      sumsq[i] += static_cast<std::int64_t>(t[i].value) * t[i].value;
    }
  }
};

}  // namespace

int hw(std::uint64_t x) { return std::popcount(x); }

std::string_view to_string(LeakKind k) { return k == LeakKind::ROT ? "ROT" : "MRE"; }

MachineState MachineState::initial(const AsmProgram& a, const std::vector<std::uint64_t>& inputs,
                                   std::uint64_t fill) {
  if (inputs.size() != a.inputs.size()) {
    throw LeakageError("expected " + std::to_string(a.inputs.size()) + " inputs, got " +
                       std::to_string(inputs.size()));
  }
  MachineState st;
  st.width = a.width;
  std::uint64_t mask = word_mask(a.width);
  st.regs.assign(a.num_registers(), fill & mask);
  st.slots.assign(a.stack_slots, std::nullopt);
  st.bus = fill & mask;
  for (size_t i = 0; i < inputs.size(); ++i) st.regs.at(a.inputs[i].reg) = inputs[i] & mask;
  return st;
}

std::pair<MachineState, LeakTrace> simulate(const AsmProgram& a, MachineState st) {
  LeakTrace trace;
  const std::uint64_t mask = word_mask(a.width);
  auto emit = [&](int instr, LeakKind k, std::uint64_t v) {
    trace.push_back({static_cast<int>(trace.size()), instr, k, hw(v & mask)});
  };
  auto write_reg = [&](int instr, int r, std::uint64_t v) {
    emit(instr, LeakKind::ROT, v ^ st.regs.at(r));
    st.regs[r] = v;
  };
  auto bus = [&](int instr, std::uint64_t v) {
    emit(instr, LeakKind::MRE, v ^ st.bus);
    st.bus = v;
  };
  for (size_t n = 0; n < a.code.size(); ++n) {
    const AsmInstr& i = a.code[n];
    const int k = static_cast<int>(n);
    switch (i.kind) {
      case AsmKind::Alu: {
        std::uint64_t x = st.regs.at(i.src.at(0));
        std::uint64_t y = i.src.size() > 1 ? st.regs.at(i.src[1]) : i.imm.value_or(0);
        write_reg(k, i.dst, eval_op(i.opcode, x, y, a.width) & mask);
        break;
      }
      case AsmKind::Move:
        write_reg(k, i.dst, st.regs.at(i.src.at(0)));
        break;
      case AsmKind::Spill: {
        std::uint64_t v = st.regs.at(i.src.at(0));
        bus(k, v);
        st.slots.at(slot_index(a, i.dst)) = v;
        break;
      }
      case AsmKind::Reload: {
        auto v = st.slots.at(slot_index(a, i.src.at(0)));
        if (!v) throw LeakageError("reload of empty slot " + a.location_name(i.src[0]));
        bus(k, *v);
        write_reg(k, i.dst, *v);
        break;
      }
      case AsmKind::Store: {
        std::uint64_t v = st.regs.at(i.src.at(0));
        bus(k, v);
        st.memory[i.imm.value_or(0)] = v;
        break;
      }
      case AsmKind::Load: {
        std::uint64_t v = read_memory(st, i.imm.value_or(0));
        bus(k, v);
        write_reg(k, i.dst, v);
        break;
      }
    }
  }
  return {std::move(st), std::move(trace)};
}

LeakTrace simulate(const AsmProgram& a, const std::vector<std::uint64_t>& inputs) {
  return simulate(a, MachineState::initial(a, inputs)).second;
}

std::vector<int> recursive_leakage(const AsmProgram& a, const MachineState& st0) {
  const std::uint64_t mask = word_mask(a.width);
  const auto& code = a.code;
  std::vector<std::optional<std::uint64_t>> memo(code.size());

  // Word produced by instruction k: the register or bus value it writes.
  std::function<std::uint64_t(int)> value;
  // Contents of location loc just before instruction k runs.
  std::function<std::uint64_t(int, int)> loc_before = [&](int k, int loc) -> std::uint64_t {
    if (k == 0) {
      if (loc < a.num_registers()) return st0.regs.at(loc);
      auto v = st0.slots.at(slot_index(a, loc));
      if (!v) throw LeakageError("reload of empty slot " + a.location_name(loc));
      return *v;
    }
    if (code[k - 1].dst == loc) return value(k - 1);
    return loc_before(k - 1, loc);
  };
  std::function<std::uint64_t(int, std::uint64_t)> mem_before = [&](int k, std::uint64_t addr) -> std::uint64_t {
    if (k == 0) return read_memory(st0, addr);
    const AsmInstr& p = code[k - 1];
    if (p.kind == AsmKind::Store && p.imm.value_or(0) == addr) return loc_before(k - 1, p.src[0]);
    return mem_before(k - 1, addr);
  };
  value = [&](int k) -> std::uint64_t {
    if (memo[k]) return *memo[k];
    const AsmInstr& i = code[k];
    std::uint64_t v = 0;
    switch (i.kind) {
      case AsmKind::Alu: {
        std::uint64_t x = loc_before(k, i.src[0]);
        std::uint64_t y = i.src.size() > 1 ? loc_before(k, i.src[1]) : i.imm.value_or(0);
        v = eval_op(i.opcode, x, y, a.width) & mask;
        break;
      }
      case AsmKind::Move: case AsmKind::Spill: case AsmKind::Store:
        v = loc_before(k, i.src[0]);
        break;
      case AsmKind::Reload:
        v = loc_before(k, i.src[0]);
        break;
      case AsmKind::Load:
        v = mem_before(k, i.imm.value_or(0));
        break;
    }
    memo[k] = v;
    return v;
  };
  std::function<std::uint64_t(int)> bus_before = [&](int k) -> std::uint64_t {
    if (k == 0) return st0.bus;
    if (code[k - 1].is_memory()) return value(k - 1);
    return bus_before(k - 1);
  };
  // L(P; i) = L(P) followed by the observations of i.
  std::function<std::vector<int>(int)> leakage = [&](int n) -> std::vector<int> {
    if (n == 0) return {};
    std::vector<int> out = leakage(n - 1);
    const int k = n - 1;
    const AsmInstr& i = code[k];
    if (i.is_memory()) out.push_back(hw(value(k) ^ bus_before(k)));
    if (i.writes_register(a.num_registers())) out.push_back(hw(value(k) ^ loc_before(k, i.dst)));
    return out;
  };
  return leakage(static_cast<int>(code.size()));
}

std::vector<std::uint64_t> assemble_inputs(const AsmProgram& a, const std::vector<std::uint64_t>& pub,
                                           const std::vector<std::uint64_t>& sec,
                                           const std::vector<std::uint64_t>& rand) {
  std::vector<std::uint64_t> out(a.inputs.size(), 0);
  size_t ip = 0, is = 0, ir = 0;
  for (size_t i = 0; i < a.inputs.size(); ++i) {
    const std::vector<std::uint64_t>* src = nullptr;
    size_t* at = nullptr;
    switch (a.inputs[i].cls) {
      case SecurityClass::Public: src = &pub; at = &ip; break;
      case SecurityClass::Secret: src = &sec; at = &is; break;
      case SecurityClass::Random: src = &rand; at = &ir; break;
    }
    if (*at >= src->size()) {
      throw LeakageError("missing value for " + std::string(to_string(a.inputs[i].cls)) + " input " +
                         a.inputs[i].name);
    }
    out[i] = (*src)[(*at)++] & word_mask(a.width);
  }
  if (ip != pub.size() || is != sec.size()) throw LeakageError("too many public or secret values");
  return out;
}

LeakStats leak_stats(const AsmProgram& a, const std::vector<std::uint64_t>& pub,
                     const std::vector<std::uint64_t>& sec, const Sampling& sampling) {
  const int nrand = static_cast<int>(indices_of(a, SecurityClass::Random).size());
  const int w = a.width;
  Accumulator acc;
  LeakStats out;
  out.exact = sampling.exhaustive;
  std::vector<std::uint64_t> rand(nrand, 0);
  auto run = [&] { acc.add(simulate(a, assemble_inputs(a, pub, sec, rand))); };
  if (sampling.exhaustive) {
    if (static_cast<std::int64_t>(w) * nrand > kExhaustiveLog2) {
      throw LeakageError("exhaustive enumeration needs 2^" + std::to_string(w * nrand) +
                         " runs, above the bound 2^" + std::to_string(kExhaustiveLog2));
    }
    const std::uint64_t total = 1ULL << (w * nrand);
    const std::uint64_t mask = word_mask(w);
    for (std::uint64_t x = 0; x < total; ++x) {
      for (int j = 0; j < nrand; ++j) rand[j] = (x >> (j * w)) & mask;
      run();
    }
    out.samples = total;
  } else {
    std::mt19937_64 rng(sampling.seed);
    for (std::uint64_t s = 0; s < sampling.samples; ++s) {
      for (auto& r : rand) r = rng() & word_mask(w);
      run();
    }
    out.samples = sampling.samples;
  }
  if (out.samples == 0) throw LeakageError("no samples");
  const auto n = static_cast<std::int64_t>(out.samples);
  for (size_t i = 0; i < acc.shape.size(); ++i) {
    PositionStats ps;
    ps.position = acc.shape[i].position;
    ps.instr = acc.shape[i].instr;
    ps.kind = acc.shape[i].kind;
    ps.mean_f = static_cast<double>(acc.sum[i]) / static_cast<double>(n);
    ps.var_f = static_cast<double>(acc.sumsq[i]) / static_cast<double>(n) - ps.mean_f * ps.mean_f;
    if (ps.var_f < 0) ps.var_f = 0;
    if (out.exact) {
      ps.mean = Rational(acc.sum[i], n);
      ps.var = Rational(n * acc.sumsq[i] - acc.sum[i] * acc.sum[i], n * n);
      out.sum_mean += ps.mean;
      out.sum_var += ps.var;
    }
    out.sum_mean_f += ps.mean_f;
    out.sum_var_f += ps.var_f;
    out.positions.push_back(ps);
  }
  return out;
}

Verdict check_equivalence(const AsmProgram& a, const std::vector<std::uint64_t>& pub,
                          const std::vector<std::uint64_t>& sec1, const std::vector<std::uint64_t>& sec2,
                          const Sampling& sampling) {
  Verdict v;
  v.first = leak_stats(a, pub, sec1, sampling);
  v.second = leak_stats(a, pub, sec2, sampling);
  const auto& p1 = v.first.positions;
  const auto& p2 = v.second.positions;
  v.dsum_mean_f = v.second.sum_mean_f - v.first.sum_mean_f;
  v.dsum_var_f = v.second.sum_var_f - v.first.sum_var_f;
  if (sampling.exhaustive) {
    v.dsum_mean = v.second.sum_mean - v.first.sum_mean;
    v.dsum_var = v.second.sum_var - v.first.sum_var;
    v.equivalent = v.dsum_mean.numerator() == 0 && v.dsum_var.numerator() == 0;
  } else {
    // Sampling noise bound: six standard errors of each sum, plus a floor.
    double sd = 0, var = 0;
    for (size_t i = 0; i < p1.size(); ++i) {
      sd += std::sqrt(std::max(p1[i].var_f, p2[i].var_f));
      var += std::max(p1[i].var_f, p2[i].var_f);
    }
    const double n = static_cast<double>(sampling.samples);
    const double tol_mean = 1e-9 + 6.0 * sd * std::sqrt(2.0 / n);
    const double tol_var = 1e-9 + 6.0 * var * std::sqrt(4.0 / n);
    v.equivalent = std::abs(v.dsum_mean_f) <= tol_mean && std::abs(v.dsum_var_f) <= tol_var;
  }
  for (size_t i = 0; i < p1.size() && i < p2.size(); ++i) {
    PositionDiff d;
    d.position = p1[i].position;
    d.instr = p1[i].instr;
    d.kind = p1[i].kind;
    d.dmean = p2[i].mean_f - p1[i].mean_f;
    d.dvar = p2[i].var_f - p1[i].var_f;
    bool differs;
    if (sampling.exhaustive) {
      d.dmean_q = p2[i].mean - p1[i].mean;
      d.dvar_q = p2[i].var - p1[i].var;
      differs = d.dmean_q.numerator() != 0 || d.dvar_q.numerator() != 0;
    } else {
      const double n = static_cast<double>(sampling.samples);
      double sd = std::sqrt(std::max(p1[i].var_f, p2[i].var_f));
      differs = std::abs(d.dmean) > 1e-9 + 6.0 * sd * std::sqrt(2.0 / n);
    }
    if (differs) v.differing.push_back(d);
  }
  return v;
}

}  // namespace maskcg
