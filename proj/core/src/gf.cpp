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

#include "maskcg/gf.hpp"

#include <bit>
#include <stdexcept>
#include <vector>

namespace maskcg {

namespace {

int degree(std::uint64_t p) { return p == 0 ? -1 : 63 - std::countl_zero(p); }

std::uint64_t poly_mod(std::uint64_t a, std::uint64_t m) {
  int dm = degree(m);
  for (int d = degree(a); d >= dm; d = degree(a)) a ^= m << (d - dm);
  return a;
}

// a, b have degree < deg(m) <= 32.
std::uint64_t poly_mulmod(std::uint64_t a, std::uint64_t b, std::uint64_t m) {
  std::uint64_t r = 0;
  while (b) {
    if (b & 1) r ^= a;
    b >>= 1;
    a <<= 1;
    if (a >> degree(m) & 1) a ^= m;
  }
  return r;
}

std::uint64_t poly_gcd(std::uint64_t a, std::uint64_t b) {
  while (b) {
    a = poly_mod(a, b);
    std::swap(a, b);
  }
  return a;
}

// x^(2^k) mod m
std::uint64_t frobenius(std::uint64_t m, int k) {
  std::uint64_t x = poly_mod(2, m);
  for (int i = 0; i < k; ++i) x = poly_mulmod(x, x, m);
  return x;
}

}  // namespace

std::uint64_t gf_polynomial(int width) {
  switch (width) {
    case 4: return 0x13;
    case 8: return 0x11B;
    case 16: return 0x1002D;
    case 32: return 0x10000008DULL;
    default: throw std::invalid_argument("no field polynomial for width " + std::to_string(width));
  }
}

bool gf_irreducible(std::uint64_t poly, int n) {
  if (n < 1 || n > 32 || degree(poly) != n) return false;
  if (poly_mod(frobenius(poly, n), poly) != poly_mod(2, poly)) return false;
  std::vector<int> primes;
  for (int q = 2, r = n; q <= r; ++q) {
    if (r % q == 0) {
      primes.push_back(q);
      while (r % q == 0) r /= q;
    }
  }
  for (int q : primes) {
    std::uint64_t h = frobenius(poly, n / q) ^ poly_mod(2, poly);
    if (poly_gcd(poly, h) != 1) return false;
  }
  return true;
}

std::uint64_t gf_mul(std::uint64_t a, std::uint64_t b, int width) {
  std::uint64_t poly = gf_polynomial(width);
  std::uint64_t mask = word_mask(width);
  a &= mask;
  b &= mask;
  std::uint64_t r = 0;
  while (b) {
    if (b & 1) r ^= a;
    b >>= 1;
    a <<= 1;
    if (a >> width & 1) a ^= poly;
  }
  return r & mask;
}

std::uint64_t eval_op(Opcode op, std::uint64_t a, std::uint64_t b, int width) {
  std::uint64_t mask = word_mask(width);
  switch (op) {
    case Opcode::Xor: return (a ^ b) & mask;
    case Opcode::And: return a & b & mask;
    case Opcode::Or: return (a | b) & mask;
    case Opcode::Add: return (a + b) & mask;
    case Opcode::GfMul: return gf_mul(a, b, width);
    case Opcode::Not: return ~a & mask;
    case Opcode::Copy: return a & mask;
    default: throw std::invalid_argument("not an ALU opcode: " + std::string(to_string(op)));
  }
}

}  // namespace maskcg
