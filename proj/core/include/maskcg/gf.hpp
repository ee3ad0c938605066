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

// Word arithmetic shared by the simulator and the expression evaluator.

#ifndef MASKCG_GF_HPP_
#define MASKCG_GF_HPP_

#include <cstdint>

#include "maskcg/ir.hpp"

namespace maskcg {

// Reduction polynomial for GF(2^w), including the x^w term.
//   w=4  : x^4 + x + 1
//   w=8  : x^8 + x^4 + x^3 + x + 1
//   w=16 : x^16 + x^5 + x^3 + x^2 + 1
//   w=32 : x^32 + x^7 + x^3 + x^2 + 1
// GF(2^16) has no irreducible trinomial, hence the pentanomials.
std::uint64_t gf_polynomial(int width);

std::uint64_t gf_mul(std::uint64_t a, std::uint64_t b, int width);

// Rabin's test over GF(2)[x]; poly includes the leading term.
bool gf_irreducible(std::uint64_t poly, int degree);

inline std::uint64_t word_mask(int width) {
  return width >= 64 ? ~0ULL : ((1ULL << width) - 1);
}

// Evaluates a unary or binary ALU opcode on words of the given width.
std::uint64_t eval_op(Opcode op, std::uint64_t a, std::uint64_t b, int width);

}  // namespace maskcg

#endif  // MASKCG_GF_HPP_
