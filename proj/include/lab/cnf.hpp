#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <vector>

#include "lab/bitvec.hpp"
#include "lab/rng.hpp"

namespace lab {

// Monotone (all-positive) 3-uniform CNF skeleton: each clause is a set of
// three distinct variable indices in [0, m).
struct Cnf {
  uint32_t m = 0;
  std::vector<std::array<uint32_t, 3>> clauses;

  bool operator==(const Cnf&) const = default;
};

// A literal after masking: variable index plus a negation flag.
struct SignedLit {
  uint32_t var = 0;
  uint8_t neg = 0;  // 1 = negated

  bool operator==(const SignedLit&) const = default;
};

// Signed 3-CNF produced by acting on a Cnf with a mask.
struct SignedCnf {
  uint32_t m = 0;
  std::vector<std::array<SignedLit, 3>> clauses;

  bool operator==(const SignedCnf&) const = default;
};

// Mask group element: a variable permutation pi together with per-variable
// sign flips sigma. Acting on an all-positive clause variable j yields the
// literal on variable pi(j) whose negation flag is sigma[pi(j)].
struct Mask {
  std::vector<uint32_t> pi;
  BitVector sigma;

  static Mask identity(uint32_t m);
  static Mask random(uint32_t m, Rng& rng);

  // Throws std::invalid_argument unless pi is a bijection on [0, m) and
  // sigma has length m.
  void validate() const;
};

SignedCnf apply_mask(const Cnf& f, const Mask& h);

// The same group action on an already-signed formula: literal (v, s) becomes
// (pi(v), s xor sigma[pi(v)]).
SignedCnf apply_mask_signed(const SignedCnf& f, const Mask& h);

// Flip the sign of every literal on variable v with sigma[v] = 1; applying
// the same sigma twice restores the input.
SignedCnf flip_signs(const SignedCnf& f, const BitVector& sigma);

// Plain clause-by-clause evaluation; literal (v, neg) is satisfied by x iff
// x[v] xor neg = 1.
bool satisfies(const SignedCnf& f, const BitVector& x);

// Enumerate every satisfying assignment of f exactly once, restricted to the
// optional partial assignment `fixed` (-1 free, 0/1 pinned). Assignments are
// reported as packed words (bit v = value of variable v); requires m <= 63.
// The callback returns false to stop early. Backtracking search with unit
// propagation; independent of the coset-enumeration path used elsewhere.
void enumerate_solutions(const SignedCnf& f, const std::vector<int8_t>& fixed,
                         const std::function<bool(uint64_t)>& on_solution);

// All solutions as packed words (convenience wrapper, no early stop).
std::vector<uint64_t> all_solutions(const SignedCnf& f);

}  // namespace lab
