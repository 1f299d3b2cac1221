#pragma once

#include <cstdint>
#include <vector>

#include "lab/bitvec.hpp"
#include "lab/gf2k.hpp"
#include "lab/rng.hpp"

namespace lab {

// Uniform k x m parity-check matrix: every entry an independent fair bit.
BitMatrix sample_parity_matrix(size_t k, size_t m, Rng& rng);

// Uniform right-hand side.
BitVector sample_rhs_uniform(size_t k, Rng& rng);

// Small-bias right-hand side via the powering construction: pick x, y uniform
// in GF(2^w); bit i is <bits(x^(i+1)), bits(y)>. Every nonempty parity of the
// output has bias at most k / 2^w, so w = ceil(log2(k / delta)) meets the
// requested bias bound with seed length 2w = O(log k + log(1/delta)).
BitVector sample_rhs_delta_biased(size_t k, double delta, Rng& rng);

// k-wise independent sign-flip family: a uniform polynomial of degree
// kappa - 1 over GF(2^w) with 2^w >= m, evaluated at the m distinct points
// 0..m-1; the output bit at position i is the low bit of the evaluation.
// Evaluations at any kappa distinct points are jointly uniform, so the
// extracted bits are kappa-wise independent fair coins.
class SignFlipFamily {
 public:
  SignFlipFamily(size_t kappa, size_t m, Rng& rng);

  BitVector evaluate() const;

  size_t kappa() const { return kappa_; }
  size_t m() const { return m_; }
  int field_width() const { return field_.width(); }

 private:
  size_t kappa_;
  size_t m_;
  Gf2k field_;
  std::vector<u128> coeffs_;
};

// Convenience: draw a fresh family from `rng` and evaluate it once.
BitVector draw_sign_flip(size_t kappa, size_t m, Rng& rng);

}  // namespace lab
