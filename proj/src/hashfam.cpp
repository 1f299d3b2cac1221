#include "lab/hashfam.hpp"

#include <bit>
#include <cmath>
#include <stdexcept>

#include "lab/common.hpp"

namespace lab {

namespace {

u128 uniform_u128_below_pow2(int w, Rng& rng) {
  if (w <= 64) {
    uint64_t x = rng.next_u64();
    if (w < 64) x &= (1ULL << w) - 1;
    return x;
  }
  u128 hi = rng.next_u64();
  u128 lo = rng.next_u64();
  u128 x = (hi << 64) | lo;
  return x & ((static_cast<u128>(1) << w) - 1);
}

bool parity_u128(u128 x) {
  uint64_t folded = static_cast<uint64_t>(x) ^ static_cast<uint64_t>(x >> 64);
  return std::popcount(folded) & 1;
}

}  // namespace

BitMatrix sample_parity_matrix(size_t k, size_t m, Rng& rng) {
  BitMatrix a(k, m);
  for (size_t r = 0; r < k; ++r) {
    auto words = a.row(r).words();
    size_t full = m / 64;
    for (size_t w = 0; w < full; ++w) words[w] = rng.next_u64();
    if (m % 64 != 0) {
      words[full] = rng.next_u64() & ((1ULL << (m % 64)) - 1);
    }
  }
  return a;
}

BitVector sample_rhs_uniform(size_t k, Rng& rng) {
  BitVector b(k);
  auto words = b.words();
  size_t full = k / 64;
  for (size_t w = 0; w < full; ++w) words[w] = rng.next_u64();
  if (k % 64 != 0) words[full] = rng.next_u64() & ((1ULL << (k % 64)) - 1);
  return b;
}

BitVector sample_rhs_delta_biased(size_t k, double delta, Rng& rng) {
  if (!(delta > 0.0 && delta < 1.0)) {
    throw std::invalid_argument("sample_rhs_delta_biased: delta must be in (0,1)");
  }
  if (k == 0) return BitVector(0);
  int w = static_cast<int>(std::ceil(std::log2(static_cast<double>(k) / delta)));
  if (w < 3) w = 3;
  if (w > 120) {
    throw BudgetError("sample_rhs_delta_biased: requested bias needs field width " +
                      std::to_string(w) + " > 120");
  }
  Gf2k field(w);
  u128 x = uniform_u128_below_pow2(w, rng);
  u128 y = uniform_u128_below_pow2(w, rng);
  BitVector b(k);
  u128 xe = x;  // x^(i+1) as i advances
  for (size_t i = 0; i < k; ++i) {
    if (parity_u128(xe & y)) b.set(i, true);
    xe = field.mul(xe, x);
  }
  return b;
}

SignFlipFamily::SignFlipFamily(size_t kappa, size_t m, Rng& rng)
    : kappa_(kappa),
      m_(m),
      field_([m] {
        if (m == 0) throw std::invalid_argument("SignFlipFamily: m must be positive");
        int w = 2;
        while ((static_cast<u128>(1) << w) < m) ++w;
        return w;
      }()) {
  if (kappa == 0) throw std::invalid_argument("SignFlipFamily: kappa must be positive");
  coeffs_.resize(kappa_);
  for (size_t i = 0; i < kappa_; ++i) {
    coeffs_[i] = uniform_u128_below_pow2(field_.width(), rng);
  }
}

BitVector SignFlipFamily::evaluate() const {
  BitVector sigma(m_);
  for (size_t i = 0; i < m_; ++i) {
    u128 v = field_.eval_poly(coeffs_, static_cast<u128>(i));
    if (v & 1) sigma.set(i, true);
  }
  return sigma;
}

BitVector draw_sign_flip(size_t kappa, size_t m, Rng& rng) {
  return SignFlipFamily(kappa, m, rng).evaluate();
}

}  // namespace lab
