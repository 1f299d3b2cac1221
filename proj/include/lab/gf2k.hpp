#pragma once

#include <cstdint>
#include <vector>

namespace lab {

using u128 = unsigned __int128;

// Arithmetic in GF(2^w) for 2 <= w <= 120. Elements are polynomials over
// GF(2) packed into the low w bits of a u128. The modulus is the
// lexicographically least irreducible polynomial of degree w; this is a
// well-defined mathematical constant per degree, computed once at first use
// and cached (see docs/field-moduli.md for the table at common widths).
class Gf2k {
 public:
  explicit Gf2k(int width);

  int width() const { return w_; }
  u128 modulus() const { return poly_; }  // includes the x^w term
  u128 element_mask() const { return mask_; }

  u128 mul(u128 a, u128 b) const;
  u128 pow(u128 a, uint64_t e) const;

  // Horner evaluation of sum coeffs[i] * point^i (coeffs[0] is the constant).
  u128 eval_poly(const std::vector<u128>& coeffs, u128 point) const;

  // Lexicographically least irreducible polynomial of the given degree,
  // returned with the leading x^degree bit set.
  static u128 lex_least_irreducible(int degree);
  static bool is_irreducible(u128 poly, int degree);

 private:
  int w_;
  u128 poly_;
  u128 mask_;
};

}  // namespace lab
