#pragma once

#include <cstdint>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

namespace lab {

// Dense bit vector over GF(2), packed into 64-bit words. Bit 0 is the
// lowest-order bit of the first word. Public element access is bounds-checked.
//
// Wire format: 32-bit little-endian bit count, then ceil(n/8) bytes with
// little-endian bit order inside each byte.
class BitVector {
 public:
  BitVector() = default;
  explicit BitVector(size_t n) : words_((n + 63) / 64, 0), len_(n) {}

  static BitVector zeros(size_t n) { return BitVector(n); }
  static BitVector unit(size_t n, size_t i);
  static BitVector from_bits(std::initializer_list<int> bits);
  static BitVector from_word(uint64_t word, size_t n);

  size_t size() const { return len_; }
  bool empty() const { return len_ == 0; }

  bool get(size_t i) const;
  void set(size_t i, bool v);
  void flip(size_t i);

  BitVector& operator^=(const BitVector& other);
  friend BitVector operator^(BitVector a, const BitVector& b) { return a ^= b; }
  bool operator==(const BitVector& other) const;
  bool operator!=(const BitVector& other) const { return !(*this == other); }

  // Parity of all bits (sum over GF(2)).
  bool parity() const;
  // Number of set bits.
  size_t weight() const;
  bool any() const { return weight() != 0; }

  // Low 64 bits as a word (valid when size() <= 64).
  uint64_t as_word() const;

  std::span<const uint64_t> words() const { return words_; }
  std::span<uint64_t> words() { return words_; }

  std::string to_string() const;  // e.g. "10110", index 0 first

  void serialize(std::vector<uint8_t>& out) const;
  static BitVector deserialize(const uint8_t*& cursor, const uint8_t* end);

  // Raw packed bytes prefixed with the length; usable as an exact map key.
  std::string pack_key() const;

 private:
  void check_index(size_t i) const;
  std::vector<uint64_t> words_;
  size_t len_ = 0;
};

// Inner product <a, b> over GF(2). Lengths must match.
bool dot(const BitVector& a, const BitVector& b);

// Dense GF(2) matrix stored row-major as BitVectors. k rows, m columns.
class BitMatrix {
 public:
  BitMatrix() = default;
  BitMatrix(size_t rows, size_t cols)
      : rows_(rows, BitVector(cols)), cols_(cols) {}

  static BitMatrix identity(size_t n);

  size_t rows() const { return rows_.size(); }
  size_t cols() const { return cols_; }

  const BitVector& row(size_t r) const { return rows_.at(r); }
  BitVector& row(size_t r) { return rows_.at(r); }

  bool get(size_t r, size_t c) const { return rows_.at(r).get(c); }
  void set(size_t r, size_t c, bool v) { rows_.at(r).set(c, v); }

  // Matrix-vector product A * x (x has m bits, result has k bits).
  BitVector mul(const BitVector& x) const;

  // Column i as a k-bit vector; equals A * e_i.
  BitVector column(size_t i) const;

  bool operator==(const BitMatrix& other) const;
  bool operator!=(const BitMatrix& other) const { return !(*this == other); }

  void serialize(std::vector<uint8_t>& out) const;
  static BitMatrix deserialize(const uint8_t*& cursor, const uint8_t* end);

 private:
  std::vector<BitVector> rows_;
  size_t cols_ = 0;
};

// Solution set of A x = b described as an affine coset: a particular solution
// plus the span of a null-space basis. `consistent == false` means the system
// has no solution (particular/basis are then empty).
struct AffineCoset {
  bool consistent = false;
  size_t rank = 0;
  BitVector particular;
  std::vector<BitVector> null_basis;

  size_t dim() const { return null_basis.size(); }

  // Membership test: x solves A x = b iff x is in the coset. Provided for
  // callers that keep the original system around.
  bool contains(const BitMatrix& a, const BitVector& b, const BitVector& x) const;
};

// Gaussian elimination over GF(2). Returns rank, consistency, a particular
// solution, and a null-space basis of A (dimension m - rank).
AffineCoset gaussian_affine_solve(const BitMatrix& a, const BitVector& b);

}  // namespace lab
