#include "lab/bitvec.hpp"

#include <bit>
#include <cstring>
#include <stdexcept>

namespace lab {

void BitVector::check_index(size_t i) const {
  if (i >= len_) {
    throw std::out_of_range("BitVector index " + std::to_string(i) +
                            " out of range for length " + std::to_string(len_));
  }
}

BitVector BitVector::unit(size_t n, size_t i) {
  BitVector v(n);
  v.set(i, true);
  return v;
}

BitVector BitVector::from_bits(std::initializer_list<int> bits) {
  BitVector v(bits.size());
  size_t i = 0;
  for (int b : bits) v.set(i++, b != 0);
  return v;
}

BitVector BitVector::from_word(uint64_t word, size_t n) {
  if (n > 64) throw std::invalid_argument("from_word: length exceeds 64");
  BitVector v(n);
  if (n > 0) {
    uint64_t mask = (n == 64) ? ~0ULL : ((1ULL << n) - 1);
    v.words_[0] = word & mask;
  }
  return v;
}

bool BitVector::get(size_t i) const {
  check_index(i);
  return (words_[i >> 6] >> (i & 63)) & 1;
}

void BitVector::set(size_t i, bool v) {
  check_index(i);
  uint64_t mask = 1ULL << (i & 63);
  if (v) {
    words_[i >> 6] |= mask;
  } else {
    words_[i >> 6] &= ~mask;
  }
}

void BitVector::flip(size_t i) {
  check_index(i);
  words_[i >> 6] ^= 1ULL << (i & 63);
}

BitVector& BitVector::operator^=(const BitVector& other) {
  if (len_ != other.len_) {
    throw std::invalid_argument("BitVector xor: length mismatch");
  }
  for (size_t w = 0; w < words_.size(); ++w) words_[w] ^= other.words_[w];
  return *this;
}

bool BitVector::operator==(const BitVector& other) const {
  return len_ == other.len_ && words_ == other.words_;
}

bool BitVector::parity() const {
  uint64_t acc = 0;
  for (uint64_t w : words_) acc ^= w;
  return std::popcount(acc) & 1;
}

size_t BitVector::weight() const {
  size_t n = 0;
  for (uint64_t w : words_) n += std::popcount(w);
  return n;
}

uint64_t BitVector::as_word() const {
  if (len_ > 64) throw std::logic_error("as_word: vector longer than 64 bits");
  return words_.empty() ? 0 : words_[0];
}

std::string BitVector::to_string() const {
  std::string s(len_, '0');
  for (size_t i = 0; i < len_; ++i) {
    if (get(i)) s[i] = '1';
  }
  return s;
}

void BitVector::serialize(std::vector<uint8_t>& out) const {
  uint32_t n = static_cast<uint32_t>(len_);
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<uint8_t>(n >> (8 * i)));
  size_t nbytes = (len_ + 7) / 8;
  for (size_t b = 0; b < nbytes; ++b) {
    uint8_t byte = static_cast<uint8_t>(words_[b >> 3] >> (8 * (b & 7)));
    if (b + 1 == nbytes && (len_ & 7) != 0) {
      byte &= static_cast<uint8_t>((1u << (len_ & 7)) - 1);
    }
    out.push_back(byte);
  }
}

BitVector BitVector::deserialize(const uint8_t*& cursor, const uint8_t* end) {
  if (end - cursor < 4) throw std::runtime_error("BitVector: truncated length");
  uint32_t n = 0;
  for (int i = 0; i < 4; ++i) n |= static_cast<uint32_t>(cursor[i]) << (8 * i);
  cursor += 4;
  size_t nbytes = (n + 7) / 8;
  if (static_cast<size_t>(end - cursor) < nbytes) {
    throw std::runtime_error("BitVector: truncated payload");
  }
  BitVector v(n);
  for (size_t b = 0; b < nbytes; ++b) {
    v.words_[b >> 3] |= static_cast<uint64_t>(cursor[b]) << (8 * (b & 7));
  }
  cursor += nbytes;
  // Reject padding bits so the encoding is canonical.
  if (n % 8 != 0 || n == 0) {
    size_t top_word = v.words_.empty() ? 0 : v.words_.size() - 1;
    if (!v.words_.empty()) {
      size_t used = n - 64 * top_word;
      if (used < 64 && (v.words_[top_word] >> used) != 0) {
        throw std::runtime_error("BitVector: nonzero padding bits");
      }
    }
  }
  return v;
}

std::string BitVector::pack_key() const {
  std::vector<uint8_t> buf;
  serialize(buf);
  return std::string(buf.begin(), buf.end());
}

bool dot(const BitVector& a, const BitVector& b) {
  if (a.size() != b.size()) {
    throw std::invalid_argument("dot: length mismatch");
  }
  uint64_t acc = 0;
  auto aw = a.words();
  auto bw = b.words();
  for (size_t i = 0; i < aw.size(); ++i) acc ^= aw[i] & bw[i];
  return std::popcount(acc) & 1;
}

BitMatrix BitMatrix::identity(size_t n) {
  BitMatrix eye(n, n);
  for (size_t i = 0; i < n; ++i) eye.set(i, i, true);
  return eye;
}

BitVector BitMatrix::mul(const BitVector& x) const {
  if (x.size() != cols_) {
    throw std::invalid_argument("BitMatrix::mul: dimension mismatch");
  }
  BitVector out(rows());
  for (size_t r = 0; r < rows_.size(); ++r) {
    if (dot(rows_[r], x)) out.set(r, true);
  }
  return out;
}

BitVector BitMatrix::column(size_t i) const {
  if (i >= cols_) throw std::out_of_range("BitMatrix::column: index out of range");
  BitVector out(rows());
  for (size_t r = 0; r < rows_.size(); ++r) {
    if (rows_[r].get(i)) out.set(r, true);
  }
  return out;
}

bool BitMatrix::operator==(const BitMatrix& other) const {
  return cols_ == other.cols_ && rows_ == other.rows_;
}

void BitMatrix::serialize(std::vector<uint8_t>& out) const {
  uint32_t k = static_cast<uint32_t>(rows());
  uint32_t m = static_cast<uint32_t>(cols());
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<uint8_t>(k >> (8 * i)));
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<uint8_t>(m >> (8 * i)));
  for (const auto& r : rows_) r.serialize(out);
}

BitMatrix BitMatrix::deserialize(const uint8_t*& cursor, const uint8_t* end) {
  if (end - cursor < 8) throw std::runtime_error("BitMatrix: truncated header");
  uint32_t k = 0, m = 0;
  for (int i = 0; i < 4; ++i) k |= static_cast<uint32_t>(cursor[i]) << (8 * i);
  cursor += 4;
  for (int i = 0; i < 4; ++i) m |= static_cast<uint32_t>(cursor[i]) << (8 * i);
  cursor += 4;
  BitMatrix a(k, m);
  for (uint32_t r = 0; r < k; ++r) {
    BitVector row = BitVector::deserialize(cursor, end);
    if (row.size() != m) throw std::runtime_error("BitMatrix: row length mismatch");
    a.rows_[r] = std::move(row);
  }
  return a;
}

bool AffineCoset::contains(const BitMatrix& a, const BitVector& b,
                           const BitVector& x) const {
  return consistent && a.mul(x) == b;
}

AffineCoset gaussian_affine_solve(const BitMatrix& a, const BitVector& b) {
  if (a.rows() != b.size()) {
    throw std::invalid_argument("gaussian_affine_solve: row/rhs mismatch");
  }
  const size_t k = a.rows();
  const size_t m = a.cols();

  // Work on augmented rows [A | b].
  std::vector<BitVector> rows(k);
  std::vector<uint8_t> aug(k);
  for (size_t r = 0; r < k; ++r) {
    rows[r] = a.row(r);
    aug[r] = b.get(r) ? 1 : 0;
  }

  std::vector<size_t> pivot_col;  // pivot column of eliminated row i
  size_t next_row = 0;
  for (size_t col = 0; col < m && next_row < k; ++col) {
    size_t pivot = next_row;
    while (pivot < k && !rows[pivot].get(col)) ++pivot;
    if (pivot == k) continue;
    std::swap(rows[pivot], rows[next_row]);
    std::swap(aug[pivot], aug[next_row]);
    for (size_t r = 0; r < k; ++r) {
      if (r != next_row && rows[r].get(col)) {
        rows[r] ^= rows[next_row];
        aug[r] ^= aug[next_row];
      }
    }
    pivot_col.push_back(col);
    ++next_row;
  }

  AffineCoset coset;
  coset.rank = pivot_col.size();
  for (size_t r = coset.rank; r < k; ++r) {
    if (aug[r]) return coset;  // 0 = 1 row: inconsistent
  }
  coset.consistent = true;

  std::vector<uint8_t> is_pivot(m, 0);
  for (size_t col : pivot_col) is_pivot[col] = 1;

  // Particular solution: free variables zero, pivots take the rhs value.
  coset.particular = BitVector(m);
  for (size_t i = 0; i < coset.rank; ++i) {
    if (aug[i]) coset.particular.set(pivot_col[i], true);
  }

  // One basis vector per free column f: x_f = 1, pivots absorb column f.
  for (size_t f = 0; f < m; ++f) {
    if (is_pivot[f]) continue;
    BitVector v(m);
    v.set(f, true);
    for (size_t i = 0; i < coset.rank; ++i) {
      if (rows[i].get(f)) v.set(pivot_col[i], true);
    }
    coset.null_basis.push_back(std::move(v));
  }
  return coset;
}

}  // namespace lab
