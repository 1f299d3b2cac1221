#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "lab/bitvec.hpp"

namespace lab {

struct Instance;
class Decoder;
class DecoderRegistry;

// Thrown on malformed codewords (bad magic, truncated stream, inconsistent
// field values). Registry misses raise ConfigError instead.
class CodecError : public std::runtime_error {
 public:
  explicit CodecError(const std::string& what) : std::runtime_error(what) {}
};

// Unsigned big integer, little-endian 64-bit limbs, no trailing zero limbs.
// Covers exactly the operations the enumerative codecs need: compare,
// add/subtract, multiply/divide by a machine word, bit access, and minimal
// big-endian byte serialization.
class BigUint {
 public:
  BigUint() = default;
  explicit BigUint(uint64_t v);

  static BigUint from_bytes_be(const std::vector<uint8_t>& bytes);
  std::vector<uint8_t> to_bytes_be() const;  // minimal length; empty for zero

  bool is_zero() const { return limbs_.empty(); }
  size_t bit_length() const;  // 0 for zero
  bool bit(size_t i) const;
  void set_bit(size_t i);

  int compare(const BigUint& other) const;  // -1, 0, +1
  bool operator==(const BigUint& o) const { return compare(o) == 0; }
  bool operator!=(const BigUint& o) const { return compare(o) != 0; }
  bool operator<(const BigUint& o) const { return compare(o) < 0; }
  bool operator<=(const BigUint& o) const { return compare(o) <= 0; }
  bool operator>(const BigUint& o) const { return compare(o) > 0; }
  bool operator>=(const BigUint& o) const { return compare(o) >= 0; }

  BigUint& operator+=(const BigUint& other);
  BigUint& operator-=(const BigUint& other);  // requires *this >= other
  BigUint& mul_u64(uint64_t v);
  uint64_t div_u64(uint64_t v);  // in-place quotient; returns remainder

  uint64_t low64() const { return limbs_.empty() ? 0 : limbs_[0]; }
  std::string to_string() const;  // decimal, for diagnostics

 private:
  void trim();
  std::vector<uint64_t> limbs_;
};

// Exact binomial coefficient C(n, k).
BigUint binomial(uint64_t n, uint64_t k);

// ceil(log2 C(n, k)); 0 when C(n, k) <= 1.
uint32_t ceil_log2_binomial(uint64_t n, uint64_t k);

// Combinatorial number system (colexicographic): the rank of a sorted
// w-subset {s_1 < ... < s_w} of [0, n) is sum_i C(s_i, i). The empty set and
// the prefix {0..w-1} both rank 0; ranks run over [0, C(n, w)).
BigUint binomial_rank(const std::vector<uint32_t>& sorted_subset);
std::vector<uint32_t> binomial_unrank(uint64_t n, uint64_t w,
                                      const BigUint& rank);

// --- Bit-granular streams, LSB-first within each byte ---

class BitWriter {
 public:
  void write_bit(bool b);
  void write_bits(uint64_t v, uint32_t n);  // low n bits of v, LSB first
  void write_byte(uint8_t b) { write_bits(b, 8); }
  void write_u64(uint64_t v) { write_bits(v, 64); }

  // Elias gamma for v >= 1: floor(log2 v) zero bits, a one bit, then the
  // low floor(log2 v) bits of v. gamma0 shifts the domain to v >= 0.
  void write_gamma(uint64_t v);
  void write_gamma0(uint64_t v) { write_gamma(v + 1); }

  uint64_t bit_count() const { return bit_count_; }
  std::vector<uint8_t> take_bytes();  // zero-pads the final partial byte

 private:
  std::vector<uint8_t> bytes_;
  uint64_t bit_count_ = 0;
};

class BitReader {
 public:
  BitReader(const uint8_t* data, uint64_t bit_count)
      : data_(data), bit_count_(bit_count) {}

  bool read_bit();
  uint64_t read_bits(uint32_t n);
  uint8_t read_byte() { return static_cast<uint8_t>(read_bits(8)); }
  uint64_t read_u64() { return read_bits(64); }
  uint64_t read_gamma();
  uint64_t read_gamma0() { return read_gamma() - 1; }

  uint64_t bits_remaining() const { return bit_count_ - pos_; }

 private:
  const uint8_t* data_;
  uint64_t bit_count_;
  uint64_t pos_ = 0;
};

// Encoded bit cost of the gamma codes, for ledger arithmetic.
uint32_t gamma_bits(uint64_t v);               // v >= 1
inline uint32_t gamma0_bits(uint64_t v) { return gamma_bits(v + 1); }

// Itemized description-length account. `total` must always equal the bit
// length of the emitted codeword; `content_bits` excludes the block-count
// header so that cross-t comparisons see only decoder identity, seed
// material, and patch payload.
struct DescriptionLedger {
  uint64_t identity_bits = 0;  // registry name + parameter digest
  uint64_t control_bits = 0;   // magic, version, counts, rank framing
  uint64_t seed_bits = 0;      // decoder seed blob, length-prefixed
  uint64_t payload_bits = 0;   // residual witnesses / error-set codes

  uint64_t total() const {
    return identity_bits + control_bits + seed_bits + payload_bits;
  }
  uint64_t content_bits() const {
    return identity_bits + seed_bits + payload_bits;
  }

  bool operator==(const DescriptionLedger&) const = default;
};

struct Codeword {
  std::vector<uint8_t> bytes;
  uint64_t bit_count = 0;  // exact length; bytes are zero-padded past it
};

// Success-set codec: records which blocks the decoder already gets right
// (as a subset rank) and ships the witnesses of the missed blocks verbatim.
std::pair<Codeword, DescriptionLedger> encode_coarse(
    const Decoder& d, const std::vector<Instance>& blocks,
    const std::vector<BitVector>& truths);
std::vector<BitVector> decode_coarse(const Codeword& cw,
                                     const std::vector<Instance>& blocks,
                                     const DecoderRegistry& registry);

// Per-bit enumerative codec: per block, the error-set size (gamma) and its
// rank among equally sized sets, in exactly ceil(log2 C(m, |E|)) bits.
std::pair<Codeword, DescriptionLedger> encode_fine(
    const Decoder& d, const std::vector<Instance>& blocks,
    const std::vector<BitVector>& truths);
std::vector<BitVector> decode_fine(const Codeword& cw,
                                   const std::vector<Instance>& blocks,
                                   const DecoderRegistry& registry);

// Analytic counting-bound curve: bound exponent (delta - gamma*Lambda) * t
// with Lambda = log2(1 / (1/2 + eps_hat)); the bound itself is
// 2^(delta*t) * (1/2 + eps_hat)^(gamma*t) = 2^exponent.
struct UnionBoundRow {
  uint64_t t = 0;
  double exponent = 0.0;
};

struct UnionBoundCurve {
  double delta = 0.0;
  double gamma = 0.0;
  double eps_hat = 0.0;
  double eta = 0.0;
  double lambda = 0.0;       // log2(1 / (1/2 + eps_hat))
  bool admissible = false;   // delta <= gamma * lambda - eta
  std::vector<UnionBoundRow> rows;
};

UnionBoundCurve union_bound_curve(double delta, double gamma, double eps_hat,
                                  double eta,
                                  const std::vector<uint64_t>& t_values);

}  // namespace lab
