#include "lab/codec.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

#include "lab/common.hpp"
#include "lab/decoder.hpp"
#include "lab/ensemble.hpp"

namespace lab {

// ---------------------------------------------------------------------------
// BigUint
// ---------------------------------------------------------------------------

BigUint::BigUint(uint64_t v) {
  if (v != 0) limbs_.push_back(v);
}

void BigUint::trim() {
  while (!limbs_.empty() && limbs_.back() == 0) limbs_.pop_back();
}

size_t BigUint::bit_length() const {
  if (limbs_.empty()) return 0;
  return 64 * (limbs_.size() - 1) + (64 - std::countl_zero(limbs_.back()));
}

bool BigUint::bit(size_t i) const {
  size_t limb = i / 64;
  if (limb >= limbs_.size()) return false;
  return (limbs_[limb] >> (i % 64)) & 1;
}

void BigUint::set_bit(size_t i) {
  size_t limb = i / 64;
  if (limb >= limbs_.size()) limbs_.resize(limb + 1, 0);
  limbs_[limb] |= uint64_t{1} << (i % 64);
}

int BigUint::compare(const BigUint& other) const {
  if (limbs_.size() != other.limbs_.size())
    return limbs_.size() < other.limbs_.size() ? -1 : 1;
  for (size_t i = limbs_.size(); i-- > 0;) {
    if (limbs_[i] != other.limbs_[i]) return limbs_[i] < other.limbs_[i] ? -1 : 1;
  }
  return 0;
}

BigUint& BigUint::operator+=(const BigUint& other) {
  if (other.limbs_.size() > limbs_.size()) limbs_.resize(other.limbs_.size(), 0);
  unsigned __int128 carry = 0;
  for (size_t i = 0; i < limbs_.size(); ++i) {
    unsigned __int128 sum = carry + limbs_[i];
    if (i < other.limbs_.size()) sum += other.limbs_[i];
    limbs_[i] = static_cast<uint64_t>(sum);
    carry = sum >> 64;
  }
  if (carry != 0) limbs_.push_back(static_cast<uint64_t>(carry));
  return *this;
}

BigUint& BigUint::operator-=(const BigUint& other) {
  if (compare(other) < 0)
    throw std::invalid_argument("BigUint: subtraction underflow");
  uint64_t borrow = 0;
  for (size_t i = 0; i < limbs_.size(); ++i) {
    unsigned __int128 sub = borrow;
    if (i < other.limbs_.size()) sub += other.limbs_[i];
    if (static_cast<unsigned __int128>(limbs_[i]) >= sub) {
      limbs_[i] -= static_cast<uint64_t>(sub);
      borrow = 0;
    } else {
      limbs_[i] = static_cast<uint64_t>(
          (static_cast<unsigned __int128>(1) << 64) + limbs_[i] - sub);
      borrow = 1;
    }
  }
  trim();
  return *this;
}

BigUint& BigUint::mul_u64(uint64_t v) {
  if (v == 0 || limbs_.empty()) {
    limbs_.clear();
    return *this;
  }
  unsigned __int128 carry = 0;
  for (auto& limb : limbs_) {
    unsigned __int128 prod = static_cast<unsigned __int128>(limb) * v + carry;
    limb = static_cast<uint64_t>(prod);
    carry = prod >> 64;
  }
  if (carry != 0) limbs_.push_back(static_cast<uint64_t>(carry));
  return *this;
}

uint64_t BigUint::div_u64(uint64_t v) {
  if (v == 0) throw std::invalid_argument("BigUint: division by zero");
  unsigned __int128 rem = 0;
  for (size_t i = limbs_.size(); i-- > 0;) {
    unsigned __int128 cur = (rem << 64) | limbs_[i];
    limbs_[i] = static_cast<uint64_t>(cur / v);
    rem = cur % v;
  }
  trim();
  return static_cast<uint64_t>(rem);
}

BigUint BigUint::from_bytes_be(const std::vector<uint8_t>& bytes) {
  BigUint out;
  for (uint8_t b : bytes) {
    out.mul_u64(256);
    out += BigUint(b);
  }
  return out;
}

std::vector<uint8_t> BigUint::to_bytes_be() const {
  std::vector<uint8_t> out((bit_length() + 7) / 8);
  for (size_t i = 0; i < out.size(); ++i) {
    size_t limb = i / 8;
    out[out.size() - 1 - i] = static_cast<uint8_t>(limbs_[limb] >> (8 * (i % 8)));
  }
  return out;
}

std::string BigUint::to_string() const {
  if (is_zero()) return "0";
  BigUint work = *this;
  std::string digits;
  while (!work.is_zero()) digits.push_back(static_cast<char>('0' + work.div_u64(10)));
  std::reverse(digits.begin(), digits.end());
  return digits;
}

// ---------------------------------------------------------------------------
// Binomials and the combinatorial number system
// ---------------------------------------------------------------------------

BigUint binomial(uint64_t n, uint64_t k) {
  if (k > n) return BigUint(0);
  if (k > n - k) k = n - k;
  BigUint result(1);
  for (uint64_t i = 1; i <= k; ++i) {
    result.mul_u64(n - k + i);
    result.div_u64(i);  // exact at every step
  }
  return result;
}

uint32_t ceil_log2_binomial(uint64_t n, uint64_t k) {
  BigUint c = binomial(n, k);
  if (c.compare(BigUint(1)) <= 0) return 0;
  size_t bl = c.bit_length();
  // bit_length gives floor(log2 c) + 1; the value is a power of two exactly
  // when only the top bit is set.
  BigUint probe;
  probe.set_bit(bl - 1);
  return static_cast<uint32_t>(probe == c ? bl - 1 : bl);
}

BigUint binomial_rank(const std::vector<uint32_t>& sorted_subset) {
  BigUint rank(0);
  for (size_t idx = 0; idx < sorted_subset.size(); ++idx) {
    if (idx > 0 && sorted_subset[idx] <= sorted_subset[idx - 1])
      throw std::invalid_argument("binomial_rank: subset not strictly sorted");
    rank += binomial(sorted_subset[idx], idx + 1);
  }
  return rank;
}

std::vector<uint32_t> binomial_unrank(uint64_t n, uint64_t w,
                                      const BigUint& rank) {
  if (w > n) throw std::invalid_argument("binomial_unrank: w > n");
  if (rank >= binomial(n, w))
    throw std::out_of_range("binomial_unrank: rank out of range");
  std::vector<uint32_t> subset(w);
  BigUint remaining = rank;
  uint64_t upper = n;  // elements must stay below the previously chosen one
  for (uint64_t i = w; i >= 1; --i) {
    // Largest c with C(c, i) <= remaining; c = i-1 gives C = 0.
    uint64_t c = i - 1;
    BigUint val(0);
    BigUint cur(1);  // C(i, i)
    uint64_t cand = i;
    while (cand < upper && cur <= remaining) {
      c = cand;
      val = cur;
      // C(cand+1, i) = C(cand, i) * (cand+1) / (cand+1-i)
      cur.mul_u64(cand + 1);
      cur.div_u64(cand + 1 - i);
      ++cand;
    }
    subset[i - 1] = static_cast<uint32_t>(c);
    remaining -= val;
    upper = c;
  }
  if (!remaining.is_zero())
    throw std::out_of_range("binomial_unrank: rank decomposition failed");
  return subset;
}

// ---------------------------------------------------------------------------
// Bit streams
// ---------------------------------------------------------------------------

void BitWriter::write_bit(bool b) {
  if (bit_count_ % 8 == 0) bytes_.push_back(0);
  if (b) bytes_.back() |= static_cast<uint8_t>(1u << (bit_count_ % 8));
  ++bit_count_;
}

void BitWriter::write_bits(uint64_t v, uint32_t n) {
  for (uint32_t i = 0; i < n; ++i) write_bit((v >> i) & 1);
}

void BitWriter::write_gamma(uint64_t v) {
  if (v == 0) throw std::invalid_argument("gamma code: value must be >= 1");
  uint32_t n = 63 - static_cast<uint32_t>(std::countl_zero(v));
  for (uint32_t i = 0; i < n; ++i) write_bit(false);
  write_bit(true);
  write_bits(v, n);  // low n bits; the leading one is implicit
}

std::vector<uint8_t> BitWriter::take_bytes() { return std::move(bytes_); }

bool BitReader::read_bit() {
  if (pos_ >= bit_count_) throw CodecError("codec: truncated codeword");
  bool b = (data_[pos_ / 8] >> (pos_ % 8)) & 1;
  ++pos_;
  return b;
}

uint64_t BitReader::read_bits(uint32_t n) {
  uint64_t v = 0;
  for (uint32_t i = 0; i < n; ++i) {
    if (read_bit()) v |= uint64_t{1} << i;
  }
  return v;
}

uint64_t BitReader::read_gamma() {
  uint32_t n = 0;
  while (!read_bit()) {
    if (++n > 64) throw CodecError("codec: malformed gamma code");
  }
  return (uint64_t{1} << n) | read_bits(n);
}

uint32_t gamma_bits(uint64_t v) {
  if (v == 0) throw std::invalid_argument("gamma code: value must be >= 1");
  uint32_t n = 63 - static_cast<uint32_t>(std::countl_zero(v));
  return 2 * n + 1;
}

// ---------------------------------------------------------------------------
// Codecs
// ---------------------------------------------------------------------------

namespace {

constexpr uint8_t kCoarseMagic = 0xC5;
constexpr uint8_t kFineMagic = 0xC6;
constexpr uint8_t kCodecVersion = 0x01;

struct IdentityBits {
  uint64_t identity = 0;
  uint64_t seed = 0;
};

IdentityBits write_identity(BitWriter& w, const Decoder& d) {
  IdentityBits cost;
  const std::string name = d.name();
  uint64_t before = w.bit_count();
  w.write_gamma0(name.size());
  for (char c : name) w.write_byte(static_cast<uint8_t>(c));
  w.write_u64(d.param_digest());
  cost.identity = w.bit_count() - before;

  before = w.bit_count();
  const std::vector<uint8_t> seed = d.seed_blob();
  w.write_gamma0(seed.size());
  for (uint8_t b : seed) w.write_byte(b);
  cost.seed = w.bit_count() - before;
  return cost;
}

const Decoder& read_identity(BitReader& r, const DecoderRegistry& registry) {
  uint64_t name_len = r.read_gamma0();
  if (name_len > 256) throw CodecError("codec: oversized decoder name");
  std::string name;
  for (uint64_t i = 0; i < name_len; ++i)
    name.push_back(static_cast<char>(r.read_byte()));
  uint64_t digest = r.read_u64();
  const Decoder& d = registry.find(name, digest);

  uint64_t seed_len = r.read_gamma0();
  std::vector<uint8_t> seed(seed_len);
  for (auto& b : seed) b = r.read_byte();
  if (seed != d.seed_blob()) throw CodecError("codec: seed blob mismatch");
  return d;
}

void check_shapes(const std::vector<Instance>& blocks,
                  const std::vector<BitVector>& truths) {
  if (blocks.size() != truths.size())
    throw std::invalid_argument("codec: blocks/truths size mismatch");
  for (size_t j = 0; j < blocks.size(); ++j) {
    if (truths[j].size() != blocks[j].cnf.m)
      throw std::invalid_argument("codec: truth width mismatch");
  }
}

void finish_padding(BitReader& r) {
  if (r.bits_remaining() != 0) throw CodecError("codec: trailing bits");
}

}  // namespace

std::pair<Codeword, DescriptionLedger> encode_coarse(
    const Decoder& d, const std::vector<Instance>& blocks,
    const std::vector<BitVector>& truths) {
  check_shapes(blocks, truths);
  const uint64_t t = blocks.size();
  const std::vector<BitVector> preds = d.predict(blocks);

  std::vector<uint32_t> hits;
  for (uint32_t j = 0; j < t; ++j) {
    if (preds[j] == truths[j]) hits.push_back(j);
  }

  BitWriter w;
  DescriptionLedger ledger;
  w.write_byte(kCoarseMagic);
  w.write_byte(kCodecVersion);
  w.write_gamma0(t);
  w.write_gamma0(hits.size());
  ledger.control_bits = w.bit_count();

  IdentityBits id = write_identity(w, d);
  ledger.identity_bits = id.identity;
  ledger.seed_bits = id.seed;

  uint64_t before = w.bit_count();
  const std::vector<uint8_t> rank_bytes = binomial_rank(hits).to_bytes_be();
  w.write_gamma0(rank_bytes.size());
  for (uint8_t b : rank_bytes) w.write_byte(b);
  ledger.control_bits += w.bit_count() - before;

  before = w.bit_count();
  for (uint32_t j = 0; j < t; ++j) {
    if (preds[j] == truths[j]) continue;
    for (size_t i = 0; i < truths[j].size(); ++i) w.write_bit(truths[j].get(i));
  }
  ledger.payload_bits = w.bit_count() - before;

  Codeword cw;
  cw.bit_count = w.bit_count();
  cw.bytes = w.take_bytes();
  return {cw, ledger};
}

std::vector<BitVector> decode_coarse(const Codeword& cw,
                                     const std::vector<Instance>& blocks,
                                     const DecoderRegistry& registry) {
  BitReader r(cw.bytes.data(), cw.bit_count);
  if (r.read_byte() != kCoarseMagic) throw CodecError("codec: bad magic");
  if (r.read_byte() != kCodecVersion) throw CodecError("codec: bad version");
  uint64_t t = r.read_gamma0();
  if (t != blocks.size()) throw CodecError("codec: block count mismatch");
  uint64_t n_hits = r.read_gamma0();
  if (n_hits > t) throw CodecError("codec: hit count exceeds block count");

  const Decoder& d = read_identity(r, registry);

  uint64_t rank_len = r.read_gamma0();
  if (rank_len * 8 > r.bits_remaining()) throw CodecError("codec: truncated rank");
  std::vector<uint8_t> rank_bytes(rank_len);
  for (auto& b : rank_bytes) b = r.read_byte();
  std::vector<uint32_t> hits =
      binomial_unrank(t, n_hits, BigUint::from_bytes_be(rank_bytes));

  std::vector<BitVector> out = d.predict(blocks);
  std::vector<bool> is_hit(t, false);
  for (uint32_t j : hits) is_hit[j] = true;
  for (uint64_t j = 0; j < t; ++j) {
    if (is_hit[j]) continue;
    BitVector x(blocks[j].cnf.m);
    for (size_t i = 0; i < x.size(); ++i) x.set(i, r.read_bit());
    out[j] = x;
  }
  finish_padding(r);
  return out;
}

std::pair<Codeword, DescriptionLedger> encode_fine(
    const Decoder& d, const std::vector<Instance>& blocks,
    const std::vector<BitVector>& truths) {
  check_shapes(blocks, truths);
  const uint64_t t = blocks.size();
  const uint32_t m = t == 0 ? 0 : blocks[0].cnf.m;
  for (const auto& blk : blocks) {
    if (blk.cnf.m != m)
      throw std::invalid_argument("codec: fine codec needs uniform width");
  }
  const std::vector<BitVector> preds = d.predict(blocks);

  BitWriter w;
  DescriptionLedger ledger;
  w.write_byte(kFineMagic);
  w.write_byte(kCodecVersion);
  w.write_gamma0(t);
  w.write_gamma0(m);
  ledger.control_bits = w.bit_count();

  IdentityBits id = write_identity(w, d);
  ledger.identity_bits = id.identity;
  ledger.seed_bits = id.seed;

  uint64_t before = w.bit_count();
  for (uint64_t j = 0; j < t; ++j) {
    std::vector<uint32_t> errors;
    for (uint32_t i = 0; i < m; ++i) {
      if (preds[j].get(i) != truths[j].get(i)) errors.push_back(i);
    }
    w.write_gamma0(errors.size());
    const uint32_t width = ceil_log2_binomial(m, errors.size());
    const BigUint rank = binomial_rank(errors);
    for (uint32_t bit = 0; bit < width; ++bit) w.write_bit(rank.bit(bit));
  }
  ledger.payload_bits = w.bit_count() - before;

  Codeword cw;
  cw.bit_count = w.bit_count();
  cw.bytes = w.take_bytes();
  return {cw, ledger};
}

std::vector<BitVector> decode_fine(const Codeword& cw,
                                   const std::vector<Instance>& blocks,
                                   const DecoderRegistry& registry) {
  BitReader r(cw.bytes.data(), cw.bit_count);
  if (r.read_byte() != kFineMagic) throw CodecError("codec: bad magic");
  if (r.read_byte() != kCodecVersion) throw CodecError("codec: bad version");
  uint64_t t = r.read_gamma0();
  if (t != blocks.size()) throw CodecError("codec: block count mismatch");
  uint64_t m = r.read_gamma0();
  for (const auto& blk : blocks) {
    if (blk.cnf.m != m) throw CodecError("codec: width mismatch");
  }

  const Decoder& d = read_identity(r, registry);
  std::vector<BitVector> out = d.predict(blocks);

  for (uint64_t j = 0; j < t; ++j) {
    uint64_t e = r.read_gamma0();
    if (e > m) throw CodecError("codec: error set larger than block");
    const uint32_t width = ceil_log2_binomial(m, e);
    BigUint rank;
    for (uint32_t bit = 0; bit < width; ++bit) {
      if (r.read_bit()) rank.set_bit(bit);
    }
    for (uint32_t i : binomial_unrank(m, e, rank)) out[j].flip(i);
  }
  finish_padding(r);
  return out;
}

UnionBoundCurve union_bound_curve(double delta, double gamma, double eps_hat,
                                  double eta,
                                  const std::vector<uint64_t>& t_values) {
  if (!(gamma > 0.0) || gamma > 1.0 || delta < 0.0 || eps_hat < 0.0 ||
      eps_hat >= 0.5)
    throw std::invalid_argument("union_bound_curve: parameters out of range");
  UnionBoundCurve curve;
  curve.delta = delta;
  curve.gamma = gamma;
  curve.eps_hat = eps_hat;
  curve.eta = eta;
  curve.lambda = std::log2(1.0 / (0.5 + eps_hat));
  curve.admissible = delta <= gamma * curve.lambda - eta;
  curve.rows.reserve(t_values.size());
  for (uint64_t t : t_values) {
    curve.rows.push_back({t, (delta - gamma * curve.lambda) * double(t)});
  }
  return curve;
}

}  // namespace lab
