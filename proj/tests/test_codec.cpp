#include <algorithm>
#include <cstdint>
#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "doctest.h"
#include "lab/codec.hpp"
#include "lab/common.hpp"
#include "lab/decoder.hpp"
#include "lab/ensemble.hpp"
#include "lab/rng.hpp"

using namespace lab;

namespace {

using u128 = unsigned __int128;

BigUint from_u128(u128 v) {
  BigUint out;
  size_t bit = 0;
  while (v != 0) {
    if (v & 1) out.set_bit(bit);
    v >>= 1;
    ++bit;
  }
  return out;
}

bool equals_u128(const BigUint& a, u128 v) { return a == from_u128(v); }

struct TupleFixture {
  EnsembleParams params;
  std::vector<Instance> blocks;
  std::vector<BitVector> truths;

  explicit TupleFixture(size_t t, uint64_t seed) {
    params.m = 8;
    params.alpha = 10.0;
    for (const BlockSample& bs : sample_tuple(t, params, seed, 0)) {
      blocks.push_back(bs.inst);
      truths.push_back(bs.witness);
    }
  }
};

}  // namespace

TEST_CASE("big integers track 128-bit reference arithmetic") {
  Rng rng(70, 0);
  for (int rep = 0; rep < 300; ++rep) {
    uint64_t a = rng.next_u64();
    uint64_t b = rng.next_u64();
    u128 wa = a, wb = b;

    BigUint x(a);
    x += BigUint(b);
    CHECK(equals_u128(x, wa + wb));

    BigUint hi = from_u128((wa << 64) | wb);
    uint64_t d = 1 + (rng.next_u64() >> 8);
    BigUint q = hi;
    uint64_t rem = q.div_u64(d);
    u128 whole = (wa << 64) | wb;
    CHECK(equals_u128(q, whole / d));
    CHECK(rem == static_cast<uint64_t>(whole % d));

    BigUint p(a >> 32);
    p.mul_u64(b >> 32);
    CHECK(equals_u128(p, u128(a >> 32) * (b >> 32)));

    BigUint big = from_u128(whole);
    BigUint small(std::min(a, b));
    big -= small;
    CHECK(equals_u128(big, whole - std::min(a, b)));
  }
}

TEST_CASE("big integer comparisons, bits, and serialization") {
  CHECK(BigUint(0).is_zero());
  CHECK(BigUint(0).bit_length() == 0);
  CHECK(BigUint(0).to_bytes_be().empty());
  CHECK(BigUint(0).to_string() == "0");
  CHECK(BigUint(1).bit_length() == 1);
  CHECK(BigUint(255).to_bytes_be() == std::vector<uint8_t>{255});
  CHECK(BigUint(256).to_bytes_be() == std::vector<uint8_t>{1, 0});
  CHECK(BigUint::from_bytes_be({0, 0, 1, 0}) == BigUint(256));
  CHECK(BigUint(712).to_string() == "712");

  BigUint two100;
  two100.set_bit(100);
  CHECK(two100.bit_length() == 101);
  CHECK(two100.to_string() == "1267650600228229401496703205376");
  CHECK(two100.bit(100));
  CHECK_FALSE(two100.bit(99));
  CHECK_FALSE(two100.bit(500));
  CHECK(BigUint::from_bytes_be(two100.to_bytes_be()) == two100);

  CHECK(BigUint(3) < BigUint(4));
  CHECK(two100 > BigUint(~uint64_t{0}));
  CHECK(BigUint(7).compare(BigUint(7)) == 0);
  CHECK(BigUint(12).low64() == 12);

  BigUint five(5);
  CHECK_THROWS_AS(five -= BigUint(6), std::invalid_argument);
  BigUint ten(10);
  CHECK_THROWS_AS(ten.div_u64(0), std::invalid_argument);
}

TEST_CASE("binomial coefficients match known values") {
  CHECK(binomial(12, 6) == BigUint(924));
  CHECK(binomial(52, 5) == BigUint(2598960));
  CHECK(binomial(30, 15) == BigUint(155117520));
  CHECK(binomial(64, 32) == BigUint(1832624140942590534ULL));
  CHECK(binomial(10, 0) == BigUint(1));
  CHECK(binomial(10, 10) == BigUint(1));
  CHECK(binomial(5, 9) == BigUint(0));
  // Pascal identity on a window that overflows 64 bits.
  BigUint lhs = binomial(130, 60);
  BigUint rhs = binomial(129, 59);
  rhs += binomial(129, 60);
  CHECK(lhs == rhs);
}

TEST_CASE("binomial bit widths are exact ceilings") {
  CHECK(ceil_log2_binomial(10, 0) == 0);   // C = 1
  CHECK(ceil_log2_binomial(5, 9) == 0);    // C = 0
  CHECK(ceil_log2_binomial(2, 1) == 1);    // C = 2 (power of two)
  CHECK(ceil_log2_binomial(4, 2) == 3);    // C = 6
  CHECK(ceil_log2_binomial(16, 8) == 14);  // C = 12870
  CHECK(ceil_log2_binomial(64, 32) == 61);
  // C(9, 4) = 126 -> 7 bits; C(9, 2) = 36 -> 6 bits.
  CHECK(ceil_log2_binomial(9, 4) == 7);
  CHECK(ceil_log2_binomial(9, 2) == 6);
}

TEST_CASE("subset ranking is the colexicographic bijection") {
  const uint64_t n = 10;
  for (uint64_t w = 0; w <= n; ++w) {
    // Enumerate all w-subsets of [0, n) and sort them colexicographically
    // (compare largest elements first).
    std::vector<std::vector<uint32_t>> subsets;
    for (uint32_t mask = 0; mask < (1u << n); ++mask) {
      if (static_cast<uint64_t>(__builtin_popcount(mask)) != w) continue;
      std::vector<uint32_t> s;
      for (uint32_t i = 0; i < n; ++i) {
        if (mask & (1u << i)) s.push_back(i);
      }
      subsets.push_back(std::move(s));
    }
    std::sort(subsets.begin(), subsets.end(),
              [](const std::vector<uint32_t>& a, const std::vector<uint32_t>& b) {
                return std::lexicographical_compare(a.rbegin(), a.rend(),
                                                    b.rbegin(), b.rend());
              });
    for (size_t idx = 0; idx < subsets.size(); ++idx) {
      CHECK(binomial_rank(subsets[idx]) == BigUint(idx));
      CHECK(binomial_unrank(n, w, BigUint(idx)) == subsets[idx]);
    }
  }
}

TEST_CASE("rank zero is the packed prefix and bad inputs throw") {
  CHECK(binomial_rank({}) == BigUint(0));
  CHECK(binomial_rank({0, 1, 2, 3}) == BigUint(0));
  CHECK(binomial_unrank(7, 0, BigUint(0)).empty());
  CHECK(binomial_unrank(7, 3, BigUint(0)) == std::vector<uint32_t>{0, 1, 2});
  CHECK_THROWS_AS(binomial_rank({3, 3}), std::invalid_argument);
  CHECK_THROWS_AS(binomial_rank({5, 2}), std::invalid_argument);
  CHECK_THROWS_AS(binomial_unrank(4, 6, BigUint(0)), std::invalid_argument);
  CHECK_THROWS_AS(binomial_unrank(6, 3, BigUint(20)), std::out_of_range);
  CHECK_NOTHROW(binomial_unrank(6, 3, BigUint(19)));
}

TEST_CASE("bit streams round-trip fixed-width and gamma payloads") {
  Rng rng(71, 0);
  std::vector<std::pair<uint64_t, uint32_t>> fixed;
  std::vector<uint64_t> gammas;
  BitWriter w;
  for (int rep = 0; rep < 200; ++rep) {
    uint32_t n = static_cast<uint32_t>(rng.below(65));
    uint64_t v = n == 64 ? rng.next_u64() : (rng.next_u64() & ((1ULL << n) - 1));
    w.write_bits(v, n);
    fixed.push_back({v, n});
    uint64_t g = rng.below(100000);
    w.write_gamma0(g);
    gammas.push_back(g);
  }
  w.write_gamma(1);
  uint64_t bits = w.bit_count();
  std::vector<uint8_t> bytes = w.take_bytes();
  CHECK(bytes.size() == (bits + 7) / 8);

  BitReader r(bytes.data(), bits);
  for (int rep = 0; rep < 200; ++rep) {
    CHECK(r.read_bits(fixed[rep].second) == fixed[rep].first);
    CHECK(r.read_gamma0() == gammas[rep]);
  }
  CHECK(r.read_gamma() == 1);
  CHECK(r.bits_remaining() == 0);
  CHECK_THROWS_AS(r.read_bit(), CodecError);
}

TEST_CASE("gamma codes have the advertised widths") {
  CHECK(gamma_bits(1) == 1);
  CHECK(gamma_bits(2) == 3);
  CHECK(gamma_bits(3) == 3);
  CHECK(gamma_bits(4) == 5);
  CHECK(gamma_bits(255) == 15);
  CHECK(gamma_bits(256) == 17);
  CHECK(gamma0_bits(0) == 1);
  CHECK_THROWS_AS(gamma_bits(0), std::invalid_argument);
  BitWriter w;
  CHECK_THROWS_AS(w.write_gamma(0), std::invalid_argument);
  for (uint64_t v : {1ULL, 2ULL, 7ULL, 64ULL, 1000ULL, (1ULL << 40) + 17}) {
    BitWriter wv;
    wv.write_gamma(v);
    CHECK(wv.bit_count() == gamma_bits(v));
    std::vector<uint8_t> bytes = wv.take_bytes();
    BitReader r(bytes.data(), gamma_bits(v));
    CHECK(r.read_gamma() == v);
  }
}

TEST_CASE("final partial bytes are zero-padded") {
  BitWriter w;
  w.write_bit(true);
  w.write_bit(true);
  w.write_bit(true);
  std::vector<uint8_t> bytes = w.take_bytes();
  REQUIRE(bytes.size() == 1);
  CHECK(bytes[0] == 0b00000111);
}

TEST_CASE("the subset codec round-trips hits and misses") {
  TupleFixture fx(6, 72);
  DecoderRegistry registry;
  auto zero = std::make_shared<ConstantZeroDecoder>();
  auto oracle = std::make_shared<OracleSelfReductionDecoder>(fx.params);
  registry.add(zero);
  registry.add(oracle);

  for (const Decoder* d :
       {static_cast<const Decoder*>(zero.get()),
        static_cast<const Decoder*>(oracle.get())}) {
    auto [cw, ledger] = encode_coarse(*d, fx.blocks, fx.truths);
    CHECK(ledger.total() == cw.bit_count);
    CHECK(cw.bytes.size() == (cw.bit_count + 7) / 8);
    CHECK(decode_coarse(cw, fx.blocks, registry) == fx.truths);

    size_t misses = 0;
    std::vector<BitVector> preds = d->predict(fx.blocks);
    for (size_t j = 0; j < preds.size(); ++j) {
      if (!(preds[j] == fx.truths[j])) ++misses;
    }
    CHECK(ledger.payload_bits == misses * fx.params.m);
    CHECK(ledger.content_bits() ==
          ledger.identity_bits + ledger.seed_bits + ledger.payload_bits);
  }

  // The exact decoder hits every block: no witness payload at all.
  auto [cw_oracle, ledger_oracle] =
      encode_coarse(*oracle, fx.blocks, fx.truths);
  CHECK(ledger_oracle.payload_bits == 0);
}

TEST_CASE("the per-bit codec round-trips and prices each error set") {
  TupleFixture fx(5, 73);
  DecoderRegistry registry;
  auto zero = std::make_shared<ConstantZeroDecoder>();
  registry.add(zero);

  auto [cw, ledger] = encode_fine(*zero, fx.blocks, fx.truths);
  CHECK(ledger.total() == cw.bit_count);
  CHECK(decode_fine(cw, fx.blocks, registry) == fx.truths);

  uint64_t expected_payload = 0;
  std::vector<BitVector> preds = zero->predict(fx.blocks);
  for (size_t j = 0; j < preds.size(); ++j) {
    uint64_t e = 0;
    for (size_t i = 0; i < fx.params.m; ++i) {
      e += preds[j].get(i) != fx.truths[j].get(i) ? 1 : 0;
    }
    expected_payload += gamma0_bits(e) + ceil_log2_binomial(fx.params.m, e);
  }
  CHECK(ledger.payload_bits == expected_payload);
}

TEST_CASE("identical inputs always produce the identical codeword") {
  TupleFixture fx(4, 74);
  ConstantZeroDecoder zero;
  auto [cw1, ledger1] = encode_coarse(zero, fx.blocks, fx.truths);
  auto [cw2, ledger2] = encode_coarse(zero, fx.blocks, fx.truths);
  CHECK(cw1.bytes == cw2.bytes);
  CHECK(cw1.bit_count == cw2.bit_count);
  CHECK(ledger1 == ledger2);
}

TEST_CASE("malformed codewords are rejected, not misread") {
  TupleFixture fx(4, 75);
  DecoderRegistry registry;
  auto zero = std::make_shared<ConstantZeroDecoder>();
  registry.add(zero);
  auto [cw, ledger] = encode_coarse(*zero, fx.blocks, fx.truths);

  Codeword bad_magic = cw;
  bad_magic.bytes[0] ^= 0xFF;
  CHECK_THROWS_AS(decode_coarse(bad_magic, fx.blocks, registry), CodecError);

  Codeword bad_version = cw;
  bad_version.bytes[1] ^= 0x02;
  CHECK_THROWS_AS(decode_coarse(bad_version, fx.blocks, registry), CodecError);

  Codeword truncated = cw;
  truncated.bit_count -= 9;
  CHECK_THROWS_AS(decode_coarse(truncated, fx.blocks, registry), CodecError);

  Codeword trailing = cw;
  trailing.bytes.push_back(0);
  trailing.bit_count += 8;
  CHECK_THROWS_AS(decode_coarse(trailing, fx.blocks, registry), CodecError);

  std::vector<Instance> fewer(fx.blocks.begin(), fx.blocks.end() - 1);
  CHECK_THROWS_AS(decode_coarse(cw, fewer, registry), CodecError);

  // A fine decode of a coarse codeword trips the magic check.
  CHECK_THROWS_AS(decode_fine(cw, fx.blocks, registry), CodecError);

  // Unknown decoder identity is a configuration error, not a codec error.
  DecoderRegistry empty;
  CHECK_THROWS_AS(decode_coarse(cw, fx.blocks, empty), ConfigError);
}

TEST_CASE("encoders validate their inputs") {
  TupleFixture fx(3, 76);
  ConstantZeroDecoder zero;
  std::vector<BitVector> short_truths(fx.truths.begin(), fx.truths.end() - 1);
  CHECK_THROWS_AS(encode_coarse(zero, fx.blocks, short_truths),
                  std::invalid_argument);
  std::vector<BitVector> bad_width = fx.truths;
  bad_width[0] = BitVector(5);
  CHECK_THROWS_AS(encode_fine(zero, fx.blocks, bad_width),
                  std::invalid_argument);
}

TEST_CASE("the counting-bound curve matches hand evaluation") {
  UnionBoundCurve c = union_bound_curve(0.0, 1.0, 0.0, 0.0, {1, 2, 10});
  CHECK(c.lambda == doctest::Approx(1.0));
  CHECK(c.admissible);
  REQUIRE(c.rows.size() == 3);
  CHECK(c.rows[0].t == 1);
  CHECK(c.rows[0].exponent == doctest::Approx(-1.0));
  CHECK(c.rows[2].exponent == doctest::Approx(-10.0));

  UnionBoundCurve half = union_bound_curve(0.2, 0.5, 0.25, 0.0, {8});
  CHECK(half.lambda == doctest::Approx(std::log2(1.0 / 0.75)));
  CHECK(half.rows[0].exponent ==
        doctest::Approx((0.2 - 0.5 * half.lambda) * 8.0));

  // Admissibility is the inequality delta <= gamma * lambda - eta, sharp at
  // the boundary.
  double lam = std::log2(1.0 / 0.75);
  UnionBoundCurve at = union_bound_curve(0.5 * lam - 0.01, 0.5, 0.25, 0.01, {1});
  CHECK(at.admissible);
  UnionBoundCurve above =
      union_bound_curve(0.5 * lam - 0.0099, 0.5, 0.25, 0.01, {1});
  CHECK_FALSE(above.admissible);

  CHECK_THROWS_AS(union_bound_curve(0.1, 0.0, 0.1, 0.1, {1}),
                  std::invalid_argument);
  CHECK_THROWS_AS(union_bound_curve(0.1, 1.5, 0.1, 0.1, {1}),
                  std::invalid_argument);
  CHECK_THROWS_AS(union_bound_curve(-0.1, 0.5, 0.1, 0.1, {1}),
                  std::invalid_argument);
  CHECK_THROWS_AS(union_bound_curve(0.1, 0.5, 0.5, 0.1, {1}),
                  std::invalid_argument);
  CHECK_THROWS_AS(union_bound_curve(0.1, 0.5, -0.2, 0.1, {1}),
                  std::invalid_argument);
}
