#pragma once

#include <array>
#include <cstdint>

namespace lab {

// Counter-based pseudorandom generator: Philox 2x64 with 10 rounds.
// A generator is identified by (seed, stream). The stream id occupies half of
// the 128-bit counter block, so distinct streams enumerate disjoint counter
// sets and never overlap, no matter how many values each one draws. This is
// what makes per-trial and per-block substreams safe to hand out by simple
// arithmetic on the stream id.
class Rng {
 public:
  Rng(uint64_t seed, uint64_t stream) : key_(seed), stream_(stream) {}

  uint64_t next_u64();

  // Uniform integer in [0, n); n must be positive. Unbiased via rejection.
  uint64_t below(uint64_t n);

  // Single uniform bit (buffered from 64-bit draws).
  bool next_bit();

  // Uniform double in [0, 1) with 53 bits of precision.
  double next_double();

  uint64_t seed() const { return key_; }
  uint64_t stream() const { return stream_; }

 private:
  void refill();

  uint64_t key_;
  uint64_t stream_;
  uint64_t counter_ = 0;
  std::array<uint64_t, 2> buf_{};
  int buf_pos_ = 2;
  uint64_t bit_cache_ = 0;
  int bits_left_ = 0;
};

}  // namespace lab
