#include "lab/rng.hpp"

#include <stdexcept>

namespace lab {

namespace {
constexpr uint64_t kPhiloxMul = 0xD2B74407B1CE6E93ULL;
constexpr uint64_t kKeyBump = 0x9E3779B97F4A7C15ULL;
}  // namespace

void Rng::refill() {
  uint64_t c0 = counter_;
  uint64_t c1 = stream_;
  uint64_t k = key_;
  for (int round = 0; round < 10; ++round) {
    unsigned __int128 prod = static_cast<unsigned __int128>(kPhiloxMul) * c0;
    uint64_t hi = static_cast<uint64_t>(prod >> 64);
    uint64_t lo = static_cast<uint64_t>(prod);
    c0 = hi ^ k ^ c1;
    c1 = lo;
    k += kKeyBump;
  }
  buf_[0] = c0;
  buf_[1] = c1;
  ++counter_;
  buf_pos_ = 0;
}

uint64_t Rng::next_u64() {
  if (buf_pos_ > 1) refill();
  return buf_[buf_pos_++];
}

uint64_t Rng::below(uint64_t n) {
  if (n == 0) throw std::invalid_argument("Rng::below: bound must be positive");
  if ((n & (n - 1)) == 0) return next_u64() & (n - 1);
  // Reject draws below 2^64 mod n so the remainder is exactly uniform.
  const uint64_t cutoff = (0 - n) % n;
  for (;;) {
    uint64_t r = next_u64();
    if (r >= cutoff) return r % n;
  }
}

bool Rng::next_bit() {
  if (bits_left_ == 0) {
    bit_cache_ = next_u64();
    bits_left_ = 64;
  }
  bool b = bit_cache_ & 1;
  bit_cache_ >>= 1;
  --bits_left_;
  return b;
}

double Rng::next_double() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

}  // namespace lab
