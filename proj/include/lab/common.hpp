#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace lab {

inline constexpr const char* kArtifactVersion = "1.0.0";
inline constexpr uint32_t kReportSchemaVersion = 1;

// Thrown when a configuration value is missing, malformed, or out of range.
// The CLI maps this to exit code 2.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Thrown when an operation would exceed a configured resource budget
// (enumeration dimension, rejection-trial cap, field width). Exit code 3.
class BudgetError : public std::runtime_error {
 public:
  explicit BudgetError(const std::string& what) : std::runtime_error(what) {}
};

// 64-bit finalizer with full avalanche (splitmix64 increment-free tail).
inline uint64_t mix64(uint64_t z) {
  z ^= z >> 30;
  z *= 0xBF58476D1CE4E5B9ULL;
  z ^= z >> 27;
  z *= 0x94D049BB133111EBULL;
  z ^= z >> 31;
  return z;
}

// FNV-1a over a byte string; used for stable parameter digests.
inline uint64_t fnv1a(const void* data, size_t n, uint64_t h = 0xCBF29CE484222325ULL) {
  const unsigned char* p = static_cast<const unsigned char*>(data);
  for (size_t i = 0; i < n; ++i) {
    h ^= p[i];
    h *= 0x100000001B3ULL;
  }
  return h;
}

inline uint64_t fnv1a(const std::string& s, uint64_t h = 0xCBF29CE484222325ULL) {
  return fnv1a(s.data(), s.size(), h);
}

}  // namespace lab
