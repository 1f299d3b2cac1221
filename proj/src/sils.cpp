#include "lab/sils.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>
#include <vector>

#include "lab/common.hpp"

namespace lab {

size_t SilsSpec::sketch_bits(uint32_t m) const {
  if (m < 2) return 1;
  size_t r = static_cast<size_t>(std::floor(c_z * std::log2(double(m))));
  return r < 1 ? 1 : r;
}

void SilsSpec::validate() const {
  if (!(c_z > 0)) throw ConfigError("sils.c_z must be positive");
  if (rho > 2) throw ConfigError("sils.rho must be 0, 1, or 2");
}

uint64_t SilsSpec::digest() const {
  std::string blob = "sils|" + std::to_string(c_z) + "|" + std::to_string(rho) +
                     "|" + std::to_string(hash_seed) + "|" +
                     std::to_string(sign_sensitive_probe) + "|" +
                     std::to_string(zero_features);
  return fnv1a(blob);
}

namespace {

void append_u32(std::string& s, uint32_t v) {
  for (int i = 0; i < 4; ++i) s.push_back(static_cast<char>(v >> (8 * i)));
}

// Unsigned, label-free invariant of a variable's radius-1 ball: its degree
// together with the multiset of co-occurrence multiplicities of its distinct
// neighbors. Invariant under any variable relabeling and any sign flips.
std::string radius1_shape_key(uint32_t v,
                              const std::vector<std::vector<uint32_t>>& var_clauses,
                              const SignedCnf& f) {
  std::map<uint32_t, uint32_t> neighbor_mult;
  for (uint32_t c : var_clauses[v]) {
    for (const auto& lit : f.clauses[c]) {
      if (lit.var != v) ++neighbor_mult[lit.var];
    }
  }
  std::vector<uint32_t> mults;
  mults.reserve(neighbor_mult.size());
  for (const auto& [nbr, cnt] : neighbor_mult) mults.push_back(cnt);
  std::sort(mults.begin(), mults.end());
  std::string key;
  append_u32(key, static_cast<uint32_t>(var_clauses[v].size()));
  for (uint32_t c : mults) append_u32(key, c);
  return key;
}

}  // namespace

SilsVector extract_sils(const SignedCnf& f, const SilsSpec& spec) {
  const uint32_t m = f.m;
  const size_t r = spec.sketch_bits(m);
  SilsVector z;
  z.bits = BitVector(r);
  if (spec.zero_features) return z;

  std::vector<std::vector<uint32_t>> var_clauses(m);
  for (size_t c = 0; c < f.clauses.size(); ++c) {
    for (const auto& lit : f.clauses[c]) {
      var_clauses[lit.var].push_back(static_cast<uint32_t>(c));
    }
  }

  // Degree histogram over log2-spaced buckets, 2 bits per bucket.
  const size_t n_buckets = std::min<size_t>(r / 4, 8);
  const size_t hist_bits = 2 * n_buckets;
  std::vector<uint32_t> hist(n_buckets ? n_buckets : 1, 0);
  if (n_buckets > 0) {
    for (uint32_t v = 0; v < m; ++v) {
      uint32_t deg = static_cast<uint32_t>(var_clauses[v].size());
      size_t bucket = static_cast<size_t>(std::floor(std::log2(double(deg) + 1.0)));
      if (bucket >= n_buckets) bucket = n_buckets - 1;
      ++hist[bucket];
    }
    for (size_t b = 0; b < n_buckets; ++b) {
      uint32_t q = std::min<uint32_t>(3, (4 * hist[b]) / m);
      if (q & 1) z.bits.set(2 * b, true);
      if (q & 2) z.bits.set(2 * b + 1, true);
    }
  }

  // Shape counts hashed into the remaining bits. The accumulator is a sum
  // over the (shape, count) multiset, so it cannot depend on any ordering.
  const size_t hash_bits = r - hist_bits;
  if (hash_bits > 0) {
    Rng hseed(spec.hash_seed, 0);
    const uint64_t a = hseed.next_u64() | 1;  // odd multiplier
    const uint64_t b = hseed.next_u64();
    std::map<std::string, uint64_t> shape_counts;
    if (spec.rho == 0) {
      for (uint32_t v = 0; v < m; ++v) {
        std::string key;
        append_u32(key, static_cast<uint32_t>(var_clauses[v].size()));
        ++shape_counts[key];
      }
    } else {
      for (uint32_t v = 0; v < m; ++v) {
        ++shape_counts[radius1_shape_key(v, var_clauses, f)];
      }
    }
    uint64_t acc = 0;
    for (const auto& [key, count] : shape_counts) {
      uint64_t d = fnv1a(key);
      uint64_t h = a * d + b;  // pairwise-independent family over the digest
      acc += mix64(h ^ (count * 0x9E3779B97F4A7C15ULL));
    }
    if (spec.sign_sensitive_probe) {
      // Deliberately mix in literal polarities (breaks mask invariance).
      uint64_t pos = 0;
      for (const auto& cl : f.clauses) {
        for (const auto& lit : cl) pos += lit.neg == 0;
      }
      acc += mix64(pos);
    }
    uint64_t folded = mix64(acc);
    for (size_t i = 0; i < hash_bits; ++i) {
      if ((folded >> (i % 64)) & 1) z.bits.set(hist_bits + i, true);
      if (i % 64 == 63) folded = mix64(folded);
    }
  }
  return z;
}

bool check_invariance(const Cnf& base, const SilsSpec& spec, size_t n_masks,
                      Rng& rng) {
  SilsVector reference = extract_sils(apply_mask(base, Mask::identity(base.m)), spec);
  for (size_t i = 0; i < n_masks; ++i) {
    Mask h = Mask::random(base.m, rng);
    if (!(extract_sils(apply_mask(base, h), spec) == reference)) return false;
  }
  return true;
}

}  // namespace lab
