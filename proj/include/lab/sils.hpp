#pragma once

#include <cstdint>
#include <string>

#include "lab/bitvec.hpp"
#include "lab/cnf.hpp"
#include "lab/rng.hpp"

namespace lab {

// Configuration of the sign-invariant local sketch. The sketch reads only
// the unsigned, unlabeled structure of the formula (variable degrees and
// small neighborhood shapes), so it is constant on every mask orbit.
struct SilsSpec {
  double c_z = 4.0;     // sketch length = floor(c_z * log2 m) bits
  uint32_t rho = 1;     // neighborhood radius for shape counts (0 or 1)
  uint64_t hash_seed = 0x51155EEDULL;
  // Test-only controls. `sign_sensitive_probe` mixes literal polarities into
  // the sketch, deliberately breaking invariance (negative control).
  // `zero_features` yields the all-zero sketch (a single trivial bucket).
  bool sign_sensitive_probe = false;
  bool zero_features = false;

  size_t sketch_bits(uint32_t m) const;
  void validate() const;
  uint64_t digest() const;
};

struct SilsVector {
  BitVector bits;

  bool operator==(const SilsVector&) const = default;
  std::string pack_key() const { return bits.pack_key(); }
  std::string to_string() const { return bits.to_string(); }
};

// Extract the sketch: a quantized log2-bucketed degree histogram followed by
// a seeded hash of the multiset of radius-rho unsigned neighborhood shapes.
SilsVector extract_sils(const SignedCnf& f, const SilsSpec& spec);

// Apply n random masks to the base formula and verify the sketch never moves.
bool check_invariance(const Cnf& base, const SilsSpec& spec, size_t n_masks,
                      Rng& rng);

}  // namespace lab
