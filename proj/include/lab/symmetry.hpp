#pragma once

#include <cstdint>
#include <string>

#include "lab/bitvec.hpp"
#include "lab/ensemble.hpp"
#include "lab/sils.hpp"

namespace lab {

// How a prediction made on a sign-flipped instance is pulled back to the
// original coordinates. `Coordinate` toggles by the flip bit of the queried
// position; `VvLabel` toggles by <a_i, sigma>. Coordinate is the default: it
// is the convention under which the round-trip identity holds exactly (see
// the round-trip tests).
enum class BackmapMode { Coordinate, VvLabel };

BackmapMode backmap_from_string(const std::string& s);
std::string to_string(BackmapMode mode);

// Per-coordinate involution: flip the signs of variable i's literals and
// absorb the change into the right-hand side (b ^= A e_i). Maps an
// on-promise instance with witness X to one with witness X ^ e_i.
// Throws std::invalid_argument when the instance carries no valid witness.
Instance involution_ti(const Instance& inst, size_t i);

// Sign-flip action g_sigma: flip literal signs per sigma and set
// b ^= A sigma. The cached witness, when present, moves to X ^ sigma.
Instance sign_flip_g(const Instance& inst, const BitVector& sigma);

// Pull a predicted bit for position i back through g_sigma. `label_shift`
// must be A * sigma, the image of the flip on the right-hand side.
// Coordinate mode toggles by sigma[i]; VvLabel mode toggles by
// <a_i, label_shift>, i.e. by the flip as seen through the labels alone.
// The two agree exactly when the label columns are orthonormal.
bool back_map(bool pred, const BitVector& a_i, const BitVector& sigma,
              const BitVector& label_shift, size_t i, BackmapMode mode);

// The local view available to a restricted decoder at position i: the
// sign-invariant sketch z plus the isolation-layer labels (a_i, b).
struct LocalInput {
  SilsVector z;
  BitVector a;
  BitVector b;

  bool operator==(const LocalInput&) const = default;
  std::string pack_key() const { return z.pack_key() + a.pack_key() + b.pack_key(); }
  size_t bit_length() const { return z.bits.size() + a.size() + b.size(); }
};

LocalInput local_input(const Instance& inst, const SilsVector& z, size_t i);

}  // namespace lab
