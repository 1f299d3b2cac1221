#include <cstdint>
#include <map>
#include <set>
#include <string>

#include "doctest.h"
#include "lab/cnf.hpp"
#include "lab/ensemble.hpp"
#include "lab/sils.hpp"

using namespace lab;

namespace {

Cnf sample_skeleton(uint32_t m, double alpha, uint64_t seed) {
  EnsembleParams p;
  p.m = m;
  p.alpha = alpha;
  Rng rng(seed, 0);
  return sample_base_cnf(p, rng);
}

}  // namespace

TEST_CASE("sketch length follows the logarithmic budget") {
  SilsSpec spec;
  CHECK(spec.sketch_bits(16) == 16);  // floor(4 * log2 16)
  CHECK(spec.sketch_bits(12) == 14);  // floor(4 * 3.58496...)
  CHECK(spec.sketch_bits(8) == 12);
  spec.c_z = 2.0;
  CHECK(spec.sketch_bits(16) == 8);
  Cnf base = sample_skeleton(16, 4.2, 1);
  SilsSpec d;
  SilsVector z = extract_sils(apply_mask(base, Mask::identity(16)), d);
  CHECK(z.bits.size() == d.sketch_bits(16));
}

TEST_CASE("the sketch is constant on every mask orbit") {
  for (uint32_t m : {8u, 12u, 16u, 32u}) {
    CAPTURE(m);
    Cnf base = sample_skeleton(m, 4.2, 10 + m);
    SilsSpec spec;
    Rng rng(20 + m, 0);
    SilsVector reference =
        extract_sils(apply_mask(base, Mask::identity(m)), spec);
    for (int rep = 0; rep < 50; ++rep) {
      Mask h = Mask::random(m, rng);
      CHECK(extract_sils(apply_mask(base, h), spec) == reference);
    }
  }
}

TEST_CASE("check_invariance wraps the orbit sweep") {
  Cnf base = sample_skeleton(12, 4.2, 3);
  SilsSpec spec;
  Rng rng(4, 0);
  CHECK(check_invariance(base, spec, 200, rng));
}

TEST_CASE("masking the masked formula again stays on the same orbit") {
  Cnf base = sample_skeleton(10, 4.0, 5);
  SilsSpec spec;
  Rng rng(6, 0);
  Mask h = Mask::random(10, rng);
  SignedCnf masked = apply_mask(base, h);
  SilsVector z = extract_sils(masked, spec);
  for (int rep = 0; rep < 50; ++rep) {
    Mask g = Mask::random(10, rng);
    CHECK(extract_sils(apply_mask_signed(masked, g), spec) == z);
  }
}

TEST_CASE("the sign-sensitive probe breaks invariance") {
  // The negative control must leak polarity: some sign flip moves the sketch.
  Cnf base = sample_skeleton(12, 4.2, 7);
  SilsSpec probe;
  probe.sign_sensitive_probe = true;
  Rng rng(8, 0);
  SignedCnf ref = apply_mask(base, Mask::identity(12));
  SilsVector z0 = extract_sils(ref, probe);
  bool moved = false;
  for (int rep = 0; rep < 64 && !moved; ++rep) {
    BitVector sigma(12);
    for (size_t i = 0; i < 12; ++i) sigma.set(i, rng.next_bit());
    moved = !(extract_sils(flip_signs(ref, sigma), probe) == z0);
  }
  CHECK(moved);
}

TEST_CASE("zero_features yields the all-zero sketch") {
  Cnf base = sample_skeleton(12, 4.2, 9);
  SilsSpec spec;
  spec.zero_features = true;
  SilsVector z = extract_sils(apply_mask(base, Mask::identity(12)), spec);
  CHECK(z.bits.size() == spec.sketch_bits(12));
  CHECK(z.bits.weight() == 0);
}

TEST_CASE("different skeletons give the sketch room to differ") {
  // Not an injectivity promise, but with hundreds of formulas the sketch
  // must take many values or it carries no information.
  SilsSpec spec;
  std::set<std::string> keys;
  for (uint64_t seed = 0; seed < 200; ++seed) {
    Cnf base = sample_skeleton(16, 4.2, 1000 + seed);
    keys.insert(extract_sils(apply_mask(base, Mask::identity(16)), spec)
                    .pack_key());
  }
  CHECK(keys.size() > 20);
}

TEST_CASE("hash seed and rho change the sketch family") {
  Cnf base = sample_skeleton(16, 4.2, 11);
  SignedCnf f = apply_mask(base, Mask::identity(16));
  SilsSpec a;
  SilsSpec b;
  b.hash_seed = 0x1234;
  SilsSpec c;
  c.rho = 0;
  // Families are distinguished somewhere over a few draws.
  bool seed_differs = false, rho_differs = false;
  for (uint64_t seed = 0; seed < 16; ++seed) {
    Cnf base2 = sample_skeleton(16, 4.2, 300 + seed);
    SignedCnf f2 = apply_mask(base2, Mask::identity(16));
    seed_differs = seed_differs || !(extract_sils(f2, a) == extract_sils(f2, b));
    rho_differs = rho_differs || !(extract_sils(f2, a) == extract_sils(f2, c));
  }
  CHECK(seed_differs);
  CHECK(rho_differs);
  CHECK(a.digest() != b.digest());
  CHECK(a.digest() != c.digest());
  SilsSpec a_copy;
  CHECK(a.digest() == a_copy.digest());
  (void)f;
}

TEST_CASE("spec validation rejects unusable settings") {
  SilsSpec bad_cz;
  bad_cz.c_z = 0.0;
  CHECK_THROWS(bad_cz.validate());
  SilsSpec bad_rho;
  bad_rho.rho = 3;
  CHECK_THROWS(bad_rho.validate());
  SilsSpec wide_rho;
  wide_rho.rho = 2;
  CHECK_NOTHROW(wide_rho.validate());
  SilsSpec ok;
  CHECK_NOTHROW(ok.validate());
}
