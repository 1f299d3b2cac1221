#include <cmath>
#include <cstdint>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "doctest.h"
#include "lab/common.hpp"
#include "lab/ensemble.hpp"
#include "lab/hashfam.hpp"
#include "lab/sils.hpp"
#include "lab/symmetry.hpp"

using namespace lab;

namespace {

EnsembleParams small_params(uint32_t m, double alpha = 10.0) {
  EnsembleParams p;
  p.m = m;
  p.alpha = alpha;
  return p;
}

BitVector random_bits(size_t n, Rng& rng) {
  BitVector v(n);
  for (size_t i = 0; i < n; ++i) v.set(i, rng.next_bit());
  return v;
}

}  // namespace

TEST_CASE("backmap mode strings round-trip and reject junk") {
  CHECK(backmap_from_string("coordinate") == BackmapMode::Coordinate);
  CHECK(backmap_from_string("vvlabel") == BackmapMode::VvLabel);
  CHECK(to_string(BackmapMode::Coordinate) == "coordinate");
  CHECK(to_string(BackmapMode::VvLabel) == "vvlabel");
  CHECK_THROWS_AS(backmap_from_string("Coordinate"), ConfigError);
  CHECK_THROWS_AS(backmap_from_string(""), ConfigError);
}

TEST_CASE("per-coordinate involution is a self-inverse witness shift") {
  EnsembleParams p = small_params(8);
  for (uint64_t stream = 0; stream < 6; ++stream) {
    Rng rng(42, stream);
    BlockSample bs = sample_block(p, rng);
    REQUIRE(bs.inst.witness_checks_out());
    for (size_t i = 0; i < p.m; ++i) {
      Instance moved = involution_ti(bs.inst, i);
      CHECK(moved.witness_checks_out());
      CHECK(*moved.witness == (bs.witness ^ BitVector::unit(p.m, i)));
      CHECK(moved.vv.b == (bs.inst.vv.b ^ bs.inst.vv.a.column(i)));
      CHECK(moved.vv.k == bs.inst.vv.k);
      // Applying it twice restores every field bit for bit.
      CHECK(involution_ti(moved, i) == bs.inst);
    }
  }
}

TEST_CASE("the involution needs an on-promise instance") {
  Rng rng(43, 0);
  BlockSample bs = sample_block(small_params(8), rng);
  Instance stripped = bs.inst;
  stripped.witness.reset();
  CHECK_THROWS_AS(involution_ti(stripped, 0), std::invalid_argument);
  Instance lying = bs.inst;
  *lying.witness = *lying.witness ^ BitVector::unit(8, 3);
  CHECK_THROWS_AS(involution_ti(lying, 0), std::invalid_argument);
  CHECK_THROWS_AS(involution_ti(bs.inst, 8), std::out_of_range);
}

TEST_CASE("sign flips transport the witness and the right-hand side") {
  EnsembleParams p = small_params(8);
  Rng rng(44, 0);
  BlockSample bs = sample_block(p, rng);
  for (int rep = 0; rep < 40; ++rep) {
    BitVector sigma = random_bits(p.m, rng);
    Instance moved = sign_flip_g(bs.inst, sigma);
    CHECK(moved.vv.b == (bs.inst.vv.b ^ bs.inst.vv.a.mul(sigma)));
    CHECK(*moved.witness == (bs.witness ^ sigma));
    CHECK(moved.witness_checks_out());
    CHECK(sign_flip_g(moved, sigma) == bs.inst);
  }
}

TEST_CASE("sign flips compose by xor and fix the identity") {
  EnsembleParams p = small_params(8);
  Rng rng(45, 0);
  BlockSample bs = sample_block(p, rng);
  CHECK(sign_flip_g(bs.inst, BitVector(p.m)) == bs.inst);
  for (int rep = 0; rep < 20; ++rep) {
    BitVector s1 = random_bits(p.m, rng);
    BitVector s2 = random_bits(p.m, rng);
    CHECK(sign_flip_g(sign_flip_g(bs.inst, s1), s2) ==
          sign_flip_g(bs.inst, s1 ^ s2));
  }
  BitVector wrong_len(p.m + 1);
  CHECK_THROWS_AS(sign_flip_g(bs.inst, wrong_len), std::invalid_argument);
}

TEST_CASE("sign flips preserve the joint solution count") {
  // The action is a bijection on assignments, so exhaustive counts agree.
  EnsembleParams p = small_params(8, 4.0);
  Rng rng(46, 0);
  for (int rep = 0; rep < 25; ++rep) {
    Cnf base = sample_base_cnf(p, rng);
    Instance inst;
    inst.cnf = apply_mask(base, Mask::random(p.m, rng));
    inst.vv.k = 3;
    inst.vv.a = sample_parity_matrix(3, p.m, rng);
    inst.vv.b = random_bits(3, rng);
    uint64_t before = count_solutions_capped(inst, 1 << 8, p).count;
    BitVector sigma = random_bits(p.m, rng);
    uint64_t after =
        count_solutions_capped(sign_flip_g(inst, sigma), 1 << 8, p).count;
    CHECK(before == after);
  }
}

TEST_CASE("backmap toggles by flip bit or by label-side flip image") {
  Rng rng(47, 0);
  for (int rep = 0; rep < 200; ++rep) {
    size_t k = 1 + rng.below(6);
    size_t m = 4 + rng.below(8);
    size_t i = rng.below(m);
    BitVector a_i = random_bits(k, rng);
    BitVector sigma = random_bits(m, rng);
    BitVector shift = random_bits(k, rng);
    bool pred = rng.next_bit();
    CHECK(back_map(pred, a_i, sigma, shift, i, BackmapMode::Coordinate) ==
          (pred ^ sigma.get(i)));
    CHECK(back_map(pred, a_i, sigma, shift, i, BackmapMode::VvLabel) ==
          (pred ^ dot(a_i, shift)));
  }
}

TEST_CASE("coordinate backmap recovers the original witness bit") {
  // Predicting the true bit of the flipped instance and mapping back must
  // yield the true bit of the original instance, for every sigma.
  EnsembleParams p = small_params(8);
  Rng rng(48, 0);
  BlockSample bs = sample_block(p, rng);
  for (int rep = 0; rep < 50; ++rep) {
    BitVector sigma = random_bits(p.m, rng);
    Instance moved = sign_flip_g(bs.inst, sigma);
    BitVector shift = bs.inst.vv.a.mul(sigma);
    for (size_t i = 0; i < p.m; ++i) {
      bool pred_on_moved = moved.witness->get(i);
      bool mapped = back_map(pred_on_moved, moved.vv.a.column(i), sigma, shift,
                             i, BackmapMode::Coordinate);
      CHECK(mapped == bs.witness.get(i));
    }
  }
}

TEST_CASE("the two backmap conventions genuinely differ") {
  // One parity row A = (1 1) over m = 2, sigma = (1, 0). Querying position 1:
  // coordinate mode toggles by sigma[1] = 0, while the label-side image
  // A sigma = (1) gives <a_1, A sigma> = 1.
  BitMatrix a(1, 2);
  a.set(0, 0, true);
  a.set(0, 1, true);
  BitVector sigma(2);
  sigma.set(0, true);
  BitVector shift = a.mul(sigma);
  REQUIRE(shift.get(0));
  BitVector a_1 = a.column(1);
  CHECK(back_map(false, a_1, sigma, shift, 1, BackmapMode::Coordinate) == false);
  CHECK(back_map(false, a_1, sigma, shift, 1, BackmapMode::VvLabel) == true);
}

TEST_CASE("the local view exposes the sketch, one label column, and b") {
  EnsembleParams p = small_params(8);
  Rng rng(49, 0);
  BlockSample bs = sample_block(p, rng);
  SilsSpec spec;
  SilsVector z = extract_sils(bs.inst.cnf, spec);
  for (size_t i = 0; i < p.m; ++i) {
    LocalInput u = local_input(bs.inst, z, i);
    CHECK(u.z == z);
    CHECK(u.a == bs.inst.vv.a.column(i));
    CHECK(u.a.size() == bs.inst.vv.k);
    CHECK(u.b == bs.inst.vv.b);
    CHECK(u.bit_length() == z.bits.size() + 2 * size_t(bs.inst.vv.k));
  }
}

TEST_CASE("packed local-view keys separate distinct views") {
  EnsembleParams p = small_params(8);
  SilsSpec spec;
  std::set<std::string> keys;
  size_t views = 0;
  std::set<std::string> distinct_views;
  for (uint64_t stream = 0; stream < 12; ++stream) {
    Rng rng(50, stream);
    BlockSample bs = sample_block(p, rng);
    SilsVector z = extract_sils(bs.inst.cnf, spec);
    for (size_t i = 0; i < p.m; ++i) {
      LocalInput u = local_input(bs.inst, z, i);
      keys.insert(u.pack_key());
      distinct_views.insert(z.to_string() + "|" + u.a.to_string() + "|" +
                            u.b.to_string());
      ++views;
    }
  }
  // The packed key is exactly as discriminating as the printed triple.
  CHECK(keys.size() == distinct_views.size());
  CHECK(keys.size() > 1);
}

TEST_CASE("witness bits pooled by label width are balanced") {
  // Flipping coordinate i maps the on-promise ensemble to itself, carries
  // (z, a_i, b) to (z, a_i, b ^ a_i), and complements the witness bit. The
  // right-hand side is marginalized when pooling by k alone, so within each
  // k-group the witness bit must be a fair coin.
  EnsembleParams p = small_params(8);
  std::map<uint32_t, std::pair<uint64_t, uint64_t>> by_k;  // k -> (n, ones)
  for (uint64_t stream = 0; stream < 600; ++stream) {
    Rng rng(51, stream);
    BlockSample bs = sample_block(p, rng);
    auto& cell = by_k[bs.inst.vv.k];
    for (size_t i = 0; i < p.m; ++i) {
      cell.first += 1;
      cell.second += bs.witness.get(i) ? 1 : 0;
    }
  }
  size_t tested = 0;
  for (const auto& [k, cell] : by_k) {
    if (cell.first < 1000) continue;
    ++tested;
    double freq = double(cell.second) / double(cell.first);
    double band = 4.0 / std::sqrt(double(cell.first));
    CAPTURE(k);
    CAPTURE(freq);
    CHECK(std::abs(freq - 0.5) <= band);
  }
  CHECK(tested >= 1);
}

TEST_CASE("repeated local views accumulate mass as the sample grows") {
  // Coarse chart: (a_i, b) with a fixed narrow label width. With 3-bit
  // labels there are at most 64 cells, so a tenfold larger sample pushes
  // nearly all mass over any fixed replication threshold.
  EnsembleParams p = small_params(6, 10.0);
  p.k_mode = KMode::Fixed;
  p.c1 = 3.0 / std::log2(6.0);  // pins the label width at 3

  auto untested_mass = [&](uint64_t seed, size_t n_blocks,
                           uint64_t threshold) {
    std::map<std::string, uint64_t> counts;
    std::vector<std::string> draws;
    for (size_t b = 0; b < n_blocks; ++b) {
      Rng rng(seed, b);
      BlockSample bs = sample_block(p, rng);
      REQUIRE(bs.inst.vv.k == 3);
      for (size_t i = 0; i < p.m; ++i) {
        std::string key =
            bs.inst.vv.a.column(i).pack_key() + bs.inst.vv.b.pack_key();
        counts[key] += 1;
        draws.push_back(key);
      }
    }
    uint64_t rare = 0;
    for (const std::string& key : draws) {
      if (counts[key] < threshold) ++rare;
    }
    return double(rare) / double(draws.size());
  };

  double small = untested_mass(52, 40, 5);
  double large = untested_mass(53, 400, 5);
  CAPTURE(small);
  CAPTURE(large);
  CHECK(large < small);
  CHECK(large < 0.2);
}
