#include <cstdint>
#include <map>
#include <memory>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "doctest.h"
#include "json.hpp"
#include "lab/common.hpp"
#include "lab/decoder.hpp"
#include "lab/ensemble.hpp"
#include "lab/sils.hpp"
#include "lab/symmetry.hpp"
#include "lab/wrappers.hpp"

using namespace lab;

namespace {

struct TupleFixture {
  EnsembleParams params;
  std::vector<Instance> blocks;
  std::vector<BitVector> truths;

  TupleFixture(size_t t, uint64_t seed, uint32_t m = 8) {
    params.m = m;
    params.alpha = 10.0;
    for (const BlockSample& bs : sample_tuple(t, params, seed, 0)) {
      blocks.push_back(bs.inst);
      truths.push_back(bs.witness);
    }
  }
};

// Unconstrained instance of a given width; only shape matters to the callee.
Instance bare_instance(uint32_t m) {
  Instance inst;
  inst.cnf.m = m;
  inst.vv.k = 0;
  inst.vv.a = BitMatrix(0, m);
  inst.vv.b = BitVector(0);
  return inst;
}

uint64_t brute_restricted_count(const Instance& inst,
                                const std::vector<int8_t>& fixed) {
  uint64_t found = 0;
  const uint32_t m = inst.cnf.m;
  for (uint64_t w = 0; w < (1ULL << m); ++w) {
    BitVector x = BitVector::from_word(w, m);
    bool ok = true;
    for (uint32_t i = 0; i < m && ok; ++i) {
      if (fixed[i] >= 0 && x.get(i) != (fixed[i] == 1)) ok = false;
    }
    if (!ok || !satisfies(inst.cnf, x)) continue;
    if (inst.vv.a.mul(x) != inst.vv.b) continue;
    ++found;
  }
  return found;
}

}  // namespace

TEST_CASE("wire-size formulas match the serialized layout") {
  CHECK(identity_wire_bits("const0") == gamma0_bits(6) + 8 * 6 + 64);
  CHECK(identity_wire_bits("const0") == 117);
  CHECK(identity_wire_bits("") == 1 + 64);
  CHECK(seed_wire_bits(0) == 1);
  CHECK(seed_wire_bits(8) == gamma0_bits(8) + 64);
}

TEST_CASE("the default description ledger prices identity and seed only") {
  ConstantZeroDecoder zero;
  DescriptionLedger ledger = zero.description_length();
  CHECK(ledger.identity_bits == identity_wire_bits("const0"));
  CHECK(ledger.seed_bits == seed_wire_bits(0));
  CHECK(ledger.payload_bits == 0);
  CHECK(ledger.control_bits == 0);
}

TEST_CASE("const0 predicts all-zero witnesses of each block's width") {
  ConstantZeroDecoder zero;
  std::vector<Instance> blocks{bare_instance(5), bare_instance(9)};
  std::vector<BitVector> preds = zero.predict(blocks);
  REQUIRE(preds.size() == 2);
  CHECK(preds[0].size() == 5);
  CHECK(preds[1].size() == 9);
  CHECK(preds[0].weight() == 0);
  CHECK(preds[1].weight() == 0);
}

TEST_CASE("the xor rule computes label dot rhs, toggled by the sketch bit") {
  TupleFixture fx(5, 80);
  SilsSpec spec;
  LocalRuleDecoder rule(spec);
  std::vector<BitVector> preds = rule.predict(fx.blocks);
  REQUIRE(preds.size() == fx.blocks.size());
  for (size_t j = 0; j < fx.blocks.size(); ++j) {
    const Instance& blk = fx.blocks[j];
    SilsVector z = extract_sils(blk.cnf, spec);
    bool z0 = z.bits.get(0);
    for (size_t i = 0; i < blk.cnf.m; ++i) {
      CHECK(preds[j].get(i) ==
            (dot(blk.vv.a.column(i), blk.vv.b) ^ z0));
    }
  }
}

TEST_CASE("the sketch-table rule looks up whole-block bits") {
  TupleFixture fx(4, 81);
  SilsSpec spec;
  std::string key0 = extract_sils(fx.blocks[0].cnf, spec).pack_key();
  SilsTableDecoder rule(spec, {{key0, 1}}, 0);
  std::vector<BitVector> preds = rule.predict(fx.blocks);
  for (size_t j = 0; j < fx.blocks.size(); ++j) {
    std::string key = extract_sils(fx.blocks[j].cnf, spec).pack_key();
    bool expect = key == key0;
    for (size_t i = 0; i < fx.blocks[j].cnf.m; ++i) {
      CHECK(preds[j].get(i) == expect);
    }
  }
  // Unlisted sketches fall back to the default bit.
  SilsTableDecoder ones(spec, {}, 1);
  for (const BitVector& pred : ones.predict(fx.blocks)) {
    CHECK(pred.weight() == pred.size());
  }
  // The digest separates table contents and default bits.
  SilsTableDecoder other(spec, {{key0, 0}}, 0);
  CHECK(rule.param_digest() != other.param_digest());
  CHECK(rule.param_digest() != ones.param_digest());
  // Table entries are priced into the ledger.
  DescriptionLedger ledger = rule.description_length();
  CHECK(ledger.payload_bits == 8 * key0.size() + 1);
}

TEST_CASE("plug-in tables vote by majority with zero defaults") {
  PlugInTable table(4);
  table.add_vote(0, "a", true);
  table.add_vote(0, "a", true);
  table.add_vote(0, "a", false);
  CHECK(table.predict(0, "a"));       // 2 ones vs 1 zero
  table.add_vote(0, "a", false);
  CHECK_FALSE(table.predict(0, "a"));  // tie goes to zero
  CHECK_FALSE(table.predict(0, "b"));  // unseen key
  CHECK_FALSE(table.predict(1, "a"));  // per-position tables are separate
  CHECK(table.contains(0, "a"));
  CHECK_FALSE(table.contains(1, "a"));
  table.add_vote(3, "zz", true);
  CHECK(table.predict(3, "zz"));
  CHECK(table.entry_count() == 2);
  CHECK(table.m() == 4);
  CHECK_THROWS_AS(table.add_vote(4, "x", true), std::out_of_range);
  CHECK_THROWS_AS(table.predict(4, "x"), std::out_of_range);
}

TEST_CASE("plug-in tables serialize exactly and reject tampering") {
  PlugInTable table(3);
  table.add_vote(0, std::string("k\0ey", 4), true);
  table.add_vote(1, "other", false);
  table.add_vote(1, "other", false);
  table.add_vote(2, "", true);

  std::vector<uint8_t> bytes = table.serialize();
  PlugInTable copy = PlugInTable::deserialize(bytes);
  CHECK(copy == table);
  CHECK(copy.digest() == table.digest());
  CHECK(copy.predict(0, std::string("k\0ey", 4)));

  PlugInTable different(3);
  different.add_vote(0, "k", true);
  CHECK(different.digest() != table.digest());

  std::vector<uint8_t> bad_magic = bytes;
  bad_magic[0] ^= 0xFF;
  CHECK_THROWS_AS(PlugInTable::deserialize(bad_magic), std::invalid_argument);
  std::vector<uint8_t> bad_version = bytes;
  bad_version[4] ^= 0x01;
  CHECK_THROWS_AS(PlugInTable::deserialize(bad_version), std::invalid_argument);
  std::vector<uint8_t> truncated(bytes.begin(), bytes.end() - 1);
  CHECK_THROWS_AS(PlugInTable::deserialize(truncated), std::invalid_argument);
  std::vector<uint8_t> trailing = bytes;
  trailing.push_back(0);
  CHECK_THROWS_AS(PlugInTable::deserialize(trailing), std::invalid_argument);
}

TEST_CASE("plug-in tables export readable json") {
  PlugInTable table(2);
  table.add_vote(0, "\x01\xab", true);
  table.add_vote(1, "q", false);
  nlohmann::json j = nlohmann::json::parse(table.to_json());
  CHECK(j["m"] == 2);
  REQUIRE(j["bits"].size() == 2);
  REQUIRE(j["bits"][0].size() == 1);
  CHECK(j["bits"][0][0]["key"] == "01ab");
  CHECK(j["bits"][0][0]["ones"] == 1);
  CHECK(j["bits"][0][0]["zeros"] == 0);
  CHECK(j["bits"][1][0]["key"] == "71");
  CHECK(j["bits"][1][0]["zeros"] == 1);
}

TEST_CASE("the plug-in decoder applies its frozen table bit by bit") {
  TupleFixture fx(6, 82);
  SilsSpec spec;
  PlugInTable table(fx.params.m);
  for (size_t j = 0; j < fx.blocks.size(); ++j) {
    SilsVector z = extract_sils(fx.blocks[j].cnf, spec);
    for (size_t i = 0; i < fx.params.m; ++i) {
      table.add_vote(i, local_input(fx.blocks[j], z, i).pack_key(),
                     fx.truths[j].get(i));
    }
  }
  PlugInDecoder dec(spec, table);
  std::vector<BitVector> preds = dec.predict(fx.blocks);
  for (size_t j = 0; j < fx.blocks.size(); ++j) {
    SilsVector z = extract_sils(fx.blocks[j].cnf, spec);
    for (size_t i = 0; i < fx.params.m; ++i) {
      CHECK(preds[j].get(i) ==
            dec.table().predict(i, local_input(fx.blocks[j], z, i).pack_key()));
    }
  }
  CHECK(dec.name() == "plugin");
  CHECK(dec.description_length().payload_bits == 8 * table.serialize().size());
  std::vector<Instance> wrong{bare_instance(5)};
  CHECK_THROWS_AS(dec.predict(wrong), std::invalid_argument);
}

TEST_CASE("the enumeration decider answers restricted satisfiability") {
  TupleFixture fx(3, 83);
  UsatDecider decider = enumeration_decider(fx.params);
  Rng rng(84, 0);
  for (const Instance& inst : fx.blocks) {
    for (int rep = 0; rep < 30; ++rep) {
      std::vector<int8_t> fixed(fx.params.m, -1);
      for (auto& f : fixed) {
        uint64_t r = rng.below(3);
        f = r == 2 ? -1 : static_cast<int8_t>(r);
      }
      CHECK(decider(inst, fixed) == (brute_restricted_count(inst, fixed) > 0));
    }
  }
}

TEST_CASE("self-reduction recovers the witness in exactly m calls") {
  TupleFixture fx(5, 85);
  UsatDecider decider = enumeration_decider(fx.params);
  for (size_t j = 0; j < fx.blocks.size(); ++j) {
    SelfReduction sr = self_reduce(fx.blocks[j], decider);
    CHECK(sr.witness == fx.truths[j]);
    CHECK(sr.decider_calls == fx.params.m);
  }
}

TEST_CASE("a lying decider is caught by the final verification") {
  TupleFixture fx(8, 86);
  UsatDecider always_yes = [](const Instance&, const std::vector<int8_t>&) {
    return true;
  };
  UsatDecider always_no = [](const Instance&, const std::vector<int8_t>&) {
    return false;
  };
  // Saying yes everywhere assembles the all-zero witness; saying no
  // assembles all-ones. Pick blocks where those are wrong.
  bool exercised_yes = false, exercised_no = false;
  for (size_t j = 0; j < fx.blocks.size(); ++j) {
    if (fx.truths[j].weight() != 0) {
      CHECK_THROWS_AS(self_reduce(fx.blocks[j], always_yes),
                      std::runtime_error);
      exercised_yes = true;
    }
    if (fx.truths[j].weight() != fx.params.m) {
      CHECK_THROWS_AS(self_reduce(fx.blocks[j], always_no), std::runtime_error);
      exercised_no = true;
    }
  }
  CHECK(exercised_yes);
  CHECK(exercised_no);
}

TEST_CASE("the oracle decoder reproduces every witness") {
  TupleFixture fx(4, 87);
  OracleSelfReductionDecoder oracle(fx.params);
  CHECK(oracle.predict(fx.blocks) == fx.truths);
  CHECK(oracle.name() == "oracle-sr");
  // The digest pins the ensemble parameters.
  EnsembleParams other = fx.params;
  other.alpha = 4.2;
  OracleSelfReductionDecoder oracle_other(other);
  CHECK(oracle.param_digest() != oracle_other.param_digest());
  CHECK(ensemble_params_digest(fx.params) != ensemble_params_digest(other));
}

TEST_CASE("the registry keys on name and parameter digest") {
  DecoderRegistry registry;
  auto zero = std::make_shared<ConstantZeroDecoder>();
  auto rule = std::make_shared<LocalRuleDecoder>(SilsSpec{});
  registry.add(zero);
  registry.add(rule);
  CHECK(registry.size() == 2);
  registry.add(zero);  // same key overwrites, no duplicate entry
  CHECK(registry.size() == 2);
  CHECK(registry.find("const0", zero->param_digest()).name() == "const0");
  CHECK(registry.find("xor-rule", rule->param_digest()).name() == "xor-rule");
  CHECK_THROWS_AS(registry.find("const0", zero->param_digest() + 1),
                  ConfigError);
  CHECK_THROWS_AS(registry.find("nonesuch", 0), ConfigError);
}

TEST_CASE("a single zero flip makes symmetrization the identity wrapper") {
  TupleFixture fx(4, 88);
  auto inner = std::make_shared<LocalRuleDecoder>(SilsSpec{});
  SymmetrizedDecoder sym(inner, {BitVector(fx.params.m)},
                         BackmapMode::Coordinate);
  CHECK(sym.predict(fx.blocks) == inner->predict(fx.blocks));
  CHECK(sym.name() == "sym.xor-rule");
  CHECK(sym.flips().size() == 1);
}

TEST_CASE("explicit flip lists produce hand-checkable majorities") {
  TupleFixture fx(3, 89);
  auto zero = std::make_shared<ConstantZeroDecoder>();
  Rng rng(90, 0);
  BitVector sigma(fx.params.m);
  for (size_t i = 0; i < sigma.size(); ++i) sigma.set(i, rng.next_bit());

  // const0 predicts zero on the flipped copy; the coordinate backmap turns
  // that into sigma itself. Two of three runs use sigma, so the majority is
  // sigma; with one run it loses the vote and the output is zero.
  SymmetrizedDecoder two_of_three(zero, {sigma, sigma, BitVector(fx.params.m)},
                                  BackmapMode::Coordinate);
  for (const BitVector& pred : two_of_three.predict(fx.blocks)) {
    CHECK(pred == sigma);
  }
  SymmetrizedDecoder one_of_three(zero, {sigma, BitVector(fx.params.m),
                                         BitVector(fx.params.m)},
                                  BackmapMode::Coordinate);
  for (const BitVector& pred : one_of_three.predict(fx.blocks)) {
    CHECK(pred.weight() == 0);
  }

  // The label-side convention toggles by <a_i, A sigma> instead.
  SymmetrizedDecoder label_mode(zero, {sigma, sigma, BitVector(fx.params.m)},
                                BackmapMode::VvLabel);
  std::vector<BitVector> preds = label_mode.predict(fx.blocks);
  for (size_t j = 0; j < fx.blocks.size(); ++j) {
    BitVector shift = fx.blocks[j].vv.a.mul(sigma);
    for (size_t i = 0; i < fx.params.m; ++i) {
      CHECK(preds[j].get(i) == dot(fx.blocks[j].vv.a.column(i), shift));
    }
  }

  CHECK_THROWS_AS(SymmetrizedDecoder(zero, {sigma, sigma},
                                     BackmapMode::Coordinate),
                  ConfigError);
  CHECK_THROWS_AS(
      SymmetrizedDecoder(zero, std::vector<BitVector>{}, BackmapMode::Coordinate),
      ConfigError);
}

TEST_CASE("wrapper flip lists are seeded, sized, and replayable") {
  std::vector<BitVector> flips = draw_wrapper_flips(16, 7, 12, 5);
  REQUIRE(flips.size() == 7);
  for (const BitVector& f : flips) CHECK(f.size() == 16);
  CHECK(draw_wrapper_flips(16, 7, 12, 5) == flips);
  CHECK(draw_wrapper_flips(16, 7, 12, 6) != flips);

  CHECK(SymWrapParams::auto_s(16, 100) == 213);   // ceil(20 log2 1600), odd
  CHECK(SymWrapParams::auto_kappa(16, 100) == 128);
  CHECK(SymWrapParams::auto_s(4, 4) == 81);       // even ceiling bumped to odd
  CHECK(SymWrapParams::auto_kappa(4, 4) == 48);

  SymWrapParams p;
  p.s = 5;
  CHECK(p.resolve_s(16, 10) == 5);
  p.s = 6;
  CHECK_THROWS_AS(p.resolve_s(16, 10), ConfigError);
  p.s = 0;
  CHECK(p.resolve_s(16, 10) == SymWrapParams::auto_s(16, 10));
  p.kappa = 9;
  CHECK(p.resolve_kappa(16, 10) == 9);
}

TEST_CASE("the symmetrized decoder carries its seed and inner identity") {
  TupleFixture fx(3, 91);
  auto inner = std::make_shared<ConstantZeroDecoder>();
  SymWrapParams params;
  params.s = 5;
  params.kappa = 8;
  params.seed = 0xABCD;
  SymmetrizedDecoder sym(inner, fx.params.m, fx.blocks.size(), params);
  CHECK(sym.flips().size() == 5);
  std::vector<uint8_t> blob = sym.seed_blob();
  REQUIRE(blob.size() == 8);
  CHECK(blob[0] == 0xCD);
  CHECK(blob[1] == 0xAB);
  DescriptionLedger ledger = sym.description_length();
  CHECK(ledger.identity_bits == identity_wire_bits("sym.const0") +
                                    identity_wire_bits("const0"));
  CHECK(ledger.seed_bits == seed_wire_bits(8) + seed_wire_bits(0));
  // Different wrapper seeds are distinct identities.
  params.seed = 0xABCE;
  SymmetrizedDecoder sym2(inner, fx.params.m, fx.blocks.size(), params);
  CHECK(sym2.param_digest() != sym.param_digest());
}

TEST_CASE("train/test splits partition the tuple deterministically") {
  ErmSplit split = ErmSplit::draw(20, 0.5, 3);
  CHECK(split.train.size() == 10);
  CHECK(split.test.size() == 10);
  std::set<uint32_t> seen(split.train.begin(), split.train.end());
  seen.insert(split.test.begin(), split.test.end());
  CHECK(seen.size() == 20);
  CHECK(*seen.rbegin() == 19);
  CHECK(std::is_sorted(split.train.begin(), split.train.end()));
  CHECK(std::is_sorted(split.test.begin(), split.test.end()));

  ErmSplit replay = ErmSplit::draw(20, 0.5, 3);
  CHECK(replay.train == split.train);
  ErmSplit other = ErmSplit::draw(20, 0.5, 4);
  CHECK(other.train != split.train);

  // The split never starves either side.
  ErmSplit tiny = ErmSplit::draw(5, 0.01, 1);
  CHECK(tiny.train.size() == 1);
  ErmSplit fat = ErmSplit::draw(5, 0.999, 1);
  CHECK(fat.train.size() == 4);
  CHECK_THROWS_AS(ErmSplit::draw(5, 0.0, 1), ConfigError);
  CHECK_THROWS_AS(ErmSplit::draw(5, 1.0, 1), ConfigError);
}

TEST_CASE("the distillation wrapper trains on one half and applies the table") {
  TupleFixture fx(6, 92);
  auto inner = std::make_shared<LocalRuleDecoder>(SilsSpec{});
  ErmParams params;
  params.train_fraction = 0.5;
  params.split_seed = 11;
  params.sym.s = 3;
  params.sym.kappa = 8;
  ErmDecoder erm(inner, params);
  CHECK(erm.name() == "erm.xor-rule");

  ErmSplit split = erm.split_for(6);
  std::vector<BitVector> preds = erm.predict(fx.blocks);

  // Training blocks pass through the inner decoder unchanged.
  std::vector<Instance> train_blocks;
  for (uint32_t j : split.train) train_blocks.push_back(fx.blocks[j]);
  std::vector<BitVector> inner_preds = inner->predict(train_blocks);
  for (size_t jt = 0; jt < split.train.size(); ++jt) {
    CHECK(preds[split.train[jt]] == inner_preds[jt]);
  }

  // Test blocks read the plug-in table fitted on the training half.
  PlugInTable table = erm.train_table(fx.blocks, split);
  for (uint32_t j : split.test) {
    SilsVector z = extract_sils(fx.blocks[j].cnf, params.sils);
    for (size_t i = 0; i < fx.params.m; ++i) {
      CHECK(preds[j].get(i) ==
            table.predict(i, local_input(fx.blocks[j], z, i).pack_key()));
    }
  }

  std::vector<uint8_t> blob = erm.seed_blob();
  REQUIRE(blob.size() == 16);
  CHECK(blob[0] == 11);

  std::vector<Instance> single{fx.blocks[0]};
  CHECK_THROWS_AS(erm.predict(single), std::invalid_argument);
}
