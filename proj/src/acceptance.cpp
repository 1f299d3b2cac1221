#include "lab/acceptance.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <iomanip>
#include <map>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "lab/codec.hpp"
#include "lab/common.hpp"
#include "lab/experiments.hpp"
#include "lab/parallel.hpp"
#include "lab/report.hpp"
#include "lab/symmetry.hpp"
#include "lab/wrappers.hpp"

namespace lab {
namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

LabConfig base_config(uint64_t seed, uint32_t workers) {
  LabConfig cfg;
  cfg.seed = seed;
  cfg.workers = workers;
  return cfg;
}

std::string failed_assertions(const Report& rep) {
  std::string out;
  for (const Assertion& a : rep.assertions) {
    if (a.pass) continue;
    if (!out.empty()) out += ", ";
    out += a.name + " (" + a.detail + ")";
  }
  return out;
}

Outcome from_report(const Report& rep, const std::string& ok_detail) {
  if (rep.pass()) return {true, ok_detail};
  return {false, "failed: " + failed_assertions(rep)};
}

// 1. Per-coordinate involutions: self-inverse, witness toggles one bit, and
// uniqueness survives an independent recount.
Outcome criterion_involutions(uint64_t seed, uint32_t workers) {
  EnsembleParams p;
  p.m = 16;
  p.alpha = 4.2;
  const size_t n = 10000;
  uint64_t s = experiment_seed(seed, "acceptance-involutions");
  std::vector<uint8_t> ok(n, 0);
  parallel_for(n, workers, [&](size_t i) {
    Rng rng(s, i);
    BlockSample bs = sample_block(p, rng);
    size_t bit = i % p.m;
    Instance t1 = involution_ti(bs.inst, bit);
    Instance t2 = involution_ti(t1, bit);
    BitVector expected = bs.witness;
    expected.flip(bit);
    bool good = t2 == bs.inst;
    good = good && t1.witness.has_value() && *t1.witness == expected;
    good = good && t1.witness_checks_out();
    CountResult rc = count_solutions_capped(t1, 2, p);
    good = good && !rc.capped && rc.count == 1 && rc.unique_solution &&
           *rc.unique_solution == expected;
    ok[i] = good;
  });
  size_t good = std::count(ok.begin(), ok.end(), uint8_t{1});
  std::ostringstream os;
  os << good << "/" << n << " blocks exact at m=" << p.m;
  return {good == n, os.str()};
}

// 2. Random parity layers isolate a unique solution at the documented rate.
Outcome criterion_isolation(uint64_t seed, uint32_t workers) {
  LabConfig cfg = base_config(seed, workers);
  cfg.ensemble.m = 14;
  // Masked formulas keep one polarity per variable, so their solution counts
  // concentrate around a density-dependent value; alpha=10 at m=14 puts the
  // exhaustive count inside [2, 1024] for essentially every sample.
  cfg.ensemble.alpha = 10.0;
  cfg.tuples = 50;
  cfg.trials = 10000;
  Report rep = run_isolate(cfg);
  std::ostringstream os;
  os << "min rate " << std::setprecision(4)
     << rep.body["min_rate"].get<double>() << ", mean "
     << rep.body["mean_rate"].get<double>() << " over 50 formulas";
  Outcome out = from_report(rep, os.str());
  return out;
}

// 3. Witness bits stay unbiased inside every populated sketch bucket; the
// sign-sensitive control view breaks the same band.
Outcome criterion_neutrality(uint64_t seed, uint32_t workers) {
  LabConfig cfg = base_config(seed, workers);
  cfg.ensemble.m = 16;
  cfg.trials = 100000;
  Report rep = run_neutrality(cfg);
  std::ostringstream os;
  os << rep.body["buckets_tested"].get<uint64_t>()
     << " buckets tested, worst dev/band "
     << std::setprecision(3)
     << rep.body["bucket_worst_dev_over_band"].get<double>();
  return from_report(rep, os.str());
}

// 4. The sketch is constant on mask orbits and fits the length budget.
Outcome criterion_sils_invariance(uint64_t seed, uint32_t workers) {
  const size_t n = 1000;
  const uint32_t widths[4] = {8, 12, 16, 32};
  SilsSpec spec;
  uint64_t s = experiment_seed(seed, "acceptance-sils");
  std::vector<uint8_t> ok(n, 0);
  parallel_for(n, workers, [&](size_t q) {
    Rng rng(s, q);
    EnsembleParams p;
    p.m = widths[q % 4];
    Cnf base = sample_base_cnf(p, rng);
    Mask h = Mask::random(p.m, rng);
    Mask g = Mask::random(p.m, rng);
    SignedCnf fh = apply_mask(base, h);
    SignedCnf fgh = apply_mask_signed(fh, g);
    SilsVector z1 = extract_sils(fh, spec);
    SilsVector z2 = extract_sils(fgh, spec);
    bool good = z1 == z2;
    good = good && double(z1.bits.size()) <=
                       spec.c_z * std::log2(double(p.m)) + 1e-9;
    ok[q] = good;
  });
  size_t good = std::count(ok.begin(), ok.end(), uint8_t{1});
  std::ostringstream os;
  os << good << "/" << n << " mask triples leave the sketch unchanged";
  return {good == n, os.str()};
}

// 5. Averaging over hardwired sign flips preserves success rates in paired
// Monte Carlo comparison.
Outcome criterion_switch(uint64_t seed, uint32_t workers) {
  LabConfig cfg = base_config(seed, workers);
  cfg.ensemble.m = 12;
  cfg.trials = 10000;
  cfg.decoder = "xor-rule";
  Report rep = run_switch(cfg);
  std::ostringstream os;
  os << "pivot " << std::setprecision(4)
     << rep.body["pivot"]["base"].get<double>() << " vs comparator "
     << rep.body["pivot"]["comparator"].get<double>() << " (s="
     << rep.body["s"].get<uint64_t>() << ")";
  return from_report(rep, os.str());
}

// 6. Neighborhoods turn into trees and single charts lose mass as blocks
// widen; per-coordinate views stay balanced on the on-promise ensemble.
Outcome criterion_treelike_sparsify(uint64_t seed, uint32_t workers) {
  LabConfig tl = base_config(seed, workers);
  tl.ensemble.m = 64;
  tl.ensemble.alpha = 0.3;
  tl.ensemble.k_mode = KMode::Fixed;
  tl.ensemble.c1 = 0.5;
  tl.radius = 2;
  tl.trials = 10000;
  Report tree_rep = run_treelike(tl);

  LabConfig sp = base_config(seed, workers);
  sp.ensemble.m = 16;
  sp.radius = 2;
  sp.trials = 100000;
  Report sp_rep = run_sparsify(sp);

  bool pass = tree_rep.pass() && sp_rep.pass();
  std::ostringstream os;
  if (pass) {
    os << "tree fraction " << std::setprecision(4)
       << tree_rep.body["tree_fraction_small"].get<double>() << " -> "
       << tree_rep.body["tree_fraction_big"].get<double>()
       << ", chart mass halves, u-groups balanced";
  } else {
    os << "failed: " << failed_assertions(tree_rep)
       << failed_assertions(sp_rep);
  }
  return {pass, os.str()};
}

// 7. Codecs round-trip (randomized plus adversarial), ledgers meet the
// documented budgets, and subset ranking is exhaustively bijective.
Outcome criterion_codec(uint64_t seed, uint32_t workers) {
  LabConfig cfg = base_config(seed, workers);
  cfg.trials = 1000;
  Report rep = run_codec(cfg);
  bool pass = rep.pass();
  std::string fail_detail;
  if (!pass) fail_detail = "randomized runs: " + failed_assertions(rep);

  // Adversarial truth patterns over a fixed tuple.
  const uint32_t t = 5;
  EnsembleParams p;
  p.m = 12;
  uint64_t s = experiment_seed(seed, "acceptance-codec");
  std::vector<BlockSample> tuple = sample_tuple(t, p, s, 0);
  std::vector<Instance> insts;
  std::vector<BitVector> witnesses;
  for (const BlockSample& bs : tuple) {
    insts.push_back(bs.inst);
    witnesses.push_back(bs.witness);
  }
  LabConfig reg_cfg = base_config(seed, workers);
  reg_cfg.ensemble = p;
  DecoderRegistry reg = make_registry(reg_cfg);
  auto const0 = make_decoder("const0", reg_cfg);
  auto xorrule = make_decoder("xor-rule", reg_cfg);
  const uint32_t m = p.m;
  size_t adversarial_fail = 0;
  for (int pat = 0; pat < 20; ++pat) {
    Rng rng(s, 1000 + pat);
    std::vector<BitVector> truths(t, BitVector(m));
    for (uint32_t j = 0; j < t; ++j) {
      BitVector& x = truths[j];
      switch (pat) {
        case 0: break;                                        // all zero
        case 1: for (uint32_t b = 0; b < m; ++b) x.set(b, 1); break;
        case 2: x.set(0, 1); break;
        case 3: x.set(m - 1, 1); break;
        case 4: for (uint32_t b = 0; b < m; b += 2) x.set(b, 1); break;
        case 5: for (uint32_t b = 1; b < m; b += 2) x.set(b, 1); break;
        case 6: for (uint32_t b = 0; b < j && b < m; ++b) x.set(b, 1); break;
        case 7: if (j == 0) for (uint32_t b = 0; b < m; ++b) x.set(b, 1); break;
        case 8: if (j == t - 1) for (uint32_t b = 0; b < m; ++b) x.set(b, 1); break;
        case 9: if (j == t / 2) x.set(m / 2, 1); break;
        case 10: x = witnesses[j]; break;
        case 11: x = witnesses[j]; for (uint32_t b = 0; b < m; ++b) x.flip(b); break;
        case 12: x.set(rng.below(m), 1); break;
        case 13: for (uint32_t b = 0; b < m / 2; ++b) x.set(rng.below(m), 1); break;
        case 14: for (uint32_t b = 0; b < m; ++b) x.set(b, rng.next_bit()); break;
        case 15: if (j < t / 2) for (uint32_t b = 0; b < m; ++b) x.set(b, 1); break;
        case 16: if (j >= t / 2) for (uint32_t b = 0; b < m; ++b) x.set(b, 1); break;
        case 17: x.set(j % m, 1); break;
        case 18: x.set(m - 1 - (j % m), 1); break;
        default: {
          uint64_t w = rng.next_u64();
          for (uint32_t b = 0; b < m; ++b) x.set(b, (w >> (b % 64)) & 1);
          break;
        }
      }
    }
    const Decoder& d = pat % 2 ? *xorrule : *const0;
    try {
      auto [cw_c, lg_c] = encode_coarse(d, insts, truths);
      auto [cw_f, lg_f] = encode_fine(d, insts, truths);
      bool good = decode_coarse(cw_c, insts, reg) == truths &&
                  decode_fine(cw_f, insts, reg) == truths &&
                  lg_c.total() == cw_c.bit_count &&
                  lg_f.total() == cw_f.bit_count;
      if (!good) ++adversarial_fail;
    } catch (const std::exception&) {
      ++adversarial_fail;
    }
  }
  if (adversarial_fail) {
    pass = false;
    fail_detail += " adversarial failures: " + std::to_string(adversarial_fail);
  }

  // Exhaustive rank/unrank bijection at n=12.
  const uint32_t nn = 12;
  std::vector<std::vector<uint8_t>> seen(nn + 1);
  for (uint32_t w = 0; w <= nn; ++w)
    seen[w].assign(binomial(nn, w).low64(), 0);
  bool bijective = true;
  for (uint32_t mask = 0; mask < (1u << nn); ++mask) {
    std::vector<uint32_t> subset;
    for (uint32_t b = 0; b < nn; ++b)
      if ((mask >> b) & 1) subset.push_back(b);
    uint32_t w = uint32_t(subset.size());
    BigUint r = binomial_rank(subset);
    uint64_t idx = r.low64();
    if (r.bit_length() > 63 || idx >= seen[w].size() || seen[w][idx]) {
      bijective = false;
      break;
    }
    seen[w][idx] = 1;
    if (binomial_unrank(nn, w, r) != subset) {
      bijective = false;
      break;
    }
  }
  if (!bijective) {
    pass = false;
    fail_detail += " rank/unrank not bijective at n=12";
  }

  std::string ok_detail = "1000 randomized + 20 adversarial round-trips, "
                          "4096/4096 subsets rank-bijective";
  return {pass, pass ? ok_detail : fail_detail};
}

// 8. Witness recovery through the decider uses exactly m calls and matches
// the enumeration answer.
Outcome criterion_self_reduction(uint64_t seed, uint32_t workers) {
  EnsembleParams p;
  p.m = 16;
  const size_t n = 1000;
  uint64_t s = experiment_seed(seed, "acceptance-selfred");
  UsatDecider decider = enumeration_decider(p);
  std::vector<uint8_t> ok(n, 0);
  parallel_for(n, workers, [&](size_t i) {
    Rng rng(s, i);
    BlockSample bs = sample_block(p, rng);
    SelfReduction sr = self_reduce(bs.inst, decider);
    ok[i] = sr.witness == bs.witness && sr.decider_calls == p.m;
  });
  size_t good = std::count(ok.begin(), ok.end(), uint8_t{1});
  std::ostringstream os;
  os << good << "/" << n << " blocks recovered with exactly " << p.m
     << " decider calls";
  return {good == n, os.str()};
}

// 9. The plug-in rule tracks the Bayes rule on a synthetic task with known
// conditionals, and test predictions on ensemble data are a pure function of
// the local view.
Outcome criterion_erm(uint64_t seed, uint32_t workers) {
  // Synthetic finite alphabet with margins bounded away from 1/2.
  const int alphabet = 64;
  const size_t n_train = 100000;
  const size_t n_test = 100000;
  uint64_t s = experiment_seed(seed, "acceptance-erm");
  Rng rng(s, 0);
  std::vector<double> q(alphabet);
  std::vector<uint8_t> bayes(alphabet);
  for (int u = 0; u < alphabet; ++u) {
    double margin = 0.05 + 0.40 * double(u) / double(alphabet - 1);
    q[u] = u % 2 == 0 ? 0.5 + margin : 0.5 - margin;
    bayes[u] = q[u] > 0.5;
  }
  PlugInTable table(1);
  for (size_t i = 0; i < n_train; ++i) {
    int u = int(rng.below(alphabet));
    bool y = rng.next_double() < q[u];
    table.add_vote(0, std::string(1, char(u)), y);
  }
  size_t disagree = 0;
  for (size_t i = 0; i < n_test; ++i) {
    int u = int(rng.below(alphabet));
    if (table.predict(0, std::string(1, char(u))) != bool(bayes[u])) ++disagree;
  }
  double rate = double(disagree) / double(n_test);
  bool synth_ok = rate <= 0.01;

  // Structural check on ensemble data: test-block predictions factor through
  // (table, local view); training blocks pass through the inner decoder.
  LabConfig cfg = base_config(seed, workers);
  cfg.ensemble.m = 12;
  const uint32_t t = 12;
  std::vector<BlockSample> tuple =
      sample_tuple(t, cfg.ensemble, experiment_seed(seed, "acceptance-erm-tuple"), 0);
  std::vector<Instance> insts;
  for (const BlockSample& bs : tuple) insts.push_back(bs.inst);
  auto inner = make_decoder("xor-rule", cfg);
  ErmDecoder erm(inner, cfg.erm_params());
  std::vector<BitVector> preds = erm.predict(insts);
  ErmSplit split = erm.split_for(t);
  PlugInTable fitted = erm.train_table(insts, split);
  std::vector<BitVector> inner_preds = inner->predict(insts);
  bool structural = true;
  for (uint32_t j : split.train)
    structural = structural && preds[j] == inner_preds[j];
  for (uint32_t j : split.test) {
    SilsVector z = extract_sils(insts[j].cnf, cfg.sils);
    for (uint32_t b = 0; b < cfg.ensemble.m; ++b) {
      bool expect = fitted.predict(b, local_input(insts[j], z, b).pack_key());
      structural = structural && preds[j].get(b) == expect;
    }
  }

  std::ostringstream os;
  os << "Bayes disagreement " << std::setprecision(3) << rate * 100.0
     << "% (cap 1%), table recomputation "
     << (structural ? "matches" : "DIVERGES");
  return {synth_ok && structural, os.str()};
}

// 10. Joint success factors into per-block rates for a fixed trained decoder,
// and the description-length curves separate exact from local decoding.
Outcome criterion_product_clash(uint64_t seed, uint32_t workers) {
  LabConfig su = base_config(seed, workers);
  su.ensemble.m = 12;
  su.ensemble.c4 = 8.0 / 12.0;  // tuple length 8
  su.trials = 10000;
  su.decoder = "plugin";
  Report success_rep = run_success(su);

  LabConfig cl = base_config(seed, workers);
  cl.ensemble.m = 16;
  Report clash_rep = run_clash(cl);

  bool pass = success_rep.pass() && clash_rep.pass();
  std::ostringstream os;
  if (pass) {
    os << "joint pivot rate "
       << std::setprecision(4)
       << success_rep.body["pivot_product"]["joint"].get<double>()
       << " vs product "
       << success_rep.body["pivot_product"]["product"].get<double>()
       << "; local slope "
       << clash_rep.body["local_slope_bits_per_block"].get<double>()
       << " bits/block, oracle flat";
  } else {
    os << "failed: " << failed_assertions(success_rep)
       << failed_assertions(clash_rep);
  }
  return {pass, os.str()};
}

struct Criterion {
  const char* name;
  Outcome (*fn)(uint64_t, uint32_t);
  double time_cap_s;  // 0 = uncapped
};

const Criterion kCriteria[] = {
    {"involution-suite", criterion_involutions, 120.0},
    {"vv-isolation", criterion_isolation, 300.0},
    {"neutrality", criterion_neutrality, 600.0},
    {"sils-invariance", criterion_sils_invariance, 0.0},
    {"symmetrization-preservation", criterion_switch, 0.0},
    {"treelike-and-sparsify", criterion_treelike_sparsify, 0.0},
    {"codec-conformance", criterion_codec, 0.0},
    {"self-reduction", criterion_self_reduction, 0.0},
    {"erm-plugin", criterion_erm, 0.0},
    {"product-bound-and-clash", criterion_product_clash, 0.0},
};

}  // namespace

std::vector<CriterionResult> run_acceptance(uint64_t seed, uint32_t workers) {
  std::vector<CriterionResult> results;
  int index = 1;
  for (const Criterion& c : kCriteria) {
    CriterionResult r;
    r.index = index++;
    r.name = c.name;
    auto t0 = std::chrono::steady_clock::now();
    try {
      Outcome out = c.fn(seed, workers);
      r.pass = out.pass;
      r.detail = out.detail;
    } catch (const std::exception& e) {
      r.pass = false;
      r.detail = std::string("exception: ") + e.what();
    }
    auto t1 = std::chrono::steady_clock::now();
    r.seconds =
        std::chrono::duration_cast<std::chrono::duration<double>>(t1 - t0)
            .count();
    if (c.time_cap_s > 0.0 && r.seconds > c.time_cap_s) {
      r.pass = false;
      r.detail += " [exceeded " + std::to_string(int(c.time_cap_s)) +
                  "s time cap]";
    }
    results.push_back(std::move(r));
  }
  return results;
}

std::string format_criterion(const CriterionResult& r) {
  std::ostringstream os;
  os << "criterion " << std::setw(2) << std::setfill('0') << r.index
     << std::setfill(' ') << "  " << std::left << std::setw(30) << r.name
     << (r.pass ? "PASS" : "FAIL") << std::right << std::setw(9)
     << std::fixed << std::setprecision(1) << r.seconds << "s  " << r.detail;
  return os.str();
}

}  // namespace lab
