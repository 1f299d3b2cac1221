#include "lab/experiments.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <map>
#include <memory>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "lab/codec.hpp"
#include "lab/common.hpp"
#include "lab/locality.hpp"
#include "lab/parallel.hpp"
#include "lab/symmetry.hpp"
#include "lab/wrappers.hpp"

namespace lab {
namespace {

using nlohmann::json;

std::string fm(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

std::string hex_key(const std::string& raw) {
  static const char* digits = "0123456789abcdef";
  std::string out;
  out.reserve(raw.size() * 2);
  for (unsigned char c : raw) {
    out.push_back(digits[c >> 4]);
    out.push_back(digits[c & 15]);
  }
  return out;
}

double band4(double n) { return n > 0 ? 4.0 / std::sqrt(n) : 0.0; }

struct RunningStat {
  uint64_t n = 0;
  double sum = 0.0;
  double sumsq = 0.0;

  void add(double x) {
    ++n;
    sum += x;
    sumsq += x * x;
  }
  double mean() const { return n ? sum / double(n) : 0.0; }
  double variance() const {
    if (n < 2) return 0.0;
    double mu = mean();
    double v = (sumsq - double(n) * mu * mu) / double(n - 1);
    return v > 0.0 ? v : 0.0;
  }
  double sd() const { return std::sqrt(variance()); }
  double sem() const { return n ? sd() / std::sqrt(double(n)) : 0.0; }
};

// Pearson chi-square of a 2x2 contingency table (1 degree of freedom).
// Returns -1 when any expected cell falls below `min_expected` (test invalid).
double chi2_2x2(const std::array<std::array<uint64_t, 2>, 2>& c,
                double min_expected = 5.0) {
  double n = double(c[0][0] + c[0][1] + c[1][0] + c[1][1]);
  if (n <= 0) return -1.0;
  double r0 = double(c[0][0] + c[0][1]);
  double r1 = double(c[1][0] + c[1][1]);
  double k0 = double(c[0][0] + c[1][0]);
  double k1 = double(c[0][1] + c[1][1]);
  double stat = 0.0;
  const double rows[2] = {r0, r1};
  const double cols[2] = {k0, k1};
  for (int a = 0; a < 2; ++a) {
    for (int b = 0; b < 2; ++b) {
      double e = rows[a] * cols[b] / n;
      if (e < min_expected) return -1.0;
      double d = double(c[a][b]) - e;
      stat += d * d / e;
    }
  }
  return stat;
}

Report base_report(const char* name, const LabConfig& cfg) {
  cfg.ensemble.validate();
  cfg.sils.validate();
  Report rep;
  rep.subcommand = name;
  rep.config = cfg.to_json();
  return rep;
}

uint32_t draw_k(const EnsembleParams& p, Rng& rng) {
  if (p.k_mode == KMode::Fixed) return p.fixed_k();
  return static_cast<uint32_t>(rng.below(p.m));
}

// Single-bit group tally keyed by an opaque string.
struct Tally {
  uint64_t n = 0;
  uint64_t ones = 0;
  double rate() const { return n ? double(ones) / double(n) : 0.0; }
};

struct BalanceScan {
  uint64_t groups = 0;
  uint64_t groups_tested = 0;
  uint64_t samples_tested = 0;
  uint64_t total_samples = 0;
  uint64_t violations = 0;
  double worst_ratio = 0.0;  // |rate - 1/2| / band over tested groups
  json flagged = json::array();

  void feed(const std::string& display_key, uint64_t n, uint64_t ones,
            uint64_t threshold) {
    ++groups;
    total_samples += n;
    if (n < threshold) return;
    ++groups_tested;
    samples_tested += n;
    double rate = double(ones) / double(n);
    double dev = std::abs(rate - 0.5);
    double band = band4(double(n));
    double ratio = band > 0 ? dev / band : 0.0;
    worst_ratio = std::max(worst_ratio, ratio);
    if (dev > band) {
      ++violations;
      if (flagged.size() < 32) {
        flagged.push_back(
            {{"key", display_key}, {"n", n}, {"rate", rate}, {"band", band}});
      }
    }
  }

  void scan(const std::map<std::string, Tally>& groups_map, uint64_t threshold) {
    for (const auto& [key, tl] : groups_map)
      feed(hex_key(key), tl.n, tl.ones, threshold);
  }

  json to_json(uint64_t threshold) const {
    return json{{"groups", groups},
                {"groups_tested", groups_tested},
                {"samples_tested", samples_tested},
                {"total_samples", total_samples},
                {"threshold", threshold},
                {"violations", violations},
                {"worst_dev_over_band", worst_ratio},
                {"flagged", flagged}};
  }
};

json ledger_json(const DescriptionLedger& lg) {
  return json{{"identity_bits", lg.identity_bits},
              {"control_bits", lg.control_bits},
              {"seed_bits", lg.seed_bits},
              {"payload_bits", lg.payload_bits},
              {"total_bits", lg.total()},
              {"content_bits", lg.content_bits()}};
}

json curve_json(const UnionBoundCurve& c) {
  json rows = json::array();
  for (const auto& r : c.rows)
    rows.push_back({{"t", r.t}, {"exponent", r.exponent}});
  return json{{"delta", c.delta},       {"gamma", c.gamma},
              {"eps_hat", c.eps_hat},   {"eta", c.eta},
              {"lambda", c.lambda},     {"admissible", c.admissible},
              {"rows", rows}};
}

uint32_t ceil_log2_u64(uint64_t v) {
  uint32_t r = 0;
  while ((uint64_t{1} << r) < v) ++r;
  return r;
}

// Documented slack allowance for the wire headers of both codecs:
// 64 bits plus twice the block-count logarithm.
uint64_t header_allowance(uint64_t t) { return 64 + 2 * ceil_log2_u64(t + 1); }

double h2(double x) {
  if (x <= 0.0 || x >= 1.0) return 0.0;
  return -x * std::log2(x) - (1.0 - x) * std::log2(1.0 - x);
}

}  // namespace

PlugInTable train_plugin_table(const EnsembleParams& params,
                               const SilsSpec& sils, size_t n_blocks,
                               uint64_t seed, uint32_t workers) {
  struct Row {
    std::vector<std::string> keys;
    BitVector witness;
  };
  std::vector<Row> rows(n_blocks);
  parallel_for(n_blocks, workers, [&](size_t i) {
    Rng rng(seed, i);
    BlockSample bs = sample_block(params, rng);
    SilsVector z = extract_sils(bs.inst.cnf, sils);
    Row row;
    row.witness = bs.witness;
    row.keys.reserve(params.m);
    for (size_t b = 0; b < params.m; ++b)
      row.keys.push_back(local_input(bs.inst, z, b).pack_key());
    rows[i] = std::move(row);
  });
  PlugInTable table(params.m);
  for (const Row& row : rows)
    for (size_t b = 0; b < row.keys.size(); ++b)
      table.add_vote(b, row.keys[b], row.witness.get(b));
  return table;
}

std::shared_ptr<const Decoder> make_decoder(const std::string& name,
                                            const LabConfig& cfg,
                                            size_t plugin_train_blocks) {
  if (name == "const0") return std::make_shared<ConstantZeroDecoder>();
  if (name == "xor-rule") return std::make_shared<LocalRuleDecoder>(cfg.sils);
  if (name == "sils-rule")
    return std::make_shared<SilsTableDecoder>(
        cfg.sils, std::map<std::string, uint8_t>{}, 0);
  if (name == "oracle-sr")
    return std::make_shared<OracleSelfReductionDecoder>(cfg.ensemble);
  if (name == "plugin") {
    PlugInTable table = train_plugin_table(
        cfg.ensemble, cfg.sils, plugin_train_blocks,
        experiment_seed(cfg.seed, "plugin-train"), cfg.workers);
    return std::make_shared<PlugInDecoder>(cfg.sils, std::move(table));
  }
  throw ConfigError("decoder: unknown name '" + name + "'");
}

DecoderRegistry make_registry(const LabConfig& cfg) {
  DecoderRegistry reg;
  reg.add(std::make_shared<ConstantZeroDecoder>());
  reg.add(std::make_shared<LocalRuleDecoder>(cfg.sils));
  reg.add(std::make_shared<SilsTableDecoder>(
      cfg.sils, std::map<std::string, uint8_t>{}, 0));
  reg.add(std::make_shared<OracleSelfReductionDecoder>(cfg.ensemble));
  return reg;
}

// ---------------------------------------------------------------------------
// sample: draw a tuple of on-promise blocks and audit them.

Report run_sample(const LabConfig& cfg) {
  Report rep = base_report("sample", cfg);
  const EnsembleParams& p = cfg.ensemble;
  size_t n = cfg.trials ? cfg.trials : p.tuple_len();
  uint64_t seed = experiment_seed(cfg.seed, "sample");

  std::vector<BlockSample> blocks(n);
  parallel_for(n, cfg.workers, [&](size_t i) {
    Rng rng(seed, i);
    blocks[i] = sample_block(p, rng);
  });

  RunningStat trials, weight, kstat;
  bool all_valid = true;
  bool all_unique = true;
  bool all_roundtrip = true;
  json rows = json::array();
  for (size_t i = 0; i < n; ++i) {
    const BlockSample& bs = blocks[i];
    bool valid = bs.inst.witness_checks_out();
    CountResult rc = count_solutions_capped(bs.inst, 2, p);
    bool unique = !rc.capped && rc.count == 1 && rc.unique_solution &&
                  *rc.unique_solution == bs.witness;
    Instance back = deserialize_instance(serialize_instance(bs.inst));
    bool roundtrip = back == bs.inst;
    all_valid = all_valid && valid;
    all_unique = all_unique && unique;
    all_roundtrip = all_roundtrip && roundtrip;
    trials.add(double(bs.trials));
    weight.add(double(bs.witness.weight()));
    kstat.add(double(bs.inst.vv.k));
    if (rows.size() < 32) {
      rows.push_back({{"index", i},
                      {"trials", bs.trials},
                      {"k", bs.inst.vv.k},
                      {"witness_weight", bs.witness.weight()},
                      {"clauses", bs.inst.cnf.clauses.size()}});
    }
  }

  rep.body["blocks"] = n;
  rep.body["mean_trials"] = trials.mean();
  rep.body["mean_witness_weight"] = weight.mean();
  rep.body["mean_k"] = kstat.mean();
  rep.body["rows"] = rows;
  rep.body["first_block_dimacs"] = to_dimacs(blocks[0].inst);
  rep.body["first_block_bytes"] = serialize_instance(blocks[0].inst).size();

  rep.add("witness-valid", all_valid, "every cached witness satisfies both layers");
  rep.add("unique-on-recount", all_unique,
          "independent recount finds exactly the cached witness");
  rep.add("serialize-roundtrip", all_roundtrip,
          "binary instance records round-trip bit-exactly");
  return rep;
}

// ---------------------------------------------------------------------------
// neutrality: witness bits are conditionally unbiased given the sketch.

Report run_neutrality(const LabConfig& cfg) {
  Report rep = base_report("neutrality", cfg);
  const EnsembleParams& p = cfg.ensemble;
  const uint32_t m = p.m;
  size_t n = cfg.trials ? cfg.trials : 100000;
  const uint64_t threshold = 200;
  uint64_t seed = experiment_seed(cfg.seed, "neutrality");

  struct Row {
    BitVector x;
    std::string z_key;
    std::vector<int8_t> d;  // clipped net literal polarity per variable
  };
  std::vector<Row> rows(n);
  parallel_for(n, cfg.workers, [&](size_t i) {
    Rng rng(seed, i);
    BlockSample bs = sample_block(p, rng);
    Row row;
    row.x = bs.witness;
    row.z_key = extract_sils(bs.inst.cnf, cfg.sils).pack_key();
    std::vector<int> net(m, 0);
    for (const auto& cl : bs.inst.cnf.clauses)
      for (const SignedLit& lit : cl) net[lit.var] += lit.neg ? -1 : 1;
    row.d.resize(m);
    for (uint32_t v = 0; v < m; ++v)
      row.d[v] = static_cast<int8_t>(std::clamp(net[v], -6, 6));
    rows[i] = std::move(row);
  });

  struct Cell {
    uint64_t n = 0;
    std::vector<uint64_t> ones;
  };
  std::vector<uint64_t> marginal_ones(m, 0);
  std::map<std::string, Cell> buckets;
  std::map<int, Tally> sign_view;
  for (const Row& row : rows) {
    Cell& cell = buckets[row.z_key];
    if (cell.ones.empty()) cell.ones.assign(m, 0);
    ++cell.n;
    for (uint32_t i = 0; i < m; ++i) {
      bool one = row.x.get(i);
      marginal_ones[i] += one;
      cell.ones[i] += one;
      Tally& tl = sign_view[row.d[i]];
      ++tl.n;
      tl.ones += one;
    }
  }

  // Unconditioned marginals.
  double marg_band = band4(double(n));
  double marg_worst = 0.0;
  json marginals = json::array();
  for (uint32_t i = 0; i < m; ++i) {
    double rate = double(marginal_ones[i]) / double(n);
    marg_worst = std::max(marg_worst, std::abs(rate - 0.5));
    marginals.push_back(rate);
  }

  // Sketch buckets, every bit checked in every bucket above threshold.
  uint64_t tested = 0, violations = 0, tested_samples = 0;
  double worst_ratio = 0.0;
  json flagged = json::array();
  std::vector<std::pair<uint64_t, std::string>> by_size;
  for (const auto& [key, cell] : buckets) {
    by_size.push_back({cell.n, key});
    if (cell.n < threshold) continue;
    ++tested;
    tested_samples += cell.n;
    double band = band4(double(cell.n));
    for (uint32_t i = 0; i < m; ++i) {
      double rate = double(cell.ones[i]) / double(cell.n);
      double dev = std::abs(rate - 0.5);
      worst_ratio = std::max(worst_ratio, dev / band);
      if (dev > band) {
        ++violations;
        if (flagged.size() < 32)
          flagged.push_back({{"key", hex_key(key)},
                             {"bit", i},
                             {"n", cell.n},
                             {"rate", rate},
                             {"band", band}});
      }
    }
  }
  std::sort(by_size.begin(), by_size.end(),
            [](const auto& a, const auto& b) {
              return a.first != b.first ? a.first > b.first : a.second < b.second;
            });
  json top_buckets = json::array();
  for (size_t q = 0; q < by_size.size() && q < 16; ++q)
    top_buckets.push_back(
        {{"key", hex_key(by_size[q].second)}, {"n", by_size[q].first}});

  // Negative control: bucket the same bits by the clipped net polarity of
  // their variable, a sign-sensitive view that must break the balance.
  uint64_t control_hits = 0;
  json control_rows = json::array();
  for (const auto& [d, tl] : sign_view) {
    bool testable = tl.n >= threshold;
    double band = band4(double(tl.n));
    double dev = std::abs(tl.rate() - 0.5);
    bool violates = testable && dev > band;
    if (violates) ++control_hits;
    control_rows.push_back({{"net_polarity", d},
                            {"n", tl.n},
                            {"rate", tl.rate()},
                            {"band", band},
                            {"violates", violates}});
  }

  rep.body["blocks"] = n;
  rep.body["marginal_rates"] = marginals;
  rep.body["marginal_band"] = marg_band;
  rep.body["marginal_worst_dev"] = marg_worst;
  rep.body["bucket_count"] = buckets.size();
  rep.body["buckets_tested"] = tested;
  rep.body["bucket_threshold"] = threshold;
  rep.body["bucket_samples_tested"] = tested_samples;
  rep.body["bucket_violations"] = violations;
  rep.body["bucket_worst_dev_over_band"] = worst_ratio;
  rep.body["bucket_flagged"] = flagged;
  rep.body["top_buckets"] = top_buckets;
  rep.body["sign_view"] = control_rows;

  rep.add("marginals-in-band", marg_worst <= marg_band,
          "worst " + fm(marg_worst) + " vs band " + fm(marg_band));
  rep.add("sketch-buckets-in-band", violations == 0,
          std::to_string(tested) + " buckets tested, " +
              std::to_string(violations) + " violations, worst dev/band " +
              fm(worst_ratio));
  rep.add("sign-view-breaks-balance", control_hits > 0,
          std::to_string(control_hits) +
              " polarity buckets outside the band (expected > 0)");
  return rep;
}

// ---------------------------------------------------------------------------
// sparsify: the per-coordinate view (z, a_i, b) splits the population into
// groups that stay balanced, while charts index the same data geometrically.

Report run_sparsify(const LabConfig& cfg) {
  Report rep = base_report("sparsify", cfg);
  const EnsembleParams& p = cfg.ensemble;
  const uint32_t m = p.m;
  size_t n = cfg.trials ? cfg.trials : 100000;
  const uint64_t threshold = 500;
  uint32_t radius = cfg.resolved_radius();
  uint64_t seed = experiment_seed(cfg.seed, "sparsify");

  // Every position of every block contributes one sample.  The packed group
  // keys are folded through a 64-bit hash so aggregation memory stays flat;
  // collisions are negligible at this scale.
  struct Row {
    std::vector<uint64_t> u_hash;      // one per position
    std::vector<uint64_t> chart_hash;  // one per position
    uint32_t trees = 0;
    BitVector x;
  };
  std::vector<Row> rows(n);
  parallel_for(n, cfg.workers, [&](size_t i) {
    Rng rng(seed, i);
    BlockSample bs = sample_block(p, rng);
    SilsVector z = extract_sils(bs.inst.cnf, cfg.sils);
    FactorGraph g = build_factor_graph(bs.inst.cnf);
    Row row;
    row.u_hash.resize(m);
    row.chart_hash.resize(m);
    row.x = bs.witness;
    for (uint32_t v = 0; v < m; ++v) {
      row.u_hash[v] = fnv1a(local_input(bs.inst, z, v).pack_key());
      SignedRootedPattern pat = extract_neighborhood(g, v, radius);
      ChartKey chart{canonical_code(pat), bs.inst.vv.a.column(v),
                     bs.inst.vv.b};
      row.chart_hash[v] = fnv1a(chart.pack_key());
      row.trees += pat.is_tree;
    }
    rows[i] = std::move(row);
  });

  std::vector<std::pair<uint64_t, uint8_t>> u_samples;
  std::vector<uint64_t> chart_samples;
  u_samples.reserve(n * size_t(m));
  chart_samples.reserve(n * size_t(m));
  uint64_t tree_count = 0;
  for (const Row& row : rows) {
    for (uint32_t v = 0; v < m; ++v) {
      u_samples.emplace_back(row.u_hash[v], uint8_t(row.x.get(v)));
      chart_samples.push_back(row.chart_hash[v]);
    }
    tree_count += row.trees;
  }
  std::sort(u_samples.begin(), u_samples.end());
  std::sort(chart_samples.begin(), chart_samples.end());

  BalanceScan scan;
  for (size_t lo = 0; lo < u_samples.size();) {
    size_t hi = lo;
    uint64_t ones = 0;
    while (hi < u_samples.size() && u_samples[hi].first == u_samples[lo].first)
      ones += u_samples[hi++].second;
    std::ostringstream key;
    key << std::hex << std::setw(16) << std::setfill('0')
        << u_samples[lo].first;
    scan.feed(key.str(), hi - lo, ones, threshold);
    lo = hi;
  }

  uint64_t chart_count = 0, chart_max = 0;
  std::vector<uint64_t> chart_sizes;
  for (size_t lo = 0; lo < chart_samples.size();) {
    size_t hi = lo;
    while (hi < chart_samples.size() &&
           chart_samples[hi] == chart_samples[lo])
      ++hi;
    ++chart_count;
    chart_max = std::max(chart_max, uint64_t(hi - lo));
    chart_sizes.push_back(hi - lo);
    lo = hi;
  }
  std::sort(chart_sizes.rbegin(), chart_sizes.rend());
  json top_charts = json::array();
  for (size_t q = 0; q < chart_sizes.size() && q < 16; ++q)
    top_charts.push_back(chart_sizes[q]);

  double total = double(n) * double(m);
  rep.body["blocks"] = n;
  rep.body["samples"] = n * size_t(m);
  rep.body["radius"] = radius;
  rep.body["u_groups"] = scan.to_json(threshold);
  rep.body["untested_mass"] =
      (total - double(scan.samples_tested)) / total;
  rep.body["chart_count"] = chart_count;
  rep.body["chart_max_count"] = chart_max;
  rep.body["chart_top_counts"] = top_charts;
  rep.body["tree_fraction"] = double(tree_count) / total;

  rep.add("u-groups-balanced", scan.violations == 0,
          std::to_string(scan.groups_tested) + " groups tested at n >= " +
              std::to_string(threshold) + ", " +
              std::to_string(scan.violations) + " violations, worst dev/band " +
              fm(scan.worst_ratio));
  return rep;
}

// ---------------------------------------------------------------------------
// treelike: neighborhoods become trees and single charts lose mass as the
// block width grows (the clause density and radius held fixed).

Report run_treelike(const LabConfig& cfg) {
  Report rep = base_report("treelike", cfg);
  size_t n = cfg.trials ? cfg.trials : 10000;
  uint32_t radius = cfg.resolved_radius();
  uint64_t seed = experiment_seed(cfg.seed, "treelike");

  EnsembleParams sides[2] = {cfg.ensemble, cfg.ensemble};
  sides[1].m = cfg.ensemble.m * 8;

  struct Side {
    uint64_t trees = 0;
    std::map<uint64_t, uint64_t> charts;
    RunningStat ball_nodes;
  };
  Side agg[2];
  json side_rows = json::array();

  for (int s = 0; s < 2; ++s) {
    const EnsembleParams& pp = sides[s];
    const uint32_t m = pp.m;
    struct Row {
      bool tree = false;
      uint64_t chart_hash = 0;
      uint32_t nodes = 0;
    };
    std::vector<Row> rows(n);
    parallel_for(n, cfg.workers, [&](size_t i) {
      Rng rng(seed, uint64_t(s) * n + i);
      Cnf base = sample_base_cnf(pp, rng);
      Mask h = Mask::random(m, rng);
      SignedCnf fh = apply_mask(base, h);
      size_t root = rng.below(m);
      uint32_t k = draw_k(pp, rng);
      BitMatrix a = sample_parity_matrix(k, m, rng);
      BitVector b = sample_rhs_uniform(k, rng);
      FactorGraph g = build_factor_graph(fh);
      SignedRootedPattern pat = extract_neighborhood(g, uint32_t(root), radius);
      ChartKey chart{canonical_code(pat), a.column(root), b};
      rows[i] = Row{pat.is_tree, fnv1a(chart.pack_key()),
                    uint32_t(pat.nodes.size())};
    });
    for (const Row& row : rows) {
      agg[s].trees += row.tree;
      ++agg[s].charts[row.chart_hash];
      agg[s].ball_nodes.add(double(row.nodes));
    }
    uint64_t max_count = 0;
    for (const auto& [h, c] : agg[s].charts) max_count = std::max(max_count, c);
    side_rows.push_back(
        {{"m", m},
         {"k", pp.k_mode == KMode::Fixed ? json(pp.fixed_k()) : json("uniform")},
         {"trials", n},
         {"tree_fraction", double(agg[s].trees) / double(n)},
         {"chart_count", agg[s].charts.size()},
         {"chart_max_count", max_count},
         {"chart_max_fraction", double(max_count) / double(n)},
         {"mean_ball_nodes", agg[s].ball_nodes.mean()}});
  }

  double tf_small = double(agg[0].trees) / double(n);
  double tf_big = double(agg[1].trees) / double(n);
  uint64_t max_small = 0, max_big = 0;
  for (const auto& [h, c] : agg[0].charts) max_small = std::max(max_small, c);
  for (const auto& [h, c] : agg[1].charts) max_big = std::max(max_big, c);
  double freq_small = double(max_small) / double(n);
  double freq_big = double(max_big) / double(n);

  rep.body["radius"] = radius;
  rep.body["sides"] = side_rows;
  rep.body["tree_fraction_small"] = tf_small;
  rep.body["tree_fraction_big"] = tf_big;
  rep.body["chart_max_fraction_small"] = freq_small;
  rep.body["chart_max_fraction_big"] = freq_big;

  rep.add("tree-fraction-increases", tf_big > tf_small,
          fm(tf_small) + " at m=" + std::to_string(sides[0].m) + " vs " +
              fm(tf_big) + " at m=" + std::to_string(sides[1].m));
  rep.add("chart-concentration-halves", freq_small >= 2.0 * freq_big,
          "max chart fraction " + fm(freq_small) + " vs " + fm(freq_big));
  return rep;
}

// ---------------------------------------------------------------------------
// isolate: a fresh uniform parity layer with ceil(log2 |S|) + 1 rows isolates
// a unique solution at least an eighth of the time.

Report run_isolate(const LabConfig& cfg) {
  Report rep = base_report("isolate", cfg);
  const EnsembleParams& p = cfg.ensemble;
  size_t n_formulas = cfg.tuples ? cfg.tuples : 50;
  size_t n_draws = cfg.trials ? cfg.trials : 10000;
  uint64_t seed = experiment_seed(cfg.seed, "isolate");

  struct Row {
    uint64_t solutions = 0;
    uint32_t k = 0;
    double rate = 0.0;
    double bound = 0.0;
    bool pass = false;
  };
  std::vector<Row> rows(n_formulas);
  parallel_for(n_formulas, cfg.workers, [&](size_t q) {
    Rng rng(seed, q);
    SignedCnf f;
    uint64_t n_sols = 0;
    uint32_t attempts = 0;
    // Masked formulas are unate (each variable keeps one polarity), so the
    // solution count is sharply concentrated for a given clause density; the
    // window below is only reachable when alpha is chosen to match m.  At
    // m=14, alpha in [8, 12] lands essentially every sample inside it.
    constexpr uint32_t kMaxRejects = 2000;
    for (;; ++attempts) {
      if (attempts >= kMaxRejects)
        throw BudgetError(
            "isolate: no formula with 2..1024 solutions after " +
            std::to_string(attempts) +
            " attempts; adjust alpha (solution counts are concentrated "
            "around a density-dependent value)");
      Cnf base = sample_base_cnf(p, rng);
      Mask h = Mask::random(p.m, rng);
      f = apply_mask(base, h);
      n_sols = all_solutions(f).size();
      if (n_sols >= 2 && n_sols <= 1024) break;
    }
    IsolationStats st = vv_isolation_rate(f, n_draws, rng);
    double bound =
        0.125 - 3.0 * std::sqrt(st.rate * (1.0 - st.rate) / double(n_draws));
    rows[q] = Row{st.solution_count, st.k, st.rate, bound, st.rate >= bound};
  });

  bool all_pass = true;
  double min_rate = 1.0;
  RunningStat rates;
  json out_rows = json::array();
  for (const Row& row : rows) {
    all_pass = all_pass && row.pass;
    min_rate = std::min(min_rate, row.rate);
    rates.add(row.rate);
    out_rows.push_back({{"solutions", row.solutions},
                        {"k", row.k},
                        {"rate", row.rate},
                        {"bound", row.bound},
                        {"pass", row.pass}});
  }

  rep.body["formulas"] = n_formulas;
  rep.body["draws_per_formula"] = n_draws;
  rep.body["mean_rate"] = rates.mean();
  rep.body["min_rate"] = min_rate;
  rep.body["rows"] = out_rows;

  rep.add("isolation-rate-above-eighth", all_pass,
          "min rate " + fm(min_rate) + " across " +
              std::to_string(n_formulas) + " formulas");
  return rep;
}

// ---------------------------------------------------------------------------
// switch: averaging a decoder over hardwired sign flips leaves its success
// rates unchanged, block by block, in paired comparison.

Report run_switch(const LabConfig& cfg) {
  Report rep = base_report("switch", cfg);
  const EnsembleParams& p = cfg.ensemble;
  const uint32_t m = p.m;
  size_t n = cfg.trials ? cfg.trials : 10000;
  uint64_t seed = experiment_seed(cfg.seed, "switch");

  std::shared_ptr<const Decoder> inner = make_decoder(cfg.decoder, cfg);
  uint32_t s = cfg.wrapper.resolve_s(m, n);
  uint32_t kappa = cfg.wrapper.resolve_kappa(m, n);
  std::vector<BitVector> sigmas =
      draw_wrapper_flips(m, s, kappa, cfg.wrapper.seed);

  struct Row {
    bool base_pivot = false, base_exact = false;
    bool maj_pivot = false, maj_exact = false;
    double comp_pivot = 0.0, comp_exact = 0.0;
    std::string u_key;
    uint32_t k = 0;
    bool x_pivot = false, y0_pivot = false;
  };
  std::vector<Row> rows(n);
  parallel_for(n, cfg.workers, [&](size_t i) {
    Rng rng(seed, i);
    BlockSample bs = sample_block(p, rng);
    std::vector<Instance> one{bs.inst};
    BitVector base = inner->predict(one)[0];
    auto runs = symmetrized_runs(*inner, one, sigmas, cfg.wrapper.backmap);
    Row row;
    row.base_pivot = base.get(0) == bs.witness.get(0);
    row.base_exact = base == bs.witness;
    uint64_t pivot_hits = 0, exact_hits = 0;
    std::vector<uint32_t> ones(m, 0);
    for (uint32_t r = 0; r < s; ++r) {
      const BitVector& pred = runs[r][0];
      pivot_hits += pred.get(0) == bs.witness.get(0);
      exact_hits += pred == bs.witness;
      for (uint32_t b = 0; b < m; ++b) ones[b] += pred.get(b);
    }
    row.comp_pivot = double(pivot_hits) / double(s);
    row.comp_exact = double(exact_hits) / double(s);
    BitVector maj(m);
    for (uint32_t b = 0; b < m; ++b) maj.set(b, 2 * ones[b] > s);
    row.maj_pivot = maj.get(0) == bs.witness.get(0);
    row.maj_exact = maj == bs.witness;
    SilsVector z = extract_sils(bs.inst.cnf, cfg.sils);
    row.u_key = local_input(bs.inst, z, 0).pack_key();
    row.k = bs.inst.vv.k;
    row.x_pivot = bs.witness.get(0);
    row.y0_pivot = runs[0][0].get(0);
    rows[i] = std::move(row);
  });

  RunningStat diff_pivot, diff_exact;
  RunningStat base_pivot, base_exact, comp_pivot, comp_exact, maj_pivot,
      maj_exact;
  struct JointCell {
    std::array<std::array<uint64_t, 2>, 2> c{};
    uint64_t n = 0;
  };
  std::map<std::string, JointCell> joint;
  std::map<uint32_t, JointCell> joint_by_k;
  for (const Row& row : rows) {
    diff_pivot.add(double(row.base_pivot) - row.comp_pivot);
    diff_exact.add(double(row.base_exact) - row.comp_exact);
    base_pivot.add(row.base_pivot);
    base_exact.add(row.base_exact);
    comp_pivot.add(row.comp_pivot);
    comp_exact.add(row.comp_exact);
    maj_pivot.add(row.maj_pivot);
    maj_exact.add(row.maj_exact);
    JointCell& cell = joint[row.u_key];
    ++cell.c[row.x_pivot][row.y0_pivot];
    ++cell.n;
    JointCell& kcell = joint_by_k[row.k];
    ++kcell.c[row.x_pivot][row.y0_pivot];
    ++kcell.n;
  }

  auto paired = [&](const RunningStat& d) {
    double band = 3.0 * d.sem();
    bool pass = d.n < 2 ? d.mean() == 0.0 : std::abs(d.mean()) <= band;
    return std::pair<bool, std::string>(
        pass, "mean diff " + fm(d.mean()) + " vs 3*sem " + fm(band));
  };

  // Exchangeability of (true bit, one back-mapped run) inside fixed views.
  // Exact views rarely repeat (the label part alone has ~2^(2k) values), so
  // the same counts are also pooled by parity-row count k, a coarsening that
  // inherits the pairing argument and actually populates.
  const uint64_t joint_threshold = 1000;
  uint64_t joint_tested = 0, joint_violations = 0;
  double joint_worst = 0.0;
  auto scan_joint = [&](const JointCell& cell) {
    if (cell.n < joint_threshold) return;
    ++joint_tested;
    double p11 = double(cell.c[1][1]) / double(cell.n);
    double p00 = double(cell.c[0][0]) / double(cell.n);
    double dev = std::abs(p11 - p00);
    double band = band4(double(cell.n));
    joint_worst = std::max(joint_worst, dev / band);
    if (dev > band) ++joint_violations;
  };
  for (const auto& [key, cell] : joint) scan_joint(cell);
  json k_views = json::array();
  for (const auto& [k, cell] : joint_by_k) {
    scan_joint(cell);
    k_views.push_back({{"k", k},
                       {"n", cell.n},
                       {"p11", double(cell.c[1][1]) / double(cell.n)},
                       {"p00", double(cell.c[0][0]) / double(cell.n)}});
  }

  auto pp = paired(diff_pivot);
  auto pe = paired(diff_exact);

  rep.body["blocks"] = n;
  rep.body["s"] = s;
  rep.body["kappa"] = kappa;
  rep.body["decoder"] = inner->name();
  rep.body["pivot"] = {{"base", base_pivot.mean()},
                       {"comparator", comp_pivot.mean()},
                       {"majority", maj_pivot.mean()},
                       {"paired_diff", diff_pivot.mean()},
                       {"paired_sem", diff_pivot.sem()}};
  rep.body["exact"] = {{"base", base_exact.mean()},
                       {"comparator", comp_exact.mean()},
                       {"majority", maj_exact.mean()},
                       {"paired_diff", diff_exact.mean()},
                       {"paired_sem", diff_exact.sem()}};
  rep.body["joint_views"] = {{"total", joint.size()},
                             {"tested", joint_tested},
                             {"threshold", joint_threshold},
                             {"violations", joint_violations},
                             {"worst_dev_over_band", joint_worst},
                             {"by_k", k_views}};

  rep.add("pivot-rate-preserved", pp.first, pp.second);
  rep.add("block-rate-preserved", pe.first, pe.second);
  rep.add("joint-views-exchangeable", joint_violations == 0,
          std::to_string(joint_tested) + " views tested at n >= " +
              std::to_string(joint_threshold) + ", " +
              std::to_string(joint_violations) + " violations");
  return rep;
}

// ---------------------------------------------------------------------------
// success: per-block success indicators of a fixed decoder behave like
// independent coins across a tuple — joint rates match the product of the
// marginals and pairwise tests see no dependence.

Report run_success(const LabConfig& cfg) {
  Report rep = base_report("success", cfg);
  const EnsembleParams& p = cfg.ensemble;
  const uint32_t m = p.m;
  const uint32_t t = p.tuple_len();
  size_t n_tuples = cfg.trials ? cfg.trials : 10000;
  if (t > 64) throw ConfigError("success: tuple length above 64 unsupported");
  uint64_t seed = experiment_seed(cfg.seed, "success");

  std::shared_ptr<const Decoder> dec = make_decoder(cfg.decoder, cfg);

  struct Row {
    uint64_t exact_mask = 0;
    uint64_t pivot_mask = 0;
    std::vector<uint16_t> bit_hits;  // per block, count of correct bits
  };
  std::vector<Row> rows(n_tuples);
  parallel_for(n_tuples, cfg.workers, [&](size_t q) {
    std::vector<BlockSample> tuple =
        sample_tuple(t, p, seed, uint64_t(q) * t);
    std::vector<Instance> insts;
    insts.reserve(t);
    for (const BlockSample& bs : tuple) insts.push_back(bs.inst);
    std::vector<BitVector> preds = dec->predict(insts);
    Row row;
    row.bit_hits.resize(t);
    for (uint32_t j = 0; j < t; ++j) {
      const BitVector& truth = tuple[j].witness;
      uint16_t hits = 0;
      for (uint32_t b = 0; b < m; ++b) hits += preds[j].get(b) == truth.get(b);
      row.bit_hits[j] = hits;
      if (preds[j] == truth) row.exact_mask |= uint64_t{1} << j;
      if (preds[j].get(0) == truth.get(0)) row.pivot_mask |= uint64_t{1} << j;
    }
    rows[q] = std::move(row);
  });

  const uint64_t full = t == 64 ? ~uint64_t{0} : (uint64_t{1} << t) - 1;
  std::vector<uint64_t> exact_ones(t, 0), pivot_ones(t, 0);
  uint64_t all_exact = 0, all_pivot = 0;
  bool exact_subset = true;
  RunningStat mean_bits;
  for (const Row& row : rows) {
    for (uint32_t j = 0; j < t; ++j) {
      exact_ones[j] += (row.exact_mask >> j) & 1;
      pivot_ones[j] += (row.pivot_mask >> j) & 1;
      mean_bits.add(double(row.bit_hits[j]) / double(m));
    }
    all_exact += row.exact_mask == full;
    all_pivot += row.pivot_mask == full;
    exact_subset = exact_subset && (row.exact_mask & ~row.pivot_mask) == 0;
  }

  auto product_check = [&](const std::vector<uint64_t>& ones, uint64_t joint) {
    double nn = double(n_tuples);
    double prod = 1.0;
    double var_prod_rel = 0.0;  // sum (1-p)/(p n)
    bool zero = false;
    for (uint32_t j = 0; j < t; ++j) {
      double pj = double(ones[j]) / nn;
      if (pj == 0.0) {
        zero = true;
        break;
      }
      prod *= pj;
      var_prod_rel += (1.0 - pj) / (pj * nn);
    }
    double joint_rate = double(joint) / nn;
    json out;
    bool pass;
    if (zero) {
      pass = joint == 0;
      out = {{"joint", joint_rate}, {"product", 0.0}, {"band", 0.0}};
    } else {
      double var_joint = joint_rate * (1.0 - joint_rate) / nn;
      double band = 3.0 * std::sqrt(var_joint + prod * prod * var_prod_rel);
      pass = std::abs(joint_rate - prod) <= band;
      out = {{"joint", joint_rate}, {"product", prod}, {"band", band}};
    }
    return std::pair<bool, json>(pass, out);
  };

  auto [pivot_ok, pivot_json] = product_check(pivot_ones, all_pivot);
  auto [exact_ok, exact_json] = product_check(exact_ones, all_exact);

  // Pairwise chi-square on the pivot indicators, 1 dof, alpha = 0.001.
  const double kChi2Crit1 = 10.828;
  double max_chi2 = 0.0;
  uint64_t pairs_tested = 0, pairs_skipped = 0, pairs_over = 0;
  json pair_rows = json::array();
  for (uint32_t j = 0; j < t; ++j) {
    for (uint32_t j2 = j + 1; j2 < t; ++j2) {
      std::array<std::array<uint64_t, 2>, 2> c{};
      for (const Row& row : rows)
        ++c[(row.pivot_mask >> j) & 1][(row.pivot_mask >> j2) & 1];
      double stat = chi2_2x2(c);
      if (stat < 0) {
        ++pairs_skipped;
        continue;
      }
      ++pairs_tested;
      max_chi2 = std::max(max_chi2, stat);
      if (stat > kChi2Crit1) ++pairs_over;
      if (pair_rows.size() < 64)
        pair_rows.push_back({{"j", j}, {"j2", j2}, {"chi2", stat}});
    }
  }

  json marg_rows = json::array();
  for (uint32_t j = 0; j < t; ++j)
    marg_rows.push_back({{"block", j},
                         {"pivot_rate", double(pivot_ones[j]) / double(n_tuples)},
                         {"exact_rate", double(exact_ones[j]) / double(n_tuples)}});

  double mean_pivot = 0.0;
  for (uint32_t j = 0; j < t; ++j)
    mean_pivot += double(pivot_ones[j]) / double(n_tuples);
  mean_pivot /= double(t);
  double eps_hat = cfg.union_bound.eps_hat > 0.0
                       ? cfg.union_bound.eps_hat
                       : std::clamp(mean_pivot - 0.5, 0.0, 0.499);
  UnionBoundCurve curve = union_bound_curve(
      cfg.union_bound.resolved_delta(), cfg.union_bound.gamma, eps_hat,
      cfg.union_bound.resolved_eta(), {1, 2, 4, 8, 16, 32, 64, 128, 256, 512});
  double lambda_expect = std::log2(1.0 / (0.5 + eps_hat));
  double coeff = cfg.union_bound.resolved_delta() -
                 cfg.union_bound.gamma * lambda_expect;
  bool curve_arith = true;
  for (const auto& r : curve.rows)
    curve_arith =
        curve_arith && std::abs(r.exponent - coeff * double(r.t)) <= 1e-9;

  rep.body["tuples"] = n_tuples;
  rep.body["t"] = t;
  rep.body["decoder"] = dec->name();
  rep.body["decoder_ledger"] = ledger_json(dec->description_length());
  rep.body["mean_bit_accuracy"] = mean_bits.mean();
  rep.body["marginals"] = marg_rows;
  rep.body["pivot_product"] = pivot_json;
  rep.body["exact_product"] = exact_json;
  rep.body["pairwise"] = {{"tested", pairs_tested},
                          {"skipped", pairs_skipped},
                          {"over_critical", pairs_over},
                          {"max_chi2", max_chi2},
                          {"critical", kChi2Crit1},
                          {"rows", pair_rows}};
  rep.body["union_bound"] = curve_json(curve);
  rep.body["union_bound_eps_source"] =
      cfg.union_bound.eps_hat > 0.0 ? "config" : "measured";

  rep.add("exact-implies-pivot", exact_subset,
          "block-exact success never without pivot success");
  rep.add("pivot-product-bound", pivot_ok,
          "joint " + fm(pivot_json["joint"].get<double>()) + " vs product " +
              fm(pivot_json["product"].get<double>()) + " band " +
              fm(pivot_json["band"].get<double>()));
  rep.add("exact-product-bound", exact_ok,
          "joint " + fm(exact_json["joint"].get<double>()) + " vs product " +
              fm(exact_json["product"].get<double>()));
  rep.add("pivot-pairwise-independent", pairs_over == 0,
          "max chi2 " + fm(max_chi2) + " over " +
              std::to_string(pairs_tested) + " pairs, critical " +
              fm(kChi2Crit1));
  rep.add("union-curve-consistent", curve_arith && curve.admissible,
          "exponent coefficient " + fm(coeff) + " per block, admissible=" +
              (curve.admissible ? "true" : "false"));
  return rep;
}

// ---------------------------------------------------------------------------
// codec: randomized round-trip and budget audit of both codecs.

Report run_codec(const LabConfig& cfg) {
  Report rep = base_report("codec", cfg);
  const EnsembleParams& p = cfg.ensemble;
  const uint32_t m = p.m;
  size_t n_runs = cfg.trials ? cfg.trials : 24;
  uint64_t seed = experiment_seed(cfg.seed, "codec");

  DecoderRegistry reg = make_registry(cfg);
  std::vector<std::shared_ptr<const Decoder>> decs = {
      make_decoder("const0", cfg), make_decoder("xor-rule", cfg),
      make_decoder("sils-rule", cfg), make_decoder("oracle-sr", cfg)};

  struct Row {
    uint32_t t = 0;
    std::string decoder;
    uint64_t hits = 0;
    DescriptionLedger coarse, fine;
    uint64_t coarse_rhs = 0;
    double fine_rhs = 0.0;
    bool ok = true;
  };
  std::vector<Row> rows(n_runs);
  parallel_for(n_runs, cfg.workers, [&](size_t q) {
    Rng rng(seed, q);
    uint32_t t = q == 0 ? 0 : uint32_t(1 + rng.below(8));
    std::vector<BlockSample> tuple =
        sample_tuple(t, p, seed + 1, uint64_t(q) * 64);
    std::vector<Instance> insts;
    std::vector<BitVector> truths;
    for (const BlockSample& bs : tuple) {
      insts.push_back(bs.inst);
      truths.push_back(bs.witness);
    }
    const Decoder& d = *decs[q % decs.size()];
    std::vector<BitVector> preds = d.predict(insts);
    uint64_t hits = 0;
    double fine_payload_rhs = 0.0;
    for (uint32_t j = 0; j < t; ++j) {
      uint64_t e = (preds[j] ^ truths[j]).weight();
      hits += e == 0;
      fine_payload_rhs += double(m) * h2(double(e) / double(m)) + 1.0 +
                          double(gamma0_bits(e));
    }
    auto [cw_c, lg_c] = encode_coarse(d, insts, truths);
    auto [cw_f, lg_f] = encode_fine(d, insts, truths);
    bool ok = decode_coarse(cw_c, insts, reg) == truths &&
              decode_fine(cw_f, insts, reg) == truths &&
              lg_c.total() == cw_c.bit_count && lg_f.total() == cw_f.bit_count;
    DescriptionLedger own = d.description_length();
    uint64_t coarse_rhs =
        own.total() + header_allowance(t) + (t - hits) * uint64_t(m);
    double fine_rhs = double(own.total() + header_allowance(t)) +
                      fine_payload_rhs;
    ok = ok && lg_c.total() <= coarse_rhs &&
         double(lg_f.total()) <= fine_rhs + 1e-9;
    rows[q] = Row{t, d.name(), hits, lg_c, lg_f, coarse_rhs, fine_rhs, ok};
  });

  bool all_ok = true;
  json out_rows = json::array();
  for (const Row& row : rows) {
    all_ok = all_ok && row.ok;
    out_rows.push_back({{"t", row.t},
                        {"decoder", row.decoder},
                        {"hits", row.hits},
                        {"coarse", ledger_json(row.coarse)},
                        {"coarse_budget", row.coarse_rhs},
                        {"fine", ledger_json(row.fine)},
                        {"fine_budget", row.fine_rhs},
                        {"ok", row.ok}});
  }

  // Negative probes: tampered codewords must be rejected, unknown decoders
  // must miss the registry.
  std::string probe_fail;
  {
    std::vector<BlockSample> tuple = sample_tuple(3, p, seed + 2, 1 << 20);
    std::vector<Instance> insts;
    std::vector<BitVector> truths;
    for (const BlockSample& bs : tuple) {
      insts.push_back(bs.inst);
      truths.push_back(bs.witness);
    }
    auto [cw, lg] = encode_coarse(*decs[0], insts, truths);
    auto expect_codec_error = [&](const char* what, auto fn) {
      try {
        fn();
        probe_fail += std::string(what) + " not rejected; ";
      } catch (const CodecError&) {
      }
    };
    expect_codec_error("truncation", [&] {
      Codeword bad = cw;
      bad.bit_count = bad.bit_count / 2;
      decode_coarse(bad, insts, reg);
    });
    expect_codec_error("magic", [&] {
      Codeword bad = cw;
      bad.bytes[0] ^= 0xFF;
      decode_coarse(bad, insts, reg);
    });
    expect_codec_error("block-count", [&] {
      std::vector<Instance> fewer(insts.begin(), insts.end() - 1);
      decode_coarse(cw, fewer, reg);
    });
    expect_codec_error("codec-mixup", [&] {
      auto [cwf, lgf] = encode_fine(*decs[0], insts, truths);
      decode_coarse(cwf, insts, reg);
    });
    try {
      DecoderRegistry empty;
      decode_coarse(cw, insts, empty);
      probe_fail += "registry miss not rejected; ";
    } catch (const ConfigError&) {
    }
  }

  rep.body["runs"] = n_runs;
  rep.body["rows"] = out_rows;

  rep.add("roundtrip-and-budget", all_ok,
          "both codecs round-trip with exact ledgers inside the header "
          "allowance");
  rep.add("rejects-malformed", probe_fail.empty(),
          probe_fail.empty() ? "tamper probes all rejected" : probe_fail);
  return rep;
}

// ---------------------------------------------------------------------------
// clash: an exact decoder's description stays flat in the number of blocks
// while any local decoder's patched description keeps growing.

Report run_clash(const LabConfig& cfg) {
  Report rep = base_report("clash", cfg);
  const EnsembleParams& p = cfg.ensemble;
  const uint32_t t_max = p.tuple_len();
  size_t reps = cfg.tuples ? cfg.tuples : 25;
  uint64_t seed = experiment_seed(cfg.seed, "clash");

  std::vector<uint32_t> t_values{0};
  for (uint32_t t = 4; t <= t_max; t += 2) t_values.push_back(t);

  std::shared_ptr<const Decoder> oracle = make_decoder("oracle-sr", cfg);

  // Pick the candidate local decoder that compresses best on probe tuples.
  std::vector<std::string> candidate_names{"const0", "xor-rule", "sils-rule"};
  if (cfg.decoder == "plugin") candidate_names.push_back("plugin");
  std::vector<std::shared_ptr<const Decoder>> candidates;
  for (const std::string& nm : candidate_names)
    candidates.push_back(make_decoder(nm, cfg));
  std::string chosen_name;
  {
    const size_t probe_reps = 4;
    const uint32_t probe_t = std::max<uint32_t>(4, t_max / 2);
    std::vector<double> mean_bits(candidates.size(), 0.0);
    for (size_t rep_i = 0; rep_i < probe_reps; ++rep_i) {
      std::vector<BlockSample> tuple =
          sample_tuple(probe_t, p, seed + 1, rep_i * 64);
      std::vector<Instance> insts;
      std::vector<BitVector> truths;
      for (const BlockSample& bs : tuple) {
        insts.push_back(bs.inst);
        truths.push_back(bs.witness);
      }
      for (size_t c = 0; c < candidates.size(); ++c) {
        auto [cw, lg] = encode_fine(*candidates[c], insts, truths);
        mean_bits[c] += double(lg.content_bits()) / double(probe_reps);
      }
    }
    size_t best = 0;
    for (size_t c = 1; c < candidates.size(); ++c)
      if (mean_bits[c] < mean_bits[best]) best = c;
    chosen_name = candidate_names[best];
  }
  std::shared_ptr<const Decoder> local =
      chosen_name == "plugin" ? candidates.back() : make_decoder(chosen_name, cfg);

  struct Cell {
    uint64_t oracle_content = 0;
    uint64_t oracle_total = 0;
    uint64_t local_content = 0;
  };
  size_t total_cells = t_values.size() * reps;
  std::vector<Cell> cells(total_cells);
  parallel_for(total_cells, cfg.workers, [&](size_t idx) {
    uint32_t t = t_values[idx / reps];
    std::vector<BlockSample> tuple =
        sample_tuple(t, p, seed, idx * uint64_t(t_max + 1));
    std::vector<Instance> insts;
    std::vector<BitVector> truths;
    for (const BlockSample& bs : tuple) {
      insts.push_back(bs.inst);
      truths.push_back(bs.witness);
    }
    auto [cw_o, lg_o] = encode_coarse(*oracle, insts, truths);
    auto [cw_l, lg_l] = encode_fine(*local, insts, truths);
    cells[idx] = Cell{lg_o.content_bits(), lg_o.total(), lg_l.content_bits()};
  });

  std::vector<uint64_t> oracle_contents;
  json curve_rows = json::array();
  double sum_t = 0, sum_y = 0, sum_tt = 0, sum_ty = 0;
  for (size_t ti = 0; ti < t_values.size(); ++ti) {
    RunningStat local_bits, oracle_total;
    for (size_t rep_i = 0; rep_i < reps; ++rep_i) {
      const Cell& cell = cells[ti * reps + rep_i];
      oracle_contents.push_back(cell.oracle_content);
      local_bits.add(double(cell.local_content));
      oracle_total.add(double(cell.oracle_total));
    }
    double t = double(t_values[ti]);
    sum_t += t;
    sum_y += local_bits.mean();
    sum_tt += t * t;
    sum_ty += t * local_bits.mean();
    curve_rows.push_back({{"t", t_values[ti]},
                          {"oracle_content_bits", cells[ti * reps].oracle_content},
                          {"oracle_total_bits_mean", oracle_total.mean()},
                          {"local_content_bits_mean", local_bits.mean()},
                          {"local_content_bits_sd", local_bits.sd()}});
  }
  double nv = double(t_values.size());
  double denom = nv * sum_tt - sum_t * sum_t;
  double slope = denom != 0.0 ? (nv * sum_ty - sum_t * sum_y) / denom : 0.0;

  bool oracle_flat = std::all_of(
      oracle_contents.begin(), oracle_contents.end(),
      [&](uint64_t v) { return v == oracle_contents.front(); });

  UnionBoundCurve curve = union_bound_curve(
      cfg.union_bound.resolved_delta(), cfg.union_bound.gamma,
      cfg.union_bound.eps_hat, cfg.union_bound.resolved_eta(),
      std::vector<uint64_t>(t_values.begin(), t_values.end()));

  rep.body["t_values"] = t_values;
  rep.body["reps_per_t"] = reps;
  rep.body["oracle_decoder"] = oracle->name();
  rep.body["local_decoder"] = chosen_name;
  rep.body["rows"] = curve_rows;
  rep.body["local_slope_bits_per_block"] = slope;
  rep.body["oracle_content_bits"] = oracle_contents.front();
  rep.body["union_bound"] = curve_json(curve);

  rep.add("oracle-description-flat", oracle_flat,
          "exact-decoder content bits identical across every t and repetition");
  rep.add("local-description-grows", slope >= 1.0,
          "fitted slope " + fm(slope) + " bits per block (needs >= 1)");
  return rep;
}

// ---------------------------------------------------------------------------

const std::vector<std::string>& experiment_names() {
  static const std::vector<std::string> names{
      "sample", "neutrality", "sparsify", "treelike", "isolate",
      "switch", "success",    "codec",    "clash"};
  return names;
}

Report run_experiment(const std::string& name, const LabConfig& cfg) {
  using Runner = Report (*)(const LabConfig&);
  static const std::map<std::string, Runner> table{
      {"sample", run_sample},       {"neutrality", run_neutrality},
      {"sparsify", run_sparsify},   {"treelike", run_treelike},
      {"isolate", run_isolate},     {"switch", run_switch},
      {"success", run_success},     {"codec", run_codec},
      {"clash", run_clash}};
  auto it = table.find(name);
  if (it == table.end())
    throw ConfigError("experiment: unknown subcommand '" + name + "'");
  auto t0 = std::chrono::steady_clock::now();
  Report rep = it->second(cfg);
  auto t1 = std::chrono::steady_clock::now();
  rep.wall_clock_ms =
      std::chrono::duration_cast<std::chrono::duration<double, std::milli>>(
          t1 - t0)
          .count();
  return rep;
}

}  // namespace lab
