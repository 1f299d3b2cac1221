#include "lab/wrappers.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "lab/common.hpp"

namespace lab {

uint32_t SymWrapParams::auto_s(uint32_t m, uint64_t t) {
  const double lg = std::log2(double(m) * double(t));
  uint32_t s = lg <= 0 ? 1 : static_cast<uint32_t>(std::ceil(20.0 * lg));
  if (s == 0) s = 1;
  if (s % 2 == 0) ++s;  // odd count keeps the majority well-defined
  return s;
}

uint32_t SymWrapParams::auto_kappa(uint32_t m, uint64_t t) {
  const double lg = std::log2(double(m) * double(t));
  uint32_t k = lg <= 0 ? 1 : static_cast<uint32_t>(std::ceil(12.0 * lg));
  return k == 0 ? 1 : k;
}

uint32_t SymWrapParams::resolve_s(uint32_t m, uint64_t t) const {
  if (s == 0) return auto_s(m, t);
  if (s % 2 == 0)
    throw ConfigError("symmetrization: s must be odd (majority vote)");
  return s;
}

uint32_t SymWrapParams::resolve_kappa(uint32_t m, uint64_t t) const {
  return kappa == 0 ? auto_kappa(m, t) : kappa;
}

std::vector<BitVector> draw_wrapper_flips(uint32_t m, uint32_t s,
                                          uint32_t kappa, uint64_t seed) {
  std::vector<BitVector> flips;
  flips.reserve(s);
  for (uint32_t r = 0; r < s; ++r) {
    Rng rng(seed, r);
    flips.push_back(draw_sign_flip(kappa, m, rng));
  }
  return flips;
}

std::vector<std::vector<BitVector>> symmetrized_runs(
    const Decoder& inner, const std::vector<Instance>& blocks,
    const std::vector<BitVector>& sigmas, BackmapMode mode) {
  std::vector<std::vector<BitVector>> runs;
  runs.reserve(sigmas.size());
  for (const BitVector& sigma : sigmas) {
    std::vector<Instance> flipped;
    flipped.reserve(blocks.size());
    for (const Instance& blk : blocks) flipped.push_back(sign_flip_g(blk, sigma));
    std::vector<BitVector> preds = inner.predict(flipped);
    for (size_t j = 0; j < preds.size(); ++j) {
      const BitVector shift = blocks[j].vv.a.mul(sigma);
      BitVector mapped(preds[j].size());
      for (size_t i = 0; i < preds[j].size(); ++i) {
        mapped.set(i, back_map(preds[j].get(i), blocks[j].vv.a.column(i),
                               sigma, shift, i, mode));
      }
      preds[j] = std::move(mapped);
    }
    runs.push_back(std::move(preds));
  }
  return runs;
}

SymmetrizedDecoder::SymmetrizedDecoder(std::shared_ptr<const Decoder> inner,
                                       uint32_t m, uint64_t t,
                                       SymWrapParams params)
    : inner_(std::move(inner)),
      mode_(params.backmap),
      seed_(params.seed),
      kappa_(params.resolve_kappa(m, t)) {
  const uint32_t s = params.resolve_s(m, t);
  sigmas_ = draw_wrapper_flips(m, s, kappa_, seed_);
  compute_digest();
}

SymmetrizedDecoder::SymmetrizedDecoder(std::shared_ptr<const Decoder> inner,
                                       std::vector<BitVector> sigmas,
                                       BackmapMode mode)
    : inner_(std::move(inner)), sigmas_(std::move(sigmas)), mode_(mode) {
  if (sigmas_.empty() || sigmas_.size() % 2 == 0)
    throw ConfigError("symmetrization: flip count must be odd");
  compute_digest();
}

void SymmetrizedDecoder::compute_digest() {
  std::string blob = "sym/v1|";
  for (const auto& sigma : sigmas_) blob += sigma.pack_key();
  blob += to_string(mode_);
  digest_ = fnv1a(blob, mix64(inner_->param_digest() ^ seed_));
}

std::vector<uint8_t> SymmetrizedDecoder::seed_blob() const {
  std::vector<uint8_t> blob(8);
  for (int i = 0; i < 8; ++i) blob[i] = static_cast<uint8_t>(seed_ >> (8 * i));
  return blob;
}

std::vector<BitVector> SymmetrizedDecoder::predict(
    const std::vector<Instance>& blocks) const {
  const auto runs = symmetrized_runs(*inner_, blocks, sigmas_, mode_);
  std::vector<BitVector> out;
  out.reserve(blocks.size());
  for (size_t j = 0; j < blocks.size(); ++j) {
    BitVector maj(blocks[j].cnf.m);
    for (size_t i = 0; i < maj.size(); ++i) {
      size_t ones = 0;
      for (const auto& run : runs) ones += run[j].get(i);
      maj.set(i, 2 * ones > runs.size());
    }
    out.push_back(std::move(maj));
  }
  return out;
}

DescriptionLedger SymmetrizedDecoder::description_length() const {
  DescriptionLedger ledger = inner_->description_length();
  ledger.identity_bits += identity_wire_bits(name());
  ledger.seed_bits += seed_wire_bits(seed_blob().size());
  return ledger;
}

ErmSplit ErmSplit::draw(uint32_t t, double train_fraction, uint64_t seed) {
  if (!(train_fraction > 0.0) || !(train_fraction < 1.0))
    throw ConfigError("erm: train_fraction must lie strictly inside (0, 1)");
  std::vector<uint32_t> order(t);
  for (uint32_t i = 0; i < t; ++i) order[i] = i;
  Rng rng(seed, 0);
  for (uint32_t i = t; i > 1; --i) {
    std::swap(order[i - 1], order[rng.below(i)]);
  }
  uint32_t n_train = static_cast<uint32_t>(std::lround(train_fraction * t));
  if (n_train == 0) n_train = 1;
  if (n_train >= t) n_train = t - 1;
  ErmSplit split;
  split.train.assign(order.begin(), order.begin() + n_train);
  split.test.assign(order.begin() + n_train, order.end());
  std::sort(split.train.begin(), split.train.end());
  std::sort(split.test.begin(), split.test.end());
  return split;
}

ErmDecoder::ErmDecoder(std::shared_ptr<const Decoder> inner, ErmParams params)
    : inner_(std::move(inner)), params_(params) {
  std::ostringstream os;
  os << "erm/v1|" << params_.train_fraction << '|' << params_.split_seed << '|'
     << params_.sym.s << '|' << params_.sym.kappa << '|' << params_.sym.seed
     << '|' << to_string(params_.sym.backmap);
  digest_ = fnv1a(os.str(), mix64(inner_->param_digest() ^ params_.sils.digest()));
}

std::vector<uint8_t> ErmDecoder::seed_blob() const {
  std::vector<uint8_t> blob(16);
  for (int i = 0; i < 8; ++i) {
    blob[i] = static_cast<uint8_t>(params_.split_seed >> (8 * i));
    blob[8 + i] = static_cast<uint8_t>(params_.sym.seed >> (8 * i));
  }
  return blob;
}

ErmSplit ErmDecoder::split_for(uint32_t t) const {
  return ErmSplit::draw(t, params_.train_fraction, params_.split_seed);
}

PlugInTable ErmDecoder::train_table(const std::vector<Instance>& blocks,
                                    const ErmSplit& split) const {
  if (split.train.empty()) throw ConfigError("erm: empty training set");
  const uint32_t m = blocks.at(split.train[0]).cnf.m;
  const uint32_t s =
      params_.sym.resolve_s(m, static_cast<uint64_t>(blocks.size()));
  const uint32_t kappa =
      params_.sym.resolve_kappa(m, static_cast<uint64_t>(blocks.size()));
  const std::vector<BitVector> sigmas =
      draw_wrapper_flips(m, s, kappa, params_.sym.seed);

  std::vector<Instance> train_blocks;
  train_blocks.reserve(split.train.size());
  for (uint32_t j : split.train) train_blocks.push_back(blocks.at(j));

  const auto runs =
      symmetrized_runs(*inner_, train_blocks, sigmas, params_.sym.backmap);

  PlugInTable table(m);
  for (size_t jt = 0; jt < train_blocks.size(); ++jt) {
    const Instance& blk = train_blocks[jt];
    const SilsVector z = extract_sils(blk.cnf, params_.sils);
    for (uint32_t i = 0; i < m; ++i) {
      size_t ones = 0;
      for (const auto& run : runs) ones += run[jt].get(i);
      const bool surrogate = 2 * ones > runs.size();
      table.add_vote(i, local_input(blk, z, i).pack_key(), surrogate);
    }
  }
  return table;
}

std::vector<BitVector> ErmDecoder::predict(
    const std::vector<Instance>& blocks) const {
  if (blocks.size() < 2)
    throw std::invalid_argument("erm: tuple length of at least 2 required");
  const ErmSplit split = split_for(static_cast<uint32_t>(blocks.size()));
  const PlugInTable table = train_table(blocks, split);

  std::vector<BitVector> out(blocks.size());
  std::vector<Instance> train_blocks;
  train_blocks.reserve(split.train.size());
  for (uint32_t j : split.train) train_blocks.push_back(blocks[j]);
  const std::vector<BitVector> pass_through = inner_->predict(train_blocks);
  for (size_t jt = 0; jt < split.train.size(); ++jt) {
    out[split.train[jt]] = pass_through[jt];
  }
  for (uint32_t j : split.test) {
    const Instance& blk = blocks[j];
    const SilsVector z = extract_sils(blk.cnf, params_.sils);
    BitVector pred(blk.cnf.m);
    for (size_t i = 0; i < pred.size(); ++i) {
      pred.set(i, table.predict(i, local_input(blk, z, i).pack_key()));
    }
    out[j] = std::move(pred);
  }
  return out;
}

DescriptionLedger ErmDecoder::description_length() const {
  DescriptionLedger ledger = inner_->description_length();
  ledger.identity_bits += identity_wire_bits(name());
  ledger.seed_bits += seed_wire_bits(seed_blob().size());
  return ledger;
}

}  // namespace lab
