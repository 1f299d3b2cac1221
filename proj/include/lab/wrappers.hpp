#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "lab/decoder.hpp"
#include "lab/hashfam.hpp"
#include "lab/symmetry.hpp"

namespace lab {

// Symmetrization knobs. s/kappa = 0 selects the documented defaults
// ceil(20*log2(m*t)) rounded up to odd and ceil(12*log2(m*t)).
struct SymWrapParams {
  uint32_t s = 0;
  uint32_t kappa = 0;
  uint64_t seed = 1;
  BackmapMode backmap = BackmapMode::Coordinate;

  static uint32_t auto_s(uint32_t m, uint64_t t);
  static uint32_t auto_kappa(uint32_t m, uint64_t t);
  uint32_t resolve_s(uint32_t m, uint64_t t) const;
  uint32_t resolve_kappa(uint32_t m, uint64_t t) const;
};

// The wrapper's hardwired sign-flip list: flip r is one draw from the
// kappa-wise independent family seeded by Rng(seed, r).
std::vector<BitVector> draw_wrapper_flips(uint32_t m, uint32_t s,
                                          uint32_t kappa, uint64_t seed);

// runs[r][j] = prediction of `inner` on g_{sigma_r}(blocks[j]), back-mapped
// to the original coordinates bit by bit. The flip list is shared across the
// whole tuple within a run, matching the wrapper's definition.
std::vector<std::vector<BitVector>> symmetrized_runs(
    const Decoder& inner, const std::vector<Instance>& blocks,
    const std::vector<BitVector>& sigmas, BackmapMode mode);

// Majority-vote symmetrization wrapper: run the inner decoder on s
// sign-flipped copies of the tuple, back-map every bit, output per-bit
// majorities. All randomness is fixed at construction.
class SymmetrizedDecoder : public Decoder {
 public:
  // Flips drawn from the seeded family; m and t size the default s/kappa.
  SymmetrizedDecoder(std::shared_ptr<const Decoder> inner, uint32_t m,
                     uint64_t t, SymWrapParams params);
  // Test hook: explicit flip list (size must be odd).
  SymmetrizedDecoder(std::shared_ptr<const Decoder> inner,
                     std::vector<BitVector> sigmas, BackmapMode mode);

  std::string name() const override { return "sym." + inner_->name(); }
  uint64_t param_digest() const override { return digest_; }
  std::vector<uint8_t> seed_blob() const override;
  std::vector<BitVector> predict(
      const std::vector<Instance>& blocks) const override;
  DescriptionLedger description_length() const override;

  const std::vector<BitVector>& flips() const { return sigmas_; }
  BackmapMode backmap() const { return mode_; }

 private:
  void compute_digest();

  std::shared_ptr<const Decoder> inner_;
  std::vector<BitVector> sigmas_;
  BackmapMode mode_ = BackmapMode::Coordinate;
  uint64_t seed_ = 0;
  uint32_t kappa_ = 0;
  uint64_t digest_ = 0;
};

// Disjoint train/test split of [0, t).
struct ErmSplit {
  std::vector<uint32_t> train;
  std::vector<uint32_t> test;

  static ErmSplit draw(uint32_t t, double train_fraction, uint64_t seed);
};

struct ErmParams {
  double train_fraction = 0.5;
  uint64_t split_seed = 7;
  SymWrapParams sym;
  SilsSpec sils;
};

// In-sample distillation wrapper: on the training half, label every bit by
// the majority of its back-mapped symmetrized runs, fit a per-bit plug-in
// table over local inputs, and predict test blocks through that table.
// Training blocks pass through the inner decoder unchanged.
class ErmDecoder : public Decoder {
 public:
  ErmDecoder(std::shared_ptr<const Decoder> inner, ErmParams params);

  std::string name() const override { return "erm." + inner_->name(); }
  uint64_t param_digest() const override { return digest_; }
  std::vector<uint8_t> seed_blob() const override;
  std::vector<BitVector> predict(
      const std::vector<Instance>& blocks) const override;
  DescriptionLedger description_length() const override;

  ErmSplit split_for(uint32_t t) const;
  // The table fitted on the given blocks' training half; exposed so
  // experiments can freeze it into a standalone plug-in decoder.
  PlugInTable train_table(const std::vector<Instance>& blocks,
                          const ErmSplit& split) const;

  const ErmParams& params() const { return params_; }

 private:
  std::shared_ptr<const Decoder> inner_;
  ErmParams params_;
  uint64_t digest_ = 0;
};

}  // namespace lab
