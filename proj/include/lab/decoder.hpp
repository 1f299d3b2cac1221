#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "lab/bitvec.hpp"
#include "lab/codec.hpp"
#include "lab/ensemble.hpp"
#include "lab/sils.hpp"
#include "lab/symmetry.hpp"

namespace lab {

// Bit cost of the identity field as the codecs serialize it: length-prefixed
// registry name plus the 64-bit parameter digest.
uint64_t identity_wire_bits(const std::string& name);
// Bit cost of a length-prefixed seed blob of `blob_bytes` bytes.
uint64_t seed_wire_bits(size_t blob_bytes);

// A decoder maps a tuple of instances to one predicted witness per block.
// Decoders are deterministic: any coins are fixed at construction and
// reported through seed_blob()/description_length().
class Decoder {
 public:
  virtual ~Decoder() = default;

  virtual std::string name() const = 0;
  virtual uint64_t param_digest() const = 0;
  virtual std::vector<BitVector> predict(
      const std::vector<Instance>& blocks) const = 0;

  // Seed material hardwired into the decoder, serialized into codewords.
  virtual std::vector<uint8_t> seed_blob() const { return {}; }

  // Itemized size of the decoder's own description (identity, seed, and any
  // trained tables). Identical parameters always produce identical ledgers.
  virtual DescriptionLedger description_length() const;
};

// Lookup of decoders by (registry name, parameter digest); decode paths use
// this to rerun the exact decoder a codeword names.
class DecoderRegistry {
 public:
  void add(std::shared_ptr<const Decoder> d);
  const Decoder& find(const std::string& name, uint64_t digest) const;
  size_t size() const { return entries_.size(); }

 private:
  std::map<std::pair<std::string, uint64_t>, std::shared_ptr<const Decoder>>
      entries_;
};

// --- Built-in decoders ---

// Predicts the all-zero witness for every block.
class ConstantZeroDecoder : public Decoder {
 public:
  std::string name() const override { return "const0"; }
  uint64_t param_digest() const override;
  std::vector<BitVector> predict(
      const std::vector<Instance>& blocks) const override;
};

// Sketch-only rule: every bit of the prediction equals g(z), a table lookup
// on the block's sign-invariant sketch. Unlisted sketches map to the default.
class SilsTableDecoder : public Decoder {
 public:
  SilsTableDecoder(SilsSpec spec, std::map<std::string, uint8_t> table,
                   uint8_t default_bit = 0);

  std::string name() const override { return "sils-rule"; }
  uint64_t param_digest() const override { return digest_; }
  std::vector<BitVector> predict(
      const std::vector<Instance>& blocks) const override;
  DescriptionLedger description_length() const override;

 private:
  SilsSpec spec_;
  std::map<std::string, uint8_t> table_;
  uint8_t default_bit_;
  uint64_t digest_;
};

// Fixed local rule on the per-bit view u_i = (z, a_i, b):
// prediction_i = <a_i, b> xor z[0]. No trained state.
class LocalRuleDecoder : public Decoder {
 public:
  explicit LocalRuleDecoder(SilsSpec spec);

  std::string name() const override { return "xor-rule"; }
  uint64_t param_digest() const override { return digest_; }
  std::vector<BitVector> predict(
      const std::vector<Instance>& blocks) const override;

 private:
  SilsSpec spec_;
  uint64_t digest_;
};

// Per-bit majority-vote table over local inputs. Prediction for a stored key
// is the majority of its training labels; ties and unseen keys yield 0.
class PlugInTable {
 public:
  explicit PlugInTable(uint32_t m);

  uint32_t m() const { return m_; }
  void add_vote(size_t i, const std::string& key, bool label);
  bool predict(size_t i, const std::string& key) const;
  bool contains(size_t i, const std::string& key) const;
  uint64_t entry_count() const;

  std::vector<uint8_t> serialize() const;
  static PlugInTable deserialize(const std::vector<uint8_t>& bytes);
  std::string to_json() const;
  uint64_t digest() const;

  bool operator==(const PlugInTable&) const = default;

 private:
  struct Votes {
    uint64_t zeros = 0;
    uint64_t ones = 0;
    bool operator==(const Votes&) const = default;
  };
  uint32_t m_ = 0;
  std::vector<std::map<std::string, Votes>> votes_;
};

// Local decoder driven by a frozen plug-in table: bit i of each prediction is
// table.predict(i, key(u_i)).
class PlugInDecoder : public Decoder {
 public:
  PlugInDecoder(SilsSpec spec, PlugInTable table);

  std::string name() const override { return "plugin"; }
  uint64_t param_digest() const override { return digest_; }
  std::vector<BitVector> predict(
      const std::vector<Instance>& blocks) const override;
  DescriptionLedger description_length() const override;

  const PlugInTable& table() const { return table_; }

 private:
  SilsSpec spec_;
  PlugInTable table_;
  uint64_t digest_;
};

// --- Witness recovery through a satisfiability decider ---

// Answers "does the instance stay satisfiable under this partial assignment"
// (-1 free, 0/1 pinned). The exhaustive stand-in below runs the capped
// enumeration; the promise keeps every restriction's count in {0, 1}.
using UsatDecider =
    std::function<bool(const Instance&, const std::vector<int8_t>&)>;

UsatDecider enumeration_decider(const EnsembleParams& params);

struct SelfReduction {
  BitVector witness;
  uint64_t decider_calls = 0;
};

// Recover the unique witness with exactly m decider calls: fix bits in index
// order, testing the 0-branch and deducing the 1-branch from the promise.
// The assembled witness is verified at the end; an assignment that fails
// either layer means the decider contradicted itself and raises an error.
SelfReduction self_reduce(const Instance& inst, const UsatDecider& decider);

// Exact decoder: runs the self-reduction per block. Exponential-time stand-in
// with a constant-size description (registry identity + parameters only).
class OracleSelfReductionDecoder : public Decoder {
 public:
  explicit OracleSelfReductionDecoder(EnsembleParams params);

  std::string name() const override { return "oracle-sr"; }
  uint64_t param_digest() const override { return digest_; }
  std::vector<BitVector> predict(
      const std::vector<Instance>& blocks) const override;

 private:
  EnsembleParams params_;
  uint64_t digest_;
};

// Stable digest of ensemble parameters, shared by decoders that embed them.
uint64_t ensemble_params_digest(const EnsembleParams& p);

}  // namespace lab
