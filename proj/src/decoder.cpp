#include "lab/decoder.hpp"

#include <sstream>

#include "json.hpp"
#include "lab/common.hpp"

namespace lab {

uint64_t identity_wire_bits(const std::string& name) {
  return gamma0_bits(name.size()) + 8 * name.size() + 64;
}

uint64_t seed_wire_bits(size_t blob_bytes) {
  return gamma0_bits(blob_bytes) + 8 * blob_bytes;
}

DescriptionLedger Decoder::description_length() const {
  DescriptionLedger ledger;
  ledger.identity_bits = identity_wire_bits(name());
  ledger.seed_bits = seed_wire_bits(seed_blob().size());
  return ledger;
}

void DecoderRegistry::add(std::shared_ptr<const Decoder> d) {
  auto key = std::make_pair(d->name(), d->param_digest());
  entries_[key] = std::move(d);
}

const Decoder& DecoderRegistry::find(const std::string& name,
                                     uint64_t digest) const {
  auto it = entries_.find(std::make_pair(name, digest));
  if (it == entries_.end())
    throw ConfigError("decoder registry: no entry for '" + name + "'");
  return *it->second;
}

// ---------------------------------------------------------------------------
// Built-in decoders
// ---------------------------------------------------------------------------

uint64_t ConstantZeroDecoder::param_digest() const {
  return fnv1a(std::string("const0/v1"));
}

std::vector<BitVector> ConstantZeroDecoder::predict(
    const std::vector<Instance>& blocks) const {
  std::vector<BitVector> out;
  out.reserve(blocks.size());
  for (const auto& blk : blocks) out.emplace_back(blk.cnf.m);
  return out;
}

SilsTableDecoder::SilsTableDecoder(SilsSpec spec,
                                   std::map<std::string, uint8_t> table,
                                   uint8_t default_bit)
    : spec_(spec), table_(std::move(table)), default_bit_(default_bit & 1) {
  std::string blob = "sils-rule/v1";
  for (const auto& [key, bit] : table_) {
    blob += key;
    blob.push_back(static_cast<char>('0' + (bit & 1)));
  }
  blob.push_back(static_cast<char>('0' + default_bit_));
  digest_ = fnv1a(blob, spec_.digest());
}

std::vector<BitVector> SilsTableDecoder::predict(
    const std::vector<Instance>& blocks) const {
  std::vector<BitVector> out;
  out.reserve(blocks.size());
  for (const auto& blk : blocks) {
    const SilsVector z = extract_sils(blk.cnf, spec_);
    auto it = table_.find(z.pack_key());
    const bool bit = it == table_.end() ? default_bit_ : (it->second & 1);
    BitVector pred(blk.cnf.m);
    if (bit) {
      for (size_t i = 0; i < pred.size(); ++i) pred.set(i, true);
    }
    out.push_back(std::move(pred));
  }
  return out;
}

DescriptionLedger SilsTableDecoder::description_length() const {
  DescriptionLedger ledger = Decoder::description_length();
  for (const auto& entry : table_) {
    ledger.payload_bits += 8 * entry.first.size() + 1;
  }
  return ledger;
}

LocalRuleDecoder::LocalRuleDecoder(SilsSpec spec) : spec_(spec) {
  digest_ = fnv1a(std::string("xor-rule/v1"), spec_.digest());
}

std::vector<BitVector> LocalRuleDecoder::predict(
    const std::vector<Instance>& blocks) const {
  std::vector<BitVector> out;
  out.reserve(blocks.size());
  for (const auto& blk : blocks) {
    const SilsVector z = extract_sils(blk.cnf, spec_);
    const bool z0 = !z.bits.empty() && z.bits.get(0);
    BitVector pred(blk.cnf.m);
    for (size_t i = 0; i < pred.size(); ++i) {
      pred.set(i, dot(blk.vv.a.column(i), blk.vv.b) ^ z0);
    }
    out.push_back(std::move(pred));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Plug-in table
// ---------------------------------------------------------------------------

PlugInTable::PlugInTable(uint32_t m) : m_(m), votes_(m) {}

void PlugInTable::add_vote(size_t i, const std::string& key, bool label) {
  auto& cell = votes_.at(i)[key];
  if (label) {
    ++cell.ones;
  } else {
    ++cell.zeros;
  }
}

bool PlugInTable::predict(size_t i, const std::string& key) const {
  const auto& table = votes_.at(i);
  auto it = table.find(key);
  if (it == table.end()) return false;
  return it->second.ones > it->second.zeros;
}

bool PlugInTable::contains(size_t i, const std::string& key) const {
  return votes_.at(i).count(key) != 0;
}

uint64_t PlugInTable::entry_count() const {
  uint64_t n = 0;
  for (const auto& table : votes_) n += table.size();
  return n;
}

namespace {

void put_u32(std::vector<uint8_t>& out, uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<uint8_t>(v >> (8 * i)));
}

void put_u64(std::vector<uint8_t>& out, uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<uint8_t>(v >> (8 * i)));
}

uint32_t get_u32(const std::vector<uint8_t>& in, size_t& pos) {
  if (pos + 4 > in.size())
    throw std::invalid_argument("plug-in table: truncated record");
  uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= uint32_t{in[pos++]} << (8 * i);
  return v;
}

uint64_t get_u64(const std::vector<uint8_t>& in, size_t& pos) {
  if (pos + 8 > in.size())
    throw std::invalid_argument("plug-in table: truncated record");
  uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= uint64_t{in[pos++]} << (8 * i);
  return v;
}

constexpr uint32_t kPlugInMagic = 0x504C5431;  // "PLT1"

std::string hex_encode(const std::string& raw) {
  static const char* digits = "0123456789abcdef";
  std::string out;
  out.reserve(2 * raw.size());
  for (unsigned char c : raw) {
    out.push_back(digits[c >> 4]);
    out.push_back(digits[c & 15]);
  }
  return out;
}

}  // namespace

std::vector<uint8_t> PlugInTable::serialize() const {
  std::vector<uint8_t> out;
  put_u32(out, kPlugInMagic);
  put_u32(out, 1);  // format version
  put_u32(out, m_);
  for (const auto& table : votes_) {
    put_u32(out, static_cast<uint32_t>(table.size()));
    for (const auto& [key, cell] : table) {
      put_u32(out, static_cast<uint32_t>(key.size()));
      out.insert(out.end(), key.begin(), key.end());
      put_u64(out, cell.zeros);
      put_u64(out, cell.ones);
    }
  }
  return out;
}

PlugInTable PlugInTable::deserialize(const std::vector<uint8_t>& bytes) {
  size_t pos = 0;
  if (get_u32(bytes, pos) != kPlugInMagic)
    throw std::invalid_argument("plug-in table: bad magic");
  if (get_u32(bytes, pos) != 1)
    throw std::invalid_argument("plug-in table: unsupported version");
  PlugInTable out(get_u32(bytes, pos));
  for (auto& table : out.votes_) {
    uint32_t entries = get_u32(bytes, pos);
    for (uint32_t e = 0; e < entries; ++e) {
      uint32_t key_len = get_u32(bytes, pos);
      if (pos + key_len > bytes.size())
        throw std::invalid_argument("plug-in table: truncated key");
      std::string key(bytes.begin() + pos, bytes.begin() + pos + key_len);
      pos += key_len;
      Votes cell;
      cell.zeros = get_u64(bytes, pos);
      cell.ones = get_u64(bytes, pos);
      table[key] = cell;
    }
  }
  if (pos != bytes.size())
    throw std::invalid_argument("plug-in table: trailing bytes");
  return out;
}

std::string PlugInTable::to_json() const {
  nlohmann::json j;
  j["m"] = m_;
  j["bits"] = nlohmann::json::array();
  for (const auto& table : votes_) {
    nlohmann::json entries = nlohmann::json::array();
    for (const auto& [key, cell] : table) {
      entries.push_back({{"key", hex_encode(key)},
                         {"zeros", cell.zeros},
                         {"ones", cell.ones}});
    }
    j["bits"].push_back(std::move(entries));
  }
  return j.dump();
}

uint64_t PlugInTable::digest() const {
  const std::vector<uint8_t> blob = serialize();
  return fnv1a(blob.data(), blob.size());
}

PlugInDecoder::PlugInDecoder(SilsSpec spec, PlugInTable table)
    : spec_(spec), table_(std::move(table)) {
  digest_ = fnv1a(std::string("plugin/v1"),
                  mix64(spec_.digest() ^ table_.digest()));
}

std::vector<BitVector> PlugInDecoder::predict(
    const std::vector<Instance>& blocks) const {
  std::vector<BitVector> out;
  out.reserve(blocks.size());
  for (const auto& blk : blocks) {
    if (blk.cnf.m != table_.m())
      throw std::invalid_argument("plugin decoder: block width mismatch");
    const SilsVector z = extract_sils(blk.cnf, spec_);
    BitVector pred(blk.cnf.m);
    for (size_t i = 0; i < pred.size(); ++i) {
      pred.set(i, table_.predict(i, local_input(blk, z, i).pack_key()));
    }
    out.push_back(std::move(pred));
  }
  return out;
}

DescriptionLedger PlugInDecoder::description_length() const {
  DescriptionLedger ledger = Decoder::description_length();
  ledger.payload_bits = 8 * table_.serialize().size();
  return ledger;
}

// ---------------------------------------------------------------------------
// Self-reduction
// ---------------------------------------------------------------------------

UsatDecider enumeration_decider(const EnsembleParams& params) {
  return [params](const Instance& inst, const std::vector<int8_t>& fixed) {
    return count_solutions_capped_restricted(inst, 1, params, fixed).count > 0;
  };
}

SelfReduction self_reduce(const Instance& inst, const UsatDecider& decider) {
  const uint32_t m = inst.cnf.m;
  SelfReduction result;
  result.witness = BitVector(m);
  std::vector<int8_t> fixed(m, -1);
  for (uint32_t i = 0; i < m; ++i) {
    fixed[i] = 0;
    ++result.decider_calls;
    if (!decider(inst, fixed)) {
      fixed[i] = 1;
      result.witness.set(i, true);
    }
  }
  if (!satisfies(inst.cnf, result.witness) ||
      inst.vv.a.mul(result.witness) != inst.vv.b) {
    throw std::runtime_error(
        "self_reduce: decider inconsistent (assembled assignment fails)");
  }
  return result;
}

OracleSelfReductionDecoder::OracleSelfReductionDecoder(EnsembleParams params)
    : params_(params) {
  digest_ = fnv1a(std::string("oracle-sr/v1"), ensemble_params_digest(params_));
}

std::vector<BitVector> OracleSelfReductionDecoder::predict(
    const std::vector<Instance>& blocks) const {
  const UsatDecider decider = enumeration_decider(params_);
  std::vector<BitVector> out;
  out.reserve(blocks.size());
  for (const auto& blk : blocks) {
    out.push_back(self_reduce(blk, decider).witness);
  }
  return out;
}

uint64_t ensemble_params_digest(const EnsembleParams& p) {
  std::ostringstream os;
  os << p.m << '|' << p.alpha << '|' << p.c1 << '|' << p.c2 << '|' << p.c3
     << '|' << p.c4 << '|' << static_cast<int>(p.b_mode) << '|'
     << static_cast<int>(p.k_mode) << '|' << p.max_trials << '|'
     << p.coset_dim_budget;
  return fnv1a(os.str());
}

}  // namespace lab
