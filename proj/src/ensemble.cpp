#include "lab/ensemble.hpp"

#include <bit>
#include <sstream>
#include <stdexcept>

#include "lab/common.hpp"
#include "lab/hashfam.hpp"

namespace lab {

namespace {

BitVector word_to_bits(uint64_t w, size_t n) { return BitVector::from_word(w, n); }

struct PackedClause {
  uint64_t mask = 0;  // variable positions
  uint64_t flip = 0;  // negated positions
};

std::vector<PackedClause> pack_clauses(const SignedCnf& f) {
  std::vector<PackedClause> out(f.clauses.size());
  for (size_t c = 0; c < f.clauses.size(); ++c) {
    for (const auto& lit : f.clauses[c]) {
      out[c].mask |= 1ULL << lit.var;
      if (lit.neg) out[c].flip |= 1ULL << lit.var;
    }
  }
  return out;
}

bool satisfies_packed(const std::vector<PackedClause>& clauses, uint64_t x) {
  for (const PackedClause& cl : clauses) {
    if (((x ^ cl.flip) & cl.mask) == 0) return false;
  }
  return true;
}

}  // namespace

void EnsembleParams::validate() const {
  if (m < 3) throw ConfigError("ensemble.m must be at least 3");
  if (m > 4096) throw ConfigError("ensemble.m is unreasonably large (> 4096)");
  if (!(alpha > 0)) throw ConfigError("ensemble.alpha must be positive");
  if (!(c1 > 0) || !(c2 > 0) || !(c3 > 0) || !(c4 > 0)) {
    throw ConfigError("ensemble constants c1..c4 must be positive");
  }
  if (clause_count() == 0) throw ConfigError("ensemble: floor(alpha*m) must be >= 1");
  if (max_trials == 0) throw ConfigError("ensemble.max_trials must be positive");
  if (coset_dim_budget > 30) {
    throw ConfigError("ensemble.coset_dim_budget above 30 is not supported");
  }
}

bool Instance::witness_checks_out() const {
  if (!witness.has_value()) return false;
  if (witness->size() != cnf.m) return false;
  return satisfies(cnf, *witness) && vv.a.mul(*witness) == vv.b;
}

Cnf sample_base_cnf(const EnsembleParams& params, Rng& rng) {
  Cnf f;
  f.m = params.m;
  const uint32_t target = params.clause_count();
  f.clauses.reserve(target);
  for (uint32_t c = 0; c < target; ++c) {
    uint32_t a = static_cast<uint32_t>(rng.below(params.m));
    uint32_t b = a;
    while (b == a) b = static_cast<uint32_t>(rng.below(params.m));
    uint32_t d = a;
    while (d == a || d == b) d = static_cast<uint32_t>(rng.below(params.m));
    std::array<uint32_t, 3> cl{a, b, d};
    std::sort(cl.begin(), cl.end());
    f.clauses.push_back(cl);
  }
  return f;
}

namespace {

// Shared implementation: count joint solutions with an optional pinned
// partial assignment folded into the linear system as unit rows.
CountResult count_impl(const Instance& inst, uint64_t cap,
                       const EnsembleParams& params,
                       const std::vector<int8_t>* fixed) {
  if (cap == 0) throw std::invalid_argument("count cap must be positive");
  const uint32_t m = inst.cnf.m;
  if (m > 63) throw BudgetError("count: m above word budget (63)");

  size_t extra = 0;
  if (fixed) {
    for (int8_t v : *fixed) {
      if (v >= 0) ++extra;
    }
  }
  BitMatrix sys(inst.vv.k + extra, m);
  BitVector rhs(inst.vv.k + extra);
  for (uint32_t r = 0; r < inst.vv.k; ++r) {
    sys.row(r) = inst.vv.a.row(r);
    rhs.set(r, inst.vv.b.get(r));
  }
  if (fixed) {
    size_t r = inst.vv.k;
    for (uint32_t v = 0; v < fixed->size(); ++v) {
      if ((*fixed)[v] >= 0) {
        sys.row(r).set(v, true);
        rhs.set(r, (*fixed)[v] != 0);
        ++r;
      }
    }
  }

  AffineCoset coset = gaussian_affine_solve(sys, rhs);
  if (!coset.consistent) return CountResult{0, false, std::nullopt};
  const size_t d = m - coset.rank;
  if (d > params.coset_dim_budget) {
    throw BudgetError("count: coset dimension " + std::to_string(d) +
                      " exceeds budget " + std::to_string(params.coset_dim_budget));
  }

  uint64_t found = 0;
  uint64_t witness_word = 0;

  if (d <= 8) {
    // Narrow coset: scan it in Gray-code order and test the CNF directly.
    auto packed = pack_clauses(inst.cnf);
    std::vector<uint64_t> basis(d);
    for (size_t i = 0; i < d; ++i) basis[i] = coset.null_basis[i].as_word();
    uint64_t x = coset.particular.as_word();
    const uint64_t total = 1ULL << d;
    for (uint64_t step = 0;; ++step) {
      if (satisfies_packed(packed, x)) {
        witness_word = x;
        if (++found >= cap) return CountResult{cap, true, std::nullopt};
      }
      if (step + 1 == total) break;
      x ^= basis[std::countr_zero(step + 1)];
    }
  } else {
    // Wide coset: enumerate CNF solutions and filter through the system.
    std::vector<uint64_t> rows(sys.rows());
    for (size_t r = 0; r < sys.rows(); ++r) rows[r] = sys.row(r).as_word();
    uint64_t rhs_word = rhs.size() ? rhs.as_word() : 0;
    std::vector<int8_t> pin;
    if (fixed) pin = *fixed;
    enumerate_solutions(inst.cnf, pin, [&](uint64_t x) {
      for (size_t r = 0; r < rows.size(); ++r) {
        uint64_t bit = static_cast<uint64_t>(std::popcount(rows[r] & x) & 1);
        if (bit != ((rhs_word >> r) & 1)) return true;  // keep searching
      }
      witness_word = x;
      return ++found < cap;
    });
    if (found >= cap) return CountResult{cap, true, std::nullopt};
  }

  CountResult res{found, false, std::nullopt};
  if (found == 1) res.unique_solution = word_to_bits(witness_word, m);
  return res;
}

}  // namespace

CountResult count_solutions_capped(const Instance& inst, uint64_t cap,
                                   const EnsembleParams& params) {
  return count_impl(inst, cap, params, nullptr);
}

CountResult count_solutions_capped_restricted(const Instance& inst, uint64_t cap,
                                              const EnsembleParams& params,
                                              const std::vector<int8_t>& fixed) {
  if (fixed.size() != inst.cnf.m) {
    throw std::invalid_argument("restricted count: pin vector length mismatch");
  }
  return count_impl(inst, cap, params, &fixed);
}

BlockSample sample_block(const EnsembleParams& params, Rng& rng) {
  const uint32_t m = params.m;
  for (uint32_t trial = 1; trial <= params.max_trials; ++trial) {
    Cnf base = sample_base_cnf(params, rng);
    Mask h = Mask::random(m, rng);
    Instance inst;
    inst.cnf = apply_mask(base, h);
    uint32_t k = params.k_mode == KMode::Uniform
                     ? static_cast<uint32_t>(rng.below(m))
                     : params.fixed_k();
    inst.vv.k = k;
    inst.vv.a = sample_parity_matrix(k, m, rng);
    inst.vv.b = params.b_mode == RhsMode::Uniform
                    ? sample_rhs_uniform(k, rng)
                    : sample_rhs_delta_biased(k, params.delta(), rng);
    CountResult cnt = count_solutions_capped(inst, 2, params);
    if (cnt.count == 1 && !cnt.capped) {
      BlockSample out;
      out.witness = *cnt.unique_solution;
      inst.witness = out.witness;
      out.inst = std::move(inst);
      out.trials = trial;
      return out;
    }
  }
  throw BudgetError("sample_block: no on-promise instance within " +
                    std::to_string(params.max_trials) + " trials");
}

std::vector<BlockSample> sample_tuple(size_t t, const EnsembleParams& params,
                                      uint64_t seed, uint64_t stream_base) {
  std::vector<BlockSample> out;
  out.reserve(t);
  for (size_t j = 0; j < t; ++j) {
    Rng rng(seed, stream_base + j);
    out.push_back(sample_block(params, rng));
  }
  return out;
}

IsolationStats vv_isolation_rate(const SignedCnf& f, size_t n_draws, Rng& rng) {
  if (f.m > 63) throw std::invalid_argument("vv_isolation_rate: m too large");
  std::vector<uint64_t> sols = all_solutions(f);
  if (sols.empty()) {
    throw std::invalid_argument("vv_isolation_rate: formula is unsatisfiable");
  }
  uint32_t k = 0;
  while ((1ULL << k) < sols.size()) ++k;  // ceil(log2 |S|)
  k += 1;

  size_t isolated = 0;
  std::vector<uint64_t> rows(k);
  for (size_t draw = 0; draw < n_draws; ++draw) {
    for (uint32_t r = 0; r < k; ++r) {
      rows[r] = rng.next_u64() & ((f.m == 64) ? ~0ULL : ((1ULL << f.m) - 1));
    }
    uint64_t b = rng.next_u64() & ((1ULL << k) - 1);
    size_t hits = 0;
    for (uint64_t x : sols) {
      bool ok = true;
      for (uint32_t r = 0; r < k; ++r) {
        uint64_t bit = static_cast<uint64_t>(std::popcount(rows[r] & x) & 1);
        if (bit != ((b >> r) & 1)) {
          ok = false;
          break;
        }
      }
      if (ok && ++hits > 1) break;
    }
    if (hits == 1) ++isolated;
  }
  IsolationStats st;
  st.rate = n_draws ? static_cast<double>(isolated) / n_draws : 0.0;
  st.solution_count = sols.size();
  st.k = k;
  return st;
}

namespace {

constexpr uint32_t kInstanceMagic = 0x4C53'5531;  // "1USL" little-endian
constexpr uint8_t kInstanceVersion = 1;

void put_u32(std::vector<uint8_t>& out, uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<uint8_t>(v >> (8 * i)));
}

uint32_t get_u32(const uint8_t*& p, const uint8_t* end) {
  if (end - p < 4) throw std::runtime_error("instance record truncated");
  uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<uint32_t>(p[i]) << (8 * i);
  p += 4;
  return v;
}

}  // namespace

std::vector<uint8_t> serialize_instance(const Instance& inst) {
  std::vector<uint8_t> out;
  put_u32(out, kInstanceMagic);
  out.push_back(kInstanceVersion);
  put_u32(out, inst.cnf.m);
  put_u32(out, static_cast<uint32_t>(inst.cnf.clauses.size()));
  put_u32(out, inst.vv.k);
  for (const auto& cl : inst.cnf.clauses) {
    for (const auto& lit : cl) {
      put_u32(out, lit.var | (static_cast<uint32_t>(lit.neg) << 31));
    }
  }
  inst.vv.a.serialize(out);
  inst.vv.b.serialize(out);
  out.push_back(inst.witness.has_value() ? 1 : 0);
  if (inst.witness.has_value()) inst.witness->serialize(out);
  return out;
}

Instance deserialize_instance(const std::vector<uint8_t>& bytes) {
  const uint8_t* p = bytes.data();
  const uint8_t* end = p + bytes.size();
  if (get_u32(p, end) != kInstanceMagic) {
    throw std::runtime_error("instance record: bad magic");
  }
  if (p == end || *p != kInstanceVersion) {
    throw std::runtime_error("instance record: unsupported version");
  }
  ++p;
  Instance inst;
  inst.cnf.m = get_u32(p, end);
  uint32_t n_clauses = get_u32(p, end);
  inst.vv.k = get_u32(p, end);
  inst.cnf.clauses.resize(n_clauses);
  for (uint32_t c = 0; c < n_clauses; ++c) {
    for (int s = 0; s < 3; ++s) {
      uint32_t enc = get_u32(p, end);
      inst.cnf.clauses[c][s] =
          SignedLit{enc & 0x7FFF'FFFF, static_cast<uint8_t>(enc >> 31)};
      if (inst.cnf.clauses[c][s].var >= inst.cnf.m) {
        throw std::runtime_error("instance record: variable out of range");
      }
    }
  }
  inst.vv.a = BitMatrix::deserialize(p, end);
  inst.vv.b = BitVector::deserialize(p, end);
  if (inst.vv.a.rows() != inst.vv.k || inst.vv.a.cols() != inst.cnf.m ||
      inst.vv.b.size() != inst.vv.k) {
    throw std::runtime_error("instance record: layer shape mismatch");
  }
  if (p == end) throw std::runtime_error("instance record truncated");
  uint8_t has_witness = *p++;
  if (has_witness) {
    inst.witness = BitVector::deserialize(p, end);
    if (inst.witness->size() != inst.cnf.m) {
      throw std::runtime_error("instance record: witness length mismatch");
    }
  }
  if (p != end) throw std::runtime_error("instance record: trailing bytes");
  return inst;
}

std::string to_dimacs(const Instance& inst) {
  std::ostringstream os;
  os << "c masked usat instance m=" << inst.cnf.m << " clauses="
     << inst.cnf.clauses.size() << " k=" << inst.vv.k << "\n";
  if (inst.witness.has_value()) {
    os << "c witness " << inst.witness->to_string() << "\n";
  }
  os << "p cnf " << inst.cnf.m << " "
     << inst.cnf.clauses.size() + inst.vv.k << "\n";
  for (const auto& cl : inst.cnf.clauses) {
    for (const auto& lit : cl) {
      os << (lit.neg ? "-" : "") << (lit.var + 1) << " ";
    }
    os << "0\n";
  }
  for (uint32_t r = 0; r < inst.vv.k; ++r) {
    const BitVector& row = inst.vv.a.row(r);
    std::vector<uint32_t> vars;
    for (uint32_t v = 0; v < inst.cnf.m; ++v) {
      if (row.get(v)) vars.push_back(v);
    }
    if (vars.empty()) {
      if (inst.vv.b.get(r)) {
        throw std::invalid_argument("to_dimacs: zero XOR row with odd parity");
      }
      continue;  // 0 = 0 carries no information
    }
    os << "x";
    for (size_t i = 0; i < vars.size(); ++i) {
      bool negate_first = (i == 0) && !inst.vv.b.get(r);
      os << " " << (negate_first ? "-" : "") << (vars[i] + 1);
    }
    os << " 0\n";
  }
  return os.str();
}

}  // namespace lab
