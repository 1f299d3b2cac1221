#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "lab/bitvec.hpp"
#include "lab/cnf.hpp"
#include "lab/rng.hpp"

namespace lab {

enum class RhsMode { Uniform, DeltaBiased };
enum class KMode { Uniform, Fixed };

// Parameters of the masked block ensemble. All counts are recorded verbatim
// in every report.
struct EnsembleParams {
  uint32_t m = 16;       // number of variables
  double alpha = 4.2;    // clause density; clause count = floor(alpha * m)
  double c1 = 1.0;       // fixed-k mode: k = round(c1 * log2 m)
  double c2 = 10.0;      // small-bias exponent: delta = m^(-c2)
  double c3 = 0.5;       // locality radius scale: r = max(1, round(c3 * log2 m))
  double c4 = 1.0;       // tuple length: t = max(1, round(c4 * m))
  RhsMode b_mode = RhsMode::Uniform;
  KMode k_mode = KMode::Uniform;
  uint32_t max_trials = 100000;     // rejection-sampling cap per block
  uint32_t coset_dim_budget = 26;   // enumeration budget (coset dimension)

  uint32_t clause_count() const {
    return static_cast<uint32_t>(std::floor(alpha * m));
  }
  uint32_t fixed_k() const {
    uint32_t k = static_cast<uint32_t>(std::lround(c1 * std::log2(double(m))));
    return k > m ? m : k;
  }
  double delta() const { return std::pow(double(m), -c2); }
  uint32_t tuple_len() const {
    long t = std::lround(c4 * m);
    return t < 1 ? 1 : static_cast<uint32_t>(t);
  }

  void validate() const;  // positivity and range checks; throws ConfigError
};

// Isolation layer: parity-check matrix A (k x m) and right-hand side b.
struct VvLayer {
  BitMatrix a;
  BitVector b;
  uint32_t k = 0;

  bool operator==(const VvLayer&) const = default;
};

// A masked instance: signed CNF plus isolation layer. On-promise instances
// (exactly one joint satisfying assignment) carry their witness.
struct Instance {
  SignedCnf cnf;
  VvLayer vv;
  std::optional<BitVector> witness;

  bool operator==(const Instance&) const = default;

  // True when a cached witness is present and actually satisfies both layers.
  bool witness_checks_out() const;
};

struct CountResult {
  uint64_t count = 0;   // exact when capped == false, otherwise equals cap
  bool capped = false;
  std::optional<BitVector> unique_solution;  // set when count == 1 exactly
};

// Count joint satisfying assignments (CNF and A x = b) up to `cap`.
// Enumeration strategy: when the affine coset of A x = b is narrow, scan the
// coset and test the CNF; otherwise enumerate CNF solutions by backtracking
// and filter through the linear system. Throws BudgetError when the coset
// dimension exceeds params.coset_dim_budget.
CountResult count_solutions_capped(const Instance& inst, uint64_t cap,
                                   const EnsembleParams& params);

// Same, with a partial assignment pinned (entries -1 free, 0/1 fixed).
CountResult count_solutions_capped_restricted(const Instance& inst, uint64_t cap,
                                              const EnsembleParams& params,
                                              const std::vector<int8_t>& fixed);

struct BlockSample {
  Instance inst;
  BitVector witness;
  uint32_t trials = 0;  // rejection-sampling attempts consumed
};

Cnf sample_base_cnf(const EnsembleParams& params, Rng& rng);

// Rejection-sample one on-promise block: fresh (F, h, A, b) per attempt,
// accepted when the joint solution count is exactly one. Throws BudgetError
// after params.max_trials failed attempts.
BlockSample sample_block(const EnsembleParams& params, Rng& rng);

// t independent blocks; block j draws from Rng(seed, stream_base + j), so
// permuting block indices permutes outputs and any worker layout produces
// identical tuples.
std::vector<BlockSample> sample_tuple(size_t t, const EnsembleParams& params,
                                      uint64_t seed, uint64_t stream_base);

struct IsolationStats {
  double rate = 0.0;
  uint64_t solution_count = 0;
  uint32_t k = 0;
};

// Empirical probability that a fresh uniform (A, b) with
// k = ceil(log2 |S|) + 1 rows cuts the solution set S of `f` down to exactly
// one assignment. Throws std::invalid_argument when f is unsatisfiable.
IsolationStats vv_isolation_rate(const SignedCnf& f, size_t n_draws, Rng& rng);

// Versioned binary record: magic, version, m, clause count, k, signed
// clauses, A, b, optional witness.
std::vector<uint8_t> serialize_instance(const Instance& inst);
Instance deserialize_instance(const std::vector<uint8_t>& bytes);

// DIMACS-style text export; XOR rows are emitted as "x" lines where negating
// the first literal encodes parity 0. Zero rows with b = 1 are unencodable
// and raise std::invalid_argument.
std::string to_dimacs(const Instance& inst);

}  // namespace lab
