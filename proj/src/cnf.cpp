#include "lab/cnf.hpp"

#include <algorithm>
#include <stdexcept>

namespace lab {

Mask Mask::identity(uint32_t m) {
  Mask h;
  h.pi.resize(m);
  for (uint32_t i = 0; i < m; ++i) h.pi[i] = i;
  h.sigma = BitVector(m);
  return h;
}

Mask Mask::random(uint32_t m, Rng& rng) {
  Mask h = identity(m);
  for (uint32_t i = m; i > 1; --i) {
    uint32_t j = static_cast<uint32_t>(rng.below(i));
    std::swap(h.pi[i - 1], h.pi[j]);
  }
  for (uint32_t v = 0; v < m; ++v) {
    if (rng.next_bit()) h.sigma.set(v, true);
  }
  return h;
}

void Mask::validate() const {
  const size_t m = pi.size();
  if (sigma.size() != m) {
    throw std::invalid_argument("Mask: sigma length does not match pi");
  }
  std::vector<uint8_t> seen(m, 0);
  for (uint32_t v : pi) {
    if (v >= m || seen[v]) {
      throw std::invalid_argument("Mask: pi is not a bijection on [0, m)");
    }
    seen[v] = 1;
  }
}

SignedCnf apply_mask(const Cnf& f, const Mask& h) {
  h.validate();
  if (h.pi.size() != f.m) {
    throw std::invalid_argument("apply_mask: mask arity does not match formula");
  }
  SignedCnf out;
  out.m = f.m;
  out.clauses.reserve(f.clauses.size());
  for (const auto& cl : f.clauses) {
    std::array<SignedLit, 3> lits;
    for (int s = 0; s < 3; ++s) {
      uint32_t v = h.pi[cl[s]];
      lits[s] = SignedLit{v, static_cast<uint8_t>(h.sigma.get(v) ? 1 : 0)};
    }
    std::sort(lits.begin(), lits.end(),
              [](const SignedLit& a, const SignedLit& b) { return a.var < b.var; });
    out.clauses.push_back(lits);
  }
  return out;
}

SignedCnf apply_mask_signed(const SignedCnf& f, const Mask& h) {
  h.validate();
  if (h.pi.size() != f.m) {
    throw std::invalid_argument("apply_mask_signed: mask arity mismatch");
  }
  SignedCnf out;
  out.m = f.m;
  out.clauses.reserve(f.clauses.size());
  for (const auto& cl : f.clauses) {
    std::array<SignedLit, 3> lits;
    for (int s = 0; s < 3; ++s) {
      uint32_t v = h.pi[cl[s].var];
      uint8_t neg = cl[s].neg ^ (h.sigma.get(v) ? 1 : 0);
      lits[s] = SignedLit{v, neg};
    }
    std::sort(lits.begin(), lits.end(),
              [](const SignedLit& a, const SignedLit& b) { return a.var < b.var; });
    out.clauses.push_back(lits);
  }
  return out;
}

SignedCnf flip_signs(const SignedCnf& f, const BitVector& sigma) {
  if (sigma.size() != f.m) {
    throw std::invalid_argument("flip_signs: sigma length does not match formula");
  }
  SignedCnf out = f;
  for (auto& cl : out.clauses) {
    for (auto& lit : cl) {
      if (sigma.get(lit.var)) lit.neg ^= 1;
    }
  }
  return out;
}

bool satisfies(const SignedCnf& f, const BitVector& x) {
  if (x.size() != f.m) {
    throw std::invalid_argument("satisfies: assignment length mismatch");
  }
  for (const auto& cl : f.clauses) {
    bool sat = false;
    for (const auto& lit : cl) {
      if (x.get(lit.var) != (lit.neg != 0)) {
        sat = true;
        break;
      }
    }
    if (!sat) return false;
  }
  return true;
}

namespace {

// Backtracking enumerator state. Clause bookkeeping: number of currently-true
// literals and number of unassigned literal slots per clause.
class Enumerator {
 public:
  Enumerator(const SignedCnf& f, const std::vector<int8_t>& fixed,
             const std::function<bool(uint64_t)>& cb)
      : f_(f), cb_(cb), vals_(f.m, -1), sat_(f.clauses.size(), 0),
        free_(f.clauses.size(), 3), occ_(f.m) {
    for (size_t c = 0; c < f_.clauses.size(); ++c) {
      for (const auto& lit : f_.clauses[c]) {
        occ_[lit.var].push_back({static_cast<uint32_t>(c), lit.neg});
      }
    }
    // Branch on high-occurrence variables first.
    order_.resize(f_.m);
    for (uint32_t v = 0; v < f_.m; ++v) order_[v] = v;
    std::stable_sort(order_.begin(), order_.end(), [&](uint32_t a, uint32_t b) {
      return occ_[a].size() > occ_[b].size();
    });
    fixed_ok_ = true;
    for (uint32_t v = 0; v < f_.m && fixed_ok_; ++v) {
      if (v < fixed.size() && fixed[v] >= 0) {
        fixed_ok_ = assign_and_propagate(v, fixed[v] != 0);
      }
    }
  }

  void run() {
    if (!fixed_ok_) return;
    search(0);
  }

 private:
  struct Occ {
    uint32_t clause;
    uint8_t neg;
  };

  bool assign(uint32_t v, bool val) {
    vals_[v] = val ? 1 : 0;
    trail_.push_back(v);
    // Process every occurrence even after a conflict: undo_to reverses the
    // whole occurrence list, so the updates must stay symmetric.
    bool ok = true;
    for (const Occ& o : occ_[v]) {
      if (val != (o.neg != 0)) {
        ++sat_[o.clause];
        --free_[o.clause];
      } else {
        --free_[o.clause];
        if (sat_[o.clause] == 0) {
          if (free_[o.clause] == 0) ok = false;  // conflict
          if (free_[o.clause] == 1) units_.push_back(o.clause);
        }
      }
    }
    return ok;
  }

  bool assign_and_propagate(uint32_t v, bool val) {
    units_.clear();
    if (vals_[v] >= 0) return vals_[v] == (val ? 1 : 0);
    if (!assign(v, val)) return false;
    while (!units_.empty()) {
      uint32_t c = units_.back();
      units_.pop_back();
      if (sat_[c] > 0 || free_[c] != 1) continue;  // stale unit
      const auto& cl = f_.clauses[c];
      for (const auto& lit : cl) {
        if (vals_[lit.var] < 0) {
          if (!assign(lit.var, lit.neg == 0)) return false;
          break;
        }
      }
    }
    return true;
  }

  void undo_to(size_t mark) {
    while (trail_.size() > mark) {
      uint32_t v = trail_.back();
      trail_.pop_back();
      bool val = vals_[v] == 1;
      vals_[v] = -1;
      for (const Occ& o : occ_[v]) {
        if (val != (o.neg != 0)) {
          --sat_[o.clause];
          ++free_[o.clause];
        } else {
          ++free_[o.clause];
        }
      }
    }
  }

  // Returns false to stop the whole enumeration.
  bool search(size_t order_pos) {
    while (order_pos < order_.size() && vals_[order_[order_pos]] >= 0) {
      ++order_pos;
    }
    if (order_pos == order_.size()) {
      uint64_t word = 0;
      for (uint32_t v = 0; v < f_.m; ++v) {
        if (vals_[v] == 1) word |= 1ULL << v;
      }
      return cb_(word);
    }
    uint32_t v = order_[order_pos];
    for (int val = 0; val < 2; ++val) {
      size_t mark = trail_.size();
      if (assign_and_propagate(v, val != 0)) {
        if (!search(order_pos + 1)) return false;
      }
      undo_to(mark);
    }
    return true;
  }

  const SignedCnf& f_;
  const std::function<bool(uint64_t)>& cb_;
  std::vector<int8_t> vals_;
  std::vector<int32_t> sat_;
  std::vector<int32_t> free_;
  std::vector<std::vector<Occ>> occ_;
  std::vector<uint32_t> order_;
  std::vector<uint32_t> trail_;
  std::vector<uint32_t> units_;
  bool fixed_ok_ = true;
};

}  // namespace

void enumerate_solutions(const SignedCnf& f, const std::vector<int8_t>& fixed,
                         const std::function<bool(uint64_t)>& on_solution) {
  if (f.m > 63) {
    throw std::invalid_argument("enumerate_solutions: m must be <= 63");
  }
  Enumerator e(f, fixed, on_solution);
  e.run();
}

std::vector<uint64_t> all_solutions(const SignedCnf& f) {
  std::vector<uint64_t> out;
  enumerate_solutions(f, {}, [&](uint64_t w) {
    out.push_back(w);
    return true;
  });
  return out;
}

}  // namespace lab
