#include "lab/gf2k.hpp"

#include <bit>
#include <map>
#include <mutex>
#include <stdexcept>

namespace lab {

namespace {

int poly_degree(u128 a) {
  if (a == 0) return -1;
  uint64_t hi = static_cast<uint64_t>(a >> 64);
  if (hi != 0) return 127 - std::countl_zero(hi);
  return 63 - std::countl_zero(static_cast<uint64_t>(a));
}

// Remainder of polynomial division over GF(2).
u128 poly_mod(u128 a, u128 b) {
  int db = poly_degree(b);
  for (int da = poly_degree(a); da >= db; da = poly_degree(a)) {
    a ^= b << (da - db);
  }
  return a;
}

u128 poly_gcd(u128 a, u128 b) {
  while (b != 0) {
    a = poly_mod(a, b);
    std::swap(a, b);
  }
  return a;
}

// Multiplication of a and b modulo f (f monic of degree `deg`), with the
// reduction interleaved so intermediates stay below 2^(deg+1).
u128 mulmod(u128 a, u128 b, u128 f, int deg) {
  u128 res = 0;
  u128 top = static_cast<u128>(1) << deg;
  while (b != 0) {
    if (b & 1) res ^= a;
    b >>= 1;
    a <<= 1;
    if (a & top) a ^= f;
  }
  return res;
}

std::vector<int> prime_divisors(int n) {
  std::vector<int> out;
  for (int p = 2; p * p <= n; ++p) {
    if (n % p == 0) {
      out.push_back(p);
      while (n % p == 0) n /= p;
    }
  }
  if (n > 1) out.push_back(n);
  return out;
}

}  // namespace

bool Gf2k::is_irreducible(u128 f, int degree) {
  if (degree < 1 || poly_degree(f) != degree) return false;
  if ((f & 1) == 0) return degree == 1 && f == 2;  // divisible by x
  // Rabin's test: x^(2^degree) == x mod f, and for every prime p | degree,
  // gcd(x^(2^(degree/p)) - x, f) == 1.
  auto x_to_2e = [&](int e) {
    u128 acc = 2;  // the polynomial x
    for (int i = 0; i < e; ++i) acc = mulmod(acc, acc, f, degree);
    return acc;
  };
  if (x_to_2e(degree) != 2) return false;
  for (int p : prime_divisors(degree)) {
    u128 t = x_to_2e(degree / p) ^ 2;
    if (poly_degree(poly_gcd(f, t)) != 0) return false;
  }
  return true;
}

u128 Gf2k::lex_least_irreducible(int degree) {
  if (degree < 1 || degree > 120) {
    throw std::invalid_argument("lex_least_irreducible: degree out of range [1,120]");
  }
  if (degree == 1) return 2;  // x
  static std::mutex mu;
  static std::map<int, u128> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(degree);
  if (it != cache.end()) return it->second;
  u128 top = static_cast<u128>(1) << degree;
  for (u128 low = 1;; low += 2) {  // constant term must be 1
    if (low >= top) throw std::logic_error("no irreducible polynomial found");
    u128 cand = top | low;
    if (is_irreducible(cand, degree)) {
      cache[degree] = cand;
      return cand;
    }
  }
}

Gf2k::Gf2k(int width) : w_(width) {
  if (width < 2 || width > 120) {
    throw std::invalid_argument("Gf2k: width out of range [2,120]");
  }
  poly_ = lex_least_irreducible(width);
  mask_ = (static_cast<u128>(1) << width) - 1;
}

u128 Gf2k::mul(u128 a, u128 b) const {
  return mulmod(a & mask_, b & mask_, poly_, w_);
}

u128 Gf2k::pow(u128 a, uint64_t e) const {
  u128 result = 1;
  u128 base = a & mask_;
  while (e != 0) {
    if (e & 1) result = mul(result, base);
    base = mul(base, base);
    e >>= 1;
  }
  return result;
}

u128 Gf2k::eval_poly(const std::vector<u128>& coeffs, u128 point) const {
  u128 acc = 0;
  for (size_t i = coeffs.size(); i-- > 0;) {
    acc = mul(acc, point) ^ (coeffs[i] & mask_);
  }
  return acc;
}

}  // namespace lab
