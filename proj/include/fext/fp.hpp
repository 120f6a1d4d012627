#pragma once
#include <cassert>
#include <cstdint>
#include <vector>

#include "fext/errors.hpp"

namespace fext {

// Residue arithmetic mod a prime p < 2^31.
namespace fp {

inline bool is_prime(uint64_t p) {
  if (p < 2) return false;
  for (uint64_t d = 2; d * d <= p; ++d)
    if (p % d == 0) return false;
  return true;
}

inline uint32_t add(uint32_t a, uint32_t b, uint32_t p) {
  uint64_t s = uint64_t(a) + b;
  return s >= p ? uint32_t(s - p) : uint32_t(s);
}

inline uint32_t sub(uint32_t a, uint32_t b, uint32_t p) {
  return a >= b ? a - b : uint32_t(a + uint64_t(p) - b);
}

inline uint32_t neg(uint32_t a, uint32_t p) { return a == 0 ? 0 : p - a; }

inline uint32_t mul(uint32_t a, uint32_t b, uint32_t p) {
  return uint32_t(uint64_t(a) * b % p);
}

inline uint32_t pow(uint32_t a, uint64_t e, uint32_t p) {
  uint32_t r = 1 % p;
  while (e) {
    if (e & 1) r = mul(r, a, p);
    a = mul(a, a, p);
    e >>= 1;
  }
  return r;
}

inline uint32_t inv(uint32_t a, uint32_t p) {
  if (a == 0) throw DivisionByZero();
  // extended Euclid
  int64_t t = 0, nt = 1, r = p, nr = a;
  while (nr != 0) {
    int64_t q = r / nr;
    int64_t tmp = t - q * nt; t = nt; nt = tmp;
    tmp = r - q * nr; r = nr; nr = tmp;
  }
  assert(r == 1);
  if (t < 0) t += p;
  return uint32_t(t);
}

// Dense univariate polynomials over F_p: coefficient vectors, index = degree,
// trailing (highest-index) zeros trimmed. The zero polynomial is {}.
using Vec = std::vector<uint32_t>;

inline void trim(Vec& f) {
  while (!f.empty() && f.back() == 0) f.pop_back();
}

inline int deg(const Vec& f) { return int(f.size()) - 1; }

inline Vec vadd(const Vec& a, const Vec& b, uint32_t p) {
  Vec r(std::max(a.size(), b.size()), 0);
  for (size_t i = 0; i < a.size(); ++i) r[i] = a[i];
  for (size_t i = 0; i < b.size(); ++i) r[i] = add(r[i], b[i], p);
  trim(r);
  return r;
}

inline Vec vsub(const Vec& a, const Vec& b, uint32_t p) {
  Vec r(std::max(a.size(), b.size()), 0);
  for (size_t i = 0; i < a.size(); ++i) r[i] = a[i];
  for (size_t i = 0; i < b.size(); ++i) r[i] = sub(r[i], b[i], p);
  trim(r);
  return r;
}

inline Vec vmul(const Vec& a, const Vec& b, uint32_t p) {
  if (a.empty() || b.empty()) return {};
  Vec r(a.size() + b.size() - 1, 0);
  for (size_t i = 0; i < a.size(); ++i) {
    if (a[i] == 0) continue;
    for (size_t j = 0; j < b.size(); ++j)
      r[i + j] = uint32_t((r[i + j] + uint64_t(a[i]) * b[j]) % p);
  }
  trim(r);
  return r;
}

inline Vec vscale(const Vec& a, uint32_t c, uint32_t p) {
  Vec r(a.size());
  for (size_t i = 0; i < a.size(); ++i) r[i] = mul(a[i], c, p);
  trim(r);
  return r;
}

// division with remainder; divisor must be nonzero
inline void vdivmod(const Vec& a, const Vec& b, Vec& q, Vec& r, uint32_t p) {
  assert(!b.empty());
  r = a;
  q.assign(a.size() > b.size() ? a.size() - b.size() + 1 : 1, 0);
  uint32_t ilc = inv(b.back(), p);
  while (r.size() >= b.size() && !r.empty()) {
    uint32_t c = mul(r.back(), ilc, p);
    size_t shift = r.size() - b.size();
    q[shift] = c;
    for (size_t i = 0; i < b.size(); ++i)
      r[i + shift] = sub(r[i + shift], mul(c, b[i], p), p);
    trim(r);
    if (r.size() < b.size()) break;
  }
  trim(q);
}

inline Vec vmod(const Vec& a, const Vec& b, uint32_t p) {
  Vec q, r;
  vdivmod(a, b, q, r, p);
  return r;
}

inline Vec vgcd(Vec a, Vec b, uint32_t p) {
  while (!b.empty()) {
    Vec r = vmod(a, b, p);
    a = std::move(b);
    b = std::move(r);
  }
  if (!a.empty() && a.back() != 1) a = vscale(a, inv(a.back(), p), p);
  return a;
}

inline Vec vpowmod(Vec base, uint64_t e, const Vec& mod, uint32_t p) {
  Vec r{1 % p};
  trim(r);
  base = vmod(base, mod, p);
  while (e) {
    if (e & 1) r = vmod(vmul(r, base, p), mod, p);
    base = vmod(vmul(base, base, p), mod, p);
    e >>= 1;
  }
  return r;
}

inline bool is_irreducible(const Vec& f, uint32_t p) {
  int n = deg(f);
  if (n < 1) return false;
  if (n == 1) return true;
  // x^(p^n) = x mod f, and gcd(x^(p^(n/q)) - x, f) = 1 for prime divisors q of n
  Vec x{0, 1};
  uint64_t pn = 1;
  for (int i = 0; i < n; ++i) pn *= p;
  Vec xp = vpowmod(x, pn, f, p);
  if (vsub(xp, x, p) != Vec{}) return false;
  for (int q = 2; q <= n; ++q) {
    if (n % q != 0) continue;
    bool qprime = true;
    for (int d = 2; d * d <= q; ++d)
      if (q % d == 0) { qprime = false; break; }
    if (!qprime) continue;
    uint64_t pm = 1;
    for (int i = 0; i < n / q; ++i) pm *= p;
    Vec g = vgcd(f, vsub(vpowmod(x, pm, f, p), x, p), p);
    if (deg(g) != 0) return false;
  }
  return true;
}

// First irreducible monic polynomial of degree k over F_p in the
// lexicographic enumeration of coefficient tuples (constant term fastest).
inline Vec first_irreducible(uint32_t p, uint32_t k) {
  assert(k >= 1);
  Vec f(k + 1, 0);
  f[k] = 1;
  uint64_t total = 1;
  for (uint32_t i = 0; i < k; ++i) total *= p;
  for (uint64_t code = 0; code < total; ++code) {
    uint64_t c = code;
    for (uint32_t i = 0; i < k; ++i) {
      f[i] = uint32_t(c % p);
      c /= p;
    }
    if (is_irreducible(f, p)) return f;
  }
  assert(false && "irreducible polynomial of every degree exists");
  return f;
}

}  // namespace fp
}  // namespace fext
