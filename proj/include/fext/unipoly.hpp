#pragma once

#include <cassert>
#include <cstdint>
#include <utility>
#include <vector>

#include "fext/errors.hpp"
#include "fext/ratfunc.hpp"

namespace fext {

// Dense univariate polynomial over a field value type F.  The coefficient
// vector stores c[0] + c[1] x + ... with trailing zeros trimmed; an empty
// vector is the zero polynomial.  F must supply + - * / ==, plus the free
// shims zero_like / one_like / from_int / is_zero / inv_of / char_of.
template <class F>
struct PolyF {
  std::vector<F> c;

  bool is_zero() const { return c.empty(); }
  int deg() const { return static_cast<int>(c.size()) - 1; }
  const F& lc() const {
    assert(!c.empty());
    return c.back();
  }
};

namespace pf {

template <class F>
PolyF<F> trim(PolyF<F> f) {
  while (!f.c.empty() && is_zero(f.c.back())) f.c.pop_back();
  return f;
}

template <class F>
PolyF<F> zero() {
  return PolyF<F>{};
}

template <class F>
PolyF<F> constant(const F& a) {
  if (is_zero(a)) return PolyF<F>{};
  return PolyF<F>{{a}};
}

// x^k with unit leading coefficient shaped like `like`
template <class F>
PolyF<F> monomial(const F& like, size_t k) {
  PolyF<F> f;
  f.c.assign(k + 1, zero_like(like));
  f.c[k] = one_like(like);
  return f;
}

template <class F>
PolyF<F> from_coeffs(std::vector<F> cs) {
  return trim(PolyF<F>{std::move(cs)});
}

template <class F>
bool equal(const PolyF<F>& a, const PolyF<F>& b) {
  if (a.c.size() != b.c.size()) return false;
  for (size_t i = 0; i < a.c.size(); ++i)
    if (!(a.c[i] == b.c[i])) return false;
  return true;
}

template <class F>
PolyF<F> add(const PolyF<F>& a, const PolyF<F>& b) {
  const PolyF<F>& lo = a.c.size() <= b.c.size() ? a : b;
  const PolyF<F>& hi = a.c.size() <= b.c.size() ? b : a;
  PolyF<F> r = hi;
  for (size_t i = 0; i < lo.c.size(); ++i) r.c[i] = r.c[i] + lo.c[i];
  return trim(std::move(r));
}

template <class F>
PolyF<F> neg(PolyF<F> a) {
  for (auto& x : a.c) x = -x;
  return a;
}

template <class F>
PolyF<F> sub(const PolyF<F>& a, const PolyF<F>& b) {
  return add(a, neg(b));
}

template <class F>
PolyF<F> scale(PolyF<F> a, const F& s) {
  if (is_zero(s)) return PolyF<F>{};
  for (auto& x : a.c) x = x * s;
  return trim(std::move(a));
}

template <class F>
PolyF<F> mul(const PolyF<F>& a, const PolyF<F>& b) {
  if (a.is_zero() || b.is_zero()) return PolyF<F>{};
  PolyF<F> r;
  r.c.assign(a.c.size() + b.c.size() - 1, zero_like(a.c[0]));
  for (size_t i = 0; i < a.c.size(); ++i) {
    if (is_zero(a.c[i])) continue;
    for (size_t j = 0; j < b.c.size(); ++j)
      r.c[i + j] = r.c[i + j] + a.c[i] * b.c[j];
  }
  return trim(std::move(r));
}

// Euclidean division a = q*b + r with deg r < deg b.  Inverting the leading
// coefficient may throw (dynamic evaluation) when F is a quotient-ring value.
template <class F>
std::pair<PolyF<F>, PolyF<F>> divmod(const PolyF<F>& a, const PolyF<F>& b) {
  if (b.is_zero()) throw DivisionByZero();
  PolyF<F> r = a;
  if (r.c.size() < b.c.size()) return {PolyF<F>{}, std::move(r)};
  F linv = inv_of(b.lc());
  PolyF<F> q;
  q.c.assign(r.c.size() - b.c.size() + 1, zero_like(b.lc()));
  for (size_t sh = q.c.size(); sh-- > 0;) {
    size_t top = sh + b.c.size() - 1;
    if (top >= r.c.size() || is_zero(r.c[top])) continue;
    F f = r.c[top] * linv;
    q.c[sh] = f;
    for (size_t j = 0; j < b.c.size(); ++j)
      r.c[sh + j] = r.c[sh + j] - f * b.c[j];
  }
  r = trim(std::move(r));
  assert(r.is_zero() || r.deg() < b.deg());
  return {trim(std::move(q)), std::move(r)};
}

template <class F>
PolyF<F> mod(const PolyF<F>& a, const PolyF<F>& b) {
  return divmod(a, b).second;
}

template <class F>
PolyF<F> monic(PolyF<F> f) {
  if (f.is_zero()) return f;
  F linv = inv_of(f.lc());
  for (auto& x : f.c) x = x * linv;
  return f;
}

// monic gcd by the Euclidean algorithm
template <class F>
PolyF<F> gcd(PolyF<F> a, PolyF<F> b) {
  while (!b.is_zero()) {
    PolyF<F> r = mod(a, b);
    a = std::move(b);
    b = std::move(r);
  }
  return monic(std::move(a));
}

// g = u*a + v*b with g the monic gcd
template <class F>
struct Egcd {
  PolyF<F> g, u, v;
};

template <class F>
Egcd<F> extended_gcd(PolyF<F> a, PolyF<F> b) {
  if (a.is_zero() && b.is_zero()) return {a, a, b};
  F one = one_like(a.is_zero() ? b.c[0] : a.c[0]);
  PolyF<F> u0 = constant(one), v0 = zero<F>();
  PolyF<F> u1 = zero<F>(), v1 = constant(one);
  while (!b.is_zero()) {
    auto [q, r] = divmod(a, b);
    a = std::move(b);
    b = std::move(r);
    PolyF<F> u2 = sub(u0, mul(q, u1));
    PolyF<F> v2 = sub(v0, mul(q, v1));
    u0 = std::move(u1);
    u1 = std::move(u2);
    v0 = std::move(v1);
    v1 = std::move(v2);
  }
  if (a.is_zero()) return {a, u0, v0};
  F linv = inv_of(a.lc());
  return {monic(std::move(a)), scale(std::move(u0), linv), scale(std::move(v0), linv)};
}

template <class F>
PolyF<F> powmod(PolyF<F> base, uint64_t e, const PolyF<F>& m) {
  F one = one_like(m.lc());
  PolyF<F> r = constant(one);
  base = mod(base, m);
  while (e) {
    if (e & 1) r = mod(mul(r, base), m);
    e >>= 1;
    if (e) base = mod(mul(base, base), m);
  }
  return r;
}

template <class F>
PolyF<F> derivative(const PolyF<F>& f) {
  if (f.c.size() <= 1) return PolyF<F>{};
  PolyF<F> r;
  r.c.reserve(f.c.size() - 1);
  for (size_t i = 1; i < f.c.size(); ++i)
    r.c.push_back(f.c[i] * from_int(f.c[i], static_cast<int64_t>(i)));
  return trim(std::move(r));
}

template <class F>
F eval(const PolyF<F>& f, const F& x) {
  if (f.is_zero()) return zero_like(x);
  F r = zero_like(x);
  for (size_t i = f.c.size(); i-- > 0;) r = r * x + f.c[i];
  return r;
}

// f(g) for a polynomial argument
template <class F>
PolyF<F> compose(const PolyF<F>& f, const PolyF<F>& g) {
  PolyF<F> r;
  for (size_t i = f.c.size(); i-- > 0;) r = add(mul(r, g), constant(f.c[i]));
  return r;
}

template <class F>
std::string to_string(const PolyF<F>& f, const std::string& var,
                      std::string (*coeff_str)(const F&)) {
  if (f.is_zero()) return "0";
  std::string s;
  for (size_t i = f.c.size(); i-- > 0;) {
    if (is_zero(f.c[i])) continue;
    if (!s.empty()) s += " + ";
    std::string cs = coeff_str(f.c[i]);
    if (i == 0) {
      s += cs;
    } else {
      std::string xp = i == 1 ? var : var + "^" + std::to_string(i);
      if (cs == "1")
        s += xp;
      else
        s += "(" + cs + ")*" + xp;
    }
  }
  return s;
}

}  // namespace pf

// The working instantiation over the base field of rational functions.
using UniPoly = PolyF<RatFunc>;

namespace up {

inline UniPoly poly_gcd(const UniPoly& a, const UniPoly& b) { return pf::gcd(a, b); }

inline UniPoly formal_derivative(const UniPoly& f) { return pf::derivative(f); }

// Writes f(x) = g(x^{p^n}) with g separable; returns (g, n).  The coefficient
// list of g is exactly the surviving coefficients of f, in order.
inline std::pair<UniPoly, uint32_t> separable_presentation(const UniPoly& f) {
  if (f.deg() <= 0) return {f, 0};
  uint32_t p = char_of(f.c[0]);
  UniPoly g = f;
  uint32_t n = 0;
  while (g.deg() > 0 && pf::derivative(g).is_zero()) {
    UniPoly h;
    h.c.reserve(g.c.size() / p + 1);
    for (size_t i = 0; i < g.c.size(); i += p) h.c.push_back(g.c[i]);
    g = pf::trim(std::move(h));
    ++n;
  }
  return {g, n};
}

}  // namespace up

}  // namespace fext
