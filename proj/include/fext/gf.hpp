#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "fext/errors.hpp"
#include "fext/fp.hpp"
#include "fext/ratfunc.hpp"

namespace fext {

// Small finite fields F_p[z]/(m) used as specialization targets. A degree-1
// modulus models F_p itself.

struct GFCtx {
  uint32_t p = 0;
  fp::Vec m;  // monic irreducible

  uint32_t deg() const { return uint32_t(m.size()) - 1; }
  uint64_t order() const {
    uint64_t q = 1;
    for (uint32_t i = 0; i < deg(); ++i) q *= p;
    return q;
  }
};

using GFCtxPtr = std::shared_ptr<const GFCtx>;

struct GFElem {
  GFCtxPtr cx;
  fp::Vec v;  // reduced mod cx->m, trailing zeros trimmed

  bool is_zero() const { return v.empty(); }
};

namespace gf {

inline GFCtxPtr make_ctx(uint32_t p, uint32_t k) {
  auto c = std::make_shared<GFCtx>();
  c->p = p;
  c->m = fp::first_irreducible(p, k);
  return c;
}

inline GFElem reduce(GFCtxPtr cx, fp::Vec v) {
  v = fp::vmod(std::move(v), cx->m, cx->p);
  return GFElem{std::move(cx), std::move(v)};
}

inline GFElem zero(GFCtxPtr cx) { return GFElem{std::move(cx), {}}; }

inline GFElem from_uint(GFCtxPtr cx, uint32_t c) {
  c %= cx->p;
  if (c == 0) return zero(std::move(cx));
  return GFElem{std::move(cx), {c}};
}

// index in [0, order): base-p digit expansion, digit i = coefficient of z^i
inline GFElem from_index(GFCtxPtr cx, uint64_t idx) {
  fp::Vec v;
  uint32_t n = cx->deg();
  for (uint32_t i = 0; i < n; ++i) {
    v.push_back(uint32_t(idx % cx->p));
    idx /= cx->p;
  }
  while (!v.empty() && v.back() == 0) v.pop_back();
  return GFElem{std::move(cx), std::move(v)};
}

inline uint64_t to_index(const GFElem& a) {
  uint64_t idx = 0;
  for (size_t i = a.v.size(); i-- > 0;) idx = idx * a.cx->p + a.v[i];
  return idx;
}

// true when the element lies in the prime subfield
inline bool in_prime_field(const GFElem& a) { return a.v.size() <= 1; }

inline uint32_t prime_part(const GFElem& a) { return a.v.empty() ? 0 : a.v[0]; }

inline std::string to_string(const GFElem& a) {
  if (a.v.empty()) return "0";
  std::string s;
  for (size_t i = a.v.size(); i-- > 0;) {
    if (!s.empty()) s += "+";
    if (i == 0)
      s += std::to_string(a.v[i]);
    else {
      if (a.v[i] != 1) s += std::to_string(a.v[i]) + "*";
      s += "z";
      if (i > 1) s += "^" + std::to_string(i);
    }
  }
  return s;
}

}  // namespace gf

inline GFElem operator+(const GFElem& a, const GFElem& b) {
  return GFElem{a.cx, fp::vadd(a.v, b.v, a.cx->p)};
}

inline GFElem operator-(const GFElem& a, const GFElem& b) {
  return GFElem{a.cx, fp::vsub(a.v, b.v, a.cx->p)};
}

inline GFElem operator-(const GFElem& a) {
  fp::Vec v = a.v;
  for (auto& c : v) c = fp::neg(c, a.cx->p);
  return GFElem{a.cx, std::move(v)};
}

inline GFElem operator*(const GFElem& a, const GFElem& b) {
  return gf::reduce(a.cx, fp::vmul(a.v, b.v, a.cx->p));
}

inline bool operator==(const GFElem& a, const GFElem& b) { return a.v == b.v; }
inline bool operator!=(const GFElem& a, const GFElem& b) { return !(a.v == b.v); }

namespace gf {

// extended Euclid over F_p[x] for modular inversion
inline GFElem inv(const GFElem& a) {
  if (a.is_zero()) throw DivisionByZero();
  uint32_t p = a.cx->p;
  fp::Vec r0 = a.cx->m, r1 = a.v, s0 = {}, s1 = {1};
  while (!r1.empty()) {
    fp::Vec q, r;
    fp::vdivmod(r0, r1, q, r, p);
    fp::Vec s2 = fp::vsub(s0, fp::vmul(q, s1, p), p);
    r0 = std::move(r1);
    r1 = std::move(r);
    s0 = std::move(s1);
    s1 = std::move(s2);
  }
  // r0 = gcd, a unit since m is irreducible and a != 0
  uint32_t lead = fp::inv(r0.back(), p);
  fp::Vec out;
  for (auto c : s0) out.push_back(fp::mul(c, lead, p));
  return reduce(a.cx, std::move(out));
}

inline GFElem pow(GFElem a, uint64_t e) {
  GFElem r = from_uint(a.cx, 1);
  while (e) {
    if (e & 1) r = r * a;
    a = a * a;
    e >>= 1;
  }
  return r;
}

// evaluate a single-variable rational function; nullopt when the denominator
// vanishes at the point
inline std::optional<GFElem> eval_ratfunc(const RatFunc& a, const GFElem& tau) {
  if (a.nvars() != 1) throw AlgebraError("eval_ratfunc: univariate base required");
  auto evalp = [&](const MultiPoly& f) {
    GFElem acc = zero(tau.cx);
    for (const auto& t : f.terms)
      acc = acc + from_uint(tau.cx, t.c) * pow(tau, t.e[0]);
    return acc;
  };
  GFElem d = evalp(a.den);
  if (d.is_zero()) return std::nullopt;
  return evalp(a.num) * inv(d);
}

}  // namespace gf

// scalar shims so the generic polynomial and linear algebra run over GFElem
inline GFElem zero_like(const GFElem& a) { return gf::zero(a.cx); }
inline GFElem one_like(const GFElem& a) { return gf::from_uint(a.cx, 1); }
inline GFElem from_int(const GFElem& like, int64_t c) {
  int64_t m = int64_t(like.cx->p);
  int64_t r = ((c % m) + m) % m;
  return gf::from_uint(like.cx, uint32_t(r));
}
inline bool is_zero(const GFElem& a) { return a.is_zero(); }
inline GFElem inv_of(const GFElem& a) { return gf::inv(a); }
inline uint32_t char_of(const GFElem& a) { return a.cx->p; }
inline std::string repr_scalar(const GFElem& a, const std::vector<std::string>&) {
  return gf::to_string(a);
}

}  // namespace fext
