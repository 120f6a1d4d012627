#pragma once
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "fext/multipoly.hpp"

namespace fext {

struct BaseFieldDesc {
  uint32_t p = 2;
  std::vector<std::string> vars;

  BaseFieldDesc() = default;
  BaseFieldDesc(uint32_t p_, std::vector<std::string> vars_) : p(p_), vars(std::move(vars_)) {
    if (!fp::is_prime(p)) throw AlgebraError("characteristic must be prime");
    for (size_t i = 0; i < vars.size(); ++i)
      for (size_t j = i + 1; j < vars.size(); ++j)
        if (vars[i] == vars[j]) throw AlgebraError("variable names must be unique");
  }
  uint32_t nvars() const { return uint32_t(vars.size()); }
};

// Reduced rational function over F_p(t_1..t_m): gcd(num, den) = 1, den monic
// in graded-lex, zero is (0, 1). Representation is unique.
struct RatFunc {
  MultiPoly num, den;

  RatFunc() : num(mp::zero(2, 0)), den(mp::constant(2, 0, 1)) {}
  RatFunc(MultiPoly n, MultiPoly d) : num(std::move(n)), den(std::move(d)) { reduce(); }

  static RatFunc zero(uint32_t p, uint32_t nvars) {
    RatFunc r;
    r.num = mp::zero(p, nvars);
    r.den = mp::constant(p, nvars, 1);
    return r;
  }
  static RatFunc constant(uint32_t p, uint32_t nvars, int64_t c) {
    RatFunc r = zero(p, nvars);
    int64_t m = c % int64_t(p);
    if (m < 0) m += p;
    r.num = mp::constant(p, nvars, uint32_t(m));
    return r;
  }
  static RatFunc variable(uint32_t p, uint32_t nvars, uint32_t i) {
    RatFunc r = zero(p, nvars);
    r.num = mp::variable(p, nvars, i);
    return r;
  }
  static RatFunc from_poly(MultiPoly n) {
    RatFunc r = zero(n.p, n.nvars);
    r.num = std::move(n);
    return r;
  }

  uint32_t p() const { return num.p; }
  uint32_t nvars() const { return num.nvars; }
  bool is_zero() const { return num.is_zero(); }
  bool is_one() const { return num.is_one() && den.is_one(); }
  bool is_poly() const { return den.is_one(); }

  void reduce() {
    if (den.is_zero()) throw ZeroDenominator();
    if (num.is_zero()) {
      den = mp::constant(num.p, num.nvars, 1);
      return;
    }
    MultiPoly g = mp::gcd(num, den);
    if (!g.is_one()) {
      num = mp::div_exact(num, g);
      den = mp::div_exact(den, g);
    }
    uint32_t lc = den.terms[0].c;
    if (lc != 1) {
      uint32_t il = fp::inv(lc, num.p);
      num = mp::scale(num, il);
      den = mp::scale(den, il);
    }
  }

  friend RatFunc operator+(const RatFunc& a, const RatFunc& b) {
    if (a.is_zero()) return b;
    if (b.is_zero()) return a;
    RatFunc r;
    if (mp::equal(a.den, b.den)) {
      r.num = mp::add(a.num, b.num);
      r.den = a.den;
      if (r.num.is_zero()) return zero(a.p(), a.nvars());
      MultiPoly g = mp::gcd(r.num, r.den);
      if (!g.is_one()) {
        r.num = mp::div_exact(r.num, g);
        r.den = mp::div_exact(r.den, g);
      }
      return r;
    }
    MultiPoly g = mp::gcd(a.den, b.den);
    MultiPoly bd = mp::div_exact(a.den, g), dd = mp::div_exact(b.den, g);
    MultiPoly n = mp::add(mp::mul(a.num, dd), mp::mul(b.num, bd));
    if (n.is_zero()) return zero(a.p(), a.nvars());
    MultiPoly h = mp::gcd(n, g);
    if (!h.is_one()) {
      n = mp::div_exact(n, h);
      g = mp::div_exact(g, h);
    }
    r.num = std::move(n);
    r.den = mp::mul(mp::mul(g, bd), dd);
    uint32_t lc = r.den.terms[0].c;
    if (lc != 1) {
      uint32_t il = fp::inv(lc, r.num.p);
      r.num = mp::scale(r.num, il);
      r.den = mp::scale(r.den, il);
    }
    return r;
  }

  friend RatFunc operator-(const RatFunc& a) {
    RatFunc r = a;
    r.num = mp::neg(r.num);
    return r;
  }
  friend RatFunc operator-(const RatFunc& a, const RatFunc& b) { return a + (-b); }

  friend RatFunc operator*(const RatFunc& a, const RatFunc& b) {
    if (a.is_zero() || b.is_zero()) return zero(a.p(), a.nvars());
    // cross reduction keeps the product reduced without a large gcd
    MultiPoly g1 = mp::gcd(a.num, b.den), g2 = mp::gcd(b.num, a.den);
    MultiPoly n = mp::mul(g1.is_one() ? a.num : mp::div_exact(a.num, g1),
                          g2.is_one() ? b.num : mp::div_exact(b.num, g2));
    MultiPoly d = mp::mul(g2.is_one() ? a.den : mp::div_exact(a.den, g2),
                          g1.is_one() ? b.den : mp::div_exact(b.den, g1));
    RatFunc r;
    r.num = std::move(n);
    r.den = std::move(d);
    uint32_t lc = r.den.terms[0].c;
    if (lc != 1) {
      uint32_t il = fp::inv(lc, r.num.p);
      r.num = mp::scale(r.num, il);
      r.den = mp::scale(r.den, il);
    }
    return r;
  }

  RatFunc inv() const {
    if (is_zero()) throw DivisionByZero();
    RatFunc r;
    r.num = den;
    r.den = num;
    uint32_t lc = r.den.terms[0].c;
    if (lc != 1) {
      uint32_t il = fp::inv(lc, r.num.p);
      r.num = mp::scale(r.num, il);
      r.den = mp::scale(r.den, il);
    }
    return r;
  }

  friend RatFunc operator/(const RatFunc& a, const RatFunc& b) { return a * b.inv(); }

  friend bool operator==(const RatFunc& a, const RatFunc& b) {
    return mp::equal(a.num, b.num) && mp::equal(a.den, b.den);
  }
  friend bool operator!=(const RatFunc& a, const RatFunc& b) { return !(a == b); }
};

// generic scalar shims used by the templated linear algebra and polynomials
inline RatFunc zero_like(const RatFunc& a) { return RatFunc::zero(a.p(), a.nvars()); }
inline RatFunc one_like(const RatFunc& a) { return RatFunc::constant(a.p(), a.nvars(), 1); }
inline RatFunc from_int(const RatFunc& like, int64_t c) {
  return RatFunc::constant(like.p(), like.nvars(), c);
}
inline bool is_zero(const RatFunc& a) { return a.is_zero(); }
inline RatFunc inv_of(const RatFunc& a) { return a.inv(); }
inline uint32_t char_of(const RatFunc& a) { return a.p(); }

namespace rf {

inline int cmp(const RatFunc& a, const RatFunc& b) {
  int c = mp::cmp(a.num, b.num);
  if (c) return c;
  return mp::cmp(a.den, b.den);
}

// the normative normalization entry point: num/den as a reduced fraction
inline RatFunc ratfunc_normalize(const MultiPoly& num, const MultiPoly& den) {
  return RatFunc(num, den);
}

inline RatFunc frobenius_power(const RatFunc& a, uint32_t e) {
  if (e == 0) return a;
  RatFunc r;
  r.num = mp::frobenius(a.num, e);
  r.den = mp::frobenius(a.den, e);
  return r;  // already reduced: gcd(n,d)=1 implies gcd(n^q, d^q)=1; den stays monic
}

// p^e-th root where defined. A reduced monic-denominator fraction is a p^e-th
// power exactly when every exponent of num and den is divisible by p^e
// (uniqueness of the reduced form of (u/v)^q).
inline bool pe_root(const RatFunc& a, uint32_t e, RatFunc& out) {
  if (e == 0) { out = a; return true; }
  MultiPoly rn = a.num, rd = a.den;
  if (!mp::pe_root(a.num, e, rn)) return false;
  if (!mp::pe_root(a.den, e, rd)) return false;
  out = RatFunc(std::move(rn), std::move(rd));
  return true;
}

inline std::optional<RatFunc> pe_root(const RatFunc& a, uint32_t e) {
  RatFunc r;
  if (!pe_root(a, e, r)) return std::nullopt;
  return r;
}

inline std::string to_string(const RatFunc& a, const std::vector<std::string>& names) {
  if (a.is_poly()) return mp::to_string(a.num, names);
  std::string n = mp::to_string(a.num, names);
  std::string d = mp::to_string(a.den, names);
  if (a.num.terms.size() > 1) n = "(" + n + ")";
  if (a.den.terms.size() > 1) d = "(" + d + ")";
  return n + "/" + d;
}

}  // namespace rf
}  // namespace fext
