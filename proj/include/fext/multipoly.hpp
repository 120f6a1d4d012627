#pragma once
#include <algorithm>
#include <cassert>
#include <cstdint>
#include <string>
#include <vector>

#include "fext/fp.hpp"

namespace fext {

// Multivariate polynomial over F_p in a fixed ordered list of variables.
// Terms are kept in strictly descending graded-lexicographic order with no
// zero coefficients, so representation is unique.
struct MultiPoly {
  struct Term {
    std::vector<uint32_t> e;  // exponent vector, length nvars
    uint32_t c;               // coefficient in [1, p)
  };

  uint32_t p = 2;
  uint32_t nvars = 0;
  std::vector<Term> terms;

  bool is_zero() const { return terms.empty(); }
  bool is_constant() const {
    return terms.empty() || (terms.size() == 1 && total_deg(terms[0].e) == 0);
  }
  uint32_t constant_value() const {
    assert(is_constant());
    return terms.empty() ? 0 : terms[0].c;
  }
  bool is_one() const { return is_constant() && constant_value() == 1; }

  static uint32_t total_deg(const std::vector<uint32_t>& e) {
    uint32_t s = 0;
    for (uint32_t x : e) s += x;
    return s;
  }

  // graded-lex: higher total degree first, ties by lex on the declared order
  static int cmp_exp(const std::vector<uint32_t>& a, const std::vector<uint32_t>& b) {
    uint32_t da = total_deg(a), db = total_deg(b);
    if (da != db) return da < db ? -1 : 1;
    for (size_t i = 0; i < a.size(); ++i)
      if (a[i] != b[i]) return a[i] < b[i] ? -1 : 1;
    return 0;
  }

  int total_degree() const { return terms.empty() ? -1 : int(total_deg(terms[0].e)); }

  uint32_t deg_in(uint32_t var) const {
    uint32_t d = 0;
    for (const auto& t : terms) d = std::max(d, t.e[var]);
    return d;
  }
};

namespace mp {

inline MultiPoly zero(uint32_t p, uint32_t nvars) { return MultiPoly{p, nvars, {}}; }

inline MultiPoly constant(uint32_t p, uint32_t nvars, uint32_t c) {
  MultiPoly r{p, nvars, {}};
  c %= p;
  if (c) r.terms.push_back({std::vector<uint32_t>(nvars, 0), c});
  return r;
}

inline MultiPoly variable(uint32_t p, uint32_t nvars, uint32_t i) {
  assert(i < nvars);
  MultiPoly r{p, nvars, {}};
  std::vector<uint32_t> e(nvars, 0);
  e[i] = 1;
  r.terms.push_back({std::move(e), 1});
  return r;
}

// sort descending and combine equal exponent vectors; drop zeros
inline void normalize(MultiPoly& f) {
  std::sort(f.terms.begin(), f.terms.end(), [](const auto& a, const auto& b) {
    return MultiPoly::cmp_exp(a.e, b.e) > 0;
  });
  std::vector<MultiPoly::Term> out;
  out.reserve(f.terms.size());
  for (auto& t : f.terms) {
    if (!out.empty() && out.back().e == t.e)
      out.back().c = fp::add(out.back().c, t.c, f.p);
    else
      out.push_back(std::move(t));
    if (!out.empty() && out.back().c == 0) out.pop_back();
  }
  f.terms = std::move(out);
}

inline MultiPoly add(const MultiPoly& a, const MultiPoly& b) {
  assert(a.p == b.p && a.nvars == b.nvars);
  MultiPoly r{a.p, a.nvars, {}};
  r.terms.reserve(a.terms.size() + b.terms.size());
  size_t i = 0, j = 0;
  while (i < a.terms.size() && j < b.terms.size()) {
    int c = MultiPoly::cmp_exp(a.terms[i].e, b.terms[j].e);
    if (c > 0) r.terms.push_back(a.terms[i++]);
    else if (c < 0) r.terms.push_back(b.terms[j++]);
    else {
      uint32_t s = fp::add(a.terms[i].c, b.terms[j].c, a.p);
      if (s) r.terms.push_back({a.terms[i].e, s});
      ++i; ++j;
    }
  }
  for (; i < a.terms.size(); ++i) r.terms.push_back(a.terms[i]);
  for (; j < b.terms.size(); ++j) r.terms.push_back(b.terms[j]);
  return r;
}

inline MultiPoly neg(const MultiPoly& a) {
  MultiPoly r = a;
  for (auto& t : r.terms) t.c = fp::neg(t.c, a.p);
  return r;
}

inline MultiPoly sub(const MultiPoly& a, const MultiPoly& b) { return add(a, neg(b)); }

inline MultiPoly scale(const MultiPoly& a, uint32_t c) {
  c %= a.p;
  if (c == 0) return zero(a.p, a.nvars);
  MultiPoly r = a;
  for (auto& t : r.terms) t.c = fp::mul(t.c, c, a.p);
  return r;
}

inline MultiPoly mul(const MultiPoly& a, const MultiPoly& b) {
  assert(a.p == b.p && a.nvars == b.nvars);
  MultiPoly r{a.p, a.nvars, {}};
  if (a.is_zero() || b.is_zero()) return r;
  if (a.is_constant()) return scale(b, a.constant_value());
  if (b.is_constant()) return scale(a, b.constant_value());
  if (a.nvars == 1) {
    // dense fast path
    uint32_t da = a.terms[0].e[0], db = b.terms[0].e[0];
    fp::Vec va(da + 1, 0), vb(db + 1, 0);
    for (const auto& t : a.terms) va[t.e[0]] = t.c;
    for (const auto& t : b.terms) vb[t.e[0]] = t.c;
    fp::Vec vc = fp::vmul(va, vb, a.p);
    for (size_t d = vc.size(); d-- > 0;)
      if (vc[d]) r.terms.push_back({{uint32_t(d)}, vc[d]});
    return r;
  }
  r.terms.reserve(a.terms.size() * b.terms.size());
  for (const auto& ta : a.terms)
    for (const auto& tb : b.terms) {
      std::vector<uint32_t> e(a.nvars);
      for (uint32_t k = 0; k < a.nvars; ++k) e[k] = ta.e[k] + tb.e[k];
      r.terms.push_back({std::move(e), fp::mul(ta.c, tb.c, a.p)});
    }
  normalize(r);
  return r;
}

inline MultiPoly pow(MultiPoly a, uint64_t e) {
  MultiPoly r = constant(a.p, a.nvars, 1);
  while (e) {
    if (e & 1) r = mul(r, a);
    a = mul(a, a);
    e >>= 1;
  }
  return r;
}

inline bool equal(const MultiPoly& a, const MultiPoly& b) {
  if (a.p != b.p || a.nvars != b.nvars || a.terms.size() != b.terms.size()) return false;
  for (size_t i = 0; i < a.terms.size(); ++i)
    if (a.terms[i].e != b.terms[i].e || a.terms[i].c != b.terms[i].c) return false;
  return true;
}

// total order for deterministic sorting of polynomials
inline int cmp(const MultiPoly& a, const MultiPoly& b) {
  size_t n = std::min(a.terms.size(), b.terms.size());
  for (size_t i = 0; i < n; ++i) {
    int c = MultiPoly::cmp_exp(a.terms[i].e, b.terms[i].e);
    if (c) return c;
    if (a.terms[i].c != b.terms[i].c) return a.terms[i].c < b.terms[i].c ? -1 : 1;
  }
  if (a.terms.size() != b.terms.size()) return a.terms.size() < b.terms.size() ? -1 : 1;
  return 0;
}

// a ^ (p^e): exponent vectors scale, F_p coefficients are Frobenius-fixed
inline MultiPoly frobenius(const MultiPoly& a, uint32_t e) {
  uint64_t q = 1;
  for (uint32_t i = 0; i < e; ++i) q *= a.p;
  MultiPoly r = a;
  for (auto& t : r.terms)
    for (auto& x : t.e) x = uint32_t(x * q);
  return r;
}

// inverse of frobenius where defined
inline bool pe_root(const MultiPoly& a, uint32_t e, MultiPoly& out) {
  uint64_t q = 1;
  for (uint32_t i = 0; i < e; ++i) q *= a.p;
  MultiPoly r = a;
  for (auto& t : r.terms)
    for (auto& x : t.e) {
      if (x % q != 0) return false;
      x = uint32_t(x / q);
    }
  out = std::move(r);
  return true;
}

inline MultiPoly derivative(const MultiPoly& a, uint32_t var) {
  MultiPoly r{a.p, a.nvars, {}};
  for (const auto& t : a.terms) {
    uint32_t k = t.e[var] % a.p;
    if (t.e[var] == 0 || k == 0) continue;
    auto e = t.e;
    e[var] -= 1;
    r.terms.push_back({std::move(e), fp::mul(t.c, k, a.p)});
  }
  normalize(r);
  return r;
}

template <class T>
T tpow(T a, uint64_t e, const T& one) {
  T r = one;
  while (e) {
    if (e & 1) r = r * a;
    a = a * a;
    e >>= 1;
  }
  return r;
}

// generic evaluation: substitute vals[i] for variable i in a commutative ring;
// embed maps an F_p residue into the ring
template <class T, class Embed>
T eval(const MultiPoly& f, const std::vector<T>& vals, const T& zero_, const T& one_,
       Embed embed) {
  T acc = zero_;
  for (const auto& t : f.terms) {
    T m = embed(t.c);
    for (uint32_t i = 0; i < f.nvars; ++i)
      if (t.e[i] > 0) m = m * tpow(vals[i], t.e[i], one_);
    acc = acc + m;
  }
  return acc;
}

std::string to_string(const MultiPoly& f, const std::vector<std::string>& names);

// ---- multivariate gcd: content / primitive-part Euclid on a recursive view ----

// view f as univariate in `var`: coeffs[d] collects terms with e[var] == d (exponent zeroed)
inline std::vector<MultiPoly> univariatize(const MultiPoly& f, uint32_t var) {
  std::vector<MultiPoly> out(f.deg_in(var) + 1, zero(f.p, f.nvars));
  if (f.is_zero()) { out.assign(1, zero(f.p, f.nvars)); return out; }
  for (const auto& t : f.terms) {
    auto e = t.e;
    uint32_t d = e[var];
    e[var] = 0;
    out[d].terms.push_back({std::move(e), t.c});
  }
  for (auto& c : out) normalize(c);
  return out;
}

inline MultiPoly recombine(const std::vector<MultiPoly>& cs, uint32_t var, uint32_t p, uint32_t nvars) {
  MultiPoly r{p, nvars, {}};
  for (size_t d = 0; d < cs.size(); ++d)
    for (const auto& t : cs[d].terms) {
      auto e = t.e;
      e[var] = uint32_t(d);
      r.terms.push_back({std::move(e), t.c});
    }
  normalize(r);
  return r;
}

MultiPoly gcd(const MultiPoly& a, const MultiPoly& b);
MultiPoly div_exact(const MultiPoly& a, const MultiPoly& b);

// normalize so the graded-lex leading coefficient is 1
inline MultiPoly monic(const MultiPoly& f) {
  if (f.is_zero()) return f;
  return scale(f, fp::inv(f.terms[0].c, f.p));
}

inline std::vector<uint32_t> active_vars(const MultiPoly& a, const MultiPoly& b) {
  std::vector<uint32_t> v;
  for (uint32_t i = 0; i < a.nvars; ++i)
    if (a.deg_in(i) > 0 || b.deg_in(i) > 0) v.push_back(i);
  return v;
}

inline fp::Vec to_dense(const MultiPoly& f, uint32_t var) {
  fp::Vec v(f.is_zero() ? 0 : f.deg_in(var) + 1, 0);
  for (const auto& t : f.terms) v[t.e[var]] = t.c;
  fp::trim(v);
  return v;
}

inline MultiPoly from_dense(const fp::Vec& v, uint32_t var, uint32_t p, uint32_t nvars) {
  MultiPoly r{p, nvars, {}};
  for (size_t d = v.size(); d-- > 0;)
    if (v[d]) {
      std::vector<uint32_t> e(nvars, 0);
      e[var] = uint32_t(d);
      r.terms.push_back({std::move(e), v[d]});
    }
  return r;
}

// content of f viewed univariately in var: gcd of the coefficients
inline MultiPoly content_in(const MultiPoly& f, uint32_t var) {
  auto cs = univariatize(f, var);
  MultiPoly g = zero(f.p, f.nvars);
  for (const auto& c : cs) {
    if (c.is_zero()) continue;
    g = g.is_zero() ? monic(c) : gcd(g, c);
    if (g.is_one()) break;
  }
  return g;
}

// pseudo-remainder of a by b in variable var (b nonzero in var)
inline MultiPoly prem(MultiPoly a, const MultiPoly& b, uint32_t var) {
  uint32_t db = b.deg_in(var);
  auto bu = univariatize(b, var);
  const MultiPoly& lb = bu[db];
  while (!a.is_zero() && a.deg_in(var) >= db) {
    auto au = univariatize(a, var);
    uint32_t da = uint32_t(au.size()) - 1;
    const MultiPoly& la = au[da];
    // a := lb*a - la*x^(da-db)*b
    MultiPoly s1 = mul(lb, a);
    MultiPoly m = la;
    MultiPoly xshift = zero(a.p, a.nvars);
    {
      std::vector<uint32_t> e(a.nvars, 0);
      e[var] = da - db;
      xshift.terms.push_back({std::move(e), 1});
    }
    MultiPoly s2 = mul(mul(m, xshift), b);
    a = sub(s1, s2);
  }
  return a;
}

inline MultiPoly gcd(const MultiPoly& a, const MultiPoly& b) {
  assert(a.p == b.p && a.nvars == b.nvars);
  if (a.is_zero()) return monic(b);
  if (b.is_zero()) return monic(a);
  if (a.is_constant() || b.is_constant()) return constant(a.p, a.nvars, 1);
  auto act = active_vars(a, b);
  assert(!act.empty());
  if (act.size() == 1) {
    uint32_t v = act[0];
    fp::Vec g = fp::vgcd(to_dense(a, v), to_dense(b, v), a.p);
    return from_dense(g, v, a.p, a.nvars);
  }
  // choose the active variable of least maximal degree (ties: lowest index)
  uint32_t var = act[0];
  uint32_t best = std::max(a.deg_in(act[0]), b.deg_in(act[0]));
  for (uint32_t v : act) {
    uint32_t d = std::max(a.deg_in(v), b.deg_in(v));
    if (d > 0 && d < best) { best = d; var = v; }
  }
  MultiPoly f = a, g = b;
  if (f.deg_in(var) == 0 || g.deg_in(var) == 0) {
    // one side free of var: gcd divides the content of the other
    if (f.deg_in(var) != 0) std::swap(f, g);
    return gcd(f, content_in(g, var));
  }
  MultiPoly cf = content_in(f, var), cg = content_in(g, var);
  MultiPoly c = gcd(cf, cg);
  f = div_exact(f, cf);
  g = div_exact(g, cg);
  if (f.deg_in(var) < g.deg_in(var)) std::swap(f, g);
  while (!g.is_zero()) {
    MultiPoly r = prem(f, g, var);
    f = std::move(g);
    if (r.is_zero()) { g = r; break; }
    g = div_exact(r, content_in(r, var));
  }
  return monic(mul(c, div_exact(f, content_in(f, var))));
}

// exact division (caller guarantees divisibility)
inline MultiPoly div_exact(const MultiPoly& a, const MultiPoly& b) {
  assert(!b.is_zero());
  if (a.is_zero()) return a;
  if (b.is_constant()) return scale(a, fp::inv(b.constant_value(), a.p));
  // highest active variable of b
  uint32_t var = 0;
  for (uint32_t i = 0; i < b.nvars; ++i)
    if (b.deg_in(i) > 0) var = i;
  if (a.nvars == 1 || active_vars(a, b) == std::vector<uint32_t>{var}) {
    fp::Vec q, r;
    fp::vdivmod(to_dense(a, var), to_dense(b, var), q, r, a.p);
    assert(r.empty() && "division must be exact");
    return from_dense(q, var, a.p, a.nvars);
  }
  auto bu = univariatize(b, var);
  uint32_t db = uint32_t(bu.size()) - 1;
  MultiPoly rem = a;
  std::vector<MultiPoly> qcoef;
  while (!rem.is_zero() && rem.deg_in(var) >= db) {
    auto ru = univariatize(rem, var);
    uint32_t dr = uint32_t(ru.size()) - 1;
    MultiPoly qc = div_exact(ru[dr], bu[db]);
    if (qcoef.size() < dr - db + 1) qcoef.resize(dr - db + 1, zero(a.p, a.nvars));
    qcoef[dr - db] = add(qcoef[dr - db], qc);
    MultiPoly xshift{a.p, a.nvars, {}};
    {
      std::vector<uint32_t> e(a.nvars, 0);
      e[var] = dr - db;
      xshift.terms.push_back({std::move(e), 1});
    }
    rem = sub(rem, mul(mul(qc, xshift), b));
    assert(rem.is_zero() || rem.deg_in(var) < dr);
  }
  assert(rem.is_zero() && "division must be exact");
  if (qcoef.empty()) return zero(a.p, a.nvars);
  return recombine(qcoef, var, a.p, a.nvars);
}

inline std::string to_string(const MultiPoly& f, const std::vector<std::string>& names) {
  if (f.is_zero()) return "0";
  std::string s;
  for (size_t i = 0; i < f.terms.size(); ++i) {
    const auto& t = f.terms[i];
    if (i) s += " + ";
    bool istconst = MultiPoly::total_deg(t.e) == 0;
    bool wrote = false;
    if (t.c != 1 || istconst) {
      s += std::to_string(t.c);
      wrote = true;
    }
    for (uint32_t v = 0; v < f.nvars; ++v) {
      if (t.e[v] == 0) continue;
      if (wrote) s += "*";
      s += v < names.size() ? names[v] : ("v" + std::to_string(v));
      if (t.e[v] > 1) s += "^" + std::to_string(t.e[v]);
      wrote = true;
    }
  }
  return s;
}

}  // namespace mp
}  // namespace fext
