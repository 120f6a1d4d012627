#pragma once

#include <cassert>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "fext/errors.hpp"
#include "fext/linalg.hpp"
#include "fext/ratfunc.hpp"
#include "fext/semilinear.hpp"
#include "fext/unipoly.hpp"

namespace fext {

// ---------------------------------------------------------------------------
// Generic chain-of-quotient-steps arithmetic over a scalar field type F.
// Elements at `level` are coordinate vectors of length rank(level) on the
// monomial basis of the first `level` generators (generator 0 varies fastest).
// The same code runs over RatFunc (the working base K) and over finite-field
// scalars (specialized towers used by root finding).
// ---------------------------------------------------------------------------

template <class F>
struct StepsF {
  std::vector<std::string> names;        // generator name per step
  std::vector<std::string> scalar_names; // names for printing scalars
  std::vector<uint32_t> degs;
  // mins[i]: degs[i]+1 coefficient coordinate vectors (each length ranks[i],
  // constant coefficient first); leading coefficient is 1
  std::vector<std::vector<std::vector<F>>> mins;
  std::vector<size_t> ranks;             // ranks[i] = prod of degs[0..i); size nsteps+1

  size_t nsteps() const { return degs.size(); }
  size_t rank() const { return ranks.empty() ? 1 : ranks.back(); }
};

template <class F>
std::vector<F> chain_zero(const StepsF<F>& st, uint32_t level, const F& like) {
  return std::vector<F>(st.ranks[level], zero_like(like));
}

template <class F>
bool chain_is_zero(const std::vector<F>& a) {
  for (const auto& x : a)
    if (!is_zero(x)) return false;
  return true;
}

template <class F>
void chain_add_into(std::vector<F>& a, const std::vector<F>& b) {
  for (size_t i = 0; i < a.size(); ++i) a[i] = a[i] + b[i];
}

template <class F>
void chain_sub_into(std::vector<F>& a, const std::vector<F>& b) {
  for (size_t i = 0; i < a.size(); ++i) a[i] = a[i] - b[i];
}

template <class F>
std::vector<F> chain_mul(const StepsF<F>& st, uint32_t level, const std::vector<F>& a,
                         const std::vector<F>& b) {
  if (level == 0) return {a[0] * b[0]};
  uint32_t d = st.degs[level - 1];
  size_t r = st.ranks[level - 1];
  const F& like = a[0];
  auto blk = [&](const std::vector<F>& v, uint32_t i) {
    return std::vector<F>(v.begin() + i * r, v.begin() + (i + 1) * r);
  };
  std::vector<std::vector<F>> conv(2 * size_t(d) - 1, chain_zero(st, level - 1, like));
  for (uint32_t i = 0; i < d; ++i) {
    auto ai = blk(a, i);
    if (chain_is_zero(ai)) continue;
    for (uint32_t j = 0; j < d; ++j) {
      auto bj = blk(b, j);
      if (chain_is_zero(bj)) continue;
      auto prod = chain_mul(st, level - 1, ai, bj);
      chain_add_into(conv[i + j], prod);
    }
  }
  // reduce with u^d = -(lower coefficients of the step polynomial)
  for (size_t m = conv.size(); m-- > d;) {
    if (chain_is_zero(conv[m])) continue;
    std::vector<F> top = std::move(conv[m]);
    conv[m] = chain_zero(st, level - 1, like);
    for (uint32_t idx = 0; idx < d; ++idx) {
      const auto& cidx = st.mins[level - 1][idx];
      if (chain_is_zero(cidx)) continue;
      auto sub = chain_mul(st, level - 1, top, cidx);
      chain_sub_into(conv[m - d + idx], sub);
    }
  }
  std::vector<F> out;
  out.reserve(st.ranks[level]);
  for (uint32_t i = 0; i < d; ++i)
    for (size_t j = 0; j < r; ++j) out.push_back(std::move(conv[i][j]));
  return out;
}

// Value type for recursive Euclid: an element at a fixed level of a chain.
template <class F>
struct TElem {
  const StepsF<F>* st = nullptr;
  uint32_t level = 0;
  std::vector<F> c;

  bool operator==(const TElem& o) const {
    if (c.size() != o.c.size()) return false;
    for (size_t i = 0; i < c.size(); ++i)
      if (!(c[i] == o.c[i])) return false;
    return true;
  }
};

template <class F>
TElem<F> telem_zero(const StepsF<F>& st, uint32_t level, const F& like) {
  return TElem<F>{&st, level, chain_zero(st, level, like)};
}

template <class F>
TElem<F> operator+(const TElem<F>& a, const TElem<F>& b) {
  assert(a.st == b.st && a.level == b.level);
  TElem<F> r = a;
  chain_add_into(r.c, b.c);
  return r;
}

template <class F>
TElem<F> operator-(const TElem<F>& a, const TElem<F>& b) {
  assert(a.st == b.st && a.level == b.level);
  TElem<F> r = a;
  chain_sub_into(r.c, b.c);
  return r;
}

template <class F>
TElem<F> operator-(const TElem<F>& a) {
  TElem<F> r = a;
  for (auto& x : r.c) x = -x;
  return r;
}

template <class F>
TElem<F> operator*(const TElem<F>& a, const TElem<F>& b) {
  assert(a.st == b.st && a.level == b.level);
  return TElem<F>{a.st, a.level, chain_mul(*a.st, a.level, a.c, b.c)};
}

template <class F>
TElem<F> zero_like(const TElem<F>& a) {
  return telem_zero(*a.st, a.level, a.c[0]);
}

template <class F>
TElem<F> one_like(const TElem<F>& a) {
  TElem<F> r = zero_like(a);
  r.c[0] = one_like(a.c[0]);
  return r;
}

template <class F>
TElem<F> from_int(const TElem<F>& like, int64_t v) {
  TElem<F> r = zero_like(like);
  r.c[0] = from_int(like.c[0], v);
  return r;
}

template <class F>
bool is_zero(const TElem<F>& a) {
  return chain_is_zero(a.c);
}

template <class F>
uint32_t char_of(const TElem<F>& a) {
  return char_of(a.c[0]);
}

// mixed-radix monomial name for basis index k
template <class F>
std::string chain_mono_name(const StepsF<F>& st, uint32_t level, size_t k) {
  std::string s;
  for (uint32_t i = 0; i < level; ++i) {
    uint32_t e = uint32_t(k % st.degs[i]);
    k /= st.degs[i];
    if (e == 0) continue;
    if (!s.empty()) s += "*";
    s += st.names[i];
    if (e > 1) s += "^" + std::to_string(e);
  }
  return s.empty() ? "1" : s;
}

template <class F>
std::string telem_repr(const TElem<F>& a) {
  std::string s;
  for (size_t k = 0; k < a.c.size(); ++k) {
    if (is_zero(a.c[k])) continue;
    if (!s.empty()) s += " + ";
    std::string cs = repr_scalar(a.c[k], a.st->scalar_names);
    std::string m = chain_mono_name(*a.st, a.level, k);
    if (m == "1")
      s += cs;
    else if (cs == "1")
      s += m;
    else
      s += "(" + cs + ")*" + m;
  }
  return s.empty() ? "0" : s;
}

template <class F>
std::string chain_poly_repr(const PolyF<TElem<F>>& f, const std::string& var) {
  if (f.is_zero()) return "0";
  std::string s;
  for (size_t i = f.c.size(); i-- > 0;) {
    if (is_zero(f.c[i])) continue;
    if (!s.empty()) s += " + ";
    std::string cs = telem_repr(f.c[i]);
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

template <class F>
std::vector<F> chain_inv(const StepsF<F>& st, uint32_t level, const std::vector<F>& a);

template <class F>
TElem<F> inv_of(const TElem<F>& a) {
  return TElem<F>{a.st, a.level, chain_inv(*a.st, a.level, a.c)};
}

// Inversion by extended Euclid against the top step polynomial; recursion
// happens through inv_of on the coefficient field one level down.  Meeting a
// proper gcd falsifies irreducibility of that step (dynamic evaluation).
template <class F>
std::vector<F> chain_inv(const StepsF<F>& st, uint32_t level, const std::vector<F>& a) {
  if (chain_is_zero(a)) throw DivisionByZero();
  if (level == 0) return {inv_of(a[0])};
  uint32_t d = st.degs[level - 1];
  size_t r = st.ranks[level - 1];
  const F& like = a[0];
  PolyF<TElem<F>> pa, pm;
  for (uint32_t i = 0; i < d; ++i)
    pa.c.push_back(TElem<F>{&st, level - 1,
                            std::vector<F>(a.begin() + i * r, a.begin() + (i + 1) * r)});
  pa = pf::trim(std::move(pa));
  for (uint32_t i = 0; i <= d; ++i)
    pm.c.push_back(TElem<F>{&st, level - 1, st.mins[level - 1][i]});
  auto eg = pf::extended_gcd(pa, pm);
  if (eg.g.deg() != 0)
    throw ReducibleModulus(st.names[level - 1], chain_poly_repr(eg.g, "x"));
  PolyF<TElem<F>> u = pf::mod(eg.u, pm);
  std::vector<F> out = chain_zero(st, level, like);
  for (size_t i = 0; i < u.c.size(); ++i)
    for (size_t j = 0; j < r; ++j) out[i * r + j] = u.c[i].c[j];
  return out;
}

// ---------------------------------------------------------------------------
// The working tower over K = F_p(vars): shared immutable data plus elements.
// ---------------------------------------------------------------------------

struct ExtensionTower {
  BaseFieldDesc base;
  StepsF<RatFunc> st;
  // leading steps folded into the effective base field (set by rebase; the
  // effective base is then the span of the monomials in those generators)
  size_t base_steps = 0;

  size_t rank() const { return st.rank(); }
  size_t base_rank() const {
    size_t r = 1;
    for (size_t i = 0; i < base_steps; ++i) r *= st.degs[i];
    return r;
  }
  // [L : effective base]
  size_t degree() const { return rank() / base_rank(); }
};

using TowerPtr = std::shared_ptr<const ExtensionTower>;

inline std::string repr_scalar(const RatFunc& a, const std::vector<std::string>& names) {
  return rf::to_string(a, names);
}

struct TowerElement {
  TowerPtr tw;
  std::vector<RatFunc> coords;

  uint32_t p() const { return tw->base.p; }
  bool is_zero() const { return chain_is_zero(coords); }
};

namespace tow {

inline TowerPtr start_tower(BaseFieldDesc base) {
  auto t = std::make_shared<ExtensionTower>();
  t->base = base;
  t->st.scalar_names = base.vars;
  t->st.ranks = {1};
  return t;
}

inline RatFunc scalar_zero(const TowerPtr& t) {
  return RatFunc::zero(t->base.p, t->base.nvars());
}
inline RatFunc scalar_one(const TowerPtr& t) {
  return RatFunc::constant(t->base.p, t->base.nvars(), 1);
}

inline TowerElement zero_elem(const TowerPtr& t) {
  return TowerElement{t, std::vector<RatFunc>(t->rank(), scalar_zero(t))};
}

inline TowerElement scalar_elem(const TowerPtr& t, const RatFunc& a) {
  TowerElement r = zero_elem(t);
  r.coords[0] = a;
  return r;
}

inline TowerElement one_elem(const TowerPtr& t) { return scalar_elem(t, scalar_one(t)); }

inline TowerElement elem_from_coords(const TowerPtr& t, std::vector<RatFunc> coords) {
  if (coords.size() != t->rank()) throw DimensionMismatch();
  return TowerElement{t, std::move(coords)};
}

inline TowerElement basis_elem(const TowerPtr& t, size_t k) {
  TowerElement r = zero_elem(t);
  r.coords.at(k) = scalar_one(t);
  return r;
}

inline TowerElement gen_elem(const TowerPtr& t, size_t step) {
  if (step >= t->st.nsteps()) throw AlgebraError("no such generator");
  return basis_elem(t, t->st.ranks[step]);
}

inline void same_tower(const TowerElement& a, const TowerElement& b) {
  if (a.tw.get() != b.tw.get()) throw TowerMismatch();
}

}  // namespace tow

inline TowerElement operator+(const TowerElement& a, const TowerElement& b) {
  tow::same_tower(a, b);
  TowerElement r = a;
  chain_add_into(r.coords, b.coords);
  return r;
}

inline TowerElement operator-(const TowerElement& a, const TowerElement& b) {
  tow::same_tower(a, b);
  TowerElement r = a;
  chain_sub_into(r.coords, b.coords);
  return r;
}

inline TowerElement operator-(const TowerElement& a) {
  TowerElement r = a;
  for (auto& x : r.coords) x = -x;
  return r;
}

inline TowerElement operator*(const TowerElement& a, const TowerElement& b) {
  tow::same_tower(a, b);
  return TowerElement{a.tw,
                      chain_mul(a.tw->st, uint32_t(a.tw->st.nsteps()), a.coords, b.coords)};
}

inline TowerElement operator*(const RatFunc& s, const TowerElement& a) {
  TowerElement r = a;
  for (auto& x : r.coords) x = s * x;
  return r;
}

inline bool operator==(const TowerElement& a, const TowerElement& b) {
  if (a.tw.get() != b.tw.get()) return false;
  for (size_t i = 0; i < a.coords.size(); ++i)
    if (!(a.coords[i] == b.coords[i])) return false;
  return true;
}

inline bool operator!=(const TowerElement& a, const TowerElement& b) { return !(a == b); }

// the dynamic-evaluation entry point
inline TowerElement elem_invert(const TowerElement& a) {
  return TowerElement{a.tw, chain_inv(a.tw->st, uint32_t(a.tw->st.nsteps()), a.coords)};
}

inline TowerElement operator/(const TowerElement& a, const TowerElement& b) {
  return a * elem_invert(b);
}

// generic shims so PolyF / Mat work over TowerElement
inline TowerElement zero_like(const TowerElement& a) { return tow::zero_elem(a.tw); }
inline TowerElement one_like(const TowerElement& a) { return tow::one_elem(a.tw); }
inline TowerElement from_int(const TowerElement& like, int64_t v) {
  return tow::scalar_elem(like.tw, RatFunc::constant(like.p(), like.tw->base.nvars(), v));
}
inline bool is_zero(const TowerElement& a) { return a.is_zero(); }
inline TowerElement inv_of(const TowerElement& a) { return elem_invert(a); }
inline uint32_t char_of(const TowerElement& a) { return a.p(); }

namespace tow {

inline TowerElement pow_elem(const TowerElement& a, uint64_t e) {
  TowerElement r = one_elem(a.tw);
  TowerElement base = a;
  while (e) {
    if (e & 1) r = r * base;
    e >>= 1;
    if (e) base = base * base;
  }
  return r;
}

inline TowerElement frobenius_elem(const TowerElement& a, uint32_t e) {
  uint64_t q = 1;
  for (uint32_t i = 0; i < e; ++i) q *= a.p();
  return pow_elem(a, q);
}

inline std::string to_string(const TowerElement& a) {
  TElem<RatFunc> v{&a.tw->st, uint32_t(a.tw->st.nsteps()), a.coords};
  return telem_repr(v);
}

// Adjoin one generator. The step polynomial is monic with coefficients in the
// current tower; reducibility is only ever detected later, at inversion time.
inline TowerPtr extend(const TowerPtr& t, const std::string& gen,
                       const PolyF<TowerElement>& f) {
  if (f.deg() < 1) throw AlgebraError("step polynomial must have degree >= 1");
  if (!(f.lc() == one_elem(t))) throw AlgebraError("step polynomial must be monic");
  for (const auto& c : f.c)
    if (c.tw.get() != t.get()) throw TowerMismatch();
  for (const auto& n : t->st.names)
    if (n == gen) throw AlgebraError("duplicate generator name: " + gen);
  auto nt = std::make_shared<ExtensionTower>(*t);
  nt->st.names.push_back(gen);
  nt->st.degs.push_back(uint32_t(f.deg()));
  std::vector<std::vector<RatFunc>> coeffs;
  for (int i = 0; i <= f.deg(); ++i) coeffs.push_back(f.c[size_t(i)].coords);
  nt->st.mins.push_back(std::move(coeffs));
  nt->st.ranks.push_back(nt->st.ranks.back() * size_t(f.deg()));
  return nt;
}

// convenience: step polynomial with plain base-field coefficients
inline TowerPtr extend(const TowerPtr& t, const std::string& gen, const UniPoly& f) {
  PolyF<TowerElement> lifted;
  for (const auto& c : f.c) lifted.c.push_back(scalar_elem(t, c));
  return extend(t, gen, lifted);
}

// re-read an element of a prefix tower in an extended tower
inline TowerElement lift_elem(const TowerPtr& big, const TowerElement& a) {
  if (a.tw->rank() > big->rank()) throw TowerMismatch();
  for (size_t i = 0; i < a.tw->st.nsteps(); ++i)
    if (big->st.names.at(i) != a.tw->st.names[i] || big->st.degs.at(i) != a.tw->st.degs[i])
      throw TowerMismatch();
  TowerElement r = zero_elem(big);
  for (size_t i = 0; i < a.coords.size(); ++i) r.coords[i] = a.coords[i];
  return r;
}

inline PolyF<TowerElement> lift_poly(const TowerPtr& t, const UniPoly& f) {
  PolyF<TowerElement> r;
  for (const auto& c : f.c) r.c.push_back(scalar_elem(t, c));
  return pf::trim(std::move(r));
}

// matrix of multiplication by a on the canonical monomial basis
inline Mat<RatFunc> regular_rep(const TowerElement& a) {
  size_t n = a.tw->rank();
  Mat<RatFunc> m = la::zero_mat(scalar_zero(a.tw), n, n);
  for (size_t j = 0; j < n; ++j) {
    TowerElement col = a * basis_elem(a.tw, j);
    for (size_t i = 0; i < n; ++i) m.rows[i][j] = col.coords[i];
  }
  return m;
}

// matrix of multiplication by a on a caller-supplied basis of L over K
inline Mat<RatFunc> regular_rep(const TowerElement& a,
                                const std::vector<TowerElement>& basis) {
  size_t n = a.tw->rank();
  if (basis.size() != n) throw NotABasis();
  Mat<RatFunc> b = la::zero_mat(scalar_zero(a.tw), n, n);
  for (size_t j = 0; j < n; ++j) {
    if (basis[j].tw.get() != a.tw.get()) throw TowerMismatch();
    for (size_t i = 0; i < n; ++i) b.rows[i][j] = basis[j].coords[i];
  }
  RatFunc like = scalar_one(a.tw);
  Mat<RatFunc> m = la::zero_mat(scalar_zero(a.tw), n, n);
  for (size_t j = 0; j < n; ++j) {
    TowerElement img = a * basis[j];
    auto col = la::solve(b, img.coords, like);
    if (!col) throw NotABasis();
    for (size_t i = 0; i < n; ++i) m.rows[i][j] = (*col)[i];
  }
  return m;
}

// columns are the coordinates of b_j^(p^e): the input to semilinear_kernel
inline Mat<RatFunc> frobenius_matrix(const TowerPtr& t, uint32_t e) {
  size_t n = t->rank();
  Mat<RatFunc> m = la::zero_mat(scalar_zero(t), n, n);
  for (size_t j = 0; j < n; ++j) {
    TowerElement col = frobenius_elem(basis_elem(t, j), e);
    for (size_t i = 0; i < n; ++i) m.rows[i][j] = col.coords[i];
  }
  return m;
}

// ---------------------------------------------------------------------------
// Subfields: echelonized K-subspaces of L certified multiplicatively closed.
// ---------------------------------------------------------------------------

struct Subfield {
  TowerPtr tw;
  la::Subspace<RatFunc> space;
  bool certified = false;

  size_t dim() const { return space.dim(); }
};

inline bool subfield_contains(const Subfield& m, const TowerElement& a) {
  if (m.tw.get() != a.tw.get()) throw TowerMismatch();
  return la::contains(m.space, a.coords);
}

inline std::vector<TowerElement> subfield_basis(const Subfield& m) {
  std::vector<TowerElement> out;
  for (const auto& v : m.space.basis) out.push_back(elem_from_coords(m.tw, v));
  return out;
}

inline Subfield subfield_k(const TowerPtr& t) {
  std::vector<std::vector<RatFunc>> vecs = {one_elem(t).coords};
  return Subfield{t, la::span(t->rank(), vecs), true};
}

inline Subfield subfield_full(const TowerPtr& t) {
  return Subfield{t, la::full_space(scalar_one(t), t->rank()), true};
}

// The tower's marked base as a subfield: the span of the monomials in the
// generators below base_steps (just the scalars when nothing is marked).
inline Subfield base_subfield(const TowerPtr& t) {
  std::vector<std::vector<RatFunc>> vecs;
  for (size_t k = 0; k < t->base_rank(); ++k)
    vecs.push_back(basis_elem(t, k).coords);
  return Subfield{t, la::span(t->rank(), vecs), true};
}

inline bool subfield_equal(const Subfield& a, const Subfield& b) {
  return a.tw.get() == b.tw.get() && la::equal(a.space, b.space);
}

// verify closure of a candidate subspace and wrap it as a Subfield
inline Subfield make_subfield(const TowerPtr& t,
                              const std::vector<std::vector<RatFunc>>& vectors) {
  auto space = la::span(t->rank(), vectors);
  if (!la::contains(space, one_elem(t).coords))
    throw NotAField("subspace does not contain 1");
  auto bas = space.basis;
  for (size_t i = 0; i < bas.size(); ++i)
    for (size_t j = i; j < bas.size(); ++j) {
      TowerElement prod = elem_from_coords(t, bas[i]) * elem_from_coords(t, bas[j]);
      if (!la::contains(space, prod.coords))
        throw NotAField("subspace not closed under multiplication");
    }
  if (space.dim() == 0 || t->rank() % space.dim() != 0)
    throw NotAField("dimension does not divide [L:K]");
  return Subfield{t, std::move(space), true};
}

// smallest multiplicatively closed K-subspace containing 1 and gens
inline Subfield subfield_generated(const TowerPtr& t,
                                   const std::vector<TowerElement>& gens) {
  std::vector<std::vector<RatFunc>> vecs = {one_elem(t).coords};
  for (const auto& g : gens) {
    if (g.tw.get() != t.get()) throw TowerMismatch();
    vecs.push_back(g.coords);
  }
  auto space = la::span(t->rank(), vecs);
  for (;;) {
    std::vector<std::vector<RatFunc>> next = space.basis;
    bool grew = false;
    size_t m = space.basis.size();
    for (size_t i = 0; i < m; ++i)
      for (size_t j = i; j < m; ++j) {
        TowerElement prod =
            elem_from_coords(t, space.basis[i]) * elem_from_coords(t, space.basis[j]);
        if (!la::contains(space, prod.coords)) {
          next.push_back(prod.coords);
          grew = true;
        }
      }
    if (!grew) break;
    space = la::span(t->rank(), next);
  }
  return Subfield{t, std::move(space), true};
}

inline Subfield compositum(const Subfield& m, const Subfield& n) {
  if (m.tw.get() != n.tw.get()) throw TowerMismatch();
  std::vector<TowerElement> gens;
  for (const auto& v : m.space.basis) gens.push_back(elem_from_coords(m.tw, v));
  for (const auto& v : n.space.basis) gens.push_back(elem_from_coords(n.tw, v));
  return subfield_generated(m.tw, gens);
}

inline bool is_linearly_disjoint(const Subfield& m, const Subfield& n) {
  Subfield mn = compositum(m, n);
  return mn.dim() == m.dim() * n.dim();
}

// ---------------------------------------------------------------------------
// Minimal polynomials.
// ---------------------------------------------------------------------------

// monic minimal polynomial over K, by the first linear dependence of powers
inline UniPoly minimal_polynomial(const TowerElement& a) {
  size_t n = a.tw->rank();
  RatFunc like = scalar_one(a.tw);
  std::vector<std::vector<RatFunc>> pows;
  TowerElement cur = one_elem(a.tw);
  pows.push_back(cur.coords);
  for (size_t k = 1; k <= n; ++k) {
    cur = cur * a;
    Mat<RatFunc> m = la::zero_mat(scalar_zero(a.tw), n, k);
    for (size_t j = 0; j < k; ++j)
      for (size_t i = 0; i < n; ++i) m.rows[i][j] = pows[j][i];
    auto sol = la::solve(m, cur.coords, like);
    if (sol) {
      UniPoly f;
      for (size_t i = 0; i < k; ++i) f.c.push_back(-(*sol)[i]);
      f.c.push_back(like);
      return f;
    }
    pows.push_back(cur.coords);
  }
  throw AlgebraError("no linear dependence among powers up to the tower degree");
}

// monic minimal polynomial with coefficients constrained to the subfield M,
// solved as one K-linear system per trial degree
inline PolyF<TowerElement> minimal_polynomial_over(const TowerElement& a,
                                                   const Subfield& over) {
  if (over.tw.get() != a.tw.get()) throw TowerMismatch();
  size_t n = a.tw->rank();
  size_t m = over.dim();
  RatFunc like = scalar_one(a.tw);
  std::vector<TowerElement> mb = subfield_basis(over);
  std::vector<TowerElement> pows = {one_elem(a.tw)};
  for (size_t k = 1; k <= n; ++k) {
    pows.push_back(pows.back() * a);
    // unknowns c_{i,j}: coefficient_i = sum_j c_{i,j} mb_j, for i < k
    Mat<RatFunc> sys = la::zero_mat(scalar_zero(a.tw), n, k * m);
    for (size_t i = 0; i < k; ++i)
      for (size_t j = 0; j < m; ++j) {
        TowerElement colel = mb[j] * pows[i];
        for (size_t row = 0; row < n; ++row)
          sys.rows[row][i * m + j] = colel.coords[row];
      }
    std::vector<RatFunc> rhs;
    for (size_t row = 0; row < n; ++row) rhs.push_back(-pows[k].coords[row]);
    auto sol = la::solve(sys, rhs, like);
    if (!sol) continue;
    PolyF<TowerElement> f;
    for (size_t i = 0; i < k; ++i) {
      TowerElement ci = zero_elem(a.tw);
      for (size_t j = 0; j < m; ++j) ci = ci + (*sol)[i * m + j] * mb[j];
      f.c.push_back(ci);
    }
    f.c.push_back(one_elem(a.tw));
    return f;
  }
  throw AlgebraError("no relation over the subfield up to the tower degree");
}

inline bool is_sep_element(const TowerElement& a) {
  UniPoly f = minimal_polynomial(a);
  return !pf::derivative(f).is_zero();
}

inline bool is_pi_element(const TowerElement& a) {
  UniPoly f = minimal_polynomial(a);
  auto [fsep, e] = up::separable_presentation(f);
  (void)e;
  return fsep.deg() == 1;
}

// ---------------------------------------------------------------------------
// p^e-th roots of tower elements (affine semilinear solve over K).
// ---------------------------------------------------------------------------

inline std::optional<TowerElement> pe_root_in_tower(const TowerElement& a, uint32_t e) {
  if (e == 0) return a;
  const TowerPtr& t = a.tw;
  size_t n = t->rank();
  RatFunc like = scalar_one(t);
  Mat<RatFunc> fr = frobenius_matrix(t, e);
  auto d0opt = la::solve(fr, a.coords, like);
  if (!d0opt) return std::nullopt;
  std::vector<RatFunc> d0 = *d0opt;
  auto wker = la::kernel(fr, like);
  auto wsp = la::span(n, wker);
  size_t r = wsp.dim();
  // shift the particular solution so it vanishes on the pivot coordinates
  for (size_t j = 0; j < r; ++j) {
    size_t piv = 0;
    while (piv < n && is_zero(wsp.basis[j][piv])) ++piv;
    RatFunc f = d0[piv];
    if (is_zero(f)) continue;
    for (size_t i = 0; i < n; ++i) d0[i] = d0[i] - f * wsp.basis[j][i];
  }
  // conditions: every nonzero-residue component of d0' + sum_j eta_j w_j is 0
  std::vector<uint32_t> zg(t->base.nvars(), 0);
  Mat<RatFunc> sys;
  sys.cols = r;
  std::vector<RatFunc> rhs;
  for (size_t i = 0; i < n; ++i) {
    std::map<std::vector<uint32_t>, std::vector<RatFunc>> rows_here;
    std::map<std::vector<uint32_t>, RatFunc> rhs_here;
    auto add_rows = [&](const RatFunc& val, size_t j, bool is_rhs) {
      for (auto& [gamma, w] : la::decompose_pe(val, e)) {
        if (gamma == zg) continue;
        if (!rows_here.count(gamma)) {
          rows_here.emplace(gamma, std::vector<RatFunc>(r, zero_like(like)));
          rhs_here.emplace(gamma, zero_like(like));
        }
        if (is_rhs)
          rhs_here[gamma] = rhs_here[gamma] - w;
        else
          rows_here[gamma][j] = w;
      }
    };
    add_rows(d0[i], 0, true);
    for (size_t j = 0; j < r; ++j) add_rows(wsp.basis[j][i], j, false);
    for (auto& [gamma, row] : rows_here) {
      sys.rows.push_back(std::move(row));
      rhs.push_back(rhs_here[gamma]);
    }
  }
  auto eta = la::solve(sys, rhs, like);
  if (!eta) return std::nullopt;
  // extract the residue-zero parts: v_i = w0(d0')_i + sum_j eta_j w0(w_j)_i
  auto zero_part = [&](const RatFunc& val) {
    auto dec = la::decompose_pe(val, e);
    auto it = dec.find(zg);
    return it == dec.end() ? RatFunc::zero(like.p(), like.nvars()) : it->second;
  };
  TowerElement v = zero_elem(t);
  for (size_t i = 0; i < n; ++i) {
    RatFunc x = zero_part(d0[i]);
    for (size_t j = 0; j < r; ++j) x = x + (*eta)[j] * zero_part(wsp.basis[j][i]);
    v.coords[i] = x;
  }
  if (!(frobenius_elem(v, e) == a)) return std::nullopt;
  return v;
}

// ---------------------------------------------------------------------------
// Rebasing: present L over an intermediate field M.
// ---------------------------------------------------------------------------

struct RebaseResult {
  TowerPtr tower;           // generators of M first (marked as base), then the rest
  Mat<RatFunc> to_orig;     // columns: original coords of the new monomial basis
  TowerPtr orig;

  TowerElement translate_to_orig(const TowerElement& a) const {
    if (a.tw.get() != tower.get()) throw TowerMismatch();
    return elem_from_coords(orig, la::mat_vec(to_orig, a.coords));
  }
  TowerElement translate_from_orig(const TowerElement& a) const {
    if (a.tw.get() != orig.get()) throw TowerMismatch();
    RatFunc like = scalar_one(orig);
    auto sol = la::solve(to_orig, a.coords, like);
    if (!sol) throw TowerMismatch();
    return elem_from_coords(tower, *sol);
  }
};

inline RebaseResult rebase(const TowerPtr& t, const Subfield& m) {
  if (m.tw.get() != t.get()) throw TowerMismatch();
  size_t n = t->rank();
  RatFunc like = scalar_one(t);

  // choose generating elements: first for M, then original generators not yet in
  std::vector<TowerElement> chosen;
  std::vector<std::string> chosen_names;
  Subfield cur = subfield_k(t);
  size_t m_steps = 0;
  size_t synth = 0;
  for (const auto& v : m.space.basis) {
    if (cur.dim() == m.dim()) break;
    TowerElement el = elem_from_coords(t, v);
    if (subfield_contains(cur, el)) continue;
    chosen.push_back(el);
    chosen_names.push_back("m" + std::to_string(synth++));
    cur = subfield_generated(t, chosen);
    ++m_steps;
  }
  if (cur.dim() != m.dim()) throw NotAField("rebase: generator search failed");
  for (size_t i = 0; i < t->st.nsteps(); ++i) {
    TowerElement g = gen_elem(t, i);
    if (subfield_contains(cur, g)) continue;
    chosen.push_back(g);
    chosen_names.push_back(t->st.names[i]);
    cur = subfield_generated(t, chosen);
  }
  if (cur.dim() != n) throw NotAField("rebase: generators do not span L");

  // build the new tower step by step, tracking monomial images in the original
  TowerPtr nt = start_tower(t->base);
  std::vector<TowerElement> mono_imgs = {one_elem(t)};  // images of new basis monomials
  for (size_t s = 0; s < chosen.size(); ++s) {
    // minimal polynomial of chosen[s] over the field generated so far
    Subfield sofar =
        subfield_generated(t, std::vector<TowerElement>(chosen.begin(), chosen.begin() + s));
    PolyF<TowerElement> f = minimal_polynomial_over(chosen[s], sofar);
    size_t d = size_t(f.deg());
    // translate each coefficient to coordinates over the new tower so far
    size_t rprev = mono_imgs.size();
    Mat<RatFunc> b = la::zero_mat(scalar_zero(t), n, rprev);
    for (size_t j = 0; j < rprev; ++j)
      for (size_t i = 0; i < n; ++i) b.rows[i][j] = mono_imgs[j].coords[i];
    PolyF<TowerElement> fnew;
    for (size_t i = 0; i <= d; ++i) {
      auto sol = la::solve(b, f.c[i].coords, like);
      if (!sol) throw NotAField("rebase: coefficient outside the subtower");
      fnew.c.push_back(elem_from_coords(nt, *sol));
    }
    nt = extend(nt, chosen_names[s], fnew);
    // extend monomial images: new basis = old basis times chosen[s]^i
    std::vector<TowerElement> next;
    TowerElement pw = one_elem(t);
    for (size_t i = 0; i < d; ++i) {
      for (const auto& mi : mono_imgs) next.push_back(mi * pw);
      pw = pw * chosen[s];
    }
    mono_imgs = std::move(next);
  }
  auto final_t = std::make_shared<ExtensionTower>(*nt);
  final_t->base_steps = m_steps;
  Mat<RatFunc> to_orig = la::zero_mat(scalar_zero(t), n, n);
  for (size_t j = 0; j < n; ++j)
    for (size_t i = 0; i < n; ++i) to_orig.rows[i][j] = mono_imgs[j].coords[i];
  return RebaseResult{final_t, std::move(to_orig), t};
}

}  // namespace tow

}  // namespace fext
