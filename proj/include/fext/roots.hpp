#pragma once

#include <algorithm>
#include <cstdint>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "fext/errors.hpp"
#include "fext/gf.hpp"
#include "fext/tower.hpp"

namespace fext {

// ---------------------------------------------------------------------------
// Truncated power series over a small finite field: Fq[eps]/(eps^d).  These
// scalars drive Newton lifting inside specialized tower algebras; they form a
// ring with zero divisors, so only +, -, * and unit inversion are provided.
// ---------------------------------------------------------------------------

struct SerCtx {
  GFCtxPtr gfc;
  uint32_t d = 0;
};

using SerCtxPtr = std::shared_ptr<const SerCtx>;

struct SerElem {
  SerCtxPtr cx;
  std::vector<GFElem> c;  // exactly d coefficients

  bool is_zero() const {
    for (const auto& x : c)
      if (!x.is_zero()) return false;
    return true;
  }
};

namespace ser {

inline SerElem zero(SerCtxPtr cx) {
  std::vector<GFElem> c(cx->d, gf::zero(cx->gfc));
  return SerElem{std::move(cx), std::move(c)};
}

inline SerElem constant(SerCtxPtr cx, GFElem a) {
  SerElem r = zero(std::move(cx));
  r.c[0] = std::move(a);
  return r;
}

inline SerElem eps(SerCtxPtr cx) {
  SerElem r = zero(std::move(cx));
  if (r.cx->d > 1) r.c[1] = gf::from_uint(r.cx->gfc, 1);
  return r;
}

// inverse of a unit (constant term nonzero) by the standard recurrence
inline SerElem inv(const SerElem& a) {
  if (a.c[0].is_zero()) throw DivisionByZero();
  GFElem u = gf::inv(a.c[0]);
  SerElem b = zero(a.cx);
  b.c[0] = u;
  for (uint32_t k = 1; k < a.cx->d; ++k) {
    GFElem s = gf::zero(a.cx->gfc);
    for (uint32_t j = 1; j <= k; ++j) s = s + a.c[j] * b.c[k - j];
    b.c[k] = -(u * s);
  }
  return b;
}

}  // namespace ser

inline SerElem operator+(const SerElem& a, const SerElem& b) {
  SerElem r = a;
  for (uint32_t i = 0; i < a.cx->d; ++i) r.c[i] = r.c[i] + b.c[i];
  return r;
}

inline SerElem operator-(const SerElem& a, const SerElem& b) {
  SerElem r = a;
  for (uint32_t i = 0; i < a.cx->d; ++i) r.c[i] = r.c[i] - b.c[i];
  return r;
}

inline SerElem operator-(const SerElem& a) {
  SerElem r = a;
  for (auto& x : r.c) x = -x;
  return r;
}

inline SerElem operator*(const SerElem& a, const SerElem& b) {
  SerElem r = ser::zero(a.cx);
  for (uint32_t i = 0; i < a.cx->d; ++i) {
    if (a.c[i].is_zero()) continue;
    for (uint32_t j = 0; i + j < a.cx->d; ++j) r.c[i + j] = r.c[i + j] + a.c[i] * b.c[j];
  }
  return r;
}

inline bool operator==(const SerElem& a, const SerElem& b) { return a.c == b.c; }

inline SerElem zero_like(const SerElem& a) { return ser::zero(a.cx); }
inline SerElem one_like(const SerElem& a) {
  return ser::constant(a.cx, gf::from_uint(a.cx->gfc, 1));
}
inline SerElem from_int(const SerElem& like, int64_t c) {
  return ser::constant(like.cx, from_int(gf::zero(like.cx->gfc), c));
}
inline bool is_zero(const SerElem& a) { return a.is_zero(); }
inline SerElem inv_of(const SerElem& a) { return ser::inv(a); }
inline uint32_t char_of(const SerElem& a) { return a.cx->gfc->p; }

namespace ser {

// evaluate a univariate rational function at tau + eps
inline SerElem eval_ratfunc(const RatFunc& a, const GFElem& tau, const SerCtxPtr& cx) {
  if (a.nvars() != 1) throw AlgebraError("series evaluation: univariate base required");
  SerElem point = constant(cx, tau) + eps(cx);
  auto evalp = [&](const MultiPoly& f) {
    SerElem acc = zero(cx);
    SerElem pw = constant(cx, gf::from_uint(cx->gfc, 1));
    uint32_t cur = 0;
    // terms are few; recompute powers incrementally after sorting by exponent
    std::vector<std::pair<uint32_t, uint32_t>> ts;
    for (const auto& t : f.terms) ts.push_back({t.e[0], t.c});
    std::sort(ts.begin(), ts.end());
    for (const auto& [e, coef] : ts) {
      while (cur < e) {
        pw = pw * point;
        ++cur;
      }
      acc = acc + constant(cx, gf::from_uint(cx->gfc, coef)) * pw;
    }
    return acc;
  };
  return evalp(a.num) * inv(evalp(a.den));
}

}  // namespace ser

namespace rt {

// ---------------------------------------------------------------------------
// Generic chain-algebra helpers over an arbitrary scalar ring F.
// ---------------------------------------------------------------------------

template <class F>
std::vector<F> chain_scalar(const StepsF<F>& st, const F& c) {
  std::vector<F> v(st.rank(), zero_like(c));
  v[0] = c;
  return v;
}

template <class F>
std::vector<F> chain_eval_poly(const StepsF<F>& st, const std::vector<F>& coeffs,
                               const std::vector<F>& pt) {
  uint32_t level = uint32_t(st.nsteps());
  std::vector<F> acc(st.rank(), zero_like(pt[0]));
  for (size_t i = coeffs.size(); i-- > 0;) {
    acc = chain_mul(st, level, acc, pt);
    acc[0] = acc[0] + coeffs[i];
  }
  return acc;
}

// ---------------------------------------------------------------------------
// Regime (a): complete root finding over a finite base field by gcd with
// x^(p^N) - x followed by random equal-degree splitting down to linears.
// ---------------------------------------------------------------------------

inline void split_to_roots(const PolyF<TowerElement>& g, const TowerPtr& t, uint32_t p,
                           size_t nfp, std::mt19937_64& rng,
                           std::vector<TowerElement>& out) {
  if (g.deg() <= 0) return;
  if (g.deg() == 1) {
    out.push_back(-g.c[0]);
    return;
  }
  for (int attempt = 0; attempt < 256; ++attempt) {
    std::vector<RatFunc> coords;
    for (size_t i = 0; i < t->rank(); ++i)
      coords.push_back(RatFunc::constant(p, t->base.nvars(), uint32_t(rng() % p)));
    TowerElement c = tow::elem_from_coords(t, coords);
    PolyF<TowerElement> h;
    if (p == 2) {
      // absolute trace of c*x modulo g
      PolyF<TowerElement> cur =
          pf::mod(pf::from_coeffs(std::vector<TowerElement>{tow::zero_elem(t), c}), g);
      PolyF<TowerElement> sum = cur;
      for (size_t i = 1; i < nfp; ++i) {
        cur = pf::mod(pf::mul(cur, cur), g);
        sum = pf::add(sum, cur);
      }
      h = std::move(sum);
    } else {
      uint64_t q = 1;
      for (size_t i = 0; i < nfp; ++i) q *= p;
      PolyF<TowerElement> base =
          pf::from_coeffs(std::vector<TowerElement>{c, tow::one_elem(t)});  // x + c
      h = pf::sub(pf::powmod(base, (q - 1) / 2, g), pf::constant(tow::one_elem(t)));
    }
    PolyF<TowerElement> d = pf::gcd(g, h);
    if (d.deg() > 0 && d.deg() < g.deg()) {
      split_to_roots(d, t, p, nfp, rng, out);
      split_to_roots(pf::divmod(g, d).first, t, p, nfp, rng, out);
      return;
    }
  }
  throw AlgebraError("equal-degree splitting failed to make progress");
}

inline std::vector<TowerElement> roots_over_finite_base(const UniPoly& fsep,
                                                        const TowerPtr& t) {
  uint32_t p = t->base.p;
  size_t nfp = t->rank();  // F_p-dimension of L
  if (p != 2 && nfp * 2 > 62)
    throw AlgebraError("finite field too large for exhaustive splitting");
  PolyF<TowerElement> f = tow::lift_poly(t, fsep);
  // x^(p^nfp) mod f by iterated p-th powers
  PolyF<TowerElement> xp = pf::monomial(tow::one_elem(t), 1);
  PolyF<TowerElement> h = pf::mod(xp, f);
  for (size_t i = 0; i < nfp; ++i) h = pf::powmod(h, p, f);
  PolyF<TowerElement> g1 = pf::gcd(f, pf::sub(h, pf::mod(xp, f)));
  std::vector<TowerElement> out;
  std::mt19937_64 rng(0xfe57);
  split_to_roots(g1, t, p, nfp, rng, out);
  return out;
}

// ---------------------------------------------------------------------------
// Regime (b): specialize the single base variable at tau in F_(p^k), find the
// roots of the specialized polynomial in the finite chain algebra by guarded
// enumeration, Newton-lift each root in the truncated-series algebra, then
// reconstruct rational-function coordinates by Pade approximation and verify
// exactly.  Verified roots only; completeness stays heuristic.
// ---------------------------------------------------------------------------

struct RootsConfig {
  uint32_t max_k = 3;            // specialization fields F_p, ..., F_(p^max_k)
  uint64_t enum_limit = 65536;   // cap on q^n residue states
  int64_t degree_bound = 0;      // Pade numerator/denominator bound; 0 = auto
  uint32_t newton_rounds = 24;
};

struct RootsResult {
  std::vector<TowerElement> roots;
  bool complete = false;
  uint32_t spec_k = 0;     // extension degree of the specialization point used
  int64_t bound_used = 0;  // Pade degree bound (regime (b) only)
};

namespace detail {

inline uint32_t total_deg(const MultiPoly& f) {
  uint32_t d = 0;
  for (const auto& t : f.terms) {
    uint32_t s = 0;
    for (auto e : t.e) s += e;
    d = std::max(d, s);
  }
  return d;
}

inline std::vector<RatFunc> condition_coeffs(const UniPoly& f, const TowerPtr& t) {
  std::vector<RatFunc> cs;
  for (const auto& step : t->st.mins)
    for (const auto& cf : step)
      for (const auto& entry : cf) cs.push_back(entry);
  for (const auto& c : f.c) cs.push_back(c);
  return cs;
}

inline PolyF<GFElem> sep_part_gf(PolyF<GFElem> g, uint32_t p) {
  while (g.deg() > 0 && pf::derivative(g).is_zero()) {
    PolyF<GFElem> h;
    for (size_t i = 0; i < g.c.size(); i += p) h.c.push_back(g.c[i]);
    g = pf::trim(std::move(h));
  }
  return g;
}

inline bool squarefree_gf(const PolyF<GFElem>& g) {
  if (g.deg() <= 1) return true;
  return pf::gcd(g, pf::derivative(g)).deg() == 0;
}

// specialize a univariate polynomial with RatFunc coefficients at tau;
// requires all denominators nonzero at tau (checked by the caller)
inline PolyF<GFElem> specialize_poly(const UniPoly& f, const GFElem& tau) {
  PolyF<GFElem> out;
  for (const auto& c : f.c) out.c.push_back(*gf::eval_ratfunc(c, tau));
  return pf::trim(std::move(out));
}

// Pade approximation of a series: num/den with den(0) != 0 and both degrees
// bounded by B, matching the series to precision d.  Returns nullopt when the
// Euclidean walk cannot satisfy the constraints.
inline std::optional<std::pair<PolyF<GFElem>, PolyF<GFElem>>> pade(
    const SerElem& s, int64_t bound) {
  uint32_t d = s.cx->d;
  GFElem one = gf::from_uint(s.cx->gfc, 1);
  PolyF<GFElem> r0 = pf::monomial(one, d);  // eps^d
  PolyF<GFElem> r1 = pf::trim(PolyF<GFElem>{s.c});
  PolyF<GFElem> t0, t1 = pf::constant(one);
  while (r1.deg() > bound) {
    if (r1.is_zero()) break;
    auto [q, rem] = pf::divmod(r0, r1);
    PolyF<GFElem> t2 = pf::sub(t0, pf::mul(q, t1));
    r0 = std::move(r1);
    r1 = std::move(rem);
    t0 = std::move(t1);
    t1 = std::move(t2);
  }
  if (t1.is_zero() || t1.c[0].is_zero()) return std::nullopt;
  return std::make_pair(std::move(r1), std::move(t1));
}

// substitute eps = t - tau, yielding a polynomial in the base variable
inline PolyF<GFElem> shift_to_var(const PolyF<GFElem>& g, const GFElem& tau) {
  GFElem one = gf::from_uint(tau.cx, 1);
  PolyF<GFElem> lin = pf::from_coeffs(std::vector<GFElem>{-tau, one});  // t - tau
  PolyF<GFElem> acc;
  for (size_t i = g.c.size(); i-- > 0;) {
    acc = pf::mul(acc, lin);
    acc = pf::add(acc, pf::constant(g.c[i]));
  }
  return acc;
}

// a polynomial over Fq whose coefficients all lie in F_p becomes one node of
// a rational function over the prime field
inline std::optional<MultiPoly> to_prime_poly(const PolyF<GFElem>& g, uint32_t p) {
  MultiPoly out = mp::zero(p, 1);
  for (size_t i = 0; i < g.c.size(); ++i) {
    if (g.c[i].is_zero()) continue;
    if (!gf::in_prime_field(g.c[i])) return std::nullopt;
    MultiPoly term = mp::constant(p, 1, gf::prime_part(g.c[i]));
    term = mp::mul(term, mp::pow(mp::variable(p, 1, 0), uint64_t(i)));
    out = mp::add(out, term);
  }
  return out;
}

struct FlatAlgebra {
  const StepsF<SerElem>* st;
  size_t n;
  uint32_t d;
  GFElem like;

  std::vector<GFElem> flatten(const std::vector<SerElem>& a) const {
    std::vector<GFElem> v;
    v.reserve(n * d);
    for (size_t i = 0; i < n; ++i)
      for (uint32_t l = 0; l < d; ++l) v.push_back(a[i].c[l]);
    return v;
  }

  // solve (mult-by-a) x = b over Fq; nullopt when a is not invertible
  std::optional<std::vector<SerElem>> divide(const std::vector<SerElem>& b,
                                             const std::vector<SerElem>& a,
                                             const SerCtxPtr& scx) const {
    Mat<GFElem> m = la::zero_mat(like, n * d, n * d);
    for (size_t j = 0; j < n; ++j) {
      std::vector<SerElem> ej(n, ser::zero(scx));
      ej[j] = ser::constant(scx, gf::from_uint(scx->gfc, 1));
      auto col = chain_mul(*st, uint32_t(st->nsteps()), a, ej);
      for (uint32_t lp = 0; lp < d; ++lp)
        for (size_t i = 0; i < n; ++i)
          for (uint32_t l = lp; l < d; ++l)
            m.rows[i * d + l][j * d + lp] = col[i].c[l - lp];
    }
    auto sol = la::solve(m, flatten(b), like);
    if (!sol) return std::nullopt;
    std::vector<SerElem> out(n, ser::zero(scx));
    for (size_t i = 0; i < n; ++i)
      for (uint32_t l = 0; l < d; ++l) out[i].c[l] = (*sol)[i * d + l];
    return out;
  }
};

}  // namespace detail

inline std::pair<std::vector<TowerElement>, uint32_t> roots_by_specialization(
    const UniPoly& fsep, const TowerPtr& t, const RootsConfig& cfg, int64_t bound) {
  uint32_t p = t->base.p;
  size_t n = t->rank();
  std::vector<RatFunc> conds = detail::condition_coeffs(fsep, t);
  bool saw_nonsimple = false;
  bool any_state_ok = false;

  for (uint32_t k = 1; k <= cfg.max_k; ++k) {
    uint64_t q = 1;
    for (uint32_t i = 0; i < k; ++i) q *= p;
    uint64_t states = 1;
    bool fits = true;
    for (size_t i = 0; i < n; ++i) {
      if (states > cfg.enum_limit / q) {
        fits = false;
        break;
      }
      states *= q;
    }
    if (!fits) break;
    any_state_ok = true;
    GFCtxPtr gfc = gf::make_ctx(p, k);

    for (uint64_t ti = 0; ti < q; ++ti) {
      GFElem tau = gf::from_index(gfc, ti);
      bool dens_ok = true;
      for (const auto& c : conds)
        if (!gf::eval_ratfunc(c, tau)) {
          dens_ok = false;
          break;
        }
      if (!dens_ok) continue;
      // separable parts of the step polynomials expressible over K must stay
      // squarefree at tau; nested-coefficient steps are covered by the exact
      // final verification instead
      bool steps_ok = true;
      for (size_t si = 0; si < t->st.nsteps() && steps_ok; ++si) {
        UniPoly g;
        bool scalar_step = true;
        for (const auto& cf : t->st.mins[si]) {
          for (size_t j = 1; j < cf.size() && scalar_step; ++j)
            if (!cf[j].is_zero()) scalar_step = false;
          if (!scalar_step) break;
          g.c.push_back(cf[0]);
        }
        if (!scalar_step) continue;
        PolyF<GFElem> gs =
            detail::sep_part_gf(detail::specialize_poly(pf::trim(std::move(g)), tau), p);
        if (!detail::squarefree_gf(gs)) steps_ok = false;
      }
      if (!steps_ok) continue;
      PolyF<GFElem> fbar = detail::specialize_poly(fsep, tau);
      if (fbar.deg() != int64_t(fsep.deg()) || !detail::squarefree_gf(fbar)) {
        saw_nonsimple = true;
        continue;
      }

      // ----- this tau is the specialization point; run the lift -----
      uint32_t d = uint32_t(2 * bound + 2);
      auto scx = std::make_shared<SerCtx>(SerCtx{gfc, d});

      StepsF<GFElem> st1;
      StepsF<SerElem> std_;
      st1.names = std_.names = t->st.names;
      st1.degs = std_.degs = t->st.degs;
      st1.ranks = std_.ranks = t->st.ranks;
      for (const auto& step : t->st.mins) {
        std::vector<std::vector<GFElem>> s1;
        std::vector<std::vector<SerElem>> sd;
        for (const auto& cf : step) {
          std::vector<GFElem> r1;
          std::vector<SerElem> rd;
          for (const auto& entry : cf) {
            r1.push_back(*gf::eval_ratfunc(entry, tau));
            rd.push_back(ser::eval_ratfunc(entry, tau, scx));
          }
          s1.push_back(std::move(r1));
          sd.push_back(std::move(rd));
        }
        st1.mins.push_back(std::move(s1));
        std_.mins.push_back(std::move(sd));
      }

      std::vector<GFElem> f1;
      std::vector<SerElem> fd, fdp;
      for (const auto& c : fsep.c) {
        f1.push_back(*gf::eval_ratfunc(c, tau));
        fd.push_back(ser::eval_ratfunc(c, tau, scx));
      }
      for (size_t i = 1; i < fd.size(); ++i) {
        SerElem ci = from_int(fd[i], int64_t(i % p));
        fdp.push_back(ci * fd[i]);
      }

      // residue roots in the finite chain algebra, by exhaustive enumeration
      std::vector<std::vector<GFElem>> residues;
      for (uint64_t ridx = 0; ridx < states; ++ridx) {
        uint64_t rest = ridx;
        std::vector<GFElem> cand;
        for (size_t i = 0; i < n; ++i) {
          cand.push_back(gf::from_index(gfc, rest % q));
          rest /= q;
        }
        if (chain_is_zero(chain_eval_poly(st1, f1, cand))) residues.push_back(cand);
      }

      detail::FlatAlgebra fa{&std_, n, d, gf::zero(gfc)};
      uint32_t level = uint32_t(std_.nsteps());
      std::vector<TowerElement> verified;
      for (const auto& rbar : residues) {
        std::vector<SerElem> r;
        for (const auto& c : rbar) r.push_back(ser::constant(scx, c));
        std::vector<SerElem> one_flat(n, ser::zero(scx));
        one_flat[0] = ser::constant(scx, gf::from_uint(gfc, 1));
        auto v = fa.divide(one_flat, chain_eval_poly(std_, fdp, r), scx);
        if (!v) {
          saw_nonsimple = true;
          continue;
        }
        bool hit = false;
        for (uint32_t round = 0; round < cfg.newton_rounds; ++round) {
          auto fr = chain_eval_poly(std_, fd, r);
          if (chain_is_zero(fr)) {
            hit = true;
            break;
          }
          auto corr = chain_mul(std_, level, *v, fr);
          chain_sub_into(r, corr);
          // v <- v (2 - f'(r) v)
          auto fp_r = chain_eval_poly(std_, fdp, r);
          auto w = chain_mul(std_, level, fp_r, *v);
          auto two = chain_scalar(std_, from_int(fd[0], 2));
          chain_sub_into(two, w);
          v = chain_mul(std_, level, *v, two);
        }
        if (!hit) continue;

        std::vector<RatFunc> coords;
        bool ok = true;
        for (size_t i = 0; i < n && ok; ++i) {
          auto pd = detail::pade(r[i], bound);
          if (!pd) {
            ok = false;
            break;
          }
          auto np = detail::to_prime_poly(detail::shift_to_var(pd->first, tau), p);
          auto dp = detail::to_prime_poly(detail::shift_to_var(pd->second, tau), p);
          if (!np || !dp || dp->is_zero()) {
            ok = false;
            break;
          }
          coords.push_back(RatFunc(std::move(*np), std::move(*dp)));
        }
        if (!ok) continue;
        TowerElement cand = tow::elem_from_coords(t, coords);
        if (pf::eval(tow::lift_poly(t, fsep), cand).is_zero()) verified.push_back(cand);
      }
      return {std::move(verified), k};
    }
  }
  if (!any_state_ok)
    throw NoGoodSpecialization("residue algebra exceeds the enumeration budget");
  if (saw_nonsimple) throw LiftDivergence();
  throw NoGoodSpecialization("no usable specialization point within the budget");
}

// ---------------------------------------------------------------------------
// Top level: peel the separable part, find its roots by the regime matching
// the base field, then pull back through exact p^e-th roots.
// ---------------------------------------------------------------------------

inline RootsResult roots_in_field(const UniPoly& f0, const TowerPtr& t,
                                  const RootsConfig& cfg = {}) {
  if (f0.is_zero()) throw AlgebraError("roots_in_field: zero polynomial");
  UniPoly f = pf::monic(f0);
  RootsResult res;
  if (f.deg() == 0) {
    res.complete = true;
    return res;
  }
  auto [fsep, e] = up::separable_presentation(f);

  int64_t bound = cfg.degree_bound;
  if (bound <= 0) {
    uint64_t td = 0;
    for (const auto& c : detail::condition_coeffs(f, t))
      td += detail::total_deg(c.num) + detail::total_deg(c.den);
    bound = int64_t(4 * (td + 1));
  }

  std::vector<TowerElement> sep_roots;
  if (fsep.deg() == 1) {
    sep_roots.push_back(tow::scalar_elem(t, -fsep.c[0]));
    res.complete = true;
  } else if (t->base.nvars() == 0) {
    sep_roots = roots_over_finite_base(fsep, t);
    res.complete = true;
  } else if (t->base.nvars() == 1) {
    auto [rs, k] = roots_by_specialization(fsep, t, cfg, bound);
    sep_roots = std::move(rs);
    res.complete = false;
    res.spec_k = k;
    res.bound_used = bound;
  } else {
    throw NoGoodSpecialization("no specialization strategy for multivariable bases");
  }

  std::vector<TowerElement> roots;
  if (e == 0) {
    roots = std::move(sep_roots);
  } else {
    for (const auto& rho : sep_roots) {
      auto r = tow::pe_root_in_tower(rho, e);
      if (r) roots.push_back(*r);
    }
  }

  std::sort(roots.begin(), roots.end(), [](const TowerElement& a, const TowerElement& b) {
    for (size_t i = 0; i < a.coords.size(); ++i) {
      int c = rf::cmp(a.coords[i], b.coords[i]);
      if (c != 0) return c < 0;
    }
    return false;
  });
  roots.erase(std::unique(roots.begin(), roots.end()), roots.end());
  res.roots = std::move(roots);
  return res;
}

}  // namespace rt

}  // namespace fext
