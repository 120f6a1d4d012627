#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <utility>
#include <vector>

#include "fext/tower.hpp"

namespace fext {

// Unital subalgebra of the K-endomorphism ring of L, stored as an
// echelonized subspace of the flattened n*n matrix space.  Closure under
// products is certified by whichever routine built the object.
struct MatAlgebra {
  TowerPtr tw;
  la::Subspace<RatFunc> space;  // row-major flattened matrices
  bool contains_identity = false;
  bool contains_l = false;  // every multiplication-by-element matrix lies inside

  size_t n() const { return tw->rank(); }
  size_t dim() const { return space.dim(); }
};

// Linear map between matrix algebras given by basis images; dom[i] maps to
// img[i].  Verified multiplicative and unital by verify_hom.
struct AlgebraHom {
  TowerPtr tw;  // tower of the target endomorphism ring
  std::vector<Mat<RatFunc>> dom;
  std::vector<Mat<RatFunc>> img;
};

namespace ma {

inline std::vector<RatFunc> flatten(const Mat<RatFunc>& m) {
  std::vector<RatFunc> v;
  v.reserve(m.nrows() * m.cols);
  for (const auto& row : m.rows)
    for (const auto& x : row) v.push_back(x);
  return v;
}

inline Mat<RatFunc> unflatten(const std::vector<RatFunc>& v, size_t n) {
  if (v.size() != n * n) throw DimensionMismatch();
  Mat<RatFunc> m;
  m.cols = n;
  for (size_t i = 0; i < n; ++i)
    m.rows.emplace_back(v.begin() + i * n, v.begin() + (i + 1) * n);
  return m;
}

inline Mat<RatFunc> identity_mat(const TowerPtr& t) {
  return la::identity(tow::scalar_zero(t), t->rank());
}

inline std::vector<Mat<RatFunc>> basis_mats(const MatAlgebra& a) {
  std::vector<Mat<RatFunc>> out;
  out.reserve(a.dim());
  for (const auto& v : a.space.basis) out.push_back(unflatten(v, a.n()));
  return out;
}

inline bool algebra_equal(const MatAlgebra& a, const MatAlgebra& b) {
  if (a.tw.get() != b.tw.get()) throw TowerMismatch();
  return la::equal(a.space, b.space);
}

inline bool algebra_contains(const MatAlgebra& a, const Mat<RatFunc>& m) {
  return la::contains(a.space, flatten(m));
}

namespace detail {

inline void check_shape(const TowerPtr& t, const Mat<RatFunc>& m) {
  if (m.nrows() != t->rank() || m.cols != t->rank()) throw DimensionMismatch();
}

inline bool reps_of_basis_inside(const TowerPtr& t,
                                 const la::Subspace<RatFunc>& sp) {
  for (size_t k = 0; k < t->rank(); ++k) {
    Mat<RatFunc> rep = tow::regular_rep(tow::basis_elem(t, k));
    if (!la::contains(sp, flatten(rep))) return false;
  }
  return true;
}

inline MatAlgebra finish(const TowerPtr& t, la::Subspace<RatFunc> sp) {
  MatAlgebra a;
  a.tw = t;
  a.contains_identity = la::contains(sp, flatten(identity_mat(t)));
  a.contains_l = reps_of_basis_inside(t, sp);
  a.space = std::move(sp);
  return a;
}

}  // namespace detail

// Smallest unital subalgebra containing gens.  Each round multiplies all
// pairs of current basis matrices and joins what escaped; the final round,
// which adds nothing, doubles as the closure certificate.
inline MatAlgebra generate_algebra(const TowerPtr& t,
                                   const std::vector<Mat<RatFunc>>& gens) {
  size_t n = t->rank();
  std::vector<std::vector<RatFunc>> vecs;
  vecs.push_back(flatten(identity_mat(t)));
  for (const auto& g : gens) {
    detail::check_shape(t, g);
    vecs.push_back(flatten(g));
  }
  la::Subspace<RatFunc> sp = la::span(n * n, vecs);
  for (;;) {
    std::vector<Mat<RatFunc>> mats;
    mats.reserve(sp.dim());
    for (const auto& v : sp.basis) mats.push_back(unflatten(v, n));
    std::vector<std::vector<RatFunc>> fresh;
    for (const auto& x : mats)
      for (const auto& y : mats) {
        std::vector<RatFunc> pr = flatten(la::mul(x, y));
        if (!la::contains(sp, pr)) fresh.push_back(std::move(pr));
      }
    if (fresh.empty()) break;
    sp = la::join(sp, la::span(n * n, fresh));
  }
  return detail::finish(t, std::move(sp));
}

inline MatAlgebra full_endomorphisms(const TowerPtr& t) {
  size_t n = t->rank();
  return detail::finish(t, la::full_space(tow::scalar_zero(t), n * n));
}

inline MatAlgebra scalar_algebra(const TowerPtr& t) {
  la::Subspace<RatFunc> sp = la::span(
      t->rank() * t->rank(),
      std::vector<std::vector<RatFunc>>{flatten(identity_mat(t))});
  return detail::finish(t, std::move(sp));
}

// Multiplication operators of a subfield; closed because the subfield is.
inline MatAlgebra image_of_subfield(const tow::Subfield& m) {
  size_t n = m.tw->rank();
  std::vector<std::vector<RatFunc>> vecs;
  for (const auto& v : m.space.basis)
    vecs.push_back(flatten(tow::regular_rep(tow::elem_from_coords(m.tw, v))));
  return detail::finish(m.tw, la::span(n * n, vecs));
}

inline MatAlgebra image_of_field(const TowerPtr& t) {
  return image_of_subfield(tow::subfield_full(t));
}

// {c in within : cs = sc for all s in S}; kernel of the stacked commutator
// maps in the coordinates of within's basis.  Centralizers of arbitrary
// sets are unital subalgebras, so no closure pass is needed.
inline MatAlgebra centralizer(const TowerPtr& t,
                              const std::vector<Mat<RatFunc>>& s,
                              const MatAlgebra& within) {
  if (within.tw.get() != t.get()) throw TowerMismatch();
  size_t n = t->rank();
  RatFunc like = tow::scalar_one(t);
  std::vector<Mat<RatFunc>> bas = basis_mats(within);
  for (const auto& m : s) {
    detail::check_shape(t, m);
    if (!la::contains(within.space, flatten(m)))
      throw AlgebraError("centralizer: set does not lie in the ambient algebra");
  }
  Mat<RatFunc> sys;
  sys.cols = bas.size();
  for (const auto& m : s) {
    std::vector<std::vector<RatFunc>> cols;
    cols.reserve(bas.size());
    for (const auto& b : bas)
      cols.push_back(flatten(la::sub(la::mul(b, m), la::mul(m, b))));
    for (size_t r = 0; r < n * n; ++r) {
      std::vector<RatFunc> row;
      row.reserve(bas.size());
      for (size_t k = 0; k < bas.size(); ++k) row.push_back(cols[k][r]);
      sys.rows.push_back(std::move(row));
    }
  }
  std::vector<std::vector<RatFunc>> vecs;
  for (const auto& y : la::kernel(sys, like)) {
    std::vector<RatFunc> v(n * n, tow::scalar_zero(t));
    for (size_t k = 0; k < bas.size(); ++k) {
      if (is_zero(y[k])) continue;
      for (size_t r = 0; r < n; ++r)
        for (size_t c = 0; c < n; ++c)
          v[r * n + c] = v[r * n + c] + y[k] * bas[k].rows[r][c];
    }
    vecs.push_back(std::move(v));
  }
  return detail::finish(t, la::span(n * n, vecs));
}

inline MatAlgebra center(const MatAlgebra& a) {
  return centralizer(a.tw, basis_mats(a), a);
}

struct DoubleCentralizer {
  MatAlgebra c;
  MatAlgebra cc;
  bool ok = false;
};

inline DoubleCentralizer double_centralizer_roundtrip(const TowerPtr& t,
                                                      const MatAlgebra& b) {
  size_t n = t->rank();
  MatAlgebra e = full_endomorphisms(t);
  DoubleCentralizer r;
  r.c = centralizer(t, basis_mats(b), e);
  r.cc = centralizer(t, basis_mats(r.c), e);
  r.ok = la::equal(r.cc.space, b.space) && b.dim() * r.c.dim() == n * n;
  return r;
}

// Simplicity by ideal closure: the two-sided span {x b y} over basis pairs
// is already the ideal generated by b (the algebra is closed and spanned by
// its basis), so simplicity means every such span is everything.
inline bool is_simple(const MatAlgebra& a) {
  size_t n = a.n();
  std::vector<Mat<RatFunc>> bas = basis_mats(a);
  for (const auto& b : bas) {
    std::vector<std::vector<RatFunc>> vecs;
    for (const auto& x : bas) {
      Mat<RatFunc> xb = la::mul(x, b);
      for (const auto& y : bas) vecs.push_back(flatten(la::mul(xb, y)));
    }
    if (la::span(n * n, vecs).dim() != a.dim()) return false;
  }
  return true;
}

// Expand x over h.dom and push the coordinates through to the images.
inline std::optional<Mat<RatFunc>> hom_apply(const AlgebraHom& h,
                                             const Mat<RatFunc>& x) {
  if (h.dom.empty()) return std::nullopt;
  size_t m = h.dom[0].nrows();
  RatFunc like = tow::scalar_one(h.tw);
  Mat<RatFunc> sys;
  sys.cols = h.dom.size();
  for (size_t r = 0; r < m * m; ++r) sys.rows.emplace_back();
  for (const auto& d : h.dom) {
    std::vector<RatFunc> fd = flatten(d);
    for (size_t r = 0; r < m * m; ++r) sys.rows[r].push_back(fd[r]);
  }
  auto co = la::solve(sys, flatten(x), like);
  if (!co) return std::nullopt;
  size_t n = h.tw->rank();
  std::vector<RatFunc> acc(n * n, zero_like(like));
  for (size_t k = 0; k < h.img.size(); ++k) {
    if (is_zero((*co)[k])) continue;
    std::vector<RatFunc> fi = flatten(h.img[k]);
    for (size_t r = 0; r < n * n; ++r) acc[r] = acc[r] + (*co)[k] * fi[r];
  }
  return unflatten(acc, n);
}

// Multiplicative and unital on the whole dom basis.
inline bool verify_hom(const AlgebraHom& h) {
  if (h.dom.size() != h.img.size() || h.dom.empty()) return false;
  size_t m = h.dom[0].nrows();
  Mat<RatFunc> im = la::identity(tow::scalar_zero(h.tw), m);
  auto iid = hom_apply(h, im);
  if (!iid) return false;
  std::vector<RatFunc> idn = flatten(identity_mat(h.tw));
  std::vector<RatFunc> got = flatten(*iid);
  for (size_t r = 0; r < idn.size(); ++r)
    if (!(idn[r] == got[r])) return false;
  for (size_t i = 0; i < h.dom.size(); ++i)
    for (size_t j = 0; j < h.dom.size(); ++j) {
      auto lhs = hom_apply(h, la::mul(h.dom[i], h.dom[j]));
      if (!lhs) return false;
      Mat<RatFunc> rhs = la::mul(h.img[i], h.img[j]);
      std::vector<RatFunc> a = flatten(*lhs), b = flatten(rhs);
      for (size_t r = 0; r < a.size(); ++r)
        if (!(a[r] == b[r])) return false;
    }
  return true;
}

// Block-diagonal embedding of the endomorphism ring of a subfield m into
// the endomorphism ring of the whole field, determined by a free module
// basis e of the field over m.  dom is the matrix-unit basis on m's
// echelon basis; images act as the same matrix on each e-block.
inline AlgebraHom diagonal_embedding(const tow::Subfield& m,
                                     const std::vector<TowerElement>& e) {
  const TowerPtr& t = m.tw;
  size_t n = t->rank();
  size_t r = m.space.dim();
  size_t k = e.size();
  if (r * k != n) throw NotABasis();
  RatFunc like = tow::scalar_one(t);
  std::vector<TowerElement> mb;
  mb.reserve(r);
  for (const auto& v : m.space.basis) mb.push_back(tow::elem_from_coords(t, v));
  Mat<RatFunc> p = la::zero_mat(tow::scalar_zero(t), n, n);
  for (size_t i = 0; i < k; ++i)
    for (size_t j = 0; j < r; ++j) {
      if (e[i].tw.get() != t.get()) throw TowerMismatch();
      TowerElement prod = e[i] * mb[j];
      for (size_t row = 0; row < n; ++row)
        p.rows[row][i * r + j] = prod.coords[row];
    }
  auto pinv = la::inverse(p, like);
  if (!pinv) throw NotABasis();
  AlgebraHom h;
  h.tw = t;
  for (size_t a = 0; a < r; ++a)
    for (size_t b = 0; b < r; ++b) {
      Mat<RatFunc> unit = la::zero_mat(tow::scalar_zero(t), r, r);
      unit.rows[a][b] = like;
      Mat<RatFunc> blk = la::zero_mat(tow::scalar_zero(t), n, n);
      for (size_t i = 0; i < k; ++i) blk.rows[i * r + a][i * r + b] = like;
      h.dom.push_back(std::move(unit));
      h.img.push_back(la::mul(la::mul(p, blk), *pinv));
    }
  if (!verify_hom(h)) throw NotABasis();
  return h;
}

inline MatAlgebra hom_image_algebra(const AlgebraHom& h) {
  size_t n = h.tw->rank();
  std::vector<std::vector<RatFunc>> vecs;
  for (const auto& m : h.img) vecs.push_back(flatten(m));
  return detail::finish(h.tw, la::span(n * n, vecs));
}

namespace detail {

inline bool invertible(const Mat<RatFunc>& m, const RatFunc& like) {
  return la::inverse(m, like).has_value();
}

// Random rational function with numerator and denominator of total degree
// at most two; the denominator is kept nonzero by construction.
inline RatFunc random_ratfunc(const TowerPtr& t, std::mt19937_64& rng) {
  uint32_t p = t->base.p;
  size_t nv = t->base.nvars();
  auto rand_poly = [&](bool unit_term) {
    MultiPoly acc = unit_term ? mp::constant(p, nv, 1) : mp::zero(p, nv);
    std::uniform_int_distribution<uint32_t> coef(0, p - 1);
    std::uniform_int_distribution<size_t> pick(0, nv == 0 ? 0 : nv - 1);
    for (int term = 0; term < 3; ++term) {
      uint32_t c = coef(rng);
      if (c == 0) continue;
      MultiPoly mono = mp::constant(p, nv, c);
      if (nv > 0) {
        int d = static_cast<int>(rng() % 3);
        for (int i = 0; i < d; ++i)
          mono = mp::mul(mono, mp::variable(p, nv, uint32_t(pick(rng))));
      }
      acc = mp::add(acc, mono);
    }
    return acc;
  };
  MultiPoly num = rand_poly(false);
  MultiPoly den = rand_poly(true);
  return RatFunc(num, den);
}

}  // namespace detail

// Invertible u with u * a = iso(a) * u for every basis element of A.  The
// solution space is computed exactly; an invertible point is then searched
// for, first over small prime-field combinations of its basis, then with
// random low-degree rational coefficients, within a fixed trial budget.
inline Mat<RatFunc> conjugating_unit(const MatAlgebra& a, const MatAlgebra& b,
                                     const AlgebraHom& iso) {
  if (a.tw.get() != b.tw.get() || a.tw.get() != iso.tw.get())
    throw TowerMismatch();
  const TowerPtr& t = a.tw;
  size_t n = t->rank();
  RatFunc like = tow::scalar_one(t);
  if (iso.dom.size() != iso.img.size() || iso.dom.empty())
    throw AlgebraError("conjugating_unit: empty isomorphism data");
  // rows of the system: flatten(u * d - g * u) = 0 entrywise, unknowns u
  Mat<RatFunc> sys;
  sys.cols = n * n;
  for (size_t q = 0; q < iso.dom.size(); ++q) {
    const Mat<RatFunc>& d = iso.dom[q];
    const Mat<RatFunc>& g = iso.img[q];
    detail::check_shape(t, d);
    detail::check_shape(t, g);
    for (size_t r = 0; r < n; ++r)
      for (size_t c = 0; c < n; ++c) {
        std::vector<RatFunc> row(n * n, tow::scalar_zero(t));
        for (size_t m = 0; m < n; ++m) {
          row[r * n + m] = row[r * n + m] + d.rows[m][c];
          row[m * n + c] = row[m * n + c] - g.rows[r][m];
        }
        sys.rows.push_back(std::move(row));
      }
  }
  std::vector<std::vector<RatFunc>> w = la::kernel(sys, like);
  if (w.empty()) throw NoUnitFound();
  size_t budget = 200;
  size_t tried = 0;
  auto attempt = [&](const std::vector<RatFunc>& v) -> std::optional<Mat<RatFunc>> {
    ++tried;
    Mat<RatFunc> u = unflatten(v, n);
    if (detail::invertible(u, like)) return u;
    return std::nullopt;
  };
  auto combine = [&](const std::vector<std::pair<size_t, uint32_t>>& terms) {
    std::vector<RatFunc> v(n * n, tow::scalar_zero(t));
    for (const auto& [idx, c] : terms) {
      RatFunc cf = RatFunc::constant(t->base.p, t->base.nvars(), c);
      for (size_t r = 0; r < n * n; ++r) v[r] = v[r] + cf * w[idx][r];
    }
    return v;
  };
  uint32_t p = t->base.p;
  size_t m = w.size();
  for (size_t i = 0; i < m && tried < budget; ++i)
    if (auto u = attempt(combine({{i, 1}}))) return *u;
  for (size_t i = 0; i < m && tried < budget; ++i)
    for (size_t j = i + 1; j < m && tried < budget; ++j)
      for (uint32_t c = 1; c < p && tried < budget; ++c)
        if (auto u = attempt(combine({{i, 1}, {j, c}}))) return *u;
  for (size_t i = 0; i < m && tried < budget; ++i)
    for (size_t j = i + 1; j < m && tried < budget; ++j)
      for (size_t k = j + 1; k < m && tried < budget; ++k)
        for (uint32_t c = 1; c < p && tried < budget; ++c)
          for (uint32_t d = 1; d < p && tried < budget; ++d)
            if (auto u = attempt(combine({{i, 1}, {j, c}, {k, d}}))) return *u;
  std::mt19937_64 rng(0xc0417u);
  while (tried < budget) {
    std::vector<RatFunc> v(n * n, tow::scalar_zero(t));
    for (size_t k = 0; k < m; ++k) {
      RatFunc cf = detail::random_ratfunc(t, rng);
      for (size_t r = 0; r < n * n; ++r) v[r] = v[r] + cf * w[k][r];
    }
    if (auto u = attempt(v)) return *u;
  }
  throw NoUnitFound();
}

// The centralizer of an algebra that contains every multiplication
// operator lands inside the image of the field itself; reading off each
// centralizing matrix applied to the coordinates of 1 recovers the
// subfield it multiplies by.
inline tow::Subfield algebra_to_subfield(const MatAlgebra& a) {
  const TowerPtr& t = a.tw;
  if (!a.contains_l || !detail::reps_of_basis_inside(t, a.space))
    throw NotContainingL();
  MatAlgebra c = centralizer(t, basis_mats(a), full_endomorphisms(t));
  std::vector<std::vector<RatFunc>> vecs;
  std::vector<RatFunc> one = tow::one_elem(t).coords;
  for (const auto& v : c.space.basis)
    vecs.push_back(la::mat_vec(unflatten(v, t->rank()), one));
  return tow::make_subfield(t, vecs);
}

}  // namespace ma
}  // namespace fext
