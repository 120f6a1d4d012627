#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "fext/matalg.hpp"
#include "fext/semilinear.hpp"

namespace fext {

// Space of derivations of the field that vanish on a chosen subfield,
// stored as matrices acting on coordinates.  module_basis is a generating
// set over the field itself (every basis matrix is a field-multiple
// combination of these).
struct DerivationSpace {
  TowerPtr tw;
  std::vector<Mat<RatFunc>> basis;         // basis over the scalar field
  std::vector<Mat<RatFunc>> module_basis;  // generators as a module over L
  size_t k_dim = 0;
  size_t l_dim = 0;
  bool leibniz_ok = false;
  bool vanishes_on_base = false;
};

// The algebra of operators commuting with the separable part, together
// with its split off of the field image: the operators killing 1 form a
// complementary left ideal.
struct DiffOpAlgebra {
  MatAlgebra d;
  la::Subspace<RatFunc> d_plus;
  std::vector<size_t> filtration;  // level dims when built by filtration
  bool split_ok = false;           // d = image(L) (+) d_plus
  bool left_ideal_ok = false;      // d * d_plus stays in d_plus
};

namespace df {

namespace detail {

inline TowerElement apply_mat(const TowerPtr& t, const Mat<RatFunc>& m,
                              const TowerElement& a) {
  return tow::elem_from_coords(t, la::mat_vec(m, a.coords));
}

// Leibniz check of one candidate derivation on every basis pair.
inline bool leibniz_holds(const TowerPtr& t, const Mat<RatFunc>& m) {
  size_t n = t->rank();
  for (size_t i = 0; i < n; ++i) {
    TowerElement bi = tow::basis_elem(t, i);
    TowerElement dbi = apply_mat(t, m, bi);
    for (size_t j = i; j < n; ++j) {
      TowerElement bj = tow::basis_elem(t, j);
      TowerElement lhs = apply_mat(t, m, bi * bj);
      TowerElement rhs = bi * apply_mat(t, m, bj) + dbi * bj;
      if (!(lhs == rhs)) return false;
    }
  }
  return true;
}

}  // namespace detail

// Derivations vanishing on `over`, as the kernel of the linear system that
// imposes the Leibniz rule on all products of basis monomials and
// annihilation of a basis of `over`.
inline DerivationSpace derivations(const TowerPtr& t, const tow::Subfield& over) {
  if (over.tw.get() != t.get()) throw TowerMismatch();
  if (!over.certified)
    throw AlgebraError("derivations: subfield lacks a closure certificate");
  size_t n = t->rank();
  RatFunc like = tow::scalar_one(t);
  std::vector<Mat<RatFunc>> reps;
  reps.reserve(n);
  for (size_t k = 0; k < n; ++k)
    reps.push_back(tow::regular_rep(tow::basis_elem(t, k)));
  Mat<RatFunc> sys;
  sys.cols = n * n;
  auto zero_row = [&]() { return std::vector<RatFunc>(n * n, tow::scalar_zero(t)); };
  for (size_t i = 0; i < n; ++i)
    for (size_t j = i; j < n; ++j) {
      std::vector<RatFunc> vij =
          (tow::basis_elem(t, i) * tow::basis_elem(t, j)).coords;
      for (size_t r = 0; r < n; ++r) {
        std::vector<RatFunc> row = zero_row();
        for (size_t c = 0; c < n; ++c) row[r * n + c] = row[r * n + c] + vij[c];
        for (size_t m = 0; m < n; ++m) {
          row[m * n + j] = row[m * n + j] - reps[i].rows[r][m];
          row[m * n + i] = row[m * n + i] - reps[j].rows[r][m];
        }
        sys.rows.push_back(std::move(row));
      }
    }
  for (const auto& mv : over.space.basis)
    for (size_t r = 0; r < n; ++r) {
      std::vector<RatFunc> row = zero_row();
      for (size_t c = 0; c < n; ++c) row[r * n + c] = mv[c];
      sys.rows.push_back(std::move(row));
    }
  DerivationSpace ds;
  ds.tw = t;
  for (const auto& v : la::kernel(sys, like))
    ds.basis.push_back(ma::unflatten(v, n));
  ds.k_dim = ds.basis.size();
  // module generators: greedily take basis matrices until their field
  // multiples span everything
  la::Subspace<RatFunc> acc{n * n, {}};
  for (const auto& m : ds.basis) {
    if (la::contains(acc, ma::flatten(m))) continue;
    ds.module_basis.push_back(m);
    std::vector<std::vector<RatFunc>> mults;
    for (size_t k = 0; k < n; ++k) mults.push_back(ma::flatten(la::mul(reps[k], m)));
    acc = la::join(acc, la::span(n * n, mults));
  }
  ds.l_dim = ds.module_basis.size();
  ds.leibniz_ok = true;
  ds.vanishes_on_base = true;
  for (const auto& m : ds.basis) {
    if (!detail::leibniz_holds(t, m)) ds.leibniz_ok = false;
    for (const auto& mv : over.space.basis)
      for (const auto& x : la::mat_vec(m, mv))
        if (!is_zero(x)) ds.vanishes_on_base = false;
  }
  return ds;
}

inline tow::Subfield constants_field(const DerivationSpace& d) {
  const TowerPtr& t = d.tw;
  size_t n = t->rank();
  Mat<RatFunc> sys;
  sys.cols = n;
  for (const auto& m : d.basis)
    for (const auto& row : m.rows) sys.rows.push_back(row);
  std::vector<std::vector<RatFunc>> vecs =
      la::kernel(sys, tow::scalar_one(t));
  return tow::make_subfield(t, vecs);
}

namespace detail {

// Derivation space of a subfield viewed as an algebra in its own right,
// using structure constants in the subfield's echelon basis; returns the
// constants of the derivations vanishing on `base`, mapped back into the
// big field.
inline tow::Subfield subfield_derivation_constants(const tow::Subfield& m,
                                                   const tow::Subfield& base) {
  const TowerPtr& t = m.tw;
  size_t r = m.space.dim();
  RatFunc like = tow::scalar_one(t);
  std::vector<TowerElement> mb;
  mb.reserve(r);
  for (const auto& v : m.space.basis) mb.push_back(tow::elem_from_coords(t, v));
  // structure constants and the multiplication operators of the subfield
  std::vector<Mat<RatFunc>> reps(r, la::zero_mat(tow::scalar_zero(t), r, r));
  std::vector<std::vector<std::vector<RatFunc>>> prod(
      r, std::vector<std::vector<RatFunc>>(r));
  for (size_t i = 0; i < r; ++i)
    for (size_t j = 0; j < r; ++j) {
      auto co = la::coords_in(m.space, (mb[i] * mb[j]).coords);
      if (!co) throw AlgebraError("subfield is not closed under products");
      prod[i][j] = *co;
      for (size_t k = 0; k < r; ++k) reps[i].rows[k][j] = (*co)[k];
    }
  Mat<RatFunc> sys;
  sys.cols = r * r;
  auto zero_row = [&]() { return std::vector<RatFunc>(r * r, tow::scalar_zero(t)); };
  for (size_t i = 0; i < r; ++i)
    for (size_t j = i; j < r; ++j)
      for (size_t q = 0; q < r; ++q) {
        std::vector<RatFunc> row = zero_row();
        for (size_t c = 0; c < r; ++c) row[q * r + c] = row[q * r + c] + prod[i][j][c];
        for (size_t w = 0; w < r; ++w) {
          row[w * r + j] = row[w * r + j] - reps[i].rows[q][w];
          row[w * r + i] = row[w * r + i] - reps[j].rows[q][w];
        }
        sys.rows.push_back(std::move(row));
      }
  for (const auto& bv : base.space.basis) {
    auto co = la::coords_in(m.space, bv);
    if (!co) throw AlgebraError("marked base escapes the candidate subfield");
    for (size_t q = 0; q < r; ++q) {
      std::vector<RatFunc> row = zero_row();
      for (size_t c = 0; c < r; ++c) row[q * r + c] = (*co)[c];
      sys.rows.push_back(std::move(row));
    }
  }
  std::vector<std::vector<RatFunc>> ders = la::kernel(sys, like);
  if (ders.empty()) return m;  // already separable over the base
  Mat<RatFunc> cond;
  cond.cols = r;
  for (const auto& v : ders) {
    Mat<RatFunc> dm = ma::unflatten(v, r);
    for (const auto& row : dm.rows) cond.rows.push_back(row);
  }
  std::vector<std::vector<RatFunc>> kv = la::kernel(cond, like);
  std::vector<std::vector<RatFunc>> vecs;
  for (const auto& y : kv) {
    TowerElement e = tow::zero_elem(t);
    for (size_t k = 0; k < r; ++k) e = e + y[k] * mb[k];
    vecs.push_back(e.coords);
  }
  return tow::make_subfield(t, vecs);
}

}  // namespace detail

// Largest subfield separable over the marked base: repeatedly replace the
// candidate with the constants of its own derivation space until no
// derivations remain.  Each pass multiplies the inseparability exponent
// by one, so the loop ends within log_p(rank) rounds.
inline tow::Subfield separable_closure(const TowerPtr& t) {
  tow::Subfield base = tow::base_subfield(t);
  tow::Subfield m = tow::subfield_full(t);
  for (;;) {
    tow::Subfield next = detail::subfield_derivation_constants(m, base);
    if (next.dim() == m.dim()) return m;
    m = std::move(next);
  }
}

namespace detail {

inline std::pair<la::Subspace<RatFunc>, bool> split_d_plus(
    const TowerPtr& t, const MatAlgebra& d) {
  size_t n = t->rank();
  RatFunc like = tow::scalar_one(t);
  std::vector<RatFunc> one = tow::one_elem(t).coords;
  std::vector<Mat<RatFunc>> bas = ma::basis_mats(d);
  Mat<RatFunc> at_one;
  at_one.cols = bas.size();
  for (size_t r = 0; r < n; ++r) at_one.rows.emplace_back();
  for (const auto& m : bas) {
    std::vector<RatFunc> v = la::mat_vec(m, one);
    for (size_t r = 0; r < n; ++r) at_one.rows[r].push_back(v[r]);
  }
  std::vector<std::vector<RatFunc>> vecs;
  for (const auto& y : la::kernel(at_one, like)) {
    std::vector<RatFunc> flat(n * n, tow::scalar_zero(t));
    for (size_t k = 0; k < bas.size(); ++k) {
      if (is_zero(y[k])) continue;
      std::vector<RatFunc> fb = ma::flatten(bas[k]);
      for (size_t r = 0; r < n * n; ++r) flat[r] = flat[r] + y[k] * fb[r];
    }
    vecs.push_back(std::move(flat));
  }
  la::Subspace<RatFunc> plus = la::span(n * n, vecs);
  la::Subspace<RatFunc> img = ma::image_of_field(t).space;
  bool split = la::meet(img, plus).dim() == 0 &&
               la::equal(la::join(img, plus), d.space);
  return {std::move(plus), split};
}

inline bool left_ideal_holds(const MatAlgebra& d,
                             const la::Subspace<RatFunc>& plus) {
  size_t n = d.n();
  std::vector<Mat<RatFunc>> bas = ma::basis_mats(d);
  for (const auto& v : plus.basis) {
    Mat<RatFunc> q = ma::unflatten(v, n);
    for (const auto& b : bas)
      if (!la::contains(plus, ma::flatten(la::mul(b, q)))) return false;
  }
  return true;
}

inline DiffOpAlgebra package(const TowerPtr& t, MatAlgebra d,
                             std::vector<size_t> filtration) {
  DiffOpAlgebra out;
  auto [plus, split] = split_d_plus(t, d);
  out.left_ideal_ok = left_ideal_holds(d, plus);
  out.d = std::move(d);
  out.d_plus = std::move(plus);
  out.split_ok = split;
  out.filtration = std::move(filtration);
  return out;
}

}  // namespace detail

// Operators commuting with the separable part of the tower, taken inside
// the endomorphisms that are linear over the marked base.
inline DiffOpAlgebra diff_ops(const TowerPtr& t) {
  tow::Subfield sep = separable_closure(t);
  MatAlgebra within = ma::full_endomorphisms(t);
  if (t->base_steps > 0) {
    MatAlgebra base_img = ma::image_of_subfield(tow::base_subfield(t));
    within = ma::centralizer(t, ma::basis_mats(base_img), within);
  }
  MatAlgebra d =
      ma::centralizer(t, ma::basis_mats(ma::image_of_subfield(sep)), within);
  return detail::package(t, std::move(d), {});
}

// Independent construction through the commutator filtration: level 0 is
// the field image, and each level collects the operators whose commutator
// with every multiplication drops one level down.
inline DiffOpAlgebra diff_ops_by_filtration(const TowerPtr& t,
                                            size_t max_order) {
  size_t n = t->rank();
  RatFunc like = tow::scalar_one(t);
  MatAlgebra ambient = ma::full_endomorphisms(t);
  if (t->base_steps > 0) {
    MatAlgebra base_img = ma::image_of_subfield(tow::base_subfield(t));
    ambient = ma::centralizer(t, ma::basis_mats(base_img), ambient);
  }
  std::vector<Mat<RatFunc>> reps;
  for (size_t k = 0; k < n; ++k)
    reps.push_back(tow::regular_rep(tow::basis_elem(t, k)));
  la::Subspace<RatFunc> level = ma::image_of_field(t).space;
  std::vector<size_t> dims{level.dim()};
  std::vector<Mat<RatFunc>> amb = ma::basis_mats(ambient);
  for (size_t order = 1; order <= max_order; ++order) {
    // membership of the commutator in the previous level, expressed as
    // linear conditions on the coefficients over the ambient basis
    Mat<RatFunc> sys;
    sys.cols = amb.size();
    std::vector<size_t> pivots;
    std::vector<bool> is_piv(n * n, false);
    for (const auto& row : level.basis) {
      size_t piv = 0;
      while (piv < n * n && is_zero(row[piv])) ++piv;
      pivots.push_back(piv);
      is_piv[piv] = true;
    }
    for (const auto& rp : reps) {
      std::vector<std::vector<RatFunc>> comm;
      comm.reserve(amb.size());
      for (const auto& b : amb) {
        std::vector<RatFunc> v =
            ma::flatten(la::sub(la::mul(b, rp), la::mul(rp, b)));
        // reduce against the level basis, leaving only the residue
        for (size_t k = 0; k < level.basis.size(); ++k) {
          RatFunc f = v[pivots[k]];
          if (is_zero(f)) continue;
          for (size_t c = pivots[k]; c < n * n; ++c)
            v[c] = v[c] - f * level.basis[k][c];
        }
        comm.push_back(std::move(v));
      }
      for (size_t c = 0; c < n * n; ++c) {
        if (is_piv[c]) continue;
        std::vector<RatFunc> row;
        row.reserve(amb.size());
        bool nonzero = false;
        for (size_t k = 0; k < amb.size(); ++k) {
          row.push_back(comm[k][c]);
          nonzero = nonzero || !is_zero(comm[k][c]);
        }
        if (nonzero) sys.rows.push_back(std::move(row));
      }
    }
    std::vector<std::vector<RatFunc>> vecs;
    for (const auto& y : la::kernel(sys, like)) {
      std::vector<RatFunc> flat(n * n, tow::scalar_zero(t));
      for (size_t k = 0; k < amb.size(); ++k) {
        if (is_zero(y[k])) continue;
        std::vector<RatFunc> fb = ma::flatten(amb[k]);
        for (size_t r = 0; r < n * n; ++r) flat[r] = flat[r] + y[k] * fb[r];
      }
      vecs.push_back(std::move(flat));
    }
    la::Subspace<RatFunc> next = la::span(n * n, vecs);
    dims.push_back(next.dim());
    bool stable = la::equal(next, level);
    level = std::move(next);
    if (stable) break;
  }
  // one closure round certifies the stabilized space is an algebra
  std::vector<Mat<RatFunc>> gens;
  for (const auto& v : level.basis) gens.push_back(ma::unflatten(v, n));
  MatAlgebra d = ma::generate_algebra(t, gens);
  if (d.dim() != level.dim())
    throw AlgebraError("filtration did not stabilize to an algebra");
  return detail::package(t, std::move(d), std::move(dims));
}

// Joint kernel of the operators that kill 1.
inline tow::Subfield dplus_constants(const DiffOpAlgebra& d) {
  const TowerPtr& t = d.d.tw;
  size_t n = t->rank();
  Mat<RatFunc> sys;
  sys.cols = n;
  for (const auto& v : d.d_plus.basis) {
    Mat<RatFunc> m = ma::unflatten(v, n);
    for (auto& row : m.rows) sys.rows.push_back(std::move(row));
  }
  return tow::make_subfield(t, la::kernel(sys, tow::scalar_one(t)));
}

// Elements whose multiplication operator commutes with the whole algebra:
// the centralizer in the full ring, met with the field image.
inline tow::Subfield l_dif(const TowerPtr& t, const DiffOpAlgebra& d) {
  MatAlgebra c =
      ma::centralizer(t, ma::basis_mats(d.d), ma::full_endomorphisms(t));
  la::Subspace<RatFunc> inside =
      la::meet(c.space, ma::image_of_field(t).space);
  std::vector<std::vector<RatFunc>> vecs;
  std::vector<RatFunc> one = tow::one_elem(t).coords;
  for (const auto& v : inside.basis)
    vecs.push_back(la::mat_vec(ma::unflatten(v, t->rank()), one));
  return tow::make_subfield(t, vecs);
}

// Elements with a p-power inside the marked base; one semilinear solve at
// the exponent bound ceil(log_p rank).
inline tow::Subfield purely_inseparable_part(const TowerPtr& t) {
  size_t n = t->rank();
  uint32_t p = t->base.p;
  uint32_t m = 0;
  for (size_t q = 1; q < n; q *= p) ++m;
  if (m == 0) return tow::base_subfield(t);
  Mat<RatFunc> fr = tow::frobenius_matrix(t, m);
  la::Subspace<RatFunc> keep = tow::base_subfield(t).space;
  la::Subspace<RatFunc> sol = la::semilinear_kernel(fr, m, keep);
  return tow::make_subfield(t, sol.basis);
}

inline MatAlgebra derivation_algebra(const TowerPtr& t,
                                     const DerivationSpace& d) {
  std::vector<Mat<RatFunc>> gens;
  for (size_t k = 0; k < t->rank(); ++k)
    gens.push_back(tow::regular_rep(tow::basis_elem(t, k)));
  for (const auto& m : d.basis) gens.push_back(m);
  return ma::generate_algebra(t, gens);
}

// Concatenate two towers over the same scalar base: the second tower's
// steps are re-indexed above the first's.
inline TowerPtr concat_towers(const TowerPtr& t1, const TowerPtr& t2) {
  if (t1->base.p != t2->base.p || t1->base.vars != t2->base.vars)
    throw TowerMismatch();
  if (t1->base_steps != 0 || t2->base_steps != 0)
    throw AlgebraError("concat_towers expects unmarked towers");
  TowerPtr t = t1;
  for (size_t i = 0; i < t2->st.names.size(); ++i) {
    size_t ri = t2->st.ranks[i];
    PolyF<TowerElement> f;
    for (size_t j = 0; j < t2->st.mins[i].size(); ++j) {
      std::vector<RatFunc> coords(t->rank(), tow::scalar_zero(t));
      for (size_t k = 0; k < ri; ++k)
        coords[k * t1->rank()] = t2->st.mins[i][j][k];
      f.c.push_back(tow::elem_from_coords(t, coords));
    }
    t = tow::extend(t, t2->st.names[i], f);
  }
  return t;
}

namespace detail {

// Exercise dynamic evaluation on a deterministic family of elements; a
// zero divisor in the concatenated algebra surfaces as a reducible step
// modulus during inversion.
inline void probe_invertibility(const TowerPtr& t, size_t r1, size_t r2) {
  std::vector<TowerElement> probes;
  for (size_t a = 1; a < r1; ++a)
    for (size_t b = 1; b < r2; ++b) {
      TowerElement x = tow::basis_elem(t, a);
      TowerElement y = tow::basis_elem(t, b * r1);
      for (uint32_t c = 0; c < t->base.p; ++c) {
        TowerElement shift =
            tow::scalar_elem(t, RatFunc::constant(t->base.p, t->base.nvars(), c));
        probes.push_back(y - x + shift);
        probes.push_back(y + x + shift);
      }
    }
  std::mt19937_64 rng(0x7e4512u);
  for (int trial = 0; trial < 8; ++trial) {
    TowerElement x = tow::zero_elem(t);
    for (size_t k = 0; k < t->rank(); ++k)
      if (rng() % 2)
        x = x + tow::basis_elem(t, k);
    probes.push_back(x);
  }
  for (const auto& x : probes) {
    if (x.is_zero()) continue;
    (void)elem_invert(x);
  }
}

}  // namespace detail

struct TensorDiffOpsReport {
  size_t dim1 = 0;
  size_t dim2 = 0;
  size_t dim12 = 0;
  bool dims_multiply = false;
  bool factors_generate = false;
  TowerPtr combined;
};

// Check that operator algebras multiply across a tower concatenation: the
// two factors embed block-diagonally and together generate the whole.
inline TensorDiffOpsReport tensor_diffops_check(const TowerPtr& t1,
                                                const TowerPtr& t2) {
  TensorDiffOpsReport rep;
  try {
    TowerPtr t = concat_towers(t1, t2);
    rep.combined = t;
    size_t r1 = t1->rank();
    size_t r2 = t2->rank();
    detail::probe_invertibility(t, r1, r2);
    DiffOpAlgebra d1 = diff_ops(t1);
    DiffOpAlgebra d2 = diff_ops(t2);
    DiffOpAlgebra d = diff_ops(t);
    rep.dim1 = d1.d.dim();
    rep.dim2 = d2.d.dim();
    rep.dim12 = d.d.dim();
    rep.dims_multiply = rep.dim12 == rep.dim1 * rep.dim2;
    // factor subfields inside the concatenation and their free bases
    std::vector<std::vector<RatFunc>> v1, v2;
    std::vector<TowerElement> e1, e2;
    for (size_t k = 0; k < r1; ++k) {
      v1.push_back(tow::basis_elem(t, k).coords);
      e2.push_back(tow::basis_elem(t, k));
    }
    for (size_t k = 0; k < r2; ++k) {
      v2.push_back(tow::basis_elem(t, k * r1).coords);
      e1.push_back(tow::basis_elem(t, k * r1));
    }
    tow::Subfield m1{t, la::span(t->rank(), v1), true};
    tow::Subfield m2{t, la::span(t->rank(), v2), true};
    AlgebraHom th1 = ma::diagonal_embedding(m1, e1);
    AlgebraHom th2 = ma::diagonal_embedding(m2, e2);
    std::vector<Mat<RatFunc>> gens;
    for (const auto& b : ma::basis_mats(d1.d)) {
      auto img = ma::hom_apply(th1, b);
      if (!img) throw AlgebraError("factor operator escapes the embedding");
      gens.push_back(*img);
    }
    for (const auto& b : ma::basis_mats(d2.d)) {
      auto img = ma::hom_apply(th2, b);
      if (!img) throw AlgebraError("factor operator escapes the embedding");
      gens.push_back(*img);
    }
    MatAlgebra joint = ma::generate_algebra(t, gens);
    rep.factors_generate = la::equal(joint.space, d.d.space);
  } catch (const ReducibleModulus& e) {
    throw NotAField("tensor factors are not linearly disjoint; zero divisor along " +
                    e.step);
  }
  return rep;
}

}  // namespace df
}  // namespace fext
