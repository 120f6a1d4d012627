#pragma once

#include <algorithm>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "fext/differential.hpp"
#include "fext/matalg.hpp"
#include "fext/roots.hpp"
#include "fext/tower.hpp"

namespace fext {
namespace gal {

// ---------------------------------------------------------------------------
// Automorphism groups.
// ---------------------------------------------------------------------------

struct Automorphism {
  std::vector<TowerElement> gen_images;  // one per tower step
  Mat<RatFunc> mat;                      // action on the monomial basis
};

struct AutGroup {
  TowerPtr tw;
  std::vector<Automorphism> elems;
  // table[i][j] = index of the map "apply j, then i"
  std::vector<std::vector<size_t>> table;
  size_t identity = 0;
  bool heuristic = false;  // some root search was not certified complete

  size_t order() const { return elems.size(); }
  size_t inverse_of(size_t i) const {
    for (size_t j = 0; j < table[i].size(); ++j)
      if (table[i][j] == identity) return j;
    throw AlgebraError("automorphism without an inverse in the table");
  }
};

namespace detail {

inline bool mat_eq(const Mat<RatFunc>& a, const Mat<RatFunc>& b) {
  if (a.nrows() != b.nrows() || a.cols != b.cols) return false;
  for (size_t r = 0; r < a.nrows(); ++r)
    for (size_t c = 0; c < a.cols; ++c)
      if (!(a.rows[r][c] == b.rows[r][c])) return false;
  return true;
}

// images of all basis monomials under "generator i goes to imgs[i]",
// built bottom-up along the mixed-radix index structure
inline std::vector<TowerElement> monomial_images(
    const TowerPtr& t, const std::vector<TowerElement>& imgs) {
  size_t n = t->rank();
  std::vector<TowerElement> out;
  out.reserve(n);
  out.push_back(tow::one_elem(t));
  for (size_t k = 1; k < n; ++k) {
    size_t lowest = 0;
    for (size_t s = 0; s < t->st.nsteps(); ++s)
      if ((k / t->st.ranks[s]) % t->st.degs[s] != 0) {
        lowest = s;
        break;
      }
    out.push_back(out[k - t->st.ranks[lowest]] * imgs[lowest]);
  }
  return out;
}

inline Mat<RatFunc> assignment_matrix(const TowerPtr& t,
                                      const std::vector<TowerElement>& imgs) {
  size_t n = t->rank();
  std::vector<TowerElement> mono = monomial_images(t, imgs);
  Mat<RatFunc> m = la::zero_mat(tow::scalar_zero(t), n, n);
  for (size_t k = 0; k < n; ++k)
    for (size_t r = 0; r < n; ++r) m.rows[r][k] = mono[k].coords[r];
  return m;
}

// complete check: fixes the marked base monomials, invertible, and
// multiplicative on every basis pair (with scalar-linearity built in,
// this certifies a field automorphism over the base)
inline bool verify_automorphism(const TowerPtr& t, const Mat<RatFunc>& m) {
  size_t n = t->rank();
  RatFunc one = tow::scalar_one(t);
  RatFunc zero = tow::scalar_zero(t);
  for (size_t k = 0; k < t->base_rank(); ++k)
    for (size_t r = 0; r < n; ++r)
      if (!((r == k ? one : zero) == m.rows[r][k])) return false;
  if (!la::inverse(m, one)) return false;
  std::vector<TowerElement> fb;
  fb.reserve(n);
  for (size_t i = 0; i < n; ++i)
    fb.push_back(tow::elem_from_coords(t, la::mat_vec(m, tow::basis_elem(t, i).coords)));
  for (size_t i = 0; i < n; ++i)
    for (size_t j = i; j < n; ++j) {
      TowerElement lhs = tow::elem_from_coords(
          t, la::mat_vec(m, (tow::basis_elem(t, i) * tow::basis_elem(t, j)).coords));
      if (!(lhs == fb[i] * fb[j])) return false;
    }
  return true;
}

}  // namespace detail

// Search over products of candidate generator images (all roots in L of each
// generator's minimal polynomial over the scalar base, a superset of the
// valid images), keep the assignments that verify as automorphisms, and
// close under composition.
inline AutGroup automorphism_group(const TowerPtr& t) {
  AutGroup g;
  g.tw = t;
  size_t n = t->rank();
  size_t nsteps = t->st.nsteps();
  std::vector<std::vector<TowerElement>> cands(nsteps);
  for (size_t i = 0; i < nsteps; ++i) {
    TowerElement gi = tow::gen_elem(t, i);
    if (i < t->base_steps) {
      cands[i] = {gi};
      continue;
    }
    rt::RootsResult rr = rt::roots_in_field(tow::minimal_polynomial(gi), t);
    cands[i] = std::move(rr.roots);
    if (!rr.complete) g.heuristic = true;
    bool has_self = false;
    for (const auto& r : cands[i])
      if (r == gi) has_self = true;
    if (!has_self) {
      if (rr.complete)
        throw AlgebraError("root search claims completeness but misses a known root");
      cands[i].push_back(gi);
    }
  }
  size_t bound = n / t->base_rank();
  auto find_mat = [&](const Mat<RatFunc>& m) -> std::optional<size_t> {
    for (size_t i = 0; i < g.elems.size(); ++i)
      if (detail::mat_eq(g.elems[i].mat, m)) return i;
    return std::nullopt;
  };
  auto push_checked = [&](std::vector<TowerElement> imgs, Mat<RatFunc> m) {
    if (find_mat(m)) return;
    if (!detail::verify_automorphism(t, m)) return;
    g.elems.push_back(Automorphism{std::move(imgs), std::move(m)});
    if (g.elems.size() > bound)
      throw AlgebraError("more automorphisms than the extension degree");
  };
  std::vector<size_t> odo(nsteps, 0);
  for (;;) {
    std::vector<TowerElement> imgs;
    imgs.reserve(nsteps);
    for (size_t i = 0; i < nsteps; ++i) imgs.push_back(cands[i][odo[i]]);
    push_checked(imgs, detail::assignment_matrix(t, imgs));
    size_t i = 0;
    while (i < nsteps && ++odo[i] == cands[i].size()) odo[i++] = 0;
    if (i == nsteps) break;
  }
  // composition closure; products of verified automorphisms can be new only
  // when a root list was incomplete
  for (bool grew = true; grew;) {
    grew = false;
    size_t m = g.elems.size();
    for (size_t i = 0; i < m && !grew; ++i)
      for (size_t j = 0; j < m && !grew; ++j) {
        Mat<RatFunc> pr = la::mul(g.elems[i].mat, g.elems[j].mat);
        if (find_mat(pr)) continue;
        std::vector<TowerElement> imgs;
        for (size_t s = 0; s < nsteps; ++s)
          imgs.push_back(
              tow::elem_from_coords(t, la::mat_vec(pr, tow::gen_elem(t, s).coords)));
        size_t before = g.elems.size();
        push_checked(std::move(imgs), std::move(pr));
        if (g.elems.size() != before) grew = true;
      }
  }
  auto idx = find_mat(ma::identity_mat(t));
  if (!idx) throw AlgebraError("automorphism search lost the identity");
  g.identity = *idx;
  g.table.assign(g.elems.size(), std::vector<size_t>(g.elems.size(), 0));
  for (size_t i = 0; i < g.elems.size(); ++i)
    for (size_t j = 0; j < g.elems.size(); ++j) {
      auto k = find_mat(la::mul(g.elems[i].mat, g.elems[j].mat));
      if (!k) throw AlgebraError("composition table is not total");
      g.table[i][j] = *k;
    }
  for (size_t i = 0; i < g.elems.size(); ++i) (void)g.inverse_of(i);
  return g;
}

// ---------------------------------------------------------------------------
// Fixed fields.
// ---------------------------------------------------------------------------

inline tow::Subfield fixed_field(const AutGroup& g,
                                 const std::vector<size_t>& subset) {
  const TowerPtr& t = g.tw;
  size_t n = t->rank();
  RatFunc one = tow::scalar_one(t);
  la::Subspace<RatFunc> fx = la::full_space(one, n);
  for (size_t idx : subset) {
    Mat<RatFunc> m = g.elems.at(idx).mat;
    for (size_t r = 0; r < n; ++r) m.rows[r][r] = m.rows[r][r] - one;
    fx = la::meet(fx, la::span(n, la::kernel(m, one)));
  }
  return tow::make_subfield(t, fx.basis);
}

inline tow::Subfield fixed_field(const AutGroup& g) {
  std::vector<size_t> all(g.order());
  std::iota(all.begin(), all.end(), size_t(0));
  return fixed_field(g, all);
}

namespace detail {

inline tow::Subfield meet_subfields(const tow::Subfield& a, const tow::Subfield& b) {
  if (a.tw.get() != b.tw.get()) throw TowerMismatch();
  return tow::make_subfield(a.tw, la::meet(a.space, b.space).basis);
}

inline MatAlgebra ambient_endomorphisms(const TowerPtr& t) {
  MatAlgebra e = ma::full_endomorphisms(t);
  if (t->base_steps == 0) return e;
  MatAlgebra base_img = ma::image_of_subfield(tow::base_subfield(t));
  return ma::centralizer(t, ma::basis_mats(base_img), e);
}

// the subfield an algebra of multiplication operators multiplies by
inline tow::Subfield mats_times_one(const TowerPtr& t,
                                    const la::Subspace<RatFunc>& sp) {
  std::vector<std::vector<RatFunc>> vecs = {tow::one_elem(t).coords};
  std::vector<RatFunc> one = tow::one_elem(t).coords;
  for (const auto& v : sp.basis)
    vecs.push_back(la::mat_vec(ma::unflatten(v, t->rank()), one));
  return tow::make_subfield(t, vecs);
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Skew group algebras.
// ---------------------------------------------------------------------------

struct SkewAlgebra {
  MatAlgebra r;
  MatAlgebra a0;
  size_t group_order = 0;
  bool direct = false;  // dim r == dim a0 * |G|
};

inline SkewAlgebra skew_group_algebra(const MatAlgebra& a0, const AutGroup& g) {
  if (a0.tw.get() != g.tw.get()) throw TowerMismatch();
  const TowerPtr& t = a0.tw;
  RatFunc one = tow::scalar_one(t);
  std::vector<Mat<RatFunc>> bas = ma::basis_mats(a0);
  for (const auto& e : g.elems) {
    auto gi = la::inverse(e.mat, one);
    if (!gi) throw AlgebraError("group matrix is singular");
    for (const auto& b : bas)
      if (!ma::algebra_contains(a0, la::mul(la::mul(e.mat, b), *gi)))
        throw NotNormalized();
  }
  std::vector<Mat<RatFunc>> gens = bas;
  for (const auto& e : g.elems) gens.push_back(e.mat);
  SkewAlgebra s;
  s.r = ma::generate_algebra(t, gens);
  s.a0 = a0;
  s.group_order = g.order();
  s.direct = s.r.dim() == a0.dim() * g.order();
  return s;
}

// ---------------------------------------------------------------------------
// Subgroups.
// ---------------------------------------------------------------------------

struct Subgroup {
  std::vector<size_t> elems;  // sorted indices into the parent group
  bool normal = false;
};

inline std::vector<size_t> close_subset(const AutGroup& g, std::vector<size_t> seed) {
  std::set<size_t> got(seed.begin(), seed.end());
  got.insert(g.identity);
  for (bool grew = true; grew;) {
    grew = false;
    std::vector<size_t> cur(got.begin(), got.end());
    for (size_t a : cur)
      for (size_t b : cur)
        if (got.insert(g.table[a][b]).second) grew = true;
  }
  return std::vector<size_t>(got.begin(), got.end());
}

inline std::vector<Subgroup> subgroup_lattice(const AutGroup& g) {
  if (g.order() > 24) throw GroupTooLarge();
  std::set<std::vector<size_t>> found;
  found.insert(close_subset(g, {}));
  for (bool grew = true; grew;) {
    grew = false;
    std::vector<std::vector<size_t>> cur(found.begin(), found.end());
    for (const auto& h : cur)
      for (size_t x = 0; x < g.order(); ++x) {
        if (std::binary_search(h.begin(), h.end(), x)) continue;
        std::vector<size_t> seed = h;
        seed.push_back(x);
        if (found.insert(close_subset(g, seed)).second) grew = true;
      }
  }
  std::vector<Subgroup> out;
  for (const auto& h : found) {
    Subgroup sg;
    sg.elems = h;
    sg.normal = true;
    for (size_t a = 0; a < g.order() && sg.normal; ++a) {
      size_t ai = g.inverse_of(a);
      for (size_t x : h)
        if (!std::binary_search(h.begin(), h.end(), g.table[g.table[a][x]][ai])) {
          sg.normal = false;
          break;
        }
    }
    out.push_back(std::move(sg));
  }
  return out;
}

// a subgroup repackaged as a group of its own (for skew constructions)
inline AutGroup subgroup_group(const AutGroup& g, const std::vector<size_t>& idx) {
  AutGroup h;
  h.tw = g.tw;
  h.heuristic = g.heuristic;
  std::map<size_t, size_t> pos;
  for (size_t k = 0; k < idx.size(); ++k) {
    pos[idx[k]] = k;
    h.elems.push_back(g.elems.at(idx[k]));
  }
  h.table.assign(idx.size(), std::vector<size_t>(idx.size(), 0));
  for (size_t a = 0; a < idx.size(); ++a)
    for (size_t b = 0; b < idx.size(); ++b) {
      auto it = pos.find(g.table[idx[a]][idx[b]]);
      if (it == pos.end()) throw AlgebraError("index set is not closed under composition");
      h.table[a][b] = it->second;
    }
  auto id = pos.find(g.identity);
  if (id == pos.end()) throw AlgebraError("index set misses the identity");
  h.identity = id->second;
  return h;
}

// ---------------------------------------------------------------------------
// Normality and classification.
// ---------------------------------------------------------------------------

namespace detail {

// classical route: the minimal polynomial over the base of every tower
// generator factors into linear factors over L
inline bool minpolys_split(const TowerPtr& t, bool& heuristic) {
  for (size_t i = t->base_steps; i < t->st.nsteps(); ++i) {
    TowerElement gi = tow::gen_elem(t, i);
    UniPoly f0 = tow::minimal_polynomial(gi);
    rt::RootsResult rr = rt::roots_in_field(f0, t);
    if (!rr.complete) heuristic = true;
    PolyF<TowerElement> f;
    if (t->base_steps == 0) {
      for (const auto& c : f0.c) f.c.push_back(tow::scalar_elem(t, c));
    } else {
      f = tow::minimal_polynomial_over(gi, tow::base_subfield(t));
    }
    for (const auto& r : rr.roots) {
      PolyF<TowerElement> lin = pf::from_coeffs(
          std::vector<TowerElement>{tow::zero_elem(t) - r, tow::one_elem(t)});
      while (f.deg() > 0 && pf::eval(f, r).is_zero()) f = pf::divmod(f, lin).first;
    }
    if (f.deg() != 0) return false;
  }
  return true;
}

struct ClassificationInputs {
  AutGroup g;
  tow::Subfield sep, pi, ldif, fixed, fixed_dif, base;
  DiffOpAlgebra da;
  MatAlgebra e;
};

inline ClassificationInputs classification_inputs(const TowerPtr& t) {
  ClassificationInputs in;
  in.g = automorphism_group(t);
  in.sep = df::separable_closure(t);
  in.pi = df::purely_inseparable_part(t);
  in.da = df::diff_ops(t);
  in.ldif = df::l_dif(t, in.da);
  in.fixed = fixed_field(in.g);
  in.fixed_dif = meet_subfields(in.fixed, in.ldif);
  in.base = tow::base_subfield(t);
  in.e = ambient_endomorphisms(t);
  return in;
}

// the seven normality criteria, each along its own computational route
struct NormalityRoutes {
  bool skew_fills_e = false;       // 1: operators and automorphisms generate E
  bool fixed_dif_tensor = false;   // 2: L = L^G (x) L_dif
  bool fixed_dif_is_base = false;  // 3: L^G_dif = K
  bool fixed_gal_tensor = false;   // 4: L = L^G (x) Galois part, L^G inseparable
  bool fixed_is_pi = false;        // 5: L^G = L^pi
  bool pi_gal_tensor = false;      // 6: L = L^pi (x) Galois part
  bool splitting = false;          // 7: generator minimal polynomials split
  size_t dim_skew_dg = 0;
  bool skew_direct = false;

  bool agree() const {
    return skew_fills_e == fixed_dif_tensor && skew_fills_e == fixed_dif_is_base &&
           skew_fills_e == fixed_gal_tensor && skew_fills_e == fixed_is_pi &&
           skew_fills_e == pi_gal_tensor && skew_fills_e == splitting;
  }
  std::string describe() const {
    auto b = [](bool v) { return v ? "1" : "0"; };
    return std::string("skew_fills_e=") + b(skew_fills_e) +
           " fixed_dif_tensor=" + b(fixed_dif_tensor) +
           " fixed_dif_is_base=" + b(fixed_dif_is_base) +
           " fixed_gal_tensor=" + b(fixed_gal_tensor) +
           " fixed_is_pi=" + b(fixed_is_pi) + " pi_gal_tensor=" + b(pi_gal_tensor) +
           " splitting=" + b(splitting);
  }
};

inline NormalityRoutes normality_routes(const TowerPtr& t,
                                        const ClassificationInputs& in,
                                        bool& heuristic) {
  size_t n = t->rank();
  size_t bk = t->base_rank();
  NormalityRoutes r;
  SkewAlgebra dg = skew_group_algebra(in.da.d, in.g);
  r.dim_skew_dg = dg.r.dim();
  r.skew_direct = dg.direct;
  if (!la::subspace_leq(dg.r.space, in.e.space))
    throw AlgebraError("skew algebra escapes the endomorphism algebra");
  r.skew_fills_e = dg.r.dim() == in.e.dim();
  r.fixed_dif_tensor = in.fixed.dim() * in.ldif.dim() == n * bk &&
                       tow::compositum(in.fixed, in.ldif).dim() == n;
  r.fixed_dif_is_base = la::equal(in.fixed_dif.space, in.base.space);
  bool gal_sized = in.g.order() * bk == in.sep.dim();
  r.fixed_gal_tensor = in.fixed.dim() * in.sep.dim() == n * bk &&
                       tow::compositum(in.fixed, in.sep).dim() == n &&
                       la::subspace_leq(in.fixed.space, in.pi.space) && gal_sized;
  r.fixed_is_pi = la::equal(in.fixed.space, in.pi.space);
  r.pi_gal_tensor = in.pi.dim() * in.sep.dim() == n * bk &&
                    tow::compositum(in.pi, in.sep).dim() == n && gal_sized;
  r.splitting = minpolys_split(t, heuristic);
  return r;
}

}  // namespace detail

inline bool is_normal(const TowerPtr& t) {
  detail::ClassificationInputs in = detail::classification_inputs(t);
  bool heuristic = in.g.heuristic;
  detail::NormalityRoutes r = detail::normality_routes(t, in, heuristic);
  if (!r.agree()) throw InconsistentTheorems("normality routes disagree: " + r.describe());
  return r.fixed_is_pi;
}

struct ClassificationRecord {
  bool is_separable = false;
  bool is_purely_inseparable = false;
  bool is_normal = false;
  bool is_b = false;
  bool is_g = false;
  bool is_d = false;
  tow::Subfield sep, pi, ldif, fixed, fixed_dif;
  size_t dim_skew_lg = 0;
  size_t dim_d = 0;
  size_t dim_skew_dg = 0;
  size_t dim_e = 0;
  size_t group_order = 0;
  bool heuristic = false;
};

inline ClassificationRecord classify(const TowerPtr& t) {
  size_t n = t->rank();
  detail::ClassificationInputs in = detail::classification_inputs(t);
  ClassificationRecord rec;
  rec.heuristic = in.g.heuristic;
  detail::NormalityRoutes r = detail::normality_routes(t, in, rec.heuristic);
  if (!r.agree())
    throw InconsistentTheorems("classification criteria disagree: " + r.describe());
  SkewAlgebra lg = skew_group_algebra(ma::image_of_field(t), in.g);
  rec.sep = in.sep;
  rec.pi = in.pi;
  rec.ldif = in.ldif;
  rec.fixed = in.fixed;
  rec.fixed_dif = in.fixed_dif;
  rec.dim_skew_lg = lg.r.dim();
  rec.dim_d = in.da.d.dim();
  rec.dim_skew_dg = r.dim_skew_dg;
  rec.dim_e = in.e.dim();
  rec.group_order = in.g.order();
  rec.is_separable = in.sep.dim() == n;
  rec.is_purely_inseparable = in.pi.dim() == n;
  rec.is_normal = r.fixed_is_pi;
  rec.is_b = r.skew_fills_e;
  bool g_by_fixed = la::equal(in.fixed.space, in.base.space);
  bool g_by_skew = rec.dim_skew_lg == rec.dim_e;
  if (g_by_fixed != g_by_skew)
    throw InconsistentTheorems("Galois criteria disagree: trivial fixed field vs skew fill");
  rec.is_g = g_by_fixed;
  bool d_by_pi = rec.is_purely_inseparable;
  bool d_by_dim = rec.dim_d == rec.dim_e;
  if (d_by_pi != d_by_dim)
    throw InconsistentTheorems("inseparability criteria disagree: p-power field vs operator fill");
  rec.is_d = d_by_pi;
  if (rec.is_b != rec.is_normal)
    throw InconsistentTheorems("B and normal flags disagree");
  if ((rec.is_g || rec.is_d) && !rec.is_b)
    throw InconsistentTheorems("special flag set on a non-B extension");
  if (rec.is_normal) {
    if (!la::equal(rec.ldif.space, rec.sep.space))
      throw InconsistentTheorems("distinguished subfield differs from the separable closure on a normal tower");
    if (!r.skew_direct || rec.dim_skew_dg != rec.dim_e)
      throw InconsistentTheorems("operator-automorphism factorization fails on a normal tower");
  }
  return rec;
}

// ---------------------------------------------------------------------------
// Correspondences.
// ---------------------------------------------------------------------------

// a standalone tower presenting the subfield over the scalar base
inline TowerPtr subfield_tower(const tow::Subfield& m) {
  const TowerPtr& t = m.tw;
  RatFunc one = tow::scalar_one(t);
  std::vector<TowerElement> chosen;
  std::vector<std::string> names;
  tow::Subfield cur = tow::subfield_k(t);
  size_t synth = 0;
  for (const auto& v : m.space.basis) {
    if (cur.dim() == m.dim()) break;
    TowerElement el = tow::elem_from_coords(t, v);
    if (tow::subfield_contains(cur, el)) continue;
    chosen.push_back(el);
    names.push_back("m" + std::to_string(synth++));
    cur = tow::subfield_generated(t, chosen);
  }
  if (cur.dim() != m.dim()) throw NotAField("subfield_tower: generator search failed");
  TowerPtr nt = tow::start_tower(t->base);
  std::vector<TowerElement> mono_imgs = {tow::one_elem(t)};
  for (size_t s = 0; s < chosen.size(); ++s) {
    tow::Subfield sofar = tow::subfield_generated(
        t, std::vector<TowerElement>(chosen.begin(), chosen.begin() + s));
    PolyF<TowerElement> f = tow::minimal_polynomial_over(chosen[s], sofar);
    size_t d = size_t(f.deg());
    size_t rprev = mono_imgs.size();
    Mat<RatFunc> b = la::zero_mat(tow::scalar_zero(t), t->rank(), rprev);
    for (size_t j = 0; j < rprev; ++j)
      for (size_t i = 0; i < t->rank(); ++i) b.rows[i][j] = mono_imgs[j].coords[i];
    PolyF<TowerElement> fnew;
    for (size_t i = 0; i <= d; ++i) {
      auto sol = la::solve(b, f.c[i].coords, one);
      if (!sol) throw NotAField("subfield_tower: coefficient escapes the subtower");
      fnew.c.push_back(tow::elem_from_coords(nt, *sol));
    }
    nt = tow::extend(nt, names[s], fnew);
    std::vector<TowerElement> next;
    TowerElement pw = tow::one_elem(t);
    for (size_t i = 0; i < d; ++i) {
      for (const auto& mi : mono_imgs) next.push_back(mi * pw);
      pw = pw * chosen[s];
    }
    mono_imgs = std::move(next);
  }
  return nt;
}

struct CorrespondenceReport {
  size_t dim_a = 0;
  bool dim_law = false;        // dim C_E(M) = [L:M]^2 [M:K]
  bool decomposition = false;  // C_E(M) generated by its operator part and
                               // the automorphisms fixing M
  bool commutant_recovers = false;
  bool formula_recovers = false;
  bool operator_kernel_recovers = false;
  bool ok() const {
    return dim_law && decomposition && commutant_recovers && formula_recovers &&
           operator_kernel_recovers;
  }
};

inline CorrespondenceReport correspondence_roundtrip(const TowerPtr& t,
                                                     const tow::Subfield& m) {
  if (m.tw.get() != t.get()) throw TowerMismatch();
  if (!la::subspace_leq(tow::base_subfield(t).space, m.space))
    throw AlgebraError("subfield does not contain the base");
  if (!is_normal(t))
    throw AlgebraError("correspondence_roundtrip expects a normal tower");
  size_t n = t->rank();
  RatFunc one = tow::scalar_one(t);
  detail::ClassificationInputs in = detail::classification_inputs(t);
  MatAlgebra a = ma::centralizer(t, ma::basis_mats(ma::image_of_subfield(m)), in.e);
  CorrespondenceReport rep;
  rep.dim_a = a.dim();
  size_t rel = n / m.dim();
  rep.dim_law = rep.dim_a == rel * rel * m.dim();
  // operator part of A via the lattice identity with the full operator
  // algebra, plus the automorphisms fixing M pointwise
  la::Subspace<RatFunc> dm = la::meet(a.space, in.da.d.space);
  std::vector<Mat<RatFunc>> gens;
  for (const auto& v : dm.basis) gens.push_back(ma::unflatten(v, n));
  std::vector<size_t> fixing;
  for (size_t i = 0; i < in.g.order(); ++i) {
    bool fixes = true;
    for (const auto& v : m.space.basis) {
      std::vector<RatFunc> img = la::mat_vec(in.g.elems[i].mat, v);
      for (size_t r = 0; r < n && fixes; ++r)
        if (!(img[r] == v[r])) fixes = false;
      if (!fixes) break;
    }
    if (fixes) {
      fixing.push_back(i);
      gens.push_back(in.g.elems[i].mat);
    }
  }
  rep.decomposition = la::equal(ma::generate_algebra(t, gens).space, a.space);
  // recovery 1: commutant of A, read as multiplications
  MatAlgebra ca = ma::centralizer(t, ma::basis_mats(a), in.e);
  rep.commutant_recovers =
      la::equal(detail::mats_times_one(t, ca.space).space, m.space);
  // recovery 2: common kernel of the augmentation part of A, meet the
  // fixed space of the automorphisms inside A
  la::Subspace<RatFunc> adplus = la::meet(a.space, in.da.d_plus);
  la::Subspace<RatFunc> ker = la::full_space(one, n);
  for (const auto& v : adplus.basis)
    ker = la::meet(ker, la::span(n, la::kernel(ma::unflatten(v, n), one)));
  la::Subspace<RatFunc> fx = la::full_space(one, n);
  for (size_t i : fixing) {
    if (!la::contains(a.space, ma::flatten(in.g.elems[i].mat))) continue;
    Mat<RatFunc> mm = in.g.elems[i].mat;
    for (size_t r = 0; r < n; ++r) mm.rows[r][r] = mm.rows[r][r] - one;
    fx = la::meet(fx, la::span(n, la::kernel(mm, one)));
  }
  rep.formula_recovers = la::equal(la::meet(ker, fx), m.space);
  // recovery 3: elements whose multiplication operator centralizes the
  // augmentation part, meet the same fixed space
  MatAlgebra cdp = ma::centralizer(
      t, [&] {
        std::vector<Mat<RatFunc>> v;
        for (const auto& w : adplus.basis) v.push_back(ma::unflatten(w, n));
        return v;
      }(),
      in.e);
  la::Subspace<RatFunc> cl =
      detail::mats_times_one(t, la::meet(cdp.space, ma::image_of_field(t).space)).space;
  rep.operator_kernel_recovers = la::equal(la::meet(cl, fx), m.space);
  return rep;
}

struct NormalSubfieldReport {
  tow::Subfield m_pi, m_gal;
  bool splits = false;
  size_t dim_cm = 0;
  bool factors_generate = false;
  bool g_stable = false;
  bool ok() const { return splits && factors_generate && g_stable; }
};

inline NormalSubfieldReport normal_subfield_correspondence(const TowerPtr& t,
                                                           const tow::Subfield& m) {
  if (m.tw.get() != t.get()) throw TowerMismatch();
  if (!la::subspace_leq(tow::base_subfield(t).space, m.space))
    throw AlgebraError("subfield does not contain the base");
  if (!is_normal(t))
    throw AlgebraError("normal_subfield_correspondence expects a normal tower");
  if (!is_normal(subfield_tower(m))) throw NotNormalSubfield();
  size_t bk = t->base_rank();
  tow::Subfield pi = df::purely_inseparable_part(t);
  tow::Subfield sep = df::separable_closure(t);
  NormalSubfieldReport rep;
  rep.m_pi = detail::meet_subfields(m, pi);
  rep.m_gal = detail::meet_subfields(m, sep);
  rep.splits = rep.m_pi.dim() * rep.m_gal.dim() == m.dim() * bk &&
               la::equal(tow::compositum(rep.m_pi, rep.m_gal).space, m.space);
  MatAlgebra e = detail::ambient_endomorphisms(t);
  MatAlgebra cm = ma::centralizer(t, ma::basis_mats(ma::image_of_subfield(m)), e);
  rep.dim_cm = cm.dim();
  MatAlgebra c1 = ma::centralizer(
      t, ma::basis_mats(ma::image_of_subfield(tow::compositum(rep.m_pi, sep))), e);
  MatAlgebra c2 = ma::centralizer(
      t, ma::basis_mats(ma::image_of_subfield(tow::compositum(rep.m_gal, pi))), e);
  std::vector<Mat<RatFunc>> gens = ma::basis_mats(c1);
  for (const auto& b : ma::basis_mats(c2)) gens.push_back(b);
  rep.factors_generate = la::equal(ma::generate_algebra(t, gens).space, cm.space);
  AutGroup g = automorphism_group(t);
  RatFunc one = tow::scalar_one(t);
  rep.g_stable = true;
  for (const auto& el : g.elems) {
    auto gi = la::inverse(el.mat, one);
    if (!gi) throw AlgebraError("group matrix is singular");
    for (const auto& b : ma::basis_mats(cm))
      if (!la::contains(cm.space, ma::flatten(la::mul(la::mul(el.mat, b), *gi)))) {
        rep.g_stable = false;
        break;
      }
    if (!rep.g_stable) break;
  }
  return rep;
}

struct PiCorrespondenceReport {
  size_t dim_cd = 0;
  bool dim_law = false;  // dim C_D(M) = [L:M]^2 [M:K]
  bool recovers = false;
  bool ok() const { return dim_law && recovers; }
};

inline PiCorrespondenceReport pi_correspondence(const TowerPtr& t,
                                                const tow::Subfield& m) {
  if (m.tw.get() != t.get()) throw TowerMismatch();
  if (!la::subspace_leq(tow::base_subfield(t).space, m.space))
    throw AlgebraError("subfield does not contain the base");
  if (df::purely_inseparable_part(t).dim() != t->rank())
    throw NotPurelyInseparable();
  size_t n = t->rank();
  MatAlgebra e = detail::ambient_endomorphisms(t);
  MatAlgebra dprime = ma::centralizer(t, ma::basis_mats(ma::image_of_subfield(m)), e);
  PiCorrespondenceReport rep;
  rep.dim_cd = dprime.dim();
  size_t rel = n / m.dim();
  rep.dim_law = rep.dim_cd == rel * rel * m.dim();
  MatAlgebra back = ma::centralizer(t, ma::basis_mats(dprime), e);
  rep.recovers = la::equal(detail::mats_times_one(t, back.space).space, m.space);
  return rep;
}

// ---------------------------------------------------------------------------
// Least subfield the extension is normal over.
// ---------------------------------------------------------------------------

inline tow::Subfield least_conormal(const TowerPtr& t) {
  detail::ClassificationInputs in = detail::classification_inputs(t);
  tow::Subfield lgdif = in.fixed_dif;
  auto rb = tow::rebase(t, lgdif);
  if (!is_normal(rb.tower))
    throw InconsistentTheorems("tower is not normal over the returned subfield");
  if (df::diff_ops(rb.tower).d.dim() != in.da.d.dim())
    throw InconsistentTheorems("operator algebra changed under the conormal rebase");
  if (automorphism_group(rb.tower).order() != in.g.order())
    throw InconsistentTheorems("automorphism group changed under the conormal rebase");
  // minimality spot check against other subfields the tower is normal over
  for (const tow::Subfield& m : {in.fixed, in.ldif, tow::subfield_full(t)}) {
    if (la::equal(m.space, lgdif.space)) continue;
    bool conormal = is_normal(tow::rebase(t, m).tower);
    if (conormal && !la::subspace_leq(lgdif.space, m.space))
      throw InconsistentTheorems("a smaller subfield with a normal extension above it exists");
  }
  return lgdif;
}

// ---------------------------------------------------------------------------
// Tensor checks across concatenations.
// ---------------------------------------------------------------------------

namespace detail {

inline tow::Subfield embed_factor_subfield(const TowerPtr& t, const tow::Subfield& s,
                                           size_t stride) {
  std::vector<std::vector<RatFunc>> vecs;
  for (const auto& v : s.space.basis) {
    std::vector<RatFunc> w(t->rank(), tow::scalar_zero(t));
    for (size_t k = 0; k < v.size(); ++k) w[k * stride] = v[k];
    vecs.push_back(std::move(w));
  }
  return tow::make_subfield(t, vecs);
}

}  // namespace detail

struct TensorExtensionReport {
  df::TensorDiffOpsReport diffs;
  size_t g1 = 0, g2 = 0, g12 = 0;
  size_t dim_dg1 = 0, dim_dg2 = 0, dim_dg12 = 0;
  bool group_multiplies = false;
  bool skew_multiplies = false;
  bool pi_factors = false;
  bool gal_factors = false;
  bool ok() const {
    return diffs.dims_multiply && diffs.factors_generate && group_multiplies &&
           skew_multiplies && pi_factors && gal_factors;
  }
};

inline TensorExtensionReport tensor_extension_checks(const TowerPtr& t1,
                                                     const TowerPtr& t2) {
  if (!is_normal(t1) || !is_normal(t2))
    throw AlgebraError("tensor_extension_checks expects normal factors");
  TensorExtensionReport rep;
  rep.diffs = df::tensor_diffops_check(t1, t2);
  TowerPtr t = rep.diffs.combined;
  AutGroup g1 = automorphism_group(t1);
  AutGroup g2 = automorphism_group(t2);
  AutGroup g = automorphism_group(t);
  rep.g1 = g1.order();
  rep.g2 = g2.order();
  rep.g12 = g.order();
  rep.group_multiplies = rep.g12 == rep.g1 * rep.g2;
  rep.dim_dg1 = skew_group_algebra(df::diff_ops(t1).d, g1).r.dim();
  rep.dim_dg2 = skew_group_algebra(df::diff_ops(t2).d, g2).r.dim();
  rep.dim_dg12 = skew_group_algebra(df::diff_ops(t).d, g).r.dim();
  rep.skew_multiplies = rep.dim_dg12 == rep.dim_dg1 * rep.dim_dg2;
  size_t r1 = t1->rank();
  tow::Subfield pi1 = detail::embed_factor_subfield(t, df::purely_inseparable_part(t1), 1);
  tow::Subfield pi2 = detail::embed_factor_subfield(t, df::purely_inseparable_part(t2), r1);
  rep.pi_factors = la::equal(tow::compositum(pi1, pi2).space,
                             df::purely_inseparable_part(t).space);
  tow::Subfield s1 = detail::embed_factor_subfield(t, df::separable_closure(t1), 1);
  tow::Subfield s2 = detail::embed_factor_subfield(t, df::separable_closure(t2), r1);
  rep.gal_factors =
      la::equal(tow::compositum(s1, s2).space, df::separable_closure(t).space);
  return rep;
}

}  // namespace gal
}  // namespace fext
