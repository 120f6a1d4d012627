#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "fext/errors.hpp"
#include "fext/tower.hpp"

namespace fext {

// ---------------------------------------------------------------------------
// Import a field presentation from an ambient rational function field
// F = F_p(vars).  The base field K must be generated by p-power exponents of
// the variables (x_i^(q_i) with q_i = p^(e_i)); every element of F then
// decomposes uniquely over the monomial K-basis {x^gamma : gamma_i < q_i} by
// exponent-residue splitting after clearing the denominator into K.  The
// requested generators are adjoined one at a time, reading their minimal
// polynomials off K-linear dependences among decomposed powers.
// ---------------------------------------------------------------------------

struct AmbientField {
  TowerPtr tower;
  uint32_t p = 0;
  std::vector<std::string> vars;   // ambient variable names
  std::vector<uint32_t> qexp;      // q_i per variable
  uint32_t maxe = 0;               // max e_i with q_i = p^(e_i)
  size_t fdim = 1;                 // [F:K] = prod q_i
  std::vector<RatFunc> amb_basis;  // ambient images of the tower monomial basis
  Mat<RatFunc> basis_coords;       // fdim x rank matrix of K-coordinates

  RatFunc to_ambient(const TowerElement& a) const;
  std::optional<TowerElement> from_ambient_elem(const RatFunc& a) const;
};

namespace amb {

namespace detail {

// rational functions over the synthesized base variables, rewritten in the
// ambient variables by scaling exponents with q_i
inline MultiPoly scale_exponents_up(const MultiPoly& a, const std::vector<uint32_t>& q) {
  MultiPoly out = a;
  for (auto& t : out.terms)
    for (size_t i = 0; i < q.size(); ++i) t.e[i] *= q[i];
  mp::normalize(out);
  return out;
}

inline MultiPoly scale_exponents_down(const MultiPoly& a, const std::vector<uint32_t>& q) {
  MultiPoly out = a;
  for (auto& t : out.terms)
    for (size_t i = 0; i < q.size(); ++i) t.e[i] /= q[i];
  mp::normalize(out);
  return out;
}

}  // namespace detail

struct AmbientDecomposer {
  uint32_t p;
  std::vector<uint32_t> q;
  uint32_t maxe;
  size_t fdim;

  size_t residue_index(const std::vector<uint32_t>& e) const {
    size_t idx = 0, stride = 1;
    for (size_t i = 0; i < q.size(); ++i) {
      idx += (e[i] % q[i]) * stride;
      stride *= q[i];
    }
    return idx;
  }

  // K-coordinates of an ambient element over the monomial basis of F
  std::vector<RatFunc> kcoords(const RatFunc& a) const {
    MultiPoly denk = mp::frobenius(a.den, maxe);  // den^(p^maxe), lies in K
    MultiPoly numc = mp::mul(a.num, mp::div_exact(denk, a.den));
    std::vector<MultiPoly> parts(fdim, mp::zero(p, uint32_t(q.size())));
    for (const auto& t : numc.terms) {
      MultiPoly::Term tt = t;
      for (size_t i = 0; i < q.size(); ++i) tt.e[i] -= tt.e[i] % q[i];
      parts[residue_index(t.e)].terms.push_back(std::move(tt));
    }
    MultiPoly dend = detail::scale_exponents_down(denk, q);
    std::vector<RatFunc> out;
    for (auto& m : parts) {
      mp::normalize(m);
      out.push_back(RatFunc(detail::scale_exponents_down(m, q), dend));
    }
    return out;
  }
};

inline RatFunc ambient_value(const AmbientField& af, const TowerElement& a) {
  RatFunc acc = RatFunc::zero(af.p, uint32_t(af.vars.size()));
  for (size_t j = 0; j < a.coords.size(); ++j) {
    if (a.coords[j].is_zero()) continue;
    RatFunc c(detail::scale_exponents_up(a.coords[j].num, af.qexp),
              detail::scale_exponents_up(a.coords[j].den, af.qexp));
    acc = acc + c * af.amb_basis[j];
  }
  return acc;
}

inline AmbientField from_ambient(uint32_t p, const std::vector<std::string>& vars,
                                 const std::vector<RatFunc>& k_gens,
                                 const std::vector<RatFunc>& l_gens) {
  size_t nv = vars.size();
  for (const auto& g : k_gens)
    if (g.p() != p || g.nvars() != nv) throw TowerMismatch();
  for (const auto& g : l_gens)
    if (g.p() != p || g.nvars() != nv) throw TowerMismatch();

  // base shape: every variable exactly once, as a p-power of itself
  std::vector<uint32_t> q(nv, 0);
  std::vector<uint32_t> es(nv, 0);
  MultiPoly one_amb = mp::constant(p, uint32_t(nv), 1);
  for (const auto& g : k_gens) {
    if (!mp::equal(g.den, one_amb) || g.num.terms.size() != 1 ||
        g.num.terms[0].c != 1)
      throw UnsupportedAmbient("base generators must be monomials x_i^(p^e)");
    const auto& e = g.num.terms[0].e;
    size_t var = nv;
    for (size_t i = 0; i < nv; ++i) {
      if (e[i] == 0) continue;
      if (var != nv) throw UnsupportedAmbient("base generator involves two variables");
      var = i;
    }
    if (var == nv) throw UnsupportedAmbient("constant base generator");
    uint32_t exp = e[var], steps = 0;
    while (exp % p == 0) {
      exp /= p;
      ++steps;
    }
    if (exp != 1) throw UnsupportedAmbient("base exponent is not a p-power");
    if (q[var] != 0) throw UnsupportedAmbient("variable generated twice");
    q[var] = e[var];
    es[var] = steps;
  }
  for (size_t i = 0; i < nv; ++i)
    if (q[i] == 0)
      throw UnsupportedAmbient("variable " + vars[i] + " missing from the base");

  AmbientField af;
  af.p = p;
  af.vars = vars;
  af.qexp = q;
  af.maxe = *std::max_element(es.begin(), es.end());
  af.fdim = 1;
  for (auto qi : q) af.fdim *= qi;

  std::vector<std::string> base_names;
  for (size_t i = 0; i < nv; ++i)
    base_names.push_back(q[i] == 1 ? vars[i] : vars[i] + std::to_string(q[i]));
  TowerPtr t = tow::start_tower(BaseFieldDesc(p, base_names));

  AmbientDecomposer dec{p, q, af.maxe, af.fdim};
  RatFunc like = RatFunc::zero(p, uint32_t(nv));
  af.amb_basis = {RatFunc::constant(p, uint32_t(nv), 1)};

  for (size_t gi = 0; gi < l_gens.size(); ++gi) {
    const RatFunc& g = l_gens[gi];
    size_t r = t->rank();
    // powers of g alongside products with the current basis
    std::vector<RatFunc> pw = {RatFunc::constant(p, uint32_t(nv), 1)};
    for (size_t k = 1;; ++k) {
      if (k * r > af.fdim) throw NotFinite();
      pw.push_back(pw.back() * g);
      std::vector<std::vector<RatFunc>> colv;
      for (size_t i = 0; i < k; ++i)
        for (size_t j = 0; j < r; ++j)
          colv.push_back(dec.kcoords(af.amb_basis[j] * pw[i]));
      Mat<RatFunc> m = la::zero_mat(RatFunc::zero(t->base.p, t->base.nvars()),
                                    af.fdim, k * r);
      for (size_t cidx = 0; cidx < colv.size(); ++cidx)
        for (size_t row = 0; row < af.fdim; ++row) m.rows[row][cidx] = colv[cidx][row];
      auto sol = la::solve(m, dec.kcoords(pw[k]),
                           RatFunc::zero(t->base.p, t->base.nvars()));
      if (!sol) continue;
      if (k == 1) break;  // generator already inside the current field

      std::string name = "g" + std::to_string(gi + 1);
      if (mp::equal(g.den, one_amb) && g.num.terms.size() == 1 &&
          g.num.terms[0].c == 1) {
        uint32_t seen = 0;
        size_t var = 0;
        for (size_t i = 0; i < nv; ++i)
          if (g.num.terms[0].e[i] != 0) {
            ++seen;
            var = i;
          }
        if (seen == 1 && g.num.terms[0].e[var] == 1) name = vars[var];
      }

      PolyF<TowerElement> f;
      for (size_t i = 0; i < k; ++i) {
        std::vector<RatFunc> coords((*sol).begin() + i * r, (*sol).begin() + (i + 1) * r);
        f.c.push_back(-tow::elem_from_coords(t, coords));
      }
      f.c.push_back(tow::one_elem(t));
      t = tow::extend(t, name, f);

      std::vector<RatFunc> nb;
      for (size_t i = 0; i < k; ++i)
        for (size_t j = 0; j < r; ++j) nb.push_back(af.amb_basis[j] * pw[i]);
      af.amb_basis = std::move(nb);
      break;
    }
  }

  af.tower = t;
  af.basis_coords = la::zero_mat(RatFunc::zero(t->base.p, t->base.nvars()), af.fdim,
                                 t->rank());
  for (size_t j = 0; j < t->rank(); ++j) {
    auto kc = dec.kcoords(af.amb_basis[j]);
    for (size_t row = 0; row < af.fdim; ++row) af.basis_coords.rows[row][j] = kc[row];
  }
  return af;
}

}  // namespace amb

inline RatFunc AmbientField::to_ambient(const TowerElement& a) const {
  return amb::ambient_value(*this, a);
}

inline std::optional<TowerElement> AmbientField::from_ambient_elem(const RatFunc& a) const {
  amb::AmbientDecomposer dec{p, qexp, maxe, fdim};
  auto sol = la::solve(basis_coords, dec.kcoords(a),
                       RatFunc::zero(tower->base.p, tower->base.nvars()));
  if (!sol) return std::nullopt;
  return tow::elem_from_coords(tower, *sol);
}

}  // namespace fext
