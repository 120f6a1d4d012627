#pragma once

#include <cstdint>
#include <map>
#include <utility>
#include <vector>

#include "fext/errors.hpp"
#include "fext/linalg.hpp"
#include "fext/multipoly.hpp"
#include "fext/ratfunc.hpp"

namespace fext {

namespace la {

// Writes a = sum over residues gamma of  t^gamma * (w_gamma)^(p^e), the
// canonical decomposition of K = F_p(t_1..t_r) as a free module over the
// subfield K^(p^e) with monomial basis {t^gamma : 0 <= gamma_i < p^e}.
// Returns gamma -> w_gamma, omitting zero components.
inline std::map<std::vector<uint32_t>, RatFunc> decompose_pe(const RatFunc& a,
                                                             uint32_t e) {
  std::map<std::vector<uint32_t>, RatFunc> out;
  if (a.is_zero()) return out;
  uint64_t q = 1;
  for (uint32_t i = 0; i < e; ++i) q *= a.p();
  // a = num * den^(q-1) / den^q and den^q is already a q-th power
  MultiPoly denq1 = mp::pow(a.den, q - 1);
  MultiPoly n = mp::mul(a.num, denq1);
  std::map<std::vector<uint32_t>, MultiPoly> groups;
  for (const auto& term : n.terms) {
    std::vector<uint32_t> gamma(term.e.size()), beta(term.e.size());
    for (size_t i = 0; i < term.e.size(); ++i) {
      gamma[i] = static_cast<uint32_t>(term.e[i] % q);
      beta[i] = static_cast<uint32_t>(term.e[i] / q);
    }
    auto it = groups.find(gamma);
    if (it == groups.end()) {
      MultiPoly g = mp::zero(n.p, n.nvars);
      it = groups.emplace(std::move(gamma), std::move(g)).first;
    }
    // coefficients of F_p are fixed by Frobenius, so the quotient-exponent
    // part with the same coefficient is the q-th root of this term
    it->second.terms.push_back({beta, term.c});
  }
  for (auto& [gamma, g] : groups) {
    mp::normalize(g);
    out.emplace(gamma, RatFunc(std::move(g), a.den));
  }
  return out;
}

// Solutions v in K^n of: cols_map * (v_i^(p^e))_i lies in `keep`.
// cols_map column i holds the basis coordinates of b_i^(p^e); the result is
// the coefficient-vector space of {l in L : l^(p^e) inside keep}.
inline Subspace<RatFunc> semilinear_kernel(const Mat<RatFunc>& cols_map, uint32_t e,
                                           const Subspace<RatFunc>& keep,
                                           size_t unknown_limit = 4096) {
  size_t n = cols_map.cols;
  if (cols_map.nrows() != n || keep.ambient != n) throw DimensionMismatch();
  if (n == 0) return Subspace<RatFunc>{0, {}};
  RatFunc like = cols_map.rows[0][0];
  uint64_t unknowns = n;
  for (uint32_t i = 0; i < e * like.nvars() && unknowns <= unknown_limit; ++i)
    unknowns *= like.p();
  if (unknowns > unknown_limit)
    throw UnsupportedBase("semilinear_kernel: unknown count exceeds limit " +
                          std::to_string(unknown_limit));
  uint64_t q = 1;
  for (uint32_t i = 0; i < e; ++i) q *= like.p();

  // (i) linear stage over K: functionals annihilating keep, applied to the map
  Mat<RatFunc> keep_rows;
  keep_rows.cols = n;
  keep_rows.rows = keep.basis;
  std::vector<std::vector<RatFunc>> ann = kernel(keep_rows, like);
  Mat<RatFunc> cond;
  cond.cols = n;
  for (const auto& f : ann) cond.rows.push_back(vec_mat(f, cols_map));
  std::vector<std::vector<RatFunc>> w = kernel(cond, like);
  if (w.empty()) return Subspace<RatFunc>{n, {}};
  Subspace<RatFunc> wsp = span(n, w);  // RREF rows: pivot coords are unit vectors
  size_t r = wsp.dim();

  // (ii) restrict the combination d = sum_j x_j w_j to entries in K^(p^e).
  // At pivot columns d equals x_j, so x_j = y_j^(p^e); the remaining entries
  // split over the monomial basis of K over K^(p^e), and every component at a
  // nonzero residue must vanish, which is K-linear in the y_j.
  Mat<RatFunc> ycond;
  ycond.cols = r;
  std::vector<std::map<std::vector<uint32_t>, RatFunc>> dec(r);
  for (size_t i = 0; i < n; ++i) {
    std::map<std::vector<uint32_t>, std::vector<RatFunc>> rows_here;
    for (size_t j = 0; j < r; ++j) {
      for (auto& [gamma, wg] : decompose_pe(wsp.basis[j][i], e)) {
        bool zero_res = true;
        for (uint32_t g : gamma)
          if (g) {
            zero_res = false;
            break;
          }
        if (zero_res) continue;
        auto it = rows_here.find(gamma);
        if (it == rows_here.end())
          it = rows_here.emplace(gamma, std::vector<RatFunc>(r, zero_like(like)))
                   .first;
        it->second[j] = wg;
      }
    }
    for (auto& [gamma, row] : rows_here) ycond.rows.push_back(std::move(row));
  }
  std::vector<std::vector<RatFunc>> ys = kernel(ycond, like);
  if (ys.empty()) return Subspace<RatFunc>{n, {}};

  // (iii) componentwise p^e-th root: with the residue components gone,
  // d_i = (sum_j y_j w0_{j,i})^(p^e) where w0 is the residue-zero part
  std::vector<std::vector<RatFunc>> w0(r, std::vector<RatFunc>(n, RatFunc::zero(like.p(), like.nvars())));
  for (size_t j = 0; j < r; ++j)
    for (size_t i = 0; i < n; ++i) {
      auto d = decompose_pe(wsp.basis[j][i], e);
      std::vector<uint32_t> zerog(like.nvars(), 0);
      auto it = d.find(zerog);
      if (it != d.end()) w0[j][i] = it->second;
    }
  std::vector<std::vector<RatFunc>> vs;
  for (const auto& y : ys) {
    std::vector<RatFunc> v(n, RatFunc::zero(like.p(), like.nvars()));
    for (size_t j = 0; j < r; ++j) {
      if (y[j].is_zero()) continue;
      for (size_t i = 0; i < n; ++i) v[i] = v[i] + y[j] * w0[j][i];
    }
    vs.push_back(std::move(v));
  }
  return span(n, vs);
}

}  // namespace la

}  // namespace fext
