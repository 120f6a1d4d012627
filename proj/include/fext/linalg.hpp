#pragma once

#include <cassert>
#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

#include "fext/errors.hpp"

namespace fext {

// Dense matrix over a field value type F (same shims as PolyF).  Rows are
// vectors; an empty matrix has rows == 0 and a remembered column count.
template <class F>
struct Mat {
  size_t cols = 0;
  std::vector<std::vector<F>> rows;

  size_t nrows() const { return rows.size(); }
};

namespace la {

template <class F>
Mat<F> make(size_t cols, std::vector<std::vector<F>> rows) {
  for (const auto& r : rows)
    if (r.size() != cols) throw DimensionMismatch();
  return Mat<F>{cols, std::move(rows)};
}

template <class F>
Mat<F> zero_mat(const F& like, size_t n, size_t m) {
  Mat<F> a;
  a.cols = m;
  a.rows.assign(n, std::vector<F>(m, zero_like(like)));
  return a;
}

template <class F>
Mat<F> identity(const F& like, size_t n) {
  Mat<F> a = zero_mat(like, n, n);
  for (size_t i = 0; i < n; ++i) a.rows[i][i] = one_like(like);
  return a;
}

template <class F>
bool equal(const Mat<F>& a, const Mat<F>& b) {
  if (a.cols != b.cols || a.nrows() != b.nrows()) return false;
  for (size_t i = 0; i < a.nrows(); ++i)
    for (size_t j = 0; j < a.cols; ++j)
      if (!(a.rows[i][j] == b.rows[i][j])) return false;
  return true;
}

template <class F>
Mat<F> transpose(const Mat<F>& a) {
  if (a.nrows() == 0) {
    Mat<F> t;
    t.cols = 0;
    t.rows.assign(a.cols, {});
    return t;
  }
  Mat<F> t = zero_mat(a.rows[0][0], a.cols, a.nrows());
  for (size_t i = 0; i < a.nrows(); ++i)
    for (size_t j = 0; j < a.cols; ++j) t.rows[j][i] = a.rows[i][j];
  return t;
}

template <class F>
Mat<F> mul(const Mat<F>& a, const Mat<F>& b) {
  if (a.cols != b.nrows()) throw DimensionMismatch();
  if (a.nrows() == 0 || b.cols == 0) {
    Mat<F> r;
    r.cols = b.cols;
    r.rows.assign(a.nrows(), std::vector<F>(b.cols));
    return r;
  }
  F z = zero_like(b.rows.empty() ? a.rows[0][0] : b.rows[0][0]);
  Mat<F> r = zero_mat(z, a.nrows(), b.cols);
  for (size_t i = 0; i < a.nrows(); ++i)
    for (size_t k = 0; k < a.cols; ++k) {
      if (is_zero(a.rows[i][k])) continue;
      for (size_t j = 0; j < b.cols; ++j)
        r.rows[i][j] = r.rows[i][j] + a.rows[i][k] * b.rows[k][j];
    }
  return r;
}

template <class F>
std::vector<F> mat_vec(const Mat<F>& a, const std::vector<F>& x) {
  if (a.cols != x.size()) throw DimensionMismatch();
  std::vector<F> r;
  r.reserve(a.nrows());
  for (size_t i = 0; i < a.nrows(); ++i) {
    F s = zero_like(x.empty() ? a.rows[i][0] : x[0]);
    for (size_t j = 0; j < a.cols; ++j) s = s + a.rows[i][j] * x[j];
    r.push_back(std::move(s));
  }
  return r;
}

template <class F>
std::vector<F> vec_mat(const std::vector<F>& x, const Mat<F>& a) {
  if (a.nrows() != x.size()) throw DimensionMismatch();
  std::vector<F> r(a.cols, zero_like(x[0]));
  for (size_t i = 0; i < a.nrows(); ++i) {
    if (is_zero(x[i])) continue;
    for (size_t j = 0; j < a.cols; ++j) r[j] = r[j] + x[i] * a.rows[i][j];
  }
  return r;
}

template <class F>
Mat<F> add(const Mat<F>& a, const Mat<F>& b) {
  if (a.cols != b.cols || a.nrows() != b.nrows()) throw DimensionMismatch();
  Mat<F> r = a;
  for (size_t i = 0; i < a.nrows(); ++i)
    for (size_t j = 0; j < a.cols; ++j) r.rows[i][j] = r.rows[i][j] + b.rows[i][j];
  return r;
}

template <class F>
Mat<F> sub(const Mat<F>& a, const Mat<F>& b) {
  if (a.cols != b.cols || a.nrows() != b.nrows()) throw DimensionMismatch();
  Mat<F> r = a;
  for (size_t i = 0; i < a.nrows(); ++i)
    for (size_t j = 0; j < a.cols; ++j) r.rows[i][j] = r.rows[i][j] - b.rows[i][j];
  return r;
}

template <class F>
Mat<F> scale(Mat<F> a, const F& s) {
  for (auto& row : a.rows)
    for (auto& x : row) x = x * s;
  return a;
}

// Row reduction to reduced row echelon form.  Pivot selection is the first
// row with a nonzero entry in the current column, so the result is fully
// deterministic for a given input.
template <class F>
struct Rref {
  Mat<F> mat;                  // zero rows dropped
  std::vector<size_t> pivots;  // pivot column of each remaining row
};

template <class F>
Rref<F> rref(Mat<F> a) {
  std::vector<size_t> pivots;
  size_t r = 0;
  for (size_t col = 0; col < a.cols && r < a.nrows(); ++col) {
    size_t sel = a.nrows();
    for (size_t i = r; i < a.nrows(); ++i)
      if (!is_zero(a.rows[i][col])) {
        sel = i;
        break;
      }
    if (sel == a.nrows()) continue;
    std::swap(a.rows[r], a.rows[sel]);
    F pinv = inv_of(a.rows[r][col]);
    for (size_t j = col; j < a.cols; ++j) a.rows[r][j] = a.rows[r][j] * pinv;
    for (size_t i = 0; i < a.nrows(); ++i) {
      if (i == r || is_zero(a.rows[i][col])) continue;
      F f = a.rows[i][col];
      for (size_t j = col; j < a.cols; ++j)
        a.rows[i][j] = a.rows[i][j] - f * a.rows[r][j];
    }
    pivots.push_back(col);
    ++r;
  }
  a.rows.resize(r);
  return {std::move(a), std::move(pivots)};
}

template <class F>
size_t rank(const Mat<F>& a) {
  return rref(a).mat.nrows();
}

// Basis of {x : A x = 0}, one vector per free column, ascending free-column
// order; entry at the vector's own free column is 1.  `like` supplies the
// scalar shape (needed when A has no rows).
template <class F>
std::vector<std::vector<F>> kernel(const Mat<F>& a, const F& like) {
  std::vector<std::vector<F>> basis0;
  if (a.cols == 0) return basis0;
  if (a.nrows() == 0) {
    for (size_t i = 0; i < a.cols; ++i) {
      std::vector<F> v(a.cols, zero_like(like));
      v[i] = one_like(like);
      basis0.push_back(std::move(v));
    }
    return basis0;
  }
  Rref<F> rr = rref(a);
  std::vector<bool> is_pivot(a.cols, false);
  for (size_t c : rr.pivots) is_pivot[c] = true;
  std::vector<std::vector<F>> basis;
  for (size_t fc = 0; fc < a.cols; ++fc) {
    if (is_pivot[fc]) continue;
    std::vector<F> v(a.cols, zero_like(like));
    v[fc] = one_like(like);
    for (size_t i = 0; i < rr.pivots.size(); ++i)
      v[rr.pivots[i]] = -rr.mat.rows[i][fc];
    basis.push_back(std::move(v));
  }
  return basis;
}

// One solution of A x = b, if any.
template <class F>
std::optional<std::vector<F>> solve(const Mat<F>& a, const std::vector<F>& b,
                                    const F& like) {
  if (b.size() != a.nrows()) throw DimensionMismatch();
  if (a.nrows() == 0) return std::vector<F>(a.cols, zero_like(like));
  Mat<F> aug = a;
  aug.cols = a.cols + 1;
  for (size_t i = 0; i < a.nrows(); ++i) aug.rows[i].push_back(b[i]);
  Rref<F> rr = rref(std::move(aug));
  std::vector<F> x(a.cols, zero_like(like));
  for (size_t i = 0; i < rr.pivots.size(); ++i) {
    if (rr.pivots[i] == a.cols) return std::nullopt;  // 0 = 1 row
    x[rr.pivots[i]] = rr.mat.rows[i][a.cols];
  }
  return x;
}

// Inverse of a square matrix via RREF of [A | I]; nullopt when singular.
template <class F>
std::optional<Mat<F>> inverse(const Mat<F>& a, const F& like) {
  size_t n = a.nrows();
  if (a.cols != n) throw DimensionMismatch();
  if (n == 0) return a;
  Mat<F> aug = a;
  aug.cols = 2 * n;
  for (size_t i = 0; i < n; ++i) {
    for (size_t j = 0; j < n; ++j)
      aug.rows[i].push_back(i == j ? one_like(like) : zero_like(like));
  }
  Rref<F> rr = rref(std::move(aug));
  if (rr.pivots.size() != n || rr.pivots.back() != n - 1) return std::nullopt;
  Mat<F> inv;
  inv.cols = n;
  for (size_t i = 0; i < n; ++i)
    inv.rows.emplace_back(rr.mat.rows[i].begin() + n, rr.mat.rows[i].end());
  return inv;
}

// Row space in canonical (RREF) form; equal subspaces compare equal.
template <class F>
struct Subspace {
  size_t ambient = 0;
  std::vector<std::vector<F>> basis;  // RREF rows, no zero rows

  size_t dim() const { return basis.size(); }
};

template <class F>
Subspace<F> span(size_t ambient, const std::vector<std::vector<F>>& vecs) {
  for (const auto& v : vecs)
    if (v.size() != ambient) throw DimensionMismatch();
  Mat<F> m;
  m.cols = ambient;
  m.rows = vecs;
  Rref<F> rr = rref(std::move(m));
  return Subspace<F>{ambient, std::move(rr.mat.rows)};
}

template <class F>
bool equal(const Subspace<F>& a, const Subspace<F>& b) {
  if (a.ambient != b.ambient || a.basis.size() != b.basis.size()) return false;
  for (size_t i = 0; i < a.basis.size(); ++i)
    for (size_t j = 0; j < a.ambient; ++j)
      if (!(a.basis[i][j] == b.basis[i][j])) return false;
  return true;
}

template <class F>
bool contains(const Subspace<F>& s, const std::vector<F>& v) {
  if (v.size() != s.ambient) throw DimensionMismatch();
  std::vector<F> w = v;
  // reduce against the RREF basis; pivot of each row is its first 1
  for (const auto& row : s.basis) {
    size_t piv = 0;
    while (piv < s.ambient && is_zero(row[piv])) ++piv;
    if (piv == s.ambient) continue;
    if (is_zero(w[piv])) continue;
    F f = w[piv];
    for (size_t j = piv; j < s.ambient; ++j) w[j] = w[j] - f * row[j];
  }
  for (const auto& x : w)
    if (!is_zero(x)) return false;
  return true;
}

// Coordinates of v in the RREF basis of s; pivot columns are unit columns,
// so the coordinate on each row is just v at that row's pivot.
template <class F>
std::optional<std::vector<F>> coords_in(const Subspace<F>& s,
                                        const std::vector<F>& v) {
  if (v.size() != s.ambient) throw DimensionMismatch();
  std::vector<F> w = v;
  std::vector<F> cs;
  cs.reserve(s.basis.size());
  for (const auto& row : s.basis) {
    size_t piv = 0;
    while (piv < s.ambient && is_zero(row[piv])) ++piv;
    if (piv == s.ambient) {
      cs.push_back(v.empty() ? F{} : zero_like(v[0]));
      continue;
    }
    F f = w[piv];
    cs.push_back(f);
    if (is_zero(f)) continue;
    for (size_t j = piv; j < s.ambient; ++j) w[j] = w[j] - f * row[j];
  }
  for (const auto& x : w)
    if (!is_zero(x)) return std::nullopt;
  return cs;
}

template <class F>
bool subspace_leq(const Subspace<F>& a, const Subspace<F>& b) {
  if (a.ambient != b.ambient) throw DimensionMismatch();
  for (const auto& v : a.basis)
    if (!contains(b, v)) return false;
  return true;
}

template <class F>
Subspace<F> join(const Subspace<F>& a, const Subspace<F>& b) {
  if (a.ambient != b.ambient) throw DimensionMismatch();
  std::vector<std::vector<F>> vecs = a.basis;
  vecs.insert(vecs.end(), b.basis.begin(), b.basis.end());
  return span(a.ambient, vecs);
}

// Intersection of row spaces by the Zassenhaus block trick: reduce
// [A | A; B | 0]; rows whose left block vanished carry the meet on the right.
template <class F>
Subspace<F> meet(const Subspace<F>& a, const Subspace<F>& b) {
  if (a.ambient != b.ambient) throw DimensionMismatch();
  size_t n = a.ambient;
  if (a.dim() == 0 || b.dim() == 0) return Subspace<F>{n, {}};
  F like = a.basis[0][0];
  Mat<F> m;
  m.cols = 2 * n;
  for (const auto& v : a.basis) {
    std::vector<F> row = v;
    row.insert(row.end(), v.begin(), v.end());
    m.rows.push_back(std::move(row));
  }
  for (const auto& v : b.basis) {
    std::vector<F> row = v;
    row.resize(2 * n, zero_like(like));
    m.rows.push_back(std::move(row));
  }
  Rref<F> rr = rref(std::move(m));
  std::vector<std::vector<F>> inter;
  for (const auto& row : rr.mat.rows) {
    bool left_zero = true;
    for (size_t j = 0; j < n; ++j)
      if (!is_zero(row[j])) {
        left_zero = false;
        break;
      }
    if (left_zero) inter.emplace_back(row.begin() + n, row.end());
  }
  return span(n, inter);
}

template <class F>
Subspace<F> full_space(const F& like, size_t n) {
  std::vector<std::vector<F>> vecs;
  for (size_t i = 0; i < n; ++i) {
    std::vector<F> v(n, zero_like(like));
    v[i] = one_like(like);
    vecs.push_back(std::move(v));
  }
  return span(n, vecs);
}

}  // namespace la

}  // namespace fext
