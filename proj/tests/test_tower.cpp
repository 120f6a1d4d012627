#include <catch2/catch_amalgamated.hpp>
#include <random>

#include "fext/semilinear.hpp"
#include "fext/tower.hpp"
#include "fext/roots.hpp"
#include "fext/ambient.hpp"

using namespace fext;

namespace {

RatFunc C(int64_t v) { return RatFunc::constant(2, 1, v); }
RatFunc T() { return RatFunc::variable(2, 1, 0); }

UniPoly upoly(std::vector<RatFunc> cs) { return pf::from_coeffs(std::move(cs)); }

// EX1: F_2(t), u^2 = t
TowerPtr make_ex1() {
  auto k = tow::start_tower(BaseFieldDesc(2, {"t"}));
  return tow::extend(k, "u", upoly({T(), C(0), C(1)}));
}

// EX3: EX1 then s^2 + s = t
TowerPtr make_ex3() {
  return tow::extend(make_ex1(), "s", upoly({T(), C(1), C(1)}));
}

PolyF<RatFunc> det_poly(std::vector<std::vector<PolyF<RatFunc>>> m) {
  size_t n = m.size();
  if (n == 1) return m[0][0];
  PolyF<RatFunc> acc;
  for (size_t i = 0; i < n; ++i) {
    if (m[i][0].is_zero()) continue;
    std::vector<std::vector<PolyF<RatFunc>>> minor;
    for (size_t r = 0; r < n; ++r) {
      if (r == i) continue;
      minor.push_back(std::vector<PolyF<RatFunc>>(m[r].begin() + 1, m[r].end()));
    }
    PolyF<RatFunc> term = pf::mul(m[i][0], det_poly(minor));
    acc = (i % 2 == 0) ? pf::add(acc, term) : pf::sub(acc, term);
  }
  return acc;
}

PolyF<RatFunc> charpoly(const Mat<RatFunc>& a) {
  size_t n = a.nrows();
  RatFunc one = one_like(a.rows[0][0]);
  std::vector<std::vector<PolyF<RatFunc>>> m(n, std::vector<PolyF<RatFunc>>(n));
  for (size_t i = 0; i < n; ++i)
    for (size_t j = 0; j < n; ++j) {
      m[i][j] = pf::constant(-a.rows[i][j]);
      if (i == j) m[i][j] = pf::add(m[i][j], pf::monomial(one, 1));
    }
  return det_poly(std::move(m));
}

}  // namespace

TEST_CASE("tower construction and degrees", "[tower]") {
  auto ex1 = make_ex1();
  REQUIRE(ex1->rank() == 2);
  REQUIRE(ex1->degree() == 2);
  auto ex3 = make_ex3();
  REQUIRE(ex3->rank() == 4);

  auto f2 = tow::start_tower(BaseFieldDesc(2, {}));
  auto ex0 = tow::extend(
      f2, "a",
      upoly({RatFunc::constant(2, 0, 1), RatFunc::constant(2, 0, 1),
             RatFunc::zero(2, 0), RatFunc::zero(2, 0), RatFunc::constant(2, 0, 1)}));
  REQUIRE(ex0->rank() == 4);

  REQUIRE_THROWS_AS(tow::extend(ex1, "u", upoly({T(), C(1)})), AlgebraError);
  REQUIRE_THROWS_AS(tow::extend(ex1, "v", upoly({T(), T()})), AlgebraError);
}

TEST_CASE("element inversion with multiply-back checks", "[tower]") {
  auto ex1 = make_ex1();
  auto u = tow::gen_elem(ex1, 0);
  auto one = tow::one_elem(ex1);

  auto uinv = elem_invert(u);
  REQUIRE(u * uinv == one);
  REQUIRE(uinv == T().inv() * u);  // u/t

  REQUIRE(elem_invert(one) == one);
  REQUIRE_THROWS_AS(elem_invert(tow::zero_elem(ex1)), DivisionByZero);

  auto ex3 = make_ex3();
  auto s = tow::gen_elem(ex3, 1);
  auto sinv = elem_invert(s);
  REQUIRE(s * sinv == tow::one_elem(ex3));
  REQUIRE(sinv == T().inv() * (s + tow::one_elem(ex3)));  // (s+1)/t

  std::mt19937_64 rng(2718);
  for (int iter = 0; iter < 10; ++iter) {
    std::vector<RatFunc> coords;
    for (int i = 0; i < 4; ++i) {
      MultiPoly f = mp::zero(2, 1);
      for (int k = 0; k < 3; ++k)
        if (rng() % 2) f = mp::add(f, mp::pow(mp::variable(2, 1, 0), uint64_t(k)));
      coords.push_back(RatFunc::from_poly(f));
    }
    auto a = tow::elem_from_coords(ex3, coords);
    if (a.is_zero()) continue;
    REQUIRE(a * elem_invert(a) == tow::one_elem(ex3));
  }
}

TEST_CASE("dynamic evaluation flags reducible moduli on inversion", "[tower]") {
  auto k = tow::start_tower(BaseFieldDesc(2, {"t"}));
  // x^2 + t^2 = (x + t)^2 is reducible; construction must succeed anyway
  auto bad = tow::extend(k, "w", upoly({T() * T(), C(0), C(1)}));
  auto w = tow::gen_elem(bad, 0);
  auto zd = w + tow::scalar_elem(bad, T());  // w + t squares to zero
  REQUIRE((zd * zd).is_zero());
  REQUIRE_FALSE(zd.is_zero());
  try {
    elem_invert(zd);
    FAIL("expected ReducibleModulus");
  } catch (const ReducibleModulus& e) {
    REQUIRE(e.step == "w");
    REQUIRE_FALSE(e.factor.empty());
  }
}

TEST_CASE("regular representation", "[tower]") {
  auto ex1 = make_ex1();
  auto u = tow::gen_elem(ex1, 0);
  auto one = tow::one_elem(ex1);

  auto rep1 = tow::regular_rep(one);
  REQUIRE(la::equal(rep1, la::identity(C(1), 2)));

  auto repu = tow::regular_rep(u);
  REQUIRE(repu.rows[0][0] == C(0));
  REQUIRE(repu.rows[0][1] == T());
  REQUIRE(repu.rows[1][0] == C(1));
  REQUIRE(repu.rows[1][1] == C(0));

  auto ex3 = make_ex3();
  std::mt19937_64 rng(99);
  for (int iter = 0; iter < 8; ++iter) {
    std::vector<RatFunc> ca, cb;
    for (int i = 0; i < 4; ++i) {
      ca.push_back(rng() % 2 ? T() : C(1));
      cb.push_back(rng() % 2 ? T() + C(1) : C(0));
    }
    auto a = tow::elem_from_coords(ex3, ca);
    auto b = tow::elem_from_coords(ex3, cb);
    REQUIRE(la::equal(la::mul(tow::regular_rep(a), tow::regular_rep(b)),
                      tow::regular_rep(a * b)));
    REQUIRE(la::equal(la::add(tow::regular_rep(a), tow::regular_rep(b)),
                      tow::regular_rep(a + b)));
  }
}

TEST_CASE("minimal polynomials over K", "[tower]") {
  auto ex1 = make_ex1();
  auto u = tow::gen_elem(ex1, 0);
  REQUIRE(pf::equal(tow::minimal_polynomial(u), upoly({T(), C(0), C(1)})));
  REQUIRE(pf::equal(tow::minimal_polynomial(tow::one_elem(ex1)), upoly({C(1), C(1)})));

  auto ex3 = make_ex3();
  auto us = tow::gen_elem(ex3, 0) + tow::gen_elem(ex3, 1);  // u + s
  UniPoly g = tow::minimal_polynomial(us);
  REQUIRE(g.deg() == 4);
  // evaluate back through tower arithmetic
  auto gl = tow::lift_poly(ex3, g);
  REQUIRE(pf::eval(gl, us).is_zero());
  // frozen value: x^4 + x^2 + t
  REQUIRE(pf::equal(g, upoly({T(), C(0), C(1), C(0), C(1)})));

  // divisibility of the characteristic polynomial of the regular representation
  auto cp = charpoly(tow::regular_rep(us));
  REQUIRE(pf::divmod(cp, g).second.is_zero());
  auto cpu = charpoly(tow::regular_rep(tow::gen_elem(ex1, 0)));
  REQUIRE(pf::divmod(cpu, tow::minimal_polynomial(tow::gen_elem(ex1, 0))).second.is_zero());
}

TEST_CASE("minimal polynomials over a subfield", "[tower]") {
  auto ex3 = make_ex3();
  auto u = tow::gen_elem(ex3, 0);
  auto s = tow::gen_elem(ex3, 1);
  auto ks = tow::subfield_generated(ex3, {s});
  auto f = tow::minimal_polynomial_over(u, ks);
  REQUIRE(f.deg() == 2);
  REQUIRE(pf::eval(f, u).is_zero());
  REQUIRE(f.c[0] == tow::scalar_elem(ex3, T()));
  REQUIRE(f.c[1].is_zero());

  // over K it agrees with the plain version
  auto fk = tow::minimal_polynomial_over(u + s, tow::subfield_k(ex3));
  auto gk = tow::lift_poly(ex3, tow::minimal_polynomial(u + s));
  REQUIRE(pf::equal(fk, gk));
}

TEST_CASE("separable and purely inseparable element flags", "[tower]") {
  auto ex3 = make_ex3();
  auto u = tow::gen_elem(ex3, 0);
  auto s = tow::gen_elem(ex3, 1);
  REQUIRE(tow::is_pi_element(u));
  REQUIRE_FALSE(tow::is_sep_element(u));
  REQUIRE(tow::is_sep_element(s));
  REQUIRE_FALSE(tow::is_pi_element(s));

  auto us = u * s;
  UniPoly f = tow::minimal_polynomial(us);
  REQUIRE(f.deg() == 4);
  auto [fsep, e] = up::separable_presentation(f);
  REQUIRE(e == 1);
  REQUIRE(fsep.deg() == 2);
  REQUIRE_FALSE(tow::is_pi_element(us));
  REQUIRE_FALSE(tow::is_sep_element(us));
}

TEST_CASE("generated subfields, compositum, linear disjointness", "[tower]") {
  auto ex3 = make_ex3();
  auto u = tow::gen_elem(ex3, 0);
  auto s = tow::gen_elem(ex3, 1);

  REQUIRE(tow::subfield_generated(ex3, {}).dim() == 1);

  auto ks = tow::subfield_generated(ex3, {s});
  REQUIRE(ks.dim() == 2);
  REQUIRE(tow::subfield_contains(ks, s * s));  // s^2 = s + t re-enters

  REQUIRE(tow::subfield_generated(ex3, {u, s}).dim() == 4);

  auto ku = tow::subfield_generated(ex3, {u});
  auto mn = tow::compositum(ku, ks);
  REQUIRE(mn.dim() == 4);
  REQUIRE(tow::is_linearly_disjoint(ku, ks));
  REQUIRE_FALSE(tow::is_linearly_disjoint(ku, ku));
  REQUIRE(tow::is_linearly_disjoint(tow::subfield_k(ex3), ks));

  // idempotence and monotonicity
  auto again = tow::subfield_generated(ex3, tow::subfield_basis(ks));
  REQUIRE(tow::subfield_equal(again, ks));

  // span{1, us} is not multiplicatively closed: (us)^2 = t^2 + ts leaves it
  REQUIRE_THROWS_AS(
      tow::make_subfield(ex3, {tow::one_elem(ex3).coords, (u * s).coords}),
      NotAField);
  auto ok = tow::make_subfield(ex3, ks.space.basis);
  REQUIRE(ok.certified);
}

TEST_CASE("rebasing over an intermediate field", "[tower]") {
  auto ex3 = make_ex3();
  auto u = tow::gen_elem(ex3, 0);
  auto s = tow::gen_elem(ex3, 1);
  auto ks = tow::subfield_generated(ex3, {s});

  auto rb = tow::rebase(ex3, ks);
  REQUIRE(rb.tower->degree() == 2);
  REQUIRE(rb.tower->base_rank() == 2);
  REQUIRE(rb.tower->rank() == 4);
  // the non-base step is u with minimal polynomial x^2 + t over K(s)
  REQUIRE(rb.tower->st.names.back() == "u");
  REQUIRE(rb.tower->st.degs.back() == 2);

  // translation round trip on the original generators
  auto u_new = rb.translate_from_orig(u);
  REQUIRE(rb.translate_to_orig(u_new) == u);
  auto s_new = rb.translate_from_orig(s);
  REQUIRE(rb.translate_to_orig(s_new) == s);
  // multiplication commutes with translation
  REQUIRE(rb.translate_to_orig(u_new * s_new) == u * s);

  auto rbk = tow::rebase(ex3, tow::subfield_k(ex3));
  REQUIRE(rbk.tower->degree() == 4);
  auto rbl = tow::rebase(ex3, tow::subfield_full(ex3));
  REQUIRE(rbl.tower->degree() == 1);

  // degree multiplicativity for every certified subfield tried
  for (const auto& m : {tow::subfield_k(ex3), ks, tow::subfield_full(ex3)}) {
    auto r = tow::rebase(ex3, m);
    REQUIRE(m.dim() * r.tower->degree() == ex3->rank());
  }
}

TEST_CASE("p^e-th roots inside the tower", "[tower]") {
  auto ex3 = make_ex3();
  auto u = tow::gen_elem(ex3, 0);
  auto s = tow::gen_elem(ex3, 1);

  auto r1 = tow::pe_root_in_tower(tow::scalar_elem(ex3, T()), 1);
  REQUIRE(r1.has_value());
  REQUIRE(*r1 == u);

  // sqrt(s) = u + s since (u+s)^2 = t + s + t = s
  auto r2 = tow::pe_root_in_tower(s, 1);
  REQUIRE(r2.has_value());
  REQUIRE(*r2 * *r2 == s);
  REQUIRE(*r2 == u + s);

  REQUIRE_FALSE(tow::pe_root_in_tower(u, 1).has_value());

  auto k = tow::start_tower(BaseFieldDesc(2, {"t"}));
  auto quart = tow::extend(k, "v", upoly({T(), C(0), C(0), C(0), C(1)}));
  auto v = tow::gen_elem(quart, 0);
  auto r3 = tow::pe_root_in_tower(tow::scalar_elem(quart, T()), 2);
  REQUIRE(r3.has_value());
  REQUIRE(*r3 == v);
}

TEST_CASE("purely inseparable membership via the semilinear kernel", "[tower]") {
  auto ex3 = make_ex3();
  // elements whose p^2-th power lies in K: expected span{1, u}
  auto fr = tow::frobenius_matrix(ex3, 2);
  auto keep = tow::subfield_k(ex3).space;
  auto res = la::semilinear_kernel(fr, 2, keep);
  REQUIRE(res.dim() == 2);
  REQUIRE(la::contains(res, tow::one_elem(ex3).coords));
  REQUIRE(la::contains(res, tow::gen_elem(ex3, 0).coords));
  REQUIRE_FALSE(la::contains(res, tow::gen_elem(ex3, 1).coords));
}

namespace {

TowerPtr make_ex2() {
  auto k = tow::start_tower(BaseFieldDesc(2, {"t"}));
  return tow::extend(k, "s", upoly({T(), C(1), C(1)}));
}

TowerPtr make_ex4() {
  auto k = tow::start_tower(BaseFieldDesc(2, {"t"}));
  return tow::extend(k, "y", upoly({T(), C(1), C(0), C(1)}));
}

TowerPtr make_ex0() {
  auto f2 = tow::start_tower(BaseFieldDesc(2, {}));
  auto c = [](uint32_t v) { return RatFunc::constant(2, 0, v); };
  return tow::extend(f2, "a", pf::from_coeffs(std::vector<RatFunc>{
                                  c(1), c(1), c(0), c(0), c(1)}));
}

bool holds_root(const UniPoly& f, const TowerElement& r) {
  return pf::eval(tow::lift_poly(r.tw, f), r).is_zero();
}

bool among(const std::vector<TowerElement>& v, const TowerElement& x) {
  for (const auto& e : v)
    if (e == x) return true;
  return false;
}

}  // namespace

TEST_CASE("roots by specialization and lifting, separable quadratic", "[tower][roots]") {
  auto ex2 = make_ex2();
  auto s = tow::gen_elem(ex2, 0);
  UniPoly f = upoly({T(), C(1), C(1)});  // x^2 + x + t
  auto res = rt::roots_in_field(f, ex2);
  REQUIRE(res.roots.size() == 2);
  REQUIRE_FALSE(res.complete);
  REQUIRE(res.spec_k >= 1);
  for (const auto& r : res.roots) REQUIRE(holds_root(f, r));
  REQUIRE(among(res.roots, s));
  REQUIRE(among(res.roots, s + tow::one_elem(ex2)));
}

TEST_CASE("complete root finding over a finite base", "[tower][roots]") {
  auto ex0 = make_ex0();
  auto a = tow::gen_elem(ex0, 0);
  auto c = [](uint32_t v) { return RatFunc::constant(2, 0, v); };
  UniPoly f = pf::from_coeffs(std::vector<RatFunc>{c(1), c(1), c(0), c(0), c(1)});
  auto res = rt::roots_in_field(f, ex0);
  REQUIRE(res.roots.size() == 4);
  REQUIRE(res.complete);
  for (const auto& r : res.roots) REQUIRE(holds_root(f, r));
  // the Frobenius orbit of the generator
  auto sq = [](const TowerElement& x) { return x * x; };
  REQUIRE(among(res.roots, a));
  REQUIRE(among(res.roots, sq(a)));
  REQUIRE(among(res.roots, sq(sq(a))));
  REQUIRE(among(res.roots, sq(sq(sq(a)))));
}

TEST_CASE("cubic with a single root in the field", "[tower][roots]") {
  auto ex4 = make_ex4();
  auto y = tow::gen_elem(ex4, 0);
  UniPoly f = upoly({T(), C(1), C(0), C(1)});
  auto res = rt::roots_in_field(f, ex4);
  REQUIRE(res.roots.size() == 1);
  REQUIRE(res.roots[0] == y);
  REQUIRE_FALSE(res.complete);
}

TEST_CASE("purely inseparable polynomials resolve exactly", "[tower][roots]") {
  auto ex1 = make_ex1();
  UniPoly f = upoly({T(), C(0), C(1)});  // x^2 + t
  auto res = rt::roots_in_field(f, ex1);
  REQUIRE(res.roots.size() == 1);
  REQUIRE(res.roots[0] == tow::gen_elem(ex1, 0));
  REQUIRE(res.complete);
}

TEST_CASE("artin-schreier cubic in characteristic 3", "[tower][roots]") {
  auto c3 = [](uint32_t v) { return RatFunc::constant(3, 1, v); };
  RatFunc t3 = RatFunc::variable(3, 1, 0);
  auto k = tow::start_tower(BaseFieldDesc(3, {"t"}));
  UniPoly f = pf::from_coeffs(std::vector<RatFunc>{-t3, c3(2), c3(0), c3(1)});
  auto tw = tow::extend(k, "y", f);
  auto y = tow::gen_elem(tw, 0);
  auto res = rt::roots_in_field(f, tw);
  REQUIRE(res.roots.size() == 3);
  for (const auto& r : res.roots) REQUIRE(holds_root(f, r));
  REQUIRE(among(res.roots, y));
  REQUIRE(among(res.roots, y + tow::one_elem(tw)));
  REQUIRE(among(res.roots, y + tow::scalar_elem(tw, c3(2))));
}

TEST_CASE("polynomial with no roots in the field", "[tower][roots]") {
  auto ex2 = make_ex2();
  UniPoly f = upoly({C(1), C(1), C(1)});  // x^2 + x + 1
  auto res = rt::roots_in_field(f, ex2);
  REQUIRE(res.roots.empty());
}

TEST_CASE("inseparable layer over a separable core", "[tower][roots]") {
  auto ex3 = make_ex3();
  auto u = tow::gen_elem(ex3, 0);
  auto s = tow::gen_elem(ex3, 1);
  UniPoly f = upoly({T(), C(0), C(1), C(0), C(1)});  // x^4 + x^2 + t
  auto res = rt::roots_in_field(f, ex3);
  REQUIRE(res.roots.size() == 2);
  for (const auto& r : res.roots) REQUIRE(holds_root(f, r));
  REQUIRE(among(res.roots, u + s));
  REQUIRE(among(res.roots, u + s + tow::one_elem(ex3)));
}

TEST_CASE("importing a field from an ambient presentation", "[tower][ambient]") {
  auto xv = RatFunc::variable(2, 3, 0);
  auto yv = RatFunc::variable(2, 3, 1);
  auto zv = RatFunc::variable(2, 3, 2);
  auto af = amb::from_ambient(2, {"x", "y", "z"}, {xv * xv, yv * yv, zv * zv * zv * zv},
                              {zv, xv * zv + yv});
  REQUIRE(af.tower->rank() == 8);
  REQUIRE(af.tower->st.names == std::vector<std::string>{"z", "g2"});
  REQUIRE(af.tower->st.degs == std::vector<uint32_t>{4, 2});
  // minimal polynomial of z over K: x^4 + z4 (char 2)
  auto z4 = RatFunc::variable(2, 3, 2);  // new base: x2, y2, z4
  REQUIRE(af.tower->st.mins[0][0][0] == z4);
  for (int i = 1; i < 4; ++i) REQUIRE(af.tower->st.mins[0][i][0].is_zero());

  auto g0 = tow::gen_elem(af.tower, 0);
  auto g1 = tow::gen_elem(af.tower, 1);
  REQUIRE(af.to_ambient(g0) == zv);
  REQUIRE(af.to_ambient(g1) == xv * zv + yv);
  auto back0 = af.from_ambient_elem(zv);
  REQUIRE(back0.has_value());
  REQUIRE(*back0 == g0);
  auto mixed = g0 * g1 + tow::one_elem(af.tower);
  auto rt2 = af.from_ambient_elem(af.to_ambient(mixed));
  REQUIRE(rt2.has_value());
  REQUIRE(*rt2 == mixed);
  // x itself is outside L
  REQUIRE_FALSE(af.from_ambient_elem(xv).has_value());
}

TEST_CASE("ambient import edge shapes", "[tower][ambient]") {
  auto tv = RatFunc::variable(2, 1, 0);
  auto triv = amb::from_ambient(2, {"t"}, {tv}, {tv});
  REQUIRE(triv.tower->rank() == 1);

  auto half = amb::from_ambient(2, {"t"}, {tv * tv}, {tv});
  REQUIRE(half.tower->rank() == 2);
  REQUIRE(half.tower->st.names == std::vector<std::string>{"t"});
  REQUIRE(half.tower->st.mins[0][0][0] == RatFunc::variable(2, 1, 0));
  auto b = half.from_ambient_elem(tv);
  REQUIRE(b.has_value());
  REQUIRE(half.to_ambient(*b) == tv);

  auto xv = RatFunc::variable(2, 2, 0);
  auto yv = RatFunc::variable(2, 2, 1);
  REQUIRE_THROWS_AS(amb::from_ambient(2, {"x", "y"}, {xv * xv * xv, yv * yv}, {xv}),
                    UnsupportedAmbient);
  REQUIRE_THROWS_AS(amb::from_ambient(2, {"x", "y"}, {xv * yv, yv * yv}, {xv}),
                    UnsupportedAmbient);
  REQUIRE_THROWS_AS(amb::from_ambient(2, {"x", "y"}, {xv * xv}, {yv}),
                    UnsupportedAmbient);
}
