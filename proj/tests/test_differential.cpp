#include <catch2/catch_amalgamated.hpp>

#include "fext/ambient.hpp"
#include "fext/differential.hpp"

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

// EX2: F_2(t), s^2 + s = t
TowerPtr make_ex2() {
  auto k = tow::start_tower(BaseFieldDesc(2, {"t"}));
  return tow::extend(k, "s", upoly({T(), C(1), C(1)}));
}

// EX3: EX1 then s^2 + s = t
TowerPtr make_ex3() {
  return tow::extend(make_ex1(), "s", upoly({T(), C(1), C(1)}));
}

// EX4: F_2(t), y^3 + y = t (separable cubic)
TowerPtr make_ex4() {
  auto k = tow::start_tower(BaseFieldDesc(2, {"t"}));
  return tow::extend(k, "y", upoly({T(), C(1), C(0), C(1)}));
}

// EX5: F_2(x,y,z) over the subfield generated by x^2, y^2, z^4
TowerPtr make_ex5() {
  auto xv = RatFunc::variable(2, 3, 0);
  auto yv = RatFunc::variable(2, 3, 1);
  auto zv = RatFunc::variable(2, 3, 2);
  auto af = amb::from_ambient(2, {"x", "y", "z"},
                              {xv * xv, yv * yv, zv * zv * zv * zv},
                              {zv, xv * zv + yv});
  return af.tower;
}

Mat<RatFunc> du_matrix_ex1(const TowerPtr& t) {
  Mat<RatFunc> m = la::zero_mat(tow::scalar_zero(t), 2, 2);
  m.rows[0][1] = C(1);
  return m;
}

// the derivation of EX3 with u -> 1, s -> 0 on basis (1, u, s, us)
Mat<RatFunc> du_matrix_ex3(const TowerPtr& t) {
  Mat<RatFunc> m = la::zero_mat(tow::scalar_zero(t), 4, 4);
  m.rows[0][1] = C(1);
  m.rows[2][3] = C(1);
  return m;
}

}  // namespace

TEST_CASE("derivation spaces over the base", "[differential]") {
  auto ex1 = make_ex1();
  auto d1 = df::derivations(ex1, tow::subfield_k(ex1));
  REQUIRE(d1.k_dim == 2);
  REQUIRE(d1.l_dim == 1);
  REQUIRE(d1.leibniz_ok);
  REQUIRE(d1.vanishes_on_base);
  la::Subspace<RatFunc> sp1 = la::span(
      4, std::vector<std::vector<RatFunc>>{ma::flatten(d1.basis[0]),
                                           ma::flatten(d1.basis[1])});
  REQUIRE(la::contains(sp1, ma::flatten(du_matrix_ex1(ex1))));

  auto ex2 = make_ex2();
  auto d2 = df::derivations(ex2, tow::subfield_k(ex2));
  REQUIRE(d2.k_dim == 0);
  REQUIRE(d2.l_dim == 0);

  auto ex3 = make_ex3();
  auto d3 = df::derivations(ex3, tow::subfield_k(ex3));
  REQUIRE(d3.k_dim == 4);
  REQUIRE(d3.l_dim == 1);
  REQUIRE(d3.leibniz_ok);
  std::vector<std::vector<RatFunc>> fl;
  for (const auto& m : d3.basis) fl.push_back(ma::flatten(m));
  REQUIRE(la::contains(la::span(16, fl), ma::flatten(du_matrix_ex3(ex3))));

  auto ex4 = make_ex4();
  auto d4 = df::derivations(ex4, tow::subfield_k(ex4));
  REQUIRE(d4.k_dim == 0);
}

TEST_CASE("constants fields of derivation spaces", "[differential]") {
  auto ex1 = make_ex1();
  auto c1 = df::constants_field(df::derivations(ex1, tow::subfield_k(ex1)));
  REQUIRE(c1.dim() == 1);
  REQUIRE(c1.certified);

  auto ex2 = make_ex2();
  auto c2 = df::constants_field(df::derivations(ex2, tow::subfield_k(ex2)));
  REQUIRE(c2.dim() == 2);

  auto ex3 = make_ex3();
  auto c3 = df::constants_field(df::derivations(ex3, tow::subfield_k(ex3)));
  REQUIRE(c3.dim() == 2);
  auto s = tow::gen_elem(ex3, 1);
  REQUIRE(la::equal(c3.space, tow::subfield_generated(ex3, {s}).space));
}

TEST_CASE("separable closures across the catalog", "[differential]") {
  auto ex1 = make_ex1();
  REQUIRE(df::separable_closure(ex1).dim() == 1);

  auto ex2 = make_ex2();
  REQUIRE(df::separable_closure(ex2).dim() == 2);

  auto ex3 = make_ex3();
  auto sep3 = df::separable_closure(ex3);
  REQUIRE(sep3.dim() == 2);
  auto s = tow::gen_elem(ex3, 1);
  REQUIRE(la::equal(sep3.space, tow::subfield_generated(ex3, {s}).space));

  auto ex4 = make_ex4();
  REQUIRE(df::separable_closure(ex4).dim() == 3);

  auto ex5 = make_ex5();
  REQUIRE(df::separable_closure(ex5).dim() == 1);
}

TEST_CASE("operator algebras by centralizer and by filtration agree",
          "[differential]") {
  auto ex1 = make_ex1();
  auto da1 = df::diff_ops(ex1);
  REQUIRE(da1.d.dim() == 4);
  REQUIRE(da1.split_ok);
  REQUIRE(da1.left_ideal_ok);
  auto fa1 = df::diff_ops_by_filtration(ex1, ex1->rank());
  REQUIRE(la::equal(fa1.d.space, da1.d.space));
  REQUIRE(fa1.filtration == std::vector<size_t>{2, 4, 4});

  auto ex2 = make_ex2();
  auto da2 = df::diff_ops(ex2);
  REQUIRE(da2.d.dim() == 2);
  REQUIRE(la::equal(da2.d.space, ma::image_of_field(ex2).space));
  auto fa2 = df::diff_ops_by_filtration(ex2, ex2->rank());
  REQUIRE(la::equal(fa2.d.space, da2.d.space));
  REQUIRE(fa2.filtration == std::vector<size_t>{2, 2});

  auto ex3 = make_ex3();
  auto da3 = df::diff_ops(ex3);
  REQUIRE(da3.d.dim() == 8);
  REQUIRE(da3.split_ok);
  REQUIRE(da3.left_ideal_ok);
  REQUIRE(da3.d_plus.dim() == 4);
  auto fa3 = df::diff_ops_by_filtration(ex3, ex3->rank());
  REQUIRE(la::equal(fa3.d.space, da3.d.space));
  REQUIRE(fa3.filtration == std::vector<size_t>{4, 8, 8});
  // the same algebra as the centralizer of the separable part, computed
  // through the matrix module directly
  auto s = tow::gen_elem(ex3, 1);
  auto ks = ma::image_of_subfield(tow::subfield_generated(ex3, {s}));
  auto d_direct = ma::centralizer(ex3, ma::basis_mats(ks),
                                  ma::full_endomorphisms(ex3));
  REQUIRE(la::equal(da3.d.space, d_direct.space));

  auto ex4 = make_ex4();
  auto da4 = df::diff_ops(ex4);
  REQUIRE(da4.d.dim() == 3);
  auto fa4 = df::diff_ops_by_filtration(ex4, ex4->rank());
  REQUIRE(la::equal(fa4.d.space, da4.d.space));
}

TEST_CASE("triple agreement of the distinguished subfield", "[differential]") {
  for (auto& t : {make_ex1(), make_ex2(), make_ex3(), make_ex4()}) {
    auto sep = df::separable_closure(t);
    auto da = df::diff_ops(t);
    auto viaplus = df::dplus_constants(da);
    auto vialdif = df::l_dif(t, da);
    REQUIRE(la::equal(sep.space, viaplus.space));
    REQUIRE(la::equal(sep.space, vialdif.space));
  }
}

TEST_CASE("containment chain of the distinguished subfields", "[differential]") {
  for (auto& t : {make_ex1(), make_ex2(), make_ex3(), make_ex4()}) {
    auto sep = df::separable_closure(t);
    auto da = df::diff_ops(t);
    auto ldif = df::l_dif(t, da);
    auto dconst = df::dplus_constants(da);
    auto derc = df::constants_field(df::derivations(t, tow::subfield_k(t)));
    REQUIRE(la::subspace_leq(sep.space, ldif.space));
    REQUIRE(la::subspace_leq(ldif.space, dconst.space));
    REQUIRE(la::subspace_leq(dconst.space, derc.space));
    // the derivation constants are the compositum of the separable part
    // with the subfield of p-th powers
    std::vector<TowerElement> pth;
    for (size_t k = 0; k < t->rank(); ++k)
      pth.push_back(tow::frobenius_elem(tow::basis_elem(t, k), 1));
    auto lp = tow::subfield_generated(t, pth);
    REQUIRE(la::equal(derc.space, tow::compositum(sep, lp).space));
  }
}

TEST_CASE("derivation dimension law", "[differential]") {
  for (auto& t : {make_ex1(), make_ex2(), make_ex3(), make_ex5()}) {
    auto der = df::derivations(t, tow::subfield_k(t));
    auto derc = df::constants_field(der);
    size_t n = t->rank();
    size_t idx = n / derc.dim();  // [L : L^sep L^p]
    size_t ngen = 0;
    for (size_t q = 1; q < idx; q *= t->base.p) ++ngen;
    REQUIRE(der.k_dim == ngen * n);
  }
}

TEST_CASE("purely inseparable parts", "[differential]") {
  auto ex1 = make_ex1();
  REQUIRE(df::purely_inseparable_part(ex1).dim() == 2);

  auto ex2 = make_ex2();
  REQUIRE(df::purely_inseparable_part(ex2).dim() == 1);

  auto ex3 = make_ex3();
  auto pi3 = df::purely_inseparable_part(ex3);
  REQUIRE(pi3.dim() == 2);
  auto u = tow::gen_elem(ex3, 0);
  REQUIRE(la::equal(pi3.space, tow::subfield_generated(ex3, {u}).space));

  // exponent-two tower over a marked base: everything is a p-power root
  auto ex5 = make_ex5();
  REQUIRE(df::purely_inseparable_part(ex5).dim() == 8);
}

TEST_CASE("derivation algebras versus operator algebras", "[differential]") {
  auto ex1 = make_ex1();
  auto alg1 = df::derivation_algebra(ex1, df::derivations(ex1, tow::subfield_k(ex1)));
  REQUIRE(alg1.dim() == 4);
  REQUIRE(la::equal(alg1.space, df::diff_ops(ex1).d.space));

  auto ex2 = make_ex2();
  auto alg2 = df::derivation_algebra(ex2, df::derivations(ex2, tow::subfield_k(ex2)));
  REQUIRE(alg2.dim() == 2);
  REQUIRE(la::equal(alg2.space, ma::image_of_field(ex2).space));

  // exponent two: the derivation algebra falls strictly short of the
  // operator algebra
  auto ex5 = make_ex5();
  auto der5 = df::derivations(ex5, tow::subfield_k(ex5));
  REQUIRE(der5.k_dim == 16);
  REQUIRE(der5.l_dim == 2);
  auto alg5 = df::derivation_algebra(ex5, der5);
  auto da5 = df::diff_ops(ex5);
  REQUIRE(da5.d.dim() == 64);
  REQUIRE(alg5.dim() == 32);
  REQUIRE(la::subspace_leq(alg5.space, da5.d.space));
  REQUIRE(alg5.dim() < da5.d.dim());
}

TEST_CASE("operator algebra of the rebased tower over the distinguished part",
          "[differential]") {
  auto ex3 = make_ex3();
  auto da = df::diff_ops(ex3);
  auto ldif = df::l_dif(ex3, da);
  auto rb = tow::rebase(ex3, ldif);
  auto da_rb = df::diff_ops(rb.tower);
  REQUIRE(da_rb.d.dim() == da.d.dim());
  auto ldif_rb = df::l_dif(rb.tower, da_rb);
  REQUIRE(la::equal(ldif_rb.space, tow::base_subfield(rb.tower).space));
}

TEST_CASE("operator dimensions multiply across concatenations",
          "[differential]") {
  auto ex1 = make_ex1();
  auto ex2 = make_ex2();
  auto rep = df::tensor_diffops_check(ex1, ex2);
  REQUIRE(rep.dim1 == 4);
  REQUIRE(rep.dim2 == 2);
  REQUIRE(rep.dim12 == 8);
  REQUIRE(rep.dims_multiply);
  REQUIRE(rep.factors_generate);
  REQUIRE(rep.combined->rank() == 4);

  // trivial second factor
  auto k = tow::start_tower(BaseFieldDesc(2, {"t"}));
  auto rep_triv = df::tensor_diffops_check(ex1, k);
  REQUIRE(rep_triv.dim2 == 1);
  REQUIRE(rep_triv.dims_multiply);
  REQUIRE(rep_triv.factors_generate);

  // two purely inseparable factors over a two-variable base stay disjoint
  auto k2 = tow::start_tower(BaseFieldDesc(2, {"a", "b"}));
  auto av = RatFunc::variable(2, 2, 0);
  auto bv = RatFunc::variable(2, 2, 1);
  auto z2 = RatFunc::zero(2, 2);
  auto o2 = RatFunc::constant(2, 2, 1);
  auto ta = tow::extend(k2, "ra", upoly({av, z2, o2}));
  auto tb = tow::extend(k2, "rb", upoly({bv, z2, o2}));
  auto rep_pi = df::tensor_diffops_check(ta, tb);
  REQUIRE(rep_pi.dim1 == 4);
  REQUIRE(rep_pi.dim2 == 4);
  REQUIRE(rep_pi.dim12 == 16);
  REQUIRE(rep_pi.dims_multiply);
  REQUIRE(rep_pi.factors_generate);

  // a second square root of the same element produces a zero divisor:
  // sqrt(t) and sqrt(t+1) differ by 1 in characteristic two
  auto tv = tow::extend(k, "v", upoly({T() + C(1), C(0), C(1)}));
  REQUIRE_THROWS_AS(df::tensor_diffops_check(ex1, tv), NotAField);
}
