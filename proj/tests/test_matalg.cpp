#include <catch2/catch_amalgamated.hpp>
#include <random>

#include "fext/matalg.hpp"

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

std::vector<Mat<RatFunc>> rep_basis(const TowerPtr& t) {
  std::vector<Mat<RatFunc>> out;
  for (size_t k = 0; k < t->rank(); ++k)
    out.push_back(tow::regular_rep(tow::basis_elem(t, k)));
  return out;
}

Mat<RatFunc> random_matrix(const TowerPtr& t, std::mt19937_64& rng) {
  size_t n = t->rank();
  Mat<RatFunc> m = la::zero_mat(tow::scalar_zero(t), n, n);
  for (size_t i = 0; i < n; ++i)
    for (size_t j = 0; j < n; ++j)
      m.rows[i][j] = C(int64_t(rng() % 2)) + C(int64_t(rng() % 2)) * T();
  return m;
}

bool mats_equal(const Mat<RatFunc>& a, const Mat<RatFunc>& b) {
  if (a.nrows() != b.nrows() || a.cols != b.cols) return false;
  for (size_t i = 0; i < a.nrows(); ++i)
    for (size_t j = 0; j < a.cols; ++j)
      if (!(a.rows[i][j] == b.rows[i][j])) return false;
  return true;
}

bool commute(const Mat<RatFunc>& a, const Mat<RatFunc>& b) {
  return mats_equal(la::mul(a, b), la::mul(b, a));
}

}  // namespace

TEST_CASE("algebra generation reaches the expected closures", "[matalg]") {
  auto ex3 = make_ex3();
  auto trivial = ma::generate_algebra(ex3, {});
  REQUIRE(trivial.dim() == 1);
  REQUIRE(trivial.contains_identity);
  REQUIRE_FALSE(trivial.contains_l);
  REQUIRE(ma::algebra_equal(trivial, ma::scalar_algebra(ex3)));

  auto img_l = ma::generate_algebra(ex3, rep_basis(ex3));
  REQUIRE(img_l.dim() == 4);
  REQUIRE(img_l.contains_l);
  REQUIRE(ma::algebra_equal(img_l, ma::image_of_field(ex3)));

  // multiplication by u together with the derivation d/du fills all of
  // the 2x2 endomorphism ring: their commutator is the identity
  auto ex1 = make_ex1();
  Mat<RatFunc> du = la::zero_mat(tow::scalar_zero(ex1), 2, 2);
  du.rows[0][1] = C(1);
  auto full = ma::generate_algebra(ex1, {tow::regular_rep(tow::gen_elem(ex1, 0)), du});
  REQUIRE(full.dim() == 4);
  REQUIRE(ma::algebra_equal(full, ma::full_endomorphisms(ex1)));
}

TEST_CASE("centralizers of scalars, the field image, and a subfield image",
          "[matalg]") {
  auto ex3 = make_ex3();
  auto e = ma::full_endomorphisms(ex3);
  REQUIRE(e.dim() == 16);
  REQUIRE(e.contains_l);

  auto all = ma::centralizer(ex3, {ma::identity_mat(ex3)}, e);
  REQUIRE(ma::algebra_equal(all, e));

  auto img_l = ma::image_of_field(ex3);
  auto c_l = ma::centralizer(ex3, ma::basis_mats(img_l), e);
  REQUIRE(c_l.dim() == 4);
  REQUIRE(ma::algebra_equal(c_l, img_l));

  auto s = tow::gen_elem(ex3, 1);
  auto ks = ma::image_of_subfield(tow::subfield_generated(ex3, {s}));
  REQUIRE(ks.dim() == 2);
  auto d = ma::centralizer(ex3, ma::basis_mats(ks), e);
  REQUIRE(d.dim() == 8);
  REQUIRE(d.contains_identity);
  REQUIRE(d.contains_l);
}

TEST_CASE("double centralizer round trips", "[matalg]") {
  auto ex3 = make_ex3();
  auto img_l = ma::image_of_field(ex3);
  auto r1 = ma::double_centralizer_roundtrip(ex3, img_l);
  REQUIRE(r1.ok);
  REQUIRE(r1.c.dim() == 4);
  REQUIRE(ma::algebra_equal(r1.c, img_l));

  auto r2 = ma::double_centralizer_roundtrip(ex3, ma::scalar_algebra(ex3));
  REQUIRE(r2.ok);
  REQUIRE(r2.c.dim() == 16);

  auto s = tow::gen_elem(ex3, 1);
  auto ks = ma::image_of_subfield(tow::subfield_generated(ex3, {s}));
  auto d = ma::centralizer(ex3, ma::basis_mats(ks), ma::full_endomorphisms(ex3));
  auto r3 = ma::double_centralizer_roundtrip(ex3, d);
  REQUIRE(r3.ok);
  REQUIRE(r3.c.dim() == 2);
  REQUIRE(ma::algebra_equal(r3.c, ks));
  REQUIRE(d.dim() * r3.c.dim() == 16);
}

TEST_CASE("simplicity by ideal closure", "[matalg]") {
  auto ex1 = make_ex1();
  REQUIRE(ma::is_simple(ma::full_endomorphisms(ex1)));
  REQUIRE(ma::is_simple(ma::image_of_field(ex1)));

  // commutative algebra with a nontrivial idempotent: the ideal generated
  // by diag(1, 0) is a proper one
  Mat<RatFunc> idem = la::zero_mat(tow::scalar_zero(ex1), 2, 2);
  idem.rows[0][0] = C(1);
  auto split = ma::generate_algebra(ex1, {idem});
  REQUIRE(split.dim() == 2);
  REQUIRE_FALSE(ma::is_simple(split));
}

TEST_CASE("centers of nested algebras", "[matalg]") {
  auto ex3 = make_ex3();
  auto z_e = ma::center(ma::full_endomorphisms(ex3));
  REQUIRE(z_e.dim() == 1);
  REQUIRE(ma::algebra_equal(z_e, ma::scalar_algebra(ex3)));

  auto img_l = ma::image_of_field(ex3);
  REQUIRE(ma::algebra_equal(ma::center(img_l), img_l));

  auto s = tow::gen_elem(ex3, 1);
  auto ks = ma::image_of_subfield(tow::subfield_generated(ex3, {s}));
  auto d = ma::centralizer(ex3, ma::basis_mats(ks), ma::full_endomorphisms(ex3));
  auto z_d = ma::center(d);
  REQUIRE(z_d.dim() == 2);
  REQUIRE(ma::algebra_equal(z_d, ks));
}

TEST_CASE("diagonal embeddings of subfield endomorphism rings", "[matalg]") {
  auto ex3 = make_ex3();
  auto whole = tow::subfield_full(ex3);
  auto id_hom = ma::diagonal_embedding(whole, {tow::one_elem(ex3)});
  REQUIRE(id_hom.dom.size() == 16);
  for (size_t i = 0; i < id_hom.dom.size(); ++i)
    REQUIRE(mats_equal(id_hom.dom[i], id_hom.img[i]));

  auto u = tow::gen_elem(ex3, 0);
  auto s = tow::gen_elem(ex3, 1);
  auto ku = tow::subfield_generated(ex3, {u});
  auto theta = ma::diagonal_embedding(ku, {tow::one_elem(ex3), s});
  auto img = ma::hom_image_algebra(theta);
  REQUIRE(img.dim() == 4);
  // the embedded operators commute with multiplication by the span of 1, s
  auto rep_s = tow::regular_rep(s);
  for (const auto& m : theta.img) {
    REQUIRE(commute(m, rep_s));
  }
  // together with everything commuting with K(u) it fills the whole ring
  auto c_ku = ma::centralizer(ex3, ma::basis_mats(ma::image_of_subfield(ku)),
                              ma::full_endomorphisms(ex3));
  std::vector<Mat<RatFunc>> gens = theta.img;
  for (auto& m : ma::basis_mats(c_ku)) gens.push_back(m);
  REQUIRE(ma::generate_algebra(ex3, gens).dim() == 16);

  REQUIRE_THROWS_AS(ma::diagonal_embedding(ku, {tow::one_elem(ex3)}), NotABasis);
  REQUIRE_THROWS_AS(ma::diagonal_embedding(ku, {tow::one_elem(ex3), u}),
                    NotABasis);
}

TEST_CASE("conjugating units realize inner isomorphisms", "[matalg]") {
  auto ex3 = make_ex3();
  auto u = tow::gen_elem(ex3, 0);
  auto ku = ma::image_of_subfield(tow::subfield_generated(ex3, {u}));
  auto bas = ma::basis_mats(ku);

  AlgebraHom ident{ex3, bas, bas};
  auto w = ma::conjugating_unit(ku, ku, ident);
  auto winv = la::inverse(w, tow::scalar_one(ex3));
  REQUIRE(winv.has_value());
  for (const auto& a : bas)
    REQUIRE(mats_equal(la::mul(la::mul(w, a), *winv), a));

  // conjugate the algebra by an explicit unit and recover some conjugator
  Mat<RatFunc> v = ma::identity_mat(ex3);
  v.rows[0][1] = C(1);
  v.rows[2][3] = T();
  auto vinv = la::inverse(v, tow::scalar_one(ex3));
  REQUIRE(vinv.has_value());
  std::vector<Mat<RatFunc>> conj;
  for (const auto& a : bas) conj.push_back(la::mul(la::mul(v, a), *vinv));
  auto balg = ma::generate_algebra(ex3, conj);
  REQUIRE(balg.dim() == ku.dim());
  AlgebraHom iso{ex3, bas, conj};
  REQUIRE(ma::verify_hom(iso));
  auto w2 = ma::conjugating_unit(ku, balg, iso);
  auto w2inv = la::inverse(w2, tow::scalar_one(ex3));
  REQUIRE(w2inv.has_value());
  for (size_t i = 0; i < bas.size(); ++i)
    REQUIRE(mats_equal(la::mul(la::mul(w2, bas[i]), *w2inv), conj[i]));

  // two diagonal embeddings of the same subfield ring are conjugate
  auto s = tow::gen_elem(ex3, 1);
  auto kus = tow::subfield_generated(ex3, {u});
  auto th1 = ma::diagonal_embedding(kus, {tow::one_elem(ex3), s});
  auto th2 = ma::diagonal_embedding(kus, {s, tow::one_elem(ex3) + s});
  auto a1 = ma::hom_image_algebra(th1);
  auto a2 = ma::hom_image_algebra(th2);
  AlgebraHom link{ex3, th1.img, th2.img};
  REQUIRE(ma::verify_hom(link));
  auto w3 = ma::conjugating_unit(a1, a2, link);
  auto w3inv = la::inverse(w3, tow::scalar_one(ex3));
  REQUIRE(w3inv.has_value());
  for (size_t i = 0; i < th1.img.size(); ++i)
    REQUIRE(mats_equal(la::mul(la::mul(w3, th1.img[i]), *w3inv), th2.img[i]));
}

TEST_CASE("reading subfields back off algebras that contain the field",
          "[matalg]") {
  auto ex3 = make_ex3();
  auto from_e = ma::algebra_to_subfield(ma::full_endomorphisms(ex3));
  REQUIRE(from_e.dim() == 1);
  REQUIRE(from_e.certified);

  auto from_l = ma::algebra_to_subfield(ma::image_of_field(ex3));
  REQUIRE(from_l.dim() == 4);

  auto s = tow::gen_elem(ex3, 1);
  auto ks_field = tow::subfield_generated(ex3, {s});
  auto d = ma::centralizer(ex3, ma::basis_mats(ma::image_of_subfield(ks_field)),
                           ma::full_endomorphisms(ex3));
  auto back = ma::algebra_to_subfield(d);
  REQUIRE(back.dim() == 2);
  REQUIRE(la::equal(back.space, ks_field.space));

  REQUIRE_THROWS_AS(ma::algebra_to_subfield(ma::scalar_algebra(ex3)),
                    NotContainingL);
}

TEST_CASE("randomized algebras over the field classify as centralizers",
          "[matalg]") {
  auto ex3 = make_ex3();
  auto e = ma::full_endomorphisms(ex3);
  std::mt19937_64 rng(0xa1b2u);
  for (int round = 0; round < 4; ++round) {
    std::vector<Mat<RatFunc>> gens = rep_basis(ex3);
    gens.push_back(random_matrix(ex3, rng));
    auto a = ma::generate_algebra(ex3, gens);
    REQUIRE(a.contains_l);
    REQUIRE(ma::is_simple(a));
    auto m = ma::algebra_to_subfield(a);
    REQUIRE(m.certified);
    auto back = ma::centralizer(ex3, ma::basis_mats(ma::image_of_subfield(m)), e);
    REQUIRE(ma::algebra_equal(back, a));

    // degree bookkeeping: the center is the image of a subfield and the
    // dimension factors through it
    auto f = ma::center(a);
    size_t df = f.dim();
    size_t n = ex3->rank();
    REQUIRE(n % df == 0);
    REQUIRE(a.dim() == (n / df) * (n / df) * df);

    // the field image stays self-centralizing inside a
    auto c_l_in_a = ma::centralizer(ex3, rep_basis(ex3), a);
    REQUIRE(ma::algebra_equal(c_l_in_a, ma::image_of_field(ex3)));

    auto dd = ma::double_centralizer_roundtrip(ex3, a);
    REQUIRE(dd.ok);
  }
}

TEST_CASE("centralizer of a compositum is the meet of centralizers",
          "[matalg]") {
  auto ex3 = make_ex3();
  auto e = ma::full_endomorphisms(ex3);
  auto u = tow::gen_elem(ex3, 0);
  auto s = tow::gen_elem(ex3, 1);
  auto mu = tow::subfield_generated(ex3, {u});
  auto ns = tow::subfield_generated(ex3, {s});
  auto c = [&](const tow::Subfield& f) {
    return ma::centralizer(ex3, ma::basis_mats(ma::image_of_subfield(f)), e);
  };
  auto cm = c(mu);
  auto cn = c(ns);
  auto meet = la::meet(cm.space, cn.space);
  auto cmn = c(tow::compositum(mu, ns));
  REQUIRE(la::equal(meet, cmn.space));
  REQUIRE(cmn.dim() == 4);

  auto self = la::meet(cm.space, cm.space);
  REQUIRE(la::equal(self, cm.space));
}
