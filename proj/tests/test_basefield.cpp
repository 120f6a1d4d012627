#include <catch2/catch_amalgamated.hpp>
#include <random>

#include "fext/fp.hpp"
#include "fext/multipoly.hpp"
#include "fext/ratfunc.hpp"
#include "fext/unipoly.hpp"

using namespace fext;

namespace {

RatFunc cst(uint32_t p, int64_t v) { return RatFunc::constant(p, 1, v); }
RatFunc var_t(uint32_t p) { return RatFunc::variable(p, 1, 0); }

RatFunc rand_poly_rf(std::mt19937_64& rng, uint32_t p, uint32_t nvars, int maxdeg) {
  MultiPoly f = mp::zero(p, nvars);
  std::uniform_int_distribution<int> dc(0, int(p) - 1), de(0, maxdeg);
  int terms = 1 + int(rng() % 3);
  for (int k = 0; k < terms; ++k) {
    MultiPoly m = mp::constant(p, nvars, uint32_t(dc(rng)));
    for (uint32_t v = 0; v < nvars; ++v)
      m = mp::mul(m, mp::pow(mp::variable(p, nvars, v), uint64_t(de(rng))));
    f = mp::add(f, m);
  }
  return RatFunc::from_poly(f);
}

RatFunc rand_rf(std::mt19937_64& rng, uint32_t p, uint32_t nvars, int maxdeg) {
  RatFunc n = rand_poly_rf(rng, p, nvars, maxdeg);
  RatFunc d = rand_poly_rf(rng, p, nvars, maxdeg);
  while (d.is_zero()) d = rand_poly_rf(rng, p, nvars, maxdeg);
  return n / d;
}

UniPoly upoly(std::vector<RatFunc> cs) { return pf::from_coeffs(std::move(cs)); }

}  // namespace

TEST_CASE("prime field residue arithmetic", "[basefield]") {
  REQUIRE(fp::is_prime(2));
  REQUIRE(fp::is_prime(5));
  REQUIRE_FALSE(fp::is_prime(6));
  REQUIRE(fp::inv(2, 5) == 3);
  REQUIRE(fp::mul(fp::inv(4, 7), 4, 7) == 1);
  REQUIRE(fp::pow(3, 4, 5) == 1);
}

TEST_CASE("dense polynomials over F_p and irreducibility", "[basefield]") {
  // x^2 + x + 1 is the unique irreducible quadratic over F_2
  REQUIRE(fp::first_irreducible(2, 2) == fp::Vec({1, 1, 1}));
  REQUIRE_FALSE(fp::is_irreducible(fp::Vec({1, 0, 1}), 2));  // (x+1)^2
  REQUIRE(fp::is_irreducible(fp::Vec({1, 1, 0, 1}), 2));     // x^3+x+1
  fp::Vec f = {1, 1, 1}, g = {1, 1};  // x^2+x+1, x+1 over F_2
  REQUIRE(fp::vgcd(f, g, 2) == fp::Vec({1}));
  fp::Vec q, r;
  fp::vdivmod(fp::vmul(f, g, 2), f, q, r, 2);
  REQUIRE(q == g);
  REQUIRE(r.empty());
}

TEST_CASE("multivariate canonical form and ring ops", "[basefield]") {
  uint32_t p = 2;
  MultiPoly x = mp::variable(p, 2, 0), y = mp::variable(p, 2, 1);
  MultiPoly f = mp::add(mp::mul(x, x), y);       // x^2 + y
  MultiPoly g = mp::add(f, f);                   // char 2: vanishes
  REQUIRE(g.is_zero());
  MultiPoly h = mp::add(x, y);
  REQUIRE(h.terms.size() == 2);
  REQUIRE(h.terms[0].e == std::vector<uint32_t>({1, 0}));  // x before y
  REQUIRE(mp::equal(mp::mul(h, h), mp::add(mp::mul(x, x), mp::mul(y, y))));
}

TEST_CASE("multivariate gcd against a planted factor", "[basefield]") {
  uint32_t p = 2;
  MultiPoly x = mp::variable(p, 2, 0), y = mp::variable(p, 2, 1);
  MultiPoly com = mp::add(x, y);
  MultiPoly a = mp::mul(com, mp::add(mp::mul(x, x), y));
  MultiPoly b = mp::mul(com, mp::add(mp::mul(y, mp::mul(y, y)), x));
  MultiPoly g = mp::gcd(a, b);
  REQUIRE(mp::equal(g, com));
  // independent check: both inputs divide exactly by the reported gcd
  REQUIRE(mp::equal(mp::mul(g, mp::div_exact(a, g)), a));
  REQUIRE(mp::equal(mp::mul(g, mp::div_exact(b, g)), b));
}

TEST_CASE("rational function normalization", "[basefield]") {
  uint32_t p = 2;
  MultiPoly t = mp::variable(p, 1, 0);
  MultiPoly t2t = mp::add(mp::mul(t, t), t);
  RatFunc a = rf::ratfunc_normalize(t2t, t);  // (t^2+t)/t
  REQUIRE(mp::equal(a.num, mp::add(t, mp::constant(p, 1, 1))));
  REQUIRE(a.den.is_one());

  RatFunc z = rf::ratfunc_normalize(mp::zero(p, 1), mp::pow(t, 3));
  REQUIRE(z.is_zero());
  REQUIRE(z.den.is_one());

  MultiPoly t3 = mp::variable(3, 1, 0);
  RatFunc c = rf::ratfunc_normalize(mp::scale(t3, 2), mp::constant(3, 1, 2));
  REQUIRE(mp::equal(c.num, t3));
  REQUIRE(c.den.is_one());

  // monic denominator: 1/(2t) = 2/t over F_3(t)
  RatFunc d = rf::ratfunc_normalize(mp::constant(3, 1, 1), mp::scale(t3, 2));
  REQUIRE(mp::equal(d.den, t3));
  REQUIRE(mp::equal(d.num, mp::constant(3, 1, 2)));

  REQUIRE_THROWS_AS(rf::ratfunc_normalize(t, mp::zero(p, 1)), ZeroDenominator);
}

TEST_CASE("rational functions form a field", "[basefield]") {
  std::mt19937_64 rng(12345);
  for (uint32_t p : {2u, 3u, 5u}) {
    for (int iter = 0; iter < 25; ++iter) {
      RatFunc a = rand_rf(rng, p, 1, 3), b = rand_rf(rng, p, 1, 3),
              c = rand_rf(rng, p, 1, 3);
      REQUIRE((a + b) + c == a + (b + c));
      REQUIRE(a * b == b * a);
      REQUIRE((a * b) * c == a * (b * c));
      REQUIRE(a * (b + c) == a * b + a * c);
      REQUIRE(a - a == RatFunc::zero(p, 1));
      if (!a.is_zero()) {
        REQUIRE(a * a.inv() == RatFunc::constant(p, 1, 1));
        // reduced invariant: gcd(num, den) = 1 and monic den
        REQUIRE(mp::gcd(a.num, a.den).is_one());
        REQUIRE(mp::equal(a.den, mp::monic(a.den)));
      }
    }
  }
  REQUIRE_THROWS_AS(RatFunc::zero(2, 1).inv(), DivisionByZero);
}

TEST_CASE("frobenius powers", "[basefield]") {
  RatFunc t = var_t(2);
  RatFunc a = t + cst(2, 1);
  REQUIRE(rf::frobenius_power(a, 1) == t * t + cst(2, 1));
  RatFunc u = var_t(3);
  REQUIRE(rf::frobenius_power(u.inv(), 1) == (u * u * u).inv());
  REQUIRE(rf::frobenius_power(u, 0) == u);

  std::mt19937_64 rng(777);
  for (uint32_t p : {2u, 3u}) {
    for (int iter = 0; iter < 15; ++iter) {
      RatFunc x = rand_rf(rng, p, 2, 2), y = rand_rf(rng, p, 2, 2);
      for (uint32_t e : {1u, 2u}) {
        REQUIRE(rf::frobenius_power(x + y, e) ==
                rf::frobenius_power(x, e) + rf::frobenius_power(y, e));
        REQUIRE(rf::frobenius_power(x * y, e) ==
                rf::frobenius_power(x, e) * rf::frobenius_power(y, e));
      }
    }
  }
}

TEST_CASE("p^e-th roots", "[basefield]") {
  RatFunc t = var_t(2);
  auto r1 = rf::pe_root(t * t, 1);
  REQUIRE(r1.has_value());
  REQUIRE(*r1 == t);
  REQUIRE_FALSE(rf::pe_root(t, 1).has_value());

  RatFunc a = t * t * t * t + t * t;  // t^4 + t^2
  auto r2 = rf::pe_root(a, 1);
  REQUIRE(r2.has_value());
  REQUIRE(*r2 * *r2 == a);  // square back
  REQUIRE(*r2 == t * t + t);

  std::mt19937_64 rng(31337);
  for (uint32_t p : {2u, 3u}) {
    for (int iter = 0; iter < 15; ++iter) {
      RatFunc x = rand_rf(rng, p, 2, 2);
      for (uint32_t e : {1u, 2u}) {
        auto back = rf::pe_root(rf::frobenius_power(x, e), e);
        REQUIRE(back.has_value());
        REQUIRE(*back == x);
      }
    }
  }
}

TEST_CASE("univariate gcd over the fraction field", "[basefield]") {
  RatFunc t = var_t(2), one = cst(2, 1), zero = RatFunc::zero(2, 1);
  UniPoly f = upoly({t, zero, one});  // x^2 + t

  UniPoly g1 = up::poly_gcd(f, f);
  REQUIRE(pf::equal(g1, f));  // already monic

  REQUIRE(pf::equal(up::poly_gcd(f, pf::zero<RatFunc>()), f));

  UniPoly f4 = upoly({t, one, zero, one});  // x^3 + x + t
  UniPoly df4 = up::formal_derivative(f4);
  REQUIRE(pf::equal(df4, upoly({one, zero, one})));  // x^2 + 1
  UniPoly g2 = up::poly_gcd(f4, df4);
  REQUIRE(g2.deg() == 0);
  // certify coprimality independently: u*f + v*f' = 1
  auto eg = pf::extended_gcd(f4, df4);
  REQUIRE(pf::equal(pf::add(pf::mul(eg.u, f4), pf::mul(eg.v, df4)), g2));
  REQUIRE(pf::equal(g2, pf::constant(one)));
}

TEST_CASE("formal derivative", "[basefield]") {
  RatFunc t = var_t(2), one = cst(2, 1), zero = RatFunc::zero(2, 1);
  REQUIRE(up::formal_derivative(upoly({t, zero, one})).is_zero());  // d/dx (x^2+t)
  REQUIRE(up::formal_derivative(upoly({t})).is_zero());
}

TEST_CASE("separable presentation", "[basefield]") {
  RatFunc t = var_t(2), one = cst(2, 1), zero = RatFunc::zero(2, 1);

  auto [s1, n1] = up::separable_presentation(upoly({t, zero, one}));  // x^2+t
  REQUIRE(n1 == 1);
  REQUIRE(pf::equal(s1, upoly({t, one})));  // x + t

  auto [s2, n2] = up::separable_presentation(upoly({t, one, zero, one}));
  REQUIRE(n2 == 0);
  REQUIRE(pf::equal(s2, upoly({t, one, zero, one})));

  RatFunc t2 = t * t;
  UniPoly f3 = upoly({t2, zero, zero, zero, one});  // x^4 + t^2
  auto [s3, n3] = up::separable_presentation(f3);
  REQUIRE(n3 == 2);
  REQUIRE(pf::equal(s3, upoly({t2, one})));  // x + t^2

  // reconstruction property on a mixed example: x^4 + t^2 x^2 + t
  UniPoly f4 = upoly({t, zero, t2, zero, one});
  auto [s4, n4] = up::separable_presentation(f4);
  REQUIRE(n4 == 1);
  REQUIRE_FALSE(up::formal_derivative(s4).is_zero());
  uint64_t q = 1;
  for (uint32_t i = 0; i < n4; ++i) q *= 2;
  REQUIRE(pf::equal(pf::compose(s4, pf::monomial(one, size_t(q))), f4));
  REQUIRE(size_t(f4.deg()) == q * size_t(s4.deg()));
}

TEST_CASE("euclidean structure of univariate polynomials", "[basefield]") {
  std::mt19937_64 rng(99);
  for (uint32_t p : {2u, 5u}) {
    for (int iter = 0; iter < 20; ++iter) {
      UniPoly a, b;
      int da = int(rng() % 5), db = int(rng() % 4);
      for (int i = 0; i <= da; ++i) a.c.push_back(rand_rf(rng, p, 1, 2));
      for (int i = 0; i <= db; ++i) b.c.push_back(rand_rf(rng, p, 1, 2));
      a = pf::trim(a);
      b = pf::trim(b);
      if (b.is_zero()) continue;
      auto [q, r] = pf::divmod(a, b);
      REQUIRE(pf::equal(pf::add(pf::mul(q, b), r), a));
      REQUIRE((r.is_zero() || r.deg() < b.deg()));
      if (a.is_zero()) continue;
      auto eg = pf::extended_gcd(a, b);
      REQUIRE(pf::equal(pf::add(pf::mul(eg.u, a), pf::mul(eg.v, b)), eg.g));
      REQUIRE(pf::divmod(a, eg.g).second.is_zero());
      REQUIRE(pf::divmod(b, eg.g).second.is_zero());
    }
  }
}
