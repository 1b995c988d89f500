#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "helpers.hpp"
#include "qselberg/qcore.hpp"

using namespace qselberg;
using testutil::relerr;

using C = Cplx<double>;

TEST_CASE("shifted_factorial basic values") {
  const C x(0.7, 0.0), c(0.3, 0.0);
  CHECK(shifted_factorial(x, c, 0) == C(1));
  CHECK(relerr(shifted_factorial(x, c, 1), C(0.3)) < 1e-15);
  // literal three-factor product: (1-0.7)(1-0.3*0.7)(1-0.09*0.7)
  const C oracle = (C(1) - x) * (C(1) - c * x) * (C(1) - c * c * x);
  CHECK(relerr(shifted_factorial(x, c, 3), oracle) < 1e-15);
}

TEST_CASE("shifted_factorial negative index reciprocal") {
  const C x(0.4, 0.2), c(0.6, -0.1);
  const C v = shifted_factorial(x, c, -1);
  CHECK(relerr(v * (C(1) - x / c), C(1)) < 1e-14);
}

TEST_CASE("shifted_factorial splitting identity") {
  std::mt19937_64 rng(11);
  for (int it = 0; it < 50; ++it) {
    const C x = testutil::rand_on_annulus(rng, 0.2, 2.0);
    const C c = testutil::rand_on_annulus(rng, 0.2, 0.9);
    for (const auto [i, j] : {std::pair{3LL, 4LL}, {2LL, -3LL}, {-2LL, 5LL},
                              {-1LL, -2LL}, {0LL, 6LL}}) {
      const C lhs = shifted_factorial(x, c, i + j);
      const C rhs = shifted_factorial(x, c, i) *
                    shifted_factorial(ipow(c, i) * x, c, j);
      CHECK(relerr(lhs, rhs) < 1e-12);
    }
  }
}

TEST_CASE("qbinom values and conventions") {
  const C c(0.4, 0.0);
  CHECK(qbinom(5, 0, c) == C(1));
  CHECK(qbinom(5, -1, c) == C(0));
  CHECK(qbinom(3, 4, c) == C(0));
  // (c;c)_3/((c;c)_2 (c;c)_1) = 1 + c + c^2 = 1.56
  CHECK(relerr(qbinom(3, 1, c), C(1.56)) < 1e-14);
}

TEST_CASE("qbinom symmetry and q-Pascal recurrence") {
  std::mt19937_64 rng(12);
  for (int it = 0; it < 30; ++it) {
    const C c = testutil::rand_on_annulus(rng, 0.2, 0.9);
    for (int i = 1; i <= 7; ++i)
      for (int j = 0; j <= i; ++j) {
        CHECK(relerr(qbinom(i, j, c), qbinom(i, i - j, c)) < 1e-12);
        const C rhs = qbinom(i - 1, j - 1, c) + ipow(c, j) * qbinom(i - 1, j, c);
        CHECK(relerr(qbinom(i, j, c), rhs) < 1e-12);
      }
  }
}

TEST_CASE("infinite_product") {
  CHECK(infinite_product(C(0), C(0.5), 1e-14) == C(1));

  // against a fixed 60-term truncation
  const C x(0.5, 0.0), c(0.5, 0.0);
  C direct(1);
  C ck(1);
  for (int k = 0; k < 60; ++k) {
    direct *= C(1) - ck * x;
    ck *= c;
  }
  CHECK(relerr(infinite_product(x, c, 1e-16), direct) < 1e-14);

  // functional equation (x;c)_inf = (1-x)(cx;c)_inf
  std::mt19937_64 rng(13);
  for (int it = 0; it < 20; ++it) {
    const C xx = testutil::rand_on_annulus(rng, 0.2, 2.0);
    const C cc = testutil::rand_on_annulus(rng, 0.2, 0.9);
    const C lhs = infinite_product(xx, cc, 1e-15);
    const C rhs = (C(1) - xx) * infinite_product(cc * xx, cc, 1e-15);
    CHECK(relerr(lhs, rhs) < 1e-12);
    // tolerance stability
    CHECK(relerr(infinite_product(xx, cc, 1e-12),
                 infinite_product(xx, cc, 1e-16)) < 1e-11);
  }
  CHECK_THROWS_AS(infinite_product(C(0.5), C(1.2), 1e-12), NonConvergent);
}

TEST_CASE("ipow negative exponents") {
  const C x(0.5, 0.25);
  CHECK(relerr(ipow(x, -3) * ipow(x, 3), C(1)) < 1e-14);
  CHECK(ipow(x, 0) == C(1));
}

TEST_CASE("binom helpers") {
  CHECK(binom2(0) == 0);
  CHECK(binom2(5) == 10);
  CHECK(binom2(-2) == 3);  // polynomial continuation m(m-1)/2
  CHECK(binom3(4) == 4);
  CHECK(binom(5, 2) == doctest::Approx(10.0));
  CHECK(binom(3, 5) == 0.0);
}

TEST_CASE("Params shifts and validation") {
  Params<double> p;
  p.q = C(0.3);
  p.t = C(0.7, 0.1);
  p.qalpha = C(0.5, 0.2);
  p.a1 = C(1.1);
  p.a2 = C(0.9, 0.3);
  p.b1 = C(1.4, -0.2);
  p.b2 = C(0.8);
  p.n = 2;
  CHECK_NOTHROW(p.validate());

  const auto pa = p.shifted_alpha();
  CHECK(relerr(pa.qalpha, p.q * p.qalpha) < 1e-15);

  const auto p1 = p.shifted_ab(1);
  CHECK(relerr(p1.a1, p.q * p.a1) < 1e-15);
  CHECK(relerr(p1.b1, p.b1 / p.q) < 1e-15);
  CHECK(relerr(p1.a2, p.a2) == 0.0);
  CHECK(relerr(p1.a1 * p1.b1, p.a1 * p.b1) < 1e-15);  // product invariant

  const auto ps = p.swapped_pairs();
  CHECK(ps.a1 == p.a2);
  CHECK(ps.b2 == p.b1);

  Params<double> bad = p;
  bad.q = C(1.5);
  CHECK_THROWS_AS(bad.validate(), NonGeneric);
  bad = p;
  bad.a1 = C(0);
  CHECK_THROWS_AS(bad.validate(), NonGeneric);
}

TEST_CASE("genericity verdicts") {
  std::mt19937_64 rng(14);
  // random generic draws pass
  for (int it = 0; it < 5; ++it)
    CHECK(check_generic(testutil::sample_params(rng, 3)).pass);

  // a1 = a2 trips the (a2/a1 t^{...}; t) denominators of R
  Params<double> p = testutil::sample_params(rng, 2);
  p.a2 = p.a1;
  const auto v = check_generic(p);
  CHECK_FALSE(v.pass);
  CHECK(v.worst_factor.find("a2/a1") != std::string::npos);

  // qalpha = t^{k-n} trips a (q^alpha; t)-type denominator
  Params<double> p2 = testutil::sample_params(rng, 3);
  p2.qalpha = ipow(p2.t, 1 - p2.n);
  CHECK_FALSE(check_generic(p2).pass);
}
