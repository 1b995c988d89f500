#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "helpers.hpp"
#include "qselberg/gauss.hpp"

using namespace qselberg;
using testutil::relerr;

using C = Cplx<double>;
using M = CMatrix<double>;
using V = CVector<double>;

static double rel_mat(const M& a, const M& b) {
  const double scale = std::max(a.cwiseAbs().maxCoeff(), b.cwiseAbs().maxCoeff());
  if (scale == 0.0) return 0.0;
  return (a - b).cwiseAbs().maxCoeff() / scale;
}

static double dev_from_identity(const M& m) {
  return (m - M::Identity(m.rows(), m.cols())).cwiseAbs().maxCoeff();
}

TEST_CASE("R: LDU = UDL = direct transition matrix") {
  std::mt19937_64 rng(21);
  for (int n = 1; n <= 5; ++n)
    for (int rep = 0; rep < 3; ++rep) {
      const auto p = testutil::sample_params(rng, n);
      const M ldu = build_R_factors(p, FactorOrder::LDU).product();
      const M udl = build_R_factors(p, FactorOrder::UDL).product();
      const M direct = build_R_direct(p);
      CHECK(rel_mat(ldu, udl) < 1e-10);
      CHECK(rel_mat(ldu, direct) < 1e-9);
    }
}

TEST_CASE("R: pointwise transition identity at random z") {
  std::mt19937_64 rng(22);
  const int n = 3;
  const auto p = testutil::sample_params(rng, n);
  const M R = build_R_factors(p, FactorOrder::LDU).product();
  for (int rep = 0; rep < 20; ++rep) {
    const V z = testutil::random_point(rng, n);
    for (int j = 0; j <= n; ++j) {
      C rhs(0);
      for (int i = 0; i <= n; ++i)
        rhs += matsuo_e(p.a1, p.b2, p.t, i, z) * R(i, j);
      CHECK(relerr(matsuo_e(p.a2, p.b1, p.t, n - j, z), rhs) < 1e-9);
    }
  }
}

TEST_CASE("R inverse: closed form annihilates R from both sides") {
  std::mt19937_64 rng(23);
  for (int n = 1; n <= 4; ++n) {
    const auto p = testutil::sample_params(rng, n);
    const M R = build_R_factors(p, FactorOrder::LDU).product();
    const M rin_udl = build_R_inverse(p, FactorOrder::UDL).product();
    const M rin_ldu = build_R_inverse(p, FactorOrder::LDU).product();
    CHECK(dev_from_identity(R * rin_udl) < 1e-9 * R.cwiseAbs().maxCoeff());
    CHECK(dev_from_identity(rin_udl * R) < 1e-9 * R.cwiseAbs().maxCoeff());
    CHECK(rel_mat(rin_udl, rin_ldu) < 1e-10);
  }
}

TEST_CASE("determinant closed forms vs elimination") {
  std::mt19937_64 rng(24);
  for (int n = 1; n <= 4; ++n) {
    const auto p = testutil::sample_params(rng, n);
    const M R = build_R_factors(p, FactorOrder::LDU).product();
    const M K1 = build_K(p, 1);
    const M K2 = build_K(p, 2);
    const M A = build_A_factors(p, FactorOrder::LDU).product();
    CHECK(relerr(R.determinant(), det_R(p)) < 1e-9);
    CHECK(relerr(K1.determinant(), det_K1(p)) < 1e-9);
    CHECK(relerr(K2.determinant(), det_K2(p)) < 1e-9);
    CHECK(relerr(A.determinant(), det_A(p)) < 1e-9);
  }
}

TEST_CASE("A: LDU = UDL, tilde products and entry normalizations") {
  std::mt19937_64 rng(25);
  for (int n = 1; n <= 4; ++n) {
    const auto p = testutil::sample_params(rng, n);
    const auto ldu = build_A_factors(p, FactorOrder::LDU);
    const auto udl = build_A_factors(p, FactorOrder::UDL);
    const M A = ldu.product();
    CHECK(rel_mat(A, udl.product()) < 1e-10);

    const M Lt = build_intermediate(p, Intermediate::LtildeA);
    const M Ut = build_intermediate(p, Intermediate::UtildeA);
    CHECK(rel_mat(A, Lt * Ut) < 1e-10);
    const M Utp = build_intermediate(p, Intermediate::UtildePrimeA);
    const M Ltp = build_intermediate(p, Intermediate::LtildePrimeA);
    CHECK(rel_mat(A, Utp * Ltp) < 1e-10);

    for (int j = 0; j <= n; ++j) {
      CHECK(relerr(ldu.diag(j, j), Lt(j, j) * Ut(j, j)) < 1e-11);
      CHECK(relerr(udl.diag(j, j), Utp(j, j) * Ltp(j, j)) < 1e-11);
      for (int i = j; i <= n; ++i) {
        CHECK(relerr(ldu.lower(i, j), Lt(i, j) / Lt(j, j)) < 1e-11);
        CHECK(relerr(udl.lower(i, j), Ltp(i, j) / Ltp(i, i)) < 1e-11);
      }
      for (int i = 0; i <= j; ++i) {
        CHECK(relerr(ldu.upper(i, j), Ut(i, j) / Ut(i, i)) < 1e-11);
        CHECK(relerr(udl.upper(i, j), Utp(i, j) / Utp(j, j)) < 1e-11);
      }
    }
  }
}

TEST_CASE("A: inverse factors of the unit triangles") {
  std::mt19937_64 rng(26);
  for (int n = 1; n <= 4; ++n) {
    const auto p = testutil::sample_params(rng, n);
    const auto ldu = build_A_factors(p, FactorOrder::LDU);
    const auto udl = build_A_factors(p, FactorOrder::UDL);
    const M uain = build_intermediate(p, Intermediate::UAInverse);
    const M lpin = build_intermediate(p, Intermediate::LprimeAInverse);
    const double su = ldu.upper.cwiseAbs().maxCoeff();
    const double sl = udl.lower.cwiseAbs().maxCoeff();
    CHECK(dev_from_identity(ldu.upper * uain) < 1e-10 * std::max(1.0, su));
    CHECK(dev_from_identity(udl.lower * lpin) < 1e-10 * std::max(1.0, sl));
  }
}

TEST_CASE("R: tilde products, entry normalizations, Lagrange-basis pointwise") {
  std::mt19937_64 rng(27);
  for (int n = 1; n <= 4; ++n) {
    const auto p = testutil::sample_params(rng, n);
    const auto ldu = build_R_factors(p, FactorOrder::LDU);
    const auto udl = build_R_factors(p, FactorOrder::UDL);
    const M R = ldu.product();
    const M Lt = build_intermediate(p, Intermediate::LtildeR);
    const M Ut = build_intermediate(p, Intermediate::UtildeR);
    const M Utp = build_intermediate(p, Intermediate::UtildePrimeR);
    const M Ltp = build_intermediate(p, Intermediate::LtildePrimeR);
    CHECK(rel_mat(R, Lt * Ut) < 1e-10);
    CHECK(rel_mat(R, Utp * Ltp) < 1e-10);

    for (int j = 0; j <= n; ++j) {
      CHECK(relerr(ldu.diag(j, j), Lt(j, j) * Ut(j, j)) < 1e-11);
      CHECK(relerr(udl.diag(j, j), Utp(j, j) * Ltp(j, j)) < 1e-11);
      for (int i = j; i <= n; ++i) {
        CHECK(relerr(ldu.lower(i, j), Lt(i, j) / Lt(j, j)) < 1e-11);
        CHECK(relerr(udl.lower(i, j), Ltp(i, j) / Ltp(i, i)) < 1e-11);
      }
      for (int i = 0; i <= j; ++i) {
        CHECK(relerr(ldu.upper(i, j), Ut(i, j) / Ut(i, i)) < 1e-11);
        CHECK(relerr(udl.upper(i, j), Utp(i, j) / Utp(j, j)) < 1e-11);
      }
    }

    // pointwise transitions through the Lagrange bases
    const C tinv = C(1) / p.t;
    for (int rep = 0; rep < 3; ++rep) {
      const V z = testutil::random_point(rng, n);
      for (int j = 0; j <= n; ++j) {
        C acc(0);
        for (int i = 0; i <= n; ++i)
          acc += matsuo_e(p.a1, p.b2, p.t, i, z) * Lt(i, j);
        CHECK(relerr(lagrange_f(p.a1, p.a2, p.t, n - j, z), acc) < 1e-9);

        acc = C(0);
        for (int i = 0; i <= n; ++i)
          acc += lagrange_f(p.a1, p.a2, p.t, n - i, z) * Ut(i, j);
        CHECK(relerr(matsuo_e(p.a2, p.b1, p.t, n - j, z), acc) < 1e-9);

        acc = C(0);
        for (int i = 0; i <= n; ++i)
          acc += matsuo_e(p.a1, p.b2, p.t, i, z) * Utp(i, j);
        CHECK(relerr(lagrange_f(C(1) / p.b1, C(1) / p.b2, tinv, n - j, z), acc)
              < 1e-9);

        acc = C(0);
        for (int i = 0; i <= n; ++i)
          acc += lagrange_f(C(1) / p.b1, C(1) / p.b2, tinv, n - i, z) *
                 Ltp(i, j);
        CHECK(relerr(matsuo_e(p.a2, p.b1, p.t, n - j, z), acc) < 1e-9);
      }
    }
  }
}

TEST_CASE("diagonal gauge matrices multiply to a scalar") {
  std::mt19937_64 rng(28);
  const auto p = testutil::sample_params(rng, 3);
  const C w = p.qalpha * ipow(p.t, p.n - 1);
  for (int i = 0; i <= p.n; ++i)
    CHECK(relerr(ipow(w, p.n - i) * ipow(w, i), ipow(w, p.n)) < 1e-13);
}

TEST_CASE("coefficient families: l = 0 and l = 1 against the three-term forms") {
  std::mt19937_64 rng(29);
  for (int n : {2, 3, 4}) {
    const auto p = testutil::sample_params(rng, n);
    for (int k = 0; k <= n; ++k)
      for (int i = 0; i <= n; ++i) {
        CHECK(relerr(coeff_L(p, k, i, 0, 0), C(1)) < 1e-13);
        CHECK(relerr(coeff_U(p, k, i, 0, 0), C(1)) < 1e-13);
        CHECK(relerr(coeff_V(p, k, i, 0, 0), C(1)) < 1e-13);
        CHECK(relerr(coeff_Uprime_app(p, k, i, 0, 0), C(1)) < 1e-13);
        CHECK(relerr(coeff_Lprime_app(p, k, i, 0, 0), C(1)) < 1e-13);
      }

    for (int k = 1; k <= n; ++k)
      for (int i = 0; i <= n; ++i) {
        if (i + k <= n) {
          const auto c = lemma53_c(p, k, i);
          CHECK(relerr(coeff_L(p, k, i, 1, 0), -c[1] / c[0]) < 1e-11);
          CHECK(relerr(coeff_L(p, k, i, 1, 1), -c[2] / c[0]) < 1e-11);
        }
        if (i >= 1 && k + i - 1 >= n) {
          const auto d = lemma53_d(p, k, i - 1);
          CHECK(relerr(coeff_U(p, k, i, 1, 1), -d[0] / d[1]) < 1e-11);
          CHECK(relerr(coeff_U(p, k, i, 1, 0), -d[2] / d[1]) < 1e-11);
        }
        if (k <= i) {
          const auto c = appendix_c(p, k, i);
          CHECK(relerr(coeff_Uprime_app(p, k, i, 1, 0), -c[1] / c[0]) < 1e-11);
          CHECK(relerr(coeff_Uprime_app(p, k, i, 1, 1), -c[2] / c[0]) < 1e-11);
        }
        if (i + 1 <= n && k >= i + 1) {
          const auto d = appendix_d(p, k, i + 1);
          CHECK(relerr(coeff_Lprime_app(p, k, i, 1, 1), -d[0] / d[1]) < 1e-11);
          CHECK(relerr(coeff_Lprime_app(p, k, i, 1, 0), -d[2] / d[1]) < 1e-11);
        }
      }

    // V against the (4.2)-form solved upward in k
    for (int k = 0; k < n; ++k)
      for (int i = 1; i <= n; ++i) {
        if (k + i < n) continue;
        const auto d = lemma53_d(p, k + 1, i - 1);
        CHECK(relerr(coeff_V(p, k, i, 1, 1), -d[0] / d[2]) < 1e-11);
        CHECK(relerr(coeff_V(p, k, i, 1, 0), -d[1] / d[2]) < 1e-11);
      }
  }
}

TEST_CASE("coefficient families: iteration composes") {
  std::mt19937_64 rng(30);
  const int n = 4;
  const auto p = testutil::sample_params(rng, n);
  // L: expanding (k,i) two levels must match the direct two-level coefficients
  for (int k = 2; k <= n; ++k)
    for (int i = 0; i + k <= n; ++i)
      for (int l1 = 1; l1 < k; ++l1)
        for (int jj = 0; jj <= l1 + 1 && i + jj <= n; ++jj) {
          C acc(0);
          for (int j1 = std::max(0, jj - 1); j1 <= std::min(l1, jj); ++j1)
            acc += coeff_L(p, k, i, l1, j1) *
                   coeff_L(p, k - l1, i + j1, 1, jj - j1);
          CHECK(relerr(acc, coeff_L(p, k, i, l1 + 1, jj)) < 1e-10);
        }
  // V likewise, within the validity wedge of (4.2)
  for (int k = 0; k + 2 <= n; ++k)
    for (int i = 2; i <= n; ++i) {
      if (k + i < n + 1) continue;
      for (int jj = 0; jj <= 2; ++jj) {
        C acc(0);
        for (int j1 = std::max(0, jj - 1); j1 <= std::min(1, jj); ++j1)
          acc += coeff_V(p, k, i, 1, j1) *
                 coeff_V(p, k + 1, i - j1, 1, jj - j1);
        CHECK(relerr(acc, coeff_V(p, k, i, 2, jj)) < 1e-10);
      }
    }
}

TEST_CASE("coefficient families: full iteration reproduces the tilde matrices") {
  std::mt19937_64 rng(31);
  for (int n : {2, 3, 4}) {
    const auto p = testutil::sample_params(rng, n);
    const M Lt = build_intermediate(p, Intermediate::LtildeA);
    const M Ut = build_intermediate(p, Intermediate::UtildeA);
    const M Utp = build_intermediate(p, Intermediate::UtildePrimeA);
    const M Ltp = build_intermediate(p, Intermediate::LtildePrimeA);
    const M UAin = build_intermediate(p, Intermediate::UAInverse);
    for (int j = 0; j <= n; ++j) {
      for (int i = j; i <= n; ++i) {
        CHECK(relerr(Lt(i, j), coeff_L(p, n - j, j, n - j, i - j)) < 1e-10);
        CHECK(relerr(Ltp(i, j), coeff_Lprime_app(p, n, j, n - j, i - j))
              < 1e-10);
      }
      for (int i = 0; i <= j; ++i) {
        CHECK(relerr(Ut(i, j), coeff_U(p, n, j, j, j - i)) < 1e-10);
        CHECK(relerr(Utp(i, j), coeff_Uprime_app(p, j, j, j, j - i)) < 1e-10);
      }
    }
    // U_A^{-1} = Utilde^{-1} D_{Utilde}, with vtilde from the V family
    for (int j = 0; j <= n; ++j)
      for (int i = 0; i <= j; ++i)
        CHECK(relerr(UAin(i, j), coeff_V(p, n - j, j, j, j - i) * Ut(j, j))
              < 1e-10);
  }
}
