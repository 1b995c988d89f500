#pragma once

// Classical (differential) counterpart: the alpha-shift matrix M of the
// Selberg-type integral with kernel
//   Psi(z) = prod z_i^{alpha-1} (1-z_i)^{beta-1} (x-z_i)^{gamma-1}
//            prod_{j<k} |z_j - z_k|^{2 tau},
// its two Gauss decompositions, the n = 1 specializations, and the Gauss
// hypergeometric series together with the contiguous relations the n = 1
// system reduces to.

#include <cmath>

#include <Eigen/Dense>

#include "qselberg/qcore.hpp"

namespace qselberg {

template <typename Real>
using RMatrix = Eigen::Matrix<Real, Eigen::Dynamic, Eigen::Dynamic>;

template <typename Real>
struct ClassicalParams {
  Real x, alpha, beta, gamma, tau;
  int n = 1;
};

// Rising factorial with step tau: (x; tau)_i = x (x+tau) ... (x+(i-1)tau).
template <typename Real>
Real rising(Real x, Real tau, int i) {
  Real r(1);
  for (int k = 0; k < i; ++k) r *= x + Real(k) * tau;
  return r;
}

template <typename Real>
Real rising_den(Real x, Real tau, int i, GenericityTracker* trk,
                const char* lbl) {
  Real r(1);
  for (int k = 0; k < i; ++k) {
    const Real f = x + Real(k) * tau;
    if (trk) {
      const Cplx<double> fc(double(f), 0), tc(double(Real(k) * tau - x), 0);
      trk->note(fc, tc, lbl);
    }
    r *= f;
  }
  return r;
}

template <typename Real>
struct ClassicalFactorization {
  bool ldu = true;
  RMatrix<Real> lower, diag, upper;
  RMatrix<Real> product() const {
    return ldu ? RMatrix<Real>(lower * diag * upper)
               : RMatrix<Real>(upper * diag * lower);
  }
};

template <typename Real>
ClassicalFactorization<Real> build_classical_M(const ClassicalParams<Real>& p,
                                               bool ldu,
                                               GenericityTracker* trk = nullptr) {
  const int n = p.n;
  const Real x = p.x, al = p.alpha, be = p.beta, ga = p.gamma, ta = p.tau;
  ClassicalFactorization<Real> f;
  f.ldu = ldu;
  f.lower = RMatrix<Real>::Zero(n + 1, n + 1);
  f.diag = RMatrix<Real>::Zero(n + 1, n + 1);
  f.upper = RMatrix<Real>::Zero(n + 1, n + 1);
  const auto sgn = [](int m) { return (m % 2 == 0) ? Real(1) : Real(-1); };
  if (ldu) {
    for (int j = 0; j <= n; ++j) {
      for (int i = j; i <= n; ++i)
        f.lower(i, j) = std::pow(-x, Real(i - j)) * Real(binom(n - j, n - i)) *
                        rising(ga + Real(j) * ta, ta, i - j) /
                        rising_den(al + ga + Real(2 * j) * ta, ta, i - j, trk,
                                   "M:L alpha+gamma+2j tau");
      f.diag(j, j) =
          std::pow(x, Real(j)) * rising(al, ta, j) *
          rising(al + ga + Real(2 * j) * ta, ta, n - j) /
          (rising_den(al + ga + Real(j - 1) * ta, ta, j, trk,
                      "M:D alpha+gamma+(j-1)tau") *
           rising_den(al + be + ga + Real(n + j - 1) * ta, ta, n - j, trk,
                      "M:D alpha+beta+gamma+(n+j-1)tau"));
      for (int i = 0; i <= j; ++i)
        f.upper(i, j) = sgn(j - i) * Real(binom(j, i)) *
                        rising(be + Real(n - j) * ta, ta, j - i) /
                        rising_den(al + ga + Real(2 * i) * ta, ta, j - i, trk,
                                   "M:U alpha+gamma+2i tau");
    }
  } else {
    for (int j = 0; j <= n; ++j) {
      for (int i = 0; i <= j; ++i)
        f.upper(i, j) = std::pow(-Real(1) / x, Real(j - i)) *
                        Real(binom(j, i)) *
                        rising(be + Real(n - j) * ta, ta, j - i) /
                        rising_den(al + be + Real(2 * (n - j)) * ta, ta, j - i,
                                   trk, "M:U' alpha+beta+2(n-j)tau");
      f.diag(j, j) =
          std::pow(x, Real(j)) *
          rising(al + be + Real(2 * (n - j)) * ta, ta, j) *
          rising(al, ta, n - j) /
          (rising_den(al + be + ga + Real(2 * n - j - 1) * ta, ta, j, trk,
                      "M:D' alpha+beta+gamma+(2n-j-1)tau") *
           rising_den(al + be + Real(n - j - 1) * ta, ta, n - j, trk,
                      "M:D' alpha+beta+(n-j-1)tau"));
      for (int i = j; i <= n; ++i)
        f.lower(i, j) = sgn(i - j) * Real(binom(n - j, n - i)) *
                        rising(ga + Real(j) * ta, ta, i - j) /
                        rising_den(al + be + Real(2 * (n - i)) * ta, ta, i - j,
                                   trk, "M:L' alpha+beta+2(n-i)tau");
    }
  }
  return f;
}

// n = 1 specializations: M = P Q^{-1} in two ways.
template <typename Real>
RMatrix<Real> classical_M_n1(const ClassicalParams<Real>& p, int form) {
  const Real x = p.x, al = p.alpha, be = p.beta, ga = p.gamma;
  RMatrix<Real> P(2, 2), Q(2, 2);
  if (form == 0) {
    P << al + ga, Real(0), -x * ga, x * al;
    Q << al + be + ga, be, Real(0), al + ga;
  } else {
    P << al, -be, Real(0), x * (al + be);
    Q << al + be, Real(0), ga, al + be + ga;
  }
  return P * Q.inverse();
}

// ---------------------------------------------------------------------------
// Gauss hypergeometric series, |x| < 1.

inline constexpr double kHypTermTol = 1e-14;

template <typename Real>
Real hyp2f1(Real a, Real b, Real c, Real x) {
  if (!(std::abs(x) < Real(1)))
    throw SeriesDiverged("hyp2f1: series requires |x| < 1");
  Real term(1), sum(1);
  for (int k = 0; k < 100000; ++k) {
    const Real ck = c + Real(k);
    if (ck == Real(0)) throw DivisionByZero("hyp2f1: c is a nonpositive integer");
    term *= (a + Real(k)) * (b + Real(k)) / (ck * Real(k + 1)) * x;
    sum += term;
    if (std::abs(term) < Real(kHypTermTol) * (Real(1) + std::abs(sum)))
      return sum;
  }
  throw NotConverged("hyp2f1: term cap exceeded");
}

template <typename Real>
Real beta_fn(Real a, Real b) {
  if (!(a > Real(0) && b > Real(0)))
    throw Unsupported("beta_fn: requires positive arguments");
  return std::exp(std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b));
}

// Residuals of the contiguous relations; zero for exact arithmetic.
//   (1):  F(a,b;c) - F(a,b+1;c+1) + x a(c-b)/(c(c+1)) F(a+1,b+1;c+2)
//   (2):  F(a,b;c) - F(a+1,b;c+1) + x b(c-a)/(c(c+1)) F(a+1,b+1;c+2)
template <typename Real>
Real contiguous_residual(int which, Real a, Real b, Real c, Real x) {
  const Real f0 = hyp2f1(a, b, c, x);
  const Real f3 = hyp2f1(a + 1, b + 1, c + 2, x);
  if (which == 1)
    return f0 - hyp2f1(a, b + 1, c + 1, x) +
           x * a * (c - b) / (c * (c + 1)) * f3;
  if (which == 2)
    return f0 - hyp2f1(a + 1, b, c + 1, x) +
           x * b * (c - a) / (c * (c + 1)) * f3;
  throw IndexOutOfRange("contiguous_residual: relation index must be 1 or 2");
}

// n = 1 brackets through the Euler-integral-free route.  With the
// substitutions alpha -> a, beta -> c - a, gamma -> -b, x -> 1/X:
//   <e_0>         = X^b     B(a,   c-a  ) F(a,  b  ; c  ; X)
//   <e_1>         = X^{b+1} B(a,   c-a+1) F(a,  b+1; c+1; X)
//   T_alpha <e_0> = X^b     B(a+1, c-a  ) F(a+1,b  ; c+1; X)
//   T_alpha <e_1> = X^{b+1} B(a+1, c-a+1) F(a+1,b+1; c+2; X)
template <typename Real>
Real bracket_e_n1(int i, bool alpha_shifted, Real a, Real b, Real c, Real X) {
  const Real as = alpha_shifted ? a + 1 : a;
  if (i == 0)
    return std::pow(X, b) * beta_fn(as, c - a) * hyp2f1(as, b, c + (as - a), X);
  if (i == 1)
    return std::pow(X, b + 1) * beta_fn(as, c - a + 1) *
           hyp2f1(as, b + 1, c + 1 + (as - a), X);
  throw IndexOutOfRange("bracket_e_n1: i must be 0 or 1");
}

// Residuals of the n = 1 three-term system, evaluated through the brackets:
//   (1): (alpha+beta+gamma) T<e_1> + beta <e_0> - x (alpha+beta) <e_1>
//   (2): gamma T<e_1> + (alpha+beta) T<e_0> - alpha <e_0>
// with alpha = a, beta = c-a, gamma = -b, x = 1/X.
template <typename Real>
Real three_term_residual_n1(int which, Real a, Real b, Real c, Real X) {
  const Real al = a, be = c - a, ga = -b, x = Real(1) / X;
  const Real e0 = bracket_e_n1(0, false, a, b, c, X);
  const Real e1 = bracket_e_n1(1, false, a, b, c, X);
  const Real Te0 = bracket_e_n1(0, true, a, b, c, X);
  const Real Te1 = bracket_e_n1(1, true, a, b, c, X);
  if (which == 1) return (al + be + ga) * Te1 + be * e0 - x * (al + be) * e1;
  if (which == 2) return ga * Te1 + (al + be) * Te0 - al * e0;
  throw IndexOutOfRange("three_term_residual_n1: relation index must be 1 or 2");
}

}  // namespace qselberg
