#pragma once

// Transition matrices between the interpolation bases and their Gauss
// factorizations:
//   R (connection e(a2,b1) <-> e(a1,b2)), its inverse, the two-direction
//   difference-system matrices K_1, K_2, the alpha-shift matrix A, the
//   intermediate triangular transitions through the Lagrange bases, the
//   full coefficient families of the three-term recursions, and the
//   closed-form determinants.
//
// All matrices are (n+1) x (n+1), indices 0..n.  Triangular factors carry
// unit diagonals; the diagonal factor is separate.  Every denominator
// factor is routed through the genericity tracker when one is supplied.

#include <Eigen/Dense>

#include "qselberg/interp.hpp"
#include "qselberg/qcore.hpp"

namespace qselberg {

template <typename Real>
using CMatrix = Eigen::Matrix<Cplx<Real>, Eigen::Dynamic, Eigen::Dynamic>;

enum class FactorOrder { LDU, UDL };

template <typename Real>
struct GaussFactorization {
  FactorOrder order = FactorOrder::LDU;
  CMatrix<Real> lower, diag, upper;
  CMatrix<Real> product() const {
    return order == FactorOrder::LDU ? CMatrix<Real>(lower * diag * upper)
                                     : CMatrix<Real>(upper * diag * lower);
  }
};

namespace detail {
template <typename Real>
Real msign(long long m) { return (m % 2 == 0) ? Real(1) : Real(-1); }
}  // namespace detail

// ---------------------------------------------------------------------------
// R = transition matrix of (e_n(a2,b1), ..., e_0(a2,b1)) over the basis
// (e_0(a1,b2), ..., e_n(a1,b2)).

template <typename Real>
GaussFactorization<Real> build_R_factors(const Params<Real>& p,
                                         FactorOrder order,
                                         GenericityTracker* trk = nullptr) {
  const int n = p.n;
  const Cplx<Real> one(1), t = p.t, tinv = one / t;
  const auto sf = [&](const Cplx<Real>& x, long long m) {
    return shifted_factorial(x, t, m);
  };
  const auto sfd = [&](const Cplx<Real>& x, long long m, const char* lbl) {
    return sf_den(x, t, m, trk, lbl);
  };
  GaussFactorization<Real> f;
  f.order = order;
  f.lower = CMatrix<Real>::Zero(n + 1, n + 1);
  f.diag = CMatrix<Real>::Zero(n + 1, n + 1);
  f.upper = CMatrix<Real>::Zero(n + 1, n + 1);
  if (order == FactorOrder::LDU) {
    for (int j = 0; j <= n; ++j) {
      for (int i = j; i <= n; ++i)
        f.lower(i, j) =
            qbinom(n - j, n - i, tinv) * detail::msign<Real>(i - j) *
            ipow(t, -binom2(i - j)) * sf(p.a2 * p.b2 * ipow(t, j), i - j) /
            sfd(p.a2 / p.a1 * ipow(t, -(n - 2 * j - 1)), i - j,
                "R:L a2/a1 t^{-(n-2j-1)}");
      f.diag(j, j) = sf(p.a1 / p.a2 * ipow(t, -j), n - j) *
                     sf(p.a2 * p.b1, j) /
                     (sfd(p.a1 * p.b2, n - j, "R:D a1 b2") *
                      sfd(p.a2 / p.a1 * ipow(t, -(n - j)), j,
                          "R:D a2/a1 t^{-(n-j)}"));
      for (int i = 0; i <= j; ++i)
        f.upper(i, j) = qbinom(j, i, tinv) *
                        sf(p.a1 * p.b1 * ipow(t, n - j), j - i) /
                        sfd(p.a1 / p.a2 * ipow(t, n - i - j), j - i,
                            "R:U a1/a2 t^{n-i-j}");
    }
  } else {
    for (int j = 0; j <= n; ++j) {
      for (int i = 0; i <= j; ++i)
        f.upper(i, j) =
            qbinom(j, i, t) * detail::msign<Real>(j - i) *
            ipow(t, binom2(j - i)) *
            sf(one / (p.a1 * p.b1) * ipow(t, -(n - i - 1)), j - i) /
            sfd(p.b2 / p.b1 * ipow(t, i + j - n), j - i,
                "R:U' b2/b1 t^{i+j-n}");
      f.diag(j, j) =
          sf(p.b1 / p.b2 * ipow(t, n - 2 * j + 1), j) *
          sf(one / (p.a2 * p.b1) * ipow(t, -(n - j - 1)), n - j) /
          (sfd(one / (p.a1 * p.b2) * ipow(t, -(j - 1)), j,
               "R:D' 1/(a1 b2) t^{-(j-1)}") *
           sfd(p.b2 / p.b1 * ipow(t, -(n - 2 * j - 1)), n - j,
               "R:D' b2/b1 t^{-(n-2j-1)}"));
      for (int i = j; i <= n; ++i)
        f.lower(i, j) = qbinom(n - j, n - i, t) *
                        sf(one / (p.a2 * p.b2) * ipow(t, -(i - 1)), i - j) /
                        sfd(p.b1 / p.b2 * ipow(t, n - 2 * i + 1), i - j,
                            "R:L' b1/b2 t^{n-2i+1}");
    }
  }
  return f;
}

// Direct construction from the defining relation: evaluating both sides at
// zeta_j(a1, b2^{-1}) isolates row j, so
//   R(j, col) = e_{n-col}(a2, b1; zeta_j(a1, b2^{-1})) / c_j.
template <typename Real>
CMatrix<Real> build_R_direct(const Params<Real>& p, int cap = kFactorialCap) {
  const int n = p.n;
  CMatrix<Real> R(n + 1, n + 1);
  for (int j = 0; j <= n; ++j) {
    const CVector<Real> z =
        zeta_point(p.a1, Cplx<Real>(1) / p.b2, p.t, j, n);
    const Cplx<Real> cj = prop31_c(p.a1, p.b2, p.t, n, j);
    for (int col = 0; col <= n; ++col)
      R(j, col) = matsuo_e(p.a2, p.b1, p.t, n - col, z, cap) / cj;
  }
  return R;
}

// R^{-1} in closed form (reflection of the factors of R with the parameter
// pairs interchanged): UDL gives (U_R^{-1}, D_R^{-1}, L_R^{-1}), LDU gives
// (L'_R^{-1}, D'_R^{-1}, U'_R^{-1}).
template <typename Real>
GaussFactorization<Real> build_R_inverse(const Params<Real>& p,
                                         FactorOrder order,
                                         GenericityTracker* trk = nullptr) {
  const int n = p.n;
  const Cplx<Real> one(1), t = p.t, tinv = one / t;
  const auto sf = [&](const Cplx<Real>& x, long long m) {
    return shifted_factorial(x, t, m);
  };
  const auto sfd = [&](const Cplx<Real>& x, long long m, const char* lbl) {
    return sf_den(x, t, m, trk, lbl);
  };
  GaussFactorization<Real> f;
  f.order = order;
  f.lower = CMatrix<Real>::Zero(n + 1, n + 1);
  f.diag = CMatrix<Real>::Zero(n + 1, n + 1);
  f.upper = CMatrix<Real>::Zero(n + 1, n + 1);
  if (order == FactorOrder::UDL) {
    for (int j = 0; j <= n; ++j) {
      for (int i = 0; i <= j; ++i)
        f.upper(i, j) = detail::msign<Real>(j - i) *
                        ipow(t, -binom2(j - i)) * qbinom(j, i, tinv) *
                        sf(p.a1 * p.b1 * ipow(t, n - j), j - i) /
                        sfd(p.a1 / p.a2 * ipow(t, n - 2 * j + 1), j - i,
                            "Rinv:U a1/a2 t^{n-2j+1}");
      f.diag(j, j) = sf(p.a2 / p.a1 * ipow(t, -(n - j)), j) *
                     sf(p.a1 * p.b2, n - j) /
                     (sfd(p.a2 * p.b1, j, "Rinv:D a2 b1") *
                      sfd(p.a1 / p.a2 * ipow(t, -j), n - j,
                          "Rinv:D a1/a2 t^{-j}"));
      for (int i = j; i <= n; ++i)
        f.lower(i, j) = qbinom(n - j, n - i, tinv) *
                        sf(p.a2 * p.b2 * ipow(t, j), i - j) /
                        sfd(p.a2 / p.a1 * ipow(t, i + j - n), i - j,
                            "Rinv:L a2/a1 t^{i+j-n}");
    }
  } else {
    for (int j = 0; j <= n; ++j) {
      for (int i = j; i <= n; ++i)
        f.lower(i, j) = detail::msign<Real>(i - j) *
                        ipow(t, binom2(i - j)) * qbinom(n - j, n - i, t) *
                        sf(one / (p.a2 * p.b2) * ipow(t, -(i - 1)), i - j) /
                        sfd(p.b1 / p.b2 * ipow(t, n - i - j), i - j,
                            "Rinv:L' b1/b2 t^{n-i-j}");
      f.diag(j, j) =
          sf(p.b2 / p.b1 * ipow(t, -(n - 2 * j - 1)), n - j) *
          sf(one / (p.a1 * p.b2) * ipow(t, -(j - 1)), j) /
          (sfd(one / (p.a2 * p.b1) * ipow(t, -(n - j - 1)), n - j,
               "Rinv:D' 1/(a2 b1) t^{-(n-j-1)}") *
           sfd(p.b1 / p.b2 * ipow(t, n - 2 * j + 1), j,
               "Rinv:D' b1/b2 t^{n-2j+1}"));
      for (int i = 0; i <= j; ++i)
        f.upper(i, j) = qbinom(j, i, t) *
                        sf(one / (p.a1 * p.b1) * ipow(t, -(n - i - 1)), j - i) /
                        sfd(p.b2 / p.b1 * ipow(t, -(n - 2 * i - 1)), j - i,
                            "Rinv:U' b2/b1 t^{-(n-2i-1)}");
    }
  }
  return f;
}

// ---------------------------------------------------------------------------
// K_1 = R^{-1} D_1 and K_2 = D_2 R|_{a2 -> q a2, b2 -> b2/q}, the matrices
// of the two q-difference systems T_{q,b_r}^{-1} T_{q,a_r} <v> = <v> K_r,
// with D_1 = diag((q^alpha t^{n-1})^{n-i}) and D_2 = diag((...)^i).

template <typename Real>
CMatrix<Real> build_K(const Params<Real>& p, int r,
                      GenericityTracker* trk = nullptr) {
  const int n = p.n;
  const Cplx<Real> w = p.qalpha * ipow(p.t, n - 1);
  CMatrix<Real> D = CMatrix<Real>::Zero(n + 1, n + 1);
  if (r == 1) {
    for (int i = 0; i <= n; ++i) D(i, i) = ipow(w, n - i);
    return build_R_inverse(p, FactorOrder::UDL, trk).product() * D;
  }
  if (r == 2) {
    for (int i = 0; i <= n; ++i) D(i, i) = ipow(w, i);
    return D * build_R_factors(p.shifted_ab(2), FactorOrder::LDU, trk).product();
  }
  throw IndexOutOfRange("build_K: pair index must be 1 or 2");
}

// ---------------------------------------------------------------------------
// A = matrix of the alpha-shift system T_alpha <row> = <row> A over the
// basis (<e_0(a1,b2)>, ..., <e_n(a1,b2)>).

template <typename Real>
GaussFactorization<Real> build_A_factors(const Params<Real>& p,
                                         FactorOrder order,
                                         GenericityTracker* trk = nullptr) {
  const int n = p.n;
  const Cplx<Real> t = p.t, qa = p.qalpha;
  const Cplx<Real> abab = p.a1 * p.a2 * p.b1 * p.b2;
  const auto sf = [&](const Cplx<Real>& x, long long m) {
    return shifted_factorial(x, t, m);
  };
  const auto sfd = [&](const Cplx<Real>& x, long long m, const char* lbl) {
    return sf_den(x, t, m, trk, lbl);
  };
  GaussFactorization<Real> f;
  f.order = order;
  f.lower = CMatrix<Real>::Zero(n + 1, n + 1);
  f.diag = CMatrix<Real>::Zero(n + 1, n + 1);
  f.upper = CMatrix<Real>::Zero(n + 1, n + 1);
  if (order == FactorOrder::LDU) {
    for (int j = 0; j <= n; ++j) {
      for (int i = j; i <= n; ++i)
        f.lower(i, j) = detail::msign<Real>(i - j) *
                        ipow(t, binom2(n - i) - binom2(n - j)) *
                        qbinom(n - j, n - i, t) *
                        sf(p.a2 * p.b2 * ipow(t, j), i - j) /
                        sfd(qa * p.a2 * p.b2 * ipow(t, 2 * j), i - j,
                            "A:L qa a2 b2 t^{2j}");
      f.diag(j, j) = ipow(p.a1, n - j) * ipow(p.a2, j) *
                     ipow(t, binom2(j) + binom2(n - j)) * sf(qa, j) *
                     sf(qa * p.a2 * p.b2 * ipow(t, 2 * j), n - j) /
                     (sfd(qa * p.a2 * p.b2 * ipow(t, j - 1), j,
                          "A:D qa a2 b2 t^{j-1}") *
                      sfd(qa * abab * ipow(t, n + j - 1), n - j,
                          "A:D qa abab t^{n+j-1}"));
      for (int i = 0; i <= j; ++i)
        f.upper(i, j) = ipow(-qa * p.a2 / p.a1, j - i) *
                        ipow(t, binom2(j) - binom2(i)) * qbinom(j, i, t) *
                        sf(p.a1 * p.b1 * ipow(t, n - j), j - i) /
                        sfd(qa * p.a2 * p.b2 * ipow(t, 2 * i), j - i,
                            "A:U qa a2 b2 t^{2i}");
    }
  } else {
    for (int j = 0; j <= n; ++j) {
      for (int i = 0; i <= j; ++i)
        f.upper(i, j) = ipow(-qa, j - i) *
                        ipow(t, binom2(n - i) - binom2(n - j)) *
                        qbinom(j, i, t) *
                        sf(p.a1 * p.b1 * ipow(t, n - j), j - i) /
                        sfd(qa * p.a1 * p.b1 * ipow(t, 2 * (n - j)), j - i,
                            "A:U' qa a1 b1 t^{2(n-j)}");
      f.diag(j, j) = ipow(p.a1, n - j) * ipow(p.a2, j) *
                     ipow(t, binom2(j) + binom2(n - j)) *
                     sf(qa * p.a1 * p.b1 * ipow(t, 2 * (n - j)), j) *
                     sf(qa, n - j) /
                     (sfd(qa * abab * ipow(t, 2 * n - j - 1), j,
                          "A:D' qa abab t^{2n-j-1}") *
                      sfd(qa * p.a1 * p.b1 * ipow(t, n - j - 1), n - j,
                          "A:D' qa a1 b1 t^{n-j-1}"));
      for (int i = j; i <= n; ++i)
        f.lower(i, j) = ipow(-p.a1 / p.a2, i - j) *
                        ipow(t, binom2(j) - binom2(i)) *
                        qbinom(n - j, n - i, t) *
                        sf(p.a2 * p.b2 * ipow(t, j), i - j) /
                        sfd(qa * p.a1 * p.b1 * ipow(t, 2 * (n - i)), i - j,
                            "A:L' qa a1 b1 t^{2(n-i)}");
    }
  }
  return f;
}

// ---------------------------------------------------------------------------
// Coefficient families of the iterated three-term relations; index
// conventions follow the source recursions:
//   L^{k,i}_{k-l, i+j},  U^{k,i}_{k-l+j, i-j},  V^{k,i}_{k+l, i-j}
// and their primed counterparts for the E'-family.

template <typename Real>
Cplx<Real> coeff_L(const Params<Real>& p, int k, int i, int l, int j,
                   GenericityTracker* trk = nullptr) {
  const Cplx<Real> t = p.t, qa = p.qalpha;
  const int n = p.n;
  return qbinom<Real>(l, j, t) * detail::msign<Real>(j) *
         ipow(p.a1 * ipow(t, n - i - k), l) * ipow(t, binom2(l - j)) *
         shifted_factorial(p.a2 * p.b2 * ipow(t, i), t, j) *
         shifted_factorial(qa * p.a2 * p.b2 * ipow(t, n + i + j - k), t, l - j) /
         sf_den(qa * p.a1 * p.a2 * p.b1 * p.b2 * ipow(t, 2 * n - k - 1), t, l,
                trk, "coeffL: qa abab t^{2n-k-1}");
}

template <typename Real>
Cplx<Real> coeff_U(const Params<Real>& p, int k, int i, int l, int j,
                   GenericityTracker* trk = nullptr) {
  const Cplx<Real> t = p.t, qa = p.qalpha;
  const int n = p.n;
  return qbinom<Real>(l, j, t) *
         ipow(-qa / p.a1 * ipow(t, i - l), j) *
         ipow(p.a2 * ipow(t, n - k), l) * ipow(t, binom2(l)) *
         shifted_factorial(p.a1 * p.b1 * ipow(t, n - i), t, j) *
         shifted_factorial(qa * ipow(t, n - k), t, l - j) /
         (sf_den(qa * p.a2 * p.b2 * ipow(t, n + i - k - j - 1), t, l - j, trk,
                 "coeffU: qa a2 b2 t^{n+i-k-j-1}") *
          sf_den(qa * p.a2 * p.b2 * ipow(t, n + i - k - 2 * j + l), t, j, trk,
                 "coeffU: qa a2 b2 t^{n+i-k-2j+l}"));
}

template <typename Real>
Cplx<Real> coeff_V(const Params<Real>& p, int k, int i, int l, int j,
                   GenericityTracker* trk = nullptr) {
  const Cplx<Real> t = p.t, qa = p.qalpha;
  const int n = p.n;
  return qbinom<Real>(l, j, t) *
         ipow(qa / p.a1 * ipow(t, i - 1), j) *
         ipow(t, binom2(l - j) - binom2(j)) *
         shifted_factorial(p.a1 * p.b1 * ipow(t, n - i), t, j) *
         shifted_factorial(qa * p.a2 * p.b2 * ipow(t, n + i - k - l - 1), t,
                           l - j) /
         (ipow(p.a2 * ipow(t, n - k - 1), l - j) *
          sf_den(qa * ipow(t, n - k - l), t, l, trk, "coeffV: qa t^{n-k-l}"));
}

template <typename Real>
Cplx<Real> coeff_Uprime_app(const Params<Real>& p, int k, int i, int l, int j,
                            GenericityTracker* trk = nullptr) {
  const Cplx<Real> t = p.t, qa = p.qalpha;
  const int n = p.n;
  return ipow(-qa * ipow(t, n - k + l - 1), j) *
         ipow(p.a2 * ipow(t, k - l), l) * ipow(t, binom2(l - j)) *
         qbinom<Real>(l, j, t) *
         shifted_factorial(p.a1 * p.b1 * ipow(t, n - i), t, j) *
         shifted_factorial(qa * p.a1 * p.b1 * ipow(t, 2 * n - k - i + j), t,
                           l - j) /
         sf_den(qa * p.a1 * p.a2 * p.b1 * p.b2 * ipow(t, 2 * n - k - 1), t, l,
                trk, "coeffU'app: qa abab t^{2n-k-1}");
}

template <typename Real>
Cplx<Real> coeff_Lprime_app(const Params<Real>& p, int k, int i, int l, int j,
                            GenericityTracker* trk = nullptr) {
  const Cplx<Real> t = p.t, qa = p.qalpha;
  const int n = p.n;
  return qbinom<Real>(l, j, t) *
         ipow(-ipow(t, -(k - 1)) / p.a2, j) *
         ipow(p.a1 * ipow(t, k - i - 1), l) * ipow(t, -binom2(l)) *
         shifted_factorial(qa * ipow(t, n - k), t, l - j) *
         shifted_factorial(p.a2 * p.b2 * ipow(t, i), t, j) /
         (sf_den(qa * p.a1 * p.b1 * ipow(t, 2 * n - k - i - j - 1), t, l - j,
                 trk, "coeffL'app: qa a1 b1 t^{2n-k-i-j-1}") *
          sf_den(qa * p.a1 * p.b1 * ipow(t, 2 * n - k - i - 2 * j + l), t, j,
                 trk, "coeffL'app: qa a1 b1 t^{2n-k-i-2j+l}"));
}

// ---------------------------------------------------------------------------
// Intermediate (non-unit) triangular transitions.

enum class Intermediate {
  LtildeA,        // <E~_{n-j,j}>  = sum_{i>=j} Ltilde(i,j)  <E~_{0,i}>
  UtildeA,        // <E~_{n,j}>    = sum_{i<=j} Utilde(i,j)  <E~_{n-i,i}>
  UAInverse,      // inverse of the unit-upper factor of A (LDU)
  LprimeAInverse, // inverse of the unit-lower factor of A (UDL)
  LtildeR,        // (f-row) = (e(a1,b2)-row) LtildeR
  UtildeR,        // (e(a2,b1)-row) = (f-row) UtildeR
  LtildePrimeR,   // (e(a2,b1)-row) = (f(1/b;1/t)-row) LtildePrimeR
  UtildePrimeR,   // (f(1/b;1/t)-row) = (e(a1,b2)-row) UtildePrimeR
  UtildePrimeA,   // <E'_{j,j}>    = sum_{i<=j} U'(i,j) <E'_{0,i}>
  LtildePrimeA,   // <E'_{n,j}>    = sum_{i>=j} L'(i,j) <E'_{i,i}>
};

template <typename Real>
CMatrix<Real> build_intermediate(const Params<Real>& p, Intermediate which,
                                 GenericityTracker* trk = nullptr) {
  const int n = p.n;
  const Cplx<Real> one(1), t = p.t, tinv = one / t, qa = p.qalpha;
  const Cplx<Real> abab = p.a1 * p.a2 * p.b1 * p.b2;
  const auto sf = [&](const Cplx<Real>& x, long long m) {
    return shifted_factorial(x, t, m);
  };
  const auto sfd = [&](const Cplx<Real>& x, long long m, const char* lbl) {
    return sf_den(x, t, m, trk, lbl);
  };
  CMatrix<Real> M = CMatrix<Real>::Zero(n + 1, n + 1);
  switch (which) {
    case Intermediate::LtildeA:
      for (int j = 0; j <= n; ++j)
        for (int i = j; i <= n; ++i)
          M(i, j) = qbinom(n - j, n - i, t) * detail::msign<Real>(i - j) *
                    ipow(p.a1, n - j) * ipow(t, binom2(n - i)) *
                    sf(p.a2 * p.b2 * ipow(t, j), i - j) *
                    sf(qa * p.a2 * p.b2 * ipow(t, i + j), n - i) /
                    sfd(qa * abab * ipow(t, n + j - 1), n - j,
                        "LtildeA: qa abab t^{n+j-1}");
      return M;
    case Intermediate::UtildeA:
      for (int j = 0; j <= n; ++j)
        for (int i = 0; i <= j; ++i)
          M(i, j) = qbinom(j, i, t) * ipow(-qa / p.a1, j - i) *
                    ipow(p.a2, j) * ipow(t, binom2(j)) * sf(qa, i) *
                    sf(p.a1 * p.b1 * ipow(t, n - j), j - i) /
                    (sfd(qa * p.a2 * p.b2 * ipow(t, i - 1), i,
                         "UtildeA: qa a2 b2 t^{i-1}") *
                     sfd(qa * p.a2 * p.b2 * ipow(t, 2 * i), j - i,
                         "UtildeA: qa a2 b2 t^{2i}"));
      return M;
    case Intermediate::UAInverse:
      for (int j = 0; j <= n; ++j)
        for (int i = 0; i <= j; ++i)
          M(i, j) = ipow(qa * p.a2 / p.a1 * ipow(t, j - 1), j - i) *
                    qbinom(j, i, t) *
                    sf(p.a1 * p.b1 * ipow(t, n - j), j - i) /
                    sfd(qa * p.a2 * p.b2 * ipow(t, j + i - 1), j - i,
                        "UAinv: qa a2 b2 t^{j+i-1}");
      return M;
    case Intermediate::LprimeAInverse:
      for (int j = 0; j <= n; ++j)
        for (int i = j; i <= n; ++i)
          M(i, j) = qbinom(n - j, n - i, t) *
                    ipow(p.a1 / p.a2 * ipow(t, -j), i - j) *
                    sf(p.a2 * p.b2 * ipow(t, j), i - j) /
                    sfd(qa * p.a1 * p.b1 * ipow(t, 2 * n - i - j - 1), i - j,
                        "L'Ainv: qa a1 b1 t^{2n-i-j-1}");
      return M;
    case Intermediate::LtildeR: {
      const Cplx<Real> pref = ipow(one - tinv, n) /
                              shifted_factorial(tinv, tinv, n);
      for (int j = 0; j <= n; ++j)
        for (int i = j; i <= n; ++i)
          M(i, j) = detail::msign<Real>(i - j) * ipow(t, -binom2(i - j)) *
                    sf(p.a2 * p.b2 * ipow(t, j), i - j) * pref /
                    (sfd(p.a2 / p.a1 * ipow(t, -(n - 2 * j - 1)), i - j,
                         "LtildeR: a2/a1 t^{-(n-2j-1)}") *
                     sfd(p.a1 * p.b2, n - j, "LtildeR: a1 b2") *
                     sfd(p.a2 / p.a1 * ipow(t, -(n - j)), j,
                         "LtildeR: a2/a1 t^{-(n-j)}")) *
                    qbinom(n, i, tinv) * qbinom(i, j, tinv);
      return M;
    }
    case Intermediate::UtildeR: {
      const Cplx<Real> pref = shifted_factorial(tinv, tinv, n) /
                              ipow(one - tinv, n);
      for (int j = 0; j <= n; ++j)
        for (int i = 0; i <= j; ++i)
          M(i, j) = sf(p.a1 * p.b1 * ipow(t, n - j), j - i) *
                    sf(p.a1 / p.a2 * ipow(t, -i), n - j) *
                    sf(p.a2 * p.b1, i) * pref * qbinom(j, i, tinv) /
                    qbinom(n, i, tinv);
      return M;
    }
    case Intermediate::LtildePrimeR: {
      const Cplx<Real> pref = shifted_factorial(t, t, n) /
                              (ipow(t, binom2(n)) * ipow(one - t, n));
      for (int j = 0; j <= n; ++j)
        for (int i = j; i <= n; ++i)
          M(i, j) = sf(one / (p.a2 * p.b2) * ipow(t, -(i - 1)), i - j) *
                    sf(one / (p.a2 * p.b1) * ipow(t, -(n - i - 1)), n - i) *
                    sf(p.b1 / p.b2 * ipow(t, n - i - j + 1), j) * pref *
                    qbinom(i, j, t) / qbinom(n, j, t);
      return M;
    }
    case Intermediate::UtildePrimeR: {
      const Cplx<Real> pref = ipow(one - t, n) / shifted_factorial(t, t, n);
      for (int j = 0; j <= n; ++j)
        for (int i = 0; i <= j; ++i)
          M(i, j) = detail::msign<Real>(j - i) *
                    ipow(t, binom2(j - i) + binom2(n)) *
                    sf(one / (p.a1 * p.b1) * ipow(t, -(n - i - 1)), j - i) *
                    pref /
                    (sfd(p.b2 / p.b1 * ipow(t, -(n - i - j)), j - i,
                         "U'R: b2/b1 t^{-(n-i-j)}") *
                     sfd(p.b2 / p.b1 * ipow(t, -(n - 2 * j - 1)), n - j,
                         "U'R: b2/b1 t^{-(n-2j-1)}") *
                     sfd(one / (p.a1 * p.b2) * ipow(t, -(j - 1)), j,
                         "U'R: 1/(a1 b2) t^{-(j-1)}")) *
                    qbinom(n, j, t) * qbinom(j, i, t);
      return M;
    }
    case Intermediate::UtildePrimeA:
      for (int j = 0; j <= n; ++j)
        for (int i = 0; i <= j; ++i)
          M(i, j) = ipow(-qa * ipow(t, n - 1), j - i) * ipow(p.a2, j) *
                    ipow(t, binom2(i)) * qbinom(j, i, t) *
                    sf(p.a1 * p.b1 * ipow(t, n - j), j - i) *
                    sf(qa * p.a1 * p.b1 * ipow(t, 2 * n - i - j), i) /
                    sfd(qa * abab * ipow(t, 2 * n - j - 1), j,
                        "U'A: qa abab t^{2n-j-1}");
      return M;
    case Intermediate::LtildePrimeA:
      for (int j = 0; j <= n; ++j)
        for (int i = j; i <= n; ++i)
          M(i, j) = detail::msign<Real>(i - j) * qbinom(n - j, n - i, t) *
                    ipow(p.a1, n - j) * ipow(p.a2, -(long long)(i - j)) *
                    ipow(t, binom2(n - i) + binom2(j) - binom2(i)) *
                    sf(qa, n - i) * sf(p.a2 * p.b2 * ipow(t, j), i - j) /
                    (sfd(qa * p.a1 * p.b1 * ipow(t, n - i - 1), n - i,
                         "L'A: qa a1 b1 t^{n-i-1}") *
                     sfd(qa * p.a1 * p.b1 * ipow(t, 2 * (n - i)), i - j,
                         "L'A: qa a1 b1 t^{2(n-i)}"));
      return M;
  }
  throw Unsupported("build_intermediate: unknown tag");
}

// ---------------------------------------------------------------------------
// Closed-form determinants.

template <typename Real>
Cplx<Real> det_R(const Params<Real>& p, GenericityTracker* trk = nullptr) {
  const int n = p.n;
  Cplx<Real> r = ipow(-p.a1 / p.a2, binom2(n + 1));
  for (int i = 1; i <= n; ++i)
    r *= shifted_factorial(p.a2 * p.b1, p.t, i) /
         sf_den(p.a1 * p.b2, p.t, i, trk, "detR: a1 b2");
  return r;
}

template <typename Real>
Cplx<Real> det_K1(const Params<Real>& p, GenericityTracker* trk = nullptr) {
  const int n = p.n;
  Cplx<Real> r =
      ipow(-p.a2 / p.a1 * p.qalpha * ipow(p.t, n - 1), binom2(n + 1));
  for (int i = 1; i <= n; ++i)
    r *= shifted_factorial(p.a1 * p.b2, p.t, i) /
         sf_den(p.a2 * p.b1, p.t, i, trk, "detK1: a2 b1");
  return r;
}

template <typename Real>
Cplx<Real> det_K2(const Params<Real>& p, GenericityTracker* trk = nullptr) {
  const int n = p.n;
  Cplx<Real> r = ipow(-p.a1 / p.a2 * p.qalpha / p.q * ipow(p.t, n - 1),
                      binom2(n + 1));
  for (int i = 1; i <= n; ++i)
    r *= shifted_factorial(p.q * p.a2 * p.b1, p.t, i) /
         sf_den(p.a1 * p.b2 / p.q, p.t, i, trk, "detK2: a1 b2 / q");
  return r;
}

template <typename Real>
Cplx<Real> det_A(const Params<Real>& p, GenericityTracker* trk = nullptr) {
  const int n = p.n;
  Cplx<Real> r = ipow(p.a1 * p.a2, binom2(n + 1)) *
                 ipow(p.t, 2 * binom3(n + 1));
  for (int i = 1; i <= n; ++i)
    r *= shifted_factorial(p.qalpha, p.t, i) /
         sf_den(p.qalpha * p.a1 * p.a2 * p.b1 * p.b2 *
                    ipow(p.t, 2 * n - i - 1),
                p.t, i, trk, "detA: qa abab t^{2n-i-1}");
  return r;
}

// ---------------------------------------------------------------------------
// Global genericity check: rebuilds every closed-form matrix with a tracker
// and reports the worst denominator factor seen.

template <typename Real>
GenericityVerdict check_generic(const Params<Real>& p) {
  GenericityTracker trk;
  p.validate();
  (void)build_R_factors(p, FactorOrder::LDU, &trk);
  (void)build_R_factors(p, FactorOrder::UDL, &trk);
  (void)build_R_inverse(p, FactorOrder::LDU, &trk);
  (void)build_R_inverse(p, FactorOrder::UDL, &trk);
  (void)build_A_factors(p, FactorOrder::LDU, &trk);
  (void)build_A_factors(p, FactorOrder::UDL, &trk);
  (void)build_K(p, 1, &trk);
  (void)build_K(p, 2, &trk);
  for (const Intermediate w :
       {Intermediate::LtildeA, Intermediate::UtildeA, Intermediate::UAInverse,
        Intermediate::LprimeAInverse, Intermediate::LtildeR,
        Intermediate::UtildeR, Intermediate::LtildePrimeR,
        Intermediate::UtildePrimeR, Intermediate::UtildePrimeA,
        Intermediate::LtildePrimeA})
    (void)build_intermediate(p, w, &trk);
  (void)det_R(p, &trk);
  (void)det_K1(p, &trk);
  (void)det_K2(p, &trk);
  (void)det_A(p, &trk);
  // the iterated three-term coefficient families carry further
  // (q^alpha t^m; t)-type denominators not present in any single matrix
  for (int k = 0; k <= p.n; ++k)
    for (int i = 0; i <= p.n; ++i)
      for (int l = 0; l <= k; ++l)
        for (int j = 0; j <= l; ++j) {
          (void)coeff_L(p, k, i, l, j, &trk);
          (void)coeff_U(p, k, i, l, j, &trk);
          (void)coeff_Uprime_app(p, k, i, l, j, &trk);
          (void)coeff_Lprime_app(p, k, i, l, j, &trk);
        }
  for (int k = 0; k <= p.n; ++k)
    for (int i = 0; i <= p.n; ++i)
      for (int l = 0; l <= p.n - k; ++l)
        for (int j = 0; j <= l; ++j) (void)coeff_V(p, k, i, l, j, &trk);
  GenericityVerdict v;
  v.pass = trk.pass();
  v.min_scaled = trk.min_scaled;
  v.worst_factor = trk.worst;
  return v;
}

}  // namespace qselberg
