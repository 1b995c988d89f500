#pragma once

// Polynomial families and special evaluation points:
//   Delta(z), Delta(t;z), skew-symmetrization over S_n,
//   E_{k,i}, E'_{k,i} and their symmetrized quotients Etilde / Etilde',
//   Matsuo polynomials e_i = Etilde_{0,i},
//   Lagrange interpolation polynomials of type A (subset sum + recurrence),
//   geometric-progression points zeta_j / xi_j / eta_j and the closed-form
//   evaluations attached to them.

#include <algorithm>
#include <functional>
#include <numeric>
#include <vector>

#include <Eigen/Dense>

#include "qselberg/qcore.hpp"

namespace qselberg {

template <typename Real>
using CVector = Eigen::Matrix<Cplx<Real>, Eigen::Dynamic, 1>;

// ---------------------------------------------------------------------------
// Vandermonde-type products.

template <typename Real>
Cplx<Real> delta(const CVector<Real>& z) {
  const int n = int(z.size());
  Cplx<Real> r(1);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) r *= z[i] - z[j];
  return r;
}

// Delta(t; z) = prod_{i<j} (z_i - t^{-1} z_j).
template <typename Real>
Cplx<Real> delta_t(const CVector<Real>& z, const Cplx<Real>& t) {
  const int n = int(z.size());
  const Cplx<Real> tinv = Cplx<Real>(1) / t;
  Cplx<Real> r(1);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) r *= z[i] - tinv * z[j];
  return r;
}

template <typename Real>
Real min_pairwise_gap(const CVector<Real>& z) {
  const int n = int(z.size());
  Real g = std::numeric_limits<Real>::infinity();
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) g = std::min(g, std::abs(z[i] - z[j]));
  return g;
}

// ---------------------------------------------------------------------------
// Skew-symmetrization (A f)(z) = sum_{sigma} sgn(sigma) f(z_sigma).

inline constexpr int kFactorialCap = 8;

inline int permutation_sign(const std::vector<int>& idx) {
  int inv = 0;
  for (size_t i = 0; i < idx.size(); ++i)
    for (size_t j = i + 1; j < idx.size(); ++j)
      if (idx[i] > idx[j]) ++inv;
  return (inv % 2 == 0) ? 1 : -1;
}

template <typename Real, typename F>
Cplx<Real> skew_symmetrize(const F& f, const CVector<Real>& z,
                           int cap = kFactorialCap) {
  const int n = int(z.size());
  if (n > cap) throw CapExceeded("skew_symmetrize: n exceeds factorial cap");
  std::vector<int> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  CVector<Real> w(n);
  Cplx<Real> acc(0);
  do {
    for (int i = 0; i < n; ++i) w[i] = z[idx[i]];
    acc += Real(permutation_sign(idx)) * f(w);
  } while (std::next_permutation(idx.begin(), idx.end()));
  return acc;
}

// ---------------------------------------------------------------------------
// E_{k,i}(a,b;z) = z_1..z_k Delta(t;z) prod_{j<=n-i}(1-b z_j)
//                                      prod_{j>n-i}(1-a^{-1} z_j)
// E'_{k,i} carries the monomial z_{n-k+1}..z_n instead of z_1..z_k.

template <typename Real>
Cplx<Real> eval_E(const Cplx<Real>& a, const Cplx<Real>& b, const Cplx<Real>& t,
                  int k, int i, const CVector<Real>& z) {
  const int n = int(z.size());
  if (k < 0 || k > n || i < 0 || i > n)
    throw IndexOutOfRange("eval_E: need 0 <= k, i <= n");
  const Cplx<Real> ainv = Cplx<Real>(1) / a;
  Cplx<Real> r = delta_t(z, t);
  for (int j = 0; j < k; ++j) r *= z[j];
  for (int j = 0; j < n - i; ++j) r *= Cplx<Real>(1) - b * z[j];
  for (int j = n - i; j < n; ++j) r *= Cplx<Real>(1) - ainv * z[j];
  return r;
}

template <typename Real>
Cplx<Real> eval_Eprime(const Cplx<Real>& a, const Cplx<Real>& b,
                       const Cplx<Real>& t, int k, int i,
                       const CVector<Real>& z) {
  const int n = int(z.size());
  if (k < 0 || k > n || i < 0 || i > n)
    throw IndexOutOfRange("eval_Eprime: need 0 <= k, i <= n");
  const Cplx<Real> ainv = Cplx<Real>(1) / a;
  Cplx<Real> r = delta_t(z, t);
  for (int j = n - k; j < n; ++j) r *= z[j];
  for (int j = 0; j < n - i; ++j) r *= Cplx<Real>(1) - b * z[j];
  for (int j = n - i; j < n; ++j) r *= Cplx<Real>(1) - ainv * z[j];
  return r;
}

// Relative gap tolerance below which A(E)/Delta is refused.
inline constexpr double kGapRelTol = 1e-8;

template <typename Real>
void require_separated(const CVector<Real>& z) {
  Real scale(0);
  for (int i = 0; i < z.size(); ++i) scale = std::max(scale, std::abs(z[i]));
  if (z.size() >= 2 && min_pairwise_gap(z) < Real(kGapRelTol) * scale)
    throw NearCoincident("near-coincident coordinates in Delta quotient");
}

template <typename Real>
Cplx<Real> etilde(const Cplx<Real>& a, const Cplx<Real>& b, const Cplx<Real>& t,
                  int k, int i, const CVector<Real>& z,
                  int cap = kFactorialCap) {
  require_separated(z);
  const auto f = [&](const CVector<Real>& w) { return eval_E(a, b, t, k, i, w); };
  return skew_symmetrize<Real>(f, z, cap) / delta(z);
}

template <typename Real>
Cplx<Real> etilde_prime(const Cplx<Real>& a, const Cplx<Real>& b,
                        const Cplx<Real>& t, int k, int i,
                        const CVector<Real>& z, int cap = kFactorialCap) {
  require_separated(z);
  const auto f = [&](const CVector<Real>& w) {
    return eval_Eprime(a, b, t, k, i, w);
  };
  return skew_symmetrize<Real>(f, z, cap) / delta(z);
}

template <typename Real>
Cplx<Real> matsuo_e(const Cplx<Real>& a, const Cplx<Real>& b,
                    const Cplx<Real>& t, int i, const CVector<Real>& z,
                    int cap = kFactorialCap) {
  return etilde(a, b, t, 0, i, z, cap);
}

// ---------------------------------------------------------------------------
// Lagrange interpolation polynomials of type A.
//
// Recurrence form (default): f_i^{(n)} built up one variable at a time.

template <typename Real>
Cplx<Real> lagrange_f(const Cplx<Real>& a1, const Cplx<Real>& a2,
                      const Cplx<Real>& t, int r, const CVector<Real>& z) {
  const int n = int(z.size());
  if (r < 0 || r > n) throw IndexOutOfRange("lagrange_f: need 0 <= r <= n");
  std::vector<Cplx<Real>> f{Cplx<Real>(1)};  // n = 0 row
  for (int m = 1; m <= n; ++m) {
    std::vector<Cplx<Real>> g(m + 1);
    for (int i = 0; i <= m; ++i) {
      Cplx<Real> v(0);
      if (i >= 1) {
        const Cplx<Real> den = a1 * ipow(t, i - 1) - a2 * ipow(t, m - i);
        if (den == Cplx<Real>(0))
          throw DivisionByZero("lagrange_f: degenerate node spacing");
        v += (z[m - 1] - a2 * ipow(t, m - i)) / den * f[i - 1];
      }
      if (i <= m - 1) {
        const Cplx<Real> den = a2 * ipow(t, m - i - 1) - a1 * ipow(t, i);
        if (den == Cplx<Real>(0))
          throw DivisionByZero("lagrange_f: degenerate node spacing");
        v += (z[m - 1] - a1 * ipow(t, i)) / den * f[i];
      }
      g[i] = v;
    }
    f = std::move(g);
  }
  return f[r];
}

// Subset-sum definition; exponential in n, used as the oracle.
template <typename Real>
Cplx<Real> lagrange_f_subset(const Cplx<Real>& a1, const Cplx<Real>& a2,
                             const Cplx<Real>& t, int r,
                             const CVector<Real>& z) {
  const int n = int(z.size());
  if (r < 0 || r > n) throw IndexOutOfRange("lagrange_f_subset: bad index");
  Cplx<Real> total(0);
  for (unsigned mask = 0; mask < (1u << n); ++mask) {
    if (std::popcount(mask) != r) continue;
    Cplx<Real> term(1);
    int k = 0, l = 0;
    for (int pos = 1; pos <= n; ++pos) {
      if (mask & (1u << (pos - 1))) {
        ++k;  // pos is i_k (1-based rank within I)
        const Cplx<Real> node = a2 * ipow(t, pos - k);
        term *= (z[pos - 1] - node) / (a1 * ipow(t, k - 1) - node);
      } else {
        ++l;  // pos is j_l within the complement
        const Cplx<Real> node = a1 * ipow(t, pos - l);
        term *= (z[pos - 1] - node) / (a2 * ipow(t, l - 1) - node);
      }
    }
    total += term;
  }
  return total;
}

// ---------------------------------------------------------------------------
// Special points.

// zeta_j(x,y) = (y t^{-(j-1)},...,y t^{-1}, y, x, xt, ..., x t^{n-j-1}).
template <typename Real>
CVector<Real> zeta_point(const Cplx<Real>& x, const Cplx<Real>& y,
                         const Cplx<Real>& t, int j, int n) {
  if (j < 0 || j > n) throw IndexOutOfRange("zeta_point: need 0 <= j <= n");
  CVector<Real> z(n);
  for (int m = 0; m < j; ++m) z[m] = y * ipow(t, -(j - 1 - m));
  for (int m = 0; m < n - j; ++m) z[j + m] = x * ipow(t, m);
  return z;
}

// xi_j(x,y;t) = (x, xt, ..., x t^{j-1}, y, yt, ..., y t^{n-j-1}).
template <typename Real>
CVector<Real> xi_progression(const Cplx<Real>& x, const Cplx<Real>& y,
                             const Cplx<Real>& t, int j, int n) {
  if (j < 0 || j > n) throw IndexOutOfRange("xi_progression: need 0 <= j <= n");
  CVector<Real> z(n);
  for (int m = 0; m < j; ++m) z[m] = x * ipow(t, m);
  for (int m = 0; m < n - j; ++m) z[j + m] = y * ipow(t, m);
  return z;
}

// xi_j with free tail: (b^{-1} t^{-(j-1)}, ..., b^{-1}, z_1, ..., z_{n-j}).
template <typename Real>
CVector<Real> xi_prefix_b(const Cplx<Real>& b, const Cplx<Real>& t, int j,
                          const CVector<Real>& freeZ) {
  const int n = j + int(freeZ.size());
  const Cplx<Real> binv = Cplx<Real>(1) / b;
  CVector<Real> z(n);
  for (int m = 0; m < j; ++m) z[m] = binv * ipow(t, -(j - 1 - m));
  for (int m = 0; m < int(freeZ.size()); ++m) z[j + m] = freeZ[m];
  return z;
}

// eta_j with free head: (z_1, ..., z_j, a, at, ..., a t^{n-j-1}).
template <typename Real>
CVector<Real> eta_suffix_a(const Cplx<Real>& a, const Cplx<Real>& t, int j,
                           int n, const CVector<Real>& freeZ) {
  if (int(freeZ.size()) != j || j > n)
    throw IndexOutOfRange("eta_suffix_a: need j free head coordinates");
  CVector<Real> z(n);
  for (int m = 0; m < j; ++m) z[m] = freeZ[m];
  for (int m = 0; m < n - j; ++m) z[j + m] = a * ipow(t, m);
  return z;
}

// xi_j(a_1) = (a_1, a_1 t, ..., a_1 t^{j-1}, z_1, ..., z_{n-j}).
template <typename Real>
CVector<Real> xi_prefix_a1(const Cplx<Real>& a1, const Cplx<Real>& t, int j,
                           const CVector<Real>& freeZ) {
  const int n = j + int(freeZ.size());
  CVector<Real> z(n);
  for (int m = 0; m < j; ++m) z[m] = a1 * ipow(t, m);
  for (int m = 0; m < int(freeZ.size()); ++m) z[j + m] = freeZ[m];
  return z;
}

// ---------------------------------------------------------------------------
// Closed forms.

// Constant c_i with Etilde_{0,i}(zeta_j(a, b^{-1})) = c_i delta_{ij}; both
// displayed forms.
template <typename Real>
Cplx<Real> prop31_c(const Cplx<Real>& a, const Cplx<Real>& b,
                    const Cplx<Real>& t, int n, int i, int form = 0) {
  const Cplx<Real> one(1);
  if (form == 0) {
    return shifted_factorial(a * b * ipow(t, i), t, n - i) *
           shifted_factorial(one / (a * b * ipow(t, i - 1)), t, i) *
           shifted_factorial(t, t, i) * shifted_factorial(t, t, n - i) /
           (ipow(t, binom2(n)) * ipow(one - t, n));
  }
  const Cplx<Real> tinv = one / t;
  return shifted_factorial(a * b, t, n - i) *
         shifted_factorial(one / (a * b * ipow(t, n - 1)), t, i) *
         shifted_factorial(tinv, tinv, i) * shifted_factorial(tinv, tinv, n - i) /
         ipow(one - tinv, n);
}

// Etilde_{0,i}(xi_i) with free tail coordinates; both displayed lines.
template <typename Real>
Cplx<Real> lemma33_xi(const Cplx<Real>& a, const Cplx<Real>& b,
                      const Cplx<Real>& t, int n, int i,
                      const CVector<Real>& freeZ, int form = 0) {
  const Cplx<Real> one(1);
  Cplx<Real> tail(1);
  for (int j = 0; j < int(freeZ.size()); ++j)
    tail *= one - freeZ[j] * b * ipow(t, i);
  const Cplx<Real> common =
      shifted_factorial(one / (a * b * ipow(t, i - 1)), t, i) * tail;
  if (form == 0) {
    const Cplx<Real> tinv = one / t;
    return ipow(t, -(long long)i * (n - i)) * shifted_factorial(tinv, tinv, i) *
           shifted_factorial(tinv, tinv, n - i) / ipow(one - tinv, n) * common;
  }
  return shifted_factorial(t, t, i) * shifted_factorial(t, t, n - i) /
         (ipow(t, binom2(n)) * ipow(one - t, n)) * common;
}

// Etilde_{0,i}(eta_i) with free head coordinates.
template <typename Real>
Cplx<Real> lemma33_eta(const Cplx<Real>& a, const Cplx<Real>& b,
                       const Cplx<Real>& t, int n, int i,
                       const CVector<Real>& freeZ) {
  const Cplx<Real> one(1), tinv = one / t;
  Cplx<Real> head(1);
  for (int j = 0; j < int(freeZ.size()); ++j)
    head *= one - freeZ[j] / (a * ipow(t, n - i));
  return shifted_factorial(tinv, tinv, i) * shifted_factorial(tinv, tinv, n - i) /
         ipow(one - tinv, n) * shifted_factorial(a * b, t, n - i) * head;
}

// Etilde_{0,i}(zeta_j(x, b^{-1})).
template <typename Real>
Cplx<Real> lemma34_E0i(const Cplx<Real>& a, const Cplx<Real>& b,
                       const Cplx<Real>& t, int n, int i, int j,
                       const Cplx<Real>& x) {
  if (i < j) return Cplx<Real>(0);
  const Cplx<Real> one(1);
  return shifted_factorial(x * b * ipow(t, i), t, n - i) *
         shifted_factorial(x / a, t, i - j) *
         shifted_factorial(one / (a * b * ipow(t, j - 1)), t, j) *
         shifted_factorial(t, t, n) / (ipow(t, binom2(n)) * ipow(one - t, n)) *
         qbinom(i, j, t) / qbinom(n, j, t);
}

// Scaling Etilde_{k,i}(zeta_j(x,b^{-1})) = factor * Etilde_{0,i}, i+k <= n.
template <typename Real>
Cplx<Real> lemma34_scale(const Cplx<Real>& t, int n, int j, int k,
                         const Cplx<Real>& x) {
  return ipow(x, k) * ipow(t, (long long)(n - j) * k - binom2(k + 1));
}

// Etilde_{0,i}(zeta_j(a, y)).
template <typename Real>
Cplx<Real> lemma35_E0i(const Cplx<Real>& a, const Cplx<Real>& b,
                       const Cplx<Real>& t, int n, int i, int j,
                       const Cplx<Real>& y) {
  if (j < i) return Cplx<Real>(0);
  const Cplx<Real> one(1), tinv = one / t;
  return shifted_factorial(y * b * ipow(t, -(j - i - 1)), t, j - i) *
         shifted_factorial(y / (a * ipow(t, n - 1)), t, i) *
         shifted_factorial(a * b, t, n - j) *
         shifted_factorial(tinv, tinv, n) / ipow(one - tinv, n) *
         qbinom(n - i, n - j, tinv) / qbinom(n, j, tinv);
}

// Scaling Etilde_{k,i}(zeta_j(a,y)) = factor * Etilde_{0,i}, n <= i+k.
template <typename Real>
Cplx<Real> lemma35_scale(const Cplx<Real>& a, const Cplx<Real>& t, int n, int j,
                         int k, const Cplx<Real>& y) {
  return ipow(y, k + j - n) * ipow(a, n - j) *
         ipow(t, binom2(n - j) - binom2(k + j - n));
}

// Leading coefficient C_{ki} of m_{(1^{n-k}2^k)} in Etilde_{k,i}.
template <typename Real>
Cplx<Real> leading_Cki(const Cplx<Real>& a, const Cplx<Real>& b,
                       const Cplx<Real>& t, int n, int k, int i) {
  const Cplx<Real> one(1), tinv = one / t;
  return Real(n % 2 == 0 ? 1 : -1) * shifted_factorial(tinv, tinv, k) *
         shifted_factorial(tinv, tinv, n - k) /
         (ipow(a, i) * ipow(b, -(long long)(n - i)) * ipow(one - tinv, n));
}

// f_i(a1,a2;t; xi_i(a_1)) with free tail.
template <typename Real>
Cplx<Real> lemma64_f_xi(const Cplx<Real>& a1, const Cplx<Real>& a2,
                        const Cplx<Real>& t, int n, int i,
                        const CVector<Real>& freeZ) {
  const Cplx<Real> one(1);
  Cplx<Real> num(1);
  for (int l = 0; l < int(freeZ.size()); ++l)
    num *= one - freeZ[l] / (a1 * ipow(t, i));
  return num / shifted_factorial(a2 / (a1 * ipow(t, i)), t, n - i);
}

// f_i(a1,a2;t; eta_i(a_2)) with free head.
template <typename Real>
Cplx<Real> lemma64_f_eta(const Cplx<Real>& a1, const Cplx<Real>& a2,
                         const Cplx<Real>& t, int n, int i,
                         const CVector<Real>& freeZ) {
  const Cplx<Real> one(1);
  Cplx<Real> num(1);
  for (int l = 0; l < i; ++l)
    num *= one - freeZ[l] / (a2 * ipow(t, n - i));
  return num / shifted_factorial(a1 / (a2 * ipow(t, n - i)), t, i);
}

// f_i(a1,a2;t; xi_j(x, a_2; t)).
template <typename Real>
Cplx<Real> cor65_f(const Cplx<Real>& a1, const Cplx<Real>& a2,
                   const Cplx<Real>& t, int n, int i, int j,
                   const Cplx<Real>& x) {
  const Cplx<Real> one(1), tinv = one / t;
  if (i < 0 || i > n) throw IndexOutOfRange("cor65_f: bad index");
  return qbinom(j, i, tinv) * shifted_factorial(x / a1, t, j - i) *
         shifted_factorial(x / (a2 * ipow(t, n - j)), t, i) /
         (shifted_factorial(a2 * ipow(t, n - j - i) / a1, t, j - i) *
          shifted_factorial(a1 / (a2 * ipow(t, n - i)), t, i));
}

// ---------------------------------------------------------------------------
// PolySpec / SpecialPoint: symbolic tags used by the CLI and the verifier.

enum class PolyFamily { Matsuo, Etilde, EtildePrime, LagrangeF, MatsuoTimesProd };
enum class SlotPair { A1B2, A2B1, A1B1, A2B2, A1A2, B1invB2inv };
enum class LagrangeBase { T, TInverse };

struct PolySpec {
  PolyFamily family = PolyFamily::Matsuo;
  int k = 0;  // first index (unused for Matsuo / LagrangeF)
  int i = 0;  // second index, or r for LagrangeF
  SlotPair slots = SlotPair::A1B2;
  LagrangeBase base = LagrangeBase::T;
};

template <typename Real>
std::pair<Cplx<Real>, Cplx<Real>> resolve_slots(const Params<Real>& p,
                                                SlotPair s) {
  switch (s) {
    case SlotPair::A1B2: return {p.a1, p.b2};
    case SlotPair::A2B1: return {p.a2, p.b1};
    case SlotPair::A1B1: return {p.a1, p.b1};
    case SlotPair::A2B2: return {p.a2, p.b2};
    case SlotPair::A1A2: return {p.a1, p.a2};
    case SlotPair::B1invB2inv:
      return {Cplx<Real>(1) / p.b1, Cplx<Real>(1) / p.b2};
  }
  throw ParseError("resolve_slots: unknown slot pair");
}

template <typename Real>
Cplx<Real> eval_poly(const PolySpec& spec, const Params<Real>& p,
                     const CVector<Real>& z, int cap = kFactorialCap) {
  const int n = int(z.size());
  const auto [sa, sb] = resolve_slots(p, spec.slots);
  switch (spec.family) {
    case PolyFamily::Matsuo:
      if (spec.i < 0 || spec.i > n) throw IndexOutOfRange("eval_poly: i");
      return matsuo_e(sa, sb, p.t, spec.i, z, cap);
    case PolyFamily::MatsuoTimesProd: {
      if (spec.i < 0 || spec.i > n) throw IndexOutOfRange("eval_poly: i");
      Cplx<Real> prod(1);
      for (int m = 0; m < n; ++m) prod *= z[m];
      return prod * matsuo_e(sa, sb, p.t, spec.i, z, cap);
    }
    case PolyFamily::Etilde:
      if (spec.i < 0 || spec.i > n || spec.k < 0 || spec.k > n)
        throw IndexOutOfRange("eval_poly: (k,i)");
      return etilde(sa, sb, p.t, spec.k, spec.i, z, cap);
    case PolyFamily::EtildePrime:
      if (spec.i < 0 || spec.i > n || spec.k < 0 || spec.k > n)
        throw IndexOutOfRange("eval_poly: (k,i)");
      return etilde_prime(sa, sb, p.t, spec.k, spec.i, z, cap);
    case PolyFamily::LagrangeF: {
      const Cplx<Real> base =
          spec.base == LagrangeBase::T ? p.t : Cplx<Real>(1) / p.t;
      return lagrange_f(sa, sb, base, spec.i, z);
    }
  }
  throw ParseError("eval_poly: unknown family");
}

enum class PointKind { Zeta, XiGeom, XiPrefixB, EtaSuffixA, XiPrefixA1, EtaSuffixA2 };

template <typename Real>
struct SpecialPoint {
  PointKind kind = PointKind::Zeta;
  int j = 0;
  Cplx<Real> x{1}, y{1};        // parameters of zeta/xi
  CVector<Real> free;           // free coordinates for prefix/suffix kinds
};

template <typename Real>
CVector<Real> materialize(const SpecialPoint<Real>& sp, const Params<Real>& p,
                          int n) {
  CVector<Real> z;
  switch (sp.kind) {
    case PointKind::Zeta: z = zeta_point(sp.x, sp.y, p.t, sp.j, n); break;
    case PointKind::XiGeom: z = xi_progression(sp.x, sp.y, p.t, sp.j, n); break;
    case PointKind::XiPrefixB: z = xi_prefix_b(sp.y, p.t, sp.j, sp.free); break;
    case PointKind::EtaSuffixA:
      z = eta_suffix_a(sp.x, p.t, sp.j, n, sp.free);
      break;
    case PointKind::XiPrefixA1: z = xi_prefix_a1(p.a1, p.t, sp.j, sp.free); break;
    case PointKind::EtaSuffixA2:
      z = eta_suffix_a(p.a2, p.t, sp.j, n, sp.free);
      break;
  }
  if (int(z.size()) != n)
    throw IndexOutOfRange("materialize: free coordinates inconsistent with n");
  require_separated(z);
  return z;
}

// Paper closed form for the (spec, point) pairs covered by Prop 3.1,
// Lemmas 3.4/3.5, Prop 6.3 and Cor 6.5.
template <typename Real>
Cplx<Real> closed_form(const PolySpec& spec, const SpecialPoint<Real>& sp,
                       const Params<Real>& p, int n) {
  const auto [sa, sb] = resolve_slots(p, spec.slots);
  const bool etilde_like = spec.family == PolyFamily::Matsuo ||
                           spec.family == PolyFamily::Etilde;
  const int k = spec.family == PolyFamily::Matsuo ? 0 : spec.k;
  if (etilde_like && sp.kind == PointKind::Zeta) {
    // zeta_j(x, b^{-1}): Lemma 3.4 branch.
    if (sp.y == Cplx<Real>(1) / sb) {
      if (k == 0) return lemma34_E0i(sa, sb, p.t, n, spec.i, sp.j, sp.x);
      if (spec.i + k <= n)
        return lemma34_scale(p.t, n, sp.j, k, sp.x) *
               lemma34_E0i(sa, sb, p.t, n, spec.i, sp.j, sp.x);
    }
    // zeta_j(a, y): Lemma 3.5 branch.
    if (sp.x == sa) {
      if (k == 0) return lemma35_E0i(sa, sb, p.t, n, spec.i, sp.j, sp.y);
      if (n <= spec.i + k)
        return lemma35_scale(sa, p.t, n, sp.j, k, sp.y) *
               lemma35_E0i(sa, sb, p.t, n, spec.i, sp.j, sp.y);
    }
  }
  if (spec.family == PolyFamily::LagrangeF && sp.kind == PointKind::XiGeom) {
    const Cplx<Real> base =
        spec.base == LagrangeBase::T ? p.t : Cplx<Real>(1) / p.t;
    if (sp.y == sb) {
      if (sp.x == sa) return Cplx<Real>(spec.i == sp.j ? 1 : 0);
      return cor65_f(sa, sb, base, n, spec.i, sp.j, sp.x);
    }
  }
  throw Unsupported("closed_form: no paper closed form for this pair");
}

}  // namespace qselberg
