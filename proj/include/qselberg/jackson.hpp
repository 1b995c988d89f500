#pragma once

// Truncated Jackson integrals over the lattice Z^n:
//   <phi, xi> = (1-q)^n sum_{nu in Z^n} phi(q^nu xi) Phi(q^nu xi) Delta(q^nu xi).
//
// The weight is only ever used through the single-valued ratio
// Phi(q^nu xi)/Phi(xi); the gauge convention is Phi(xi) = 1, so no complex
// power z^alpha is evaluated anywhere.  Parameter shifts are realized at
// the integrand level:
//   T_alpha           ->  extra factor z_1 ... z_n          (T_alpha Phi = z_1...z_n Phi)
//   T_{q,b_r}^{-1} T_{q,a_r} -> factor prod_i (1 - a_r^{-1} z_i)/(1 - q^{-1} b_r z_i)
// so every identity is homogeneous in the dropped constant Phi(xi).

#include <array>
#include <functional>
#include <vector>

#include "qselberg/interp.hpp"
#include "qselberg/qcore.hpp"

namespace qselberg {

template <typename Real>
struct TruncationSpec {
  int N = 40;
  Real tail_tol = Real(1e-6);
  int precision_bits = 53;
  bool deterministic = true;
};

// Convergence region of the bilateral sum:
//   |q/(a1 a2 b1 b2)| < |q^alpha| < 1   and
//   |q/(a1 a2 b1 b2)| < |q^alpha t^{2n-2}| < 1.
template <typename Real>
bool check_convergence(const Params<Real>& p) {
  const Real lo = std::abs(p.q / (p.a1 * p.a2 * p.b1 * p.b2));
  const Real m1 = std::abs(p.qalpha);
  const Real m2 = std::abs(p.qalpha * ipow(p.t, 2 * (p.n - 1)));
  return lo < m1 && m1 < Real(1) && lo < m2 && m2 < Real(1);
}

template <typename Real>
void require_convergence(const Params<Real>& p) {
  if (!check_convergence(p))
    throw NonConvergent(
        "convergence condition violated: need |q/(a1 a2 b1 b2)| < |q^alpha| "
        "< 1 and |q/(a1 a2 b1 b2)| < |q^alpha t^{2n-2}| < 1");
}

namespace detail {
// (xnum; q)_m / (xden; q)_m with factors interleaved so that neither partial
// product can overflow when m is large and negative.
template <typename Real>
Cplx<Real> sf_ratio(const Cplx<Real>& xnum, const Cplx<Real>& xden,
                    const Cplx<Real>& q, int m) {
  const Cplx<Real> one(1);
  Cplx<Real> r(1);
  if (m >= 0) {
    Cplx<Real> qs(1);
    for (int s = 0; s < m; ++s) {
      const Cplx<Real> den = one - qs * xden;
      if (den == Cplx<Real>(0))
        throw PoleHit("weight_ratio: lattice point on a pole");
      r *= (one - qs * xnum) / den;
      qs *= q;
    }
  } else {
    Cplx<Real> qs = one / q;
    for (int s = 1; s <= -m; ++s) {
      const Cplx<Real> den = one - qs * xnum;
      if (den == Cplx<Real>(0))
        throw PoleHit("weight_ratio: lattice point on a pole");
      r *= (one - qs * xden) / den;
      qs /= q;
    }
  }
  return r;
}
}  // namespace detail

// Phi(q^nu xi) / Phi(xi), assembled factor-by-factor from
// (u q^m; q)_infty / (u; q)_infty = 1/(u; q)_m.
template <typename Real>
Cplx<Real> weight_ratio(const Params<Real>& p, const CVector<Real>& xi,
                        const std::vector<int>& nu) {
  const int n = int(xi.size());
  if (int(nu.size()) != n) throw IndexOutOfRange("weight_ratio: |nu| != n");
  const Cplx<Real> q = p.q;
  Cplx<Real> w(1);
  for (int i = 0; i < n; ++i) {
    w *= ipow(p.qalpha, nu[i]);
    w *= detail::sf_ratio(p.b1 * xi[i], q / p.a1 * xi[i], q, nu[i]);
    w *= detail::sf_ratio(p.b2 * xi[i], q / p.a2 * xi[i], q, nu[i]);
  }
  for (int j = 0; j < n; ++j)
    for (int k = j + 1; k < n; ++k) {
      w *= ipow(p.t * p.t / q, nu[j]);
      const Cplx<Real> wjk = xi[k] / xi[j];
      w *= detail::sf_ratio(p.t * wjk, q / p.t * wjk, q, nu[k] - nu[j]);
    }
  return w;
}

// T_{q,z_1} Phi(z) / Phi(z).
template <typename Real>
Cplx<Real> one_step_ratio(const Params<Real>& p, const CVector<Real>& z) {
  const int n = int(z.size());
  const Cplx<Real> one(1), q = p.q, t = p.t;
  Cplx<Real> r = p.qalpha * ipow(t, 2 * (n - 1)) * (one - p.b1 * z[0]) *
                 (one - p.b2 * z[0]) /
                 ((one - q / p.a1 * z[0]) * (one - q / p.a2 * z[0]));
  for (int j = 1; j < n; ++j)
    r *= (z[0] - z[j] / t) / (q * z[0] - t * z[j]);
  return r;
}

// ---------------------------------------------------------------------------
// Shell-ordered compensated lattice summation.

template <typename Real>
struct Kahan {
  Cplx<Real> sum{0}, comp{0};
  void add(const Cplx<Real>& term) {
    const Cplx<Real> y = term - comp;
    const Cplx<Real> s = sum + y;
    comp = (s - sum) - y;
    sum = s;
  }
};

template <typename Real>
struct LatticeSumResult {
  std::vector<Cplx<Real>> values;
  int shells_used = 0;
  Real tail_estimate = 0;
};

// Jackson integrals (1-q)^n sum_nu w(nu) f(q^nu xi) for several raw
// integrands f in a single lattice sweep.  Shells are max-norm spheres,
// enumerated 0..N, lexicographic within a shell; each integrand gets its own
// compensated accumulator.  Fails if the outermost shell still contributes
// more than tail_tol of the accumulated absolute mass.
template <typename Real>
LatticeSumResult<Real> lattice_sum(
    const Params<Real>& p, const CVector<Real>& xi,
    const TruncationSpec<Real>& trunc,
    const std::vector<std::function<Cplx<Real>(const CVector<Real>&)>>& fns) {
  const int n = int(xi.size());
  const size_t m = fns.size();
  const Cplx<Real> pref = ipow(Cplx<Real>(1) - p.q, n);
  std::vector<Kahan<Real>> acc(m);
  std::vector<Real> total_abs(m, Real(0)), shell_abs(m, Real(0));
  std::vector<int> nu(n);
  CVector<Real> z(n);
  std::vector<Cplx<Real>> qpow_cache;  // q^k for k in [-N, N]
  for (int k = -trunc.N; k <= trunc.N; ++k)
    qpow_cache.push_back(ipow(p.q, k));
  const auto qpow = [&](int k) { return qpow_cache[k + trunc.N]; };

  for (int s = 0; s <= trunc.N; ++s) {
    std::fill(shell_abs.begin(), shell_abs.end(), Real(0));
    // odometer over [-s, s]^n, keeping only max-norm == s
    std::fill(nu.begin(), nu.end(), -s);
    while (true) {
      int maxabs = 0;
      for (int i = 0; i < n; ++i) maxabs = std::max(maxabs, std::abs(nu[i]));
      if (maxabs == s) {
        const Cplx<Real> w = pref * weight_ratio(p, xi, nu);
        for (int i = 0; i < n; ++i) z[i] = xi[i] * qpow(nu[i]);
        for (size_t fi = 0; fi < m; ++fi) {
          const Cplx<Real> term = w * fns[fi](z);
          acc[fi].add(term);
          const Real a = std::abs(term);
          total_abs[fi] += a;
          shell_abs[fi] += a;
        }
      }
      int d = n - 1;
      while (d >= 0 && nu[d] == s) nu[d--] = -s;
      if (d < 0) break;
      ++nu[d];
    }
  }
  LatticeSumResult<Real> out;
  out.shells_used = trunc.N + 1;
  out.values.resize(m);
  for (size_t fi = 0; fi < m; ++fi) {
    out.values[fi] = acc[fi].sum;
    const Real rel =
        total_abs[fi] > Real(0) ? shell_abs[fi] / total_abs[fi] : Real(0);
    out.tail_estimate = std::max(out.tail_estimate, rel);
  }
  if (out.tail_estimate > trunc.tail_tol)
    throw NotConverged("lattice_sum: outer shell exceeds tail tolerance");
  return out;
}

// Brackets <phi, xi> for symmetric phi: the raw integrand is phi * Delta.
template <typename Real>
std::vector<Cplx<Real>> bracket_many(
    const Params<Real>& p, const CVector<Real>& xi,
    const TruncationSpec<Real>& trunc,
    const std::vector<std::function<Cplx<Real>(const CVector<Real>&)>>& phis) {
  std::vector<std::function<Cplx<Real>(const CVector<Real>&)>> fns;
  fns.reserve(phis.size());
  for (const auto& phi : phis)
    fns.push_back([phi](const CVector<Real>& z) { return phi(z) * delta(z); });
  return lattice_sum(p, xi, trunc, fns).values;
}

// ---------------------------------------------------------------------------
// BracketSpec: a bracket plus parameter-shift multiplicities, realized as
// integrand multipliers against the *base* weight.

template <typename Real>
struct BracketSpec {
  PolySpec poly;
  int alpha_shift = 0;  // applications of T_alpha
  int ab_shift1 = 0;    // applications of T_{q,b_1}^{-1} T_{q,a_1}
  int ab_shift2 = 0;    // applications of T_{q,b_2}^{-1} T_{q,a_2}
};

template <typename Real>
BracketSpec<Real> apply_T_alpha(BracketSpec<Real> s) {
  ++s.alpha_shift;
  return s;
}

template <typename Real>
BracketSpec<Real> apply_T_ab(BracketSpec<Real> s, int r) {
  if (r == 1)
    ++s.ab_shift1;
  else if (r == 2)
    ++s.ab_shift2;
  else
    throw IndexOutOfRange("apply_T_ab: pair index must be 1 or 2");
  return s;
}

// Parameters after the shifts carried by the spec; polynomial slots resolve
// against these, and convergence must hold here too.
template <typename Real>
Params<Real> effective_params(const Params<Real>& p,
                              const BracketSpec<Real>& s) {
  Params<Real> e = p;
  for (int m = 0; m < s.alpha_shift; ++m) e = e.shifted_alpha();
  for (int m = 0; m < s.ab_shift1; ++m) e = e.shifted_ab(1);
  for (int m = 0; m < s.ab_shift2; ++m) e = e.shifted_ab(2);
  return e;
}

// Ratio (shifted Phi)/(base Phi) as a rational function of z.
template <typename Real>
Cplx<Real> shift_multiplier(const Params<Real>& p, const BracketSpec<Real>& s,
                            const CVector<Real>& z) {
  const int n = int(z.size());
  const Cplx<Real> one(1);
  Cplx<Real> mult(1);
  for (int m = 0; m < s.alpha_shift; ++m)
    for (int i = 0; i < n; ++i) mult *= z[i];
  for (int r = 1; r <= 2; ++r) {
    const int cnt = (r == 1) ? s.ab_shift1 : s.ab_shift2;
    const Cplx<Real> a = (r == 1) ? p.a1 : p.a2;
    const Cplx<Real> b = (r == 1) ? p.b1 : p.b2;
    for (int m = 0; m < cnt; ++m)
      for (int i = 0; i < n; ++i) {
        const Cplx<Real> den = one - ipow(p.q, -(m + 1)) * b * z[i];
        if (den == Cplx<Real>(0))
          throw PoleHit("shift_multiplier: pole at lattice point");
        mult *= (one - ipow(p.q, -m) / a * z[i]) / den;
      }
  }
  return mult;
}

template <typename Real>
std::function<Cplx<Real>(const CVector<Real>&)> bracket_integrand(
    const Params<Real>& p, const BracketSpec<Real>& s,
    int cap = kFactorialCap) {
  const Params<Real> eff = effective_params(p, s);
  const PolySpec spec = s.poly;
  return [=](const CVector<Real>& z) {
    return eval_poly(spec, eff, z, cap) * shift_multiplier(p, s, z);
  };
}

template <typename Real>
struct BracketResult {
  Cplx<Real> value;
  int N = 0;
  int shells_used = 0;
  Real tail_estimate = 0;
};

template <typename Real>
BracketResult<Real> bracket(const Params<Real>& p, const CVector<Real>& xi,
                            const TruncationSpec<Real>& trunc,
                            const BracketSpec<Real>& s,
                            int cap = kFactorialCap) {
  require_convergence(p);
  require_convergence(effective_params(p, s));
  const auto phi = bracket_integrand(p, s, cap);
  std::vector<std::function<Cplx<Real>(const CVector<Real>&)>> fns{
      [phi](const CVector<Real>& z) { return phi(z) * delta(z); }};
  const auto ls = lattice_sum(p, xi, trunc, fns);
  return {ls.values[0], trunc.N, ls.shells_used, ls.tail_estimate};
}

// ---------------------------------------------------------------------------
// The summation-by-parts machinery of Section 5.

// F_i(z) = (1 - a1^{-1} z_i)(1 - a2^{-1} z_i) prod_{k != i} (z_i - t z_k)
// G_i(z) = q^alpha t^{2(n-1)} (1 - b1 z_i)(1 - b2 z_i)
//          prod_{k != i} (z_i - t^{-1} z_k)
template <typename Real>
Cplx<Real> FG_eval(const Params<Real>& p, char which, int i,
                   const CVector<Real>& z) {
  const int n = int(z.size());
  if (i < 1 || i > n) throw IndexOutOfRange("FG_eval: i must be 1..n");
  const Cplx<Real> one(1);
  const Cplx<Real> zi = z[i - 1];
  Cplx<Real> r;
  if (which == 'F') {
    r = (one - zi / p.a1) * (one - zi / p.a2);
    for (int k = 0; k < n; ++k)
      if (k != i - 1) r *= zi - p.t * z[k];
  } else if (which == 'G') {
    r = p.qalpha * ipow(p.t, 2 * (n - 1)) * (one - p.b1 * zi) *
        (one - p.b2 * zi);
    for (int k = 0; k < n; ++k)
      if (k != i - 1) r *= zi - z[k] / p.t;
  } else {
    throw ParseError("FG_eval: which must be 'F' or 'G'");
  }
  return r;
}

// (nabla phi)(z) = phi(z) - (T_{q,z1} Phi / Phi)(z) phi(q z1, z2, ..., zn).
template <typename Real>
Cplx<Real> nabla_integrand(
    const Params<Real>& p,
    const std::function<Cplx<Real>(const CVector<Real>&)>& phi,
    const CVector<Real>& z) {
  CVector<Real> zs = z;
  zs[0] *= p.q;
  return phi(z) - one_step_ratio(p, z) * phi(zs);
}

// phi_{k,i}(z) = F_1(z) E_{k-1,i}^{(n-1)}(a1, b2; z_2, ..., z_n); its
// nabla-image collapses to (F_1 - G_1) E^{(n-1)} because the tail does not
// involve z_1.  The primed variant phi'_{k,i-1} keeps the same F_1 prefactor
// but takes the tail from the primed family at dropped indices,
// E'_{k-1,i-1}(z_2, ..., z_n); its skew-symmetrization expands in the
// Etilde' basis.
template <typename Real>
std::function<Cplx<Real>(const CVector<Real>&)> phi_section5(
    const Params<Real>& p, int k, int i, bool primed = false) {
  return [=](const CVector<Real>& z) {
    const int n = int(z.size());
    CVector<Real> tail = z.segment(1, n - 1);
    const Cplx<Real> e =
        primed ? eval_Eprime(p.a1, p.b2, p.t, k - 1, i - 1, tail)
               : eval_E(p.a1, p.b2, p.t, k - 1, i, tail);
    return FG_eval(p, 'F', 1, z) * e;
  };
}

// A(nabla phi_{k,i})(z), computed through the collapsed form.
template <typename Real>
Cplx<Real> phi_tilde(const Params<Real>& p, int k, int i,
                     const CVector<Real>& z, bool primed = false,
                     int cap = kFactorialCap) {
  const auto f = [&](const CVector<Real>& w) {
    const int n = int(w.size());
    CVector<Real> tail = w.segment(1, n - 1);
    const Cplx<Real> e =
        primed ? eval_Eprime(p.a1, p.b2, p.t, k - 1, i - 1, tail)
               : eval_E(p.a1, p.b2, p.t, k - 1, i, tail);
    return (FG_eval(p, 'F', 1, w) - FG_eval(p, 'G', 1, w)) * e;
  };
  return skew_symmetrize<Real>(f, z, cap);
}

// ---------------------------------------------------------------------------
// Lemma 5.2 closed forms (evaluations of F and G at the zeta points).

// F_1(zeta_j(x, b2^{-1}))
template <typename Real>
Cplx<Real> lemma52_F1_xb(const Params<Real>& p, int n, int j,
                         const Cplx<Real>& x) {
  const Cplx<Real> one(1), t = p.t, b2 = p.b2;
  return (one - one / (p.a1 * b2 * ipow(t, j - 1))) *
         (one - one / (p.a2 * b2 * ipow(t, j - 1))) /
         (ipow(b2 * ipow(t, j - 1), n - 1) * (one - t)) *
         shifted_factorial(t, t, j) *
         shifted_factorial(x * b2 * ipow(t, j), t, n - j);
}

// F_{j+1}(zeta_j(x, b2^{-1}))
template <typename Real>
Cplx<Real> lemma52_Fj1_xb(const Params<Real>& p, int n, int j,
                          const Cplx<Real>& x) {
  const Cplx<Real> one(1), t = p.t, b2 = p.b2;
  return detail::msign<Real>(j) * (one - x / p.a1) * (one - x / p.a2) *
         ipow(x, n - j - 1) /
         (ipow(b2, j) * ipow(t, binom2(j - 1) - 1) * (one - t)) *
         shifted_factorial(t, t, n - j) *
         shifted_factorial(x * b2 / t, t, j);
}

// G_n(zeta_j(x, b2^{-1}))
template <typename Real>
Cplx<Real> lemma52_Gn_xb(const Params<Real>& p, int n, int j,
                         const Cplx<Real>& x) {
  const Cplx<Real> one(1), t = p.t, tinv = one / t, b2 = p.b2;
  return p.qalpha * ipow(t, 2 * (n - 1)) *
         (one - p.b1 * x * ipow(t, n - j - 1)) *
         (one - b2 * x * ipow(t, n - j - 1)) *
         ipow(-one / b2, j) * ipow(t, -binom2(j + 1)) *
         shifted_factorial(x * b2 * ipow(t, n - j), t, j) *
         ipow(x * ipow(t, n - j - 1), n - j - 1) *
         shifted_factorial(tinv, tinv, n - j) / (one - tinv);
}

// F_1(zeta_j(a1, y))
template <typename Real>
Cplx<Real> lemma52_F1_ay(const Params<Real>& p, int n, int j,
                         const Cplx<Real>& y) {
  const Cplx<Real> one(1), t = p.t, tinv = one / t;
  return (one - y / (p.a2 * ipow(t, j - 1))) * ipow(-y * t, j - 1) *
         ipow(-p.a1 * t, n - j) * ipow(t, binom2(n - j) - binom2(j - 1)) *
         shifted_factorial(y / (p.a1 * ipow(t, n - 1)), t, n - j + 1) *
         shifted_factorial(tinv, tinv, j) / (one - tinv);
}

// G_j(zeta_j(a1, y))
template <typename Real>
Cplx<Real> lemma52_Gj_ay(const Params<Real>& p, int n, int j,
                         const Cplx<Real>& y) {
  const Cplx<Real> one(1), t = p.t, tinv = one / t;
  return p.qalpha * ipow(t, 2 * (n - 1)) * (one - y * p.b1) *
         (one - y * p.b2) * ipow(y, j - 1) * ipow(-p.a1 / t, n - j) *
         ipow(t, binom2(n - j)) *
         shifted_factorial(y / (p.a1 * ipow(t, n - j - 2)), t, n - j) *
         shifted_factorial(tinv, tinv, j) / (one - tinv);
}

// G_n(zeta_j(a1, y))
template <typename Real>
Cplx<Real> lemma52_Gn_ay(const Params<Real>& p, int n, int j,
                         const Cplx<Real>& y) {
  const Cplx<Real> one(1), t = p.t, tinv = one / t;
  return p.qalpha * ipow(t, 2 * (n - 1)) *
         (one - p.a1 * p.b1 * ipow(t, n - j - 1)) *
         (one - p.a1 * p.b2 * ipow(t, n - j - 1)) *
         ipow(p.a1 * ipow(t, n - j - 1), n - 1) *
         shifted_factorial(y / (p.a1 * ipow(t, n - 1)), t, j) *
         shifted_factorial(tinv, tinv, n - j) / (one - tinv);
}

// ---------------------------------------------------------------------------
// Expansion coefficients of A(nabla phi_{k,i}) / Delta in the Etilde basis
// (Lemma 5.3) and of the primed analogue (Appendix).  Each call returns the
// three coefficients in the order they multiply
//   {E_{k,i}, E_{k-1,i}, E_{k-1,i+1}}          (unprimed, i+k <= n)
//   {E_{k,i}, E_{k,i+1}, E_{k-1,i+1}}          (unprimed, i+k >= n)
//   {E'_{k,i}, E'_{k-1,i}, E'_{k-1,i-1}}       (primed,   k <= i)
//   {E'_{k,i}, E'_{k,i-1}, E'_{k-1,i-1}}       (primed,   i <= k)

template <typename Real>
std::array<Cplx<Real>, 3> lemma53_c(const Params<Real>& p, int k, int i) {
  const Cplx<Real> one(1), t = p.t, qa = p.qalpha;
  const int n = p.n;
  return {
      -one / (p.a1 * p.a2 * p.b2) * ipow(t, k - 1) *
          (one - qa * p.a1 * p.a2 * p.b1 * p.b2 * ipow(t, 2 * n - k - 1)),
      one / (p.a2 * p.b2) * ipow(t, n - i - 1) *
          (one - qa * p.a2 * p.b2 * ipow(t, n + i - k)),
      -one / (p.a2 * p.b2) * ipow(t, n - i - 1) *
          (one - p.a2 * p.b2 * ipow(t, i))};
}

template <typename Real>
std::array<Cplx<Real>, 3> lemma53_d(const Params<Real>& p, int k, int i) {
  const Cplx<Real> one(1), t = p.t, qa = p.qalpha;
  const int n = p.n;
  return {-qa / p.a1 * ipow(t, n + i - 1) *
              (one - p.a1 * p.b1 * ipow(t, n - i - 1)),
          -one / p.a2 * ipow(t, k - 1) *
              (one - qa * p.a2 * p.b2 * ipow(t, n + i - k)),
          ipow(t, n - 1) * (one - qa * ipow(t, n - k))};
}

template <typename Real>
std::array<Cplx<Real>, 3> appendix_c(const Params<Real>& p, int k, int i) {
  const Cplx<Real> one(1), t = p.t, qa = p.qalpha;
  const int n = p.n;
  return {-one / p.a2 * ipow(t, n - 1) *
              (one - qa * p.a1 * p.a2 * p.b1 * p.b2 * ipow(t, 2 * n - k - 1)),
          ipow(t, n + k - 2) *
              (one - qa * p.a1 * p.b1 * ipow(t, 2 * n - k - i)),
          -qa * ipow(t, 2 * n - 2) *
              (one - p.a1 * p.b1 * ipow(t, n - i))};
}

template <typename Real>
std::array<Cplx<Real>, 3> appendix_d(const Params<Real>& p, int k, int i) {
  const Cplx<Real> one(1), t = p.t, qa = p.qalpha;
  const int n = p.n;
  return {-one / p.a2 * ipow(t, n - 1) *
              (one - p.a2 * p.b2 * ipow(t, i - 1)),
          -one / p.a1 * ipow(t, n + i - 2) *
              (one - qa * p.a1 * p.b1 * ipow(t, 2 * n - k - i)),
          ipow(t, n + k - 2) * (one - qa * ipow(t, n - k))};
}

}  // namespace qselberg
