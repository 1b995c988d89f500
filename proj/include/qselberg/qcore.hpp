#pragma once

// Complex q-calculus primitives: shifted factorials, q-binomial
// coefficients, truncated infinite products, parameter containers and
// the genericity bookkeeping shared by every closed-form entry formula.

#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <string_view>

namespace qselberg {

template <typename Real>
using Cplx = std::complex<Real>;

// ---------------------------------------------------------------------------
// Error taxonomy (CLI exit codes in parentheses).

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct ParseError : Error { using Error::Error; };          // (2)
struct NearCoincident : Error { using Error::Error; };      // (3)
struct NonGeneric : Error { using Error::Error; };          // (4)
struct NotConverged : Error { using Error::Error; };        // (5)
struct NonConvergent : Error { using Error::Error; };       // (5)
struct PoleHit : Error { using Error::Error; };             // (6)
struct DivisionByZero : Error { using Error::Error; };
struct CapExceeded : Error { using Error::Error; };
struct SeriesDiverged : Error { using Error::Error; };
struct Unsupported : Error { using Error::Error; };
struct IndexOutOfRange : Error { using Error::Error; };

// ---------------------------------------------------------------------------
// Parameter tuple (q, t = q^tau, q^alpha, a1, a2, b1, b2, n).
//
// Only q^alpha and t are stored, never alpha or tau themselves, so no
// complex power with a branch choice is ever evaluated.  The alpha-shift
// T_alpha acts as qalpha -> q * qalpha.

template <typename Real>
struct Params {
  Cplx<Real> q, t, qalpha, a1, a2, b1, b2;
  int n = 1;

  Params shifted_alpha() const {
    Params p = *this;
    p.qalpha = q * qalpha;
    return p;
  }
  // T_{q,b_r}^{-1} T_{q,a_r}: a_r -> q a_r, b_r -> q^{-1} b_r.
  Params shifted_ab(int r) const {
    Params p = *this;
    if (r == 1) {
      p.a1 = q * a1;
      p.b1 = b1 / q;
    } else if (r == 2) {
      p.a2 = q * a2;
      p.b2 = b2 / q;
    } else {
      throw IndexOutOfRange("shifted_ab: pair index must be 1 or 2");
    }
    return p;
  }
  // Interchange (a1,b1) <-> (a2,b2); the overbar of the R-matrix section.
  Params swapped_pairs() const {
    Params p = *this;
    std::swap(p.a1, p.a2);
    std::swap(p.b1, p.b2);
    return p;
  }

  void validate() const {
    const Real aq = std::abs(q);
    if (!(aq > Real(0) && aq < Real(1)))
      throw NonGeneric("Params: need 0 < |q| < 1");
    for (const Cplx<Real>* v : {&t, &qalpha, &a1, &a2, &b1, &b2})
      if (*v == Cplx<Real>(0)) throw NonGeneric("Params: zero parameter");
    if (n < 0) throw IndexOutOfRange("Params: n must be nonnegative");
  }
};

// ---------------------------------------------------------------------------
// Small integer helpers used by the entry formulas.

// binom(m, 2) = m(m-1)/2, valid for any integer m (it is a polynomial).
inline long long binom2(long long m) { return m * (m - 1) / 2; }

inline long long binom3(long long m) { return m * (m - 1) * (m - 2) / 6; }

// Exact binomial coefficient for classical formulas; 0 off-triangle.
inline double binom(int m, int k) {
  if (k < 0 || k > m) return 0.0;
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * double(m - k + i) / double(i);
  return r;
}

// Integer power with negative exponents.
template <typename Real>
Cplx<Real> ipow(Cplx<Real> x, long long e) {
  if (e < 0) return Cplx<Real>(1) / ipow(x, -e);
  Cplx<Real> r(1), b = x;
  while (e > 0) {
    if (e & 1) r *= b;
    b *= b;
    e >>= 1;
  }
  return r;
}

// ---------------------------------------------------------------------------
// Genericity bookkeeping.  Every factor (1 - c^k x) that appears in the
// denominator of an implemented closed form can be routed through a tracker,
// which records the smallest scaled magnitude seen and what produced it.

struct GenericityTracker {
  double min_scaled = std::numeric_limits<double>::infinity();
  double threshold = 1e-12;
  std::string worst;

  template <typename Real>
  void note(const Cplx<Real>& factor, const Cplx<Real>& term,
            std::string_view label) {
    // scale: |1 - u| measured against 1 + |u|, so huge |u| does not mask
    // a genuine near-cancellation elsewhere.
    const double scaled =
        double(std::abs(factor)) / (1.0 + double(std::abs(term)));
    if (scaled < min_scaled) {
      min_scaled = scaled;
      worst = std::string(label);
    }
  }
  bool pass() const { return min_scaled >= threshold; }
};

struct GenericityVerdict {
  bool pass = true;
  double min_scaled = std::numeric_limits<double>::infinity();
  std::string worst_factor;
};

// ---------------------------------------------------------------------------
// c-shifted factorial (x; c)_i, three-branch definition:
//   i > 0:  prod_{k=0}^{i-1} (1 - c^k x)
//   i = 0:  1
//   i < 0:  1 / prod_{k=1}^{-i} (1 - c^{-k} x)

template <typename Real>
Cplx<Real> shifted_factorial(const Cplx<Real>& x, const Cplx<Real>& c, long long i) {
  Cplx<Real> r(1);
  if (i >= 0) {
    Cplx<Real> ck(1);
    for (long long k = 0; k < i; ++k) {
      r *= Cplx<Real>(1) - ck * x;
      ck *= c;
    }
    return r;
  }
  const Cplx<Real> cinv = Cplx<Real>(1) / c;
  Cplx<Real> ck = cinv;
  for (long long k = 1; k <= -i; ++k) {
    const Cplx<Real> f = Cplx<Real>(1) - ck * x;
    if (f == Cplx<Real>(0))
      throw DivisionByZero("shifted_factorial: vanishing denominator factor");
    r *= f;
    ck *= cinv;
  }
  return Cplx<Real>(1) / r;
}

// Same product, every factor recorded into the tracker; used wherever a
// shifted factorial sits in a denominator.  Always expands the positive-
// index product (callers divide by the result).
template <typename Real>
Cplx<Real> sf_den(const Cplx<Real>& x, const Cplx<Real>& c, long long i,
                  GenericityTracker* trk, std::string_view label) {
  Cplx<Real> r(1);
  if (i >= 0) {
    Cplx<Real> ck(1);
    for (long long k = 0; k < i; ++k) {
      const Cplx<Real> term = ck * x;
      const Cplx<Real> f = Cplx<Real>(1) - term;
      if (trk) trk->note(f, term, label);
      r *= f;
      ck *= c;
    }
  } else {
    r = shifted_factorial(x, c, i);
  }
  return r;
}

// ---------------------------------------------------------------------------
// c-binomial coefficient qbin(i, j; c) = (c;c)_i / ((c;c)_{i-j} (c;c)_j).
// Returns 0 outside 0 <= j <= i so triangular entry formulas self-truncate.

template <typename Real>
Cplx<Real> qbinom(long long i, long long j, const Cplx<Real>& c) {
  if (j < 0 || j > i) return Cplx<Real>(0);
  // (c;c)_i / (c;c)_{i-j} = prod_{k=i-j+1}^{i} (1 - c^k)
  Cplx<Real> num(1);
  for (long long k = i - j + 1; k <= i; ++k)
    num *= Cplx<Real>(1) - ipow(c, k);
  Cplx<Real> den(1);
  for (long long k = 1; k <= j; ++k)
    den *= Cplx<Real>(1) - ipow(c, k);
  if (den == Cplx<Real>(0))
    throw DivisionByZero("qbinom: (c;c)_j vanishes (degenerate base)");
  return num / den;
}

// ---------------------------------------------------------------------------
// (x; c)_infty truncated at the first M with |c^M x| < tail_tol.

template <typename Real>
struct InfiniteProductResult {
  Cplx<Real> value;
  int terms_used = 0;
  Real tail_bound = 0;
};

template <typename Real>
InfiniteProductResult<Real> infinite_product_full(const Cplx<Real>& x,
                                                  const Cplx<Real>& c,
                                                  Real tail_tol) {
  if (!(std::abs(c) < Real(1)))
    throw NonConvergent("infinite_product: requires |c| < 1");
  InfiniteProductResult<Real> out;
  out.value = Cplx<Real>(1);
  Cplx<Real> ck(1);
  const int max_terms = 100000;
  for (int m = 0; m < max_terms; ++m) {
    const Real mag = std::abs(ck * x);
    if (mag < tail_tol) {
      out.terms_used = m;
      // |log prod_{k>=m} (1 - c^k x)| <= sum |c^k x| = mag / (1 - |c|)
      out.tail_bound = mag / (Real(1) - std::abs(c));
      return out;
    }
    out.value *= Cplx<Real>(1) - ck * x;
    ck *= c;
  }
  throw NotConverged("infinite_product: term cap exceeded");
}

template <typename Real>
Cplx<Real> infinite_product(const Cplx<Real>& x, const Cplx<Real>& c,
                            Real tail_tol) {
  return infinite_product_full(x, c, tail_tol).value;
}

}  // namespace qselberg
