#pragma once

// Shared test utilities: deterministic random parameter samplers and
// residual helpers.

#include <cmath>
#include <random>

#include "qselberg/gauss.hpp"
#include "qselberg/jackson.hpp"
#include "qselberg/qcore.hpp"

namespace testutil {

using qselberg::Cplx;
using qselberg::CVector;
using qselberg::Params;

inline double relerr(const Cplx<double>& a, const Cplx<double>& b) {
  const double scale = std::max(std::abs(a), std::abs(b));
  if (scale == 0.0) return 0.0;
  return std::abs(a - b) / scale;
}

// |value| measured against an explicit scale (for zero claims).
inline double scaled_abs(const Cplx<double>& v, double scale) {
  return std::abs(v) / std::max(scale, 1e-300);
}

inline Cplx<double> rand_on_annulus(std::mt19937_64& rng, double lo,
                                    double hi) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double m = std::exp(std::log(lo) + u(rng) * (std::log(hi) - std::log(lo)));
  return std::polar(m, 2.0 * M_PI * u(rng));
}

// Generic parameter draw for the rational-function / matrix identities:
// moduli log-uniform in [0.2, 2], phases uniform, q real in (0.05, 0.8);
// resamples (up to 100 times) until the genericity verdict passes.
inline Params<double> sample_params(std::mt19937_64& rng, int n) {
  std::uniform_real_distribution<double> uq(0.05, 0.8);
  for (int attempt = 0; attempt < 100; ++attempt) {
    Params<double> p;
    p.n = n;
    p.q = Cplx<double>(uq(rng), 0.0);
    p.t = rand_on_annulus(rng, 0.2, 2.0);
    p.qalpha = rand_on_annulus(rng, 0.2, 2.0);
    p.a1 = rand_on_annulus(rng, 0.2, 2.0);
    p.a2 = rand_on_annulus(rng, 0.2, 2.0);
    p.b1 = rand_on_annulus(rng, 0.2, 2.0);
    p.b2 = rand_on_annulus(rng, 0.2, 2.0);
    if (qselberg::check_generic(p).pass) return p;
  }
  throw std::runtime_error("sample_params: no generic draw in 100 attempts");
}

// Convergence-friendly draw for Jackson-integral identities: |q| small and
// real, slot moduli > 1 so the bilateral sum decays fast both ways, |t| < 1,
// |q^alpha| tuned so lattice tails sit well above double noise but below the
// truncation budget.
inline Params<double> sample_jackson_params(std::mt19937_64& rng, int n) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int attempt = 0; attempt < 200; ++attempt) {
    Params<double> p;
    p.n = n;
    p.q = Cplx<double>(0.25 + 0.05 * u(rng), 0.0);
    p.t = rand_on_annulus(rng, 0.75, 0.85);
    p.a1 = rand_on_annulus(rng, 1.4, 1.7);
    p.a2 = rand_on_annulus(rng, 1.4, 1.7);
    p.b1 = rand_on_annulus(rng, 1.4, 1.7);
    p.b2 = rand_on_annulus(rng, 1.4, 1.7);
    const double target = (n <= 1) ? 0.72 : 0.60;
    p.qalpha = std::polar(target * (0.95 + 0.1 * u(rng)),
                          2.0 * M_PI * u(rng));
    if (!qselberg::check_convergence(p)) continue;
    if (!qselberg::check_convergence(p.shifted_alpha())) continue;
    if (!qselberg::check_generic(p).pass) continue;
    return p;
  }
  throw std::runtime_error("sample_jackson_params: no draw in 200 attempts");
}

// Base point for Jackson sums: perturbed geometric progression xi_i ~ t^i,
// kept away from lattice poles by the random perturbation.
inline CVector<double> sample_base_point(std::mt19937_64& rng,
                                         const Params<double>& p) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  CVector<double> xi(p.n);
  for (int i = 0; i < p.n; ++i)
    xi[i] = qselberg::ipow(p.t, i) *
            std::polar(0.9 + 0.2 * u(rng), 2.0 * M_PI * u(rng));
  return xi;
}

inline CVector<double> random_point(std::mt19937_64& rng, int n, double lo = 0.3,
                                    double hi = 1.8) {
  CVector<double> z(n);
  for (int i = 0; i < n; ++i) z[i] = rand_on_annulus(rng, lo, hi);
  return z;
}

}  // namespace testutil
