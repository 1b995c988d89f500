// Acceptance checks.  Each criterion prints exactly one line:
//   PASS  <name>  (<elapsed>s)   or   FAIL  <name>  (<detail>)
// The process exits nonzero if any criterion fails.

#include <chrono>
#include <cstdio>
#include <random>
#include <string>

#include "qselberg/verify.hpp"

using namespace qselberg;
using C = Cplx<double>;
using M = CMatrix<double>;
using Md = RMatrix<double>;
using Clock = std::chrono::steady_clock;

namespace {

int g_failures = 0;

struct Criterion {
  std::string name;
  Clock::time_point start = Clock::now();
  double worst = 0.0;
  std::string detail;
  bool ok = true;

  explicit Criterion(std::string nm) : name(std::move(nm)) {}

  void check(double residual, double tol, const std::string& where) {
    if (residual > worst) worst = residual;
    if (!(residual <= tol) && ok) {
      ok = false;
      detail = where + ": residual " + std::to_string(residual);
    }
  }
  void require(bool cond, const std::string& where) {
    if (!cond && ok) {
      ok = false;
      detail = where;
    }
  }
  void finish(double budget_s) {
    const double el =
        std::chrono::duration<double>(Clock::now() - start).count();
    if (ok && el > budget_s) {
      ok = false;
      detail = "exceeded time budget (" + std::to_string(el) + "s)";
    }
    if (ok) {
      std::printf("PASS  %-34s (%.2fs, worst residual %.3e)\n", name.c_str(),
                  el, worst);
    } else {
      std::printf("FAIL  %-34s (%s)\n", name.c_str(), detail.c_str());
      ++g_failures;
    }
  }
};

double rel(const M& a, const M& b) {
  const double s = std::max({1.0, a.cwiseAbs().maxCoeff(),
                             b.cwiseAbs().maxCoeff()});
  return (a - b).cwiseAbs().maxCoeff() / s;
}

ClassicalParams<double> sample_classical(std::mt19937_64& rng, int n) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  ClassicalParams<double> cp;
  cp.n = n;
  cp.x = 1.5 + 2.0 * u(rng);
  cp.alpha = 0.3 + 1.2 * u(rng);
  cp.beta = 0.3 + 1.2 * u(rng);
  cp.gamma = 0.3 + 1.2 * u(rng);
  cp.tau = 0.2 + 0.8 * u(rng);
  return cp;
}

// (1) The two elimination orders agree for R, A, and the classical M.
void criterion_factorization_orders() {
  Criterion c("factorization-orders");
  for (int sd = 1; sd <= 100; ++sd) {
    std::mt19937_64 rng(0xacc1u ^ (std::uint64_t(sd) << 16));
    const int n = 1 + (sd - 1) % 8;
    const auto p = verify_detail::sample_rational(rng, n);
    // Triple-product roundoff scales with the factor magnitudes.
    const auto two_orders = [&](const auto& f1, const auto& f2) {
      const double s =
          std::max({1.0,
                    f1.lower.cwiseAbs().maxCoeff() *
                        f1.diag.cwiseAbs().maxCoeff() *
                        f1.upper.cwiseAbs().maxCoeff(),
                    f2.lower.cwiseAbs().maxCoeff() *
                        f2.diag.cwiseAbs().maxCoeff() *
                        f2.upper.cwiseAbs().maxCoeff()});
      return (f1.product() - f2.product()).cwiseAbs().maxCoeff() / s;
    };
    c.check(two_orders(build_R_factors(p, FactorOrder::LDU),
                       build_R_factors(p, FactorOrder::UDL)),
            1e-10, "R seed " + std::to_string(sd));
    c.check(two_orders(build_A_factors(p, FactorOrder::LDU),
                       build_A_factors(p, FactorOrder::UDL)),
            1e-10, "A seed " + std::to_string(sd));
    const auto cp = sample_classical(rng, n);
    c.check(two_orders(build_classical_M(cp, true),
                       build_classical_M(cp, false)),
            1e-10, "M seed " + std::to_string(sd));
  }
  c.finish(10.0);
}

// (2) Factored R equals the direct construction for n = 1..5.
void criterion_factored_vs_direct() {
  Criterion c("factored-R-vs-direct");
  for (int sd = 1; sd <= 20; ++sd) {
    std::mt19937_64 rng(0xacc2u ^ (std::uint64_t(sd) << 16));
    for (int n = 1; n <= 5; ++n) {
      const auto p = verify_detail::sample_rational(rng, n);
      c.check(rel(build_R_factors(p, FactorOrder::LDU).product(),
                  build_R_direct(p)),
              1e-9, "seed " + std::to_string(sd) + " n " + std::to_string(n));
    }
  }
  c.finish(30.0);
}

// (3) Closed-form inverses and determinants.
void criterion_inverses_and_determinants() {
  Criterion c("inverses-and-determinants");
  for (int sd = 1; sd <= 10; ++sd) {
    std::mt19937_64 rng(0xacc3u ^ (std::uint64_t(sd) << 16));
    const int n = 1 + (sd - 1) % 8;
    const auto p = verify_detail::sample_rational(rng, n);
    const M id = M::Identity(n + 1, n + 1);
    const auto inv_check = [&](const M& x, const M& xinv,
                               const std::string& what) {
      const double cond = std::max(
          1.0, x.cwiseAbs().maxCoeff() * xinv.cwiseAbs().maxCoeff());
      c.check((x * xinv - id).cwiseAbs().maxCoeff() / cond, 1e-10,
              what + " seed " + std::to_string(sd));
    };
    inv_check(build_R_factors(p, FactorOrder::LDU).product(),
              build_R_inverse(p, FactorOrder::LDU).product(), "R*Rinv");
    inv_check(build_A_factors(p, FactorOrder::LDU).upper,
              build_intermediate(p, Intermediate::UAInverse), "UA*UAinv");
    inv_check(build_A_factors(p, FactorOrder::UDL).lower,
              build_intermediate(p, Intermediate::LprimeAInverse),
              "LpA*LpAinv");
    const auto det_check = [&](const C& closed, const M& x,
                               const std::string& what) {
      const C ref = x.determinant();
      c.check(std::abs(closed - ref) / std::max(1.0, std::abs(ref)), 1e-9,
              what + " seed " + std::to_string(sd));
    };
    det_check(det_R(p), build_R_factors(p, FactorOrder::LDU).product(), "detR");
    det_check(det_A(p), build_A_factors(p, FactorOrder::LDU).product(), "detA");
    det_check(det_K1(p), build_K(p, 1), "detK1");
    det_check(det_K2(p), build_K(p, 2), "detK2");
  }
  c.finish(10.0);
}

void run_suite_criterion(const std::string& name, const std::string& suite,
                         double budget_s) {
  Criterion c(name);
  SuiteConfig cfg;
  cfg.suite = suite;
  cfg.seed = 42;
  cfg.seeds = 1;
  cfg.n_max = 4;
  const auto sr = run_suite(cfg);
  c.require(sr.summary.total > 0, "suite produced no reports");
  for (const auto& r : sr.reports)
    if (!r.pass)
      c.require(false, r.identity_id + ": relative residual " +
                           std::to_string(r.relative_residual));
  c.finish(budget_s);
}

// (4) Every polynomial identity holds for n up to 4.
void criterion_polynomial_identities() {
  run_suite_criterion("polynomial-identities", "polynomials", 60.0);
}

// (5) Truncated Jackson-integral identities: three-term relations, the
// difference-system rows, nabla vanishing, and decreasing tails.
void criterion_jackson_integrals() {
  Criterion c("jackson-integrals");
  for (const char* suite : {"integrals-n1", "integrals-n2"}) {
    SuiteConfig cfg;
    cfg.suite = suite;
    cfg.seed = 42;
    cfg.seeds = 1;
    const auto sr = run_suite(cfg);
    c.require(sr.summary.total > 0, std::string(suite) + " produced nothing");
    for (const auto& r : sr.reports)
      if (!r.pass)
        c.require(false, r.identity_id + ": relative residual " +
                             std::to_string(r.relative_residual));
  }
  c.finish(300.0);
}

// (6) Classical limit: contiguous relations at 20 points and the n = 1
// difference-system row under the hypergeometric substitution.
void criterion_classical_limit() {
  Criterion c("classical-limit");
  std::mt19937_64 rng(0xacc6u);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int rep = 0; rep < 20; ++rep) {
    const double a = 0.2 + 1.5 * u(rng), b = 0.2 + 1.5 * u(rng);
    const double cc = a + 0.3 + 1.2 * u(rng), x = 0.05 + 0.6 * u(rng);
    c.check(std::abs(contiguous_residual(1, a, b, cc, x)), 1e-12,
            "contiguous-1 rep " + std::to_string(rep));
    c.check(std::abs(contiguous_residual(2, a, b, cc, x)), 1e-12,
            "contiguous-2 rep " + std::to_string(rep));
  }
  for (int rep = 0; rep < 5; ++rep) {
    const double a = 0.3 + 1.0 * u(rng), b = 0.3 + 1.0 * u(rng);
    const double cc = a + 0.4 + 1.0 * u(rng), X = 0.1 + 0.5 * u(rng);
    ClassicalParams<double> p1;
    p1.n = 1;
    p1.x = 1.0 / X;
    p1.alpha = a;
    p1.beta = cc - a;
    p1.gamma = -b;
    p1.tau = 0.5;
    const Md m = build_classical_M(p1, true).product();
    Eigen::RowVector2d row(bracket_e_n1(0, false, a, b, cc, X),
                           bracket_e_n1(1, false, a, b, cc, X));
    Eigen::RowVector2d shifted(bracket_e_n1(0, true, a, b, cc, X),
                               bracket_e_n1(1, true, a, b, cc, X));
    c.check((shifted - row * m).cwiseAbs().maxCoeff() /
                std::max(1.0, row.cwiseAbs().maxCoeff()),
            1e-11, "system-row rep " + std::to_string(rep));
  }
  c.finish(1.0);
}

// (7) Deterministic reruns serialize to identical bytes.
void criterion_deterministic_reports() {
  Criterion c("deterministic-reports");
  SuiteConfig cfg;
  cfg.suite = "classical";
  cfg.seed = 42;
  cfg.seeds = 2;
  cfg.deterministic = true;
  const std::string a = serialize(run_suite(cfg));
  const std::string b = serialize(run_suite(cfg));
  c.require(!a.empty(), "empty serialization");
  c.require(a == b, "reruns differ byte-wise");
  cfg.threads = 4;
  auto sr = run_suite(cfg);
  sr.config.threads = 1;
  c.require(serialize(sr) == a, "threaded run differs byte-wise");
  c.finish(30.0);
}

}  // namespace

int main() {
  criterion_factorization_orders();
  criterion_factored_vs_direct();
  criterion_inverses_and_determinants();
  criterion_polynomial_identities();
  criterion_jackson_integrals();
  criterion_classical_limit();
  criterion_deterministic_reports();
  return g_failures == 0 ? 0 : 1;
}
