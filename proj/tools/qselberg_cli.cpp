// Command-line front end: polynomial evaluation, transition/coefficient
// matrices, truncated Jackson integrals, and the verification suites.
// All results are JSON on stdout; diagnostics go to stderr.
//
// Exit codes: 0 success, 1 generic failure (including suite failures),
// 2 parse error, 3 near-coincident geometry, 4 non-generic parameters,
// 5 convergence violation, 6 pole hit.

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "qselberg/verify.hpp"

using namespace qselberg;
using nlohmann::json;
using C = Cplx<double>;
using V = CVector<double>;
using M = CMatrix<double>;

namespace {

json cplx_json(const C& z) { return json::array({z.real(), z.imag()}); }

json vec_json(const V& v) {
  json a = json::array();
  for (int i = 0; i < int(v.size()); ++i) a.push_back(cplx_json(v[i]));
  return a;
}

json mat_json(const M& m) {
  json rows = json::array();
  for (int i = 0; i < int(m.rows()); ++i) {
    json row = json::array();
    for (int j = 0; j < int(m.cols()); ++j) row.push_back(cplx_json(m(i, j)));
    rows.push_back(row);
  }
  return rows;
}

json rmat_json(const RMatrix<double>& m) {
  json rows = json::array();
  for (int i = 0; i < int(m.rows()); ++i) {
    json row = json::array();
    for (int j = 0; j < int(m.cols()); ++j) row.push_back(m(i, j));
    rows.push_back(row);
  }
  return rows;
}

// "re" or "re,im".
C parse_complex(const std::string& s) {
  try {
    size_t pos = 0;
    const double re = std::stod(s, &pos);
    if (pos == s.size()) return C(re, 0.0);
    if (s[pos] != ',') throw ParseError("bad complex literal: '" + s + "'");
    size_t pos2 = 0;
    const std::string rest = s.substr(pos + 1);
    const double im = std::stod(rest, &pos2);
    if (pos2 != rest.size())
      throw ParseError("bad complex literal: '" + s + "'");
    return C(re, im);
  } catch (const std::logic_error&) {
    throw ParseError("bad complex literal: '" + s + "'");
  }
}

C parse_complex(const json& j, const std::string& key) {
  if (j.is_number()) return C(j.get<double>(), 0.0);
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
    return C(j[0].get<double>(), j[1].get<double>());
  throw ParseError("config field '" + key + "' must be a number or [re, im]");
}

// Semicolon-separated complex coordinates.
V parse_point(const std::string& s) {
  std::vector<C> coords;
  size_t start = 0;
  while (start <= s.size()) {
    const size_t sep = s.find(';', start);
    const std::string tok =
        s.substr(start, sep == std::string::npos ? std::string::npos
                                                 : sep - start);
    if (!tok.empty()) coords.push_back(parse_complex(tok));
    if (sep == std::string::npos) break;
    start = sep + 1;
  }
  if (coords.empty()) throw ParseError("empty point literal");
  V z(long(coords.size()));
  for (size_t i = 0; i < coords.size(); ++i) z[long(i)] = coords[i];
  return z;
}

// Grammar: family[i](slotA,slotB) or family[k,i](slotA,slotB).
PolySpec parse_poly_spec(const std::string& s) {
  const size_t lb = s.find('[');
  const size_t rb = s.find(']');
  const size_t lp = s.find('(');
  const size_t rp = s.find(')');
  if (lb == std::string::npos || rb == std::string::npos || rb < lb ||
      lp == std::string::npos || rp == std::string::npos || rp < lp || lp < rb)
    throw ParseError("poly spec must look like family[k,i](slotA,slotB): '" +
                     s + "'");
  const std::string family = s.substr(0, lb);
  const std::string idx = s.substr(lb + 1, rb - lb - 1);
  const std::string slots = s.substr(lp + 1, rp - lp - 1);

  PolySpec spec;
  int nidx = 1;
  if (family == "matsuo") {
    spec.family = PolyFamily::Matsuo;
  } else if (family == "matsuoprod") {
    spec.family = PolyFamily::MatsuoTimesProd;
  } else if (family == "etilde") {
    spec.family = PolyFamily::Etilde;
    nidx = 2;
  } else if (family == "etildeprime") {
    spec.family = PolyFamily::EtildePrime;
    nidx = 2;
  } else if (family == "lagrange") {
    spec.family = PolyFamily::LagrangeF;
    spec.base = LagrangeBase::T;
  } else if (family == "lagrangeinv") {
    spec.family = PolyFamily::LagrangeF;
    spec.base = LagrangeBase::TInverse;
  } else {
    throw ParseError("unknown polynomial family: '" + family + "'");
  }

  try {
    const size_t comma = idx.find(',');
    if (nidx == 1) {
      if (comma != std::string::npos)
        throw ParseError("family '" + family + "' takes one index: '" + idx +
                         "'");
      spec.i = std::stoi(idx);
    } else {
      if (comma == std::string::npos)
        throw ParseError("family '" + family + "' takes two indices: '" + idx +
                         "'");
      spec.k = std::stoi(idx.substr(0, comma));
      spec.i = std::stoi(idx.substr(comma + 1));
    }
  } catch (const std::logic_error&) {
    throw ParseError("bad index list: '" + idx + "'");
  }

  if (slots == "a1,b2")
    spec.slots = SlotPair::A1B2;
  else if (slots == "a2,b1")
    spec.slots = SlotPair::A2B1;
  else if (slots == "a1,b1")
    spec.slots = SlotPair::A1B1;
  else if (slots == "a2,b2")
    spec.slots = SlotPair::A2B2;
  else if (slots == "a1,a2")
    spec.slots = SlotPair::A1A2;
  else if (slots == "b1inv,b2inv")
    spec.slots = SlotPair::B1invB2inv;
  else
    throw ParseError("unknown slot pair: '" + slots + "'");
  return spec;
}

// Parameter assembly: built-in defaults, then config file, then flags.
struct ParamFlags {
  std::string q, t, qalpha, a1, a2, b1, b2;
  double alpha = 0, tau = 0;
  bool has_alpha = false, has_tau = false;
  int n = -1;
};

Params<double> assemble_params(const ParamFlags& fl, const json& cfg) {
  const auto pick = [&](const std::string& flag, const char* key,
                        const C& fallback) {
    if (!flag.empty()) return parse_complex(flag);
    if (cfg.contains(key)) return parse_complex(cfg[key], key);
    return fallback;
  };
  Params<double> p;
  p.q = pick(fl.q, "q", C(0.28));
  p.t = pick(fl.t, "t", C(0.8));
  p.qalpha = pick(fl.qalpha, "qalpha", C(0.7));
  p.a1 = pick(fl.a1, "a1", C(1.5));
  p.a2 = pick(fl.a2, "a2", C(1.6));
  p.b1 = pick(fl.b1, "b1", C(1.55));
  p.b2 = pick(fl.b2, "b2", C(1.45));
  p.n = fl.n >= 0 ? fl.n : (cfg.contains("n") ? cfg["n"].get<int>() : 1);

  // Real-exponent convenience form: t = q^tau, q^alpha = q^alpha.
  const bool has_tau = fl.has_tau || cfg.contains("tau");
  const bool has_alpha = fl.has_alpha || cfg.contains("alpha");
  if (has_tau || has_alpha) {
    if (p.q.imag() != 0.0 || p.q.real() <= 0.0)
      throw ParseError("exponent form (alpha, tau) requires real positive q");
    if (has_tau) {
      const double tau = fl.has_tau ? fl.tau : cfg["tau"].get<double>();
      p.t = C(std::pow(p.q.real(), tau));
    }
    if (has_alpha) {
      const double alpha =
          fl.has_alpha ? fl.alpha : cfg["alpha"].get<double>();
      p.qalpha = C(std::pow(p.q.real(), alpha));
    }
  }
  p.validate();
  return p;
}

void require_generic(const Params<double>& p) {
  const auto v = check_generic(p);
  if (!v.pass)
    throw NonGeneric("non-generic parameters; vanishing factor: " +
                     v.worst_factor);
}

void emit(const json& j) { std::cout << j.dump(2) << "\n"; }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"symmetric q-Selberg transition matrices and Jackson integrals"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path;
  std::uint64_t seed = 1;
  int threads = 1;
  bool deterministic = false;
  app.add_option("--config", config_path, "JSON config file (flags override)");
  app.add_option("--seed", seed, "random seed");
  app.add_option("--threads", threads, "worker threads for suites");
  app.add_flag("--deterministic", deterministic,
               "byte-reproducible reports (runtime_ms = 0)");

  ParamFlags fl;
  app.add_option("--q", fl.q, "q as re[,im]");
  app.add_option("--t", fl.t, "t as re[,im]");
  app.add_option("--qalpha", fl.qalpha, "q^alpha as re[,im]");
  app.add_option("--a1", fl.a1);
  app.add_option("--a2", fl.a2);
  app.add_option("--b1", fl.b1);
  app.add_option("--b2", fl.b2);
  auto* oalpha = app.add_option("--alpha", fl.alpha, "real exponent: q^alpha");
  auto* otau = app.add_option("--tau", fl.tau, "real exponent: t = q^tau");
  app.add_option("--n", fl.n, "number of integration variables");

  auto* cmd_eval = app.add_subcommand("eval", "evaluate a polynomial");
  std::string poly_str, z_str;
  cmd_eval->add_option("--poly", poly_str, "family[k,i](slotA,slotB)")
      ->required();
  cmd_eval->add_option("--z", z_str, "point, ';'-separated re[,im]")
      ->required();

  auto* cmd_matrix = app.add_subcommand("matrix", "build a system matrix");
  std::string which, order_str = "ldu";
  bool check = false, classical = false;
  double cx = 2.0, calpha = 0.7, cbeta = 0.9, cgamma = 1.1, ctau = 0.5;
  cmd_matrix->add_option("which", which, "R | Rinv | A | K1 | K2 | M")
      ->required();
  cmd_matrix->add_option("--order", order_str, "ldu | udl");
  cmd_matrix->add_flag("--check", check,
                       "also emit the opposing decomposition and residual");
  cmd_matrix->add_flag("--classical", classical, "classical parameters for M");
  cmd_matrix->add_option("--x", cx, "classical x");
  cmd_matrix->add_option("--beta", cbeta, "classical beta");
  cmd_matrix->add_option("--gamma", cgamma, "classical gamma");

  auto* cmd_integral =
      app.add_subcommand("integral", "truncated Jackson integral bracket");
  std::string ipoly_str = "matsuo[0](a1,b2)", xi_str;
  int iN = 40;
  double tail_tol = 1e-6;
  int alpha_shift = 0, ab1 = 0, ab2 = 0;
  cmd_integral->add_option("--poly", ipoly_str, "bracket polynomial");
  cmd_integral->add_option("--xi", xi_str, "base point (default: seeded draw)");
  cmd_integral->add_option("--N", iN, "truncation radius");
  cmd_integral->add_option("--tail-tol", tail_tol, "outer-shell tolerance");
  cmd_integral->add_option("--alpha-shift", alpha_shift,
                           "applications of the alpha shift");
  cmd_integral->add_option("--ab-shift1", ab1, "applications of the (a1,b1) shift");
  cmd_integral->add_option("--ab-shift2", ab2, "applications of the (a2,b2) shift");

  auto* cmd_verify = app.add_subcommand("verify", "run a verification suite");
  std::string suite = "all", out_path;
  int seeds = 2, n_max = 2;
  cmd_verify->add_option("--suite", suite,
                         "classical | polynomials | matrices | integrals-n1 | "
                         "integrals-n2 | all | none");
  cmd_verify->add_option("--seeds", seeds, "parameter draws per family");
  cmd_verify->add_option("--n-max", n_max, "largest matrix size for suites");
  cmd_verify->add_option("--out", out_path, "also write the report here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    json cfg = json::object();
    if (!config_path.empty()) {
      std::ifstream in(config_path);
      if (!in) throw ParseError("cannot open config file: " + config_path);
      in >> cfg;
      if (cfg.contains("seed") && !app.count("--seed"))
        seed = cfg["seed"].get<std::uint64_t>();
      if (cfg.contains("threads") && !app.count("--threads"))
        threads = cfg["threads"].get<int>();
      if (cfg.contains("deterministic") && !app.count("--deterministic"))
        deterministic = cfg["deterministic"].get<bool>();
    }
    fl.has_alpha = oalpha->count() > 0;
    fl.has_tau = otau->count() > 0;

    if (cmd_eval->parsed()) {
      const PolySpec spec = parse_poly_spec(poly_str);
      const V z = parse_point(z_str);
      ParamFlags f2 = fl;
      if (f2.n < 0) f2.n = int(z.size());
      const auto p = assemble_params(f2, cfg);
      const C value = eval_poly(spec, p, z);
      emit(json{{"command", "eval"},
                {"spec", poly_str},
                {"point", vec_json(z)},
                {"value", cplx_json(value)}});
      return 0;
    }

    if (cmd_matrix->parsed()) {
      const FactorOrder order =
          order_str == "udl" ? FactorOrder::UDL : FactorOrder::LDU;
      if (order_str != "ldu" && order_str != "udl")
        throw ParseError("unknown order: '" + order_str + "'");
      json out{{"command", "matrix"}, {"which", which}, {"order", order_str}};

      if (which == "M") {
        ClassicalParams<double> cp;
        cp.n = fl.n >= 0 ? fl.n : 1;
        cp.x = cx;
        cp.alpha = fl.has_alpha ? fl.alpha : calpha;
        cp.beta = cbeta;
        cp.gamma = cgamma;
        cp.tau = otau->count() ? fl.tau : ctau;
        (void)classical;
        const auto f = build_classical_M(cp, order == FactorOrder::LDU);
        out["n"] = cp.n;
        out["factors"] = json{{"lower", rmat_json(f.lower)},
                              {"diag", rmat_json(f.diag)},
                              {"upper", rmat_json(f.upper)}};
        out["product"] = rmat_json(f.product());
        if (check) {
          const auto g = build_classical_M(cp, order != FactorOrder::LDU);
          const RMatrix<double> d = f.product() - g.product();
          out["check"] = json{
              {"order", order == FactorOrder::LDU ? "udl" : "ldu"},
              {"product", rmat_json(g.product())},
              {"residual", d.cwiseAbs().maxCoeff() /
                               std::max(1.0, f.product().cwiseAbs().maxCoeff())}};
        }
        emit(out);
        return 0;
      }

      const auto p = assemble_params(fl, cfg);
      require_generic(p);
      out["n"] = p.n;
      if (which == "R" || which == "A" || which == "Rinv") {
        const auto build = [&](FactorOrder o) {
          if (which == "R") return build_R_factors(p, o);
          if (which == "Rinv") return build_R_inverse(p, o);
          return build_A_factors(p, o);
        };
        const auto f = build(order);
        out["factors"] = json{{"lower", mat_json(f.lower)},
                              {"diag", mat_json(f.diag)},
                              {"upper", mat_json(f.upper)}};
        out["product"] = mat_json(f.product());
        if (check) {
          const auto g = build(order == FactorOrder::LDU ? FactorOrder::UDL
                                                         : FactorOrder::LDU);
          const M d = f.product() - g.product();
          out["check"] = json{
              {"order", order == FactorOrder::LDU ? "udl" : "ldu"},
              {"product", mat_json(g.product())},
              {"residual", d.cwiseAbs().maxCoeff() /
                               std::max(1.0,
                                        f.product().cwiseAbs().maxCoeff())}};
        }
      } else if (which == "K1" || which == "K2") {
        out["matrix"] = mat_json(build_K(p, which == "K1" ? 1 : 2));
      } else {
        throw ParseError("unknown matrix: '" + which + "'");
      }
      emit(out);
      return 0;
    }

    if (cmd_integral->parsed()) {
      const auto p = assemble_params(fl, cfg);
      BracketSpec<double> bs;
      bs.poly = parse_poly_spec(ipoly_str);
      bs.alpha_shift = alpha_shift;
      bs.ab_shift1 = ab1;
      bs.ab_shift2 = ab2;
      V xi;
      if (!xi_str.empty()) {
        xi = parse_point(xi_str);
        if (int(xi.size()) != p.n)
          throw ParseError("--xi must have n coordinates");
      } else {
        std::mt19937_64 rng(seed);
        xi = verify_detail::base_point(rng, p);
      }
      TruncationSpec<double> ts;
      ts.N = iN;
      ts.tail_tol = tail_tol;
      ts.deterministic = deterministic;
      const auto res = bracket(p, xi, ts, bs);
      emit(json{{"command", "integral"},
                {"poly", ipoly_str},
                {"xi", vec_json(xi)},
                {"value", cplx_json(res.value)},
                {"N", res.N},
                {"shells_used", res.shells_used},
                {"tail_estimate", res.tail_estimate},
                {"gauge", "phi_at_xi_normalized"}});
      return 0;
    }

    // verify
    SuiteConfig sc;
    sc.suite = suite;
    sc.seed = seed;
    sc.seeds = seeds;
    sc.n_max = n_max;
    sc.threads = threads;
    sc.deterministic = deterministic;
    if (!config_path.empty()) {
      if (cfg.contains("suite") && !cmd_verify->count("--suite"))
        sc.suite = cfg["suite"].get<std::string>();
      if (cfg.contains("seeds") && !cmd_verify->count("--seeds"))
        sc.seeds = cfg["seeds"].get<int>();
      if (cfg.contains("n_max") && !cmd_verify->count("--n-max"))
        sc.n_max = cfg["n_max"].get<int>();
    }
    if (sc.suite != "classical" && sc.suite != "polynomials" &&
        sc.suite != "matrices" && sc.suite != "integrals-n1" &&
        sc.suite != "integrals-n2" && sc.suite != "all" && sc.suite != "none")
      throw ParseError("unknown suite: '" + sc.suite + "'");
    const auto sr = run_suite(sc);
    const std::string payload = serialize(sr);
    std::cout << payload;
    if (!out_path.empty()) {
      std::ofstream out(out_path);
      out << payload;
    }
    return sr.summary.failed == 0 ? 0 : 1;
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const IndexOutOfRange& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const NearCoincident& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const NonGeneric& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  } catch (const NotConverged& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 5;
  } catch (const NonConvergent& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 5;
  } catch (const PoleHit& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 6;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
