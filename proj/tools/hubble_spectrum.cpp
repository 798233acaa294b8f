// hubble_spectrum: command-line front end for the inverted-oscillator tools.
//   eval    evaluate H_nu, the eigenfunction families or the fundamental pair
//   kernel  tabulate the Green's kernel on a square grid
//   map     classify a lambda grid against the L^p strip
//   verify  run invariant suites
// Exit codes: 0 success, 1 numerical failure, 2 validation failure.

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <numbers>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "hubble/spectrum.hpp"

using namespace hubble;
using json = nlohmann::json;

namespace {

cplx parse_complex(const std::string& s) {
  const auto comma = s.find(',');
  if (comma == std::string::npos || s.find(',', comma + 1) != std::string::npos)
    throw DomainError("expected a complex number as re,im but got '" + s + "'");
  const cplx z(parse_double(s.substr(0, comma)), parse_double(s.substr(comma + 1)));
  if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) throw DomainError("non-finite value '" + s + "'");
  return z;
}

std::pair<double, double> parse_range(const std::string& s) {
  const cplx r = parse_complex(s);
  return {r.real(), r.imag()};
}

std::string num(double v) { return format_double(v); }

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DomainError("cannot open '" + path + "' for writing");
  return out;
}

// Im lambda < 0 is only served through the conjugate problem, and only when
// asked for explicitly.
cplx upper_half(cplx lambda, bool conjugate) {
  if (lambda.imag() >= 0.0) return lambda;
  if (!conjugate) throw DomainError("Im lambda < 0: pass --conjugate to evaluate via the conjugate problem");
  return std::conj(lambda);
}

QuadratureConfig load_config(const std::string& path) {
  QuadratureConfig cfg;
  if (path.empty()) return cfg;
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    if (!value.is_number()) throw ConfigError("config field '" + key + "' must be a number");
    if (key == "half_width") cfg.half_width = value.get<double>();
    else if (key == "base_step") cfg.base_step = value.get<double>();
    else if (key == "phase_resolution") cfg.phase_resolution = value.get<double>();
    else throw ConfigError("unknown config field '" + key + "'");
  }
  cfg.validate();
  return cfg;
}

// ---- eval

struct EvalArgs {
  bool hermite = false, conjugate = false;
  std::string nu, z, family, lambda;
  double x = 0.0;
};

void print_result(cplx value, double est, SectorTag sector) {
  std::cout << "value " << num(value.real()) << ' ' << num(value.imag()) << '\n'
            << "est_abs_error " << num(est) << '\n'
            << "sector " << to_string(sector) << '\n';
}

int cmd_eval(const EvalArgs& a) {
  if (a.hermite) {
    if (a.nu.empty() || a.z.empty()) throw DomainError("--hermite needs --nu and --z");
    const EvalResult r = hermite_nu(parse_complex(a.nu), parse_complex(a.z));
    print_result(r.value, r.est_abs_error, r.sector_used);
    return 0;
  }
  if (a.family.empty() || a.lambda.empty()) throw DomainError("eval needs --hermite or --family with --lambda");
  const cplx lambda = parse_complex(a.lambda);
  const cplx up = upper_half(lambda, a.conjugate);
  const bool flip = up != lambda;
  EvalResult r;
  if (a.family == "psi_nu" || a.family == "psi_neg") {
    const SpectralPoint pt = SpectralPoint::from_lambda(up);
    r = a.family == "psi_nu" ? psi_nu_eval(pt, a.x) : psi_neg_eval(pt, a.x);
  } else {
    const FundamentalPair pr = build_fundamental_pair(up);
    r = psi_nu_eval(pr.point, a.family == "phi_acute" ? a.x : -a.x);
    r.value /= pr.coeffs.c;
    r.est_abs_error /= std::abs(pr.coeffs.c);
  }
  if (flip) {
    r.value = std::conj(r.value);
    std::cerr << "note: evaluated at conj(lambda) = " << num(up.real()) << ',' << num(up.imag()) << " and conjugated\n";
  }
  print_result(r.value, r.est_abs_error, r.sector_used);
  return 0;
}

// ---- kernel

struct KernelArgs {
  std::string lambda, out;
  double box = 10.0;
  int n = 101;
  bool check_symmetry = false, conjugate = false;
};

int cmd_kernel(const KernelArgs& a) {
  if (a.n < 2) throw GridError("kernel: grid needs at least 2 nodes per axis");
  if (!(a.box > 0.0)) throw DomainError("kernel: --box must be positive");
  const cplx lambda = parse_complex(a.lambda);
  const cplx up = upper_half(lambda, a.conjugate);
  const bool flip = up != lambda;
  const FundamentalPair pr = build_fundamental_pair(up);
  const PairSamples s = sample_pair(pr, uniform_grid(-a.box, a.box, std::size_t(a.n)));

  std::ofstream file;
  if (!a.out.empty()) file = open_out(a.out);
  std::ostream& out = a.out.empty() ? std::cout : file;
  out << "x,xp,re,im,envelope\n";
  double constant = 0.0;
  for (std::size_t i = 0; i < s.x.size(); ++i)
    for (std::size_t j = 0; j < s.x.size(); ++j) {
      cplx v = s.kernel(pr, i, j);
      if (flip) v = std::conj(v);
      const double env = kernel_envelope(lambda, s.x[i], s.x[j]);
      constant = std::max(constant, std::abs(v) / env);
      out << num(s.x[i]) << ',' << num(s.x[j]) << ',' << num(v.real()) << ',' << num(v.imag()) << ',' << num(env)
          << '\n';
    }
  std::cerr << "kernel_constant " << num(constant) << '\n';

  if (a.check_symmetry) {
    std::size_t bad = 0;
    for (double x : s.x)
      for (double xp : s.x)
        if (greens_kernel(pr, x, xp).value != greens_kernel(pr, xp, x).value) ++bad;
    std::cerr << "symmetry " << (bad == 0 ? "ok" : "violated") << " (" << bad << " asymmetric pairs)\n";
    if (bad) return 1;
  }
  return 0;
}

// ---- map

struct MapArgs {
  std::string p, re = "-2,2", im = "-2,2", out;
  int resolution = 81;
  bool probe = false;
  double probe_box = 20.0;
  int probe_n = 200;
};

int cmd_map(const MapArgs& a) {
  const LebesgueExponent p = LebesgueExponent::parse(a.p);
  std::optional<ProbeSettings> probe;
  if (a.probe) probe = ProbeSettings{a.probe_box, a.probe_n};
  const SpectrumMap map = spectrum_map(p, parse_range(a.re), parse_range(a.im), a.resolution, probe);
  if (a.out.empty()) {
    write_map_csv(std::cout, map);
  } else {
    std::ofstream out = open_out(a.out);
    write_map_csv(out, map);
    json meta = {{"p", p.to_string()}, {"norm_kind", to_string(map.norm_kind)}};
    meta["box"] = probe ? json(probe->box) : json(nullptr);
    meta["n"] = probe ? json(probe->n) : json(nullptr);
    open_out(a.out + ".json") << meta.dump(2) << '\n';
  }
  std::cerr << "map: " << map.nodes.size() << " nodes, p = " << p.to_string();
  if (probe) std::cerr << ", probe column (" << to_string(map.norm_kind) << " norms)";
  std::cerr << '\n';
  return 0;
}

// ---- verify

struct Check {
  std::string suite, name;
  bool passed;
  std::string detail;
};

struct Verifier {
  std::vector<Check> results;

  void add(const std::string& suite, const std::string& name, const std::function<std::pair<bool, std::string>()>& f) {
    Check c{suite, name, false, ""};
    try {
      std::tie(c.passed, c.detail) = f();
    } catch (const Error& e) {
      c.detail = std::string("error: ") + e.what();
    }
    std::cout << (c.passed ? "PASS " : "FAIL ") << suite << '/' << name << ": " << c.detail << std::endl;
    results.push_back(c);
  }
};

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

void suite_specfun(Verifier& v) {
  v.add("specfun", "gamma_recurrence", [] {
    double worst = 0.0;
    for (cplx z : {cplx(0.3, 0.2), cplx(-2.7, 1.1), cplx(7.5, -3.0), cplx(-0.4, -6.0)})
      worst = std::max(worst, std::abs(z * gamma(z) - gamma(z + 1.0)) / std::abs(gamma(z + 1.0)));
    return std::pair{worst <= 1e-12, "max relative defect " + sci(worst)};
  });
  v.add("specfun", "conjugation_symmetry", [] {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    double worst = 0.0;
    for (int i = 0; i < 50; ++i) {
      const cplx nu(u(rng), u(rng) / 1.5), z(3.0 * u(rng), 3.0 * u(rng));
      const cplx a = hermite_nu(std::conj(nu), std::conj(z)).value, b = std::conj(hermite_nu(nu, z).value);
      worst = std::max(worst, std::abs(a - b) / std::abs(b));
    }
    return std::pair{worst <= 1e-12, "max relative defect " + sci(worst)};
  });
  v.add("specfun", "near_integer_monotone", [] {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    int bad = 0;
    for (int n = 0; n <= 10; ++n)
      for (int k = 0; k < 20; ++k) {
        const cplx z = std::polar(3.0 * std::sqrt(u(rng)), 2.0 * std::numbers::pi * u(rng));
        double prev = INFINITY;
        for (double d : {1e-3, 1e-5, 1e-7}) {
          const double e = std::abs(hermite_nu(n + d, z).value - hermite_int(n, z));
          if (!(e < prev)) ++bad;
          prev = e;
        }
      }
    return std::pair{bad == 0, std::to_string(bad) + " non-monotone sequences of 220"};
  });
  v.add("specfun", "hermite_ode", [] {
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const double h = 1e-4;
    double worst = 0.0;
    for (int i = 0; i < 20; ++i) {
      const cplx nu(-3.0 + 5.5 * u(rng), -2.0 + 4.0 * u(rng));
      const cplx z = std::polar(3.0 * std::sqrt(u(rng)), 2.0 * std::numbers::pi * u(rng));
      auto H = [&](cplx t) { return hermite_nu(nu, t).value; };
      const cplx f = H(z), fp = H(z + h), fm = H(z - h);
      const cplx d1 = (fp - fm) / (2 * h), d2 = (fp - 2.0 * f + fm) / (h * h);
      const double scale = std::max({std::abs(d2), std::abs(2.0 * z * d1), std::abs(2.0 * nu * f)});
      worst = std::max(worst, std::abs(d2 - 2.0 * z * d1 + 2.0 * nu * f) / scale);
    }
    return std::pair{worst <= 1e-6, "max relative residual " + sci(worst)};
  });
  v.add("specfun", "switch_continuity", [] {
    const double r = switch_radius(-0.5);
    const cplx a = std::polar(r * (1 - 1e-6), 0.75 * std::numbers::pi), b = std::polar(r * (1 + 1e-6), 0.75 * std::numbers::pi);
    const EvalResult ea = hermite_nu(-0.5, a), eb = hermite_nu(-0.5, b);
    const double gap = std::abs(ea.value - eb.value), budget = ea.est_abs_error + eb.est_abs_error;
    return std::pair{gap <= budget, "jump " + sci(gap) + " vs estimate " + sci(budget)};
  });
}

void suite_eigen(Verifier& v) {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> re(-3.0, -0.5), im(-2.0, 2.0);
  std::vector<cplx> orders;
  for (int i = 0; i < 10; ++i) orders.emplace_back(re(rng), im(rng));

  v.add("eigen", "lambda_round_trip", [] {
    std::mt19937_64 g(1);
    std::uniform_real_distribution<double> u(-7.0, 7.0);
    double worst = 0.0;
    for (int i = 0; i < 1000; ++i) {
      const cplx l(u(g), u(g));
      worst = std::max(worst, std::abs(lambda_from_nu(nu_from_lambda(l)) - l));
    }
    return std::pair{worst <= 1e-14, "max defect " + sci(worst)};
  });
  v.add("eigen", "ode_residual", [&] {
    const auto grid = uniform_grid(-5.0, 5.0, 2001);
    double worst = 0.0;
    for (cplx nu : orders) {
      const SpectralPoint pt = SpectralPoint::from_nu(nu);
      worst = std::max(worst, ode_residual(sample(grid, [&](double x) { return psi_nu(pt, x); }), pt.lambda()));
      worst = std::max(worst, ode_residual(sample(grid, [&](double x) { return psi_neg(pt, x); }), pt.lambda()));
    }
    return std::pair{worst <= 1e-4, "max residual " + sci(worst)};
  });
  v.add("eigen", "wronskian_nonvanishing", [&] {
    const double h = 1e-3;
    double smallest = INFINITY;
    for (cplx nu : orders) {
      const SpectralPoint pt = SpectralPoint::from_nu(nu);
      auto d = [&](Family f) {
        return (-psi(pt, f, 2 * h) + 8.0 * psi(pt, f, h) - 8.0 * psi(pt, f, -h) + psi(pt, f, -2 * h)) / (12.0 * h);
      };
      const cplx w = psi_nu(pt, 0.0) * d(Family::psi_neg) - d(Family::psi_nu) * psi_neg(pt, 0.0);
      smallest = std::min(smallest, std::abs(w));
    }
    return std::pair{smallest >= 1e-8, "min |W| " + sci(smallest)};
  });
}

void suite_resolvent(Verifier& v, cplx lambda, const QuadratureConfig& cfg) {
  const cplx up = lambda.imag() >= 0.0 ? lambda : std::conj(lambda);
  v.add("resolvent", "wronskian_constancy", [&] {
    const FundamentalPair pr = build_fundamental_pair(up);
    double spread = 0.0;
    for (double x : {-4.0, -2.0, 0.0, 2.0, 4.0})
      spread = std::max(spread, std::abs(pointwise_wronskian(pr, x) - pr.wronskian) / std::abs(pr.wronskian));
    return std::pair{spread <= 1e-5, "max deviation from -2i c2 " + sci(spread)};
  });
  v.add("resolvent", "kernel_symmetry", [&] {
    const FundamentalPair pr = build_fundamental_pair(up);
    std::mt19937_64 g(12);
    std::uniform_real_distribution<double> u(-10.0, 10.0);
    int bad = 0;
    for (int i = 0; i < 1000; ++i) {
      const double x = u(g), xp = u(g);
      if (greens_kernel(pr, x, xp).value != greens_kernel(pr, xp, x).value) ++bad;
    }
    return std::pair{bad == 0, std::to_string(bad) + " asymmetric pairs of 1000"};
  });
  v.add("resolvent", "resolvent_residual", [&] {
    const auto grid = uniform_grid(-4.0, 4.0, 1601);
    const auto psi = sample(grid, [](double x) {
      return std::fabs(x) < 1.0 ? cplx(std::exp(-1.0 / (1.0 - x * x))) : cplx(0.0);
    });
    const AppliedResolvent r = apply_resolvent_any(lambda, psi, cfg);
    const double res = resolvent_residual_at(lambda, psi, r.eta);
    return std::pair{res <= 1e-3, "residual " + sci(res) + ", quadrature estimate " + sci(r.est_error)};
  });
}

void suite_spectrum(Verifier& v) {
  v.add("spectrum", "duality_reflection", [] {
    std::mt19937_64 g(5);
    std::uniform_real_distribution<double> u(0.0, 1.0), w(-3.0, 3.0);
    int bad = 0;
    for (int k = 0; k < 50; ++k) {
      const LebesgueExponent p =
          u(g) < 0.2 ? LebesgueExponent::infinity() : LebesgueExponent::finite(std::exp(3.0 * u(g)));
      const cplx l(w(g), w(g) / 2.0);
      bad += classify(p, l).region != classify(p.conjugate(), l).region;
      bad += classify(p, l).region != classify(p, std::conj(l)).region;
    }
    return std::pair{bad == 0, std::to_string(bad) + " violations"};
  });
  v.add("spectrum", "trichotomy", [] {
    std::mt19937_64 g(51);
    std::uniform_real_distribution<double> u(0.0, 1.0), w(-3.0, 3.0);
    int bad = 0;
    for (int k = 0; k < 1000; ++k) {
      const LebesgueExponent p = LebesgueExponent::finite(1.0 + 9.0 * u(g));
      const cplx l(w(g), w(g) / 1.5);
      if (std::fabs(std::fabs(l.imag()) - strip_half_width(p)) < 1e-9) continue;
      bad += resolvent_bounded_condition(p, l) != (classify(p, l).region == Region::resolvent_set);
    }
    return std::pair{bad == 0, std::to_string(bad) + " disagreements"};
  });
  v.add("spectrum", "growth_lattice", [] {
    int bad = 0;
    for (int i = 0; i < 20; ++i)
      for (int j = 0; j < 20; ++j) {
        const double p = 1.0 + 9.0 * i / 19.0, a = 0.98 * j / 19.0;
        const LebesgueExponent e = LebesgueExponent::finite(p);
        if (p == 2.0 || classify(e, cplx(0, a)).region != Region::spectrum_interior) continue;
        bad += point_spectrum_growth_test(e, cplx(0, a)) != (p > 2.0);
      }
    return std::pair{bad == 0, std::to_string(bad) + " disagreements"};
  });
  v.add("spectrum", "mass_scan_membership", [] {
    const std::pair<double, cplx> cases[] = {{4, {0, 0.25}}, {1, {0, 0.5}}, {3, {0.5, 0.2}}, {2.5, {0, 0.3}}};
    const std::vector<double> radii{10, 20, 40, 80};
    int agree = 0;
    for (const auto& [p, l] : cases) {
      const FundamentalPair pr = build_fundamental_pair(l);
      const LebesgueExponent e = LebesgueExponent::finite(p);
      const auto mass = lp_mass_scan([&](double x) { return phi_acute(pr, x); }, e, radii);
      agree += lp_mass_verdict(mass, radii).convergent == point_spectrum_growth_test(e, l);
    }
    return std::pair{agree == 4, std::to_string(agree) + " of 4 agree"};
  });
  v.add("spectrum", "probe_blowup", [] {
    const LebesgueExponent one = LebesgueExponent::finite(1.0);
    double prev = 0.0;
    bool ok = true;
    std::string detail;
    for (double d : {0.5, 0.25, 0.1}) {
      const double val = resolvent_norm_probe(one, {0.0, 1.0 + d}, 20.0, 400).value;
      ok = ok && val > prev;
      prev = val;
      detail += (detail.empty() ? "" : " < ") + sci(val);
    }
    return std::pair{ok, "p=1 probe " + detail};
  });
}

struct VerifyArgs {
  std::string suite = "all", lambda = "0,2", report, config;
};

int cmd_verify(const VerifyArgs& a) {
  const QuadratureConfig cfg = load_config(a.config);
  const cplx lambda = parse_complex(a.lambda);
  Verifier v;
  const bool all = a.suite == "all";
  if (all || a.suite == "specfun") suite_specfun(v);
  if (all || a.suite == "eigen") suite_eigen(v);
  if (all || a.suite == "resolvent") suite_resolvent(v, lambda, cfg);
  if (all || a.suite == "spectrum") suite_spectrum(v);

  bool passed = true;
  json records = json::array();
  for (const Check& c : v.results) {
    passed = passed && c.passed;
    records.push_back({{"suite", c.suite}, {"name", c.name}, {"passed", c.passed}, {"detail", c.detail}});
  }
  if (!a.report.empty())
    open_out(a.report) << json{{"suite", a.suite}, {"passed", passed}, {"invariants", records}}.dump(2) << '\n';
  return passed ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Inverted harmonic oscillator: Hermite functions, Green's kernel and L^p spectral strips"};
  app.require_subcommand(1);

  EvalArgs ev;
  auto* eval = app.add_subcommand("eval", "Evaluate H_nu(z) or an eigenfunction / fundamental solution at x");
  eval->add_flag("--hermite", ev.hermite, "Evaluate H_nu(z) directly");
  eval->add_option("--nu", ev.nu, "Hermite order as re,im");
  eval->add_option("--z", ev.z, "Argument as re,im");
  eval->add_option("--family", ev.family, "Function family")
      ->check(CLI::IsMember({"psi_nu", "psi_neg", "phi_acute", "phi_grave"}));
  eval->add_option("--lambda", ev.lambda, "Spectral parameter as re,im");
  eval->add_option("--x", ev.x, "Position");
  eval->add_flag("--conjugate", ev.conjugate, "Route Im lambda < 0 through the conjugate problem");

  KernelArgs kr;
  auto* kernel = app.add_subcommand("kernel", "Tabulate s_lambda(x, x') on an n x n grid over [-box, box]^2");
  kernel->add_option("--lambda", kr.lambda, "Spectral parameter as re,im")->required();
  kernel->add_option("--box", kr.box, "Half-width of the grid")->capture_default_str();
  kernel->add_option("--n", kr.n, "Nodes per axis")->capture_default_str();
  kernel->add_option("--out", kr.out, "CSV output path (stdout if omitted)");
  kernel->add_flag("--check-symmetry", kr.check_symmetry, "Fail unless s(x, x') = s(x', x) on the grid");
  kernel->add_flag("--conjugate", kr.conjugate, "Route Im lambda < 0 through the conjugate problem");

  MapArgs mp;
  auto* map = app.add_subcommand("map", "Classify a lambda grid against the L^p strip");
  map->add_option("--p", mp.p, "Lebesgue exponent (number >= 1 or inf)")->required();
  map->add_option("--re", mp.re, "Re lambda range as lo,hi")->capture_default_str();
  map->add_option("--im", mp.im, "Im lambda range as lo,hi")->capture_default_str();
  map->add_option("--resolution", mp.resolution, "Nodes per axis (<= 2000, <= 50 with --probe)")->capture_default_str();
  map->add_flag("--probe", mp.probe, "Attach a discretized resolvent-norm probe per node");
  map->add_option("--probe-box", mp.probe_box, "Probe box half-width")->capture_default_str();
  map->add_option("--probe-n", mp.probe_n, "Probe grid size")->capture_default_str();
  map->add_option("--out", mp.out, "CSV output path; metadata goes to <out>.json");

  VerifyArgs vf;
  auto* verify = app.add_subcommand("verify", "Run invariant suites");
  verify->add_option("--suite", vf.suite, "Suite to run")
      ->check(CLI::IsMember({"specfun", "eigen", "resolvent", "spectrum", "all"}))
      ->capture_default_str();
  verify->add_option("--lambda", vf.lambda, "Spectral parameter for the resolvent suite")->capture_default_str();
  verify->add_option("--report", vf.report, "Write a JSON report");
  verify->add_option("--config", vf.config, "JSON file presetting QuadratureConfig fields");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*eval) return cmd_eval(ev);
    if (*kernel) return cmd_kernel(kr);
    if (*map) return cmd_map(mp);
    if (*verify) return cmd_verify(vf);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return e.kind() == ErrorKind::validation ? 2 : 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}
