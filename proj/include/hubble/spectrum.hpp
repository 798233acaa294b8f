#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "hubble/errors.hpp"
#include "hubble/parallel.hpp"
#include "hubble/resolvent.hpp"
#include "hubble/sampled.hpp"

namespace hubble {

// p in [1, inf] with its conjugate q. Infinity is its own state (inv = 0),
// never a large finite p.
class LebesgueExponent {
 public:
  static LebesgueExponent finite(double p) {
    if (!(p >= 1.0) || !std::isfinite(p)) throw DomainError("LebesgueExponent: p must be finite and >= 1");
    return LebesgueExponent(1.0 / p, 1.0 - 1.0 / p);
  }
  static LebesgueExponent infinity() { return LebesgueExponent(0.0, 1.0); }
  static LebesgueExponent parse(const std::string& s) {
    if (s == "inf" || s == "infinity" || s == "Inf") return infinity();
    return finite(parse_double(s));
  }

  bool is_infinite() const { return inv_p_ == 0.0; }
  bool conjugate_is_infinite() const { return inv_q_ == 0.0; }
  double inv_p() const { return inv_p_; }
  double inv_q() const { return inv_q_; }
  double p() const {
    if (is_infinite()) throw DomainError("LebesgueExponent: p is infinite");
    return 1.0 / inv_p_;
  }
  LebesgueExponent conjugate() const { return LebesgueExponent(inv_q_, inv_p_); }
  std::string to_string() const { return is_infinite() ? "inf" : format_double(p()); }

 private:
  LebesgueExponent(double inv_p, double inv_q) : inv_p_(inv_p), inv_q_(inv_q) {}
  double inv_p_, inv_q_;
};

// |2/p - 1|, written as |1/q - 1/p| so that w(p) = w(q) holds bit for bit.
inline double strip_half_width(const LebesgueExponent& p) { return std::fabs(p.inv_q() - p.inv_p()); }

enum class Region { resolvent_set, spectrum_interior, spectrum_boundary };
enum class PointSpectrum { yes, no, unresolved };

inline const char* to_string(Region r) {
  switch (r) {
    case Region::resolvent_set: return "RESOLVENT_SET";
    case Region::spectrum_interior: return "SPECTRUM_INTERIOR";
    case Region::spectrum_boundary: return "SPECTRUM_BOUNDARY";
  }
  return "?";
}
inline const char* to_string(PointSpectrum p) {
  switch (p) {
    case PointSpectrum::yes: return "YES";
    case PointSpectrum::no: return "NO";
    case PointSpectrum::unresolved: return "UNRESOLVED";
  }
  return "?";
}

struct StripVerdict {
  Region region;
  PointSpectrum point_spectrum;
  bool operator==(const StripVerdict&) const = default;
};

inline constexpr double strip_tolerance = 1e-12;

inline StripVerdict classify(const LebesgueExponent& p, cplx lambda) {
  const double w = strip_half_width(p);
  const double a = std::fabs(lambda.imag());
  if (a > w + strip_tolerance) return {Region::resolvent_set, PointSpectrum::no};
  const Region region = std::fabs(a - w) <= strip_tolerance ? Region::spectrum_boundary : Region::spectrum_interior;
  if (p.is_infinite()) return {region, PointSpectrum::yes};
  if (p.inv_p() == 0.5) return {region, PointSpectrum::no};  // no L^2 eigenfunctions
  if (region == Region::spectrum_boundary) return {region, PointSpectrum::unresolved};
  return {region, p.inv_p() < 0.5 ? PointSpectrum::yes : PointSpectrum::no};
}

// Fundamental solutions grow like (1+|x|)^{|Im lambda|/2 - 1/2}; they lie in
// L^p when p (|Im lambda|/2 - 1/2) < -1, and in L^inf when the exponent is <= 0.
inline bool point_spectrum_growth_test(const LebesgueExponent& p, cplx lambda) {
  const double a = std::fabs(lambda.imag());
  if (p.is_infinite()) return a <= 1.0;
  return p.p() * (a / 2.0 - 0.5) < -1.0;
}

// The two pole-integrability conditions behind the bounded-resolvent test:
// |Im lambda|/2 - 1/2 - 1/p > -1 and the same with q.
inline std::pair<bool, bool> pole_integrability(const LebesgueExponent& p, cplx lambda) {
  const double a = std::fabs(lambda.imag());
  return {a / 2.0 - 0.5 - p.inv_p() > -1.0, a / 2.0 - 0.5 - p.inv_q() > -1.0};
}

inline bool resolvent_bounded_condition(const LebesgueExponent& p, cplx lambda) {
  const double a = std::fabs(lambda.imag());
  const bool bounded = a / 2.0 > std::fabs(0.5 - p.inv_p());
  const auto [left, right] = pole_integrability(p, lambda);
  if (bounded != (left && right) && std::fabs(a / 2.0 - std::fabs(0.5 - p.inv_p())) > strip_tolerance)
    throw std::logic_error("resolvent_bounded_condition: pole conditions disagree");
  return bounded;
}

// Truncated masses int_{|x| <= R_i} |f|^p dx by the phase-resolved trapezoid
// rule on unit panels.
inline std::vector<double> lp_mass_scan(const std::function<cplx(double)>& f, const LebesgueExponent& p,
                                        const std::vector<double>& radii, const QuadratureConfig& cfg = {}) {
  if (p.is_infinite()) throw DomainError("lp_mass_scan: p must be finite");
  if (radii.size() < 4) throw DomainError("lp_mass_scan: need at least 4 radii");
  for (std::size_t i = 0; i < radii.size(); ++i)
    if (!(radii[i] >= 1.0) || (i > 0 && !(radii[i] > radii[i - 1])))
      throw DomainError("lp_mass_scan: radii must be >= 1 and increasing");
  const double pw = p.p();
  auto integrand = [&](double x) {
    const double v = std::pow(std::abs(f(x)), pw);
    if (!std::isfinite(v)) throw QuadratureError("lp_mass_scan: non-finite sample at x = " + format_double(x));
    return v;
  };
  auto integrate = [&](double a, double b) {
    double sum = 0.0;
    for (double lo = a; lo < b;) {
      const double hi = std::min(b, lo + 1.0);
      const double h = cfg.effective_step(std::max(std::fabs(lo), std::fabs(hi)));
      const auto m = static_cast<std::size_t>(std::ceil((hi - lo) / h));
      const double step = (hi - lo) / double(m);
      double panel = 0.5 * (integrand(lo) + integrand(hi));
      for (std::size_t k = 1; k < m; ++k) panel += integrand(lo + double(k) * step);
      sum += panel * step;
      lo = hi;
    }
    return sum;
  };
  std::vector<double> mass;
  double total = integrate(-radii[0], radii[0]);
  mass.push_back(total);
  for (std::size_t i = 1; i < radii.size(); ++i) {
    total += integrate(-radii[i], -radii[i - 1]) + integrate(radii[i - 1], radii[i]);
    mass.push_back(total);
  }
  return mass;
}

// Reads a mass scan as a power law: the increment per unit width over the
// last two shells decays like R^alpha, and the integral converges iff
// alpha < -1.
struct MassVerdict {
  bool convergent;
  double exponent;
};

inline MassVerdict lp_mass_verdict(const std::vector<double>& mass, const std::vector<double>& radii) {
  const std::size_t n = mass.size();
  if (n < 3 || radii.size() != n) throw DomainError("lp_mass_verdict: need >= 3 matching masses and radii");
  auto density = [&](std::size_t i) { return (mass[i] - mass[i - 1]) / (radii[i] - radii[i - 1]); };
  auto mid = [&](std::size_t i) { return 0.5 * (radii[i] + radii[i - 1]); };
  const double g1 = density(n - 2), g2 = density(n - 1);
  if (g2 <= 0.0) return {true, -INFINITY};
  if (g1 <= 0.0) return {false, INFINITY};
  const double alpha = std::log(g2 / g1) / std::log(mid(n - 1) / mid(n - 2));
  return {alpha < -1.0, alpha};
}

enum class NormKind { exact, interpolated };
inline const char* to_string(NormKind k) { return k == NormKind::exact ? "exact" : "interpolated"; }

struct ProbeResult {
  double value;
  NormKind norm_kind;
};

inline constexpr double default_probe_cap = 4e7;

namespace detail {

inline double spectral_norm(const std::vector<cplx>& a, std::size_t n) {
  std::vector<cplx> v(n, 1.0 / std::sqrt(double(n))), av(n), w(n);
  double sigma2 = 0.0;
  for (int it = 0; it < 1000; ++it) {
    for (std::size_t i = 0; i < n; ++i) {
      cplx s = 0.0;
      for (std::size_t j = 0; j < n; ++j) s += a[i * n + j] * v[j];
      av[i] = s;
    }
    for (std::size_t j = 0; j < n; ++j) w[j] = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) w[j] += std::conj(a[i * n + j]) * av[i];
    double norm = 0.0;
    for (const cplx& x : w) norm += std::norm(x);
    norm = std::sqrt(norm);
    if (norm == 0.0) return 0.0;
    for (std::size_t j = 0; j < n; ++j) v[j] = w[j] / norm;
    const bool done = std::fabs(norm - sigma2) <= 1e-12 * norm;
    sigma2 = norm;
    if (done) break;
  }
  return std::sqrt(sigma2);
}

}  // namespace detail

// Induced L^p norm of the discretized kernel Delta * s(x_i, x_j) on an n x n
// midpoint grid over [-box, box]^2. Exact grid norms for p in {1, 2, inf};
// otherwise the smallest Riesz-Thorin bound from those three.
inline ProbeResult resolvent_norm_probe(const LebesgueExponent& p, cplx lambda, double box, int n,
                                        double cap = default_probe_cap) {
  if (n < 200) throw DomainError("resolvent_norm_probe: n must be >= 200");
  if (!(box > 0.0)) throw DomainError("resolvent_norm_probe: box must be positive");
  if (double(n) * double(n) > cap) throw ResourceError("resolvent_norm_probe: n^2 exceeds the entry cap");
  // s_lambda = conj(s_{conj lambda}) entrywise, which leaves every norm alone.
  const FundamentalPair pr = build_fundamental_pair(lambda.imag() >= 0.0 ? lambda : std::conj(lambda));
  const std::size_t m = std::size_t(n);
  const double delta = 2.0 * box / double(n);
  std::vector<double> x(m);
  for (std::size_t i = 0; i < m; ++i) x[i] = -box + (double(i) + 0.5) * delta;
  const PairSamples s = sample_pair(pr, x);
  std::vector<cplx> a(m * m);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j) a[i * m + j] = delta * s.kernel(pr, i, j);

  auto n1 = [&] {
    double best = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
      double col = 0.0;
      for (std::size_t i = 0; i < m; ++i) col += std::abs(a[i * m + j]);
      best = std::max(best, col);
    }
    return best;
  };
  auto ninf = [&] {
    double best = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      double row = 0.0;
      for (std::size_t j = 0; j < m; ++j) row += std::abs(a[i * m + j]);
      best = std::max(best, row);
    }
    return best;
  };
  if (p.is_infinite()) return {ninf(), NormKind::exact};
  if (p.inv_p() == 1.0) return {n1(), NormKind::exact};
  const double n2 = detail::spectral_norm(a, m);
  if (p.inv_p() == 0.5) return {n2, NormKind::exact};
  const double t = p.inv_p();
  const double one = n1(), inf = ninf();
  double bound = std::pow(one, t) * std::pow(inf, 1.0 - t);
  if (t > 0.5)
    bound = std::min(bound, std::pow(one, 2.0 * t - 1.0) * std::pow(n2, 2.0 - 2.0 * t));
  else
    bound = std::min(bound, std::pow(n2, 2.0 * t) * std::pow(inf, 1.0 - 2.0 * t));
  return {bound, NormKind::interpolated};
}

struct MapNode {
  double re, im;
  StripVerdict verdict;
  std::optional<double> probe;
};

struct ProbeSettings {
  double box = 20.0;
  int n = 200;
};

struct SpectrumMap {
  LebesgueExponent p;
  std::vector<MapNode> nodes;
  std::optional<ProbeSettings> probe;
  NormKind norm_kind = NormKind::exact;
};

inline std::vector<double> axis_nodes(double lo, double hi, int count) {
  if (count == 1) return {lo};
  std::vector<double> v(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) v[std::size_t(i)] = lo + (hi - lo) * double(i) / double(count - 1);
  return v;
}

inline SpectrumMap spectrum_map(const LebesgueExponent& p, std::pair<double, double> re_range,
                                std::pair<double, double> im_range, int resolution,
                                std::optional<ProbeSettings> probe = std::nullopt) {
  if (resolution < 1) throw DomainError("spectrum_map: resolution must be positive");
  if (resolution > 2000) throw ResourceError("spectrum_map: resolution is capped at 2000 per axis");
  if (probe && resolution > 50) throw ResourceError("spectrum_map: probe maps are capped at 50 per axis");
  if (!(re_range.second >= re_range.first) || !(im_range.second >= im_range.first))
    throw DomainError("spectrum_map: ranges must be ordered");
  const auto re = axis_nodes(re_range.first, re_range.second, resolution);
  const auto im = axis_nodes(im_range.first, im_range.second, resolution);
  SpectrumMap map{p, std::vector<MapNode>(re.size() * im.size()), probe, NormKind::exact};
  const std::size_t nr = re.size();
  parallel_for(map.nodes.size(), [&](std::size_t k) {
    const cplx lambda(re[k % nr], im[k / nr]);
    MapNode& node = map.nodes[k];
    node = {lambda.real(), lambda.imag(), classify(p, lambda), std::nullopt};
    if (probe) {
      const ProbeResult r = resolvent_norm_probe(p, lambda, probe->box, probe->n);
      node.probe = r.value;
    }
  });
  const bool exact = p.is_infinite() || p.inv_p() == 1.0 || p.inv_p() == 0.5;
  map.norm_kind = exact ? NormKind::exact : NormKind::interpolated;
  return map;
}

inline void write_map_csv(std::ostream& out, const SpectrumMap& map) {
  out << "re_lambda,im_lambda,region,point_spectrum" << (map.probe ? ",probe" : "") << '\n';
  for (const MapNode& n : map.nodes) {
    out << format_double(n.re) << ',' << format_double(n.im) << ',' << to_string(n.verdict.region) << ','
        << to_string(n.verdict.point_spectrum);
    if (map.probe) out << ',' << format_double(*n.probe);
    out << '\n';
  }
}

}  // namespace hubble
