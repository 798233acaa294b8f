#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <string>

#include "hubble/errors.hpp"
#include "hubble/gamma.hpp"

namespace hubble {

// Order nu of the Hermite function H_nu.
class ComplexOrder {
 public:
  static constexpr double integer_tol = 1e-12;

  ComplexOrder(cplx nu) : nu_(nu) {  // NOLINT: implicit on purpose
    if (!std::isfinite(nu.real()) || !std::isfinite(nu.imag()))
      throw DomainError("ComplexOrder: nu must be finite");
  }
  ComplexOrder(double nu) : ComplexOrder(cplx(nu, 0.0)) {}  // NOLINT

  cplx value() const { return nu_; }

  bool is_nonneg_integer() const {
    const double n = std::round(nu_.real());
    return n >= 0.0 && std::fabs(nu_.real() - n) <= integer_tol &&
           std::fabs(nu_.imag()) <= integer_tol;
  }
  int integer_value() const { return static_cast<int>(std::round(nu_.real())); }

 private:
  cplx nu_;
};

// SERIES also covers the integer polynomial and the ray continuation: every
// evaluation that is exact up to rounding rather than asymptotic.
enum class SectorTag { series, asy_principal, asy_upper, asy_lower };

inline const char* to_string(SectorTag s) {
  switch (s) {
    case SectorTag::series: return "SERIES";
    case SectorTag::asy_principal: return "ASY_PRINCIPAL";
    case SectorTag::asy_upper: return "ASY_UPPER";
    case SectorTag::asy_lower: return "ASY_LOWER";
  }
  return "?";
}

struct EvalResult {
  cplx value;
  double est_abs_error = 0.0;
  SectorTag sector_used = SectorTag::series;
};

inline double switch_radius(const ComplexOrder& nu) {
  return std::max(8.0, 2.0 + 2.0 * std::abs(nu.value()));
}

// Physicists' Hermite polynomial by the three-term recurrence.
inline cplx hermite_int(int n, cplx z) {
  if (n < 0 || n > 60) throw DomainError("hermite_int: n must lie in [0, 60]");
  cplx h0 = 1.0;
  if (n == 0) return h0;
  cplx h1 = 2.0 * z;
  for (int k = 1; k < n; ++k) {
    const cplx h2 = 2.0 * z * h1 - 2.0 * k * h0;
    h0 = h1;
    h1 = h2;
  }
  return h1;
}

namespace detail {

constexpr double eps = std::numeric_limits<double>::epsilon();
// Relative error budget of the gamma prefactors of the series, in ulps; the
// Stirling exponent is O(40) in magnitude after the upward shift.
constexpr double gamma_ulps = 32.0;

struct SeriesSum {
  cplx value;
  cplx deriv;
  double abs_sum = 0.0;  // sum of |term|, the rounding scale
  double tail = 0.0;
};

inline SeriesSum hermite_series_sum(cplx nu, cplx z, double tol, int max_terms) {
  const cplx rg = rgamma(-nu);
  const cplx two_z = 2.0 * z;
  const cplx w = two_z * two_z;
  const cplx odd_lead = -gamma((1.0 - nu) / 2.0) * rg;
  cplx t_even = 0.5 * gamma(-nu / 2.0) * rg;
  cplx t_odd = 0.5 * odd_lead * two_z;
  SeriesSum s;
  s.value = t_even + t_odd;
  s.abs_sum = std::abs(t_even) + std::abs(t_odd);
  cplx k_weighted = t_odd;  // sum of k * t_k
  const double kmin = 2.0 * std::norm(z) + std::abs(nu) + 2.0;
  for (int k = 0; k + 3 < max_terms; k += 2) {
    t_even *= ((double(k) - nu) / 2.0) * w / double((k + 1) * (k + 2));
    t_odd *= ((double(k + 1) - nu) / 2.0) * w / double((k + 2) * (k + 3));
    s.value += t_even + t_odd;
    s.abs_sum += std::abs(t_even) + std::abs(t_odd);
    k_weighted += double(k + 2) * t_even + double(k + 3) * t_odd;
    const double mag = std::abs(t_even) + std::abs(t_odd);
    if (k + 2 > kmin && mag <= tol * std::abs(s.value)) {
      s.tail = mag;
      s.deriv = z == 0.0 ? odd_lead : k_weighted / z;
      return s;
    }
  }
  throw NonConvergence("hermite_nu_series: term cap reached");
}

struct Jet {
  cplx f;
  cplx df;
};

// Carries (H, H') along the straight segment from `from` to `to` by Taylor
// steps of the Hermite equation f'' = 2 z f' - 2 nu f.
struct Continuation {
  Jet jet;
  int steps = 0;
  double max_abs = 0.0;
};

inline Continuation continue_along(cplx nu, cplx from, cplx to, Jet jet) {
  const double length = std::abs(to - from);
  Continuation out{jet, 0, std::abs(jet.f)};
  if (length == 0.0) return out;
  const cplx dir = (to - from) / length;
  const double wave = std::sqrt(std::abs(nu)) + 1.0;
  double done = 0.0;
  while (done < length) {
    const cplx z0 = from + done * dir;
    const double reach = std::max(std::abs(z0), std::abs(z0 + 0.5 * dir));
    const double h = std::min({0.5, 0.75 / (reach + wave), length - done});
    const cplx t = h * dir;
    cplx c0 = out.jet.f, c1 = out.jet.df;
    cplx f = c0 + c1 * t;
    cplx df = c1;
    cplx tk = t;  // t^k for the c_k just formed
    int quiet = 0;
    for (int k = 0;; ++k) {
      if (k > 400) throw NonConvergence("hermite continuation: Taylor step did not converge");
      const cplx c2 = (2.0 * z0 * double(k + 1) * c1 + 2.0 * (double(k) - nu) * c0) /
                      double((k + 1) * (k + 2));
      const cplx term = c2 * tk * t;
      f += term;
      df += double(k + 2) * c2 * tk;
      const double scale = std::abs(f) + std::abs(df) * h;
      quiet = std::abs(term) <= 1e-18 * scale ? quiet + 1 : 0;
      if (quiet >= 2 && k > 4) break;
      c0 = c1;
      c1 = c2;
      tk *= t;
    }
    out.jet = {f, df};
    out.max_abs = std::max(out.max_abs, std::abs(f));
    ++out.steps;
    done += h;
  }
  return out;
}

// Optimally truncated expansion (2z)^nu sum (-1)^k (-nu)_{2k} / (k! (2z)^{2k}),
// the recessive solution for |arg z| < pi/4. Returns false when the smallest
// term is not yet below `rel`.
inline bool recessive_jet(cplx nu, cplx z, double rel, Jet& jet, double& trunc) {
  const cplx inv_w = 1.0 / ((2.0 * z) * (2.0 * z));
  cplx u = 1.0, sum = 1.0, dsum = nu;
  double last = 1.0;
  for (int k = 0; k < 2000; ++k) {
    const cplx next = -u * (2.0 * k - nu) * (2.0 * k + 1.0 - nu) * inv_w / double(k + 1);
    const double mag = std::abs(next);
    if (mag > last) break;
    u = next;
    last = mag;
    sum += u;
    dsum += u * (nu - 2.0 * (k + 1));
    if (mag <= 1e-18 * std::abs(sum)) break;
  }
  trunc = last / std::abs(sum);
  if (trunc > rel) return false;
  const cplx lead = std::exp(nu * std::log(2.0 * z));
  jet = {lead * sum, lead * dsum / z};
  return true;
}

// Worst-case growth, relative to H, of an error injected anywhere on the ray
// between radii `from` and `to`. For |arg z| < pi/2 the expansion of H has no
// e^{z^2} part, so the competitor e^{z^2} z^{-nu-1} grows against H by
// exp(s^2 cos 2theta) s^{-2 Re nu - 1}. Elsewhere H carries the dominant
// solution and errors stay relative.
inline double path_amplification(cplx nu, double theta, double from, double to) {
  if (std::fabs(theta) >= 0.5 * std::numbers::pi) return 1.0;
  const double c = std::cos(2.0 * theta);
  const double pw = -2.0 * nu.real() - 1.0;
  auto g = [&](double s) { return s * s * c + pw * std::log(s); };
  const double end = g(to);
  double worst = 0.0;
  for (int i = 0; i <= 32; ++i) worst = std::max(worst, end - g(from + (to - from) * i / 32.0));
  return std::exp(worst);
}

inline EvalResult hermite_by_continuation(cplx nu, cplx z) {
  const double r = std::abs(z);
  const cplx ray = z / r;
  const double theta = std::arg(z);
  const double r0 = 1.0;
  const double amp = path_amplification(nu, theta, r0, r);
  if (amp > 4.0) {
    // H is recessive here: start far out on the ray and walk inward.
    Jet jet{};
    double trunc = 0.0;
    double start = std::max(r, 5.0);
    while (!recessive_jet(nu, start * ray, 1e-16, jet, trunc)) {
      start += 1.0;
      if (start > 60.0) throw NonConvergence("hermite continuation: no asymptotic start point");
    }
    const Continuation c = continue_along(nu, start * ray, z, jet);
    const double back = path_amplification(nu, theta, start, r);
    const double err = (trunc + detail::eps * (2.0 + 4.0 * c.steps)) * c.max_abs * back;
    return {c.jet.f, err, SectorTag::series};
  }
  const SeriesSum s0 = hermite_series_sum(nu, r0 * ray, 1e-18, 10000);
  const Continuation c = continue_along(nu, r0 * ray, z, {s0.value, s0.deriv});
  const double cancel = s0.abs_sum / std::max(std::abs(s0.value), 1e-300);
  const double err = eps * ((gamma_ulps + 4.0) * cancel + 4.0 * c.steps) * c.max_abs * amp;
  return {c.jet.f, err, SectorTag::series};
}

}  // namespace detail

inline EvalResult hermite_nu_series(const ComplexOrder& nu, cplx z, double tol = 1e-16,
                                    int max_terms = 10000) {
  if (!(tol > 0.0)) throw DomainError("hermite_nu_series: tol must be positive");
  if (nu.is_nonneg_integer())
    throw IntegerOrderError("hermite_nu_series: nu is a nonnegative integer");
  const detail::SeriesSum s = detail::hermite_series_sum(nu.value(), z, tol, max_terms);
  return {s.value, s.tail + (detail::gamma_ulps + 4.0) * detail::eps * s.abs_sum, SectorTag::series};
}

// Leading asymptotic form in the requested sector. Powers use the argument of
// z taken inside the sector, so UPPER and LOWER stay continuous across the
// negative real axis.
inline EvalResult hermite_nu_asymptotic(const ComplexOrder& nu, cplx z, SectorTag sector) {
  constexpr double pi = std::numbers::pi;
  if (sector == SectorTag::series)
    throw SectorMismatch("hermite_nu_asymptotic: SERIES is not an asymptotic sector");
  const double r = std::abs(z);
  if (r < switch_radius(nu))
    throw DomainError("hermite_nu_asymptotic: |z| is below the switch radius");
  double theta = std::arg(z);
  double lo = -0.75 * pi, hi = 0.75 * pi;
  if (sector == SectorTag::asy_upper) {
    if (theta < 0.0) theta += 2.0 * pi;
    lo = 0.25 * pi;
    hi = 1.25 * pi;
  } else if (sector == SectorTag::asy_lower) {
    if (theta > 0.0) theta -= 2.0 * pi;
    lo = -1.25 * pi;
    hi = -0.25 * pi;
  }
  if (!(theta > lo && theta < hi))
    throw SectorMismatch("hermite_nu_asymptotic: arg z outside the " +
                         std::string(to_string(sector)) + " sector");
  const cplx v = nu.value();
  const cplx log_z(std::log(r), theta);
  const cplx lead = std::exp(v * (std::numbers::ln2 + log_z));
  cplx second = 0.0;
  if (sector != SectorTag::asy_principal) {
    const double sign = sector == SectorTag::asy_upper ? 1.0 : -1.0;
    const cplx z2 = z * z;
    second = -std::sqrt(pi) * rgamma(-v) *
             std::exp(cplx(0.0, sign * pi) * v + (-v - 1.0) * log_z + z2);
  }
  const double err = (std::abs(lead) + std::abs(second)) / std::sqrt(r);
  return {lead + second, err, sector};
}

// Exact up to rounding inside the switch radius (power series near the origin,
// Taylor continuation along the ray beyond), leading asymptotics outside.
namespace detail {
inline EvalResult finite_or_throw(EvalResult r) {
  if (!std::isfinite(r.value.real()) || !std::isfinite(r.value.imag()) || !std::isfinite(r.est_abs_error))
    throw NonConvergence("hermite_nu: result overflows binary64");
  return r;
}
inline EvalResult hermite_nu_unchecked(const ComplexOrder& nu, cplx z);
}  // namespace detail

inline EvalResult hermite_nu(const ComplexOrder& nu, cplx z) {
  return detail::finite_or_throw(detail::hermite_nu_unchecked(nu, z));
}

inline EvalResult detail::hermite_nu_unchecked(const ComplexOrder& nu, cplx z) {
  constexpr double pi = std::numbers::pi;
  if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
    throw DomainError("hermite_nu: z must be finite");
  if (nu.is_nonneg_integer()) {
    const int n = nu.integer_value();
    const cplx h = hermite_int(n, z);
    const double scale = std::abs(hermite_int(n, cplx(0.0, std::abs(z))));  // sum of |coefficients| |z|^k
    return {h, 4.0 * (n + 1) * detail::eps * scale, SectorTag::series};
  }
  const double r = std::abs(z);
  if (r >= switch_radius(nu)) {
    const double theta = std::arg(z);
    if (std::fabs(theta) <= 0.5 * pi) return hermite_nu_asymptotic(nu, z, SectorTag::asy_principal);
    if (theta > 0.5 * pi) return hermite_nu_asymptotic(nu, z, SectorTag::asy_upper);
    if (theta < -0.5 * pi) return hermite_nu_asymptotic(nu, z, SectorTag::asy_lower);
    throw SectorGap("hermite_nu: arg z lies in no asymptotic sector");
  }
  if (r <= 3.0) {
    const detail::SeriesSum s = detail::hermite_series_sum(nu.value(), z, 1e-18, 10000);
    if (r <= 1.0 || s.abs_sum <= 8.0 * std::abs(s.value))
      return {s.value, s.tail + (detail::gamma_ulps + 4.0) * detail::eps * s.abs_sum, SectorTag::series};
  }
  return detail::hermite_by_continuation(nu.value(), z);
}

}  // namespace hubble
