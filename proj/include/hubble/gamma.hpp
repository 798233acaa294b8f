#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <string>

#include "hubble/errors.hpp"

namespace hubble {

using cplx = std::complex<double>;

// sin(pi x) and cos(pi x) with exact zeros at the integers and half-integers.
inline double sinpi(double x) {
  double r = std::fmod(x, 2.0);
  if (r < -1.0) r += 2.0;
  if (r > 1.0) r -= 2.0;
  if (r > 0.5) r = 1.0 - r;
  if (r < -0.5) r = -1.0 - r;
  return std::sin(std::numbers::pi * r);
}

inline double cospi(double x) {
  double r = std::fabs(std::fmod(x, 2.0));
  if (r > 1.0) r = 2.0 - r;
  return sinpi(0.5 - r);
}

inline cplx sinpi(cplx z) {
  const double y = std::numbers::pi * z.imag();
  return {sinpi(z.real()) * std::cosh(y), cospi(z.real()) * std::sinh(y)};
}

namespace detail {

inline bool near_nonpositive_integer(cplx z, double tol) {
  if (z.real() > tol || std::fabs(z.imag()) > tol) return false;
  return std::fabs(z.real() - std::round(z.real())) <= tol;
}

// Stirling series, valid for |w| >= 15 away from the negative axis.
inline cplx log_gamma_stirling(cplx w) {
  static constexpr double bern[] = {1.0 / 6,      -1.0 / 30,     1.0 / 42,       -1.0 / 30,
                                    5.0 / 66,     -691.0 / 2730, 7.0 / 6,        -3617.0 / 510,
                                    43867.0 / 798, -174611.0 / 330};
  const cplx inv = 1.0 / w;
  const cplx inv2 = inv * inv;
  cplx pw = inv;
  cplx sum = 0.0;
  for (int k = 1; k <= 10; ++k) {
    sum += bern[k - 1] / (2.0 * k * (2.0 * k - 1.0)) * pw;
    pw *= inv2;
  }
  return (w - 0.5) * std::log(w) - w + 0.5 * std::log(2.0 * std::numbers::pi) + sum;
}

// Principal continuous branch for Re z >= 1/2.
inline cplx log_gamma_right(cplx z) {
  cplx shift = 0.0;
  cplx w = z;
  while (std::abs(w) < 15.0) {
    shift += std::log(w);
    w += 1.0;
  }
  return log_gamma_stirling(w) - shift;
}

}  // namespace detail

// log Gamma(z). For Re z < 1/2 the reflection formula is used, so the result
// is a logarithm of Gamma(z) but not necessarily the continuous branch there.
inline cplx log_gamma(cplx z) {
  if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
    throw DomainError("log_gamma: non-finite argument");
  if (detail::near_nonpositive_integer(z, 1e-14))
    throw PoleError("log_gamma: pole at z = " + std::to_string(z.real()));
  if (z.real() >= 0.5) return detail::log_gamma_right(z);
  return std::log(std::numbers::pi) - std::log(sinpi(z)) - detail::log_gamma_right(1.0 - z);
}

inline cplx gamma(cplx z) {
  if (detail::near_nonpositive_integer(z, 1e-14))
    throw PoleError("gamma: pole at z = " + std::to_string(z.real()));
  if (z.real() >= 0.5) return std::exp(detail::log_gamma_right(z));
  return std::numbers::pi / (sinpi(z) * std::exp(detail::log_gamma_right(1.0 - z)));
}

// 1/Gamma(z); entire, exactly zero at the poles of Gamma.
inline cplx rgamma(cplx z) {
  if (z.real() >= 0.5) return std::exp(-detail::log_gamma_right(z));
  return sinpi(z) * std::exp(detail::log_gamma_right(1.0 - z)) / std::numbers::pi;
}

}  // namespace hubble
