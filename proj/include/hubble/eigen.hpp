#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>

#include "hubble/errors.hpp"
#include "hubble/gamma.hpp"
#include "hubble/hermite.hpp"
#include "hubble/sampled.hpp"

namespace hubble {

inline constexpr cplx I{0.0, 1.0};

// lambda = -i (2 nu + 1)
inline cplx lambda_from_nu(const ComplexOrder& nu) { return -I * (2.0 * nu.value() + 1.0); }
inline ComplexOrder nu_from_lambda(cplx lambda) { return (I * lambda - 1.0) / 2.0; }

class SpectralPoint {
 public:
  static SpectralPoint from_lambda(cplx lambda) { return SpectralPoint(lambda, nu_from_lambda(lambda)); }
  static SpectralPoint from_nu(const ComplexOrder& nu) { return SpectralPoint(lambda_from_nu(nu), nu); }

  cplx lambda() const { return lambda_; }
  const ComplexOrder& nu() const { return nu_; }
  // Order of the second family, -(nu + 1).
  ComplexOrder mirror_order() const { return -(nu_.value() + 1.0); }

 private:
  SpectralPoint(cplx lambda, ComplexOrder nu) : lambda_(lambda), nu_(nu) {
    if (!std::isfinite(lambda.real()) || !std::isfinite(lambda.imag()))
      throw DomainError("SpectralPoint: lambda must be finite");
    if (lambda.imag() >= 0.0 && nu_.is_nonneg_integer())
      throw DomainError("SpectralPoint: nu is a nonnegative integer with Im lambda >= 0");
  }
  cplx lambda_;
  ComplexOrder nu_;
};

enum class Family { psi_nu, psi_neg };

// Rays carrying the two families: z = e^{3 pi i/4} x and z = e^{5 pi i/4} x.
inline const cplx ray_nu = std::polar(1.0, 0.75 * std::numbers::pi);
inline const cplx ray_neg = std::polar(1.0, 1.25 * std::numbers::pi);

inline EvalResult psi_nu_eval(const SpectralPoint& pt, double x) {
  EvalResult h = hermite_nu(pt.nu(), ray_nu * x);
  h.value *= std::exp(I * (0.5 * x * x));
  return h;
}

inline EvalResult psi_neg_eval(const SpectralPoint& pt, double x) {
  EvalResult h = hermite_nu(pt.mirror_order(), ray_neg * x);
  h.value *= std::exp(-I * (0.5 * x * x));
  return h;
}

inline cplx psi_nu(const SpectralPoint& pt, double x) { return psi_nu_eval(pt, x).value; }
inline cplx psi_neg(const SpectralPoint& pt, double x) { return psi_neg_eval(pt, x).value; }

inline cplx psi(const SpectralPoint& pt, Family fam, double x) {
  return fam == Family::psi_nu ? psi_nu(pt, x) : psi_neg(pt, x);
}

// Amplitudes of the large-|x| forms:
//   psi_nu  ~ a x^nu e^{ix^2/2} + b x^{-nu-1} e^{-ix^2/2}   (x -> +inf)
//   psi_nu  ~ c |x|^nu e^{ix^2/2}                           (x -> -inf)
//   psi_neg ~ d x^{-nu-1} e^{-ix^2/2} + e x^nu e^{ix^2/2}   (x -> +inf)
//   psi_neg ~ f |x|^{-nu-1} e^{-ix^2/2}                     (x -> -inf)
// The phases follow from the principal argument of z on each ray:
// 3pi/4 (a, b), -pi/4 (c), -3pi/4 (d, e), pi/4 (f).
struct AsymptoticCoefficients {
  cplx a, b, c, d, e, f;
};

inline AsymptoticCoefficients asymptotic_coefficients(const ComplexOrder& order) {
  constexpr double pi = std::numbers::pi;
  const cplx nu = order.value();
  const cplx mu = nu + 1.0;
  const cplx p2nu = std::exp(nu * std::numbers::ln2);
  const cplx p2mu = std::exp(-mu * std::numbers::ln2);
  AsymptoticCoefficients k;
  k.a = p2nu * std::exp(I * (0.75 * pi) * nu);
  k.b = -std::sqrt(pi) * rgamma(-nu) * std::exp(I * pi * nu - I * (0.75 * pi) * mu);
  k.c = p2nu * std::exp(-I * (0.25 * pi) * nu);
  k.d = p2mu * std::exp(I * (0.75 * pi) * mu);
  k.e = -std::sqrt(pi) * rgamma(mu) * std::exp(I * pi * mu - I * (0.75 * pi) * nu);
  k.f = p2mu * std::exp(-I * (0.25 * pi) * mu);
  return k;
}

inline double asymptotic_radius(const SpectralPoint& pt) {
  return std::max(switch_radius(pt.nu()), switch_radius(pt.mirror_order()));
}

inline cplx asymptotic_form(const SpectralPoint& pt, double x, Family fam) {
  if (!(std::fabs(x) >= asymptotic_radius(pt)))
    throw DomainError("asymptotic_form: |x| is below the switch radius");
  const AsymptoticCoefficients k = asymptotic_coefficients(pt.nu());
  const cplx nu = pt.nu().value();
  const double lx = std::log(std::fabs(x));
  const cplx up = std::exp(nu * lx + I * (0.5 * x * x));              // |x|^nu e^{ix^2/2}
  const cplx down = std::exp((-nu - 1.0) * lx - I * (0.5 * x * x));   // |x|^{-nu-1} e^{-ix^2/2}
  if (fam == Family::psi_nu) return x > 0 ? k.a * up + k.b * down : k.c * up;
  return x > 0 ? k.d * down + k.e * up : k.f * down;
}

// max over interior nodes of |f'' + x^2 f + lambda f| / max(1, max|f|),
// with the five-point second difference.
inline double ode_residual(const SampledFunction& f, cplx lambda) {
  if (f.size() < 5) throw GridError("ode_residual: need at least 5 nodes");
  if (!f.is_uniform()) throw GridError("ode_residual: grid must be uniform");
  const double h = f.step();
  if (h > 0.01 * (1.0 + 1e-9)) throw GridError("ode_residual: step must be <= 0.01");
  const auto& x = f.grid();
  const auto& v = f.values();
  double worst = 0.0;
  for (std::size_t i = 2; i + 2 < f.size(); ++i) {
    const cplx d2 = (-v[i + 2] + 16.0 * v[i + 1] - 30.0 * v[i] + 16.0 * v[i - 1] - v[i - 2]) / (12.0 * h * h);
    worst = std::max(worst, std::abs(d2 + (x[i] * x[i] + lambda) * v[i]));
  }
  return worst / std::max(1.0, f.max_abs());
}

}  // namespace hubble
