#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "hubble/eigen.hpp"
#include "hubble/errors.hpp"
#include "hubble/parallel.hpp"
#include "hubble/sampled.hpp"

namespace hubble {

// phi_acute ~ e^{ix^2/2}|x|^nu at -inf, phi_grave ~ e^{ix^2/2}x^nu at +inf.
// phi_grave = alpha psi_nu + beta psi_neg; phi_acute ~ c1 x^nu e^{ix^2/2} +
// c2 x^{-nu-1} e^{-ix^2/2} at +inf. Requires Im lambda >= 0.
struct FundamentalPair {
  SpectralPoint point;
  AsymptoticCoefficients coeffs;
  cplx alpha_grave, beta_grave;
  cplx c_acute_1, c_acute_2;
  cplx wronskian;  // phi_acute' phi_grave - phi_acute phi_grave'

  cplx lambda() const { return point.lambda(); }
  // Amplitudes of phi_grave at -inf (|x|^nu and |x|^{-nu-1} terms).
  cplx c_grave_1() const { return alpha_grave * coeffs.c; }
  cplx c_grave_2() const { return beta_grave * coeffs.f; }
};

inline FundamentalPair build_fundamental_pair(cplx lambda) {
  if (!(lambda.imag() >= 0.0))
    throw DomainError("build_fundamental_pair: Im lambda must be >= 0 (conjugate first)");
  const SpectralPoint pt = SpectralPoint::from_lambda(lambda);
  const AsymptoticCoefficients k = asymptotic_coefficients(pt.nu());
  const cplx det = k.b * k.e - k.d * k.a;
  if (std::abs(det) < 1e-13) throw SingularSystem("build_fundamental_pair: degenerate 2x2 system");
  const cplx c2 = k.b / k.c;
  if (c2 == 0.0) throw SingularSystem("build_fundamental_pair: c_acute_2 vanishes");
  return FundamentalPair{pt, k, -k.d / det, k.b / det, k.a / k.c, c2, -2.0 * I * c2};
}

inline cplx phi_acute(const FundamentalPair& pr, double x) { return psi_nu(pr.point, x) / pr.coeffs.c; }

// The equation is even in x and phi_acute(-x) has the defining +inf form of
// phi_grave, so the reflection is exact. It avoids the cancellation of
// alpha psi_nu + beta psi_neg where both terms grow.
inline cplx phi_grave(const FundamentalPair& pr, double x) { return phi_acute(pr, -x); }

inline cplx phi_grave_combination(const FundamentalPair& pr, double x) {
  return pr.alpha_grave * psi_nu(pr.point, x) + pr.beta_grave * psi_neg(pr.point, x);
}

struct KernelEvaluation {
  double x, xp;
  cplx value;
  double envelope;
};

// (1+|x|)^{-1/2} (1+|x'|)^{-1/2} m^{Im lambda/2} with m = min of the ratios
// (1+|x|)/(1+|x'|) and its inverse. Shifting by 1 keeps the bound finite near
// the axes, where |x/x'| itself degenerates.
inline double kernel_envelope(cplx lambda, double x, double xp) {
  const double u = 1.0 + std::fabs(x), v = 1.0 + std::fabs(xp);
  return std::pow(std::min(u / v, v / u), std::fabs(lambda.imag()) / 2.0) / std::sqrt(u * v);
}

// The unshifted form min(|x/x'|, |x'/x|); ratio taken as 1 at the origin.
inline double kernel_envelope_unshifted(cplx lambda, double x, double xp) {
  const double ax = std::fabs(x), axp = std::fabs(xp);
  const double m = std::min(ax, axp) < 1e-12 ? 1.0 : std::min(ax / axp, axp / ax);
  return std::pow(m, std::fabs(lambda.imag()) / 2.0) / std::sqrt((1.0 + ax) * (1.0 + axp));
}

inline KernelEvaluation greens_kernel(const FundamentalPair& pr, double x, double xp) {
  const double lo = std::min(x, xp), hi = std::max(x, xp);
  const cplx v = phi_acute(pr, lo) * phi_grave(pr, hi) / pr.wronskian;
  return {x, xp, v, kernel_envelope(pr.lambda(), x, xp)};
}

// phi_acute and phi_grave sampled on a grid, for kernel tables.
struct PairSamples {
  std::vector<double> x;
  std::vector<cplx> acute, grave;

  cplx kernel(const FundamentalPair& pr, std::size_t i, std::size_t j) const {
    return x[i] <= x[j] ? acute[i] * grave[j] / pr.wronskian : acute[j] * grave[i] / pr.wronskian;
  }
};

inline PairSamples sample_pair(const FundamentalPair& pr, const std::vector<double>& x) {
  PairSamples s{x, std::vector<cplx>(x.size()), std::vector<cplx>(x.size())};
  parallel_for(x.size(), [&](std::size_t i) {
    s.acute[i] = phi_acute(pr, x[i]);
    s.grave[i] = phi_grave(pr, x[i]);
  });
  return s;
}

inline double kernel_constant(const FundamentalPair& pr, double sample_box, int n) {
  if (n < 100) throw DomainError("kernel_constant: n must be >= 100");
  if (!(sample_box > 0.0)) throw DomainError("kernel_constant: sample_box must be positive");
  const PairSamples s = sample_pair(pr, uniform_grid(-sample_box, sample_box, std::size_t(n)));
  double worst = 0.0;
  for (std::size_t i = 0; i < s.x.size(); ++i)
    for (std::size_t j = i; j < s.x.size(); ++j)
      worst = std::max(worst, std::abs(s.kernel(pr, i, j)) / kernel_envelope(pr.lambda(), s.x[i], s.x[j]));
  return worst;
}

// phi_acute' phi_grave - phi_acute phi_grave' with five-point differences.
inline cplx pointwise_wronskian(const FundamentalPair& pr, double x, double h = 1e-3) {
  auto d = [&](auto f) {
    return (-f(x + 2 * h) + 8.0 * f(x + h) - 8.0 * f(x - h) + f(x - 2 * h)) / (12.0 * h);
  };
  auto fa = [&](double t) { return phi_acute(pr, t); };
  auto fg = [&](double t) { return phi_grave(pr, t); };
  return d(fa) * fg(x) - fa(x) * d(fg);
}

struct QuadratureConfig {
  double half_width = 10.0;
  double base_step = 0.005;
  double phase_resolution = 0.25;

  double effective_step(double x) const {
    return std::min(base_step, phase_resolution / (1.0 + std::fabs(x)));
  }
  void validate() const {
    if (!(half_width > 0.0) || !(base_step > 0.0) || !(phase_resolution > 0.0))
      throw ConfigError("QuadratureConfig: half_width, base_step and phase_resolution must be positive");
    if (phase_resolution > std::numbers::pi / 2)
      throw ConfigError("QuadratureConfig: phase_resolution above pi/2 under-resolves e^{ix^2/2}");
  }
};

struct AppliedResolvent {
  SampledFunction eta;
  double est_error;  // Richardson estimate against the every-other-node rule
};

namespace detail {

// Trapezoid values of (1/w)[phi_grave(x) int_{x0}^{x} phi_acute psi + phi_acute(x) int_x^{xN} phi_grave psi]
// at every node.
inline std::vector<cplx> green_trapezoid(const std::vector<double>& x, const std::vector<cplx>& psi,
                                         const std::vector<cplx>& fa, const std::vector<cplx>& fg, cplx w) {
  const std::size_t n = x.size();
  std::vector<cplx> left(n, 0.0), right(n, 0.0);
  for (std::size_t i = 1; i < n; ++i)
    left[i] = left[i - 1] + 0.5 * (x[i] - x[i - 1]) * (fa[i] * psi[i] + fa[i - 1] * psi[i - 1]);
  for (std::size_t i = n - 1; i-- > 0;)
    right[i] = right[i + 1] + 0.5 * (x[i + 1] - x[i]) * (fg[i] * psi[i] + fg[i + 1] * psi[i + 1]);
  std::vector<cplx> eta(n);
  for (std::size_t i = 0; i < n; ++i) eta[i] = (fg[i] * left[i] + fa[i] * right[i]) / w;
  return eta;
}

}  // namespace detail

inline AppliedResolvent apply_resolvent(const FundamentalPair& pr, const SampledFunction& psi,
                                        const QuadratureConfig& cfg) {
  cfg.validate();
  const auto& gx = psi.grid();
  const auto& gv = psi.values();
  auto clipped = [&](std::size_t i) { return std::fabs(gx[i]) <= cfg.half_width ? gv[i] : cplx(0.0); };

  // Quadrature nodes: the grid itself (so the kink of the kernel at x' = x is
  // a node) subdivided where the phase-resolved step asks for it; psi is
  // interpolated linearly on the subdivisions.
  std::vector<double> qx{gx[0]};
  std::vector<cplx> qv{clipped(0)};
  std::vector<std::size_t> at{0};
  for (std::size_t i = 0; i + 1 < gx.size(); ++i) {
    const double a = gx[i], b = gx[i + 1];
    const double h = cfg.effective_step(std::max(std::fabs(a), std::fabs(b)));
    const auto m = static_cast<std::size_t>(std::ceil((b - a) / h - 1e-9));
    const cplx va = clipped(i), vb = clipped(i + 1);
    for (std::size_t k = 1; k < m; ++k) {
      const double t = double(k) / double(m);
      qx.push_back(a + t * (b - a));
      qv.push_back((1.0 - t) * va + t * vb);
    }
    qx.push_back(b);
    qv.push_back(vb);
    at.push_back(qx.size() - 1);
  }

  std::vector<cplx> fa(qx.size()), fg(qx.size());
  parallel_for(qx.size(), [&](std::size_t i) {
    fa[i] = phi_acute(pr, qx[i]);
    fg[i] = phi_grave(pr, qx[i]);
  });
  const std::vector<cplx> eta = detail::green_trapezoid(qx, qv, fa, fg, pr.wronskian);

  double est = 0.0;
  if (qx.size() >= 5) {
    std::vector<double> hx;
    std::vector<cplx> hv, ha, hg;
    for (std::size_t i = 0; i < qx.size(); i += 2) {
      hx.push_back(qx[i]);
      hv.push_back(qv[i]);
      ha.push_back(fa[i]);
      hg.push_back(fg[i]);
    }
    const std::vector<cplx> coarse = detail::green_trapezoid(hx, hv, ha, hg, pr.wronskian);
    for (std::size_t k = 0; k < coarse.size(); ++k) est = std::max(est, std::abs(eta[2 * k] - coarse[k]) / 3.0);
  }

  std::vector<cplx> out(gx.size());
  for (std::size_t i = 0; i < gx.size(); ++i) out[i] = eta[at[i]];
  return {SampledFunction(gx, std::move(out)), est};
}

// max |-eta'' - x^2 eta - lambda eta - psi| / max(1, max|psi|) over nodes at
// least 5 steps from the ends of supp psi (and from the grid ends).
inline double resolvent_residual_at(cplx lambda, const SampledFunction& psi, const SampledFunction& eta) {
  if (psi.grid() != eta.grid()) throw GridError("resolvent_residual: psi and eta grids differ");
  if (psi.size() < 5 || !psi.is_uniform()) throw GridError("resolvent_residual: need a uniform grid of >= 5 nodes");
  const double h = psi.step();
  if (h > 0.005 * (1.0 + 1e-9)) throw GridError("resolvent_residual: step must be <= 0.005");
  const auto& x = psi.grid();
  const auto& p = psi.values();
  const auto& v = eta.values();
  double s_lo = 0.0, s_hi = -1.0;
  for (std::size_t i = 0; i < x.size(); ++i)
    if (p[i] != 0.0) {
      if (s_hi < s_lo) s_lo = x[i];
      s_hi = x[i];
    }
  const bool has_support = s_hi >= s_lo;
  double worst = 0.0;
  for (std::size_t i = 2; i + 2 < x.size(); ++i) {
    if (has_support && (std::fabs(x[i] - s_lo) < 5 * h || std::fabs(x[i] - s_hi) < 5 * h)) continue;
    const cplx d2 = (-v[i + 2] + 16.0 * v[i + 1] - 30.0 * v[i] + 16.0 * v[i - 1] - v[i - 2]) / (12.0 * h * h);
    worst = std::max(worst, std::abs(-d2 - (x[i] * x[i] + lambda) * v[i] - p[i]));
  }
  return worst / std::max(1.0, psi.max_abs());
}

inline double resolvent_residual(const FundamentalPair& pr, const SampledFunction& psi, const SampledFunction& eta) {
  return resolvent_residual_at(pr.lambda(), psi, eta);
}

// Resolvent for either half plane: Im lambda < 0 is
// reduced to the conjugate pair, R(lambda) psi = conj(R(conj lambda) conj psi).
inline AppliedResolvent apply_resolvent_any(cplx lambda, const SampledFunction& psi, const QuadratureConfig& cfg) {
  if (lambda.imag() >= 0.0) return apply_resolvent(build_fundamental_pair(lambda), psi, cfg);
  std::vector<cplx> cv(psi.values());
  for (auto& v : cv) v = std::conj(v);
  AppliedResolvent r = apply_resolvent(build_fundamental_pair(std::conj(lambda)), SampledFunction(psi.grid(), cv), cfg);
  std::vector<cplx> ev(r.eta.values());
  for (auto& v : ev) v = std::conj(v);
  return {SampledFunction(psi.grid(), std::move(ev)), r.est_error};
}

}  // namespace hubble
