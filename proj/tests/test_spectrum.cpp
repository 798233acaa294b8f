#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>
#include <random>
#include <sstream>

#include "hubble/spectrum.hpp"

using namespace hubble;

namespace {

LebesgueExponent P(double p) { return LebesgueExponent::finite(p); }
const LebesgueExponent inf = LebesgueExponent::infinity();

// Random exponent: a quarter of the draws are p = inf, the rest log-uniform on [1, 20].
LebesgueExponent random_exponent(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  if (u(rng) < 0.25) return inf;
  return P(std::exp(u(rng) * std::log(20.0)));
}

struct ScopedEnv {
  ScopedEnv(const char* name, const char* value) : name_(name) { setenv(name, value, 1); }
  ~ScopedEnv() { unsetenv(name_); }
  const char* name_;
};

}  // namespace

TEST(LebesgueExponent, Construction) {
  EXPECT_DOUBLE_EQ(P(4.0).conjugate().p(), 4.0 / 3.0);
  EXPECT_TRUE(P(1.0).conjugate_is_infinite());
  EXPECT_TRUE(P(1.0).conjugate().is_infinite());
  EXPECT_TRUE(LebesgueExponent::parse("inf").is_infinite());
  EXPECT_DOUBLE_EQ(LebesgueExponent::parse("2.5").p(), 2.5);
  EXPECT_THROW(P(0.5), DomainError);
  EXPECT_THROW(P(INFINITY), DomainError);
  EXPECT_THROW(LebesgueExponent::parse("x"), DomainError);
  EXPECT_THROW(inf.p(), DomainError);
  EXPECT_EQ(inf.to_string(), "inf");
  EXPECT_EQ(P(3.0).inv_p() + P(3.0).inv_q(), 1.0);
}

TEST(StripHalfWidth, Examples) {
  EXPECT_EQ(strip_half_width(P(1.0)), 1.0);
  EXPECT_EQ(strip_half_width(P(2.0)), 0.0);
  EXPECT_EQ(strip_half_width(inf), 1.0);
  EXPECT_DOUBLE_EQ(strip_half_width(P(4.0)), 0.5);
  for (double p : {1.1, 1.5, 3.0, 7.0}) EXPECT_EQ(strip_half_width(P(p)), strip_half_width(P(p).conjugate()));
}

TEST(Classify, Examples) {
  EXPECT_EQ(classify(P(1.0), 0.5 * I), (StripVerdict{Region::spectrum_interior, PointSpectrum::no}));
  EXPECT_EQ(classify(P(4.0), 0.25 * I), (StripVerdict{Region::spectrum_interior, PointSpectrum::yes}));
  EXPECT_EQ(classify(inf, I), (StripVerdict{Region::spectrum_boundary, PointSpectrum::yes}));
  EXPECT_EQ(classify(P(2.0), 0.1 * I).region, Region::resolvent_set);
}

TEST(Classify, VerdictRules) {
  EXPECT_EQ(classify(P(2.0), 3.0), (StripVerdict{Region::spectrum_boundary, PointSpectrum::no}));
  EXPECT_EQ(classify(P(4.0), cplx(1.0, 0.5)), (StripVerdict{Region::spectrum_boundary, PointSpectrum::unresolved}));
  EXPECT_EQ(classify(P(1.5), cplx(0.0, -1.0 / 3.0)).point_spectrum, PointSpectrum::unresolved);
  EXPECT_EQ(classify(inf, cplx(2.0, -0.3)), (StripVerdict{Region::spectrum_interior, PointSpectrum::yes}));
  EXPECT_EQ(classify(inf, cplx(0.0, 1.5)), (StripVerdict{Region::resolvent_set, PointSpectrum::no}));
  EXPECT_EQ(classify(P(1.0), cplx(0.0, 1.0 + 1e-13)).region, Region::spectrum_boundary);
  EXPECT_EQ(classify(P(1.0), cplx(0.0, 1.0 + 1e-11)).region, Region::resolvent_set);
}

TEST(Classify, DualityAndReflection) {
  std::mt19937_64 rng(50);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (int i = 0; i < 50; ++i) {
    const LebesgueExponent p = random_exponent(rng);
    const cplx lambda(u(rng), u(rng) / 2.0);
    EXPECT_EQ(classify(p, lambda).region, classify(p.conjugate(), lambda).region);
    EXPECT_EQ(classify(p, lambda).region, classify(p, std::conj(lambda)).region);
  }
}

TEST(Classify, TrichotomyMatchesBoundedCondition) {
  std::mt19937_64 rng(51);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  int checked = 0;
  for (int i = 0; i < 2000; ++i) {
    const LebesgueExponent p = random_exponent(rng);
    const cplx lambda(u(rng), u(rng) / 1.5);
    if (std::fabs(std::fabs(lambda.imag()) - strip_half_width(p)) < 1e-9) continue;
    EXPECT_EQ(resolvent_bounded_condition(p, lambda), classify(p, lambda).region == Region::resolvent_set);
    ++checked;
  }
  EXPECT_GT(checked, 1900);
}

TEST(Classify, StripBoundaryOnLattice) {
  for (double p : {1.0, 4.0 / 3.0, 2.0, 4.0}) {
    const double w = std::fabs(2.0 / p - 1.0);
    for (int k = -200; k <= 200; ++k) {
      const double im = 0.01 * k;
      if (std::fabs(std::fabs(im) - w) < 1e-9) continue;
      EXPECT_EQ(classify(P(p), cplx(0.3, im)).region == Region::resolvent_set, std::fabs(im) > w) << p << ' ' << im;
    }
  }
}

TEST(GrowthTest, Examples) {
  EXPECT_TRUE(point_spectrum_growth_test(P(4.0), 0.25 * I));
  EXPECT_FALSE(point_spectrum_growth_test(P(4.0), 0.5 * I));
  EXPECT_FALSE(point_spectrum_growth_test(P(2.0), 0.0));
  EXPECT_TRUE(point_spectrum_growth_test(inf, I));
  EXPECT_FALSE(point_spectrum_growth_test(inf, 1.01 * I));
}

TEST(GrowthTest, AgreesWithClassifyOnLattice) {
  for (int i = 0; i < 20; ++i) {
    const double p = 1.0 + 9.0 * i / 19.0;
    for (int j = 0; j < 20; ++j) {
      const double im = 0.98 * j / 19.0;
      const StripVerdict v = classify(P(p), cplx(0.0, im));
      if (v.region != Region::spectrum_interior || p == 2.0) continue;
      EXPECT_EQ(point_spectrum_growth_test(P(p), cplx(0.0, im)), p > 2.0) << p << ' ' << im;
      EXPECT_EQ(v.point_spectrum == PointSpectrum::yes, p > 2.0);
    }
  }
}

TEST(BoundedCondition, Examples) {
  EXPECT_TRUE(resolvent_bounded_condition(P(2.0), 0.1 * I));
  EXPECT_TRUE(resolvent_bounded_condition(P(1.0), 1.5 * I));
  EXPECT_FALSE(resolvent_bounded_condition(P(1.0), 0.5 * I));
  const auto [l, r] = pole_integrability(P(1.0), 1.5 * I);
  EXPECT_TRUE(l && r);
}

TEST(MassScan, ZeroFunction) {
  const auto m = lp_mass_scan([](double) { return cplx(0.0); }, P(2.0), {10, 20, 40, 80});
  for (double v : m) EXPECT_EQ(v, 0.0);
}

TEST(MassScan, Validation) {
  auto one = [](double) { return cplx(1.0); };
  EXPECT_THROW(lp_mass_scan(one, inf, {1, 2, 3, 4}), DomainError);
  EXPECT_THROW(lp_mass_scan(one, P(1.0), {1, 2, 3}), DomainError);
  EXPECT_THROW(lp_mass_scan([](double) { return cplx(NAN); }, P(1.0), {1, 2, 3, 4}), QuadratureError);
}

TEST(MassScan, PowerLaws) {
  const std::vector<double> radii{10, 20, 40, 80};
  const auto slow = lp_mass_scan([](double x) { return cplx(std::pow(1.0 + std::fabs(x), -0.5)); }, P(1.0), radii);
  const auto fast = lp_mass_scan([](double x) { return cplx(std::pow(1.0 + std::fabs(x), -1.0)); }, P(2.0), radii);
  EXPECT_NEAR(slow[0], 4.0 * (std::sqrt(11.0) - 1.0), 1e-3);
  EXPECT_FALSE(lp_mass_verdict(slow, radii).convergent);
  EXPECT_TRUE(lp_mass_verdict(fast, radii).convergent);
  EXPECT_NEAR(lp_mass_verdict(fast, radii).exponent, -2.0, 0.1);
}

TEST(MassScan, EigenfunctionMembershipMatchesGrowthTest) {
  struct Case {
    double p;
    cplx lambda;
  };
  const Case cases[] = {{4, {0, 0.25}},   {1, {0, 0.5}},  {3, {0.5, 0.2}}, {6, {-1, 0.4}},  {2.5, {0, 0.3}},
                        {8, {1, 0.55}},   {2, {0, 0.5}},  {1.5, {0, 0.2}}, {5, {0, 0.9}},   {10, {0.1, 0.3}}};
  const std::vector<double> radii{10, 20, 40, 80};
  for (const Case& c : cases) {
    const double expo = c.p * (std::fabs(c.lambda.imag()) / 2.0 - 0.5);
    ASSERT_GE(std::fabs(expo + 1.0), 0.1);
    const FundamentalPair pr = build_fundamental_pair(c.lambda);
    const auto mass = lp_mass_scan([&](double x) { return phi_acute(pr, x); }, P(c.p), radii);
    for (std::size_t i = 1; i < mass.size(); ++i) EXPECT_GT(mass[i], mass[i - 1]);
    EXPECT_EQ(lp_mass_verdict(mass, radii).convergent, point_spectrum_growth_test(P(c.p), c.lambda))
        << "p=" << c.p << " lambda=" << c.lambda << " alpha=" << lp_mass_verdict(mass, radii).exponent;
  }
}

TEST(Probe, Validation) {
  EXPECT_THROW(resolvent_norm_probe(P(1.0), 2.0 * I, 20.0, 100), DomainError);
  EXPECT_THROW(resolvent_norm_probe(P(1.0), 2.0 * I, 20.0, 7000), ResourceError);
  EXPECT_THROW(resolvent_norm_probe(P(1.0), 2.0 * I, 20.0, 400, 1e5), ResourceError);
}

TEST(Probe, GrowsTowardTheStrip) {
  for (const LebesgueExponent& p : {P(1.0), inf}) {
    double prev = 0.0;
    for (double delta : {0.5, 0.25, 0.1}) {
      const ProbeResult r = resolvent_norm_probe(p, cplx(0.0, 1.0 + delta), 20.0, 400);
      EXPECT_EQ(r.norm_kind, NormKind::exact);
      EXPECT_GT(r.value, prev) << p.to_string() << ' ' << delta;
      prev = r.value;
    }
  }
}

TEST(Probe, SmallDeepInResolventSet) {
  EXPECT_LE(resolvent_norm_probe(P(1.0), 10.0 * I, 20.0, 400).value, 1.0);
}

TEST(Probe, SpectralNormStableUnderRefinement) {
  const double a = resolvent_norm_probe(P(2.0), 2.0 * I, 20.0, 400).value;
  const double b = resolvent_norm_probe(P(2.0), 2.0 * I, 20.0, 800).value;
  EXPECT_LT(std::fabs(a - b), 0.1 * b);
}

TEST(Probe, SymmetricKernelGivesEqualEndpointNorms) {
  // The kernel matrix is symmetric, so column and row sums coincide.
  const double one = resolvent_norm_probe(P(1.0), cplx(0.5, 2.0), 10.0, 200).value;
  const double infty = resolvent_norm_probe(inf, cplx(0.5, 2.0), 10.0, 200).value;
  EXPECT_NEAR(one, infty, 1e-12 * one);
}

TEST(Probe, IntermediateExponentIsInterpolated) {
  const cplx lambda(0.0, 2.0);
  const ProbeResult r = resolvent_norm_probe(P(1.5), lambda, 10.0, 200);
  EXPECT_EQ(r.norm_kind, NormKind::interpolated);
  const double one = resolvent_norm_probe(P(1.0), lambda, 10.0, 200).value;
  const double two = resolvent_norm_probe(P(2.0), lambda, 10.0, 200).value;
  EXPECT_LE(r.value, one * (1 + 1e-12));
  EXPECT_GE(r.value, two * (1 - 1e-12));
}

TEST(Probe, ConjugateLambdaHasSameNorm) {
  const double up = resolvent_norm_probe(P(1.0), cplx(0.3, 1.5), 10.0, 200).value;
  const double down = resolvent_norm_probe(P(1.0), cplx(0.3, -1.5), 10.0, 200).value;
  EXPECT_EQ(up, down);
}

TEST(SpectrumMap, StripBoundaryForP1) {
  const SpectrumMap map = spectrum_map(P(1.0), {-2, 2}, {-2, 2}, 81);
  ASSERT_EQ(map.nodes.size(), 81u * 81u);
  for (const MapNode& n : map.nodes) {
    if (std::fabs(std::fabs(n.im) - 1.0) < 1e-9) {
      EXPECT_EQ(n.verdict.region, Region::spectrum_boundary);
      continue;
    }
    EXPECT_EQ(n.verdict.region == Region::resolvent_set, std::fabs(n.im) > 1.0) << n.im;
  }
}

TEST(SpectrumMap, OnlyRealAxisForP2) {
  const SpectrumMap map = spectrum_map(P(2.0), {-2, 2}, {-2, 2}, 81);
  for (const MapNode& n : map.nodes)
    EXPECT_EQ(n.verdict.region != Region::resolvent_set, std::fabs(n.im) <= 1e-12) << n.im;
}

TEST(SpectrumMap, ConjugateExponentsGiveSameRegions) {
  const SpectrumMap a = spectrum_map(P(3.0), {-1, 1}, {-1, 1}, 41);
  const SpectrumMap b = spectrum_map(P(1.5), {-1, 1}, {-1, 1}, 41);
  for (std::size_t k = 0; k < a.nodes.size(); ++k) EXPECT_EQ(a.nodes[k].verdict.region, b.nodes[k].verdict.region);
}

TEST(SpectrumMap, Limits) {
  EXPECT_THROW(spectrum_map(P(1.0), {-1, 1}, {-1, 1}, 2001), ResourceError);
  EXPECT_THROW(spectrum_map(P(1.0), {-1, 1}, {-1, 1}, 51, ProbeSettings{}), ResourceError);
  EXPECT_THROW(spectrum_map(P(1.0), {1, -1}, {-1, 1}, 5), DomainError);
}

TEST(SpectrumMap, ProbeColumnAndCsv) {
  const SpectrumMap map = spectrum_map(P(3.0), {-1, 1}, {1.5, 2.5}, 2, ProbeSettings{10.0, 200});
  EXPECT_EQ(map.norm_kind, NormKind::interpolated);
  std::ostringstream out;
  write_map_csv(out, map);
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "re_lambda,im_lambda,region,point_spectrum,probe");
  int rows = 0;
  while (std::getline(in, line)) ++rows;
  EXPECT_EQ(rows, 4);
  for (const MapNode& n : map.nodes) ASSERT_TRUE(n.probe && *n.probe > 0.0);
}

TEST(Parallelism, ThreadCountFromEnvironment) {
  {
    ScopedEnv env("HUBBLE_SPECTRUM_THREADS", "3");
    EXPECT_EQ(thread_count(), 3u);
  }
  {
    ScopedEnv env("HUBBLE_SPECTRUM_THREADS", "zero");
    EXPECT_GE(thread_count(), 1u);
  }
}

TEST(Parallelism, ResultsIndependentOfThreadCount) {
  std::vector<MapNode> serial, threaded;
  {
    ScopedEnv env("HUBBLE_SPECTRUM_THREADS", "1");
    serial = spectrum_map(P(4.0), {-1, 1}, {-1, 1}, 30).nodes;
  }
  {
    ScopedEnv env("HUBBLE_SPECTRUM_THREADS", "4");
    threaded = spectrum_map(P(4.0), {-1, 1}, {-1, 1}, 30).nodes;
  }
  ASSERT_EQ(serial.size(), threaded.size());
  for (std::size_t k = 0; k < serial.size(); ++k) EXPECT_EQ(serial[k].verdict, threaded[k].verdict);
}

TEST(Parallelism, ExceptionsPropagate) {
  ScopedEnv env("HUBBLE_SPECTRUM_THREADS", "4");
  EXPECT_THROW(parallel_for(100, [](std::size_t i) {
                 if (i == 57) throw GridError("boom");
               }),
               GridError);
}
