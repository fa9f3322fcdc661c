#include "sublin/nonlinearity.hpp"
#include "sublin/quadrature.hpp"
#include "sublin/strauss.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

using namespace sublin;

namespace {

Nonlinearity catalog(const char* name, double C = 1.0) {
  CatalogParams params;
  params.p = 3.0;
  params.C = C;
  return make_catalog_nonlinearity(name, params);
}

}  // namespace

TEST(Nonlinearity, PurePowerValues) {
  const auto f = catalog("pure_power");
  EXPECT_DOUBLE_EQ(f(1.0), 1.0);
  EXPECT_DOUBLE_EQ(f(-2.0), -8.0);
  EXPECT_DOUBLE_EQ(f.certificate().C, 1.0);
}

TEST(Nonlinearity, ZeroEverywhere) {
  const auto f = catalog("zero");
  for (double s : {-5.0, -1.0, 0.0, 0.3, 7.0}) EXPECT_EQ(f(s), 0.0);
}

TEST(Nonlinearity, HyphenatedNamesAccepted) {
  EXPECT_EQ(catalog("pure-power").kind(), CatalogKind::PurePower);
  EXPECT_EQ(catalog("truncated-power").kind(), CatalogKind::TruncatedPower);
}

TEST(Nonlinearity, RejectsBadInput) {
  CatalogParams params;
  EXPECT_THROW(make_catalog_nonlinearity("cubic", params), std::invalid_argument);
  params.p = 1.0;
  EXPECT_THROW(make_catalog_nonlinearity("pure_power", params), std::invalid_argument);
  params.p = 3.0;
  params.C = 0.0;
  EXPECT_THROW(make_catalog_nonlinearity("pure_power", params), std::invalid_argument);
  params.C = 1.0;
  params.truncation = -1.0;
  EXPECT_THROW(make_catalog_nonlinearity("truncated_power", params), std::invalid_argument);
  // N = 3 has critical exponent 5.
  CatalogParams critical;
  critical.dimension = 3;
  critical.p = 6.0;
  EXPECT_THROW(make_catalog_nonlinearity("pure_power", critical), std::invalid_argument);
  critical.p = 5.0;
  EXPECT_NO_THROW(make_catalog_nonlinearity("pure_power", critical));
}

TEST(Nonlinearity, GrowthCheckEqualityCase) {
  const std::vector<double> grid{-2, -1, 0, 1, 2};
  const auto report = check_growth(catalog("pure_power"), grid);
  EXPECT_TRUE(report.passed);
  EXPECT_EQ(report.max_upper_violation, 0.0);
}

TEST(Nonlinearity, GrowthCheckCatchesWrongConstant) {
  const std::vector<double> grid{2.0};
  const auto report = check_growth(catalog("pure_power", 0.5), grid);
  EXPECT_FALSE(report.passed);
  EXPECT_DOUBLE_EQ(report.max_upper_violation, 8.0);
  EXPECT_DOUBLE_EQ(report.upper_argmax, 2.0);
}

TEST(Nonlinearity, OscillatoryDenseSweep) {
  const auto grid = uniform_grid(-10.0, 10.0, 20001);
  const auto report = check_growth(catalog("oscillatory"), grid);
  EXPECT_TRUE(report.passed);
  EXPECT_EQ(report.max_sign_violation, 0.0);
}

TEST(Antiderivative, ClosedForms) {
  EXPECT_DOUBLE_EQ(antiderivative(catalog("pure_power"))(2.0), 4.0);
  EXPECT_EQ(antiderivative(catalog("zero"))(3.7), 0.0);
  EXPECT_EQ(antiderivative(catalog("pure_power")).method(), Antiderivative::Method::ClosedForm);
  EXPECT_EQ(antiderivative(catalog("oscillatory")).method(), Antiderivative::Method::AdaptiveQuadrature);
}

TEST(Antiderivative, OscillatoryMatchesRefinedFixedRule) {
  const auto f = catalog("oscillatory");
  const double adaptive = antiderivative(f)(1.0);
  const double fixed = integrate_composite([&](double t) { return f(t); }, 0.0, 1.0, 200, 20);
  EXPECT_NEAR(adaptive, fixed, 1e-12);
}

TEST(Antiderivative, ReversedIntervalsAreSigned) {
  const auto G = antiderivative(catalog("oscillatory"));
  EXPECT_NEAR(G.increment(2.0, 1.0), -G.increment(1.0, 2.0), 1e-13);
  EXPECT_NEAR(G(-1.5), G(1.5), 1e-12);  // f odd, G even
}

TEST(Antiderivative, FiniteDifferenceMatchesF) {
  const double h = 1e-6;
  for (const char* name : {"pure_power", "truncated_power", "oscillatory"}) {
    const auto f = catalog(name);
    const auto G = antiderivative(f);
    for (double s : uniform_grid(-10.0, 10.0, 100)) {
      const double fd = G.increment(s - h, s + h) / (2 * h);
      EXPECT_LE(std::abs(fd - f(s)), 1e-6 * (1.0 + std::abs(f(s)))) << name << " at " << s;
    }
  }
}

TEST(Quadrature, AdaptiveHandlesLocallyVanishingIntegrand) {
  // Near a zero of sin the Kronrod error estimate is roundoff; must still terminate.
  const auto f = catalog("oscillatory");
  const auto r = integrate_adaptive([&](double t) { return f(t); }, -62.857109, -62.841484, 1e-12);
  const double fixed = integrate_composite([&](double t) { return f(t); }, -62.857109, -62.841484, 50, 20);
  EXPECT_NEAR(r.value, fixed, 1e-12);
}

TEST(Strauss, HandComputedValues) {
  const auto f2 = make_strauss(catalog("pure_power"), 2);
  EXPECT_DOUBLE_EQ(f2(1.0), 2.03125);
  EXPECT_EQ(f2(0.0), 0.0);
  EXPECT_DOUBLE_EQ(f2(3.0), 11.53125);
  EXPECT_DOUBLE_EQ(f2(17.0), 11.53125);
  EXPECT_DOUBLE_EQ(f2(-1.0), -2.03125);
}

TEST(Strauss, ZeroNonlinearityStaysZero) {
  for (int k : {1, 4, 64}) {
    const auto a = make_strauss(catalog("zero"), k);
    for (double s : {-100.0, -0.5, 0.0, 0.01, 3.0}) EXPECT_EQ(a(s), 0.0);
    EXPECT_EQ(uniform_error(a, 2.0), 0.0);
  }
}

TEST(Strauss, BreakpointContinuityAndOrigin) {
  for (const char* name : {"pure_power", "zero", "truncated_power", "oscillatory"}) {
    for (int k = 1; k <= 256; k *= 2) {
      const auto a = make_strauss(catalog(name), k);
      EXPECT_LE(a.breakpoint_gap(), 1e-12) << name << " k=" << k;
      EXPECT_EQ(a(0.0), 0.0);
    }
  }
}

TEST(Strauss, GrowthConstantsFromProof) {
  const auto a = make_strauss(catalog("pure_power"), 2);
  const auto report = check_growth_bounds(a, std::vector<double>{1.0});
  EXPECT_DOUBLE_EQ(report.C1, 16.0);
  EXPECT_DOUBLE_EQ(report.C2, 8.0);
  EXPECT_TRUE(report.passed());
}

TEST(Strauss, LipschitzEstimates) {
  auto zero = make_strauss(catalog("zero"), 3);
  EXPECT_EQ(estimate_lipschitz(zero), 0.0);

  auto one = make_strauss(catalog("pure_power"), 1);
  EXPECT_GE(estimate_lipschitz(one) + 1e-9, 3.75);
  EXPECT_TRUE(one.lipschitz_estimate().has_value());

  double previous = 0.0;
  for (int k : {1, 2, 4, 8}) {
    auto a = make_strauss(catalog("pure_power"), k);
    const double c = estimate_lipschitz(a);
    EXPECT_GT(c, previous);
    previous = c;
  }
}

TEST(Strauss, LipschitzRejectsDegenerateGrid) {
  auto a = make_strauss(catalog("pure_power"), 2);
  EXPECT_THROW(estimate_lipschitz(a, std::vector<double>{1.0, 1.0}), std::invalid_argument);
  EXPECT_THROW(estimate_lipschitz(a, std::vector<double>{1.0}), std::invalid_argument);
}

TEST(Strauss, PointwiseErrorDecreasesAtOne) {
  double previous = INFINITY;
  for (int k : {2, 8, 32, 128}) {
    const auto a = make_strauss(catalog("pure_power"), k);
    const double err = std::abs(a(1.0) - 1.0);
    if (k == 2) EXPECT_DOUBLE_EQ(err, 1.03125);
    EXPECT_LT(err, previous);
    previous = err;
  }
  EXPECT_LT(previous, 0.05);
}

TEST(Strauss, RejectsBadIndexAndLooseTolerance) {
  EXPECT_THROW(make_strauss(catalog("pure_power"), 0), std::invalid_argument);
  EXPECT_THROW(StraussApprox(Antiderivative(catalog("oscillatory"), 1e-9), 16), std::invalid_argument);
  EXPECT_NO_THROW(StraussApprox(Antiderivative(catalog("pure_power"), 1e-9), 16));  // closed form
}

TEST(Strauss, PrimitiveDerivativeIsFk) {
  const auto a = make_strauss(catalog("oscillatory"), 8);
  const double h = 1e-6;
  for (double s : {-12.0, -3.3, -0.1, 0.05, 0.7, 5.2, 9.0}) {
    EXPECT_NEAR((a.primitive(s + h) - a.primitive(s - h)) / (2 * h), a(s), 1e-5 * (1 + std::abs(a(s))));
  }
}
