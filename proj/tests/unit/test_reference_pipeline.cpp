#include "fd_oracle.hpp"

#include "sublin/pipeline.hpp"
#include "sublin/reference.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace sublin;
using std::numbers::pi;

namespace {

const ReferenceSolution& reference64() {
  static const ReferenceSolution ref = solve_reference(ModelDomain::interval(1.0), 0.5, 64);
  return ref;
}

RunConfig small_config() {
  RunConfig config;
  config.m_schedule = {8, 16, 32};
  config.n_schedule = {4, 16, 64};
  config.bump_probes = 4;
  const auto probe = build_certificate(config.domain, 0.5, 3.0, 1.0, 0.0);
  config.lambda = 0.5 * probe.lambda_star;
  return config;
}

std::shared_ptr<const SpectralSpace> interval_space(std::size_t m) {
  return std::make_shared<const SpectralSpace>(build_basis(ModelDomain::interval(1.0), m));
}

}  // namespace

TEST(Reference, PositiveAndSymmetric) {
  const auto& ref = reference64();
  EXPECT_TRUE(ref.converged);
  EXPECT_GT(ref.min_interior, 0.0);
  const std::vector<double> xs{0.5, 0.2, 0.8, 0.05, 0.95};
  const std::vector<double> ys{0.0};
  const Eigen::VectorXd w = ref.evaluate(xs, ys);
  EXPECT_GT(w[0], 0.0);
  EXPECT_NEAR(w[1], w[2], 1e-10);
  EXPECT_NEAR(w[3], w[4], 1e-10);
}

TEST(Reference, FixedPointAndOracle) {
  const auto& ref = reference64();
  EXPECT_LE(ref.fixed_point_change, 1e-10);
  const auto fd = oracle::sublinear_fd(1.0, 2001, 0.5, 0.02);
  const std::vector<double> ys{0.0};
  const Eigen::VectorXd w = ref.evaluate(fd.x, ys);
  double dist = 0.0;
  for (std::size_t i = 0; i < fd.x.size(); ++i) dist = std::max(dist, std::abs(w[static_cast<Eigen::Index>(i)] - fd.v[i]));
  EXPECT_LE(dist, 1e-5);
}

TEST(Reference, ErrorCases) {
  EXPECT_THROW(solve_reference(ModelDomain::interval(1.0), 1.5, 8), std::invalid_argument);
  ReferenceOptions bad;
  bad.start_scale = -1.0;
  EXPECT_THROW(solve_reference(ModelDomain::interval(1.0), 0.5, 8, bad), std::invalid_argument);
  // A start far below the solution rises: loss of monotonicity is reported.
  ReferenceOptions low;
  low.start_scale = 1e-6;
  EXPECT_THROW(solve_reference(ModelDomain::interval(1.0), 0.5, 8, low), MonotonicityError);
}

TEST(Comparison, TinyLambdaAndNegativeControl) {
  const auto& ref = reference64();
  const auto space = interval_space(16);
  Eigen::VectorXd xi = Eigen::VectorXd::Zero(16);
  xi[0] = 0.1;
  EXPECT_TRUE(comparison_lower_bound(*space, xi, ref, 1e-6).passed());

  const double lambda = 1.0;
  const auto zero = comparison_lower_bound(*space, Eigen::VectorXd::Zero(16), ref, lambda);
  EXPECT_FALSE(zero.passed());
  EXPECT_NEAR(zero.min_difference, -ref.max_value, 1e-3 * ref.max_value);
}

TEST(Comparison, ScalingIdentitySigns) {
  const auto space = interval_space(16);
  Eigen::VectorXd xi = Eigen::VectorXd::Zero(16);
  xi[0] = 0.2;
  xi[2] = 0.05;
  const auto report = scaling_identity_check(*space, xi, 0.7, 0.5);
  EXPECT_GT(report.nodes, 0u);
  EXPECT_EQ(report.sign_mismatches, 0u);
  EXPECT_LE(report.max_relative_deviation, 1e-12);
}

TEST(InnerLimit, PaddedDistanceIsEnergyDistance) {
  const auto f = make_catalog_nonlinearity("zero", {});
  std::vector<std::shared_ptr<const SpectralSpace>> spaces{interval_space(8), interval_space(16)};
  const ProblemFactory make = [&](std::shared_ptr<const SpectralSpace> s) {
    return make_approx_problem(std::move(s), f, 0.5, 0.0, 2);
  };
  const auto limit = inner_limit(make, spaces, {}, 1e-8);
  ASSERT_EQ(limit.cauchy_h10.size(), 1u);
  const Eigen::VectorXd diff = resize_coefficients(limit.stages[0].xi, 16) - limit.stages[1].xi;
  EXPECT_DOUBLE_EQ(limit.cauchy_h10[0], diff.norm());
  // Energy tail of x(1-x)/4 between modes 9 and 15 (odd modes only).
  double tail = 0.0;
  for (int i = 9; i <= 15; i += 2) tail += std::pow(2.0 * std::sqrt(2.0) / (i * i * pi * pi) / 2.0, 2);
  EXPECT_NEAR(limit.cauchy_h10[0], std::sqrt(tail), 1e-12);
}

TEST(InnerLimit, PurePowerDistancesDecrease) {
  const auto config = small_config();
  const auto cert = certify_config(config);
  const auto f = config_nonlinearity(config);
  std::vector<std::shared_ptr<const SpectralSpace>> spaces;
  for (std::size_t m : {8, 16, 32, 64}) spaces.push_back(interval_space(m));
  const ProblemFactory make = [&](std::shared_ptr<const SpectralSpace> s) {
    return make_approx_problem(std::move(s), f, 0.5, config.lambda, 16, cert);
  };
  const auto limit = inner_limit(make, spaces, {}, 1e-8);
  EXPECT_TRUE(limit.strictly_decreasing);
  EXPECT_EQ(limit.final().xi.size(), 64);
}

TEST(Pipeline, ValidationErrors) {
  auto config = small_config();
  config.q = 1.2;
  EXPECT_THROW(validate_config(config), ConfigError);
  config = small_config();
  config.m_schedule = {16, 8};
  EXPECT_THROW(validate_config(config), ConfigError);
  config = small_config();
  config.lambda = 10.0;
  try {
    certify_config(config);
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("lambda_star"), std::string::npos);
  }
}

TEST(Pipeline, SmallRunIsConsistent) {
  const auto report = outer_limit(small_config());
  ASSERT_EQ(report.stages.size(), 3u);
  EXPECT_TRUE(report.uniform_bound);
  EXPECT_TRUE(report.inner_decreasing);
  EXPECT_TRUE(report.positivity);
  EXPECT_EQ(report.records.size(), 9u);
  for (const auto& s : report.stages) {
    EXPECT_NEAR(s.pairing.direct, s.pairing.positive_part + s.pairing.negative_part, 1e-10);
    EXPECT_TRUE(std::isfinite(s.reaction_pairing));
  }
  EXPECT_LT(report.stages.back().l1_nonlin_gap, report.stages.front().l1_nonlin_gap);
  EXPECT_TRUE(report.final_checks.check("boundary").passed);
  EXPECT_TRUE(report.final_checks.check("positivity").passed);
}

TEST(Pipeline, SingleOuterPointIsFlagged) {
  auto config = small_config();
  config.n_schedule = {16};
  const auto report = outer_limit(config);
  EXPECT_FALSE(report.outer_converged);
  EXPECT_FALSE(report.flags.empty());
}

TEST(Pipeline, CorruptedSolutionFailsResidual) {
  auto config = small_config();
  const auto cert = certify_config(config);
  const auto space = interval_space(32);
  const auto limit = make_limit_problem(space, config_nonlinearity(config), 0.5, config.lambda, cert);
  const auto sol = solve_in_ball(limit);
  Eigen::VectorXd bad = sol.xi;
  bad[0] += 0.1;
  const double clean = strong_residual(limit, sol.xi);
  const double corrupted = strong_residual(limit, bad);
  // 0.1·w_1 adds 0.1·μ₁·w_1 = 0.1·√2·π·sin(πx) to -Δv.
  EXPECT_GT(corrupted, clean + 0.05 * std::sqrt(2.0) * pi);
  const auto report = verify_final(limit, bad, reference64(), config);
  EXPECT_FALSE(report.passed());
  EXPECT_FALSE(report.check("strong_residual").passed);
}

TEST(Pipeline, LinearResidualShrinksWithM) {
  // −v'' = 1/n: the sine series of the constant source converges like O(1/(m d)) at distance d from
  // the edge, so measure on a fixed band rather than on the m-dependent interior grid.
  const auto f = make_catalog_nonlinearity("zero", {});
  double previous = INFINITY;
  for (std::size_t m : {16, 64, 256}) {
    const auto space = interval_space(m);
    const auto prob = make_approx_problem(space, f, 0.5, 0.0, 1);
    const auto sol = solve_in_ball(prob);
    const Eigen::VectorXd defect = space->expand_negative_laplacian(sol.xi) - forcing(prob, space->expand(sol.xi));
    double r = 0.0;
    for (std::size_t i = 0; i < space->node_count(); ++i) {
      if (space->quadrature().boundary_distance(i) >= 0.1) r = std::max(r, std::abs(defect[static_cast<Eigen::Index>(i)]));
    }
    EXPECT_LT(r, 0.5 * previous);
    previous = r;
  }
  EXPECT_LT(previous, 0.05);
}
