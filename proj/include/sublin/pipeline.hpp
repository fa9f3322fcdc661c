#pragma once

#include "sublin/constants.hpp"
#include "sublin/galerkin.hpp"
#include "sublin/nonlinearity.hpp"
#include "sublin/reference.hpp"
#include "sublin/spectral_domain.hpp"

#include <array>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace sublin {

/// Invalid user input (schedules, λ outside the certified window, ...).
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct RunConfig {
  ModelDomain domain = ModelDomain::interval(1.0);
  std::string f_name = "pure_power";
  CatalogParams f_params;
  double q = 0.5;
  double lambda = 0.0;
  std::vector<std::size_t> m_schedule{8, 16, 32, 64, 128};
  std::vector<long long> n_schedule{4, 16, 64, 256, 1024};
  double solver_tolerance = 1e-10;
  double inner_limit_tolerance = 1e-8;
  double outer_l1_tolerance = 1e-4;
  double residual_tolerance = 1e-6;     // verify_final (a)
  double positivity_tolerance = 1e-8;   // verify_final (b)
  double boundary_tolerance = 1e-8;     // verify_final (c)
  double distributional_tolerance = 1e-7;  // verify_final (d)
  int bump_probes = 20;
  std::size_t reference_m = 0;  // 0: largest m of the schedule
  std::uint64_t seed = 20240517;
  bool parallel = true;
  EmbeddingOptions embedding;
};

/// Throws ConfigError for empty or non-increasing schedules, q ∉ (0,1), λ < 0,
/// non-positive tolerances, or an unknown nonlinearity.
void validate_config(const RunConfig& config);

Nonlinearity config_nonlinearity(const RunConfig& config);

/// Certificate for the config; throws ConfigError naming λ* when λ ≥ λ*.
Certificate certify_config(const RunConfig& config);

using ProblemFactory = std::function<ApproxProblem(std::shared_ptr<const SpectralSpace>)>;

struct InnerLimit {
  std::vector<std::size_t> m;
  std::vector<GalerkinSolution> stages;
  std::vector<double> cauchy_h10;  // ‖v^(m_i) - v^(m_{i+1})‖_{H¹₀}
  bool strictly_decreasing = true;
  bool converged = false;          // last distance ≤ tolerance
  std::vector<std::string> flags;
  [[nodiscard]] const GalerkinSolution& final() const { return stages.back(); }
};

/// Solves along the spaces in order, warm-starting each from the previous by zero-padding.
InnerLimit inner_limit(const ProblemFactory& make, const std::vector<std::shared_ptr<const SpectralSpace>>& spaces,
                       const SolverOptions& options, double tolerance,
                       const std::optional<Eigen::VectorXd>& initial = std::nullopt);

struct CheckResult {
  std::string name;
  bool passed = false;
  double value = 0.0;
  double tolerance = 0.0;
  std::array<double, 2> worst_point{0.0, 0.0};
};

struct FinalReport {
  std::vector<CheckResult> checks;
  [[nodiscard]] bool passed() const;
  [[nodiscard]] const CheckResult& check(const std::string& name) const;
};

/// Checks for the limit equation -Δv = λv^q + f(v):
///   strong_residual   max |-Δv - λv₊^q - f(v₊)| on interior nodes
///   positivity        min over interior nodes of v - λ^{1/(1-q)} w̃
///   boundary          |v| linearly extrapolated to the boundary from the two nearest nodes
///   distributional    weak defects against unit-H¹₀ smooth bumps
FinalReport verify_final(const ApproxProblem& limit, const Eigen::VectorXd& xi, const ReferenceSolution& ref,
                         const RunConfig& config);

/// Max strong residual |-Δv - forcing| over interior quadrature nodes.
double strong_residual(const ApproxProblem& prob, const Eigen::VectorXd& xi,
                       std::array<double, 2>* worst = nullptr);

/// Least-squares slope of log|ξ_j| against log μ_j over coefficients above 1e-14.
double coefficient_decay_slope(const SpectralSpace& space, const Eigen::VectorXd& xi);

struct StageRecord {
  long long n = 0;
  std::size_t m = 0;
  GalerkinSolution solution;
  std::optional<double> cauchy_h10;  // to the next m
  double l1_nonlin_gap = 0.0;        // ∫|f_n(v_{n,m}) - f(v)|
  double strong_residual = 0.0;      // of the regularized problem at (n, m)
  double lower_bound_margin = 0.0;   // min v - λ^{1/(1-q)} w̃
};

struct OuterStage {
  long long n = 0;
  InnerLimit inner;
  double l1_nonlin_gap = 0.0;
  double reaction_pairing = 0.0;  // ∫ f_n(v_n) v_n
  PairingSplit pairing;
  double min_interior = 0.0;
  double lower_bound_margin = 0.0;
  std::optional<double> h10_to_next;
  std::optional<double> l2_to_next;
};

struct ConvergenceReport {
  RunConfig config;
  Certificate certificate;
  std::vector<OuterStage> stages;
  std::vector<StageRecord> records;
  ReferenceSolution reference;
  GalerkinSolution final_solution;      // limit problem at the largest m
  double final_strong_residual = 0.0;
  double largest_n_strong_residual = 0.0;  // v at the largest n, against the limit equation
  double coefficient_decay = 0.0;
  FinalReport final_checks;
  bool uniform_bound = true;
  bool inner_decreasing = true;
  bool inner_converged = true;
  bool l1_decreasing = true;
  bool outer_converged = false;
  bool positivity = true;
  std::vector<std::string> flags;
  std::shared_ptr<const SpectralSpace> final_space;
};

/// Runs inner limits for each n (concurrently when config.parallel), then the limit problem
/// warm-started from the largest-n solution, the reference solution and verify_final.
ConvergenceReport outer_limit(const RunConfig& config);

}  // namespace sublin
