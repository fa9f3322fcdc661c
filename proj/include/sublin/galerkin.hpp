#pragma once

#include "sublin/constants.hpp"
#include "sublin/nonlinearity.hpp"
#include "sublin/spectral_domain.hpp"
#include "sublin/strauss.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace sublin {

/// The nonlinear reaction entering F: the Lipschitz approximation f_n, or f itself
/// for the limit problem.
class Reaction {
 public:
  explicit Reaction(StraussApprox fn);
  explicit Reaction(Nonlinearity f);

  double value(double s) const;
  double slope(double s) const;
  /// ∫₀^s of the reaction.
  double primitive(double s) const;

  [[nodiscard]] bool regularized() const { return std::holds_alternative<StraussApprox>(term_); }
  [[nodiscard]] const Nonlinearity& source() const;
  [[nodiscard]] std::optional<int> index() const;

 private:
  std::variant<StraussApprox, Nonlinearity> term_;
  std::optional<Antiderivative> limit_primitive_;
};

/// -Δv = λ(v₊)^q + reaction(v₊) + source on the model domain, projected on W_m.
/// `source` is 1/n for the regularized problems and 0 for the limit problem.
struct ApproxProblem {
  std::shared_ptr<const SpectralSpace> space;
  Reaction reaction;
  double lambda = 0.0;
  double q = 0.5;
  double source = 0.0;
  std::optional<long long> n;
  std::optional<Certificate> certificate;

  /// Feasible certificate, λ below λ* and n ≥ n*.
  [[nodiscard]] bool certified() const;
  /// Certificate radius, or +∞ when no certificate is attached.
  [[nodiscard]] double radius() const;
  [[nodiscard]] std::size_t dimension() const { return space->size(); }
};

/// Regularized problem with f_n and source 1/n. Throws std::invalid_argument for
/// q ∉ (0,1), λ < 0 or n < 1.
ApproxProblem make_approx_problem(std::shared_ptr<const SpectralSpace> space, const Nonlinearity& f,
                                  double q, double lambda, long long n,
                                  std::optional<Certificate> certificate = std::nullopt);

/// Limit problem: reaction f, no source term.
ApproxProblem make_limit_problem(std::shared_ptr<const SpectralSpace> space, const Nonlinearity& f,
                                 double q, double lambda,
                                 std::optional<Certificate> certificate = std::nullopt);

/// λ(v₊)^q + reaction(v₊) + source at each grid value.
Eigen::VectorXd forcing(const ApproxProblem& prob, const Eigen::VectorXd& v);

/// F_j(ξ) = ξ_j - λ∫(v₊)^q w_j - ∫f_n(v₊)w_j - (1/n)∫w_j.
Eigen::VectorXd assemble_F(const ApproxProblem& prob, const Eigen::VectorXd& xi);

/// E(ξ) = |ξ|²/2 - λ/(q+1)∫(v₊)^{q+1} - ∫F_n(v₊) - (1/n)∫v, with ∇E = F.
double energy(const ApproxProblem& prob, const Eigen::VectorXd& xi);

/// ⟨F(ξ), ξ⟩ and its split over Ω⁺ = {|v| ≥ 1/n} and Ω⁻ = {|v| < 1/n}.
struct PairingSplit {
  double direct = 0.0;
  double positive_part = 0.0;
  double negative_part = 0.0;
};
PairingSplit split_pairing(const ApproxProblem& prob, const Eigen::VectorXd& xi);

struct SolverOptions {
  double tolerance = 1e-10;
  int max_newton_steps = 200;
  int max_descent_steps = 10000;
  double jacobian_epsilon = 1e-12;
  /// Use a dense Jacobian when nodes x modes is at most this; matrix-free CG otherwise.
  std::size_t dense_limit = 8'000'000;
};

struct GalerkinSolution {
  Eigen::VectorXd xi;
  double residual_norm = 0.0;
  double h10_norm = 0.0;
  double min_value = 0.0;
  double energy = 0.0;
  int newton_steps = 0;
  int descent_steps = 0;
  bool converged = false;
  bool certified = false;
  std::string status;
  std::string path_hash;  // FNV-1a over accepted iterates
};

/// Damped Newton inside the ball |ξ| ≤ r with an energy-descent fallback.
/// Starts from `initial` (zero-padded/truncated to m) or from ξ⁰ = (1/n)∫w_j.
/// Never throws on non-convergence: `converged` is false and `status` says why.
GalerkinSolution solve_in_ball(const ApproxProblem& prob, const SolverOptions& options = {},
                               const std::optional<Eigen::VectorXd>& initial = std::nullopt);

/// Fills residual, norm, min and energy diagnostics for a coefficient vector.
GalerkinSolution describe_solution(const ApproxProblem& prob, const Eigen::VectorXd& xi);

/// Weak-form defects ∫∇v·∇φ - ∫(λ(v₊)^q + reaction(v₊) + source)φ.
struct WeakResidualReport {
  double in_span_max = 0.0;                 // over w_1..w_m
  std::vector<double> next_mode_defects;    // w_{m+1}, w_{m+2}, ...
  std::vector<double> bump_defects;         // unit-H¹₀ smooth bump combinations
  double out_of_span_max = 0.0;
};

WeakResidualReport weak_residual(const ApproxProblem& prob, const Eigen::VectorXd& xi,
                                 int probe_count, std::uint64_t seed, int next_modes = 4);

/// Samples `trials` points uniformly on |ξ| = r and returns min ⟨F(ξ), ξ⟩.
struct SphereReport {
  double min_pairing = 0.0;
  double rho = 0.0;
  double radius = 0.0;
  int trials = 0;
  [[nodiscard]] bool passed(double slack = 1e-10) const { return min_pairing >= rho / 2.0 - slack; }
};
SphereReport sphere_margin_check(const ApproxProblem& prob, int trials, std::uint64_t seed);

/// Smooth compactly supported probe functions on the model domain.
struct BumpProbe {
  std::vector<std::array<double, 4>> bumps;  // (x0, x1, y0, y1) supports
  std::vector<double> weights;
  double scale = 1.0;
  Eigen::VectorXd values;    // at quadrature nodes
  Eigen::VectorXd grad_x;
  Eigen::VectorXd grad_y;
};
std::vector<BumpProbe> make_bump_probes(const SpectralSpace& space, int count, std::uint64_t seed);

}  // namespace sublin
