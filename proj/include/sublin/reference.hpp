#pragma once

#include "sublin/spectral_domain.hpp"

#include <Eigen/Dense>

#include <array>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>

namespace sublin {

/// Raised when an iterate rises above its predecessor (under-resolved basis or quadrature).
class MonotonicityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ReferenceOptions {
  double tolerance = 1e-12;     // sup-norm step size at termination
  int max_iterations = 1000;
  double monotone_slack = 1e-12;
  /// Starting supersolution c·w_1; found by a dyadic scan when empty.
  std::optional<double> start_scale;
};

/// Positive solution of -Δw = w^q with Dirichlet data, by monotone iteration from above.
struct ReferenceSolution {
  std::shared_ptr<const SpectralSpace> space;
  double q = 0.5;
  Eigen::VectorXd xi;        // H¹₀-normalized coefficients
  Eigen::VectorXd w_tilde;   // values at the quadrature nodes
  int iterations = 0;
  double start_scale = 0.0;
  double last_step = 0.0;    // sup-norm of the final update
  bool converged = false;
  double residual = 0.0;     // max |-Δw - w^q| on interior nodes
  double fixed_point_change = 0.0;
  double max_value = 0.0;
  double min_interior = 0.0;

  /// Values on the tensor grid xs x ys.
  [[nodiscard]] Eigen::VectorXd evaluate(std::span<const double> xs, std::span<const double> ys) const;
};

/// Nodes at least one quadrature cell away from the boundary.
std::vector<std::size_t> interior_nodes(const SpectralSpace& space);

/// One application of w ↦ (-Δ)^{-1}(w₊^q) in coefficient space.
Eigen::VectorXd sublinear_map(const SpectralSpace& space, double q, const Eigen::VectorXd& xi);

/// Throws std::invalid_argument for q ∉ (0,1), MonotonicityError on loss of monotonicity.
ReferenceSolution solve_reference(const ModelDomain& domain, double q, std::size_t m,
                                  const ReferenceOptions& options = {});

/// Smallest dyadic c = 2^k (k ≥ -30) with T(c w_1) ≤ c w_1 on the grid.
double find_supersolution_scale(const SpectralSpace& space, double q);

struct ComparisonReport {
  double min_difference = 0.0;   // min over grid of v - λ^{1/(1-q)} w̃
  double bound_scale = 0.0;      // λ^{1/(1-q)}
  std::array<double, 2> worst_point{0.0, 0.0};
  [[nodiscard]] bool passed(double tolerance = 1e-8) const { return min_difference >= -tolerance; }
};

/// Evaluates v (coefficients on `space`) and w̃ on the quadrature nodes of `space`.
ComparisonReport comparison_lower_bound(const SpectralSpace& space, const Eigen::VectorXd& xi,
                                        const ReferenceSolution& ref, double lambda);

/// Same check with v already sampled on the quadrature nodes of `space`.
ComparisonReport comparison_lower_bound_values(const SpectralSpace& space, const Eigen::VectorXd& v,
                                               const ReferenceSolution& ref, double lambda);

/// With w = λ^{1/(q-1)} v, -Δw - w^q = λ^{1/(q-1)}(-Δv - λ v^q): the sign patterns agree.
struct ScalingReport {
  std::size_t nodes = 0;
  std::size_t sign_mismatches = 0;
  double max_relative_deviation = 0.0;
};
ScalingReport scaling_identity_check(const SpectralSpace& space, const Eigen::VectorXd& xi, double lambda,
                                     double q);

}  // namespace sublin
