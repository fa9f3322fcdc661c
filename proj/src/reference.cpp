#include "sublin/reference.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace sublin {

std::vector<std::size_t> interior_nodes(const SpectralSpace& space) {
  const auto& quad = space.quadrature();
  double cell = quad.x().cell_width();
  if (!quad.trivial_y()) cell = std::max(cell, quad.y().cell_width());
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < quad.size(); ++i) {
    if (quad.boundary_distance(i) >= cell) out.push_back(i);
  }
  return out;
}

Eigen::VectorXd sublinear_map(const SpectralSpace& space, double q, const Eigen::VectorXd& xi) {
  const Eigen::VectorXd w = space.expand(xi);
  return space.project(w.cwiseMax(0.0).array().pow(q).matrix());
}

double find_supersolution_scale(const SpectralSpace& space, double q) {
  Eigen::VectorXd e1 = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(space.size()));
  e1[0] = 1.0;
  const Eigen::VectorXd phi = space.expand(e1);
  for (int k = -30; k <= 60; ++k) {
    const double c = std::ldexp(1.0, k);
    const Eigen::VectorXd next = space.expand(sublinear_map(space, q, c * e1));
    if (((next - c * phi).array() <= 0.0).all()) return c;
  }
  throw std::runtime_error("reference: no dyadic supersolution scale found");
}

Eigen::VectorXd ReferenceSolution::evaluate(std::span<const double> xs, std::span<const double> ys) const {
  return space->evaluate(xi, xs, ys);
}

ReferenceSolution solve_reference(const ModelDomain& domain, double q, std::size_t m,
                                  const ReferenceOptions& options) {
  if (!(q > 0.0 && q < 1.0)) throw std::invalid_argument("reference: q must satisfy 0 < q < 1");
  ReferenceSolution out;
  out.space = std::make_shared<const SpectralSpace>(build_basis(domain, m));
  out.q = q;
  const auto& space = *out.space;
  out.start_scale = options.start_scale ? *options.start_scale : find_supersolution_scale(space, q);
  if (!(out.start_scale > 0.0)) throw std::invalid_argument("reference: start scale must be positive");

  Eigen::VectorXd xi = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(m));
  xi[0] = out.start_scale;
  Eigen::VectorXd w = space.expand(xi);
  for (int it = 1; it <= options.max_iterations; ++it) {
    const Eigen::VectorXd next_xi = sublinear_map(space, q, xi);
    const Eigen::VectorXd next = space.expand(next_xi);
    const Eigen::VectorXd rise = next - w;
    Eigen::Index where = 0;
    const double worst = rise.maxCoeff(&where);
    if (worst > options.monotone_slack) {
      const auto node = space.quadrature().node(static_cast<std::size_t>(where));
      std::ostringstream os;
      os << "reference: iterate " << it << " increased by " << worst << " at (" << node[0] << ", "
         << node[1] << ")";
      throw MonotonicityError(os.str());
    }
    out.last_step = rise.cwiseAbs().maxCoeff();
    xi = next_xi;
    w = next;
    out.iterations = it;
    if (out.last_step <= options.tolerance) {
      out.converged = true;
      break;
    }
  }
  out.xi = xi;
  out.w_tilde = w;
  out.max_value = w.maxCoeff();
  out.fixed_point_change = (space.expand(sublinear_map(space, q, xi)) - w).cwiseAbs().maxCoeff();

  const Eigen::VectorXd lap = space.expand_negative_laplacian(xi);
  out.min_interior = std::numeric_limits<double>::infinity();
  for (std::size_t i : interior_nodes(space)) {
    const auto k = static_cast<Eigen::Index>(i);
    out.residual = std::max(out.residual, std::abs(lap[k] - std::pow(std::max(w[k], 0.0), q)));
    out.min_interior = std::min(out.min_interior, w[k]);
  }
  return out;
}

ComparisonReport comparison_lower_bound_values(const SpectralSpace& space, const Eigen::VectorXd& v,
                                               const ReferenceSolution& ref, double lambda) {
  if (!(lambda >= 0.0)) throw std::invalid_argument("comparison: lambda must be non-negative");
  if (static_cast<std::size_t>(v.size()) != space.node_count()) {
    throw std::invalid_argument("comparison: v does not match the quadrature grid");
  }
  const auto& quad = space.quadrature();
  const Eigen::VectorXd w = ref.evaluate(quad.x().nodes, quad.y().nodes);
  ComparisonReport out;
  out.bound_scale = std::pow(lambda, 1.0 / (1.0 - ref.q));
  const Eigen::VectorXd diff = v - out.bound_scale * w;
  Eigen::Index where = 0;
  out.min_difference = diff.minCoeff(&where);
  out.worst_point = quad.node(static_cast<std::size_t>(where));
  return out;
}

ComparisonReport comparison_lower_bound(const SpectralSpace& space, const Eigen::VectorXd& xi,
                                        const ReferenceSolution& ref, double lambda) {
  return comparison_lower_bound_values(space, space.expand(xi), ref, lambda);
}

ScalingReport scaling_identity_check(const SpectralSpace& space, const Eigen::VectorXd& xi, double lambda,
                                     double q) {
  if (!(lambda > 0.0)) throw std::invalid_argument("scaling check: lambda must be positive");
  const double a = std::pow(lambda, 1.0 / (q - 1.0));
  const Eigen::VectorXd v = space.expand(xi);
  const Eigen::VectorXd lap_v = space.expand_negative_laplacian(xi);
  const Eigen::VectorXd w = a * v;
  const Eigen::VectorXd lap_w = space.expand_negative_laplacian(a * xi);
  ScalingReport out;
  for (std::size_t i : interior_nodes(space)) {
    const auto k = static_cast<Eigen::Index>(i);
    const double dv = lap_v[k] - lambda * std::pow(std::max(v[k], 0.0), q);
    const double dw = lap_w[k] - std::pow(std::max(w[k], 0.0), q);
    ++out.nodes;
    const double scale = std::max(std::abs(dw), std::abs(a * dv));
    if (scale == 0.0) continue;
    if (scale > 1e-12 * std::max(1.0, std::abs(lap_w[k])) && (dv > 0.0) != (dw > 0.0)) ++out.sign_mismatches;
    out.max_relative_deviation = std::max(out.max_relative_deviation, std::abs(dw - a * dv) / scale);
  }
  return out;
}

}  // namespace sublin
