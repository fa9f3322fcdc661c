#pragma once

#include "sublin/quadrature.hpp"

#include <Eigen/Dense>

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace sublin {

/// Interval (0, L) or rectangle (0, L1) x (0, L2).
struct ModelDomain {
  enum class Kind { Interval, Rectangle };

  Kind kind = Kind::Interval;
  double L1 = 1.0;
  double L2 = 1.0;  // ignored for intervals

  static ModelDomain interval(double L);
  static ModelDomain rectangle(double L1, double L2);

  [[nodiscard]] int dimension() const { return kind == Kind::Interval ? 1 : 2; }
  [[nodiscard]] double measure() const;
  /// Principal Dirichlet eigenvalue.
  [[nodiscard]] double lambda1() const;
  [[nodiscard]] std::string describe() const;
};

/// Dirichlet eigenmode sin(iπx/L1) [sin(jπy/L2)]; j = 1 on intervals.
struct Mode {
  int i = 1;
  int j = 1;
  double eigenvalue = 0.0;
};

/// First m Dirichlet eigenfunctions ordered by eigenvalue, ties broken by (i, j),
/// each scaled to unit H¹₀ norm: w = e / √μ with e the L²-normalized eigenfunction.
class Basis {
 public:
  static constexpr std::size_t kDefaultMaxDimension = 4096;

  Basis(ModelDomain domain, std::vector<Mode> modes);

  [[nodiscard]] const ModelDomain& domain() const { return domain_; }
  [[nodiscard]] std::size_t size() const { return modes_.size(); }
  [[nodiscard]] const std::vector<Mode>& modes() const { return modes_; }
  [[nodiscard]] double eigenvalue(std::size_t k) const { return modes_[k].eigenvalue; }
  [[nodiscard]] int max_i() const { return max_i_; }
  [[nodiscard]] int max_j() const { return max_j_; }

 private:
  ModelDomain domain_;
  std::vector<Mode> modes_;
  int max_i_ = 1;
  int max_j_ = 1;
};

Basis build_basis(const ModelDomain& domain, std::size_t m,
                  std::size_t max_dimension = Basis::kDefaultMaxDimension);

/// Composite Gauss–Legendre sizing. Zero means "use the default for the domain":
/// max(8m, 512) cells x 10 points on intervals; 4·max_i x 4·max_j cells with 6x6 points on rectangles.
struct QuadratureSpec {
  int cells_x = 0;
  int cells_y = 0;
  int points = 0;
  int refinement = 1;  // multiplies the cell counts
};

/// Tensor product of two composite rules. Intervals carry a single unit-weight y node.
/// Grid values are flattened column-major: index = ix + nx * iy.
class TensorQuadrature {
 public:
  TensorQuadrature(CompositeRule x, CompositeRule y, bool trivial_y);

  [[nodiscard]] const CompositeRule& x() const { return x_; }
  [[nodiscard]] const CompositeRule& y() const { return y_; }
  [[nodiscard]] std::size_t nx() const { return x_.size(); }
  [[nodiscard]] std::size_t ny() const { return y_.size(); }
  [[nodiscard]] std::size_t size() const { return nx() * ny(); }
  [[nodiscard]] bool trivial_y() const { return trivial_y_; }

  [[nodiscard]] double weight(std::size_t index) const;
  [[nodiscard]] std::array<double, 2> node(std::size_t index) const;
  /// Distance from node `index` to the boundary of the domain.
  [[nodiscard]] double boundary_distance(std::size_t index) const;

  /// Gauss–Legendre tensor sum; cells are reduced in a fixed order.
  [[nodiscard]] double integrate(const Eigen::VectorXd& values) const;

 private:
  CompositeRule x_;
  CompositeRule y_;
  bool trivial_y_;
};

TensorQuadrature make_quadrature(const Basis& basis, const QuadratureSpec& spec = {});

/// Basis + quadrature with tabulated 1D sine factors. Immutable.
class SpectralSpace {
 public:
  explicit SpectralSpace(Basis basis, QuadratureSpec spec = {});

  [[nodiscard]] const Basis& basis() const { return basis_; }
  [[nodiscard]] const TensorQuadrature& quadrature() const { return quadrature_; }
  [[nodiscard]] const ModelDomain& domain() const { return basis_.domain(); }
  [[nodiscard]] std::size_t size() const { return basis_.size(); }
  [[nodiscard]] std::size_t node_count() const { return quadrature_.size(); }
  [[nodiscard]] const QuadratureSpec& spec() const { return spec_; }

  /// v = Σ ξ_k w_k at the quadrature nodes.
  [[nodiscard]] Eigen::VectorXd expand(const Eigen::VectorXd& xi) const;
  /// -Δv = Σ μ_k ξ_k w_k at the quadrature nodes.
  [[nodiscard]] Eigen::VectorXd expand_negative_laplacian(const Eigen::VectorXd& xi) const;
  /// (∂x v, ∂y v) at the quadrature nodes; ∂y v is zero on intervals.
  [[nodiscard]] std::array<Eigen::VectorXd, 2> expand_gradient(const Eigen::VectorXd& xi) const;
  /// (∫ g w_k)_k by quadrature.
  [[nodiscard]] Eigen::VectorXd project(const Eigen::VectorXd& g) const;
  [[nodiscard]] double integrate(const Eigen::VectorXd& g) const { return quadrature_.integrate(g); }

  /// Dense node x mode matrix of basis values (for small problems).
  [[nodiscard]] Eigen::MatrixXd basis_matrix() const;

  enum class Field { Value, NegativeLaplacian, DerivativeX, DerivativeY };

  /// Evaluates a field of v on the tensor grid xs x ys (ys ignored on intervals).
  /// Result is flattened column-major like the quadrature grid.
  [[nodiscard]] Eigen::VectorXd evaluate(const Eigen::VectorXd& xi, std::span<const double> xs,
                                         std::span<const double> ys, Field field = Field::Value) const;

 private:
  Eigen::MatrixXd coefficient_grid(const Eigen::VectorXd& xi, bool laplacian) const;
  Eigen::VectorXd synthesize(const Eigen::MatrixXd& sx, const Eigen::MatrixXd& coeff,
                             const Eigen::MatrixXd& sy) const;

  Basis basis_;
  QuadratureSpec spec_;
  TensorQuadrature quadrature_;
  Eigen::MatrixXd sx_;   // nx x max_i, √(2/L1) sin(iπx/L1)
  Eigen::MatrixXd dsx_;  // derivative table
  Eigen::MatrixXd sy_;   // ny x max_j; [[1]] on intervals
  Eigen::MatrixXd dsy_;
  Eigen::VectorXd wx_;
  Eigen::VectorXd wy_;
};

/// Sine factor table √(2/L) sin(iπx/L) (or its derivative) for i = 1..count.
Eigen::MatrixXd sine_table(std::span<const double> points, double L, int count, bool derivative);

/// Zero-pads (or truncates) a coefficient vector to length m.
Eigen::VectorXd resize_coefficients(const Eigen::VectorXd& xi, std::size_t m);

}  // namespace sublin
