#include "sublin/spectral_domain.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <queue>
#include <set>
#include <sstream>
#include <stdexcept>
#include <utility>

namespace sublin {

namespace {

constexpr double kPi = std::numbers::pi;

double mode_eigenvalue(const ModelDomain& d, int i, int j) {
  const double a = i * kPi / d.L1;
  if (d.kind == ModelDomain::Kind::Interval) return a * a;
  const double b = j * kPi / d.L2;
  return a * a + b * b;
}

struct ModeOrder {
  bool operator()(const Mode& a, const Mode& b) const {  // min-heap on (μ, i, j)
    if (a.eigenvalue != b.eigenvalue) return a.eigenvalue > b.eigenvalue;
    if (a.i != b.i) return a.i > b.i;
    return a.j > b.j;
  }
};

}  // namespace

ModelDomain ModelDomain::interval(double L) {
  if (!(L > 0.0)) throw std::invalid_argument("domain: interval length must be positive");
  return {Kind::Interval, L, 1.0};
}

ModelDomain ModelDomain::rectangle(double L1, double L2) {
  if (!(L1 > 0.0) || !(L2 > 0.0)) {
    throw std::invalid_argument("domain: rectangle side lengths must be positive");
  }
  return {Kind::Rectangle, L1, L2};
}

double ModelDomain::measure() const { return kind == Kind::Interval ? L1 : L1 * L2; }

double ModelDomain::lambda1() const { return mode_eigenvalue(*this, 1, 1); }

std::string ModelDomain::describe() const {
  std::ostringstream os;
  if (kind == Kind::Interval) {
    os << "interval(0," << L1 << ")";
  } else {
    os << "rectangle(0," << L1 << ")x(0," << L2 << ")";
  }
  return os.str();
}

Basis::Basis(ModelDomain domain, std::vector<Mode> modes)
    : domain_(domain), modes_(std::move(modes)) {
  for (const auto& mode : modes_) {
    max_i_ = std::max(max_i_, mode.i);
    max_j_ = std::max(max_j_, mode.j);
  }
}

Basis build_basis(const ModelDomain& domain, std::size_t m, std::size_t max_dimension) {
  if (m < 1) throw std::invalid_argument("build_basis: m must be >= 1");
  if (m > max_dimension) {
    throw std::invalid_argument("build_basis: m = " + std::to_string(m) +
                                " exceeds the configured maximum " + std::to_string(max_dimension));
  }
  std::vector<Mode> modes;
  modes.reserve(m);
  if (domain.kind == ModelDomain::Kind::Interval) {
    for (std::size_t i = 1; i <= m; ++i) {
      const int ii = static_cast<int>(i);
      modes.push_back({ii, 1, mode_eigenvalue(domain, ii, 1)});
    }
    return Basis(domain, std::move(modes));
  }
  // Best-first enumeration of the (i, j) lattice.
  std::priority_queue<Mode, std::vector<Mode>, ModeOrder> frontier;
  std::set<std::pair<int, int>> seen;
  frontier.push({1, 1, mode_eigenvalue(domain, 1, 1)});
  seen.insert({1, 1});
  while (modes.size() < m) {
    const Mode top = frontier.top();
    frontier.pop();
    modes.push_back(top);
    for (const auto& [di, dj] : {std::pair{1, 0}, std::pair{0, 1}}) {
      const int i = top.i + di;
      const int j = top.j + dj;
      if (seen.insert({i, j}).second) frontier.push({i, j, mode_eigenvalue(domain, i, j)});
    }
  }
  return Basis(domain, std::move(modes));
}

TensorQuadrature::TensorQuadrature(CompositeRule x, CompositeRule y, bool trivial_y)
    : x_(std::move(x)), y_(std::move(y)), trivial_y_(trivial_y) {}

double TensorQuadrature::weight(std::size_t index) const {
  return x_.weights[index % nx()] * y_.weights[index / nx()];
}

std::array<double, 2> TensorQuadrature::node(std::size_t index) const {
  return {x_.nodes[index % nx()], y_.nodes[index / nx()]};
}

double TensorQuadrature::boundary_distance(std::size_t index) const {
  const double x = x_.nodes[index % nx()];
  double d = std::min(x - x_.a, x_.b - x);
  if (!trivial_y_) {
    const double y = y_.nodes[index / nx()];
    d = std::min(d, std::min(y - y_.a, y_.b - y));
  }
  return d;
}

double TensorQuadrature::integrate(const Eigen::VectorXd& values) const {
  if (static_cast<std::size_t>(values.size()) != size()) {
    throw std::invalid_argument("integrate: grid function size does not match the quadrature");
  }
  double total = 0.0;
  for (std::size_t iy = 0; iy < ny(); ++iy) {
    double column = 0.0;
    for (std::size_t ix = 0; ix < nx(); ++ix) column += x_.weights[ix] * values[ix + nx() * iy];
    total += y_.weights[iy] * column;
  }
  return total;
}

TensorQuadrature make_quadrature(const Basis& basis, const QuadratureSpec& spec) {
  const auto& d = basis.domain();
  const int refine = std::max(1, spec.refinement);
  if (d.kind == ModelDomain::Kind::Interval) {
    const int cells = (spec.cells_x > 0 ? spec.cells_x : std::max(8 * static_cast<int>(basis.size()), 512)) * refine;
    const int points = spec.points > 0 ? spec.points : 10;
    CompositeRule y;
    y.nodes = {0.0};
    y.weights = {1.0};
    y.a = 0.0;
    y.b = 0.0;
    y.cells = 1;
    y.points = 1;
    return TensorQuadrature(composite_gauss_legendre(0.0, d.L1, cells, points), std::move(y), true);
  }
  const int cx = (spec.cells_x > 0 ? spec.cells_x : 4 * basis.max_i()) * refine;
  const int cy = (spec.cells_y > 0 ? spec.cells_y : 4 * basis.max_j()) * refine;
  const int points = spec.points > 0 ? spec.points : 6;
  return TensorQuadrature(composite_gauss_legendre(0.0, d.L1, cx, points),
                          composite_gauss_legendre(0.0, d.L2, cy, points), false);
}

Eigen::MatrixXd sine_table(std::span<const double> points, double L, int count, bool derivative) {
  Eigen::MatrixXd table(static_cast<Eigen::Index>(points.size()), count);
  const double scale = std::sqrt(2.0 / L);
  for (std::size_t r = 0; r < points.size(); ++r) {
    for (int i = 1; i <= count; ++i) {
      const double omega = i * kPi / L;
      table(static_cast<Eigen::Index>(r), i - 1) =
          derivative ? scale * omega * std::cos(omega * points[r]) : scale * std::sin(omega * points[r]);
    }
  }
  return table;
}

SpectralSpace::SpectralSpace(Basis basis, QuadratureSpec spec)
    : basis_(std::move(basis)), spec_(spec), quadrature_(make_quadrature(basis_, spec)) {
  const auto& d = basis_.domain();
  const auto& qx = quadrature_.x();
  sx_ = sine_table(qx.nodes, d.L1, basis_.max_i(), false);
  dsx_ = sine_table(qx.nodes, d.L1, basis_.max_i(), true);
  wx_ = Eigen::Map<const Eigen::VectorXd>(qx.weights.data(), static_cast<Eigen::Index>(qx.size()));
  const auto& qy = quadrature_.y();
  if (quadrature_.trivial_y()) {
    sy_ = Eigen::MatrixXd::Ones(1, 1);
    dsy_ = Eigen::MatrixXd::Zero(1, 1);
  } else {
    sy_ = sine_table(qy.nodes, d.L2, basis_.max_j(), false);
    dsy_ = sine_table(qy.nodes, d.L2, basis_.max_j(), true);
  }
  wy_ = Eigen::Map<const Eigen::VectorXd>(qy.weights.data(), static_cast<Eigen::Index>(qy.size()));
}

Eigen::MatrixXd SpectralSpace::coefficient_grid(const Eigen::VectorXd& xi, bool laplacian) const {
  if (static_cast<std::size_t>(xi.size()) != size()) {
    throw std::invalid_argument("expand: coefficient vector has length " + std::to_string(xi.size()) +
                                ", expected " + std::to_string(size()));
  }
  Eigen::MatrixXd coeff = Eigen::MatrixXd::Zero(basis_.max_i(), basis_.max_j());
  const auto& modes = basis_.modes();
  for (std::size_t k = 0; k < modes.size(); ++k) {
    const double mu = modes[k].eigenvalue;
    const double scale = laplacian ? std::sqrt(mu) : 1.0 / std::sqrt(mu);
    coeff(modes[k].i - 1, modes[k].j - 1) = xi[static_cast<Eigen::Index>(k)] * scale;
  }
  return coeff;
}

Eigen::VectorXd SpectralSpace::synthesize(const Eigen::MatrixXd& sx, const Eigen::MatrixXd& coeff,
                                          const Eigen::MatrixXd& sy) const {
  Eigen::MatrixXd grid = (sx * coeff) * sy.transpose();
  return Eigen::Map<Eigen::VectorXd>(grid.data(), grid.size());
}

Eigen::VectorXd SpectralSpace::expand(const Eigen::VectorXd& xi) const {
  return synthesize(sx_, coefficient_grid(xi, false), sy_);
}

Eigen::VectorXd SpectralSpace::expand_negative_laplacian(const Eigen::VectorXd& xi) const {
  return synthesize(sx_, coefficient_grid(xi, true), sy_);
}

std::array<Eigen::VectorXd, 2> SpectralSpace::expand_gradient(const Eigen::VectorXd& xi) const {
  const auto coeff = coefficient_grid(xi, false);
  Eigen::VectorXd gy;
  if (quadrature_.trivial_y()) {
    gy = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(node_count()));
  } else {
    gy = synthesize(sx_, coeff, dsy_);
  }
  return {synthesize(dsx_, coeff, sy_), gy};
}

Eigen::VectorXd SpectralSpace::project(const Eigen::VectorXd& g) const {
  if (static_cast<std::size_t>(g.size()) != node_count()) {
    throw std::invalid_argument("project: grid function size does not match the quadrature");
  }
  const auto nx = static_cast<Eigen::Index>(quadrature_.nx());
  const auto ny = static_cast<Eigen::Index>(quadrature_.ny());
  Eigen::Map<const Eigen::MatrixXd> grid(g.data(), nx, ny);
  const Eigen::MatrixXd weighted = wx_.asDiagonal() * grid * wy_.asDiagonal();
  const Eigen::MatrixXd moments = sx_.transpose() * weighted * sy_;
  const auto& modes = basis_.modes();
  Eigen::VectorXd out(static_cast<Eigen::Index>(modes.size()));
  for (std::size_t k = 0; k < modes.size(); ++k) {
    out[static_cast<Eigen::Index>(k)] =
        moments(modes[k].i - 1, modes[k].j - 1) / std::sqrt(modes[k].eigenvalue);
  }
  return out;
}

Eigen::MatrixXd SpectralSpace::basis_matrix() const {
  const auto nx = static_cast<Eigen::Index>(quadrature_.nx());
  const auto ny = static_cast<Eigen::Index>(quadrature_.ny());
  const auto& modes = basis_.modes();
  Eigen::MatrixXd B(nx * ny, static_cast<Eigen::Index>(modes.size()));
  for (std::size_t k = 0; k < modes.size(); ++k) {
    const double scale = 1.0 / std::sqrt(modes[k].eigenvalue);
    for (Eigen::Index iy = 0; iy < ny; ++iy) {
      B.col(static_cast<Eigen::Index>(k)).segment(iy * nx, nx) =
          sx_.col(modes[k].i - 1) * (sy_(iy, modes[k].j - 1) * scale);
    }
  }
  return B;
}

Eigen::VectorXd SpectralSpace::evaluate(const Eigen::VectorXd& xi, std::span<const double> xs,
                                        std::span<const double> ys, Field field) const {
  const auto& d = domain();
  const bool laplacian = field == Field::NegativeLaplacian;
  const auto coeff = coefficient_grid(xi, laplacian);
  const auto sx = sine_table(xs, d.L1, basis_.max_i(), field == Field::DerivativeX);
  Eigen::MatrixXd sy;
  if (quadrature_.trivial_y()) {
    sy = Eigen::MatrixXd::Constant(1, 1, field == Field::DerivativeY ? 0.0 : 1.0);
  } else {
    sy = sine_table(ys, d.L2, basis_.max_j(), field == Field::DerivativeY);
  }
  return synthesize(sx, coeff, sy);
}

Eigen::VectorXd resize_coefficients(const Eigen::VectorXd& xi, std::size_t m) {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(m));
  const auto n = std::min<Eigen::Index>(xi.size(), static_cast<Eigen::Index>(m));
  out.head(n) = xi.head(n);
  return out;
}

}  // namespace sublin
