#include "sublin/galerkin.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <iomanip>
#include <limits>
#include <random>
#include <sstream>
#include <stdexcept>
#include <utility>

namespace sublin {

namespace {

void validate(double q, double lambda) {
  if (!(q > 0.0 && q < 1.0)) throw std::invalid_argument("problem: q must satisfy 0 < q < 1");
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
    throw std::invalid_argument("problem: lambda must be finite and non-negative");
  }
}

void check_length(const ApproxProblem& prob, const Eigen::VectorXd& xi) {
  if (static_cast<std::size_t>(xi.size()) != prob.dimension()) {
    throw std::invalid_argument("galerkin: coefficient vector has length " + std::to_string(xi.size()) +
                                ", expected " + std::to_string(prob.dimension()));
  }
}

class PathHash {
 public:
  void add(const Eigen::VectorXd& xi) {
    for (Eigen::Index k = 0; k < xi.size(); ++k) {
      std::uint64_t bits = 0;
      const double x = xi[k];
      std::memcpy(&bits, &x, sizeof bits);
      for (int b = 0; b < 8; ++b) {
        h_ ^= (bits >> (8 * b)) & 0xffU;
        h_ *= 0x100000001b3ULL;
      }
    }
  }
  [[nodiscard]] std::string hex() const {
    std::ostringstream os;
    os << std::hex << std::setw(16) << std::setfill('0') << h_;
    return os.str();
  }

 private:
  std::uint64_t h_ = 0xcbf29ce484222325ULL;
};

// d/dv of the forcing, with the (v₊)^q slope regularized by ε.
Eigen::VectorXd forcing_slope(const ApproxProblem& prob, const Eigen::VectorXd& v, double eps) {
  Eigen::VectorXd d(v.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    const double s = v[i];
    if (s > 0.0) {
      d[i] = prob.lambda * prob.q * std::pow(s + eps, prob.q - 1.0) + prob.reaction.slope(s);
    } else {
      d[i] = 0.0;
    }
  }
  return d;
}

Eigen::VectorXd node_weights(const SpectralSpace& space) {
  const auto& quad = space.quadrature();
  Eigen::VectorXd w(static_cast<Eigen::Index>(quad.size()));
  for (std::size_t i = 0; i < quad.size(); ++i) w[static_cast<Eigen::Index>(i)] = quad.weight(i);
  return w;
}

// Newton direction for J d = -F with J = I - Bᵀ diag(w d) B.
class JacobianSolver {
 public:
  JacobianSolver(const ApproxProblem& prob, const SolverOptions& options)
      : prob_(prob), options_(options) {
    const auto& space = *prob.space;
    dense_ = space.node_count() * space.size() <= options.dense_limit;
    if (dense_) B_ = space.basis_matrix();
    weights_ = node_weights(space);
  }

  // Returns false when no usable direction was found.
  bool direction(const Eigen::VectorXd& v, const Eigen::VectorXd& F, Eigen::VectorXd& out) const {
    const Eigen::VectorXd wd = weights_.cwiseProduct(forcing_slope(prob_, v, options_.jacobian_epsilon));
    if (dense_) {
      const auto m = static_cast<Eigen::Index>(prob_.dimension());
      Eigen::MatrixXd J = Eigen::MatrixXd::Identity(m, m);
      J.noalias() -= B_.transpose() * wd.asDiagonal() * B_;
      out = J.partialPivLu().solve(-F);
      if (!out.allFinite()) return false;
      return (J * out + F).norm() <= 1e-6 * std::max(1.0, F.norm());
    }
    return conjugate_gradient(wd, F, out);
  }

 private:
  // project() applies the quadrature weights itself, so it takes the bare slope.
  Eigen::VectorXd apply(const Eigen::VectorXd& d) const {
    const auto& space = *prob_.space;
    const Eigen::VectorXd v = space.expand(d);
    return d - space.project(v.cwiseProduct(slope_only_));
  }

  bool conjugate_gradient(const Eigen::VectorXd& wd, const Eigen::VectorXd& F, Eigen::VectorXd& out) const {
    slope_only_ = wd.cwiseQuotient(weights_);
    const Eigen::Index m = F.size();
    out = Eigen::VectorXd::Zero(m);
    Eigen::VectorXd r = -F;
    Eigen::VectorXd p = r;
    double rr = r.squaredNorm();
    const double target = 1e-24 * std::max(1.0, F.squaredNorm());
    const int max_iter = static_cast<int>(std::min<Eigen::Index>(4 * m, 2000));
    for (int it = 0; it < max_iter && rr > target; ++it) {
      const Eigen::VectorXd Ap = apply(p);
      const double curvature = p.dot(Ap);
      if (!(curvature > 0.0)) return it > 0 && out.allFinite();
      const double alpha = rr / curvature;
      out += alpha * p;
      r -= alpha * Ap;
      const double next = r.squaredNorm();
      p = r + (next / rr) * p;
      rr = next;
    }
    return out.allFinite() && rr <= 1e-12 * std::max(1.0, F.squaredNorm());
  }

  const ApproxProblem& prob_;
  const SolverOptions& options_;
  bool dense_ = true;
  Eigen::MatrixXd B_;
  Eigen::VectorXd weights_;
  mutable Eigen::VectorXd slope_only_;
};

// Largest t ∈ (0, 1] with |x + t d| ≤ r.
double ball_step(const Eigen::VectorXd& x, const Eigen::VectorXd& d, double r) {
  if (!std::isfinite(r)) return 1.0;
  if ((x + d).norm() <= r) return 1.0;
  const double a = d.squaredNorm();
  const double b = 2.0 * x.dot(d);
  const double c = x.squaredNorm() - r * r;
  if (a == 0.0) return 1.0;
  const double disc = std::max(0.0, b * b - 4.0 * a * c);
  const double t = (-b + std::sqrt(disc)) / (2.0 * a);
  return std::clamp(t, 0.0, 1.0);
}

Eigen::VectorXd project_ball(Eigen::VectorXd x, double r) {
  const double norm = x.norm();
  if (std::isfinite(r) && norm > r) x *= r / norm;
  return x;
}

double bump(double t) { return std::abs(t) < 1.0 ? std::exp(-1.0 / (1.0 - t * t)) : 0.0; }

double bump_slope(double t) {
  if (std::abs(t) >= 1.0) return 0.0;
  const double s = 1.0 - t * t;
  return bump(t) * (-2.0 * t / (s * s));
}

}  // namespace

Reaction::Reaction(StraussApprox fn) : term_(std::move(fn)) {}

Reaction::Reaction(Nonlinearity f) : term_(f), limit_primitive_(Antiderivative(f)) {}

double Reaction::value(double s) const {
  if (const auto* a = std::get_if<StraussApprox>(&term_)) return (*a)(s);
  return std::get<Nonlinearity>(term_)(s);
}

double Reaction::slope(double s) const {
  if (const auto* a = std::get_if<StraussApprox>(&term_)) return a->slope(s);
  return std::get<Nonlinearity>(term_).derivative(s);
}

double Reaction::primitive(double s) const {
  if (const auto* a = std::get_if<StraussApprox>(&term_)) return a->primitive(s);
  return (*limit_primitive_)(s);
}

const Nonlinearity& Reaction::source() const {
  if (const auto* a = std::get_if<StraussApprox>(&term_)) return a->source();
  return std::get<Nonlinearity>(term_);
}

std::optional<int> Reaction::index() const {
  if (const auto* a = std::get_if<StraussApprox>(&term_)) return a->index();
  return std::nullopt;
}

bool ApproxProblem::certified() const {
  if (!certificate || !certificate->feasible || !certificate->n_star) return false;
  if (!(lambda < certificate->lambda_star)) return false;
  if (!n) return false;
  return *n >= *certificate->n_star;
}

double ApproxProblem::radius() const {
  return certificate ? certificate->r : std::numeric_limits<double>::infinity();
}

ApproxProblem make_approx_problem(std::shared_ptr<const SpectralSpace> space, const Nonlinearity& f,
                                  double q, double lambda, long long n,
                                  std::optional<Certificate> certificate) {
  validate(q, lambda);
  if (n < 1) throw std::invalid_argument("problem: n must be >= 1");
  if (n > std::numeric_limits<int>::max()) throw std::invalid_argument("problem: n too large");
  if (!space) throw std::invalid_argument("problem: missing spectral space");
  return ApproxProblem{std::move(space), Reaction(make_strauss(f, static_cast<int>(n))), lambda, q,
                       1.0 / static_cast<double>(n), n, std::move(certificate)};
}

ApproxProblem make_limit_problem(std::shared_ptr<const SpectralSpace> space, const Nonlinearity& f,
                                 double q, double lambda, std::optional<Certificate> certificate) {
  validate(q, lambda);
  if (!space) throw std::invalid_argument("problem: missing spectral space");
  return ApproxProblem{std::move(space), Reaction(f), lambda, q, 0.0, std::nullopt, std::move(certificate)};
}

Eigen::VectorXd forcing(const ApproxProblem& prob, const Eigen::VectorXd& v) {
  Eigen::VectorXd g(v.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    const double s = std::max(v[i], 0.0);
    g[i] = prob.lambda * std::pow(s, prob.q) + prob.reaction.value(s) + prob.source;
  }
  return g;
}

Eigen::VectorXd assemble_F(const ApproxProblem& prob, const Eigen::VectorXd& xi) {
  check_length(prob, xi);
  const Eigen::VectorXd v = prob.space->expand(xi);
  return xi - prob.space->project(forcing(prob, v));
}

double energy(const ApproxProblem& prob, const Eigen::VectorXd& xi) {
  check_length(prob, xi);
  const Eigen::VectorXd v = prob.space->expand(xi);
  Eigen::VectorXd density(v.size());
  const double a = prob.lambda / (prob.q + 1.0);
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    const double s = std::max(v[i], 0.0);
    density[i] = a * std::pow(s, prob.q + 1.0) + prob.reaction.primitive(s) + prob.source * v[i];
  }
  return 0.5 * xi.squaredNorm() - prob.space->integrate(density);
}

PairingSplit split_pairing(const ApproxProblem& prob, const Eigen::VectorXd& xi) {
  check_length(prob, xi);
  const auto& space = *prob.space;
  const Eigen::VectorXd v = space.expand(xi);
  const auto grad = space.expand_gradient(xi);
  const Eigen::VectorXd g = forcing(prob, v);
  const double threshold = prob.n ? 1.0 / static_cast<double>(*prob.n) : 0.0;
  Eigen::VectorXd plus = Eigen::VectorXd::Zero(v.size());
  Eigen::VectorXd minus = Eigen::VectorXd::Zero(v.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    const double density = grad[0][i] * grad[0][i] + grad[1][i] * grad[1][i] - g[i] * v[i];
    if (std::abs(v[i]) >= threshold) {
      plus[i] = density;
    } else {
      minus[i] = density;
    }
  }
  PairingSplit out;
  out.direct = xi.dot(assemble_F(prob, xi));
  out.positive_part = space.integrate(plus);
  out.negative_part = space.integrate(minus);
  return out;
}

GalerkinSolution describe_solution(const ApproxProblem& prob, const Eigen::VectorXd& xi) {
  check_length(prob, xi);
  GalerkinSolution s;
  s.xi = xi;
  s.residual_norm = assemble_F(prob, xi).norm();
  s.h10_norm = xi.norm();
  s.min_value = prob.space->expand(xi).minCoeff();
  s.energy = energy(prob, xi);
  s.certified = prob.certified() && s.h10_norm <= prob.radius() + 1e-12;
  return s;
}

GalerkinSolution solve_in_ball(const ApproxProblem& prob, const SolverOptions& options,
                               const std::optional<Eigen::VectorXd>& initial) {
  const auto& space = *prob.space;
  const auto m = static_cast<Eigen::Index>(prob.dimension());
  const double r = prob.radius();

  Eigen::VectorXd xi;
  if (initial) {
    xi = resize_coefficients(*initial, static_cast<std::size_t>(m));
  } else {
    xi = space.project(Eigen::VectorXd::Constant(static_cast<Eigen::Index>(space.node_count()), prob.source));
  }
  xi = project_ball(std::move(xi), r);

  const JacobianSolver jacobian(prob, options);
  PathHash path;
  path.add(xi);

  Eigen::VectorXd v = space.expand(xi);
  Eigen::VectorXd F = xi - space.project(forcing(prob, v));
  double nf = F.norm();
  int newton = 0;
  int descent = 0;
  std::string status;

  auto evaluate = [&](const Eigen::VectorXd& trial, Eigen::VectorXd& tv, Eigen::VectorXd& tF) {
    tv = space.expand(trial);
    tF = trial - space.project(forcing(prob, tv));
    return tF.norm();
  };

  // Projected gradient descent on E until |F| drops tenfold; ∇E = F.
  auto descend = [&]() {
    const double entry = nf;
    double E = energy(prob, xi);
    int phase = 0;
    while (descent < options.max_descent_steps && nf > options.tolerance && nf > 0.1 * entry &&
           phase < 500) {
      double alpha = 1.0;
      bool moved = false;
      while (alpha >= 1e-12) {
        const Eigen::VectorXd trial = project_ball(xi - alpha * F, r);
        const double Et = energy(prob, trial);
        if (Et <= E - 1e-4 * F.dot(xi - trial)) {
          xi = trial;
          E = Et;
          moved = true;
          break;
        }
        alpha *= 0.5;
      }
      ++descent;
      ++phase;
      if (!moved) return false;
      path.add(xi);
      nf = evaluate(xi, v, F);
    }
    return true;
  };

  bool converged = nf <= options.tolerance;
  while (!converged && newton < options.max_newton_steps) {
    Eigen::VectorXd d;
    bool accepted = false;
    if (jacobian.direction(v, F, d)) {
      double t = ball_step(xi, d, r);
      Eigen::VectorXd tv, tF;
      while (t >= 1e-8) {
        const Eigen::VectorXd trial = xi + t * d;
        const double nt = evaluate(trial, tv, tF);
        if (nt <= (1.0 - 1e-4 * t) * nf) {
          xi = trial;
          v = std::move(tv);
          F = std::move(tF);
          nf = nt;
          accepted = true;
          break;
        }
        t *= 0.5;
      }
    }
    ++newton;
    if (accepted) {
      path.add(xi);
    } else {
      if (descent >= options.max_descent_steps) {
        status = "descent budget exhausted";
        break;
      }
      if (!descend()) {
        status = "descent stalled";
        break;
      }
    }
    converged = nf <= options.tolerance;
  }

  // A few more full Newton steps once inside tolerance, kept only while they help.
  for (int polish = 0; converged && polish < 3; ++polish) {
    Eigen::VectorXd d;
    if (!jacobian.direction(v, F, d)) break;
    const Eigen::VectorXd trial = xi + ball_step(xi, d, r) * d;
    Eigen::VectorXd tv, tF;
    const double nt = evaluate(trial, tv, tF);
    if (!(nt < 0.5 * nf)) break;
    xi = trial;
    v = std::move(tv);
    F = std::move(tF);
    nf = nt;
    path.add(xi);
  }

  GalerkinSolution out;
  out.xi = xi;
  out.residual_norm = nf;
  out.h10_norm = xi.norm();
  out.min_value = v.minCoeff();
  out.energy = energy(prob, xi);
  out.newton_steps = newton;
  out.descent_steps = descent;
  out.converged = converged;
  out.certified = converged && prob.certified() && out.h10_norm <= r + 1e-12;
  out.path_hash = path.hex();
  if (converged) {
    out.status = "converged";
  } else if (status.empty()) {
    out.status = "newton budget exhausted";
  } else {
    out.status = status;
  }
  if (!converged) {
    std::ostringstream os;
    os << out.status << " (best residual " << std::setprecision(3) << nf << ")";
    out.status = os.str();
  }
  return out;
}

std::vector<BumpProbe> make_bump_probes(const SpectralSpace& space, int count, std::uint64_t seed) {
  if (count < 0) throw std::invalid_argument("bump probes: count must be non-negative");
  const auto& d = space.domain();
  const auto& quad = space.quadrature();
  const bool two_d = d.kind == ModelDomain::Kind::Rectangle;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto support = [&](double L) {
    const double c = L * (0.2 + 0.6 * unit(rng));
    const double room = std::min(c, L - c) - 0.02 * L;
    const double h = 0.05 * L + (room - 0.05 * L) * unit(rng);
    return std::pair{c - h, c + h};
  };

  std::vector<BumpProbe> probes;
  probes.reserve(static_cast<std::size_t>(count));
  const auto nodes = static_cast<Eigen::Index>(quad.size());
  for (int p = 0; p < count; ++p) {
    BumpProbe probe;
    const int pieces = 1 + static_cast<int>(unit(rng) * 3.0) % 3;
    for (int k = 0; k < pieces; ++k) {
      const auto [x0, x1] = support(d.L1);
      const auto [y0, y1] = two_d ? support(d.L2) : std::pair{0.0, 0.0};
      probe.bumps.push_back({x0, x1, y0, y1});
      probe.weights.push_back(2.0 * unit(rng) - 1.0);
    }
    probe.values = Eigen::VectorXd::Zero(nodes);
    probe.grad_x = Eigen::VectorXd::Zero(nodes);
    probe.grad_y = Eigen::VectorXd::Zero(nodes);
    for (Eigen::Index i = 0; i < nodes; ++i) {
      const auto [x, y] = quad.node(static_cast<std::size_t>(i));
      for (std::size_t k = 0; k < probe.bumps.size(); ++k) {
        const auto& b = probe.bumps[k];
        const double sx = 2.0 / (b[1] - b[0]);
        const double tx = (2.0 * x - b[0] - b[1]) / (b[1] - b[0]);
        const double fx = bump(tx);
        const double dfx = bump_slope(tx) * sx;
        double fy = 1.0;
        double dfy = 0.0;
        if (two_d) {
          const double sy = 2.0 / (b[3] - b[2]);
          const double ty = (2.0 * y - b[2] - b[3]) / (b[3] - b[2]);
          fy = bump(ty);
          dfy = bump_slope(ty) * sy;
        }
        probe.values[i] += probe.weights[k] * fx * fy;
        probe.grad_x[i] += probe.weights[k] * dfx * fy;
        probe.grad_y[i] += probe.weights[k] * fx * dfy;
      }
    }
    const double norm = std::sqrt(space.integrate(
        (probe.grad_x.array().square() + probe.grad_y.array().square()).matrix()));
    if (norm > 0.0) {
      probe.scale = 1.0 / norm;
      probe.values *= probe.scale;
      probe.grad_x *= probe.scale;
      probe.grad_y *= probe.scale;
    }
    probes.push_back(std::move(probe));
  }
  return probes;
}

WeakResidualReport weak_residual(const ApproxProblem& prob, const Eigen::VectorXd& xi, int probe_count,
                                 std::uint64_t seed, int next_modes) {
  check_length(prob, xi);
  if (next_modes < 0) throw std::invalid_argument("weak_residual: next_modes must be non-negative");
  const auto& space = *prob.space;
  const auto& quad = space.quadrature();
  const auto& d = space.domain();
  const Eigen::VectorXd v = space.expand(xi);
  const auto grad = space.expand_gradient(xi);
  const Eigen::VectorXd g = forcing(prob, v);

  WeakResidualReport report;
  report.in_span_max = (xi - space.project(g)).cwiseAbs().maxCoeff();

  auto defect = [&](const Eigen::VectorXd& phi, const Eigen::VectorXd& px, const Eigen::VectorXd& py) {
    const Eigen::VectorXd density =
        grad[0].cwiseProduct(px) + grad[1].cwiseProduct(py) - g.cwiseProduct(phi);
    return space.integrate(density);
  };

  if (next_modes > 0) {
    const std::size_t m = space.size();
    const Basis extended = build_basis(d, m + static_cast<std::size_t>(next_modes),
                                       std::max(Basis::kDefaultMaxDimension, m + next_modes));
    const auto& xs = quad.x().nodes;
    const auto& ys = quad.y().nodes;
    const Eigen::MatrixXd sx = sine_table(xs, d.L1, extended.max_i(), false);
    const Eigen::MatrixXd dsx = sine_table(xs, d.L1, extended.max_i(), true);
    Eigen::MatrixXd sy, dsy;
    if (quad.trivial_y()) {
      sy = Eigen::MatrixXd::Ones(1, 1);
      dsy = Eigen::MatrixXd::Zero(1, 1);
    } else {
      sy = sine_table(ys, d.L2, extended.max_j(), false);
      dsy = sine_table(ys, d.L2, extended.max_j(), true);
    }
    const auto nx = static_cast<Eigen::Index>(quad.nx());
    const auto ny = static_cast<Eigen::Index>(quad.ny());
    for (std::size_t k = m; k < extended.size(); ++k) {
      const Mode& mode = extended.modes()[k];
      const double scale = 1.0 / std::sqrt(mode.eigenvalue);
      const int jy = quad.trivial_y() ? 0 : mode.j - 1;
      Eigen::VectorXd phi(nx * ny), px(nx * ny), py(nx * ny);
      for (Eigen::Index iy = 0; iy < ny; ++iy) {
        phi.segment(iy * nx, nx) = sx.col(mode.i - 1) * (sy(iy, jy) * scale);
        px.segment(iy * nx, nx) = dsx.col(mode.i - 1) * (sy(iy, jy) * scale);
        py.segment(iy * nx, nx) = sx.col(mode.i - 1) * (dsy(iy, jy) * scale);
      }
      report.next_mode_defects.push_back(defect(phi, px, py));
    }
  }

  for (const auto& probe : make_bump_probes(space, probe_count, seed)) {
    report.bump_defects.push_back(defect(probe.values, probe.grad_x, probe.grad_y));
  }
  for (double x : report.next_mode_defects) report.out_of_span_max = std::max(report.out_of_span_max, std::abs(x));
  for (double x : report.bump_defects) report.out_of_span_max = std::max(report.out_of_span_max, std::abs(x));
  return report;
}

SphereReport sphere_margin_check(const ApproxProblem& prob, int trials, std::uint64_t seed) {
  if (!prob.certificate) throw std::invalid_argument("sphere_margin_check: problem has no certificate");
  if (trials < 1) throw std::invalid_argument("sphere_margin_check: trials must be >= 1");
  const auto m = static_cast<Eigen::Index>(prob.dimension());
  SphereReport report;
  report.radius = prob.certificate->r;
  report.rho = prob.certificate->rho;
  report.trials = trials;
  report.min_pairing = std::numeric_limits<double>::infinity();
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  for (int t = 0; t < trials; ++t) {
    Eigen::VectorXd xi(m);
    do {
      for (Eigen::Index k = 0; k < m; ++k) xi[k] = normal(rng);
    } while (xi.norm() == 0.0);
    xi *= report.radius / xi.norm();
    report.min_pairing = std::min(report.min_pairing, xi.dot(assemble_F(prob, xi)));
  }
  return report;
}

}  // namespace sublin
