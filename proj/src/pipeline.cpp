#include "sublin/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <map>
#include <sstream>

namespace sublin {

namespace {

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(6);
  os << x;
  return os.str();
}

template <typename T>
bool strictly_increasing(const std::vector<T>& xs) {
  for (std::size_t i = 1; i < xs.size(); ++i) {
    if (!(xs[i - 1] < xs[i])) return false;
  }
  return true;
}

// |v| extrapolated linearly to each boundary edge from the two nearest node lines.
CheckResult boundary_check(const SpectralSpace& space, const Eigen::VectorXd& v, double tolerance) {
  const auto& quad = space.quadrature();
  const auto nx = quad.nx();
  const auto ny = quad.ny();
  const auto& xs = quad.x().nodes;
  const auto& ys = quad.y().nodes;
  CheckResult out{"boundary", true, 0.0, tolerance, {0.0, 0.0}};
  auto consider = [&](double value, double bx, double by) {
    if (std::abs(value) > out.value) {
      out.value = std::abs(value);
      out.worst_point = {bx, by};
    }
  };
  auto extrapolate = [](double d1, double v1, double d2, double v2) {
    return v1 - d1 * (v2 - v1) / (d2 - d1);
  };
  const double L1 = quad.x().b;
  for (std::size_t iy = 0; iy < ny; ++iy) {
    const auto row = [&](std::size_t ix) { return v[static_cast<Eigen::Index>(ix + nx * iy)]; };
    consider(extrapolate(xs[0], row(0), xs[1], row(1)), 0.0, ys[iy]);
    consider(extrapolate(L1 - xs[nx - 1], row(nx - 1), L1 - xs[nx - 2], row(nx - 2)), L1, ys[iy]);
  }
  if (!quad.trivial_y()) {
    const double L2 = quad.y().b;
    for (std::size_t ix = 0; ix < nx; ++ix) {
      const auto col = [&](std::size_t iy) { return v[static_cast<Eigen::Index>(ix + nx * iy)]; };
      consider(extrapolate(ys[0], col(0), ys[1], col(1)), xs[ix], 0.0);
      consider(extrapolate(L2 - ys[ny - 1], col(ny - 1), L2 - ys[ny - 2], col(ny - 2)), xs[ix], L2);
    }
  }
  out.passed = out.value <= tolerance;
  return out;
}

double l1_gap(const ApproxProblem& regularized, const Eigen::VectorXd& xi, const SpectralSpace& final_space,
              const Eigen::VectorXd& final_xi, const Nonlinearity& f) {
  const auto& space = *regularized.space;
  const auto& quad = space.quadrature();
  const Eigen::VectorXd v = space.expand(xi);
  const Eigen::VectorXd vf = final_space.evaluate(final_xi, quad.x().nodes, quad.y().nodes);
  Eigen::VectorXd density(v.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    density[i] = std::abs(regularized.reaction.value(std::max(v[i], 0.0)) - f(std::max(vf[i], 0.0)));
  }
  return space.integrate(density);
}

double reaction_pairing(const ApproxProblem& prob, const Eigen::VectorXd& xi) {
  const Eigen::VectorXd v = prob.space->expand(xi);
  Eigen::VectorXd density(v.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    density[i] = prob.reaction.value(v[i]) * v[i];
  }
  return prob.space->integrate(density);
}

double min_interior_value(const SpectralSpace& space, const Eigen::VectorXd& xi) {
  const Eigen::VectorXd v = space.expand(xi);
  double out = std::numeric_limits<double>::infinity();
  for (std::size_t i : interior_nodes(space)) out = std::min(out, v[static_cast<Eigen::Index>(i)]);
  return out;
}

}  // namespace

void validate_config(const RunConfig& config) {
  if (!(config.q > 0.0 && config.q < 1.0)) throw ConfigError("config: q must satisfy 0 < q < 1");
  if (!(config.lambda >= 0.0) || !std::isfinite(config.lambda)) {
    throw ConfigError("config: lambda must be finite and non-negative");
  }
  if (config.m_schedule.empty()) throw ConfigError("config: m_schedule must not be empty");
  if (config.n_schedule.empty()) throw ConfigError("config: n_schedule must not be empty");
  if (!strictly_increasing(config.m_schedule)) throw ConfigError("config: m_schedule must be strictly increasing");
  if (!strictly_increasing(config.n_schedule)) throw ConfigError("config: n_schedule must be strictly increasing");
  if (config.m_schedule.front() < 1) throw ConfigError("config: m_schedule entries must be >= 1");
  if (config.m_schedule.back() > Basis::kDefaultMaxDimension) {
    throw ConfigError("config: m_schedule exceeds the maximum dimension " +
                      std::to_string(Basis::kDefaultMaxDimension));
  }
  if (config.n_schedule.front() < 1) throw ConfigError("config: n_schedule entries must be >= 1");
  if (config.n_schedule.back() > std::numeric_limits<int>::max()) {
    throw ConfigError("config: n_schedule entries are too large");
  }
  for (double tol : {config.solver_tolerance, config.inner_limit_tolerance, config.outer_l1_tolerance,
                     config.residual_tolerance, config.positivity_tolerance, config.boundary_tolerance,
                     config.distributional_tolerance}) {
    if (!(tol > 0.0)) throw ConfigError("config: tolerances must be positive");
  }
  if (config.bump_probes < 0) throw ConfigError("config: bump_probes must be non-negative");
  try {
    (void)config_nonlinearity(config);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
}

Nonlinearity config_nonlinearity(const RunConfig& config) {
  CatalogParams params = config.f_params;
  params.dimension = config.domain.dimension();
  return make_catalog_nonlinearity(config.f_name, params);
}

Certificate certify_config(const RunConfig& config) {
  const auto f = config_nonlinearity(config);
  const auto& growth = f.certificate();
  Certificate cert = build_certificate(config.domain, config.q, growth.p, growth.C, config.lambda, config.embedding);
  if (!cert.feasible) {
    throw ConfigError("config: lambda = " + fmt(config.lambda) + " must be below lambda_star = " +
                      fmt(cert.lambda_star));
  }
  return cert;
}

InnerLimit inner_limit(const ProblemFactory& make, const std::vector<std::shared_ptr<const SpectralSpace>>& spaces,
                       const SolverOptions& options, double tolerance,
                       const std::optional<Eigen::VectorXd>& initial) {
  if (spaces.empty()) throw std::invalid_argument("inner_limit: no spaces");
  InnerLimit out;
  std::optional<Eigen::VectorXd> warm = initial;
  for (const auto& space : spaces) {
    const ApproxProblem prob = make(space);
    out.m.push_back(space->size());
    out.stages.push_back(solve_in_ball(prob, options, warm));
    const auto& s = out.stages.back();
    if (!s.converged) out.flags.push_back("solver did not converge at m = " + std::to_string(space->size()) + ": " + s.status);
    warm = s.xi;
  }
  for (std::size_t i = 0; i + 1 < out.stages.size(); ++i) {
    const auto& a = out.stages[i].xi;
    const auto& b = out.stages[i + 1].xi;
    out.cauchy_h10.push_back((resize_coefficients(a, static_cast<std::size_t>(b.size())) - b).norm());
  }
  for (std::size_t i = 1; i < out.cauchy_h10.size(); ++i) {
    if (!(out.cauchy_h10[i] < out.cauchy_h10[i - 1])) {
      out.strictly_decreasing = false;
      out.flags.push_back("Cauchy distance did not decrease at m = " + std::to_string(out.m[i + 1]));
    }
  }
  out.converged = !out.cauchy_h10.empty() && out.cauchy_h10.back() <= tolerance;
  if (out.cauchy_h10.empty()) {
    out.flags.push_back("single m: no Cauchy distance");
  } else if (!out.converged) {
    out.flags.push_back("last Cauchy distance " + fmt(out.cauchy_h10.back()) + " above tolerance " + fmt(tolerance));
  }
  return out;
}

bool FinalReport::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.passed; });
}

const CheckResult& FinalReport::check(const std::string& name) const {
  for (const auto& c : checks) {
    if (c.name == name) return c;
  }
  throw std::out_of_range("final report: no check named " + name);
}

double strong_residual(const ApproxProblem& prob, const Eigen::VectorXd& xi, std::array<double, 2>* worst) {
  const auto& space = *prob.space;
  const Eigen::VectorXd v = space.expand(xi);
  const Eigen::VectorXd lap = space.expand_negative_laplacian(xi);
  const Eigen::VectorXd g = forcing(prob, v);
  double out = 0.0;
  for (std::size_t i : interior_nodes(space)) {
    const auto k = static_cast<Eigen::Index>(i);
    const double r = std::abs(lap[k] - g[k]);
    if (r > out) {
      out = r;
      if (worst) *worst = space.quadrature().node(i);
    }
  }
  return out;
}

double coefficient_decay_slope(const SpectralSpace& space, const Eigen::VectorXd& xi) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int count = 0;
  for (Eigen::Index k = 0; k < xi.size(); ++k) {
    if (std::abs(xi[k]) <= 1e-14) continue;
    const double x = std::log(space.basis().eigenvalue(static_cast<std::size_t>(k)));
    const double y = std::log(std::abs(xi[k]));
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++count;
  }
  const double denom = count * sxx - sx * sx;
  if (count < 2 || denom == 0.0) return 0.0;
  return (count * sxy - sx * sy) / denom;
}

FinalReport verify_final(const ApproxProblem& limit, const Eigen::VectorXd& xi, const ReferenceSolution& ref,
                         const RunConfig& config) {
  const auto& space = *limit.space;
  FinalReport report;

  CheckResult residual{"strong_residual", false, 0.0, config.residual_tolerance, {0.0, 0.0}};
  residual.value = strong_residual(limit, xi, &residual.worst_point);
  residual.passed = residual.value <= residual.tolerance;
  report.checks.push_back(residual);

  const Eigen::VectorXd v = space.expand(xi);
  const auto& quad = space.quadrature();
  const Eigen::VectorXd w = ref.evaluate(quad.x().nodes, quad.y().nodes);
  const double scale = std::pow(limit.lambda, 1.0 / (1.0 - limit.q));
  CheckResult positivity{"positivity", false, std::numeric_limits<double>::infinity(),
                         config.positivity_tolerance, {0.0, 0.0}};
  for (std::size_t i : interior_nodes(space)) {
    const auto k = static_cast<Eigen::Index>(i);
    const double margin = v[k] - scale * w[k];
    if (margin < positivity.value) {
      positivity.value = margin;
      positivity.worst_point = quad.node(i);
    }
  }
  positivity.passed = positivity.value >= -positivity.tolerance;
  report.checks.push_back(positivity);

  report.checks.push_back(boundary_check(space, v, config.boundary_tolerance));

  const auto weak = weak_residual(limit, xi, config.bump_probes, config.seed, 0);
  CheckResult distributional{"distributional", false, weak.out_of_span_max, config.distributional_tolerance,
                             {0.0, 0.0}};
  distributional.passed = distributional.value <= distributional.tolerance;
  report.checks.push_back(distributional);
  return report;
}

ConvergenceReport outer_limit(const RunConfig& config) {
  validate_config(config);
  ConvergenceReport report;
  report.config = config;
  report.certificate = certify_config(config);
  const Nonlinearity f = config_nonlinearity(config);
  const Certificate& cert = report.certificate;

  std::vector<std::shared_ptr<const SpectralSpace>> spaces;
  for (std::size_t m : config.m_schedule) {
    spaces.push_back(std::make_shared<const SpectralSpace>(build_basis(config.domain, m)));
  }
  const auto& top = spaces.back();
  report.final_space = top;

  SolverOptions options;
  options.tolerance = config.solver_tolerance;

  auto run_n = [&](long long n) {
    ProblemFactory make = [&, n](std::shared_ptr<const SpectralSpace> space) {
      return make_approx_problem(std::move(space), f, config.q, config.lambda, n, cert);
    };
    return inner_limit(make, spaces, options, config.inner_limit_tolerance);
  };
  auto run_reference = [&]() {
    const std::size_t m_ref = config.reference_m > 0 ? config.reference_m : config.m_schedule.back();
    return solve_reference(config.domain, config.q, m_ref);
  };

  std::vector<InnerLimit> inner(config.n_schedule.size());
  if (config.parallel) {
    std::vector<std::future<InnerLimit>> jobs;
    for (long long n : config.n_schedule) jobs.push_back(std::async(std::launch::async, run_n, n));
    auto ref_job = std::async(std::launch::async, run_reference);
    for (std::size_t i = 0; i < jobs.size(); ++i) inner[i] = jobs[i].get();
    report.reference = ref_job.get();
  } else {
    for (std::size_t i = 0; i < config.n_schedule.size(); ++i) inner[i] = run_n(config.n_schedule[i]);
    report.reference = run_reference();
  }

  // Limit equation at the largest m, warm-started from the largest-n solution.
  const ApproxProblem limit = make_limit_problem(top, f, config.q, config.lambda, cert);
  report.final_solution = solve_in_ball(limit, options, inner.back().final().xi);
  if (!report.final_solution.converged) {
    report.flags.push_back("limit solve did not converge: " + report.final_solution.status);
  }
  const Eigen::VectorXd& final_xi = report.final_solution.xi;
  report.final_strong_residual = strong_residual(limit, final_xi);
  report.largest_n_strong_residual = strong_residual(limit, inner.back().final().xi);
  report.coefficient_decay = coefficient_decay_slope(*top, final_xi);

  const double r = cert.r;
  for (std::size_t ni = 0; ni < config.n_schedule.size(); ++ni) {
    const long long n = config.n_schedule[ni];
    OuterStage stage;
    stage.n = n;
    stage.inner = std::move(inner[ni]);
    for (const auto& flag : stage.inner.flags) report.flags.push_back("n = " + std::to_string(n) + ": " + flag);
    report.inner_decreasing = report.inner_decreasing && stage.inner.strictly_decreasing;
    report.inner_converged = report.inner_converged && stage.inner.converged;

    for (std::size_t mi = 0; mi < spaces.size(); ++mi) {
      const ApproxProblem prob = make_approx_problem(spaces[mi], f, config.q, config.lambda, n, cert);
      StageRecord rec;
      rec.n = n;
      rec.m = spaces[mi]->size();
      rec.solution = stage.inner.stages[mi];
      if (mi < stage.inner.cauchy_h10.size()) rec.cauchy_h10 = stage.inner.cauchy_h10[mi];
      rec.l1_nonlin_gap = l1_gap(prob, rec.solution.xi, *top, final_xi, f);
      rec.strong_residual = strong_residual(prob, rec.solution.xi);
      rec.lower_bound_margin =
          comparison_lower_bound(*spaces[mi], rec.solution.xi, report.reference, config.lambda).min_difference;
      if (!(rec.solution.h10_norm <= r + 1e-12)) {
        report.uniform_bound = false;
        report.flags.push_back("uniform bound violated at n = " + std::to_string(n) + ", m = " + std::to_string(rec.m));
      }
      if (mi + 1 == spaces.size()) {
        stage.l1_nonlin_gap = rec.l1_nonlin_gap;
        stage.reaction_pairing = reaction_pairing(prob, rec.solution.xi);
        stage.pairing = split_pairing(prob, rec.solution.xi);
        stage.min_interior = min_interior_value(*top, rec.solution.xi);
        stage.lower_bound_margin = rec.lower_bound_margin;
      }
      report.records.push_back(std::move(rec));
    }
    if (!(stage.min_interior > 0.0)) {
      report.positivity = false;
      report.flags.push_back("min interior v_n not positive at n = " + std::to_string(n));
    }
    report.stages.push_back(std::move(stage));
  }
  for (std::size_t i = 0; i + 1 < report.stages.size(); ++i) {
    const auto& a = report.stages[i].inner.final().xi;
    const auto& b = report.stages[i + 1].inner.final().xi;
    report.stages[i].h10_to_next = (a - b).norm();
    const Eigen::VectorXd diff = top->expand(a - b);
    report.stages[i].l2_to_next = std::sqrt(top->integrate(diff.cwiseAbs2()));
    if (!(report.stages[i + 1].l1_nonlin_gap < report.stages[i].l1_nonlin_gap)) {
      report.l1_decreasing = false;
      report.flags.push_back("L1 nonlinearity gap did not decrease at n = " +
                             std::to_string(report.stages[i + 1].n));
    }
  }
  const double last_gap = report.stages.back().l1_nonlin_gap;
  if (report.stages.size() < 2) {
    report.flags.push_back("single n: outer limit has no Cauchy sequence");
  } else if (!(last_gap <= config.outer_l1_tolerance)) {
    report.flags.push_back("L1 nonlinearity gap " + fmt(last_gap) + " above tolerance " + fmt(config.outer_l1_tolerance));
  }
  report.outer_converged = report.stages.size() >= 2 && report.l1_decreasing && last_gap <= config.outer_l1_tolerance;
  if (!(report.final_solution.h10_norm <= r + 1e-12)) {
    report.uniform_bound = false;
    report.flags.push_back("uniform bound violated by the limit solution");
  }

  report.final_checks = verify_final(limit, final_xi, report.reference, config);
  for (const auto& c : report.final_checks.checks) {
    if (!c.passed) {
      report.flags.push_back("final check " + c.name + " failed: " + fmt(c.value) + " vs tolerance " + fmt(c.tolerance));
    }
  }
  return report;
}

}  // namespace sublin
