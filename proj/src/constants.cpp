#include "sublin/constants.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>
#include <stdexcept>

namespace sublin {

namespace {

void validate_exponents(double q, double p, double C) {
  if (!(q > 0.0 && q < 1.0)) throw std::invalid_argument("certificate: q must satisfy 0 < q < 1");
  if (!(p > 1.0)) throw std::invalid_argument("certificate: p must satisfy p > 1");
  if (!(C > 0.0)) throw std::invalid_argument("certificate: C must be positive");
}

std::string format(double x) {
  std::ostringstream os;
  os.precision(17);
  os << x;
  return os.str();
}

// max ∫|v|^{p+1} over unit-H¹₀ v in the span of the first `modes` eigenfunctions.
// Ascent ξ ← ∇J/|∇J| is monotone for the convex functional J.
double max_lp_ratio(const ModelDomain& domain, double p, const EmbeddingOptions& options) {
  const SpectralSpace space(build_basis(domain, options.rectangle_modes));
  const auto m = static_cast<Eigen::Index>(space.size());
  std::mt19937_64 rng(options.seed);
  std::normal_distribution<double> normal;
  double best = 0.0;
  for (int start = 0; start < options.rectangle_starts; ++start) {
    Eigen::VectorXd xi = Eigen::VectorXd::Zero(m);
    if (start == 0) {
      xi[0] = 1.0;
    } else {
      for (Eigen::Index k = 0; k < m; ++k) xi[k] = normal(rng) / std::sqrt(1.0 + k);
      xi.normalize();
    }
    double value = 0.0;
    for (int iter = 0; iter < 500; ++iter) {
      const Eigen::VectorXd v = space.expand(xi);
      const Eigen::VectorXd absp = v.array().abs().pow(p + 1.0);
      const double next = space.integrate(absp);
      const Eigen::VectorXd grad_density =
          (p + 1.0) * v.array().abs().pow(p) * v.array().sign();
      Eigen::VectorXd grad = space.project(grad_density);
      const double norm = grad.norm();
      if (norm == 0.0) break;
      xi = grad / norm;
      const bool done = std::abs(next - value) <= 1e-13 * std::max(1.0, next);
      value = next;
      if (done) break;
    }
    const Eigen::VectorXd v = space.expand(xi);
    value = std::max(value, space.integrate(v.array().abs().pow(p + 1.0).matrix()));
    best = std::max(best, value);
  }
  return best;
}

}  // namespace

EmbeddingConstants embedding_constants(const ModelDomain& domain, double q, double p, double C,
                                       const EmbeddingOptions& options) {
  validate_exponents(q, p, C);
  const double measure = domain.measure();
  const double lambda1 = domain.lambda1();
  EmbeddingConstants out;
  out.poincare_c3 = std::sqrt(measure / lambda1);
  out.c3_route = "Cauchy-Schwarz then Poincare: sqrt(|Omega|/lambda1)";
  const double lq1 = std::pow(measure, 1.0 / (q + 1.0) - 0.5) / std::sqrt(lambda1);
  out.sobolev_q1 = std::pow(lq1, q + 1.0);
  out.q1_route = "Holder into L2 then Poincare: (|Omega|^{1/(q+1)-1/2} lambda1^{-1/2})^{q+1}";
  if (domain.kind == ModelDomain::Kind::Interval) {
    // ‖v‖²_∞ ≤ (L/4)‖v'‖², ∫|v|^{p+1} ≤ ‖v‖^{p-1}_∞ ‖v‖²_{L²}
    const double L = domain.L1;
    out.sobolev_p1 = C * std::pow(L / 4.0, 0.5 * (p - 1.0)) / lambda1;
    out.p1_route = "sup-norm route: C (L/4)^{(p-1)/2} / lambda1";
  } else {
    const double empirical = max_lp_ratio(domain, p, options);
    out.sobolev_p1 = C * options.rectangle_safety * empirical;
    out.p1_route = "empirical x" + format(options.rectangle_safety) + ": max over " +
                   std::to_string(options.rectangle_modes) + " modes of int|v|^{p+1} = " +
                   format(empirical);
  }
  return out;
}

double Certificate::source_terms(double n) const {
  return poincare_c3 * r / n + lambda * omega_measure / std::pow(n, q + 1.0) +
         C * omega_measure / (n * n) + omega_measure / (n * n);
}

Certificate build_certificate(const EmbeddingConstants& constants, double omega_measure, double q,
                              double p, double C, double lambda) {
  validate_exponents(q, p, C);
  if (!(lambda >= 0.0)) throw std::invalid_argument("certificate: lambda must be non-negative");
  Certificate cert;
  cert.C = C;
  cert.p = p;
  cert.q = q;
  cert.lambda = lambda;
  cert.sobolev_q1 = constants.sobolev_q1;
  cert.sobolev_p1 = constants.sobolev_p1;
  cert.poincare_c3 = constants.poincare_c3;
  cert.omega_measure = omega_measure;
  cert.r = 1.0 / (2.0 * std::pow(2.0 * cert.sobolev_p1, 1.0 / (p - 1.0)));
  cert.lambda_star = std::pow(cert.r, 1.0 - q) / (4.0 * cert.sobolev_q1);
  cert.rho = cert.r * cert.r / 2.0 - lambda * cert.sobolev_q1 * std::pow(cert.r, q + 1.0);
  cert.provenance = {
      {"sobolev_q1", constants.q1_route},
      {"sobolev_p1", constants.p1_route},
      {"poincare_c3", constants.c3_route},
      {"r", "1/(2 (2 sobolev_p1)^{1/(p-1)}), so r^2 - sobolev_p1 r^{p+1} >= r^2/2"},
      {"lambda_star", "r^{1-q}/(4 sobolev_q1), so rho >= r^2/4 for lambda < lambda_star"},
      {"rho", "r^2/2 - lambda sobolev_q1 r^{q+1}"},
      {"n_star", "least n with c3 r/n + lambda|Omega|/n^{q+1} + C|Omega|/n^2 + |Omega|/n^2 < rho/2"},
      {"omega_measure", "exact measure of the model domain"},
  };
  if (!(lambda < cert.lambda_star)) {
    cert.feasible = false;
    cert.status = "infeasible: lambda = " + format(lambda) + " is not below lambda_star = " +
                  format(cert.lambda_star);
    return cert;
  }
  // The left side is strictly decreasing in n: bracket by doubling, then bisect.
  const double target = cert.rho / 2.0;
  long long hi = 1;
  while (!(cert.source_terms(static_cast<double>(hi)) < target)) {
    if (hi > (1LL << 60)) throw std::runtime_error("certificate: n_star search overflow");
    hi *= 2;
  }
  long long lo = hi / 2;  // fails (or 0)
  while (hi - lo > 1) {
    const long long mid = lo + (hi - lo) / 2;
    if (cert.source_terms(static_cast<double>(mid)) < target) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  cert.n_star = hi;
  cert.feasible = true;
  cert.status = "feasible";
  return cert;
}

Certificate build_certificate(const ModelDomain& domain, double q, double p, double C, double lambda,
                              const EmbeddingOptions& options) {
  return build_certificate(embedding_constants(domain, q, p, C, options), domain.measure(), q, p, C,
                           lambda);
}

}  // namespace sublin
