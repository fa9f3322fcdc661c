#pragma once

#include "sublin/spectral_domain.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>

namespace sublin {

/// Explicit embedding constants consumed by the solvability certificate.
///
///   ∫|v|^{q+1}        ≤ sobolev_q1 ‖v‖^{q+1}_{H¹₀}
///   C ∫|v₊|^{p+1}     ≤ sobolev_p1 ‖v‖^{p+1}_{H¹₀}
///   |∫v|              ≤ poincare_c3 ‖v‖_{H¹₀}
struct EmbeddingConstants {
  double sobolev_q1 = 0.0;
  double sobolev_p1 = 0.0;
  double poincare_c3 = 0.0;
  std::string q1_route;
  std::string p1_route;
  std::string c3_route;
};

struct EmbeddingOptions {
  /// Modes used for the empirical L^{p+1} maximization on rectangles.
  std::size_t rectangle_modes = 64;
  int rectangle_starts = 8;
  double rectangle_safety = 2.0;
  std::uint64_t seed = 20240517;
};

/// Throws std::invalid_argument for q ∉ (0,1), p ≤ 1 or C ≤ 0.
EmbeddingConstants embedding_constants(const ModelDomain& domain, double q, double p, double C,
                                       const EmbeddingOptions& options = {});

/// Ball radius, margin and thresholds from the Brouwer-type argument:
///
///   r  = 1 / (2 (2 sobolev_p1)^{1/(p-1)})
///   λ* = r^{1-q} / (4 sobolev_q1)
///   ρ  = r²/2 - λ sobolev_q1 r^{q+1}
///   n* = least n with c3 r/n + λ|Ω|/n^{q+1} + C|Ω|/n² + |Ω|/n² < ρ/2
struct Certificate {
  double C = 0.0;
  double p = 0.0;
  double q = 0.0;
  double lambda = 0.0;
  double sobolev_q1 = 0.0;
  double sobolev_p1 = 0.0;
  double poincare_c3 = 0.0;
  double omega_measure = 0.0;
  double r = 0.0;
  double lambda_star = 0.0;
  double rho = 0.0;
  std::optional<long long> n_star;
  bool feasible = false;
  std::string status;
  std::map<std::string, std::string> provenance;

  /// Left-hand side of the n* condition at index n.
  [[nodiscard]] double source_terms(double n) const;
};

/// Never throws for λ ≥ λ*: the certificate comes back with feasible = false.
/// Throws std::invalid_argument for λ < 0 or invalid exponents.
Certificate build_certificate(const ModelDomain& domain, double q, double p, double C, double lambda,
                              const EmbeddingOptions& options = {});

/// Same, from precomputed embedding constants.
Certificate build_certificate(const EmbeddingConstants& constants, double omega_measure, double q,
                              double p, double C, double lambda);

}  // namespace sublin
