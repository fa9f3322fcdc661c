#pragma once

#include "sublin/nonlinearity.hpp"

#include <array>
#include <optional>
#include <span>
#include <vector>

namespace sublin {

/// The k-th Lipschitz approximation f_k built from difference quotients of G:
///
///   s ≤ -k          : -k [G(-k - 1/k) - G(-k)]
///   -k ≤ s ≤ -1/k   : -k [G(s - 1/k) - G(s)]
///   -1/k ≤ s ≤ 0    : k² s [G(-2/k) - G(-1/k)]
///   0 ≤ s ≤ 1/k     : k² s [G(2/k) - G(1/k)]
///   1/k ≤ s ≤ k     : k [G(s + 1/k) - G(s)]
///   s ≥ k           : k [G(k + 1/k) - G(k)]
///
/// Immutable apart from the cached Lipschitz estimate.
class StraussApprox {
 public:
  /// Largest accepted k · tol_G (G-errors enter f_k amplified by k).
  static constexpr double kMaxAmplifiedError = 1e-9;

  /// Throws std::invalid_argument when k < 1 or k · G.tolerance() > 1e-9 in quadrature mode.
  StraussApprox(Antiderivative G, int k);

  double operator()(double s) const;
  /// Derivative of f_k where it exists (right derivative at breakpoints).
  double slope(double s) const;
  /// F_k(s) = ∫₀^s f_k.
  double primitive(double s) const;

  /// Value of piece `piece` (0..5, left to right) at s, regardless of its domain.
  double piece_value(int piece, double s) const;

  /// {-k, -1/k, 0, 1/k, k}.
  [[nodiscard]] std::array<double, 5> breakpoints() const;
  /// Largest |left - right| / (1 + |value|) over the five breakpoints.
  [[nodiscard]] double breakpoint_gap() const;

  [[nodiscard]] int index() const { return k_; }
  [[nodiscard]] const Nonlinearity& source() const { return G_.source(); }
  [[nodiscard]] const Antiderivative& antiderivative() const { return G_; }

  [[nodiscard]] std::optional<double> lipschitz_estimate() const { return lipschitz_; }
  void set_lipschitz_estimate(double c) { lipschitz_ = c; }

 private:
  Antiderivative G_;
  int k_;
  double inv_k_;
  double tail_neg_;  // value for s ≤ -k
  double tail_pos_;  // value for s ≥ k
  double mid_neg_;   // k² [G(-2/k) - G(-1/k)]
  double mid_pos_;   // k² [G(2/k) - G(1/k)]
  double g_short_neg_;  // ∫_{-2/k}^{-1/k} G
  double g_short_pos_;  // ∫_{1/k}^{2/k} G
  std::optional<double> lipschitz_;
};

/// Picks the G tolerance min(1e-12, 1e-9 / k) so the amplified error bound holds.
StraussApprox make_strauss(const Nonlinearity& f, int k);

/// Max |Δf_k / Δs| over adjacent points of the sorted grid; a lower estimate of c_k.
/// Stores the value on `a`. Throws std::invalid_argument for repeated points or < 2 points.
double estimate_lipschitz(StraussApprox& a, std::span<const double> grid);

/// Convenience overload on a uniform grid of `points` over [-k-2, k+2].
double estimate_lipschitz(StraussApprox& a, std::size_t points = 10000);

/// sup over the grid of |f_k(s) - f(s)|.
double uniform_error(const StraussApprox& a, std::span<const double> grid);
double uniform_error(const StraussApprox& a, double M, std::size_t points = 10001);

struct GrowthBoundReport {
  double C1 = 0.0;  // C 2^{p+1}, bound for |s| ≥ 1/k
  double C2 = 0.0;  // C 2^p, bound for |s| ≤ 1/k
  double outer_violation = 0.0;  // max relative excess of s f_k(s) over C1|s|^{p+1}
  double inner_violation = 0.0;  // max relative excess of s f_k(s) over C2|s|^2
  double sign_violation = 0.0;   // max (-s f_k(s))₊
  double worst_point = 0.0;
  std::size_t inner_points = 0;

  [[nodiscard]] double max_violation() const { return std::max(outer_violation, inner_violation); }
  [[nodiscard]] bool passed(double relative_slack = 1e-12, double sign_slack = 1e-14) const {
    return max_violation() <= relative_slack && sign_violation <= sign_slack;
  }
};

GrowthBoundReport check_growth_bounds(const StraussApprox& a, std::span<const double> grid);
/// Uniform grid of `points` over [-2k, 2k] plus extra points inside (-1/k, 1/k).
std::vector<double> growth_bound_grid(int k, std::size_t points = 10000);

}  // namespace sublin
