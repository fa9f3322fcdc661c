#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace sublin {

/// Gauss–Legendre nodes and weights on [-1, 1].
struct GaussLegendreRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// n-point rule computed by Newton iteration on P_n; nodes ascending.
GaussLegendreRule gauss_legendre(int points);

/// Composite rule on [a, b]: `cells` equal cells with `points` nodes each.
struct CompositeRule {
  std::vector<double> nodes;
  std::vector<double> weights;
  double a = 0.0;
  double b = 0.0;
  int cells = 0;
  int points = 0;

  [[nodiscard]] std::size_t size() const { return nodes.size(); }
  [[nodiscard]] double cell_width() const { return (b - a) / cells; }
};

CompositeRule composite_gauss_legendre(double a, double b, int cells, int points);

/// Fixed-order composite sum of `f` over [a, b].
double integrate_composite(const std::function<double(double)>& f, double a, double b,
                           int cells, int points);

/// Result of an adaptive integration.
struct AdaptiveResult {
  double value = 0.0;
  double error_estimate = 0.0;
};

/// Adaptive Gauss–Kronrod (15-point) integration with a mixed tolerance:
/// accepted when error ≤ tol · max(1, ∫|f|). Throws std::runtime_error otherwise.
AdaptiveResult integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                                  double tolerance, unsigned max_depth = 30);

/// Uniform grid of `count` points on [a, b] (endpoints included).
std::vector<double> uniform_grid(double a, double b, std::size_t count);

}  // namespace sublin
