#include "sublin/quadrature.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <limits>
#include <numbers>
#include <queue>
#include <vector>
#include <stdexcept>
#include <string>

namespace sublin {

GaussLegendreRule gauss_legendre(int points) {
  if (points < 1) throw std::invalid_argument("gauss_legendre: points must be >= 1");
  GaussLegendreRule rule;
  rule.nodes.assign(points, 0.0);
  rule.weights.assign(points, 0.0);
  const int half = (points + 1) / 2;
  for (int i = 0; i < half; ++i) {
    // Tricomi initial guess, then Newton on P_n.
    double x = std::cos(std::numbers::pi * (i + 0.75) / (points + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0;
      double p1 = x;
      for (int k = 2; k <= points; ++k) {
        const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = pk;
      }
      if (points == 1) {
        p1 = x;
        p0 = 1.0;
      }
      dp = points * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    // Recompute derivative at the converged node for the weight.
    double p0 = 1.0;
    double p1 = x;
    for (int k = 2; k <= points; ++k) {
      const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = pk;
    }
    dp = (points == 1) ? 1.0 : points * (x * p1 - p0) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[i] = -x;
    rule.nodes[points - 1 - i] = x;
    rule.weights[i] = w;
    rule.weights[points - 1 - i] = w;
  }
  if (points % 2 == 1) rule.nodes[points / 2] = 0.0;
  return rule;
}

CompositeRule composite_gauss_legendre(double a, double b, int cells, int points) {
  if (cells < 1) throw std::invalid_argument("composite_gauss_legendre: cells must be >= 1");
  if (!(b > a)) throw std::invalid_argument("composite_gauss_legendre: empty interval");
  const auto base = gauss_legendre(points);
  CompositeRule rule;
  rule.a = a;
  rule.b = b;
  rule.cells = cells;
  rule.points = points;
  rule.nodes.reserve(static_cast<std::size_t>(cells) * points);
  rule.weights.reserve(static_cast<std::size_t>(cells) * points);
  const double h = (b - a) / cells;
  for (int c = 0; c < cells; ++c) {
    const double left = a + c * h;
    for (int k = 0; k < points; ++k) {
      rule.nodes.push_back(left + 0.5 * h * (base.nodes[k] + 1.0));
      rule.weights.push_back(0.5 * h * base.weights[k]);
    }
  }
  return rule;
}

double integrate_composite(const std::function<double(double)>& f, double a, double b,
                           int cells, int points) {
  if (a == b) return 0.0;
  const double sign = b > a ? 1.0 : -1.0;
  const auto rule = composite_gauss_legendre(std::min(a, b), std::max(a, b), cells, points);
  double sum = 0.0;
  for (std::size_t i = 0; i < rule.size(); ++i) sum += rule.weights[i] * f(rule.nodes[i]);
  return sign * sum;
}

AdaptiveResult integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                                  double tolerance, unsigned max_depth) {
  if (a == b) return {};
  using rule = boost::math::quadrature::gauss_kronrod<double, 15>;
  constexpr double kRoundoff = 50.0 * std::numeric_limits<double>::epsilon();
  constexpr std::size_t kMaxPanels = 4096;

  // Global bisection of the worst panel. Boost's own recursion halves an absolute target per
  // level and never terminates where the integrand is locally ~0 relative to its size.
  struct Panel {
    double a, b, value, error, l1;
    unsigned depth;
    bool operator<(const Panel& o) const { return error < o.error; }
  };
  const auto make_panel = [&](double lo, double hi, unsigned depth) {
    Panel p{lo, hi, 0.0, 0.0, 0.0, depth};
    p.value = rule::integrate(f, lo, hi, 0, 0.0, &p.error, &p.l1);
    return p;
  };

  const double sign = b > a ? 1.0 : -1.0;
  std::priority_queue<Panel> open;
  std::vector<Panel> done;
  open.push(make_panel(std::min(a, b), std::max(a, b), 0));
  double value = open.top().value;
  double error = open.top().error;
  double l1 = open.top().l1;
  while (!open.empty() && error > tolerance * std::max(1.0, l1) &&
         open.size() + done.size() < kMaxPanels) {
    const Panel worst = open.top();
    open.pop();
    if (worst.depth >= max_depth || worst.error <= kRoundoff * worst.l1 ||
        worst.error <= kRoundoff * std::abs(worst.b - worst.a) * std::max(1.0, l1)) {
      done.push_back(worst);
      continue;
    }
    const double mid = 0.5 * (worst.a + worst.b);
    const Panel left = make_panel(worst.a, mid, worst.depth + 1);
    const Panel right = make_panel(mid, worst.b, worst.depth + 1);
    value += left.value + right.value - worst.value;
    error += left.error + right.error - worst.error;
    l1 += left.l1 + right.l1 - worst.l1;
    // No gain from bisection and consistent values: the estimate is noise, park both halves.
    const bool stalled = left.error + right.error >= worst.error &&
                         std::abs(left.value + right.value - worst.value) <= worst.error;
    if (stalled) {
      done.push_back(left);
      done.push_back(right);
      continue;
    }
    open.push(left);
    open.push(right);
  }
  // Panels parked at roundoff level cannot be improved; count them against a roundoff floor.
  double floor = 0.0;
  for (const auto& p : done) floor += p.error;
  if (!std::isfinite(value) || error > tolerance * std::max(1.0, l1) + floor) {
    throw std::runtime_error("integrate_adaptive: no convergence on [" + std::to_string(a) +
                             ", " + std::to_string(b) + "], error estimate " + std::to_string(error) +
                             " vs " + std::to_string(tolerance));
  }
  return {sign * value, error};
}

std::vector<double> uniform_grid(double a, double b, std::size_t count) {
  if (count == 0) return {};
  if (count == 1) return {a};
  std::vector<double> grid(count);
  const double h = (b - a) / static_cast<double>(count - 1);
  for (std::size_t i = 0; i < count; ++i) grid[i] = a + h * static_cast<double>(i);
  grid.back() = b;
  return grid;
}

}  // namespace sublin
