#include "sublin/strauss.hpp"

#include "sublin/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace sublin {

StraussApprox::StraussApprox(Antiderivative G, int k) : G_(std::move(G)), k_(k) {
  if (k < 1) throw std::invalid_argument("strauss: k must be a positive integer");
  if (G_.method() == Antiderivative::Method::AdaptiveQuadrature &&
      k * G_.tolerance() > kMaxAmplifiedError) {
    throw std::invalid_argument("strauss: k * tol_G = " + std::to_string(k * G_.tolerance()) +
                                " exceeds 1e-9; tighten the antiderivative tolerance");
  }
  const double kd = k;
  inv_k_ = 1.0 / kd;
  tail_neg_ = -kd * G_.increment(-kd, -kd - inv_k_);
  tail_pos_ = kd * G_.increment(kd, kd + inv_k_);
  mid_neg_ = kd * kd * G_.increment(-inv_k_, -2.0 * inv_k_);
  mid_pos_ = kd * kd * G_.increment(inv_k_, 2.0 * inv_k_);
  g_short_neg_ = G_.integral(-2.0 * inv_k_, -inv_k_);
  g_short_pos_ = G_.integral(inv_k_, 2.0 * inv_k_);
}

double StraussApprox::piece_value(int piece, double s) const {
  const double kd = k_;
  switch (piece) {
    case 0: return tail_neg_;
    case 1: return -kd * G_.increment(s, s - inv_k_);
    case 2: return mid_neg_ * s;
    case 3: return mid_pos_ * s;
    case 4: return kd * G_.increment(s, s + inv_k_);
    case 5: return tail_pos_;
    default: throw std::out_of_range("strauss: piece index must be in 0..5");
  }
}

double StraussApprox::operator()(double s) const {
  const double kd = k_;
  if (s <= -kd) return piece_value(0, s);
  if (s < -inv_k_) return piece_value(1, s);
  if (s < 0.0) return piece_value(2, s);
  if (s <= inv_k_) return piece_value(3, s);
  if (s < kd) return piece_value(4, s);
  return piece_value(5, s);
}

double StraussApprox::slope(double s) const {
  const double kd = k_;
  const auto& f = G_.source();
  if (s < -kd) return 0.0;
  if (s < -inv_k_) return kd * (f(s) - f(s - inv_k_));
  if (s < 0.0) return mid_neg_;
  if (s < inv_k_) return mid_pos_;
  if (s < kd) return kd * (f(s + inv_k_) - f(s));
  return 0.0;
}

double StraussApprox::primitive(double s) const {
  const double kd = k_;
  const double edge = 0.5 * inv_k_ * inv_k_;
  if (s >= 0.0) {
    if (s <= inv_k_) return 0.5 * mid_pos_ * s * s;
    const double at_inner = mid_pos_ * edge;
    const double upto = std::min(s, kd);
    double value = at_inner + kd * (G_.integral(upto, upto + inv_k_) - g_short_pos_);
    if (s > kd) value += tail_pos_ * (s - kd);
    return value;
  }
  if (s >= -inv_k_) return 0.5 * mid_neg_ * s * s;
  const double at_inner = mid_neg_ * edge;
  const double downto = std::max(s, -kd);
  double value = at_inner - kd * (g_short_neg_ - G_.integral(downto - inv_k_, downto));
  if (s < -kd) value += tail_neg_ * (s + kd);
  return value;
}

std::array<double, 5> StraussApprox::breakpoints() const {
  const double kd = k_;
  return {-kd, -inv_k_, 0.0, inv_k_, kd};
}

double StraussApprox::breakpoint_gap() const {
  const auto bp = breakpoints();
  double gap = 0.0;
  for (int i = 0; i < 5; ++i) {
    const double left = piece_value(i, bp[i]);
    const double right = piece_value(i + 1, bp[i]);
    gap = std::max(gap, std::abs(left - right) / (1.0 + std::abs(left)));
  }
  return gap;
}

StraussApprox make_strauss(const Nonlinearity& f, int k) {
  if (k < 1) throw std::invalid_argument("strauss: k must be a positive integer");
  const double tol = std::min(Antiderivative::kDefaultTolerance,
                              StraussApprox::kMaxAmplifiedError / static_cast<double>(k));
  return StraussApprox(Antiderivative(f, tol), k);
}

double estimate_lipschitz(StraussApprox& a, std::span<const double> grid) {
  if (grid.size() < 2) throw std::invalid_argument("estimate_lipschitz: need at least 2 points");
  std::vector<double> sorted(grid.begin(), grid.end());
  std::sort(sorted.begin(), sorted.end());
  double c = 0.0;
  double prev_s = sorted.front();
  double prev_f = a(prev_s);
  for (std::size_t i = 1; i < sorted.size(); ++i) {
    const double s = sorted[i];
    if (s == prev_s) throw std::invalid_argument("estimate_lipschitz: degenerate grid (repeated point)");
    const double fs = a(s);
    c = std::max(c, std::abs(fs - prev_f) / (s - prev_s));
    prev_s = s;
    prev_f = fs;
  }
  a.set_lipschitz_estimate(c);
  return c;
}

double estimate_lipschitz(StraussApprox& a, std::size_t points) {
  const double reach = a.index() + 2.0;
  const auto grid = uniform_grid(-reach, reach, points);
  return estimate_lipschitz(a, grid);
}

double uniform_error(const StraussApprox& a, std::span<const double> grid) {
  const auto& f = a.source();
  double err = 0.0;
  for (const double s : grid) err = std::max(err, std::abs(a(s) - f(s)));
  return err;
}

double uniform_error(const StraussApprox& a, double M, std::size_t points) {
  if (!(M > 0.0)) throw std::invalid_argument("uniform_error: M must be positive");
  const auto grid = uniform_grid(-M, M, points);
  return uniform_error(a, grid);
}

GrowthBoundReport check_growth_bounds(const StraussApprox& a, std::span<const double> grid) {
  const auto& cert = a.source().certificate();
  GrowthBoundReport report;
  report.C1 = cert.C * std::pow(2.0, cert.p + 1.0);
  report.C2 = cert.C * std::pow(2.0, cert.p);
  const double inv_k = 1.0 / a.index();
  double worst = 0.0;
  for (const double s : grid) {
    const double sf = s * a(s);
    const double abs_s = std::abs(s);
    report.sign_violation = std::max(report.sign_violation, -sf);
    if (abs_s == 0.0) continue;
    if (abs_s >= inv_k) {
      const double bound = report.C1 * std::pow(abs_s, cert.p + 1.0);
      const double v = (sf - bound) / bound;
      report.outer_violation = std::max(report.outer_violation, v);
      if (v > worst) {
        worst = v;
        report.worst_point = s;
      }
    }
    if (abs_s <= inv_k) {
      ++report.inner_points;
      const double bound = report.C2 * s * s;
      const double v = (sf - bound) / bound;
      report.inner_violation = std::max(report.inner_violation, v);
      if (v > worst) {
        worst = v;
        report.worst_point = s;
      }
    }
  }
  report.outer_violation = std::max(report.outer_violation, 0.0);
  report.inner_violation = std::max(report.inner_violation, 0.0);
  report.sign_violation = std::max(report.sign_violation, 0.0);
  return report;
}

std::vector<double> growth_bound_grid(int k, std::size_t points) {
  const double kd = k;
  auto grid = uniform_grid(-2.0 * kd, 2.0 * kd, points);
  const auto inner = uniform_grid(-1.0 / kd, 1.0 / kd, 101);
  grid.insert(grid.end(), inner.begin(), inner.end());
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  return grid;
}

}  // namespace sublin
