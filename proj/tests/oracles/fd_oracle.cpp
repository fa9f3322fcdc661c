#include "fd_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace oracle {

double FdSolution::at(double s) const {
  if (s <= x.front()) return v.front();
  if (s >= x.back()) return v.back();
  const double h = x[1] - x[0];
  const auto i = std::min(static_cast<std::size_t>(s / h), x.size() - 2);
  const double t = (s - x[i]) / h;
  return (1.0 - t) * v[i] + t * v[i + 1];
}

std::vector<double> solve_tridiagonal(std::vector<double> a, std::vector<double> b, std::vector<double> c,
                                      std::vector<double> d) {
  const std::size_t n = b.size();
  for (std::size_t i = 1; i < n; ++i) {
    const double w = a[i] / b[i - 1];
    b[i] -= w * c[i - 1];
    d[i] -= w * d[i - 1];
  }
  std::vector<double> x(n);
  x[n - 1] = d[n - 1] / b[n - 1];
  for (std::size_t i = n - 1; i-- > 0;) x[i] = (d[i] - c[i] * x[i + 1]) / b[i];
  return x;
}

namespace {

// Interior residual -D²v - g(v); v includes the boundary zeros.
std::vector<double> residual(const std::vector<double>& v, double h, const std::function<double(double)>& g) {
  std::vector<double> r(v.size() - 2);
  for (std::size_t i = 1; i + 1 < v.size(); ++i) {
    r[i - 1] = (2.0 * v[i] - v[i - 1] - v[i + 1]) / (h * h) - g(v[i]);
  }
  return r;
}

double max_abs(const std::vector<double>& r) {
  double out = 0.0;
  for (double x : r) out = std::max(out, std::abs(x));
  return out;
}

}  // namespace

FdSolution solve_fd(double L, int nodes, const std::function<double(double)>& g,
                    const std::function<double(double)>& dg, std::vector<double> initial, int picard_steps) {
  if (nodes < 3) throw std::invalid_argument("solve_fd: need at least 3 nodes");
  const auto n = static_cast<std::size_t>(nodes);
  const double h = L / (nodes - 1);
  FdSolution out;
  out.L = L;
  out.x.resize(n);
  for (std::size_t i = 0; i < n; ++i) out.x[i] = L * static_cast<double>(i) / (nodes - 1);
  std::vector<double> v = initial.empty() ? std::vector<double>(n, 0.0) : std::move(initial);
  v.front() = 0.0;
  v.back() = 0.0;
  const std::size_t m = n - 2;
  const double off = -1.0 / (h * h);
  for (int it = 0; it < picard_steps; ++it) {
    std::vector<double> rhs(m);
    for (std::size_t i = 0; i < m; ++i) rhs[i] = g(v[i + 1]);
    const auto next = solve_tridiagonal(std::vector<double>(m, off), std::vector<double>(m, -2.0 * off),
                                        std::vector<double>(m, off), rhs);
    for (std::size_t i = 0; i < m; ++i) v[i + 1] = next[i];
    ++out.picard_steps;
  }
  double norm = max_abs(residual(v, h, g));
  for (int it = 0; it < 100 && norm > 0.0; ++it) {
    const auto r = residual(v, h, g);
    std::vector<double> diag(m);
    std::vector<double> rhs(m);
    for (std::size_t i = 0; i < m; ++i) {
      diag[i] = -2.0 * off - dg(v[i + 1]);
      rhs[i] = -r[i];
    }
    const auto step = solve_tridiagonal(std::vector<double>(m, off), diag, std::vector<double>(m, off), rhs);
    double t = 1.0;
    bool accepted = false;
    while (t >= 1e-6) {
      std::vector<double> trial = v;
      for (std::size_t i = 0; i < m; ++i) trial[i + 1] += t * step[i];
      const double tn = max_abs(residual(trial, h, g));
      if (tn < norm) {
        v = std::move(trial);
        norm = tn;
        accepted = true;
        break;
      }
      t *= 0.5;
    }
    ++out.newton_steps;
    if (!accepted) break;
  }
  out.v = std::move(v);
  out.residual = norm;
  return out;
}

FdSolution sublinear_fd(double L, int nodes, double q, double c) {
  std::vector<double> init(static_cast<std::size_t>(nodes));
  for (int i = 0; i < nodes; ++i) init[static_cast<std::size_t>(i)] = c * std::sin(std::numbers::pi * i / (nodes - 1));
  auto g = [q](double w) { return std::pow(std::max(w, 0.0), q); };
  auto dg = [q](double w) { return w > 0.0 ? q * std::pow(w + 1e-12, q - 1.0) : 0.0; };
  return solve_fd(L, nodes, g, dg, std::move(init), 300);
}

}  // namespace oracle
