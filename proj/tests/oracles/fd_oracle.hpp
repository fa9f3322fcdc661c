#pragma once

#include <functional>
#include <vector>

namespace oracle {

/// Second-order finite-difference solution of -v'' = g(v) on (0, L), v(0) = v(L) = 0.
struct FdSolution {
  double L = 1.0;
  std::vector<double> x;  // all nodes, endpoints included
  std::vector<double> v;
  int picard_steps = 0;
  int newton_steps = 0;
  double residual = 0.0;  // max interior |-D²v - g(v)|

  /// Piecewise-linear interpolation.
  [[nodiscard]] double at(double s) const;
};

/// Picard sweeps v <- (-D²)^{-1} g(v) from `initial` (zero when empty), then damped
/// Newton with a tridiagonal Jacobian until the residual stops improving.
FdSolution solve_fd(double L, int nodes, const std::function<double(double)>& g,
                    const std::function<double(double)>& dg, std::vector<double> initial = {},
                    int picard_steps = 200);

/// -w'' = w₊^q from the supersolution c sin(πx/L).
FdSolution sublinear_fd(double L, int nodes, double q, double c);

/// Thomas algorithm for a tridiagonal system; a: sub, b: diag, c: super.
std::vector<double> solve_tridiagonal(std::vector<double> a, std::vector<double> b, std::vector<double> c,
                                      std::vector<double> d);

}  // namespace oracle
