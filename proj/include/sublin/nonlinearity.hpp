#pragma once

#include <span>
#include <string>
#include <string_view>

namespace sublin {

/// Growth data (p, C) for a nonlinearity with 0 ≤ s f(s) ≤ C |s|^{p+1}.
struct GrowthCertificate {
  double p = 3.0;
  double C = 1.0;
};

enum class CatalogKind { PurePower, Zero, TruncatedPower, Oscillatory };

/// Parameters accepted by the catalog. `truncation` is only read by the
/// truncated power.
struct CatalogParams {
  double p = 3.0;
  double C = 1.0;
  double truncation = 1.0;
  /// Spatial dimension used for the critical-exponent check (p ≤ (N+2)/(N-2) when N ≥ 3).
  int dimension = 1;
};

/// Continuous, sign-preserving, polynomially bounded f: ℝ → ℝ from the built-in catalog.
/// Immutable; safe to evaluate concurrently.
class Nonlinearity {
 public:
  Nonlinearity(CatalogKind kind, CatalogParams params);

  double operator()(double s) const;
  /// Derivative where it exists (one-sided value at the truncation kink).
  double derivative(double s) const;

  [[nodiscard]] CatalogKind kind() const { return kind_; }
  [[nodiscard]] const GrowthCertificate& certificate() const { return certificate_; }
  [[nodiscard]] const CatalogParams& params() const { return params_; }
  [[nodiscard]] std::string name() const;
  [[nodiscard]] bool has_closed_form_antiderivative() const;

 private:
  CatalogKind kind_;
  CatalogParams params_;
  GrowthCertificate certificate_;
};

/// Builds a catalog entry by name: pure_power, zero, truncated_power, oscillatory
/// (hyphens accepted). Throws std::invalid_argument for unknown names, p ≤ 1, C ≤ 0,
/// a non-positive truncation level, or p above the critical exponent for N ≥ 3.
Nonlinearity make_catalog_nonlinearity(std::string_view name, const CatalogParams& params);

CatalogKind parse_catalog_kind(std::string_view name);
std::string catalog_name(CatalogKind kind);

/// G(s) = ∫₀^s f. Closed form for pure/truncated power and zero, adaptive
/// Gauss–Kronrod otherwise.
class Antiderivative {
 public:
  enum class Method { ClosedForm, AdaptiveQuadrature };

  static constexpr double kDefaultTolerance = 1e-12;

  explicit Antiderivative(Nonlinearity f, double tolerance = kDefaultTolerance);

  double operator()(double s) const;
  /// G(b) - G(a), integrated directly over [a, b] in quadrature mode.
  double increment(double a, double b) const;
  /// ∫_a^b G(t) dt.
  double integral(double a, double b) const;

  [[nodiscard]] Method method() const { return method_; }
  [[nodiscard]] double tolerance() const { return tolerance_; }
  [[nodiscard]] const Nonlinearity& source() const { return f_; }

 private:
  double closed_form(double s) const;
  double closed_form_integral(double s) const;  // H(s) = ∫₀^s G

  Nonlinearity f_;
  double tolerance_;
  Method method_;
};

Antiderivative antiderivative(const Nonlinearity& f, double tolerance = Antiderivative::kDefaultTolerance);

/// Result of a grid sweep of the growth bound.
struct GrowthReport {
  double max_upper_violation = 0.0;  // max (s f(s) - C|s|^{p+1})₊
  double upper_argmax = 0.0;
  double max_sign_violation = 0.0;   // max (-s f(s))₊
  double sign_argmax = 0.0;

  /// True when both violations are within `relative_slack` of C|s|^{p+1}.
  bool passed = true;
};

GrowthReport check_growth(const Nonlinearity& f, std::span<const double> grid,
                          double relative_slack = 1e-14);

}  // namespace sublin
