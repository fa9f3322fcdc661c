#include "sublin/nonlinearity.hpp"

#include "sublin/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace sublin {

namespace {

double signed_power(double s, double p) {  // |s|^{p-1} s
  return s == 0.0 ? 0.0 : std::copysign(std::pow(std::abs(s), p), s);
}

std::string normalize(std::string_view name) {
  std::string out(name);
  std::replace(out.begin(), out.end(), '-', '_');
  return out;
}

}  // namespace

CatalogKind parse_catalog_kind(std::string_view name) {
  const auto key = normalize(name);
  if (key == "pure_power") return CatalogKind::PurePower;
  if (key == "zero") return CatalogKind::Zero;
  if (key == "truncated_power") return CatalogKind::TruncatedPower;
  if (key == "oscillatory") return CatalogKind::Oscillatory;
  throw std::invalid_argument("unknown nonlinearity '" + std::string(name) +
                              "' (expected pure_power, zero, truncated_power, oscillatory)");
}

std::string catalog_name(CatalogKind kind) {
  switch (kind) {
    case CatalogKind::PurePower: return "pure_power";
    case CatalogKind::Zero: return "zero";
    case CatalogKind::TruncatedPower: return "truncated_power";
    case CatalogKind::Oscillatory: return "oscillatory";
  }
  return "unknown";
}

Nonlinearity::Nonlinearity(CatalogKind kind, CatalogParams params)
    : kind_(kind), params_(params), certificate_{params.p, params.C} {
  if (!(params.p > 1.0)) throw std::invalid_argument("nonlinearity: p must satisfy p > 1");
  if (!(params.C > 0.0)) throw std::invalid_argument("nonlinearity: C must satisfy C > 0");
  if (params.dimension >= 3) {
    const double critical = (params.dimension + 2.0) / (params.dimension - 2.0);
    if (params.p > critical) {
      throw std::invalid_argument("nonlinearity: p exceeds the critical exponent " +
                                  std::to_string(critical));
    }
  }
  if (kind == CatalogKind::TruncatedPower && !(params.truncation > 0.0)) {
    throw std::invalid_argument("nonlinearity: truncation level must be positive");
  }
}

double Nonlinearity::operator()(double s) const {
  const double p = params_.p;
  switch (kind_) {
    case CatalogKind::PurePower: return signed_power(s, p);
    case CatalogKind::Zero: return 0.0;
    case CatalogKind::TruncatedPower:
      return std::pow(std::min(std::abs(s), params_.truncation), p - 1.0) * s;
    case CatalogKind::Oscillatory: {
      const double sn = std::sin(s);
      return signed_power(s, p) * sn * sn;
    }
  }
  return 0.0;
}

double Nonlinearity::derivative(double s) const {
  const double p = params_.p;
  const double a = std::abs(s);
  switch (kind_) {
    case CatalogKind::PurePower: return p * std::pow(a, p - 1.0);
    case CatalogKind::Zero: return 0.0;
    case CatalogKind::TruncatedPower: {
      const double M = params_.truncation;
      return a < M ? p * std::pow(a, p - 1.0) : std::pow(M, p - 1.0);
    }
    case CatalogKind::Oscillatory: {
      const double sn = std::sin(s);
      return p * std::pow(a, p - 1.0) * sn * sn + signed_power(s, p) * std::sin(2.0 * s);
    }
  }
  return 0.0;
}

std::string Nonlinearity::name() const { return catalog_name(kind_); }

bool Nonlinearity::has_closed_form_antiderivative() const {
  return kind_ != CatalogKind::Oscillatory;
}

Nonlinearity make_catalog_nonlinearity(std::string_view name, const CatalogParams& params) {
  return Nonlinearity(parse_catalog_kind(name), params);
}

Antiderivative::Antiderivative(Nonlinearity f, double tolerance)
    : f_(std::move(f)),
      tolerance_(tolerance),
      method_(f_.has_closed_form_antiderivative() ? Method::ClosedForm
                                                  : Method::AdaptiveQuadrature) {
  if (!(tolerance > 0.0)) throw std::invalid_argument("antiderivative: tolerance must be positive");
}

double Antiderivative::closed_form(double s) const {
  const double p = f_.params().p;
  const double a = std::abs(s);
  switch (f_.kind()) {
    case CatalogKind::Zero: return 0.0;
    case CatalogKind::PurePower: return std::pow(a, p + 1.0) / (p + 1.0);
    case CatalogKind::TruncatedPower: {
      const double M = f_.params().truncation;
      if (a <= M) return std::pow(a, p + 1.0) / (p + 1.0);
      return std::pow(M, p + 1.0) / (p + 1.0) + std::pow(M, p - 1.0) * (a * a - M * M) / 2.0;
    }
    case CatalogKind::Oscillatory: break;
  }
  throw std::logic_error("antiderivative: no closed form");
}

double Antiderivative::closed_form_integral(double s) const {
  // G is even, so H is odd.
  const double p = f_.params().p;
  const double a = std::abs(s);
  double h = 0.0;
  switch (f_.kind()) {
    case CatalogKind::Zero: return 0.0;
    case CatalogKind::PurePower:
      h = std::pow(a, p + 2.0) / ((p + 1.0) * (p + 2.0));
      break;
    case CatalogKind::TruncatedPower: {
      const double M = f_.params().truncation;
      const auto inner = [p](double t) { return std::pow(t, p + 2.0) / ((p + 1.0) * (p + 2.0)); };
      if (a <= M) {
        h = inner(a);
      } else {
        const double Mp1 = std::pow(M, p + 1.0);
        h = inner(M) + (Mp1 / (p + 1.0) - Mp1 / 2.0) * (a - M) +
            std::pow(M, p - 1.0) * (a * a * a - M * M * M) / 6.0;
      }
      break;
    }
    case CatalogKind::Oscillatory:
      throw std::logic_error("antiderivative: no closed form");
  }
  return std::copysign(h, s);
}

double Antiderivative::operator()(double s) const {
  if (method_ == Method::ClosedForm) return closed_form(s);
  return increment(0.0, s);
}

double Antiderivative::increment(double a, double b) const {
  if (method_ == Method::ClosedForm) return closed_form(b) - closed_form(a);
  if (a == b) return 0.0;
  const auto& f = f_;
  return integrate_adaptive([&f](double t) { return f(t); }, a, b, tolerance_).value;
}

double Antiderivative::integral(double a, double b) const {
  if (method_ == Method::ClosedForm) return closed_form_integral(b) - closed_form_integral(a);
  if (a == b) return 0.0;
  // G(t) = G(a) + ∫_a^t f; the inner increments are short when [a, b] is.
  const double base = (*this)(a);
  const auto inner = [this, a, base](double t) { return base + increment(a, t); };
  return integrate_adaptive(inner, a, b, 1e3 * tolerance_).value;
}

Antiderivative antiderivative(const Nonlinearity& f, double tolerance) {
  return Antiderivative(f, tolerance);
}

GrowthReport check_growth(const Nonlinearity& f, std::span<const double> grid,
                          double relative_slack) {
  GrowthReport report;
  const auto& cert = f.certificate();
  for (const double s : grid) {
    const double sf = s * f(s);
    const double bound = cert.C * std::pow(std::abs(s), cert.p + 1.0);
    const double upper = std::max(0.0, sf - bound);
    const double sign = std::max(0.0, -sf);
    if (upper > report.max_upper_violation) {
      report.max_upper_violation = upper;
      report.upper_argmax = s;
    }
    if (sign > report.max_sign_violation) {
      report.max_sign_violation = sign;
      report.sign_argmax = s;
    }
    const double slack = relative_slack * std::max(1.0, bound);
    if (upper > slack || sign > slack) report.passed = false;
  }
  return report;
}

}  // namespace sublin
