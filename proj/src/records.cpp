#include "sublin/records.hpp"

#include <openssl/evp.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

namespace sublin {

using nlohmann::json;

namespace {

json number_or_null(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

json optional_number(const std::optional<double>& x) { return x ? number_or_null(*x) : json(nullptr); }

json vector_json(const Eigen::VectorXd& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(number_or_null(v[i]));
  return out;
}

json point_json(const std::array<double, 2>& p) { return json::array({p[0], p[1]}); }

std::string optional_text(const std::optional<double>& x) { return x ? format_number(*x) : std::string(); }

}  // namespace

std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

json certificate_to_json(const Certificate& c) {
  return {
      {"C", c.C},
      {"p", c.p},
      {"q", c.q},
      {"lambda", c.lambda},
      {"C1", c.C * std::pow(2.0, c.p + 1.0)},
      {"C2", c.C * std::pow(2.0, c.p)},
      {"sobolev_q1", c.sobolev_q1},
      {"sobolev_p1", c.sobolev_p1},
      {"poincare_c3", c.poincare_c3},
      {"omega_measure", c.omega_measure},
      {"r", c.r},
      {"lambda_star", c.lambda_star},
      {"rho", number_or_null(c.rho)},
      {"n_star", c.n_star ? json(*c.n_star) : json(nullptr)},
      {"feasible", c.feasible},
      {"status", c.status},
      {"provenance", c.provenance},
  };
}

json solution_to_json(const GalerkinSolution& s) {
  return {
      {"m", s.xi.size()},
      {"xi", vector_json(s.xi)},
      {"residual_norm", number_or_null(s.residual_norm)},
      {"h10_norm", number_or_null(s.h10_norm)},
      {"min_value", number_or_null(s.min_value)},
      {"energy", number_or_null(s.energy)},
      {"newton_steps", s.newton_steps},
      {"descent_steps", s.descent_steps},
      {"converged", s.converged},
      {"certified", s.certified},
      {"status", s.status},
      {"path_hash", s.path_hash},
  };
}

json final_report_to_json(const FinalReport& report) {
  json checks = json::array();
  for (const auto& c : report.checks) {
    checks.push_back({{"name", c.name},
                      {"passed", c.passed},
                      {"value", number_or_null(c.value)},
                      {"tolerance", c.tolerance},
                      {"worst_point", point_json(c.worst_point)}});
  }
  return {{"passed", report.passed()}, {"checks", checks}};
}

json reference_to_json(const ReferenceSolution& ref) {
  return {
      {"domain", domain_to_json(ref.space->domain())},
      {"q", ref.q},
      {"m", ref.xi.size()},
      {"iterations", ref.iterations},
      {"start_scale", ref.start_scale},
      {"last_step", ref.last_step},
      {"converged", ref.converged},
      {"strong_residual", ref.residual},
      {"fixed_point_change", ref.fixed_point_change},
      {"max_value", ref.max_value},
      {"min_interior", ref.min_interior},
      {"xi", vector_json(ref.xi)},
  };
}

json stage_record_to_json(const StageRecord& rec, const RunConfig& config) {
  return {
      {"config", config_to_json(config)},
      {"n", rec.n},
      {"m", rec.m},
      {"solution", solution_to_json(rec.solution)},
      {"cauchy_h10", optional_number(rec.cauchy_h10)},
      {"l1_nonlin_gap", number_or_null(rec.l1_nonlin_gap)},
      {"strong_residual", number_or_null(rec.strong_residual)},
      {"lower_bound_margin", number_or_null(rec.lower_bound_margin)},
  };
}

json convergence_to_json(const ConvergenceReport& r) {
  json stages = json::array();
  for (const auto& s : r.stages) {
    json inner = json::array();
    for (std::size_t i = 0; i < s.inner.stages.size(); ++i) {
      const auto& sol = s.inner.stages[i];
      inner.push_back({{"m", s.inner.m[i]},
                       {"h10_norm", sol.h10_norm},
                       {"residual_norm", number_or_null(sol.residual_norm)},
                       {"min_value", sol.min_value},
                       {"converged", sol.converged},
                       {"certified", sol.certified},
                       {"path_hash", sol.path_hash}});
    }
    json cauchy = json::array();
    for (double d : s.inner.cauchy_h10) cauchy.push_back(number_or_null(d));
    stages.push_back({{"n", s.n},
                      {"inner", inner},
                      {"cauchy_h10", cauchy},
                      {"inner_strictly_decreasing", s.inner.strictly_decreasing},
                      {"inner_converged", s.inner.converged},
                      {"l1_nonlin_gap", s.l1_nonlin_gap},
                      {"reaction_pairing", s.reaction_pairing},
                      {"pairing",
                       {{"direct", s.pairing.direct},
                        {"positive_part", s.pairing.positive_part},
                        {"negative_part", s.pairing.negative_part}}},
                      {"min_interior", s.min_interior},
                      {"lower_bound_margin", s.lower_bound_margin},
                      {"h10_to_next", optional_number(s.h10_to_next)},
                      {"l2_to_next", optional_number(s.l2_to_next)}});
  }
  return {
      {"config", config_to_json(r.config)},
      {"certificate", certificate_to_json(r.certificate)},
      {"stages", stages},
      {"reference", reference_to_json(r.reference)},
      {"final_solution", solution_to_json(r.final_solution)},
      {"final_strong_residual", r.final_strong_residual},
      {"largest_n_strong_residual", r.largest_n_strong_residual},
      {"coefficient_decay_slope", r.coefficient_decay},
      {"final_checks", final_report_to_json(r.final_checks)},
      {"uniform_bound", r.uniform_bound},
      {"inner_strictly_decreasing", r.inner_decreasing},
      {"inner_converged", r.inner_converged},
      {"l1_decreasing", r.l1_decreasing},
      {"outer_converged", r.outer_converged},
      {"positivity", r.positivity},
      {"flags", r.flags},
  };
}

std::string convergence_csv(const ConvergenceReport& report) {
  std::ostringstream os;
  os << "n,m,h10_norm,cauchy_h10,l1_nonlin_gap,strong_residual,min_v,lower_bound_margin\n";
  for (const auto& rec : report.records) {
    os << rec.n << ',' << rec.m << ',' << format_number(rec.solution.h10_norm) << ','
       << optional_text(rec.cauchy_h10) << ',' << format_number(rec.l1_nonlin_gap) << ','
       << format_number(rec.strong_residual) << ',' << format_number(rec.solution.min_value) << ','
       << format_number(rec.lower_bound_margin) << '\n';
  }
  return os.str();
}

std::string solution_csv(const SpectralSpace& space, const Eigen::VectorXd& xi, std::size_t samples,
                         const std::string& value_name) {
  if (samples < 2) throw std::invalid_argument("solution_csv: need at least 2 samples per side");
  const auto& d = space.domain();
  const auto xs = uniform_grid(0.0, d.L1, samples);
  std::ostringstream os;
  if (d.kind == ModelDomain::Kind::Interval) {
    const std::vector<double> ys{0.0};
    const Eigen::VectorXd v = space.evaluate(xi, xs, ys);
    os << "x," << value_name << '\n';
    for (std::size_t i = 0; i < xs.size(); ++i) os << format_number(xs[i]) << ',' << format_number(v[static_cast<Eigen::Index>(i)]) << '\n';
    return os.str();
  }
  const auto ys = uniform_grid(0.0, d.L2, samples);
  const Eigen::VectorXd v = space.evaluate(xi, xs, ys);
  os << "x,y," << value_name << '\n';
  for (std::size_t iy = 0; iy < ys.size(); ++iy) {
    for (std::size_t ix = 0; ix < xs.size(); ++ix) {
      os << format_number(xs[ix]) << ',' << format_number(ys[iy]) << ','
         << format_number(v[static_cast<Eigen::Index>(ix + xs.size() * iy)]) << '\n';
    }
  }
  return os.str();
}

std::string sha256_hex(const std::string& bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int length = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &length, EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("sha256: digest failed");
  }
  std::ostringstream os;
  for (unsigned int i = 0; i < length; ++i) os << std::hex << std::setw(2) << std::setfill('0') << int(digest[i]);
  return os.str();
}

ArtifactWriter::ArtifactWriter(std::filesystem::path directory) : directory_(std::move(directory)) {
  std::error_code ec;
  std::filesystem::create_directories(directory_, ec);
  if (ec || !std::filesystem::is_directory(directory_)) {
    throw std::runtime_error("output: cannot create output directory '" + directory_.string() + "'");
  }
}

void ArtifactWriter::write(const std::string& relative, const std::string& contents) {
  const auto path = directory_ / relative;
  std::error_code ec;
  std::filesystem::create_directories(path.parent_path(), ec);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("output: cannot write '" + path.string() + "'");
  out << contents;
  out.close();
  if (!out) throw std::runtime_error("output: failed writing '" + path.string() + "'");
  entries_.push_back({{"path", relative}, {"size", contents.size()}, {"sha256", sha256_hex(contents)}});
}

void ArtifactWriter::write_json(const std::string& relative, const json& doc) {
  write(relative, doc.dump(2) + "\n");
}

void ArtifactWriter::finish() {
  const auto path = directory_ / "manifest.json";
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("output: cannot write '" + path.string() + "'");
  out << json{{"files", entries_}}.dump(2) << "\n";
}

}  // namespace sublin
