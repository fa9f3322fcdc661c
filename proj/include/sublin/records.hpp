#pragma once

#include "sublin/config.hpp"
#include "sublin/pipeline.hpp"

#include <json.hpp>

#include <filesystem>
#include <string>
#include <vector>

namespace sublin {

nlohmann::json certificate_to_json(const Certificate& cert);
nlohmann::json solution_to_json(const GalerkinSolution& sol);
nlohmann::json final_report_to_json(const FinalReport& report);
nlohmann::json reference_to_json(const ReferenceSolution& ref);
/// Everything except per-(n, m) coefficient vectors; deterministic for a given config.
nlohmann::json convergence_to_json(const ConvergenceReport& report);
nlohmann::json stage_record_to_json(const StageRecord& rec, const RunConfig& config);

/// Columns: n, m, h10_norm, cauchy_h10, l1_nonlin_gap, strong_residual, min_v, lower_bound_margin.
std::string convergence_csv(const ConvergenceReport& report);

/// Samples v on a uniform grid including the boundary. Columns: x[, y], v.
std::string solution_csv(const SpectralSpace& space, const Eigen::VectorXd& xi, std::size_t samples,
                         const std::string& value_name = "v");

/// 17-significant-digit text of a double; "nan"/"inf" for non-finite values.
std::string format_number(double x);

std::string sha256_hex(const std::string& bytes);

/// Writes artifacts into one directory and keeps a manifest (path, size, SHA-256).
class ArtifactWriter {
 public:
  /// Creates the directory; throws std::runtime_error when it cannot be created or written.
  explicit ArtifactWriter(std::filesystem::path directory);

  void write(const std::string& relative, const std::string& contents);
  void write_json(const std::string& relative, const nlohmann::json& doc);
  /// Writes manifest.json listing every file written so far.
  void finish();

  [[nodiscard]] const std::filesystem::path& directory() const { return directory_; }

 private:
  std::filesystem::path directory_;
  nlohmann::json entries_ = nlohmann::json::array();
};

}  // namespace sublin
