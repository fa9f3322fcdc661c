#include "sublin/cli.hpp"
#include "sublin/config.hpp"
#include "sublin/records.hpp"

#include <gtest/gtest.h>
#include <json.hpp>

#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace sublin;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    root_ = fs::temp_directory_path() /
            ("sublin_cli_" + std::to_string(::getpid()) + "_" + info->name());
    fs::remove_all(root_);
    fs::create_directories(root_);
  }
  void TearDown() override { fs::remove_all(root_); }

  fs::path write_config(const json& doc) {
    const auto path = root_ / "config.json";
    std::ofstream(path) << doc.dump();
    return path;
  }

  int run(const std::string& command, const fs::path& config, const std::string& out_name = "out") {
    CliCommand cmd;
    cmd.command = command;
    cmd.config = config;
    cmd.output = root_ / out_name;
    std::ostringstream out, err;
    const int code = run_command(cmd, out, err);
    stdout_ = out.str();
    stderr_ = err.str();
    return code;
  }

  json read_json(const fs::path& relative, const std::string& out_name = "out") {
    std::ifstream in(root_ / out_name / relative);
    return json::parse(in);
  }

  std::string read_text(const fs::path& relative) {
    std::ifstream in(root_ / "out" / relative);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
  }

  static json base() {
    return {{"domain", {{"kind", "interval"}, {"L", 1.0}}},
            {"f", {{"name", "pure_power"}, {"p", 3}, {"C", 1}}},
            {"q", 0.5}};
  }

  fs::path root_;
  std::string stdout_;
  std::string stderr_;
};

}  // namespace

TEST(Records, Sha256KnownVector) {
  EXPECT_EQ(sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  EXPECT_EQ(sha256_hex(""), "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
}

TEST(Records, NumberFormatRoundTrips) {
  const double x = 0.1 + 0.2;
  EXPECT_EQ(std::stod(format_number(x)), x);
  EXPECT_EQ(format_number(INFINITY), "inf");
}

TEST(Config, StrictKeysAndLambdaExclusivity) {
  json doc = {{"q", 0.5}, {"bogus", 1}};
  EXPECT_THROW(parse_config(doc), ConfigError);
  doc = {{"tolerances", {{"solvr", 1e-9}}}};
  EXPECT_THROW(parse_config(doc), ConfigError);
  doc = {{"lambda", 0.1}, {"lambda_fraction", 0.5}};
  EXPECT_THROW(parse_config(doc), ConfigError);
  doc = {{"domain", {{"kind", "disk"}}}};
  EXPECT_THROW(parse_config(doc), ConfigError);
}

TEST(Config, RoundTripsThroughJson) {
  json doc = {{"domain", {{"kind", "rectangle"}, {"L1", 1.0}, {"L2", 2.0}}}, {"q", 0.25}, {"lambda", 0.5},
              {"m_schedule", {4, 9}}, {"n_schedule", {2, 8}}, {"seed", 7}};
  const auto parsed = parse_config(doc);
  const auto again = parse_config(config_to_json(parsed.run));
  EXPECT_EQ(config_to_json(again.run), config_to_json(parsed.run));
  EXPECT_DOUBLE_EQ(again.run.domain.L2, 2.0);
}

TEST(Config, MissingAndMalformedFiles) {
  EXPECT_THROW(load_config("/nonexistent/sublin.json"), ConfigError);
  const auto path = fs::temp_directory_path() / ("sublin_bad_" + std::to_string(::getpid()) + ".json");
  std::ofstream(path) << "{ not json";
  try {
    load_config(path);
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("not valid JSON"), std::string::npos);
  }
  fs::remove(path);
}

TEST_F(CliTest, ConstantsPrintsCertificate) {
  EXPECT_EQ(run("constants", write_config(base())), exit_code::kOk);
  const auto doc = json::parse(stdout_);
  EXPECT_GT(doc.at("lambda_star").get<double>(), 0.0);
  EXPECT_EQ(doc.at("C1").get<double>(), 16.0);
  EXPECT_TRUE(fs::exists(root_ / "out" / "manifest.json"));
}

TEST_F(CliTest, VerifyLemmasWritesCleanCsv) {
  json doc = base();
  doc["lemmas"] = {{"k_max", 16}, {"grid_points", 500}};
  EXPECT_EQ(run("verify-lemmas", write_config(doc)), exit_code::kOk);
  std::istringstream csv(read_text("lemmas.csv"));
  std::string line;
  std::getline(csv, line);
  EXPECT_EQ(line.rfind("k,breakpoint_gap,sign_violation,lemma2_violation,sup_error", 0), 0u);
  int rows = 0;
  while (std::getline(csv, line)) {
    ++rows;
    EXPECT_NE(line.find(",true"), std::string::npos) << line;
  }
  EXPECT_EQ(rows, 5);
}

TEST_F(CliTest, InfeasibleLambdaIsValidationError) {
  json doc = base();
  doc["lambda_fraction"] = 1.0;
  EXPECT_EQ(run("pipeline", write_config(doc)), exit_code::kValidation);
  EXPECT_NE(stderr_.find("lambda_star"), std::string::npos);
}

TEST_F(CliTest, DistinctMessagesForUserErrors) {
  CliCommand cmd;
  cmd.command = "constants";
  cmd.config = root_ / "missing.json";
  std::ostringstream out, err1, err2, err3;
  EXPECT_EQ(run_command(cmd, out, err1), exit_code::kValidation);

  std::ofstream(root_ / "schema.json") << R"({"q": "half"})";
  cmd.config = root_ / "schema.json";
  EXPECT_EQ(run_command(cmd, out, err2), exit_code::kValidation);

  cmd.config = write_config(base());
  std::ofstream(root_ / "file") << "x";
  cmd.output = root_ / "file" / "sub";
  EXPECT_EQ(run_command(cmd, out, err3), exit_code::kValidation);

  EXPECT_NE(err1.str(), err2.str());
  EXPECT_NE(err2.str(), err3.str());
  EXPECT_NE(err1.str().find("cannot open"), std::string::npos);
  EXPECT_NE(err3.str().find("output"), std::string::npos);
}

TEST_F(CliTest, SolveWritesRunRecord) {
  json doc = base();
  doc["lambda_fraction"] = 0.5;
  doc["solve"] = {{"m", 16}, {"sphere_trials", 50}};
  EXPECT_EQ(run("solve", write_config(doc)), exit_code::kOk);
  const auto record = read_json("run_record.json");
  EXPECT_TRUE(record.at("solution").at("converged").get<bool>());
  EXPECT_TRUE(fs::exists(root_ / "out" / "solution.csv"));
}

TEST_F(CliTest, SweepHandlesEmptyAndBoundaryGrids) {
  json doc = base();
  doc["lambda_grid"] = json::array();
  doc["solve"] = {{"m", 16}, {"sphere_trials", 20}};
  EXPECT_EQ(run("sweep", write_config(doc), "empty"), exit_code::kOk);
  std::ifstream empty(root_ / "empty" / "sweep.csv");
  std::string header, row;
  std::getline(empty, header);
  EXPECT_FALSE(std::getline(empty, row));

  doc.erase("lambda_grid");
  doc["lambda_grid_fractions"] = {0.125, 0.25, 0.5};
  doc["m_schedule"] = {8, 16};
  doc["n_schedule"] = {4, 16};
  EXPECT_NE(run("sweep", write_config(doc), "grid"), exit_code::kValidation);
  std::ifstream grid(root_ / "grid" / "sweep.csv");
  std::getline(grid, header);
  int rows = 0;
  while (std::getline(grid, row)) {
    ++rows;
    EXPECT_NE(row.find(",true,"), std::string::npos) << row;  // converged column
  }
  EXPECT_EQ(rows, 3);

  doc["lambda_grid_fractions"] = {0.25, 1.0};
  EXPECT_EQ(run("sweep", write_config(doc), "edge"), exit_code::kCheckFailed);
  std::ifstream edge(root_ / "edge" / "sweep.csv");
  std::string text((std::istreambuf_iterator<char>(edge)), std::istreambuf_iterator<char>());
  EXPECT_NE(text.find("rejected"), std::string::npos);
}

TEST_F(CliTest, PipelineIsDeterministic) {
  json doc = base();
  doc["lambda_fraction"] = 0.5;
  doc["m_schedule"] = {8, 16};
  doc["n_schedule"] = {4, 16};
  const auto config = write_config(doc);
  const int a = run("pipeline", config, "a");
  const int b = run("pipeline", config, "b");
  EXPECT_EQ(a, b);
  EXPECT_EQ(read_json("convergence_report.json", "a"), read_json("convergence_report.json", "b"));
  const auto ma = read_json("manifest.json", "a").at("files");
  const auto mb = read_json("manifest.json", "b").at("files");
  ASSERT_EQ(ma.size(), mb.size());
  for (std::size_t i = 0; i < ma.size(); ++i) {
    if (ma[i].at("path") == "metadata.json") continue;
    EXPECT_EQ(ma[i].at("sha256"), mb[i].at("sha256")) << ma[i].at("path");
  }
}
