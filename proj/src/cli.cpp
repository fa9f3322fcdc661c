#include "sublin/cli.hpp"

#include "sublin/config.hpp"
#include "sublin/records.hpp"
#include "sublin/strauss.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <ctime>
#include <iostream>
#include <sstream>

namespace sublin {

using nlohmann::json;

namespace {

std::string utc_now() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

class Session {
 public:
  Session(const CliCommand& cmd, std::ostream& out, std::ostream& err)
      : cmd_(cmd), out_(out), err_(err), started_(utc_now()) {}

  int run() {
    try {
      config_ = load_config(cmd_.config);
      if (cmd_.seed) config_.run.seed = *cmd_.seed;
      resolve_lambda(config_);
      const std::string& c = cmd_.command;
      if (c == "constants") return constants();
      if (c == "verify-lemmas") return verify_lemmas();
      if (c == "solve") return solve();
      if (c == "reference") return reference();
      if (c == "pipeline") return pipeline();
      if (c == "sweep") return sweep();
      err_ << "error: unknown command '" << c << "'\n";
      return exit_code::kValidation;
    } catch (const ConfigError& e) {
      err_ << "error: " << e.what() << "\n";
      return exit_code::kValidation;
    } catch (const std::invalid_argument& e) {
      err_ << "error: " << e.what() << "\n";
      return exit_code::kValidation;
    } catch (const std::runtime_error& e) {
      err_ << "error: " << e.what() << "\n";
      return exit_code::kValidation;
    }
  }

 private:
  void log(const std::string& message) const {
    if (cmd_.verbosity > 0) err_ << "[sublin] " << message << "\n";
  }

  ArtifactWriter& writer() {
    if (!writer_) writer_.emplace(cmd_.output ? *cmd_.output : std::filesystem::path("sublin_output"));
    return *writer_;
  }

  int finish(int code, const json& failure = nullptr) {
    if (!writer_ && cmd_.output) writer();
    if (writer_) {
      if (!failure.is_null()) writer_->write_json("failure.json", failure);
      writer_->write_json("metadata.json", {{"command", cmd_.command},
                                            {"config_path", cmd_.config.string()},
                                            {"started_at", started_},
                                            {"finished_at", utc_now()}});
      writer_->finish();
    }
    return code;
  }

  void require_lambda() const {
    if (!config_.lambda_given) throw ConfigError("config: lambda or lambda_fraction is required for " + cmd_.command);
  }

  Certificate certificate() const {
    const auto f = config_nonlinearity(config_.run);
    return build_certificate(config_.run.domain, config_.run.q, f.certificate().p, f.certificate().C,
                             config_.run.lambda, config_.run.embedding);
  }

  int constants() {
    const json doc = certificate_to_json(certificate());
    out_ << doc.dump(2) << "\n";
    if (cmd_.output) writer().write_json("certificate.json", doc);
    return finish(exit_code::kOk);
  }

  int verify_lemmas() {
    const auto f = config_nonlinearity(config_.run);
    std::ostringstream csv;
    csv << "k,breakpoint_gap,sign_violation,lemma2_violation,sup_error,C1,C2,lipschitz_estimate,passed\n";
    json failing = json::array();
    for (int k = 1; k <= config_.lemmas.k_max; k *= 2) {
      log("lemma checks at k = " + std::to_string(k));
      StraussApprox a = make_strauss(f, k);
      const auto grid = growth_bound_grid(k, config_.lemmas.grid_points);
      const GrowthBoundReport rep = check_growth_bounds(a, grid);
      const double gap = a.breakpoint_gap();
      const double uerr = uniform_error(a, config_.lemmas.uniform_range);
      const double lip = estimate_lipschitz(a);
      const bool ok = rep.passed() && gap <= 1e-12;
      csv << k << ',' << format_number(gap) << ',' << format_number(rep.sign_violation) << ','
          << format_number(rep.max_violation()) << ',' << format_number(uerr) << ','
          << format_number(rep.C1) << ',' << format_number(rep.C2) << ',' << format_number(lip) << ','
          << (ok ? "true" : "false") << '\n';
      if (!ok) {
        failing.push_back({{"k", k}, {"lemma2_violation", rep.max_violation()}, {"sign_violation", rep.sign_violation},
                           {"breakpoint_gap", gap}, {"worst_point", rep.worst_point}});
      }
      if (k > config_.lemmas.k_max / 2) break;
    }
    if (cmd_.output) {
      writer().write("lemmas.csv", csv.str());
    } else {
      out_ << csv.str();
    }
    if (!failing.empty()) {
      err_ << "check failed: growth bounds violated for " << failing.size() << " value(s) of k\n";
      return finish(exit_code::kCheckFailed, {{"check", "growth_bounds"}, {"failures", failing}});
    }
    return finish(exit_code::kOk);
  }

  int solve() {
    require_lambda();
    const RunConfig& run = config_.run;
    const Certificate cert = certify_config(run);
    const auto f = config_nonlinearity(run);
    const long long n = config_.solve.n ? *config_.solve.n : *cert.n_star;
    const std::size_t m = config_.solve.m ? *config_.solve.m : run.m_schedule.back();
    auto space = std::make_shared<const SpectralSpace>(build_basis(run.domain, m));
    const ApproxProblem prob = make_approx_problem(space, f, run.q, run.lambda, n, cert);
    if (!prob.certified()) log("n = " + std::to_string(n) + " is below n_star; run is uncertified");
    SolverOptions options;
    options.tolerance = run.solver_tolerance;
    log("solving n = " + std::to_string(n) + ", m = " + std::to_string(m));
    const GalerkinSolution sol = solve_in_ball(prob, options);
    const auto weak = weak_residual(prob, sol.xi, config_.solve.probes, run.seed);
    const auto sphere = sphere_margin_check(prob, config_.solve.sphere_trials, run.seed);
    const auto pairing = split_pairing(prob, sol.xi);
    json record = {
        {"config", config_to_json(run)},
        {"certificate", certificate_to_json(cert)},
        {"n", n},
        {"m", m},
        {"certified_problem", prob.certified()},
        {"solution", solution_to_json(sol)},
        {"strong_residual", strong_residual(prob, sol.xi)},
        {"weak_residual",
         {{"in_span_max", weak.in_span_max},
          {"next_mode_defects", weak.next_mode_defects},
          {"bump_defects", weak.bump_defects},
          {"out_of_span_max", weak.out_of_span_max}}},
        {"sphere",
         {{"radius", sphere.radius}, {"rho", sphere.rho}, {"trials", sphere.trials},
          {"min_pairing", sphere.min_pairing}, {"passed", sphere.passed()}}},
        {"pairing",
         {{"direct", pairing.direct}, {"positive_part", pairing.positive_part}, {"negative_part", pairing.negative_part}}},
    };
    writer().write_json("run_record.json", record);
    writer().write("solution.csv", solution_csv(*space, sol.xi, run.domain.dimension() == 1 ? 1001 : 101));
    out_ << "residual_norm " << format_number(sol.residual_norm) << "  h10_norm " << format_number(sol.h10_norm)
         << "  r " << format_number(cert.r) << "  " << sol.status << "\n";
    const bool inside = sol.h10_norm <= cert.r + 1e-12;
    if (!sol.converged || !inside || !sphere.passed()) {
      json failure = {{"check", "solve"},
                      {"converged", sol.converged},
                      {"inside_ball", inside},
                      {"sphere_passed", sphere.passed()},
                      {"residual_norm", sol.residual_norm},
                      {"status", sol.status}};
      return finish(exit_code::kCheckFailed, failure);
    }
    return finish(exit_code::kOk);
  }

  int reference() {
    const RunConfig& run = config_.run;
    const std::size_t m = run.reference_m > 0 ? run.reference_m : run.m_schedule.back();
    ReferenceSolution ref;
    try {
      ref = solve_reference(run.domain, run.q, m);
    } catch (const MonotonicityError& e) {
      err_ << "check failed: " << e.what() << "\n";
      return finish(exit_code::kCheckFailed, {{"check", "monotonicity"}, {"message", e.what()}});
    }
    writer().write_json("reference.json", reference_to_json(ref));
    writer().write("reference.csv", solution_csv(*ref.space, ref.xi, run.domain.dimension() == 1 ? 1001 : 101, "w"));
    out_ << "iterations " << ref.iterations << "  max " << format_number(ref.max_value) << "  fixed_point_change "
         << format_number(ref.fixed_point_change) << "\n";
    if (!ref.converged) {
      return finish(exit_code::kCheckFailed, {{"check", "reference_convergence"}, {"last_step", ref.last_step}});
    }
    return finish(exit_code::kOk);
  }

  static json failed_checks(const ConvergenceReport& report) {
    json failed = json::array();
    for (const auto& c : report.final_checks.checks) {
      if (!c.passed) {
        failed.push_back({{"check", c.name}, {"value", c.value}, {"tolerance", c.tolerance},
                          {"worst_point", {c.worst_point[0], c.worst_point[1]}}});
      }
    }
    if (!report.uniform_bound) failed.push_back({{"check", "uniform_bound"}});
    if (!report.positivity) failed.push_back({{"check", "positivity_propagation"}});
    return failed;
  }

  int pipeline() {
    require_lambda();
    certify_config(config_.run);
    log("running pipeline");
    const ConvergenceReport report = outer_limit(config_.run);
    auto& w = writer();
    w.write_json("convergence_report.json", convergence_to_json(report));
    for (const auto& rec : report.records) {
      w.write_json("records/n" + std::to_string(rec.n) + "_m" + std::to_string(rec.m) + ".json",
                   stage_record_to_json(rec, report.config));
    }
    w.write("convergence.csv", convergence_csv(report));
    const std::size_t samples = config_.run.domain.dimension() == 1 ? 1001 : 101;
    w.write("solution.csv", solution_csv(*report.final_space, report.final_solution.xi, samples));
    w.write("reference.csv", solution_csv(*report.reference.space, report.reference.xi, samples, "w"));
    for (const auto& flag : report.flags) log(flag);
    const json failed = failed_checks(report);
    out_ << "final strong residual " << format_number(report.final_strong_residual) << ", checks "
         << (failed.empty() ? "passed" : "failed") << "\n";
    if (!failed.empty()) {
      err_ << "check failed: " << failed.size() << " final check(s)\n";
      return finish(exit_code::kCheckFailed, {{"check", "verify_final"}, {"failures", failed}});
    }
    return finish(exit_code::kOk);
  }

  int sweep() {
    std::vector<double> lambdas;
    if (config_.lambda_grid) {
      lambdas = *config_.lambda_grid;
    } else if (config_.lambda_grid_fractions) {
      RunConfig probe = config_.run;
      const auto f = config_nonlinearity(probe);
      const double star = build_certificate(probe.domain, probe.q, f.certificate().p, f.certificate().C, 0.0,
                                            probe.embedding).lambda_star;
      for (double frac : *config_.lambda_grid_fractions) lambdas.push_back(frac * star);
    } else {
      throw ConfigError("config: sweep requires lambda_grid or lambda_grid_fractions");
    }
    std::ostringstream csv;
    csv << "lambda,status,h10_norm,min_v,residual,converged,message\n";
    auto& w = writer();
    bool any_failed = false;
    for (std::size_t i = 0; i < lambdas.size(); ++i) {
      RunConfig run = config_.run;
      run.lambda = lambdas[i];
      log("sweep row " + std::to_string(i) + ": lambda = " + format_number(run.lambda));
      try {
        const ConvergenceReport report = outer_limit(run);
        const bool ok = failed_checks(report).empty();
        any_failed = any_failed || !ok;
        w.write_json("rows/row" + std::to_string(i) + ".json", convergence_to_json(report));
        csv << format_number(run.lambda) << ',' << (ok ? "ok" : "check_failed") << ','
            << format_number(report.final_solution.h10_norm) << ',' << format_number(report.final_solution.min_value)
            << ',' << format_number(report.final_strong_residual) << ','
            << (report.final_solution.converged ? "true" : "false") << ",\n";
      } catch (const ConfigError& e) {
        any_failed = true;
        csv << format_number(run.lambda) << ",rejected,,,,false,\"" << e.what() << "\"\n";
      }
    }
    w.write("sweep.csv", csv.str());
    out_ << csv.str();
    if (any_failed) return finish(exit_code::kCheckFailed, {{"check", "sweep"}, {"message", "one or more rows failed"}});
    return finish(exit_code::kOk);
  }

  const CliCommand& cmd_;
  std::ostream& out_;
  std::ostream& err_;
  std::string started_;
  ConfigFile config_;
  std::optional<ArtifactWriter> writer_;
};

}  // namespace

int run_command(const CliCommand& cmd, std::ostream& out, std::ostream& err) {
  try {
    Session session(cmd, out, err);
    return session.run();
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return exit_code::kValidation;
  }
}

int run_cli(int argc, char** argv) {
  CLI::App app{"Galerkin solver for -Lap v = lambda v^q + f(v) with Dirichlet data"};
  app.require_subcommand(1);
  CliCommand cmd;
  std::string config;
  std::string output;
  std::uint64_t seed = 0;
  const std::pair<const char*, const char*> commands[] = {
      {"constants", "Print the solvability certificate (r, lambda*, rho, n*)"},
      {"verify-lemmas", "Check continuity and growth bounds of the approximations f_k"},
      {"solve", "Solve one Galerkin problem at fixed m and n"},
      {"reference", "Compute the positive solution of -Lap w = w^q"},
      {"pipeline", "Run the double limit m -> inf, n -> inf with final checks"},
      {"sweep", "Solve over a grid of lambda values"}};
  for (const auto& [name, help] : commands) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("-c,--config", config, "JSON configuration file")->required();
    sub->add_option("-o,--output", output, "Output directory");
    sub->add_option("-s,--seed", seed, "Override the configured seed");
    sub->add_flag("-v,--verbose", "Progress messages on stderr");
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? exit_code::kOk : exit_code::kValidation;
  }
  for (auto* sub : app.get_subcommands()) {
    cmd.command = sub->get_name();
    if (sub->count("--seed") > 0) cmd.seed = seed;
    cmd.verbosity = static_cast<int>(sub->count("--verbose"));
  }
  cmd.config = config;
  if (!output.empty()) cmd.output = output;
  return run_command(cmd, std::cout, std::cerr);
}

}  // namespace sublin
