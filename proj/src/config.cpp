#include "sublin/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

namespace sublin {

using nlohmann::json;

namespace {

void allow_keys(const json& obj, const std::string& where, std::initializer_list<const char*> keys) {
  if (!obj.is_object()) throw ConfigError("config: " + where + " must be an object");
  const std::set<std::string> allowed(keys.begin(), keys.end());
  for (const auto& item : obj.items()) {
    if (!allowed.count(item.key())) {
      throw ConfigError("config: unknown key '" + item.key() + "' in " + where);
    }
  }
}

double number(const json& obj, const std::string& key, const std::string& where) {
  const auto& v = obj.at(key);
  if (!v.is_number()) throw ConfigError("config: " + where + "." + key + " must be a number");
  return v.get<double>();
}

long long integer(const json& v, const std::string& what) {
  if (!v.is_number_integer()) throw ConfigError("config: " + what + " must be an integer");
  return v.get<long long>();
}

std::vector<double> number_list(const json& v, const std::string& what) {
  if (!v.is_array()) throw ConfigError("config: " + what + " must be an array");
  std::vector<double> out;
  for (const auto& x : v) {
    if (!x.is_number()) throw ConfigError("config: " + what + " entries must be numbers");
    out.push_back(x.get<double>());
  }
  return out;
}

}  // namespace

ModelDomain parse_domain(const json& doc) {
  allow_keys(doc, "domain", {"kind", "L", "L1", "L2"});
  if (!doc.contains("kind") || !doc.at("kind").is_string()) {
    throw ConfigError("config: domain.kind must be \"interval\" or \"rectangle\"");
  }
  const auto kind = doc.at("kind").get<std::string>();
  try {
    if (kind == "interval") {
      const double L = doc.contains("L") ? number(doc, "L", "domain") : doc.contains("L1") ? number(doc, "L1", "domain") : 1.0;
      return ModelDomain::interval(L);
    }
    if (kind == "rectangle") {
      const double L1 = doc.contains("L1") ? number(doc, "L1", "domain") : 1.0;
      const double L2 = doc.contains("L2") ? number(doc, "L2", "domain") : 1.0;
      return ModelDomain::rectangle(L1, L2);
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  throw ConfigError("config: unknown domain kind '" + kind + "'");
}

json domain_to_json(const ModelDomain& domain) {
  if (domain.kind == ModelDomain::Kind::Interval) return {{"kind", "interval"}, {"L", domain.L1}};
  return {{"kind", "rectangle"}, {"L1", domain.L1}, {"L2", domain.L2}};
}

ConfigFile parse_config(const json& doc) {
  allow_keys(doc, "config",
             {"domain", "f", "q", "lambda", "lambda_fraction", "lambda_grid", "lambda_grid_fractions",
              "m_schedule", "n_schedule", "tolerances", "seed", "bump_probes", "reference_m", "parallel",
              "embedding", "lemmas", "solve"});
  ConfigFile out;
  out.source = doc;
  RunConfig& run = out.run;
  try {
    if (doc.contains("domain")) run.domain = parse_domain(doc.at("domain"));
    if (doc.contains("f")) {
      const auto& f = doc.at("f");
      allow_keys(f, "f", {"name", "p", "C", "truncation"});
      if (!f.contains("name") || !f.at("name").is_string()) throw ConfigError("config: f.name must be a string");
      run.f_name = f.at("name").get<std::string>();
      if (f.contains("p")) run.f_params.p = number(f, "p", "f");
      if (f.contains("C")) run.f_params.C = number(f, "C", "f");
      if (f.contains("truncation")) run.f_params.truncation = number(f, "truncation", "f");
    }
    if (doc.contains("q")) run.q = number(doc, "q", "config");
    if (doc.contains("lambda") && doc.contains("lambda_fraction")) {
      throw ConfigError("config: give either lambda or lambda_fraction, not both");
    }
    if (doc.contains("lambda")) {
      run.lambda = number(doc, "lambda", "config");
      out.lambda_given = true;
    }
    if (doc.contains("lambda_fraction")) out.lambda_fraction = number(doc, "lambda_fraction", "config");
    if (doc.contains("lambda_grid")) out.lambda_grid = number_list(doc.at("lambda_grid"), "lambda_grid");
    if (doc.contains("lambda_grid_fractions")) {
      out.lambda_grid_fractions = number_list(doc.at("lambda_grid_fractions"), "lambda_grid_fractions");
    }
    if (doc.contains("m_schedule")) {
      const auto& ms = doc.at("m_schedule");
      if (!ms.is_array()) throw ConfigError("config: m_schedule must be an array");
      run.m_schedule.clear();
      for (const auto& x : ms) {
        const long long m = integer(x, "m_schedule entry");
        if (m < 1) throw ConfigError("config: m_schedule entries must be >= 1");
        run.m_schedule.push_back(static_cast<std::size_t>(m));
      }
    }
    if (doc.contains("n_schedule")) {
      const auto& ns = doc.at("n_schedule");
      if (!ns.is_array()) throw ConfigError("config: n_schedule must be an array");
      run.n_schedule.clear();
      for (const auto& x : ns) run.n_schedule.push_back(integer(x, "n_schedule entry"));
    }
    if (doc.contains("tolerances")) {
      const auto& t = doc.at("tolerances");
      allow_keys(t, "tolerances",
                 {"solver", "inner_limit", "outer_l1", "residual", "positivity", "boundary", "distributional"});
      if (t.contains("solver")) run.solver_tolerance = number(t, "solver", "tolerances");
      if (t.contains("inner_limit")) run.inner_limit_tolerance = number(t, "inner_limit", "tolerances");
      if (t.contains("outer_l1")) run.outer_l1_tolerance = number(t, "outer_l1", "tolerances");
      if (t.contains("residual")) run.residual_tolerance = number(t, "residual", "tolerances");
      if (t.contains("positivity")) run.positivity_tolerance = number(t, "positivity", "tolerances");
      if (t.contains("boundary")) run.boundary_tolerance = number(t, "boundary", "tolerances");
      if (t.contains("distributional")) run.distributional_tolerance = number(t, "distributional", "tolerances");
    }
    if (doc.contains("seed")) {
      const long long seed = integer(doc.at("seed"), "seed");
      if (seed < 0) throw ConfigError("config: seed must be non-negative");
      run.seed = static_cast<std::uint64_t>(seed);
    }
    if (doc.contains("bump_probes")) run.bump_probes = static_cast<int>(integer(doc.at("bump_probes"), "bump_probes"));
    if (doc.contains("reference_m")) {
      const long long m = integer(doc.at("reference_m"), "reference_m");
      if (m < 0) throw ConfigError("config: reference_m must be non-negative");
      run.reference_m = static_cast<std::size_t>(m);
    }
    if (doc.contains("parallel")) {
      if (!doc.at("parallel").is_boolean()) throw ConfigError("config: parallel must be a boolean");
      run.parallel = doc.at("parallel").get<bool>();
    }
    if (doc.contains("embedding")) {
      const auto& e = doc.at("embedding");
      allow_keys(e, "embedding", {"rectangle_modes", "rectangle_starts", "rectangle_safety"});
      if (e.contains("rectangle_modes")) {
        const long long v = integer(e.at("rectangle_modes"), "embedding.rectangle_modes");
        if (v < 1) throw ConfigError("config: embedding.rectangle_modes must be >= 1");
        run.embedding.rectangle_modes = static_cast<std::size_t>(v);
      }
      if (e.contains("rectangle_starts")) {
        run.embedding.rectangle_starts = static_cast<int>(integer(e.at("rectangle_starts"), "embedding.rectangle_starts"));
      }
      if (e.contains("rectangle_safety")) run.embedding.rectangle_safety = number(e, "rectangle_safety", "embedding");
    }
    if (doc.contains("lemmas")) {
      const auto& l = doc.at("lemmas");
      allow_keys(l, "lemmas", {"k_max", "grid_points", "uniform_range"});
      if (l.contains("k_max")) out.lemmas.k_max = static_cast<int>(integer(l.at("k_max"), "lemmas.k_max"));
      if (l.contains("grid_points")) {
        const long long g = integer(l.at("grid_points"), "lemmas.grid_points");
        if (g < 2) throw ConfigError("config: lemmas.grid_points must be >= 2");
        out.lemmas.grid_points = static_cast<std::size_t>(g);
      }
      if (l.contains("uniform_range")) out.lemmas.uniform_range = number(l, "uniform_range", "lemmas");
      if (out.lemmas.k_max < 1) throw ConfigError("config: lemmas.k_max must be >= 1");
    }
    if (doc.contains("solve")) {
      const auto& s = doc.at("solve");
      allow_keys(s, "solve", {"n", "m", "probes", "sphere_trials"});
      if (s.contains("n")) {
        out.solve.n = integer(s.at("n"), "solve.n");
        if (*out.solve.n < 1) throw ConfigError("config: solve.n must be >= 1");
      }
      if (s.contains("m")) {
        const long long m = integer(s.at("m"), "solve.m");
        if (m < 1) throw ConfigError("config: solve.m must be >= 1");
        out.solve.m = static_cast<std::size_t>(m);
      }
      if (s.contains("probes")) out.solve.probes = static_cast<int>(integer(s.at("probes"), "solve.probes"));
      if (s.contains("sphere_trials")) {
        out.solve.sphere_trials = static_cast<int>(integer(s.at("sphere_trials"), "solve.sphere_trials"));
      }
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  validate_config(run);
  if (out.lambda_fraction && !(*out.lambda_fraction >= 0.0)) {
    throw ConfigError("config: lambda_fraction must be non-negative");
  }
  return out;
}

ConfigFile load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open config file '" + path.string() + "'");
  json doc;
  try {
    in >> doc;
  } catch (const json::parse_error& e) {
    throw ConfigError("config: '" + path.string() + "' is not valid JSON: " + e.what());
  }
  return parse_config(doc);
}

void resolve_lambda(ConfigFile& config) {
  if (!config.lambda_fraction) return;
  RunConfig probe = config.run;
  probe.lambda = 0.0;
  const auto f = config_nonlinearity(probe);
  const auto cert = build_certificate(probe.domain, probe.q, f.certificate().p, f.certificate().C, 0.0,
                                      probe.embedding);
  config.run.lambda = *config.lambda_fraction * cert.lambda_star;
  config.lambda_given = true;
}

json config_to_json(const RunConfig& c) {
  json f = {{"name", c.f_name}, {"p", c.f_params.p}, {"C", c.f_params.C}};
  if (c.f_name == "truncated_power" || c.f_name == "truncated-power") f["truncation"] = c.f_params.truncation;
  return {
      {"domain", domain_to_json(c.domain)},
      {"f", f},
      {"q", c.q},
      {"lambda", c.lambda},
      {"m_schedule", c.m_schedule},
      {"n_schedule", c.n_schedule},
      {"tolerances",
       {{"solver", c.solver_tolerance},
        {"inner_limit", c.inner_limit_tolerance},
        {"outer_l1", c.outer_l1_tolerance},
        {"residual", c.residual_tolerance},
        {"positivity", c.positivity_tolerance},
        {"boundary", c.boundary_tolerance},
        {"distributional", c.distributional_tolerance}}},
      {"bump_probes", c.bump_probes},
      {"reference_m", c.reference_m},
      {"seed", c.seed},
      {"embedding",
       {{"rectangle_modes", c.embedding.rectangle_modes},
        {"rectangle_starts", c.embedding.rectangle_starts},
        {"rectangle_safety", c.embedding.rectangle_safety}}},
  };
}

}  // namespace sublin
