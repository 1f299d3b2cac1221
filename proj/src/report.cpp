#include "lab/report.hpp"

#include <cmath>
#include <fstream>

#include "lab/common.hpp"

namespace lab {

namespace {

using nlohmann::json;

void expect_object(const json& j, const std::string& ctx) {
  if (!j.is_object())
    throw ConfigError("config: " + ctx + ": expected an object");
}

void reject_unknown(const json& j, const std::string& ctx,
                    std::initializer_list<const char*> allowed) {
  for (const auto& item : j.items()) {
    bool known = false;
    for (const char* key : allowed) {
      if (item.key() == key) {
        known = true;
        break;
      }
    }
    if (!known)
      throw ConfigError("config: unknown key '" + ctx + "." + item.key() + "'");
  }
}

template <typename T>
void load_number(const json& j, const std::string& ctx, const char* key,
                 T& out) {
  if (!j.contains(key)) return;
  const json& v = j.at(key);
  if (!v.is_number())
    throw ConfigError("config: " + ctx + "." + key + ": expected a number");
  double d = v.get<double>();
  if constexpr (std::is_integral_v<T>) {
    if (d < 0 || std::floor(d) != d)
      throw ConfigError("config: " + ctx + "." + key +
                        ": expected a non-negative integer");
    out = v.get<T>();
  } else {
    out = static_cast<T>(d);
  }
}

void load_bool(const json& j, const std::string& ctx, const char* key,
               bool& out) {
  if (!j.contains(key)) return;
  if (!j.at(key).is_boolean())
    throw ConfigError("config: " + ctx + "." + key + ": expected a boolean");
  out = j.at(key).get<bool>();
}

void load_string(const json& j, const std::string& ctx, const char* key,
                 std::string& out) {
  if (!j.contains(key)) return;
  if (!j.at(key).is_string())
    throw ConfigError("config: " + ctx + "." + key + ": expected a string");
  out = j.at(key).get<std::string>();
}

RhsMode rhs_mode_from_string(const std::string& s) {
  if (s == "uniform") return RhsMode::Uniform;
  if (s == "delta-biased") return RhsMode::DeltaBiased;
  throw ConfigError("config: ensemble.b_mode: expected 'uniform' or 'delta-biased'");
}

std::string to_string(RhsMode mode) {
  return mode == RhsMode::Uniform ? "uniform" : "delta-biased";
}

KMode k_mode_from_string(const std::string& s) {
  if (s == "uniform") return KMode::Uniform;
  if (s == "fixed") return KMode::Fixed;
  throw ConfigError("config: ensemble.k_mode: expected 'uniform' or 'fixed'");
}

std::string to_string(KMode mode) {
  return mode == KMode::Uniform ? "uniform" : "fixed";
}

}  // namespace

uint32_t LabConfig::resolved_radius() const {
  if (radius != 0) return radius;
  long r = std::lround(ensemble.c3 * std::log2(double(ensemble.m)));
  return r < 1 ? 1 : static_cast<uint32_t>(r);
}

ErmParams LabConfig::erm_params() const {
  ErmParams p;
  p.train_fraction = train_fraction;
  p.split_seed = split_seed;
  p.sym = wrapper;
  p.sils = sils;
  return p;
}

LabConfig LabConfig::from_json(const nlohmann::json& j) {
  expect_object(j, "<root>");
  reject_unknown(j, "<root>",
                 {"ensemble", "sils", "wrapper", "union_bound", "decoder",
                  "radius", "trials", "tuples", "seed", "workers", "out"});
  LabConfig cfg;

  if (j.contains("ensemble")) {
    const json& e = j.at("ensemble");
    expect_object(e, "ensemble");
    reject_unknown(e, "ensemble",
                   {"m", "alpha", "c1", "c2", "c3", "c4", "b_mode", "k_mode",
                    "max_trials", "coset_dim_budget"});
    load_number(e, "ensemble", "m", cfg.ensemble.m);
    load_number(e, "ensemble", "alpha", cfg.ensemble.alpha);
    load_number(e, "ensemble", "c1", cfg.ensemble.c1);
    load_number(e, "ensemble", "c2", cfg.ensemble.c2);
    load_number(e, "ensemble", "c3", cfg.ensemble.c3);
    load_number(e, "ensemble", "c4", cfg.ensemble.c4);
    load_number(e, "ensemble", "max_trials", cfg.ensemble.max_trials);
    load_number(e, "ensemble", "coset_dim_budget",
                cfg.ensemble.coset_dim_budget);
    std::string mode;
    load_string(e, "ensemble", "b_mode", mode);
    if (!mode.empty()) cfg.ensemble.b_mode = rhs_mode_from_string(mode);
    mode.clear();
    load_string(e, "ensemble", "k_mode", mode);
    if (!mode.empty()) cfg.ensemble.k_mode = k_mode_from_string(mode);
    cfg.ensemble.validate();
  }

  if (j.contains("sils")) {
    const json& s = j.at("sils");
    expect_object(s, "sils");
    reject_unknown(s, "sils",
                   {"c_z", "rho", "hash_seed", "sign_sensitive_probe",
                    "zero_features"});
    load_number(s, "sils", "c_z", cfg.sils.c_z);
    load_number(s, "sils", "rho", cfg.sils.rho);
    load_number(s, "sils", "hash_seed", cfg.sils.hash_seed);
    load_bool(s, "sils", "sign_sensitive_probe", cfg.sils.sign_sensitive_probe);
    load_bool(s, "sils", "zero_features", cfg.sils.zero_features);
    cfg.sils.validate();
  }

  if (j.contains("wrapper")) {
    const json& w = j.at("wrapper");
    expect_object(w, "wrapper");
    reject_unknown(w, "wrapper",
                   {"s", "kappa", "seed", "backmap", "train_fraction",
                    "split_seed"});
    load_number(w, "wrapper", "s", cfg.wrapper.s);
    load_number(w, "wrapper", "kappa", cfg.wrapper.kappa);
    load_number(w, "wrapper", "seed", cfg.wrapper.seed);
    std::string mode;
    load_string(w, "wrapper", "backmap", mode);
    if (!mode.empty()) cfg.wrapper.backmap = backmap_from_string(mode);
    load_number(w, "wrapper", "train_fraction", cfg.train_fraction);
    load_number(w, "wrapper", "split_seed", cfg.split_seed);
    if (!(cfg.train_fraction > 0.0) || !(cfg.train_fraction < 1.0))
      throw ConfigError(
          "config: wrapper.train_fraction: must lie strictly inside (0, 1)");
  }

  if (j.contains("union_bound")) {
    const json& u = j.at("union_bound");
    expect_object(u, "union_bound");
    reject_unknown(u, "union_bound", {"delta", "gamma", "eps_hat", "eta"});
    load_number(u, "union_bound", "delta", cfg.union_bound.delta);
    load_number(u, "union_bound", "gamma", cfg.union_bound.gamma);
    load_number(u, "union_bound", "eps_hat", cfg.union_bound.eps_hat);
    load_number(u, "union_bound", "eta", cfg.union_bound.eta);
    if (!(cfg.union_bound.gamma > 0.0) || cfg.union_bound.gamma > 1.0)
      throw ConfigError("config: union_bound.gamma: must lie in (0, 1]");
  }

  load_string(j, "<root>", "decoder", cfg.decoder);
  load_number(j, "<root>", "radius", cfg.radius);
  load_number(j, "<root>", "trials", cfg.trials);
  load_number(j, "<root>", "tuples", cfg.tuples);
  load_number(j, "<root>", "seed", cfg.seed);
  load_number(j, "<root>", "workers", cfg.workers);
  load_string(j, "<root>", "out", cfg.out_path);
  if (cfg.workers == 0)
    throw ConfigError("config: workers: must be at least 1");
  return cfg;
}

LabConfig LabConfig::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open file '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("config: invalid JSON in '" + path + "': " + e.what());
  }
  return from_json(j);
}

nlohmann::json LabConfig::to_json() const {
  nlohmann::json j;
  j["ensemble"] = {{"m", ensemble.m},
                   {"alpha", ensemble.alpha},
                   {"c1", ensemble.c1},
                   {"c2", ensemble.c2},
                   {"c3", ensemble.c3},
                   {"c4", ensemble.c4},
                   {"b_mode", to_string(ensemble.b_mode)},
                   {"k_mode", to_string(ensemble.k_mode)},
                   {"max_trials", ensemble.max_trials},
                   {"coset_dim_budget", ensemble.coset_dim_budget}};
  j["sils"] = {{"c_z", sils.c_z},
               {"rho", sils.rho},
               {"hash_seed", sils.hash_seed},
               {"sign_sensitive_probe", sils.sign_sensitive_probe},
               {"zero_features", sils.zero_features}};
  j["wrapper"] = {{"s", wrapper.s},
                  {"kappa", wrapper.kappa},
                  {"seed", wrapper.seed},
                  {"backmap", lab::to_string(wrapper.backmap)},
                  {"train_fraction", train_fraction},
                  {"split_seed", split_seed}};
  j["union_bound"] = {{"delta", union_bound.delta},
                      {"gamma", union_bound.gamma},
                      {"eps_hat", union_bound.eps_hat},
                      {"eta", union_bound.eta}};
  j["decoder"] = decoder;
  j["radius"] = radius;
  j["trials"] = trials;
  j["tuples"] = tuples;
  j["seed"] = seed;
  j["workers"] = workers;
  j["out"] = out_path;
  return j;
}

void Report::add(const std::string& name, bool pass_flag,
                 const std::string& detail) {
  assertions.push_back({name, pass_flag, detail});
}

bool Report::pass() const {
  for (const auto& a : assertions) {
    if (!a.pass) return false;
  }
  return true;
}

nlohmann::json Report::to_json() const {
  nlohmann::json j;
  j["schema_version"] = kReportSchemaVersion;
  j["artifact_version"] = kArtifactVersion;
  j["subcommand"] = subcommand;
  j["config"] = config;
  nlohmann::json asserts = nlohmann::json::array();
  for (const auto& a : assertions) {
    asserts.push_back(
        {{"name", a.name}, {"pass", a.pass}, {"detail", a.detail}});
  }
  j["summary"] = {{"pass", pass()}, {"assertions", std::move(asserts)}};
  j["body"] = body;
  j["meta"] = {{"wall_clock_ms", wall_clock_ms}};
  return j;
}

std::string Report::deterministic_dump() const {
  nlohmann::json j = to_json();
  j.erase("meta");
  return j.dump(2);
}

std::vector<std::string> validate_report_shape(const nlohmann::json& j) {
  std::vector<std::string> issues;
  auto need = [&](const char* key, bool ok) {
    if (!ok) issues.push_back(std::string("missing or mistyped field: ") + key);
  };
  if (!j.is_object()) {
    issues.push_back("report is not a JSON object");
    return issues;
  }
  need("schema_version",
       j.contains("schema_version") && j["schema_version"].is_number_integer());
  need("artifact_version",
       j.contains("artifact_version") && j["artifact_version"].is_string());
  need("subcommand", j.contains("subcommand") && j["subcommand"].is_string());
  need("config", j.contains("config") && j["config"].is_object());
  need("body", j.contains("body") && j["body"].is_object());
  need("meta", j.contains("meta") && j["meta"].is_object() &&
                   j["meta"].contains("wall_clock_ms") &&
                   j["meta"]["wall_clock_ms"].is_number());
  if (j.contains("summary") && j["summary"].is_object() &&
      j["summary"].contains("pass") && j["summary"]["pass"].is_boolean() &&
      j["summary"].contains("assertions") &&
      j["summary"]["assertions"].is_array()) {
    for (const auto& a : j["summary"]["assertions"]) {
      if (!a.is_object() || !a.contains("name") || !a["name"].is_string() ||
          !a.contains("pass") || !a["pass"].is_boolean()) {
        issues.push_back("summary.assertions entries need string name + bool pass");
        break;
      }
    }
  } else {
    issues.push_back("missing or mistyped field: summary");
  }
  return issues;
}

uint64_t experiment_seed(uint64_t master_seed, const std::string& subcommand) {
  return mix64(master_seed ^ fnv1a(subcommand));
}

}  // namespace lab
