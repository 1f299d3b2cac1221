#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"
#include "lab/ensemble.hpp"
#include "lab/sils.hpp"
#include "lab/wrappers.hpp"

namespace lab {

// Union-bound curve inputs; zeros select the documented defaults
// delta = gamma/8 and eta = gamma/4.
struct UnionBoundConfig {
  double delta = 0.0;
  double gamma = 0.5;
  double eps_hat = 0.0;
  double eta = 0.0;

  double resolved_delta() const { return delta > 0.0 ? delta : gamma / 8.0; }
  double resolved_eta() const { return eta > 0.0 ? eta : gamma / 4.0; }
};

// Everything an experiment run reads: ensemble and sketch parameters, wrapper
// settings, decoder selection, trial counts, seed, and output path. Parsed
// strictly — unknown or mistyped keys raise ConfigError with the field path.
struct LabConfig {
  EnsembleParams ensemble;
  SilsSpec sils;
  SymWrapParams wrapper;
  double train_fraction = 0.5;
  uint64_t split_seed = 7;
  UnionBoundConfig union_bound;
  std::string decoder = "xor-rule";
  uint32_t radius = 0;   // 0 = derive from ensemble.c3
  uint64_t trials = 0;   // 0 = per-experiment default
  uint64_t tuples = 0;   // 0 = per-experiment default
  uint64_t seed = 1;
  uint32_t workers = 1;
  std::string out_path;

  uint32_t resolved_radius() const;
  ErmParams erm_params() const;

  static LabConfig from_json(const nlohmann::json& j);
  static LabConfig from_file(const std::string& path);
  nlohmann::json to_json() const;
};

struct Assertion {
  std::string name;
  bool pass = false;
  std::string detail;
};

// Self-describing experiment output. Everything except `meta` is a pure
// function of (config, seed, artifact version); meta carries wall-clock
// time and is excluded from the determinism contract.
struct Report {
  std::string subcommand;
  nlohmann::json config;
  nlohmann::json body = nlohmann::json::object();
  std::vector<Assertion> assertions;
  double wall_clock_ms = 0.0;

  void add(const std::string& name, bool pass, const std::string& detail = "");
  bool pass() const;

  nlohmann::json to_json() const;
  // The byte-identity surface: the full report minus meta, indent-2 dump.
  std::string deterministic_dump() const;
};

// Structural check against the published report schema
// (docs/report.schema.json). Returns a list of violations; empty = valid.
std::vector<std::string> validate_report_shape(const nlohmann::json& j);

// Deterministic per-experiment seed: mixes the master seed with the
// subcommand name so distinct experiments never share substreams.
uint64_t experiment_seed(uint64_t master_seed, const std::string& subcommand);

}  // namespace lab
