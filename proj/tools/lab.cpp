// Command-line front end: one subcommand per experiment plus `selftest`,
// which runs the full acceptance suite. Exit codes: 0 all assertions pass,
// 1 assertion failure, 2 configuration error, 3 resource budget exceeded.

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "lab/acceptance.hpp"
#include "lab/common.hpp"
#include "lab/experiments.hpp"
#include "lab/report.hpp"
#include "lab/symmetry.hpp"

namespace {

struct Overrides {
  std::string config_path;
  std::string out_path;
  std::string decoder;
  std::string backmap;
  std::string k_mode;
  uint64_t seed = 0;
  uint64_t trials = 0;
  uint64_t tuples = 0;
  uint32_t workers = 0;
  uint32_t m = 0;
  double alpha = 0.0;
  uint32_t radius = 0;
  bool print_json = false;
};

void add_common_options(CLI::App& app, Overrides& ov,
                        std::vector<CLI::Option*>& opts) {
  opts.push_back(app.add_option("--config", ov.config_path,
                                "JSON configuration file"));
  opts.push_back(app.add_option("--seed", ov.seed, "master seed"));
  opts.push_back(app.add_option("--workers", ov.workers, "worker threads"));
  opts.push_back(app.add_option("--trials", ov.trials,
                                "main repetition count (0 = default)"));
  opts.push_back(app.add_option("--tuples", ov.tuples,
                                "secondary repetition count (0 = default)"));
  opts.push_back(
      app.add_option("--decoder", ov.decoder,
                     "decoder name: const0|xor-rule|sils-rule|plugin|oracle-sr"));
  opts.push_back(app.add_option("--backmap", ov.backmap,
                                "backmap mode: coordinate|vvlabel"));
  opts.push_back(
      app.add_option("--k-mode", ov.k_mode, "row count mode: uniform|fixed"));
  opts.push_back(app.add_option("--m", ov.m, "variables per block"));
  opts.push_back(app.add_option("--alpha", ov.alpha, "clause density"));
  opts.push_back(app.add_option("--radius", ov.radius,
                                "neighborhood radius (0 = derive)"));
  opts.push_back(app.add_option("--out", ov.out_path, "report output path"));
  opts.push_back(
      app.add_flag("--print", ov.print_json, "dump the report JSON to stdout"));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"seeded laboratory for masked unique-SAT block ensembles"};
  app.require_subcommand(1);

  Overrides ov;
  std::vector<CLI::Option*> opts;
  add_common_options(app, ov, opts);

  const struct {
    const char* name;
    const char* help;
  } kSubs[] = {
      {"sample", "draw on-promise blocks and audit witnesses"},
      {"neutrality", "witness-bit balance inside sketch buckets"},
      {"sparsify", "per-coordinate view groups and chart masses"},
      {"treelike", "neighborhood tree fractions across block widths"},
      {"isolate", "unique-solution rate of random parity layers"},
      {"switch", "sign-flip averaging versus the bare decoder"},
      {"success", "per-block success independence and product bound"},
      {"codec", "round-trip and budget audit of both codecs"},
      {"clash", "description-length curves: exact versus local decoding"},
      {"selftest", "run the full acceptance suite"},
  };
  for (const auto& s : kSubs) {
    CLI::App* sub = app.add_subcommand(s.name, s.help);
    sub->fallthrough();
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    lab::LabConfig cfg = ov.config_path.empty()
                             ? lab::LabConfig{}
                             : lab::LabConfig::from_file(ov.config_path);
    auto given = [&](size_t idx) { return opts[idx]->count() > 0; };
    if (given(1)) cfg.seed = ov.seed;
    if (given(2)) cfg.workers = ov.workers;
    if (given(3)) cfg.trials = ov.trials;
    if (given(4)) cfg.tuples = ov.tuples;
    if (given(5)) cfg.decoder = ov.decoder;
    if (given(6)) cfg.wrapper.backmap = lab::backmap_from_string(ov.backmap);
    if (given(7)) {
      if (ov.k_mode == "uniform") cfg.ensemble.k_mode = lab::KMode::Uniform;
      else if (ov.k_mode == "fixed") cfg.ensemble.k_mode = lab::KMode::Fixed;
      else throw lab::ConfigError("--k-mode must be uniform or fixed");
    }
    if (given(8)) cfg.ensemble.m = ov.m;
    if (given(9)) cfg.ensemble.alpha = ov.alpha;
    if (given(10)) cfg.radius = ov.radius;
    if (given(11)) cfg.out_path = ov.out_path;
    if (cfg.workers == 0) cfg.workers = 1;

    const std::string sub = app.get_subcommands().front()->get_name();

    if (sub == "selftest") {
      auto results = lab::run_acceptance(cfg.seed, cfg.workers);
      bool all = true;
      for (const auto& r : results) {
        std::cout << lab::format_criterion(r) << "\n";
        all = all && r.pass;
      }
      std::cout << "acceptance: "
                << std::count_if(results.begin(), results.end(),
                                 [](const auto& r) { return r.pass; })
                << "/" << results.size() << (all ? " PASS" : " FAIL") << "\n";
      return all ? 0 : 1;
    }

    lab::Report rep = lab::run_experiment(sub, cfg);
    for (const auto& a : rep.assertions) {
      std::cout << (a.pass ? "[PASS] " : "[FAIL] ") << a.name;
      if (!a.detail.empty()) std::cout << ": " << a.detail;
      std::cout << "\n";
    }
    std::cout << sub << ": " << (rep.pass() ? "PASS" : "FAIL") << " ("
              << rep.wall_clock_ms / 1000.0 << "s, seed " << cfg.seed << ")\n";
    if (!cfg.out_path.empty()) {
      std::ofstream out(cfg.out_path);
      if (!out) throw lab::ConfigError("cannot open output path " + cfg.out_path);
      out << rep.to_json().dump(2) << "\n";
      std::cout << "report written to " << cfg.out_path << "\n";
    }
    if (ov.print_json) std::cout << rep.to_json().dump(2) << "\n";
    return rep.pass() ? 0 : 1;
  } catch (const lab::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const lab::BudgetError& e) {
    std::cerr << "budget exceeded: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
