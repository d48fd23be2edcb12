// SPDX-License-Identifier: Apache-2.0
//
// cran-sched: command-line front end for calibration, campaigns and sweeps.

#include <chrono>
#include <cstdint>
#include <exception>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <string_view>

#include <CLI11.hpp>

#include "cran/config.hpp"
#include "cran/harness.hpp"
#include "cran/io.hpp"

namespace {

namespace fs = std::filesystem;
using namespace cran;

struct Options {
  std::string config_path;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  std::optional<std::uint64_t> workers;
  bool to_stdout = false;
};

LogFn make_logger(Verbosity v) {
  if (v == Verbosity::Quiet) return {};
  return [](std::string_view msg) { std::cerr << "cran-sched: " << msg << '\n'; };
}

RunConfig load(const Options& opt) {
  RunConfig cfg = parse_config(opt.config_path);
  if (opt.seed) cfg.seed = *opt.seed;
  if (opt.workers) cfg.workers = *opt.workers;
  validate(cfg);
  return cfg;
}

double elapsed_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

int cmd_calibrate(const Options& opt) {
  const auto cfg = load(opt);
  const auto log = make_logger(cfg.verbosity);
  if (cfg.c_server) throw ConfigError("calibrate needs epsilon, but c_server is set");
  const auto t0 = std::chrono::steady_clock::now();
  const Scenario sc = build_scenario(cfg);
  const double c = calibrate_budget(sc, cfg.campaign(), cfg.calibration_trials, log);
  if (log) log("C_server = " + text::format_double(c) + " at epsilon = " + text::format_double(cfg.target_outage()));

  const fs::path dir(opt.out_dir);
  fs::create_directories(dir);
  io::write_atomic(dir / "calibration.csv", "epsilon,calibration_trials,c_server\n" +
                                                 text::format_double(cfg.target_outage()) + "," +
                                                 std::to_string(cfg.calibration_trials) + "," +
                                                 text::format_double(c) + "\n");
  auto m = io::manifest("calibrate", cfg);
  m["c_server"] = c;
  m["outputs"] = {"calibration.csv"};
  m["elapsed_seconds"] = elapsed_since(t0);
  io::write_manifest(dir, m);
  if (opt.to_stdout) std::cout << text::format_double(c) << '\n';
  return 0;
}

int cmd_run(const Options& opt) {
  const auto cfg = load(opt);
  const auto log = make_logger(cfg.verbosity);
  const auto t0 = std::chrono::steady_clock::now();
  const Scenario sc = build_scenario(cfg);
  const auto campaign = cfg.campaign();
  const double budget = resolve_budget(sc, campaign, log);
  if (log) log("C_server = " + text::format_double(budget) + "; running " + std::to_string(cfg.n_trials) + " trials");
  const auto result = run_campaign(sc, campaign, budget);
  for (const auto& s : result.summaries)
    if (log)
      log(std::string(scheduler_name(s.scheduler)) + ": mean sum-rate " + text::format_double(s.mean_sum_rate) +
          ", outage " + text::format_double(s.outage_rate));

  const fs::path dir(opt.out_dir);
  const auto files = io::write_campaign(dir, result, cfg.write_trials);
  auto m = io::manifest("run", cfg);
  m["c_server"] = budget;
  m["outputs"] = files;
  m["elapsed_seconds"] = elapsed_since(t0);
  io::write_manifest(dir, m);
  if (opt.to_stdout) std::cout << io::summary_csv(result);
  return 0;
}

template <typename SweepFn>
int run_sweep(const Options& opt, std::string_view command, std::string_view x_name, RunConfig cfg, SweepFn&& sweep) {
  const auto log = make_logger(cfg.verbosity);
  const auto t0 = std::chrono::steady_clock::now();
  const Scenario sc = build_scenario(cfg);
  const auto points = sweep(sc, cfg.campaign(), log);

  const fs::path dir(opt.out_dir);
  fs::create_directories(dir);
  nlohmann::ordered_json outputs = nlohmann::ordered_json::array();
  for (const auto& p : points) {
    const auto sub = std::string(x_name) + "_" + text::format_double(p.x);
    for (const auto& f : io::write_campaign(dir / sub, p.result, cfg.write_trials)) outputs.push_back(sub + "/" + f);
  }
  const auto table = io::sweep_csv(x_name, points);
  io::write_atomic(dir / "sweep.csv", table);
  outputs.push_back("sweep.csv");
  auto m = io::manifest(command, cfg);
  m["outputs"] = outputs;
  m["elapsed_seconds"] = elapsed_since(t0);
  io::write_manifest(dir, m);
  if (opt.to_stdout) std::cout << table;
  return 0;
}

int cmd_sweep_nc(const Options& opt) {
  auto cfg = load(opt);
  if (cfg.layout_file.empty() && !cfg.n_c) {
    std::uint64_t most = 10;
    for (auto v : cfg.nc_values) most = std::max(most, v);
    cfg.n_c = most;
  }
  std::vector<std::size_t> ncs(cfg.nc_values.begin(), cfg.nc_values.end());
  return run_sweep(opt, "sweep-nc", "n_c", cfg, [&](const Scenario& sc, const CampaignConfig& cc, const LogFn& log) {
    return sweep_nc(sc, cc, ncs, log);
  });
}

int cmd_sweep_lambda(const Options& opt) {
  const auto cfg = load(opt);
  return run_sweep(opt, "sweep-lambda", "lambda", cfg,
                   [&](const Scenario& sc, const CampaignConfig& cc, const LogFn& log) {
                     return sweep_lambda(sc, cc, cfg.lambda_values, cfg.reference_lambda, log);
                   });
}

int cmd_layout_gen(const Options& opt) {
  const auto cfg = load(opt);
  const Scenario sc = build_scenario(cfg);
  const fs::path dir(opt.out_dir);
  fs::create_directories(dir);
  const auto text = format_layout(sc.layout);
  io::write_atomic(dir / "layout.txt", text);
  std::string areas = "id,x_km,y_km,area_km2,centralized\n";
  std::vector<bool> central(sc.layout.size(), false);
  for (auto c : sc.layout.centralized) central[c] = true;
  for (std::size_t i = 0; i < sc.layout.size(); ++i)
    areas += std::to_string(sc.layout.bs_ids[i]) + "," + text::format_double(sc.layout.bs_positions[i].x) + "," +
             text::format_double(sc.layout.bs_positions[i].y) + "," + text::format_double(sc.geometry.areas[i]) +
             (central[i] ? ",1\n" : ",0\n");
  io::write_atomic(dir / "cells.csv", areas);
  auto m = io::manifest("layout-gen", cfg);
  m["outputs"] = {"layout.txt", "cells.csv"};
  io::write_manifest(dir, m);
  if (opt.to_stdout) std::cout << text;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Computationally aware uplink rate scheduling for centralized RAN"};
  app.set_version_flag("--version", CRAN_SCHED_VERSION);
  app.require_subcommand(1);

  Options opt;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", opt.config_path, "Configuration file (key = value)")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", opt.out_dir, "Output directory")->required();
    sub->add_option("--seed", opt.seed, "Override the master seed");
    sub->add_option("--workers", opt.workers, "Worker threads")->check(CLI::PositiveNumber);
    sub->add_flag("--stdout", opt.to_stdout, "Also print the main result to standard output");
  };

  struct Command {
    const char* name;
    const char* help;
    int (*fn)(const Options&);
  };
  const Command commands[] = {
      {"calibrate", "Calibrate C_server to the target computational outage", cmd_calibrate},
      {"run", "Run a campaign with every configured scheduler", cmd_run},
      {"sweep-nc", "Sweep the number of centrally processed cells", cmd_sweep_nc},
      {"sweep-lambda", "Sweep user density with a budget fixed at the reference density", cmd_sweep_lambda},
      {"layout-gen", "Write the configured base-station layout and cell areas", cmd_layout_gen},
  };
  std::vector<std::pair<CLI::App*, int (*)(const Options&)>> subs;
  for (const auto& c : commands) {
    auto* sub = app.add_subcommand(c.name, c.help);
    add_common(sub);
    subs.emplace_back(sub, c.fn);
  }

  CLI11_PARSE(app, argc, argv);

  try {
    for (const auto& [sub, fn] : subs)
      if (sub->parsed()) return fn(opt);
  } catch (const ConfigError& e) {
    std::cerr << "cran-sched: config error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "cran-sched: error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
