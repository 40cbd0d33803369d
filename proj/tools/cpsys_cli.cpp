// Experiment runner: reproducible theorem-verification runs with CSV/JSON
// outputs. Exit codes: 0 = all thresholds met, 2 = a threshold was violated,
// 1 = error.
#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>

#include "cpsys/experiments.hpp"
#include "cpsys/fixtures.hpp"
#include "cpsys/serialization.hpp"

using namespace cpsys;

int main(int argc, char** argv) {
  CLI::App app{"exact-plus-numeric engine for Hermitian metrics on complex projective space"};
  app.require_subcommand(1);

  ExperimentConfig cfg;
  std::string config_file;
  auto* run = app.add_subcommand("run", "run a registered experiment");
  run->add_option("--experiment", cfg.name, "one of the registered experiment names");
  run->add_option("--config", config_file, "JSON config file (flags override)");
  run->add_option("--n", cfg.n, "projective dimension (2 or 3)");
  run->add_option("--degree", cfg.degree, "truncation degree");
  run->add_option("--seed", cfg.seed, "rng seed");
  run->add_option("--mode", cfg.mode, "exact or float");
  run->add_option("--t", cfg.t_values, "path parameters for trajectory experiments");
  run->add_option("--sigma-samples", cfg.sigma_samples, "number of sampled equators");
  run->add_option("--out", cfg.out_dir, "output directory");

  std::string fixtures_out = "data/fixtures";
  auto* fxcmd = app.add_subcommand("fixtures", "write the standard metric fixtures as JSON");
  fxcmd->add_option("--out", fixtures_out, "output directory");
  int fx_n = 2;
  fxcmd->add_option("--n", fx_n, "projective dimension");

  auto* list = app.add_subcommand("list", "list registered experiments");

  CLI11_PARSE(app, argc, argv);

  try {
    if (list->parsed()) {
      for (const auto& name : experiment_names()) std::cout << name << "\n";
      return 0;
    }
    if (fxcmd->parsed()) {
      std::filesystem::create_directories(fixtures_out);
      for (const auto& fx : standard_fixtures(fx_n)) {
        std::ofstream out(fixtures_out + "/" + fx.name + "_n" + std::to_string(fx_n) + ".json");
        out << fixture_to_json(fx).dump(2) << "\n";
      }
      return 0;
    }
    if (!config_file.empty()) {
      std::ifstream in(config_file);
      if (!in.good()) {
        std::cerr << "error: cannot read config file " << config_file << "\n";
        return 1;
      }
      json j;
      in >> j;
      ExperimentConfig file_cfg;
      file_cfg.name = j.value("experiment", j.value("name", cfg.name));
      file_cfg.n = j.value("n", cfg.n);
      file_cfg.degree = j.value("degree", cfg.degree);
      file_cfg.seed = j.value("seed", cfg.seed);
      file_cfg.mode = j.value("mode", cfg.mode);
      if (j.contains("t_values")) file_cfg.t_values = j["t_values"].get<std::vector<double>>();
      file_cfg.sigma_samples = j.value("sigma_samples", cfg.sigma_samples);
      file_cfg.out_dir = j.value("out", cfg.out_dir);
      // explicit flags win
      for (const auto* opt : run->get_options())
        if (opt->count() == 0) continue;
      if (run->get_option("--experiment")->count() == 0) cfg.name = file_cfg.name;
      if (run->get_option("--n")->count() == 0) cfg.n = file_cfg.n;
      if (run->get_option("--degree")->count() == 0) cfg.degree = file_cfg.degree;
      if (run->get_option("--seed")->count() == 0) cfg.seed = file_cfg.seed;
      if (run->get_option("--mode")->count() == 0) cfg.mode = file_cfg.mode;
      if (run->get_option("--t")->count() == 0) cfg.t_values = file_cfg.t_values;
      if (run->get_option("--sigma-samples")->count() == 0) cfg.sigma_samples = file_cfg.sigma_samples;
      if (run->get_option("--out")->count() == 0) cfg.out_dir = file_cfg.out_dir;
    }
    if (cfg.name.empty()) {
      std::cerr << "error: --experiment NAME (or a config file) is required\n";
      return 1;
    }
    int rc = run_experiment(cfg);
    std::cout << (rc == 0 ? "PASS" : "THRESHOLD VIOLATED") << ": " << cfg.name << " -> "
              << cfg.out_dir << "/" << cfg.name << ".{csv,json}\n";
    return rc;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
