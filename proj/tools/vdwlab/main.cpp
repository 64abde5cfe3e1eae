#include "acceptance.hpp"
#include "config.hpp"
#include "runner.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

int main(int argc, char** argv) {
  CLI::App app{"vdwlab: van der Waals interaction energies on grid models"};
  app.require_subcommand(1);

  std::string config_path;
  std::size_t jobs = 1;
  std::optional<std::uint64_t> seed;
  std::string out_dir = "results";
  CLI::App* run = app.add_subcommand("run", "run the scenarios of a config file");
  run->add_option("config", config_path, "JSON config")->required();
  run->add_option("--jobs,-j", jobs, "scenarios run in parallel")->check(CLI::Range(1, 256));
  run->add_option("--seed", seed, "seed for every solver and sampler (overrides the config)");
  run->add_option("--out", out_dir, "output directory");

  std::vector<int> only;
  CLI::App* verify = app.add_subcommand("verify", "run the acceptance suite");
  verify->add_option("--only", only, "criterion numbers to run")->check(CLI::Range(1, 11));

  CLI11_PARSE(app, argc, argv);

  if (*verify) {
    bool all = true;
    vdw::acceptance::run(only, [&](const vdw::acceptance::CriterionResult& r) {
      std::cout << vdw::acceptance::format(r) << std::endl;
      all = all && r.passed;
    });
    return all ? 0 : 1;
  }

  std::string text;
  {
    std::ifstream in(config_path, std::ios::binary);
    if (!in) {
      std::cerr << "vdwlab: cannot read " << config_path << "\n";
      return 2;
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    text = ss.str();
  }
  vdw::cli::RunConfig cfg;
  try {
    cfg = vdw::cli::parse_config(text, config_path);
  } catch (const vdw::ConfigError& e) {
    std::cerr << "vdwlab: " << e.what() << "\n";
    return 2;
  }
  if (seed) vdw::cli::apply_seed(cfg, *seed);

  vdw::cli::RunOptions opt;
  opt.out_dir = out_dir;
  opt.jobs = jobs;
  opt.config_path = config_path;
  opt.config_text = text;
  try {
    return vdw::cli::run_scenarios(cfg, opt, std::cout);
  } catch (const std::exception& e) {
    std::cerr << "vdwlab: " << e.what() << "\n";
    return 1;
  }
}
