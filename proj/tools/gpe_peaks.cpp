// gpe-peaks: run, validate and inspect ground-state experiments.

#include <cstdlib>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "gpe_peaks/config.hpp"
#include "gpe_peaks/runner.hpp"

namespace {

int default_threads() {
  if (const char* env = std::getenv("GPE_PEAKS_THREADS")) {
    try {
      const int t = std::stoi(env);
      if (t > 0) return t;
    } catch (const std::exception&) {
    }
    std::cerr << "ignoring invalid GPE_PEAKS_THREADS=" << env << "\n";
  }
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Ground states of coupled Gross-Pitaevskii systems"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  bool overwrite = false;
  int threads = default_threads();
  auto* run = app.add_subcommand("run", "run an experiment config");
  run->add_option("config", config_path, "JSON config file")->required();
  run->add_flag("--overwrite", overwrite, "write into the output directory itself");
  run->add_option("--threads", threads, "parallel solves (default $GPE_PEAKS_THREADS or 1)")
      ->check(CLI::PositiveNumber);
  run->add_option("--out", out_dir, "output directory (overrides output.directory)");

  std::string validate_path;
  auto* validate = app.add_subcommand("validate", "parse and validate a config");
  validate->add_option("config", validate_path, "JSON config file")->required();

  int profile_dim = 1;
  std::string profile_dir = ".";
  auto* profile = app.add_subcommand("profile", "write the scalar ground-state profile CSV");
  profile->add_option("N", profile_dim, "space dimension")->required()->check(CLI::Range(1, 3));
  profile->add_option("--out", profile_dir, "output directory");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*validate) {
      gpe::parse_config(validate_path);
      std::cout << validate_path << ": ok\n";
      return 0;
    }
    if (*profile) {
      std::cout << gpe::write_profile_csv(profile_dim, profile_dir) << "\n";
      return 0;
    }
    const auto cfg = gpe::parse_config(config_path);
    gpe::RunOptions opts;
    if (!out_dir.empty()) opts.out_dir = out_dir;
    opts.overwrite = overwrite;
    opts.threads = threads;
    const auto result = gpe::run_experiment(cfg, opts, std::cerr);
    std::cout << result.output_dir << "\n";
    if (result.exit_code != 0) std::cerr << "some solves did not converge\n";
    return result.exit_code;
  } catch (const gpe::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
