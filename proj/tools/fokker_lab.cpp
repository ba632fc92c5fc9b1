// fokker-lab: runs scenario files and writes CSV tables plus a manifest.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "fokker/errors.hpp"
#include "fokker/experiments.hpp"

namespace fs = std::filesystem;
using namespace fokker;

namespace {

constexpr int exit_ok = 0;
constexpr int exit_config = 2;
constexpr int exit_numerical = 3;

void append_manifest(const fs::path& dir, const ExperimentResult& r) {
  fs::create_directories(dir);
  const fs::path file = dir / "manifest.csv";
  const bool fresh = !fs::exists(file);
  std::ofstream os(file, std::ios::app | std::ios::binary);
  if (fresh) os << summary_header() << '\n';
  os << summary_line(r) << '\n';
}

int run(const std::vector<std::string>& files, const RunOptions& opts) {
  int code = exit_ok;
  for (const auto& f : files) {
    Scenario sc;
    try {
      sc = load_scenario(f);
      const auto r = run_experiment(sc, opts);
      append_manifest(opts.out.value_or(sc.output), r);
      std::cout << summary_line(r) << '\n';
      if (r.numerical_failure) {
        std::cerr << f << ": " << r.status << (r.message.empty() ? "" : ": " + r.message) << '\n';
        code = std::max(code, exit_numerical);
      }
    } catch (const ConfigError& e) {
      std::cerr << f << ": config error: " << e.what() << '\n';
      code = exit_config;
    } catch (const NumericalError& e) {
      std::cerr << f << ": numerical failure: " << e.what() << '\n';
      code = std::max(code, exit_numerical);
    } catch (const fs::filesystem_error& e) {
      std::cerr << f << ": " << e.what() << '\n';
      code = exit_config;
    }
  }
  return code;
}

int validate(const std::vector<std::string>& files) {
  int code = exit_ok;
  for (const auto& f : files) {
    try {
      validate_scenario(load_scenario(f));
      std::cout << f << ": ok\n";
    } catch (const Error& e) {
      std::cerr << f << ": " << e.what() << '\n';
      code = exit_config;
    }
  }
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fokker action and propagator scenario runner"};
  app.require_subcommand(1);

  std::vector<std::string> run_files;
  std::string out;
  std::uint64_t seed = 0;
  int jobs = 1;
  auto* run_cmd = app.add_subcommand("run", "run scenario files");
  run_cmd->add_option("scenario", run_files, "scenario file(s)")->required()->check(CLI::ExistingFile);
  auto* out_opt = run_cmd->add_option("--out", out, "output directory (overrides run.output)");
  auto* seed_opt = run_cmd->add_option("--seed", seed, "random seed (overrides run.seed)");
  run_cmd->add_option("--jobs", jobs, "workers for parameter sweeps")->check(CLI::PositiveNumber);

  app.add_subcommand("list-experiments", "print the experiment names");

  std::vector<std::string> validate_files;
  auto* val_cmd = app.add_subcommand("validate", "parse scenarios and build their worldlines");
  val_cmd->add_option("scenario", validate_files, "scenario file(s)")->required()->check(CLI::ExistingFile);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? exit_ok : exit_config;
  }

  if (*run_cmd) {
    RunOptions opts;
    if (*out_opt) opts.out = fs::path(out);
    if (*seed_opt) opts.seed = seed;
    opts.jobs = jobs;
    return run(run_files, opts);
  }
  if (*val_cmd) return validate(validate_files);
  for (const auto& e : experiment_catalog()) std::cout << e.name << "  " << e.description << '\n';
  return exit_ok;
}
