#include <CLI11.hpp>

#include <iostream>

#include "mpass_cli/commands.hpp"
#include "mpass/trace_io.hpp"

namespace {

std::string keys_help() {
  std::string text = "Config keys (key=value, one per line; '#' comments):\n";
  for (const auto& [k, d] : mpass::cli::config_keys()) text += "  " + k + ": " + d + "\n";
  text += "MPASS_OUTPUT_DIR overrides output_dir.\n";
  return text;
}

}  // namespace

int main(int argc, char** argv) {
  using namespace mpass::cli;
  CLI::App app{"Mountain-pass point search by bisection on basins of attraction"};
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "Run an algorithm on a benchmark");
  std::string config_file;
  std::vector<std::string> overrides;
  run->add_option("-c,--config", config_file, "key=value config file")->check(CLI::ExistingFile);
  run->add_option("-s,--set", overrides, "override, e.g. --set n_max=20 (repeatable)");
  run->footer(keys_help());

  auto* figure = app.add_subcommand("figure", "Write fig_f.csv and fig_grad.csv from a finished run");
  std::string run_dir;
  figure->add_option("run_dir", run_dir, "directory of a finished alg1b/alg1c run")->required();

  app.add_subcommand("bench-list", "List the built-in benchmarks");

  auto* audit = app.add_subcommand("audit", "Central-difference gradient audit at random points");
  std::string bench = "double_well";
  int points = 100;
  double h = 1e-5;
  std::uint64_t seed = 0;
  audit->add_option("benchmark", bench, "benchmark name")->capture_default_str();
  audit->add_option("--points", points, "number of random points in [-2, 2]^n")->capture_default_str();
  audit->add_option("--step", h, "difference step")->capture_default_str();
  audit->add_option("--seed", seed, "random seed")->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) {
      std::optional<std::filesystem::path> file;
      if (!config_file.empty()) file = config_file;
      std::vector<std::string> lines;
      for (const auto& o : overrides) lines.push_back(o);
      RunConfig cfg;
      try {
        cfg = load_config(file, lines);
      } catch (const mpass::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitConfig;
      }
      return cmd_run(cfg, std::cerr);
    }
    if (figure->parsed()) {
      cmd_figure(run_dir);
      return kExitOk;
    }
    if (app.got_subcommand("bench-list")) {
      cmd_bench_list(std::cout);
      return kExitOk;
    }
    if (audit->parsed()) {
      std::cout << mpass::format_real(cmd_audit(bench, points, h, seed)) << '\n';
      return kExitOk;
    }
  } catch (const mpass::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code_for(e.code());
  }
  return kExitOk;
}
