#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "pilotpbr/cli/commands.hpp"

int main(int argc, char** argv) {
  namespace cli = pilotpbr::cli;

  CLI::App app{"Ontological-model audits, pilot-wave beam splitter and Bell correlations"};
  app.require_subcommand(1);

  struct Args {
    std::string config;
    std::string out = ".";
    std::optional<std::uint64_t> seed;
  };
  Args args;
  std::string chosen;

  const std::pair<const char*, const char*> commands[] = {
      {"pbr", "Audit an ontological model against the PBR measurement"},
      {"beamsplitter", "Run the four beam splitter inputs with trajectories"},
      {"epr", "Sample the two-step singlet model and evaluate CHSH"},
      {"fields", "Write density, current, velocity and energy fields of a run"},
  };
  for (const auto& [name, help] : commands) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("--config", args.config, "JSON config file")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", args.out, "Output directory")->capture_default_str();
    sub->add_option("--seed", args.seed, "Seed overriding the config");
    sub->callback([&chosen, n = std::string(name)] { chosen = n; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : cli::kExitConfig;
  }

  cli::RunOptions opts;
  opts.config = args.config;
  opts.out_dir = args.out;
  opts.seed = args.seed;
  return cli::run_command(chosen, opts, std::cout, std::cerr);
}
