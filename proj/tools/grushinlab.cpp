#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "grushinlab/cli/config.hpp"
#include "grushinlab/cli/run.hpp"

int main(int argc, char** argv) {
  using namespace grushinlab::cli;
  CLI::App app{"grushinlab: finite-difference experiments for a degenerate Grushin-type operator"};
  std::optional<std::string> config_path;
  FlagOverrides flags;
  app.add_option("--config", config_path, "JSON run configuration");
  app.add_option("--command", flags.command, "Command to run")->check(CLI::IsMember(command_names()));
  app.add_option("--alpha", flags.alpha, "Degeneracy exponent alpha (default 1)");
  app.add_option("--n", flags.n, "Space dimension n (default 2)");
  app.add_option("--out", flags.output_dir, "Output directory for reports");
  app.add_option("--seed", flags.seed, "Random seed");
  app.add_option("--tol", flags.tol, "Solver tolerance (default 1e-10)");
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kError;
  }

  RunConfig cfg;
  try {
    cfg = parse_config(config_path, flags);
  } catch (const std::exception& e) {
    std::cerr << "grushinlab: " << e.what() << '\n';
    return kError;
  }
  return run(cfg, std::cout, std::cerr);
}
