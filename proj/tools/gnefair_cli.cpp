// gnefair <command> --config <path> [--out <dir>] [--seed <int>] [--plots]

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "gnefair/config.hpp"
#include "gnefair/errors.hpp"
#include "gnefair/experiment.hpp"

namespace {

using gnefair::experiment::Command;

struct Options {
  std::string config_path;
  std::optional<std::string> out_dir;
  std::optional<std::uint64_t> seed;
  bool plots = false;
};

void add_common(CLI::App* sub, Options& opts, bool config_required) {
  auto* cfg = sub->add_option("--config", opts.config_path, "experiment configuration (JSON)");
  if (config_required) cfg->required();
  sub->add_option("--out", opts.out_dir, "output directory (overrides output.directory)");
  sub->add_option("--seed", opts.seed, "solver seed (overrides solver.seed)");
  sub->add_flag("--plots", opts.plots, "also write SVG charts");
}

int execute(Command command, const Options& opts) {
  namespace ex = gnefair::experiment;
  gnefair::config::ExperimentConfig cfg;
  if (opts.config_path.empty()) {
    cfg = ex::default_config();
  } else {
    std::ifstream in(opts.config_path, std::ios::binary);
    if (!in) {
      std::cerr << "error: cannot read " << opts.config_path << "\n";
      return ex::kInvalidConfig;
    }
    std::ostringstream text;
    text << in.rdbuf();
    try {
      cfg = gnefair::config::parse_config(text.str());
    } catch (const gnefair::ValidationError& e) {
      for (const auto& fe : e.errors()) std::cerr << "error: " << fe.path << ": " << fe.message << "\n";
      return ex::kInvalidConfig;
    } catch (const gnefair::Error& e) {
      std::cerr << "error: " << e.what() << "\n";
      return ex::kInvalidConfig;
    }
  }
  if (opts.out_dir) cfg.output.directory = *opts.out_dir;
  if (opts.seed) cfg.solver.seed = *opts.seed;
  if (opts.plots) cfg.output.emit_plots = true;
  return ex::run(command, cfg, std::cerr).exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Generalized Nash equilibria and fair equilibrium selection"};
  app.require_subcommand(1);

  struct Entry {
    Command command;
    const char* help;
    Options opts;
    CLI::App* sub = nullptr;
  };
  Entry entries[] = {
      {Command::vgne, "variational GNE of the configured game", {}},
      {Command::fgne, "fairness-optimal normalized equilibrium", {}},
      {Command::sweep, "sample the GNE set and tabulate fairness metrics", {}},
      {Command::audit, "v-GNE under cost transformations", {}},
      {Command::reproduce_fig3, "v-GNE of the EV scenarios", {}},
      {Command::reproduce_fig4, "selection rules on the two-agent game", {}},
  };
  for (auto& e : entries) {
    e.sub = app.add_subcommand(gnefair::experiment::to_string(e.command), e.help);
    add_common(e.sub, e.opts, gnefair::experiment::needs_game(e.command));
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : gnefair::experiment::kInvalidConfig;
  }

  for (auto& e : entries)
    if (e.sub->parsed()) return execute(e.command, e.opts);
  return gnefair::experiment::kFailure;
}
