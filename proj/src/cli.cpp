#include "stolqr/cli.hpp"

#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "stolqr/csv.hpp"
#include "stolqr/errors.hpp"
#include "stolqr/experiments.hpp"

namespace stolqr {

namespace {

using Command = std::function<CommandOutput(const RunConfig&)>;

const std::map<std::string, Command>& commands() {
  static const std::map<std::string, Command> table{
      {"riccati", cmd_riccati},
      {"model-based", cmd_model_based},
      {"model-free", cmd_model_free},
      {"exp-residuals", cmd_experiment_residuals},
      {"exp-trajectories", cmd_experiment_trajectories},
      {"exp-scaling", cmd_experiment_scaling},
  };
  return table;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Discounted stochastic LQR via Riccati iteration and semidefinite programming", "stolqr"};
  app.require_subcommand(1);
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out_dir;
  for (const auto& [name, fn] : commands()) {
    CLI::App* sub = app.add_subcommand(name);
    sub->add_option("--config", config_path, "JSON run configuration")->required();
    sub->add_option("--seed", seed, "override data.seed");
    sub->add_option("--out", out_dir, "output directory (default: experiment.output_dir)");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    std::ostringstream os, es;
    app.exit(e, os, es);
    out << os.str();
    return 0;
  } catch (const CLI::ParseError& e) {
    std::ostringstream os, es;
    app.exit(e, os, es);
    err << es.str() << os.str();
    return 2;
  }

  const std::string name = app.get_subcommands().front()->get_name();
  try {
    RunConfig cfg = load_config(config_path);
    if (seed) cfg.data.seed = *seed;
    const std::filesystem::path dir = out_dir.empty() ? cfg.experiment.output_dir : out_dir;
    const CommandOutput res = commands().at(name)(cfg);
    for (const auto& [file, text] : res.files) write_text_file(dir / file, text);
    out << res.report;
    return 0;
  } catch (const ConfigError& e) {
    err << "stolqr " << name << ": configuration error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "stolqr " << name << ": " << e.what() << "\n";
    return 1;
  }
}

}  // namespace stolqr
