#include <iostream>
#include <optional>

#include "CLI11.hpp"
#include "selfsim_cli/config.hpp"
#include "selfsim_cli/harness.hpp"

namespace {

using namespace selfsim;
using namespace selfsim::cli;

// Command-line values that override the config file.
struct Overrides {
  std::string config;
  std::string output;
  std::optional<int> n;
  std::optional<double> half_width;
  std::optional<double> amplitude;
  std::optional<std::string> model;
  std::vector<double> kappas;
  std::optional<std::uint64_t> seed;
  std::optional<double> dt;
  std::optional<double> t_end;
  std::optional<double> residual_tolerance;
  std::vector<std::string> stages;
};

void add_common(CLI::App* sub, Overrides& o, bool with_stages) {
  sub->add_option("-c,--config", o.config, "JSON config file (flags override it)");
  sub->add_option("-o,--output", o.output, "output directory");
  sub->add_option("--n", o.n, "grid points per axis");
  sub->add_option("--half-width", o.half_width, "box half width L");
  sub->add_option("--amplitude", o.amplitude, "data amplitude sigma");
  sub->add_option("--model", o.model, "toy1 or toy2");
  sub->add_option("--kappa", o.kappas, "penalty parameter (repeatable)");
  sub->add_option("--seed", o.seed, "seed for randomized checks");
  sub->add_option("--dt", o.dt, "evolution time step");
  sub->add_option("--t-end", o.t_end, "evolution end time");
  sub->add_option("--residual-tolerance", o.residual_tolerance, "profile residual target");
  if (with_stages) sub->add_option("--stage", o.stages, "stage to run (repeatable; default all)");
}

ExperimentConfig build_config(const Overrides& o, const std::string& command) {
  nlohmann::json j = o.config.empty() ? config_to_json(default_config()) : config_to_json(load_config(o.config));
  if (!o.output.empty()) j["output"] = o.output;
  if (o.n) j["grid"]["n"] = *o.n;
  if (o.half_width) j["grid"]["half_width"] = *o.half_width;
  if (o.amplitude) j["data"]["amplitude"] = *o.amplitude;
  if (o.model) j["model"] = *o.model;
  if (o.seed) j["seed"] = *o.seed;
  if (o.dt) j["evolve"]["dt"] = *o.dt;
  if (o.t_end) j["evolve"]["t_end"] = *o.t_end;
  if (o.residual_tolerance) j["residual_tolerance"] = *o.residual_tolerance;
  if (!o.kappas.empty()) {
    if (command == "semigroup-check")
      j["semigroup"]["kappas"] = o.kappas;
    else if (command == "evolve")
      j["evolve"]["kappa"] = o.kappas.front();
    else
      j["kappas"] = o.kappas;
  }
  if (command == "run") {
    if (!o.stages.empty()) j["stages"] = o.stages;
  } else {
    j["stages"] = {command};
  }
  return config_from_json(j);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Self-similar profiles of penalized Navier-Stokes models"};
  app.require_subcommand(1, 1);
  Overrides o;
  std::string command;
  auto* run_cmd = app.add_subcommand("run", "run the configured stages in order");
  add_common(run_cmd, o, true);
  for (const std::string& name : kAllStages) add_common(app.add_subcommand(name, "run the " + name + " stage"), o, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    std::cerr << e.what() << "\n\n" << app.help();
    return 2;
  }
  command = app.get_subcommands().front()->get_name();

  ExperimentConfig cfg;
  try {
    cfg = build_config(o, command);
  } catch (const ConfigError& e) {
    std::cerr << "invalid config: " << e.what() << "\n";
    return 3;
  }

  const RunContext ctx = run(cfg);
  for (const auto& s : ctx.stages)
    if (!s.ok) return 1;
  return 0;
}
