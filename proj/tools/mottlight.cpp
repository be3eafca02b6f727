// Command-line front end: one subcommand per experiment kind.
//
// Exit codes: 0 ok, 1 usage, 2 scenario/config error, 3 numeric failure,
// 4 I/O failure.

#include <cstdint>
#include <exception>
#include <iostream>
#include <ios>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "mottlight/harness/presets.hpp"
#include "mottlight/harness/runner.hpp"

namespace {

enum Exit { ok = 0, usage = 1, config = 2, numeric = 3, io = 4 };

int exit_for(mottlight::harness::ErrorCategory c) {
  using mottlight::harness::ErrorCategory;
  switch (c) {
    case ErrorCategory::config: return config;
    case ErrorCategory::numeric: return numeric;
    case ErrorCategory::io: return io;
  }
  return numeric;
}

}  // namespace

int main(int argc, char** argv) {
  namespace h = mottlight::harness;
  CLI::App app{"Simulations of EIT, light storage and spin-wave deflection in a lattice gas"};
  app.require_subcommand(0, 1);

  bool list = false;
  app.add_flag("--list-scenarios", list, "Print the bundled scenario presets and exit");

  std::string scenario;
  std::string out_dir;
  int threads = 1;
  std::optional<std::uint64_t> seed;
  for (const char* name : {"eit-scan", "store", "decay-scan", "ramsey", "deflect"}) {
    CLI::App* sub = app.add_subcommand(name, std::string("Run a ") + name + " scenario");
    sub->add_option("--scenario", scenario, "Scenario file or bundled preset name")->required();
    sub->add_option("--out", out_dir, "Output directory")->required();
    sub->add_option("--threads", threads, "Worker threads for independent scan points")
        ->check(CLI::Range(1, 256));
    sub->add_option("--seed", seed, "RNG seed for noisy fits; overrides the scenario");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? ok : usage;
  }

  if (list) {
    for (const auto& name : h::preset_names()) std::cout << name << '\n';
    return ok;
  }
  if (app.get_subcommands().empty()) {
    std::cerr << app.help();
    return usage;
  }
  const std::string command = app.get_subcommands().front()->get_name();

  h::ScenarioConfig cfg;
  try {
    cfg = h::load_scenario(scenario);
  } catch (const std::ios_base::failure& e) {
    std::cerr << "error: " << e.what() << '\n';
    return io;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << scenario << ": " << e.what() << '\n';
    return config;
  }
  if (command != h::to_string(cfg.experiment)) {
    std::cerr << "error: scenario '" << scenario << "' describes a " << h::to_string(cfg.experiment)
              << " experiment, not " << command << '\n';
    return usage;
  }

  try {
    h::RunOptions opt;
    opt.out_dir = out_dir;
    opt.threads = threads;
    opt.seed = seed;
    const h::RunReport report = h::run(cfg, opt);
    std::cout << report.summary["results"].dump(2) << '\n';
    for (const auto& f : report.files) std::cerr << "wrote " << f.string() << '\n';
  } catch (const h::RunError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_for(e.category);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return numeric;
  }
  return ok;
}
