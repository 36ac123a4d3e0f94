#include <CLI11.hpp>

#include <iomanip>
#include <iostream>

#include "fracharm/errors.hpp"
#include "fracharm/experiments.hpp"

namespace {

void add_config_options(CLI::App* app, fracharm::ExperimentConfig& c, bool with_out, bool with_constants) {
  app->add_option_function<int>("--dim", [&c](int v) { c.dim = v; }, "spatial dimension (1, 2 or 3)");
  app->add_option_function<std::size_t>("--grid", [&c](std::size_t v) { c.grid = v; }, "points per axis");
  app->add_option_function<double>("--box", [&c](double v) { c.box = v; }, "box side length");
  app->add_option_function<double>("--s", [&c](double v) { c.s = v; }, "fractional order");
  app->add_option("--seed", c.seed, "base random seed");
  app->add_option("--scales", c.scales, "experiment-specific scale list")->delimiter(',');
  if (with_out) app->add_option("--out", c.out, "directory for the JSON report and CSV tables");
  if (with_constants) app->add_option("--constants", c.constants, "constants file to regress against");
}

void print_report(const fracharm::Report& rep) {
  std::cout << rep.id << " (" << std::fixed << std::setprecision(2) << rep.wall_clock << " s)\n";
  std::cout << std::defaultfloat << std::setprecision(6);
  for (const fracharm::Verdict& v : rep.verdicts) {
    std::cout << "  [" << (v.pass ? "PASS" : "FAIL") << "] " << v.name << ": " << v.observed << ' '
              << v.relation << ' ' << v.bound << '\n';
  }
  std::cout << (rep.pass() ? "PASS" : "FAIL") << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Numerical experiments for fractional harmonic maps"};
  app.require_subcommand(1);
  fracharm::ExperimentConfig config;

  app.add_subcommand("list", "list the experiment ids");
  for (const fracharm::ExperimentInfo& info : fracharm::experiment_registry()) {
    CLI::App* sub = app.add_subcommand(info.id, info.summary);
    add_config_options(sub, config, true, info.calibrated);
  }
  CLI::App* cal = app.add_subcommand("calibrate", "measure the constants of a calibrated experiment");
  std::string cal_id;
  cal->add_option("id", cal_id, "experiment id")->required();
  add_config_options(cal, config, false, false);
  std::string cal_file;
  cal->add_option("--constants", cal_file, "constants file to write")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (app.got_subcommand("list")) {
      for (const fracharm::ExperimentInfo& info : fracharm::experiment_registry()) {
        std::cout << std::left << std::setw(24) << info.id << (info.calibrated ? "[calibrated] " : "")
                  << info.summary << '\n';
      }
      return 0;
    }
    if (app.got_subcommand(cal)) {
      config.id = cal_id;
      const fracharm::ConstantsFile file = fracharm::calibrate(config);
      file.save(cal_file);
      std::cout << "wrote " << cal_file << '\n';
      return 0;
    }
    config.id = app.get_subcommands().front()->get_name();
    const fracharm::Report rep = fracharm::run(config);
    print_report(rep);
    return rep.pass() ? 0 : 1;
  } catch (const fracharm::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
}
