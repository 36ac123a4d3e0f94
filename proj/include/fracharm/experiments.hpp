#pragma once

// Seeded, reproducible experiments with JSON/CSV reports, and the
// calibrate-then-regress protocol for constants left implicit.

#include <cstdint>
#include <functional>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "fracharm/calibration.hpp"

namespace fracharm {

// Unset fields take the experiment's defaults.
struct ExperimentConfig {
  std::string id;
  std::optional<int> dim;
  std::optional<std::size_t> grid;  // points per axis
  std::optional<double> box;
  std::optional<double> s;
  std::uint64_t seed = 1;
  std::vector<double> scales;
  std::string out;        // report directory, empty for none
  std::string constants;  // constants file to regress against, empty to self-calibrate

  nlohmann::json to_json() const;
};

struct Table {
  std::string name;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  void add(std::vector<double> row);
  void write_csv(std::ostream& out) const;
  nlohmann::json to_json() const;
};

struct Verdict {
  std::string name;
  double observed = 0.0;
  double bound = 0.0;
  std::string relation = "<=";  // "<=", ">=" or "=="
  bool pass = false;

  nlohmann::json to_json() const;
};

struct Report {
  std::string id;
  nlohmann::json config;
  std::vector<Table> tables;
  std::vector<CalibratedConstant> constants;
  std::vector<Verdict> verdicts;
  double wall_clock = 0.0;  // seconds

  Table& table(const std::string& name, std::vector<std::string> columns);
  // observed <= bound (">=": observed >= bound; "==": observed == bound).
  // NaN never passes.
  const Verdict& check(const std::string& name, double observed, const std::string& relation,
                       double bound);
  bool pass() const;
  nlohmann::json to_json() const;
  // <dir>/<id>.json and <dir>/<id>_<table>.csv; throws on NaN in a table.
  void write(const std::string& dir) const;
};

struct ExperimentInfo {
  std::string id;
  std::string summary;
  bool calibrated = false;  // accepts calibrate / --constants
};

const std::vector<ExperimentInfo>& experiment_registry();

// Throws PreconditionError for an unknown id or an invalid field (the
// message names the field).
Report run(const ExperimentConfig& config);

// Measures the calibrated quantities of `config.id` on config.seed.
ConstantsFile calibrate(const ExperimentConfig& config);

}  // namespace fracharm
