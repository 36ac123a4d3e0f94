#pragma once

// Internal wiring between the experiment runner and the individual
// experiments.

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "fracharm/experiments.hpp"
#include "fracharm/grid.hpp"

namespace fracharm::detail {

[[noreturn]] void config_error(const std::string& field, const std::string& what);

// Overrides from the config, validated through Grid::make.
Grid config_grid(const ExperimentConfig& c, int dim, std::size_t n, double box);
// --s if given (must lie in (lo, hi)), else the fallback.
double config_s(const ExperimentConfig& c, double fallback, double lo, double hi);
std::vector<double> config_scales(const ExperimentConfig& c, std::vector<double> fallback);
// Distinct generator seeds for the members of a seeded family.
std::uint64_t member_seed(std::uint64_t seed, std::uint64_t i);
// Upper endpoint of the distribution behind the sample: 2 x_(1) - x_(2)
// (Robson-Whitlock), or the single value.
double endpoint_estimate(std::vector<double> values);

// Calibration searches a family this many times larger than a regression run.
inline constexpr std::uint64_t kCalibrationOversample = 10;

// One calibrated quantity over a seeded family.  measure() returns the
// member values; a family of size `scale` contains every member of the
// smaller ones for the same seed.
struct Family {
  std::string name;
  std::string provenance;
  Grid grid;
  std::vector<std::string> columns;
  std::function<std::vector<double>(std::uint64_t seed, std::uint64_t scale, Table& table)> measure;
  // Optional direct maximization; when set it replaces the endpoint estimate.
  std::function<double(std::uint64_t seed)> extremal = nullptr;
};

struct Suite {
  std::vector<Family> families;
  std::function<void(Report&)> checks;  // verdicts that need no calibration
};

using PlainExperiment = void (*)(const ExperimentConfig&, Report&);
using SuiteBuilder = Suite (*)(const ExperimentConfig&);

void definition_equivalence(const ExperimentConfig& c, Report& rep);
void norm_equivalence(const ExperimentConfig& c, Report& rep);
void partition_of_unity(const ExperimentConfig& c, Report& rep);
void cutoff_scaling(const ExperimentConfig& c, Report& rep);
void hodge(const ExperimentConfig& c, Report& rep);
void disjoint_decay(const ExperimentConfig& c, Report& rep);
void poincare_scaling(const ExperimentConfig& c, Report& rep);
void harmonic_decay(const ExperimentConfig& c, Report& rep);
void lorentz_algebra(const ExperimentConfig& c, Report& rep);
void iteration(const ExperimentConfig& c, Report& rep);
void dirichlet_growth(const ExperimentConfig& c, Report& rep);

Suite compensation_suite(const ExperimentConfig& c);
Suite commutator_bounds_suite(const ExperimentConfig& c);
Suite inverse_scaling_suite(const ExperimentConfig& c);
Suite lorentz_inequalities_suite(const ExperimentConfig& c);
Suite meanvalue_poincare_suite(const ExperimentConfig& c);
Suite localization_suite(const ExperimentConfig& c);
Suite homogeneous_norm_suite(const ExperimentConfig& c);

}  // namespace fracharm::detail
