#include "fracharm/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "experiment_suites.hpp"
#include "fracharm/errors.hpp"

namespace fracharm {

namespace {

struct Entry {
  ExperimentInfo info;
  detail::PlainExperiment plain = nullptr;
  detail::SuiteBuilder suite = nullptr;
};

const std::vector<Entry>& entries() {
  static const std::vector<Entry> list = {
      {{"definition-equivalence", "singular-integral operator against the spectral multiplier", false},
       detail::definition_equivalence},
      {{"norm-equivalence", "spectral norm over the Gagliardo energy across seeded fields", false},
       detail::norm_equivalence},
      {{"partition-of-unity", "dyadic cutoff partition, supports and derivative bounds", false},
       detail::partition_of_unity},
      {{"cutoff-scaling", "norm scaling of fractional Laplacians of dyadic cutoffs", false},
       detail::cutoff_scaling},
      {{"hodge", "Hodge decomposition invariants over seeded inputs", false}, detail::hodge},
      {{"disjoint-decay", "decay of pairings between disjointly supported bumps", false},
       detail::disjoint_decay},
      {{"poincare-scaling", "scaling exponent of the fractional Poincare constant", false},
       detail::poincare_scaling},
      {{"harmonic-decay", "decay of the harmonic remainder on the inner ball", false},
       detail::harmonic_decay},
      {{"lorentz-algebra", "rearrangement product bound, scaling and weak-norm bound", false},
       detail::lorentz_algebra},
      {{"compensation", "structure identity and calibrated commutator and defect ratios", true},
       nullptr, detail::compensation_suite},
      {{"iteration", "discrete iteration lemmas on generated sequences and counterexamples", false},
       detail::iteration},
      {{"dirichlet-growth", "three Hoelder-exponent estimators on power windows", false},
       detail::dirichlet_growth},
      {{"commutator-bounds", "Fourier domination of the commutator and the triangle defect", true},
       nullptr, detail::commutator_bounds_suite},
      {{"inverse-scaling", "inverse fractional Laplacian on mean-zero bumps against r^s", true},
       nullptr, detail::inverse_scaling_suite},
      {{"lorentz-inequalities", "Hoelder, compact-support Hoelder and convolution in Lorentz spaces",
        true},
       nullptr, detail::lorentz_inequalities_suite},
      {{"meanvalue-poincare", "mean-value Poincare ratios, polynomial gaps and convex-set bounds", true},
       nullptr, detail::meanvalue_poincare_suite},
      {{"localization", "lower-order products, local dual norms, localizing and product-rule bounds",
        true},
       nullptr, detail::localization_suite},
      {{"homogeneous-norm", "localization and comparison of homogeneous seminorms", true}, nullptr,
       detail::homogeneous_norm_suite},
  };
  return list;
}

const Entry& find(const std::string& id) {
  for (const Entry& e : entries()) {
    if (e.info.id == id) return e;
  }
  throw PreconditionError("unknown experiment id '" + id + "'");
}

std::string format_number(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

ConstantsFile measure_constants(const detail::Suite& suite, std::uint64_t seed, Report* rep) {
  ConstantsFile file;
  for (const detail::Family& f : suite.families) {
    Table scratch{f.name, f.columns, {}};
    Table& t = rep ? rep->table(f.name + "_calibration", f.columns) : scratch;
    const std::vector<double> values = f.measure(seed, detail::kCalibrationOversample, t);
    const double value = f.extremal
                             ? std::max(f.extremal(seed), *std::max_element(values.begin(), values.end()))
                             : detail::endpoint_estimate(values);
    file.put({f.name, value, 0.0, f.provenance, seed, f.grid.to_json()});
  }
  return file;
}

}  // namespace

nlohmann::json ExperimentConfig::to_json() const {
  nlohmann::json j{{"id", id}, {"seed", seed}, {"scales", scales}, {"out", out}, {"constants", constants}};
  j["dim"] = dim ? nlohmann::json(*dim) : nlohmann::json();
  j["grid"] = grid ? nlohmann::json(*grid) : nlohmann::json();
  j["box"] = box ? nlohmann::json(*box) : nlohmann::json();
  j["s"] = s ? nlohmann::json(*s) : nlohmann::json();
  return j;
}

void Table::add(std::vector<double> row) {
  if (row.size() != columns.size()) throw Error("table " + name + ": row width mismatch");
  rows.push_back(std::move(row));
}

void Table::write_csv(std::ostream& out) const {
  for (std::size_t i = 0; i < columns.size(); ++i) out << (i ? "," : "") << columns[i];
  out << '\n';
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << format_number(row[i]);
    out << '\n';
  }
}

nlohmann::json Table::to_json() const {
  return {{"name", name}, {"columns", columns}, {"rows", rows.size()}};
}

nlohmann::json Verdict::to_json() const {
  nlohmann::json j{{"name", name}, {"relation", relation}, {"pass", pass}};
  j["observed"] = std::isfinite(observed) ? nlohmann::json(observed) : nlohmann::json(format_number(observed));
  j["bound"] = std::isfinite(bound) ? nlohmann::json(bound) : nlohmann::json(format_number(bound));
  return j;
}

Table& Report::table(const std::string& name, std::vector<std::string> columns) {
  tables.push_back({name, std::move(columns), {}});
  return tables.back();
}

const Verdict& Report::check(const std::string& name, double observed, const std::string& relation,
                             double bound) {
  Verdict v{name, observed, bound, relation, false};
  if (relation == "<=") v.pass = observed <= bound;
  else if (relation == ">=") v.pass = observed >= bound;
  else if (relation == "==") v.pass = observed == bound;
  else throw Error("unknown relation " + relation);
  verdicts.push_back(v);
  return verdicts.back();
}

bool Report::pass() const {
  if (verdicts.empty()) return false;
  for (const Verdict& v : verdicts) {
    if (!v.pass) return false;
  }
  return true;
}

nlohmann::json Report::to_json() const {
  nlohmann::json t = nlohmann::json::array(), c = nlohmann::json::array(), v = nlohmann::json::array();
  for (const Table& x : tables) t.push_back(x.to_json());
  for (const CalibratedConstant& x : constants) c.push_back(x.to_json());
  for (const Verdict& x : verdicts) v.push_back(x.to_json());
  return {{"id", id},     {"config", config}, {"tables", t},           {"constants", c},
          {"verdicts", v}, {"pass", pass()},  {"wall_clock_s", wall_clock}};
}

void Report::write(const std::string& dir) const {
  for (const Table& t : tables) {
    for (const auto& row : t.rows) {
      for (double x : row) {
        if (std::isnan(x)) throw Error("report " + id + ": NaN in table " + t.name);
      }
    }
  }
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  const std::filesystem::path base(dir);
  {
    std::ofstream out(base / (id + ".json"));
    out << to_json().dump(2) << '\n';
    if (!out) throw Error("cannot write report to " + dir);
  }
  for (const Table& t : tables) {
    std::ofstream out(base / (id + "_" + t.name + ".csv"));
    t.write_csv(out);
    if (!out) throw Error("cannot write table " + t.name + " to " + dir);
  }
}

const std::vector<ExperimentInfo>& experiment_registry() {
  static const std::vector<ExperimentInfo> infos = [] {
    std::vector<ExperimentInfo> out;
    for (const Entry& e : entries()) out.push_back(e.info);
    return out;
  }();
  return infos;
}

Report run(const ExperimentConfig& config) {
  const Entry& entry = find(config.id);
  const auto start = std::chrono::steady_clock::now();
  Report rep;
  rep.id = config.id;
  rep.config = config.to_json();
  if (entry.plain) {
    entry.plain(config, rep);
  } else {
    const detail::Suite suite = entry.suite(config);
    if (suite.checks) suite.checks(rep);
    ConstantsFile file;
    std::uint64_t seed = config.seed;
    if (config.constants.empty()) {
      file = measure_constants(suite, config.seed, &rep);
      seed = config.seed + 1000;
    } else {
      file = ConstantsFile::load(config.constants);
    }
    rep.config["regression_seed"] = seed;
    for (const detail::Family& f : suite.families) {
      Table& t = rep.table(f.name + "_regression", f.columns);
      const std::vector<double> values = f.measure(seed, 1, t);
      const double value = *std::max_element(values.begin(), values.end());
      const RegressionVerdict rv = file.regress(f.name, value, f.grid.to_json());
      rep.constants.push_back(file.get(f.name));
      rep.check(f.name + " regression", rv.observed, "<=", rv.bound);
    }
  }
  rep.wall_clock = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (!config.out.empty()) rep.write(config.out);
  return rep;
}

ConstantsFile calibrate(const ExperimentConfig& config) {
  const Entry& entry = find(config.id);
  if (!entry.suite) throw PreconditionError("experiment '" + config.id + "' has no calibrated constants");
  return measure_constants(entry.suite(config), config.seed, nullptr);
}

namespace detail {

void config_error(const std::string& field, const std::string& what) {
  throw PreconditionError("invalid " + field + ": " + what);
}

Grid config_grid(const ExperimentConfig& c, int dim, std::size_t n, double box) {
  const int d = c.dim.value_or(dim);
  if (d < 1 || d > 3) config_error("dim", "must be 1, 2 or 3");
  const double l = c.box.value_or(box);
  if (!(l > 0.0) || !std::isfinite(l)) config_error("box", "must be positive");
  return Grid::make(d, c.grid.value_or(n), l);
}

double config_s(const ExperimentConfig& c, double fallback, double lo, double hi) {
  if (!c.s) return fallback;
  if (!(*c.s > lo && *c.s < hi)) {
    config_error("s", "must lie in (" + format_number(lo) + ", " + format_number(hi) + ")");
  }
  return *c.s;
}

std::vector<double> config_scales(const ExperimentConfig& c, std::vector<double> fallback) {
  if (c.scales.empty()) return fallback;
  for (double x : c.scales) {
    if (!(x > 0.0) || !std::isfinite(x)) config_error("scales", "entries must be positive");
  }
  return c.scales;
}

std::uint64_t member_seed(std::uint64_t seed, std::uint64_t i) { return seed * 1000003u + i; }

double endpoint_estimate(std::vector<double> values) {
  if (values.empty()) throw Error("empty calibration family");
  if (values.size() == 1) return values.front();
  std::partial_sort(values.begin(), values.begin() + 2, values.end(), std::greater<>());
  return 2 * values[0] - values[1];
}

}  // namespace detail

}  // namespace fracharm
