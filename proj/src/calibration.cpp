#include "fracharm/calibration.hpp"

#include <cmath>
#include <fstream>

#include "fracharm/errors.hpp"

namespace fracharm {

nlohmann::json CalibratedConstant::to_json() const {
  return {{"name", name}, {"value", value},   {"order", order},
          {"seed", seed}, {"provenance", provenance}, {"grid", grid}};
}

CalibratedConstant CalibratedConstant::from_json(const nlohmann::json& j) {
  CalibratedConstant c;
  c.name = j.at("name").get<std::string>();
  c.value = j.at("value").get<double>();
  c.order = j.value("order", 0.0);
  c.seed = j.value("seed", std::uint64_t{0});
  c.provenance = j.value("provenance", std::string{});
  c.grid = j.value("grid", nlohmann::json{});
  return c;
}

nlohmann::json RegressionVerdict::to_json() const {
  return {{"name", name}, {"observed", observed}, {"bound", bound},
          {"margin", margin}, {"pass", pass}};
}

ConstantsFile ConstantsFile::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot read constants file " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw Error("constants file " + path + " is not valid JSON: " + e.what());
  }
  if (j.value("version", 0) != kConstantsFileVersion) {
    throw Error("constants file " + path + " has an unsupported version");
  }
  ConstantsFile file;
  for (const auto& e : j.at("constants")) file.put(CalibratedConstant::from_json(e));
  return file;
}

void ConstantsFile::save(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw Error("cannot write constants file " + path);
  out << to_json().dump(2) << '\n';
  if (!out) throw Error("write to constants file " + path + " failed");
}

void ConstantsFile::put(const CalibratedConstant& c) {
  if (!(c.value >= 0.0) || !std::isfinite(c.value)) {
    throw PreconditionError("calibrated constant " + c.name + " is not a finite nonnegative value");
  }
  entries_[c.name] = c;
}

bool ConstantsFile::contains(const std::string& name) const {
  return entries_.count(name) != 0;
}

const CalibratedConstant& ConstantsFile::get(const std::string& name) const {
  const auto it = entries_.find(name);
  if (it == entries_.end()) throw PreconditionError("constant " + name + " has not been calibrated");
  return it->second;
}

RegressionVerdict ConstantsFile::regress(const std::string& name, double observed,
                                         const nlohmann::json& grid) const {
  const CalibratedConstant& c = get(name);
  if (c.grid != grid) {
    throw PreconditionError("constant " + name + " was calibrated on grid " + c.grid.dump() +
                            ", refusing to regress on " + grid.dump());
  }
  RegressionVerdict v;
  v.name = name;
  v.observed = observed;
  v.bound = c.value * kRegressionSlack;
  v.margin = v.bound - observed;
  v.pass = std::isfinite(observed) && observed <= v.bound;
  return v;
}

nlohmann::json ConstantsFile::to_json() const {
  nlohmann::json list = nlohmann::json::array();
  for (const auto& [name, c] : entries_) list.push_back(c.to_json());
  return {{"version", kConstantsFileVersion}, {"constants", list}};
}

}  // namespace fracharm
