#pragma once

// Empirical constants fixed by a seeded calibration run and enforced
// afterwards as regression bounds.

#include <cstdint>
#include <map>
#include <string>

#include <json.hpp>

namespace fracharm {

inline constexpr double kRegressionSlack = 1.01;
inline constexpr int kConstantsFileVersion = 1;

struct CalibratedConstant {
  std::string name;
  double value = 0.0;
  double order = 0.0;
  std::string provenance;
  std::uint64_t seed = 0;
  nlohmann::json grid;

  nlohmann::json to_json() const;
  static CalibratedConstant from_json(const nlohmann::json& j);
};

struct RegressionVerdict {
  std::string name;
  double observed = 0.0;
  double bound = 0.0;  // value * kRegressionSlack
  double margin = 0.0;  // bound - observed
  bool pass = false;

  nlohmann::json to_json() const;
};

class ConstantsFile {
 public:
  // Throws Error when the file is unreadable or carries another version.
  static ConstantsFile load(const std::string& path);
  void save(const std::string& path) const;

  void put(const CalibratedConstant& c);
  bool contains(const std::string& name) const;
  const CalibratedConstant& get(const std::string& name) const;
  const std::map<std::string, CalibratedConstant>& entries() const { return entries_; }

  // observed <= value * 1.01.  Refuses (PreconditionError) when the grid
  // spec differs from the one recorded at calibration.
  RegressionVerdict regress(const std::string& name, double observed,
                            const nlohmann::json& grid) const;

  nlohmann::json to_json() const;

 private:
  std::map<std::string, CalibratedConstant> entries_;
};

}  // namespace fracharm
