#pragma once

// Decreasing rearrangements as step functions and Lorentz norms integrated
// in closed form on them.

#include <iosfwd>
#include <span>
#include <vector>

#include "fracharm/grid.hpp"

namespace fracharm {

// f* = values[i] on [breaks[i-1], breaks[i]) with breaks[-1] = 0.
class RearrangementProfile {
 public:
  RearrangementProfile() = default;
  // Validates: breaks strictly increasing and positive, values
  // nonincreasing and nonnegative, equal lengths.
  RearrangementProfile(std::vector<double> breaks, std::vector<double> values);

  std::span<const double> breaks() const { return breaks_; }
  std::span<const double> values() const { return values_; }
  std::size_t steps() const { return values_.size(); }
  double total_measure() const { return breaks_.empty() ? 0.0 : breaks_.back(); }

  // Right-continuous f*(t); zero past the total measure.
  double at(double t) const;
  // d(lambda) = measure{|f| > lambda}.
  double distribution(double lambda) const;

  RearrangementProfile scaled(double c) const;
  bool operator==(const RearrangementProfile&) const = default;

  // "t,value" rows, one per step (right endpoint).
  void write_csv(std::ostream& out) const;

 private:
  std::vector<double> breaks_;
  std::vector<double> values_;
};

// Every sample carries measure cell_measure; equal magnitudes are merged.
RearrangementProfile decreasing_rearrangement(std::span<const double> magnitudes,
                                              double cell_measure);
RearrangementProfile decreasing_rearrangement(const GridFunction& f);
// Coefficient table as a discrete measure with weight L^-n per mode.
RearrangementProfile decreasing_rearrangement(const Spectrum& spectrum);

// p in (1, inf], q in [1, inf]; p = inf only with q = inf.
double lorentz_norm(const RearrangementProfile& profile, double p, double q);
double lorentz_norm(const GridFunction& f, double p, double q);

// Profile of min(|x|^-lambda, cap) on the box.
RearrangementProfile weighted_power_profile(const Grid& grid, double lambda,
                                            double cap);

}  // namespace fracharm
