#include "fracharm/lorentz.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <ostream>

#include "fracharm/errors.hpp"

namespace fracharm {

RearrangementProfile::RearrangementProfile(std::vector<double> breaks,
                                           std::vector<double> values)
    : breaks_(std::move(breaks)), values_(std::move(values)) {
  if (breaks_.size() != values_.size()) {
    throw PreconditionError("profile breaks and values differ in length");
  }
  for (std::size_t i = 0; i < breaks_.size(); ++i) {
    const double prev_t = i == 0 ? 0.0 : breaks_[i - 1];
    if (!(breaks_[i] > prev_t)) throw PreconditionError("profile breaks must increase");
    if (!(values_[i] >= 0.0) || !std::isfinite(values_[i])) {
      throw PreconditionError("profile values must be finite and nonnegative");
    }
    if (i > 0 && values_[i] > values_[i - 1]) {
      throw PreconditionError("profile values must be nonincreasing");
    }
  }
}

double RearrangementProfile::at(double t) const {
  // first break strictly greater than t
  const auto it = std::upper_bound(breaks_.begin(), breaks_.end(), t);
  if (it == breaks_.end()) return 0.0;
  return values_[static_cast<std::size_t>(it - breaks_.begin())];
}

double RearrangementProfile::distribution(double lambda) const {
  double measure = 0.0;
  for (std::size_t i = 0; i < values_.size() && values_[i] > lambda; ++i) measure = breaks_[i];
  return measure;
}

RearrangementProfile RearrangementProfile::scaled(double c) const {
  std::vector<double> v(values_);
  for (auto& x : v) x *= std::fabs(c);
  return RearrangementProfile(breaks_, std::move(v));
}

void RearrangementProfile::write_csv(std::ostream& out) const {
  out << "t,value\n";
  out.precision(17);
  for (std::size_t i = 0; i < values_.size(); ++i) out << breaks_[i] << ',' << values_[i] << '\n';
}

RearrangementProfile decreasing_rearrangement(std::span<const double> magnitudes,
                                              double cell_measure) {
  if (!(cell_measure > 0.0)) throw PreconditionError("cell measure must be positive");
  std::vector<double> sorted(magnitudes.size());
  std::transform(magnitudes.begin(), magnitudes.end(), sorted.begin(),
                 [](double v) { return std::fabs(v); });
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  std::vector<double> breaks, values;
  std::size_t i = 0;
  while (i < sorted.size()) {
    std::size_t j = i;
    while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
    breaks.push_back(static_cast<double>(j) * cell_measure);
    values.push_back(sorted[i]);
    i = j;
  }
  return RearrangementProfile(std::move(breaks), std::move(values));
}

RearrangementProfile decreasing_rearrangement(const GridFunction& f) {
  return decreasing_rearrangement(f.values(), f.grid().cell_volume());
}

RearrangementProfile decreasing_rearrangement(const Spectrum& spectrum) {
  std::vector<double> mags(spectrum.coeffs.size());
  for (std::size_t i = 0; i < mags.size(); ++i) mags[i] = std::abs(spectrum.coeffs[i]);
  return decreasing_rearrangement(mags, std::pow(spectrum.grid.box_length(), -spectrum.grid.dim()));
}

double lorentz_norm(const RearrangementProfile& profile, double p, double q) {
  if (!(p > 1.0)) throw PreconditionError("lorentz_norm requires p > 1");
  if (!(q >= 1.0)) throw PreconditionError("lorentz_norm requires q >= 1");
  if (std::isinf(p) && !std::isinf(q)) {
    throw PreconditionError("lorentz_norm: p = infinity is admissible only with q = infinity");
  }
  const auto t = profile.breaks();
  const auto v = profile.values();
  if (v.empty() || v[0] == 0.0) return 0.0;
  if (std::isinf(p)) return v[0];
  if (std::isinf(q)) {
    double sup = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) sup = std::max(sup, v[i] * std::pow(t[i], 1.0 / p));
    return sup;
  }
  // normalize by the largest value to keep v^q representable
  const double top = v[0];
  double sum = 0.0;
  double prev = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double cur = std::pow(t[i], q / p);
    sum += std::pow(v[i] / top, q) * (cur - prev);
    prev = cur;
  }
  return top * std::pow(sum * p / q, 1.0 / q);
}

double lorentz_norm(const GridFunction& f, double p, double q) {
  return lorentz_norm(decreasing_rearrangement(f), p, q);
}

RearrangementProfile weighted_power_profile(const Grid& grid, double lambda, double cap) {
  if (!(lambda > 0.0 && lambda < grid.dim())) {
    throw PreconditionError("weighted_power_profile requires lambda in (0, n)");
  }
  if (!(cap > 0.0)) throw PreconditionError("weighted_power_profile requires a positive cap");
  std::vector<double> v(grid.size());
  const Point origin{0, 0, 0};
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double r = grid.periodic_distance(grid.coordinate(i), origin);
    v[i] = r == 0.0 ? cap : std::min(std::pow(r, -lambda), cap);
  }
  return decreasing_rearrangement(v, grid.cell_volume());
}

}  // namespace fracharm
