#include "fracharm/fields.hpp"

#include <cmath>
#include <random>

#include "fracharm/errors.hpp"

namespace fracharm {

namespace {

double psi(double t) { return t > 0.0 ? std::exp(-1.0 / t) : 0.0; }
double dpsi(double t) { return t > 0.0 ? psi(t) / (t * t) : 0.0; }
double ddpsi(double t) {
  return t > 0.0 ? psi(t) * (1.0 - 2.0 * t) / (t * t * t * t) : 0.0;
}

std::size_t max_abs_mode(const Grid& grid, std::size_t flat) {
  const Index3 k = grid.signed_index(flat);
  std::size_t m = 0;
  for (int d = 0; d < grid.dim(); ++d) {
    m = std::max(m, static_cast<std::size_t>(std::llabs(k[d])));
  }
  return m;
}

}  // namespace

double smooth_step(double t) {
  if (t <= 0.0) return 0.0;
  if (t >= 1.0) return 1.0;
  const double a = psi(t);
  const double b = psi(1.0 - t);
  return a / (a + b);
}

double smooth_step_derivative(double t) {
  if (t <= 0.0 || t >= 1.0) return 0.0;
  const double a = psi(t), b = psi(1.0 - t);
  const double da = dpsi(t), db = -dpsi(1.0 - t);
  const double s = a + b;
  return (da * s - a * (da + db)) / (s * s);
}

double smooth_step_second_derivative(double t) {
  if (t <= 0.0 || t >= 1.0) return 0.0;
  const double a = psi(t), b = psi(1.0 - t);
  const double da = dpsi(t), db = -dpsi(1.0 - t);
  const double dda = ddpsi(t), ddb = ddpsi(1.0 - t);
  const double s = a + b, ds = da + db, dds = dda + ddb;
  // (a/s)'' = a''/s - 2 a' s'/s^2 - a s''/s^2 + 2 a s'^2/s^3
  return dda / s - 2.0 * da * ds / (s * s) - a * dds / (s * s) +
         2.0 * a * ds * ds / (s * s * s);
}

double bump_profile(double radius, double inner, double outer) {
  if (!(outer > inner) || inner < 0.0) {
    throw PreconditionError("bump_profile requires 0 <= inner < outer");
  }
  return smooth_step((outer - radius) / (outer - inner));
}

GridFunction smooth_bump(const Grid& grid, const Point& center, double inner,
                         double outer) {
  return GridFunction::sample(grid, [&](const Point& p) {
    return bump_profile(grid.periodic_distance(p, center), inner, outer);
  });
}

GridFunction band_limited_field(const Grid& grid, std::uint64_t seed,
                                std::size_t max_mode) {
  if (max_mode == 0) max_mode = grid.points_per_axis() / 8;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> white(grid.size());
  for (auto& w : white) w = normal(rng);
  Spectrum spec = transform_forward(GridFunction(grid, std::move(white)));
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (max_abs_mode(grid, i) > max_mode) spec.coeffs[i] = 0.0;
  }
  // Drop the Nyquist column as well so the field is exactly real.
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (max_abs_mode(grid, i) >= grid.points_per_axis() / 2) spec.coeffs[i] = 0.0;
  }
  GridFunction f = transform_inverse_real(spec);
  const double norm = l2_norm(f);
  if (norm == 0.0) throw Error("band_limited_field produced a zero field");
  return f * (1.0 / norm);
}

GridFunction windowed_field(const Grid& grid, std::uint64_t seed,
                            const Point& center, double radius,
                            std::size_t max_mode) {
  GridFunction f = band_limited_field(grid, seed, max_mode) *
                   smooth_bump(grid, center, 0.5 * radius, radius);
  const double norm = l2_norm(f);
  if (norm == 0.0) throw Error("windowed_field produced a zero field");
  return f * (1.0 / norm);
}

double high_mode_fraction(const GridFunction& f, std::size_t max_mode) {
  const Spectrum spec = transform_forward(f);
  double total = 0.0, high = 0.0;
  for (std::size_t i = 0; i < spec.coeffs.size(); ++i) {
    const double w = std::norm(spec.coeffs[i]);
    total += w;
    if (max_abs_mode(f.grid(), i) > max_mode) high += w;
  }
  return total > 0.0 ? high / total : 0.0;
}

GridFunction band_project(const GridFunction& f, std::size_t max_mode) {
  const Grid& g = f.grid();
  if (max_mode == 0) max_mode = g.points_per_axis() / 8;
  Spectrum spec = transform_forward(f);
  for (std::size_t i = 0; i < g.size(); ++i) {
    const std::size_t m = max_abs_mode(g, i);
    if (i == 0 || m > max_mode || m >= g.points_per_axis() / 2) spec.coeffs[i] = 0.0;
  }
  return transform_inverse_real(spec);
}

}  // namespace fracharm
