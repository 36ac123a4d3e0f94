#pragma once

// Seeded test fields and the smooth bump profiles used as windows.

#include <cstdint>

#include "fracharm/grid.hpp"

namespace fracharm {

// C-infinity step: 0 for t <= 0, 1 for t >= 1, built from exp(-1/t).
double smooth_step(double t);
double smooth_step_derivative(double t);
double smooth_step_second_derivative(double t);

// Radial profile: 1 on |x| <= inner, 0 on |x| >= outer.
double bump_profile(double radius, double inner, double outer);

GridFunction smooth_bump(const Grid& grid, const Point& center, double inner,
                         double outer);

// Gaussian field with every mode |k|_inf > max_mode removed, normalized to
// unit L2 norm.  max_mode = 0 selects the default cutoff N/8.
GridFunction band_limited_field(const Grid& grid, std::uint64_t seed,
                                std::size_t max_mode = 0);

// band_limited_field times smooth_bump(center, radius/2, radius), then
// renormalized.  Supported in the open ball B_radius(center).
GridFunction windowed_field(const Grid& grid, std::uint64_t seed,
                            const Point& center, double radius,
                            std::size_t max_mode = 0);

// Fraction of the spectral L2 mass carried by modes with |k|_inf > max_mode.
double high_mode_fraction(const GridFunction& f, std::size_t max_mode);

// Keeps the modes 0 < |k|_inf <= max_mode (Nyquist excluded); the span of
// mean-free band_limited_field draws.  max_mode = 0 selects N/8.
GridFunction band_project(const GridFunction& f, std::size_t max_mode = 0);

}  // namespace fracharm
