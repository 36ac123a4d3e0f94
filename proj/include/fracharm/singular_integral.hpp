#pragma once

// Real-space (singular integral) forms of the fractional Laplacian and the
// Gagliardo seminorms.  On the torus the kernel |y|^{-e} is replaced by its
// periodization sum_j |y + jL|^{-e}, which makes the quadrature a lattice
// multiplier that agrees with |xi|^s up to a calibrated constant.

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "fracharm/calibration.hpp"
#include "fracharm/grid.hpp"

namespace fracharm {

enum class Symmetrization { first_difference, second_difference };

struct SingularQuadratureScheme {
  // In units of h.  Offsets with |y| < exclusion_radius * h are skipped.
  double exclusion_radius = 0.5;
  Symmetrization symmetrization = Symmetrization::second_difference;
};

// Periodized |y|^{-exponent} sampled at every lattice offset (0 at y = 0).
// Dimensions 1 and 2 only.
class PeriodicKernel {
 public:
  static PeriodicKernel make(const Grid& grid, double exponent);

  const Grid& grid() const { return grid_; }
  double exponent() const { return exponent_; }
  double operator[](std::size_t offset) const { return values_[offset]; }
  std::span<const double> values() const { return values_; }

 private:
  PeriodicKernel(Grid grid, double exponent, std::vector<double> values)
      : grid_(std::move(grid)), exponent_(exponent), values_(std::move(values)) {}

  Grid grid_;
  double exponent_;
  std::vector<double> values_;
};

// (1/2) sum_{y != 0} (f(x+y) + f(x-y) - 2 f(x)) K(y) h^n, or the equivalent
// first-difference sum.  Nonpositive at a maximum of f.
double raw_singular_quadrature(const GridFunction& f, const PeriodicKernel& kernel,
                               std::size_t x, const SingularQuadratureScheme& scheme);

// c = spectral / (-raw) on cos(2 pi x_1 / L) at the origin.
CalibratedConstant calibrate_cns(const Grid& grid, double s,
                                 const SingularQuadratureScheme& scheme = {});

// -c * raw quadrature at grid point x.
double frac_lap_pointwise(const GridFunction& f, double s, std::size_t x,
                          const CalibratedConstant& c,
                          const SingularQuadratureScheme& scheme = {});
// Same at every grid point; one kernel evaluation shared across points.
GridFunction frac_lap_quadrature(const GridFunction& f, double s,
                                 const CalibratedConstant& c,
                                 const SingularQuadratureScheme& scheme = {});

// For s outside N: the double sum of |D^k f(z1) - D^k f(z2)|^2 /
// |z1 - z2|^{n + 2(s-k)} h^{2n} over D x D (k = floor s, minimum-image
// distance, diagonal excluded), square-rooted.  For s in N_0: ||D^s f||_{L2(D)}.
// D^k is the full tensor of k-th derivatives, computed spectrally.
double gagliardo_seminorm(const GridFunction& f, const DomainMask& domain, double s);

// Sum over ordered pairs x != y in D of |f(x) - f(y)|^2 |x - y|^-gamma h^{2n}
// (minimum-image distance), subsampled like the Gagliardo sum.
double double_difference_integral(const GridFunction& f, const DomainMask& domain, double gamma);

// Largest mask the O(|D|^2) sum accepts before subsampling.
std::size_t gagliardo_point_limit(int dim);

// (c/2) sum_x sum_y (v(x)-v(y)) (w(x)-w(y)) K(x-y) h^{2n}, the quadratic
// form of the operator |xi|^s.
double bilinear_form(const GridFunction& v, const GridFunction& w, double s,
                     const CalibratedConstant& c);

// sum_x sum_y (f(x)-f(y))^2 K(x-y) h^{2n} with K the periodized |y|^{-n-2s}.
double raw_gagliardo_energy(const GridFunction& f, double s);

// || |xi|^s f ||_2^2 / raw_gagliardo_energy(f, s).
double equivalence_ratio(const GridFunction& f, double s);

}  // namespace fracharm
