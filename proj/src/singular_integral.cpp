#include "fracharm/singular_integral.hpp"

#include <gsl/gsl_integration.h>
#include <gsl/gsl_sf_zeta.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "fracharm/errors.hpp"
#include "fracharm/multiplier.hpp"

namespace fracharm {

namespace {

constexpr int kImageShells2d = 6;

void check_order(double s) {
  if (!(s > 0.0 && s < 2.0)) {
    throw PreconditionError("singular integral order s must lie in (0,2)");
  }
}

void check_scheme(const SingularQuadratureScheme& scheme, double s) {
  if (!(scheme.exclusion_radius > 0.0)) {
    throw PreconditionError("exclusion_radius must be positive");
  }
  if (s >= 1.0 && scheme.symmetrization != Symmetrization::second_difference) {
    throw PreconditionError("s >= 1 requires the second-difference scheme");
  }
}

// Integral of |z|^{-e} over the plane outside the square [-a, a]^2, e > 2.
double square_exterior_integral(double a, double e) {
  gsl_integration_glfixed_table* table = gsl_integration_glfixed_table_alloc(64);
  gsl_function fn;
  double exponent = e - 2.0;
  fn.function = [](double t, void* p) { return std::pow(std::cos(t), *static_cast<double*>(p)); };
  fn.params = &exponent;
  const double angular = gsl_integration_glfixed(&fn, 0.0, std::numbers::pi / 4.0, table);
  gsl_integration_glfixed_table_free(table);
  return 8.0 * std::pow(a, 2.0 - e) / (e - 2.0) * angular;
}

// Kernel with offsets inside the exclusion radius removed.
std::vector<double> masked_kernel(const PeriodicKernel& kernel,
                                  const SingularQuadratureScheme& scheme) {
  const Grid& grid = kernel.grid();
  std::vector<double> k(kernel.values().begin(), kernel.values().end());
  const double r = scheme.exclusion_radius * grid.spacing();
  const Point origin{0, 0, 0};
  for (std::size_t i = 0; i < k.size(); ++i) {
    if (grid.periodic_distance(grid.coordinate(i), origin) < r) k[i] = 0.0;
  }
  return k;
}

// h^n sum_y K(x - y) g(y) for every x, via the transform.
std::vector<double> periodic_convolution(const Grid& grid, std::span<const double> kernel,
                                         const GridFunction& g) {
  std::vector<Complex> kc(kernel.begin(), kernel.end());
  const Spectrum fk = transform_forward(grid, kc);
  Spectrum fg = transform_forward(g);
  for (std::size_t i = 0; i < fg.coeffs.size(); ++i) fg.coeffs[i] *= fk.coeffs[i];
  const GridFunction out = transform_inverse_real(fg);
  return {out.values().begin(), out.values().end()};
}

// h^{2n} sum_x sum_y (v(x)-v(y)) (w(x)-w(y)) K(x-y)
double double_difference_sum(const GridFunction& v, const GridFunction& w,
                             std::span<const double> kernel) {
  const Grid& grid = v.grid();
  if (!(grid == w.grid())) throw PreconditionError("functions live on different grids");
  double total = 0.0;
  for (double k : kernel) total += k;
  const std::vector<double> kw = periodic_convolution(grid, kernel, w);
  const std::vector<double> kv = periodic_convolution(grid, kernel, v);
  const double hn = grid.cell_volume();
  double acc = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    // symmetrized so that the result is exactly symmetric in (v, w)
    acc += 2.0 * v[i] * w[i] * total * hn - v[i] * kw[i] - w[i] * kv[i];
  }
  return acc * hn;
}

std::string format_number(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

}  // namespace

PeriodicKernel PeriodicKernel::make(const Grid& grid, double exponent) {
  const int n = grid.dim();
  if (n > 2) throw PreconditionError("periodic kernel supports dim 1 and 2");
  if (!(exponent > n)) throw PreconditionError("kernel exponent must exceed the dimension");
  const double L = grid.box_length();
  std::vector<double> values(grid.size(), 0.0);
  if (n == 1) {
    for (std::size_t i = 1; i < grid.size(); ++i) {
      const double t = std::fabs(grid.coordinate(i)[0]) / L;
      values[i] = std::pow(L, -exponent) *
                  (gsl_sf_hzeta(exponent, t) + gsl_sf_hzeta(exponent, 1.0 - t));
    }
  } else {
    // explicit images up to shell J, the rest by the exterior integral
    const int J = kImageShells2d;
    const double tail = square_exterior_integral((J + 0.5) * L, exponent) / (L * L);
    for (std::size_t i = 1; i < grid.size(); ++i) {
      const Point y = grid.coordinate(i);
      double sum = 0.0;
      for (int a = -J; a <= J; ++a) {
        for (int b = -J; b <= J; ++b) {
          const double dx = y[0] + a * L, dy = y[1] + b * L;
          sum += std::pow(dx * dx + dy * dy, -0.5 * exponent);
        }
      }
      values[i] = sum + tail;
    }
  }
  return PeriodicKernel(grid, exponent, std::move(values));
}

double raw_singular_quadrature(const GridFunction& f, const PeriodicKernel& kernel,
                               std::size_t x, const SingularQuadratureScheme& scheme) {
  const Grid& grid = f.grid();
  if (!(grid == kernel.grid())) throw PreconditionError("kernel grid differs from function grid");
  if (x >= grid.size()) throw PreconditionError("evaluation point outside the grid");
  const double r = scheme.exclusion_radius * grid.spacing();
  const Point origin{0, 0, 0};
  const Index3 xi = grid.multi_index(x);
  double acc = 0.0;
  for (std::size_t j = 0; j < grid.size(); ++j) {
    const Point y = grid.coordinate(j);
    if (grid.periodic_distance(y, origin) < r) continue;
    const Index3 off = grid.signed_index(j);
    const Index3 plus{xi[0] + off[0], xi[1] + off[1], xi[2] + off[2]};
    if (scheme.symmetrization == Symmetrization::first_difference) {
      acc += (f[grid.flat_index(plus)] - f[x]) * kernel[j];
    } else {
      const Index3 minus{xi[0] - off[0], xi[1] - off[1], xi[2] - off[2]};
      acc += 0.5 * (f[grid.flat_index(plus)] + f[grid.flat_index(minus)] - 2.0 * f[x]) * kernel[j];
    }
  }
  return acc * grid.cell_volume();
}

CalibratedConstant calibrate_cns(const Grid& grid, double s,
                                 const SingularQuadratureScheme& scheme) {
  check_order(s);
  check_scheme(scheme, s);
  const double L = grid.box_length();
  const GridFunction reference = GridFunction::sample(grid, [L](const Point& p) {
    return std::cos(2.0 * std::numbers::pi * p[0] / L);
  });
  const PeriodicKernel kernel = PeriodicKernel::make(grid, grid.dim() + s);
  const double raw = raw_singular_quadrature(reference, kernel, 0, scheme);
  if (std::fabs(raw) < 1e-12) throw Error("degenerate calibration: raw quadrature below 1e-12");
  const double spectral = std::pow(1.0 / L, s);
  CalibratedConstant c;
  c.name = "c_{" + std::to_string(grid.dim()) + "," + format_number(s) + "}";
  c.value = spectral / (-raw);
  c.order = s;
  c.provenance = "spectral |xi|^s over negated raw quadrature on cos(2 pi x_1 / L) at the origin";
  c.grid = grid.to_json();
  if (!(c.value > 0.0) || !std::isfinite(c.value)) throw Error("calibrated constant is not positive");
  return c;
}

namespace {
void check_constant(const CalibratedConstant& c, const Grid& grid, double s) {
  if (!(c.value > 0.0) || c.grid.is_null()) {
    throw PreconditionError("uncalibrated constant: run calibrate_cns first");
  }
  if (c.grid != grid.to_json() || c.order != s) {
    throw PreconditionError("constant " + c.name + " was calibrated for a different grid or order");
  }
}
}  // namespace

double frac_lap_pointwise(const GridFunction& f, double s, std::size_t x,
                          const CalibratedConstant& c,
                          const SingularQuadratureScheme& scheme) {
  check_order(s);
  check_scheme(scheme, s);
  check_constant(c, f.grid(), s);
  const PeriodicKernel kernel = PeriodicKernel::make(f.grid(), f.grid().dim() + s);
  return -c.value * raw_singular_quadrature(f, kernel, x, scheme);
}

GridFunction frac_lap_quadrature(const GridFunction& f, double s,
                                 const CalibratedConstant& c,
                                 const SingularQuadratureScheme& scheme) {
  check_order(s);
  check_scheme(scheme, s);
  check_constant(c, f.grid(), s);
  const Grid& grid = f.grid();
  const PeriodicKernel kernel = PeriodicKernel::make(grid, grid.dim() + s);
  const std::vector<double> k = masked_kernel(kernel, scheme);
  double total = 0.0;
  for (double v : k) total += v;
  const std::vector<double> kf = periodic_convolution(grid, k, f);
  std::vector<double> out(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    out[i] = -c.value * (kf[i] - total * grid.cell_volume() * f[i]);
  }
  return GridFunction(grid, std::move(out));
}

std::size_t gagliardo_point_limit(int dim) {
  return dim == 1 ? std::size_t{1} << 13 : std::size_t{1} << 12;
}

namespace {

// sum over ordered pairs x != y of sum_d w_d |f_d(x) - f_d(y)|^2 |x - y|^-gamma h^{2n}
double weighted_difference_sum(const std::vector<GridFunction>& comps,
                               const std::vector<double>& weights, const DomainMask& domain,
                               double gamma) {
  const Grid& grid = domain.grid();
  const int n = grid.dim();
  std::vector<std::size_t> pts = domain.indices();
  // Above the point limit every stride-th point is used and the sum is
  // rescaled by (|D| / sample size)^2.
  double scale = 1.0;
  const std::size_t limit = gagliardo_point_limit(n);
  if (pts.size() > limit) {
    const std::size_t stride = (pts.size() + limit - 1) / limit;
    std::vector<std::size_t> sub;
    for (std::size_t i = 0; i < pts.size(); i += stride) sub.push_back(pts[i]);
    scale = std::pow(static_cast<double>(pts.size()) / static_cast<double>(sub.size()), 2);
    pts = std::move(sub);
  }

  const std::size_t m = pts.size();
  const std::size_t nd = comps.size();
  std::vector<double> vals(m * nd);
  std::vector<Point> coords(m);
  for (std::size_t p = 0; p < m; ++p) {
    coords[p] = grid.coordinate(pts[p]);
    for (std::size_t d = 0; d < nd; ++d) vals[p * nd + d] = comps[d][pts[p]];
  }
  const double L = grid.box_length();
  const double expo = -0.5 * gamma;
  double acc = 0.0;
  for (std::size_t a = 0; a < m; ++a) {
    for (std::size_t b = a + 1; b < m; ++b) {
      double dist2 = 0.0;
      for (int d = 0; d < n; ++d) {
        double diff = std::fabs(coords[a][d] - coords[b][d]);
        diff = std::min(diff, L - diff);
        dist2 += diff * diff;
      }
      double num = 0.0;
      for (std::size_t d = 0; d < nd; ++d) {
        const double q = vals[a * nd + d] - vals[b * nd + d];
        num += weights[d] * q * q;
      }
      acc += gamma == 0.0 ? num : num * std::pow(dist2, expo);
    }
  }
  const double hn = grid.cell_volume();
  return 2.0 * acc * hn * hn * scale;
}

}  // namespace

double double_difference_integral(const GridFunction& f, const DomainMask& domain, double gamma) {
  if (!(domain.grid() == f.grid())) throw PreconditionError("mask grid differs");
  if (!std::isfinite(gamma)) throw PreconditionError("double_difference_integral: gamma must be finite");
  return weighted_difference_sum({f}, {1.0}, domain, gamma);
}

double gagliardo_seminorm(const GridFunction& f, const DomainMask& domain, double s) {
  if (!(s >= 0.0)) throw PreconditionError("gagliardo_seminorm requires s >= 0");
  const Grid& grid = f.grid();
  if (!(domain.grid() == grid)) throw PreconditionError("mask grid differs");
  const int n = grid.dim();
  const int k = static_cast<int>(std::floor(s));
  const double frac = s - k;

  // derivative tensor as multi-indices with multiplicity k!/alpha!
  std::vector<GridFunction> derivs;
  std::vector<double> weights;
  for (const MultiIndex& a : multi_indices_of_order(n, k)) {
    derivs.push_back(partial_derivative(f, a));
    weights.push_back(factorial({k, 0, 0}) / factorial(a));
  }

  if (frac == 0.0) {
    double acc = 0.0;
    for (std::size_t i : domain.indices()) {
      for (std::size_t d = 0; d < derivs.size(); ++d) acc += weights[d] * derivs[d][i] * derivs[d][i];
    }
    return std::sqrt(acc * grid.cell_volume());
  }
  return std::sqrt(weighted_difference_sum(derivs, weights, domain, n + 2.0 * frac));
}

double bilinear_form(const GridFunction& v, const GridFunction& w, double s,
                     const CalibratedConstant& c) {
  check_order(s);
  check_constant(c, v.grid(), s);
  const PeriodicKernel kernel = PeriodicKernel::make(v.grid(), v.grid().dim() + s);
  return 0.5 * c.value * double_difference_sum(v, w, kernel.values());
}

double raw_gagliardo_energy(const GridFunction& f, double s) {
  if (!(s > 0.0 && s < 1.0)) throw PreconditionError("raw_gagliardo_energy requires s in (0,1)");
  const PeriodicKernel kernel = PeriodicKernel::make(f.grid(), f.grid().dim() + 2.0 * s);
  return double_difference_sum(f, f, kernel.values());
}

double equivalence_ratio(const GridFunction& f, double s) {
  if (!(s > 0.0 && s < 1.0)) throw PreconditionError("equivalence_ratio requires s in (0,1)");
  const double energy = raw_gagliardo_energy(f, s);
  if (!(energy > 0.0)) throw PreconditionError("equivalence_ratio: zero seminorm");
  const double spectral = l2_norm(frac_laplacian(f, s));
  return spectral * spectral / energy;
}

}  // namespace fracharm
