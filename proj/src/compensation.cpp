#include "fracharm/compensation.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "fracharm/errors.hpp"
#include "fracharm/fields.hpp"
#include "fracharm/lorentz.hpp"
#include "fracharm/multiplier.hpp"

namespace fracharm {

namespace {

double norm_of(const Point& p, int dim) {
  double s = 0.0;
  for (int d = 0; d < dim; ++d) s += p[d] * p[d];
  return std::sqrt(s);
}

bool usable(const Point& p, int dim) {
  const double r = norm_of(p, dim);
  return std::isfinite(r) && r > 0.0;
}

void check_guard(const GridFunction& f, const char* which) {
  const double frac = aliasing_fraction(f);
  if (frac > kAliasingTolerance) {
    std::ostringstream msg;
    msg << "aliasing guard: factor " << which << " carries spectral mass fraction " << frac
        << " above N/4 (limit " << kAliasingTolerance << ")";
    throw PreconditionError(msg.str());
  }
}

std::vector<Complex> weighted_moduli(const Spectrum& s, double power) {
  std::vector<Complex> out(s.coeffs.size());
  for (std::size_t i = 1; i < out.size(); ++i) {
    out[i] = std::pow(s.grid.frequency_norm(i), power) * std::abs(s.coeffs[i]);
  }
  return out;
}

Point unit_direction(std::mt19937_64& rng, int dim) {
  std::normal_distribution<double> gauss;
  for (;;) {
    Point p{0, 0, 0};
    for (int d = 0; d < dim; ++d) p[d] = gauss(rng);
    const double r = norm_of(p, dim);
    if (r > 1e-12) {
      for (int d = 0; d < dim; ++d) p[d] /= r;
      return p;
    }
  }
}

template <class Ratio>
ScanResult scan(int dim, std::size_t samples, std::uint64_t seed, Ratio ratio) {
  if (dim < 1 || dim > 3) throw PreconditionError("scan dimension must be 1, 2 or 3");
  if (samples == 0) throw PreconditionError("scan needs at least one sample");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> exponent(-3.0, 3.0);
  ScanResult res;
  res.samples = samples;
  for (std::size_t i = 0; i < samples; ++i) {
    const Point y = unit_direction(rng, dim);
    Point x = unit_direction(rng, dim);
    const double radius = std::pow(10.0, exponent(rng));
    for (int d = 0; d < dim; ++d) x[d] *= radius;
    const double r = ratio(x, y);
    if (r > res.sup) {
      res.sup = r;
      res.x_at_sup = x;
      res.y_at_sup = y;
    }
  }
  return res;
}

}  // namespace

double aliasing_fraction(const GridFunction& f) {
  const Spectrum s = transform_forward(f);
  const Grid& g = f.grid();
  const auto limit = static_cast<std::ptrdiff_t>(g.points_per_axis() / 4);
  double total = 0.0, high = 0.0;
  for (std::size_t i = 0; i < s.coeffs.size(); ++i) {
    const double m = std::norm(s.coeffs[i]);
    total += m;
    const Index3 k = g.signed_index(i);
    for (int d = 0; d < g.dim(); ++d) {
      if (std::abs(k[d]) > limit) {
        high += m;
        break;
      }
    }
  }
  return total > 0.0 ? high / total : 0.0;
}

SphereValuedMap SphereValuedMap::make(std::vector<GridFunction> components) {
  if (components.empty()) throw PreconditionError("sphere-valued map needs at least one component");
  const Grid& g = components.front().grid();
  for (const auto& c : components) {
    if (!(c.grid() == g)) throw PreconditionError("sphere-valued map components live on different grids");
  }
  for (std::size_t i = 0; i < g.size(); ++i) {
    double s = 0.0;
    for (const auto& c : components) s += c[i] * c[i];
    if (std::fabs(s - 1.0) > 1e-12) {
      throw PreconditionError("sphere-valued map: |u| deviates from 1 at grid point " +
                              std::to_string(i));
    }
  }
  return SphereValuedMap(std::move(components));
}

SphereValuedMap SphereValuedMap::from_phase(const GridFunction& phi) {
  const Grid& g = phi.grid();
  std::vector<double> c(g.size()), s(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    c[i] = std::cos(phi[i]);
    s[i] = std::sin(phi[i]);
  }
  return make({GridFunction(g, std::move(c)), GridFunction(g, std::move(s))});
}

SphereValuedMap SphereValuedMap::normalized(const std::vector<GridFunction>& components) {
  if (components.empty()) throw PreconditionError("sphere-valued map needs at least one component");
  const Grid& g = components.front().grid();
  std::vector<std::vector<double>> out(components.size(), std::vector<double>(g.size()));
  for (std::size_t i = 0; i < g.size(); ++i) {
    double s = 0.0;
    for (const auto& c : components) s += c[i] * c[i];
    const double r = std::sqrt(s);
    if (!(r > 1e-8)) throw PreconditionError("cannot normalize a vector field that vanishes");
    for (std::size_t j = 0; j < components.size(); ++j) out[j][i] = components[j][i] / r;
  }
  std::vector<GridFunction> comps;
  for (auto& v : out) comps.emplace_back(g, std::move(v));
  return make(std::move(comps));
}

GridFunction commutator_H(const GridFunction& u, const GridFunction& v,
                          std::optional<double> order) {
  if (!(u.grid() == v.grid())) throw PreconditionError("commutator_H: factors live on different grids");
  check_guard(u, "u");
  check_guard(v, "v");
  const double s = order.value_or(0.5 * u.grid().dim());
  return frac_laplacian(u * v, s) - u * frac_laplacian(v, s) - v * frac_laplacian(u, s);
}

double defect_ratio(const DefectSample& sample, int dim) {
  const double p = sample.p, theta = sample.theta;
  if (!usable(sample.x, dim) || !usable(sample.xi, dim) || !(p > 0.0) ||
      !(theta >= 0.0 && theta <= 1.0)) {
    throw PreconditionError("degenerate defect sample: need x, xi != 0, p > 0, theta in [0,1]");
  }
  Point diff{};
  for (int d = 0; d < dim; ++d) diff[d] = sample.x[d] - sample.xi[d];
  const double ax = norm_of(sample.x, dim), axi = norm_of(sample.xi, dim);
  const double num = std::fabs(std::pow(norm_of(diff, dim), p) - std::pow(axi, p) - std::pow(ax, p));
  const double den = p <= 1.0
      ? std::pow(ax, p * theta) * std::pow(axi, p * (1.0 - theta))
      : std::pow(ax, p - 1.0) * axi + std::pow(axi, p - 1.0) * ax;
  return num / den;
}

double triangle_ratio(const Point& x, const Point& y, double p, int dim) {
  if (!usable(x, dim) || !usable(y, dim) || !(p > 0.0)) {
    throw PreconditionError("degenerate sample: need x, y != 0 and p > 0");
  }
  Point diff{};
  for (int d = 0; d < dim; ++d) diff[d] = x[d] - y[d];
  const double ax = norm_of(x, dim), ay = norm_of(y, dim);
  const double num = std::fabs(std::pow(norm_of(diff, dim), p) - std::pow(ay, p));
  const double den = p < 1.0 ? std::pow(ax, p) : std::pow(ax, p) + ax * std::pow(ay, p - 1.0);
  return num / den;
}

ScanResult defect_scan(int dim, double p, double theta, std::size_t samples,
                       std::uint64_t seed) {
  return scan(dim, samples, seed, [&](const Point& x, const Point& xi) {
    return defect_ratio({x, xi, p, theta}, dim);
  });
}

ScanResult triangle_scan(int dim, double p, std::size_t samples, std::uint64_t seed) {
  return scan(dim, samples, seed,
              [&](const Point& x, const Point& y) { return triangle_ratio(x, y, p, dim); });
}

std::vector<Complex> lattice_convolution(const Grid& grid, const std::vector<Complex>& a,
                                         const std::vector<Complex>& b) {
  if (a.size() != grid.size() || b.size() != grid.size()) {
    throw PreconditionError("lattice_convolution: table sizes do not match the grid");
  }
  const std::vector<Complex> fa = transform_inverse(Spectrum{grid, a});
  std::vector<Complex> prod = transform_inverse(Spectrum{grid, b});
  for (std::size_t i = 0; i < prod.size(); ++i) prod[i] *= fa[i];
  return transform_forward(grid, prod).coeffs;
}

DominationReport fourier_domination_check(const GridFunction& u, const GridFunction& v) {
  const Grid& g = u.grid();
  const int n = g.dim();
  const Spectrum h = transform_forward(commutator_H(u, v));
  const Spectrum su = transform_forward(u), sv = transform_forward(v);
  std::vector<Complex> den;
  if (n <= 2) {
    den = lattice_convolution(g, weighted_moduli(su, n / 4.0), weighted_moduli(sv, n / 4.0));
  } else {
    const double a = (n - 2) / 2.0;
    den = lattice_convolution(g, weighted_moduli(su, a), weighted_moduli(sv, 1.0));
    const auto second = lattice_convolution(g, weighted_moduli(su, 1.0), weighted_moduli(sv, a));
    for (std::size_t i = 0; i < den.size(); ++i) den[i] += second[i];
  }
  double dmax = 0.0, hmax = 0.0;
  for (std::size_t i = 0; i < den.size(); ++i) {
    dmax = std::max(dmax, den[i].real());
    hmax = std::max(hmax, std::abs(h.coeffs[i]));
  }
  DominationReport rep;
  if (!(dmax > 0.0)) {
    double scale = 0.0;
    for (const auto& c : su.coeffs) scale = std::max(scale, std::abs(c));
    for (const auto& c : sv.coeffs) scale = std::max(scale, std::abs(c));
    if (hmax <= 1e-12 * scale * scale + 1e-300) return rep;
    throw PreconditionError("fourier_domination_check: dominating convolution is identically negligible");
  }
  for (std::size_t i = 0; i < den.size(); ++i) {
    if (den[i].real() <= 1e-12 * dmax) continue;
    rep.max_ratio = std::max(rep.max_ratio, std::abs(h.coeffs[i]) / den[i].real());
    ++rep.modes_compared;
  }
  return rep;
}

HNormRatios h_norm_ratios(const GridFunction& u, const GridFunction& v) {
  const double s = 0.5 * u.grid().dim();
  const GridFunction du = frac_laplacian(u, s), dv = frac_laplacian(v, s);
  const double nu = l2_norm(du), nv = l2_norm(dv);
  if (!(nu > 0.0) || !(nv > 0.0)) throw PreconditionError("h_norm_ratio: |xi|^{n/2} u or v vanishes");
  const GridFunction h = commutator_H(u, v);
  const double nh = l2_norm(h);
  HNormRatios r;
  r.l2 = nh / (nu * nv);
  r.lorentz21 = lorentz_norm(decreasing_rearrangement(transform_forward(h)), 2.0, 1.0) / (nu * nv);
  r.weak = nh / (lorentz_norm(decreasing_rearrangement(transform_forward(du)), 2.0, INFINITY) * nv);
  return r;
}

double h_norm_ratio(const GridFunction& u, const GridFunction& v) {
  return h_norm_ratios(u, v).l2;
}

namespace {

GridFunction band_inverse(const GridFunction& f, std::size_t max_mode, double s) {
  return inv_frac_laplacian(band_project(f, max_mode), s, ZeroModePolicy::project_mean_first);
}

// One power-iteration sweep for u -> H(u, v) with v fixed; returns the
// maximizer u with ||D u|| = 1.
GridFunction best_partner(const GridFunction& start, const GridFunction& v, std::size_t max_mode, double s,
                          double tolerance) {
  const GridFunction dv = frac_laplacian(v, s);
  GridFunction u = start * (1.0 / l2_norm(frac_laplacian(start, s)));
  double value = l2_norm(commutator_H(u, v));
  for (int it = 0; it < 500; ++it) {
    const GridFunction w = commutator_H(u, v);
    // adjoint of a -> H(D^-1 a, v), then back to u = D^-1 a
    const GridFunction a = band_inverse(v * frac_laplacian(w, s) - dv * w - frac_laplacian(v * w, s), max_mode, s);
    GridFunction next = band_inverse(a, max_mode, s);
    const double norm = l2_norm(frac_laplacian(next, s));
    if (!(norm > 0.0)) break;
    next = next * (1.0 / norm);
    const double nv = l2_norm(commutator_H(next, v));
    if (!(nv > value)) break;
    const bool done = nv <= value * (1.0 + tolerance);
    u = next, value = nv;
    if (done) break;
  }
  return u;
}

}  // namespace

HNormExtremal h_norm_extremal(const GridFunction& u0, const GridFunction& v0, std::size_t max_mode,
                              double tolerance, int max_rounds) {
  if (!(u0.grid() == v0.grid())) throw PreconditionError("h_norm_extremal: fields live on different grids");
  const Grid& g = u0.grid();
  if (max_mode == 0) max_mode = g.points_per_axis() / 8;
  if (max_mode >= g.points_per_axis() / 2) throw PreconditionError("h_norm_extremal: max_mode must be below N/2");
  const double s = 0.5 * g.dim();
  const GridFunction pu = band_inverse(frac_laplacian(u0, s), max_mode, s);
  const GridFunction pv = band_inverse(frac_laplacian(v0, s), max_mode, s);
  HNormExtremal r{h_norm_ratio(pu, pv), pu, pv, 0};
  for (r.rounds = 1; r.rounds <= max_rounds; ++r.rounds) {
    const GridFunction u = best_partner(r.u, r.v, max_mode, s, tolerance);
    const GridFunction v = best_partner(r.v, u, max_mode, s, tolerance);
    const double ratio = h_norm_ratio(u, v);
    if (!(ratio > r.ratio)) break;
    const bool done = ratio <= r.ratio * (1.0 + tolerance);
    r.u = u, r.v = v, r.ratio = ratio;
    if (done) break;
  }
  r.u = r.u * (1.0 / l2_norm(frac_laplacian(r.u, s)));
  r.v = r.v * (1.0 / l2_norm(frac_laplacian(r.v, s)));
  return r;
}

double structure_identity_residual(const SphereValuedMap& u, const GridFunction& eta) {
  if (!(eta.grid() == u.grid())) throw PreconditionError("cutoff and map live on different grids");
  const double s = 0.5 * eta.grid().dim();
  GridFunction acc = -0.5 * frac_laplacian(eta * eta, s);
  for (const GridFunction& ui : u.components()) {
    const GridFunction w = eta * ui;
    acc = acc + w * frac_laplacian(w, s) + 0.5 * commutator_H(w, w);
  }
  return l2_norm(acc);
}

}  // namespace fracharm
