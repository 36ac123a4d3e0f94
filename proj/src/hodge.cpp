#include "fracharm/hodge.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>

#include "fracharm/errors.hpp"
#include "fracharm/fields.hpp"
#include "fracharm/krylov.hpp"
#include "fracharm/numerics.hpp"

namespace fracharm {

namespace {

GridFunction extend(const Grid& g, const std::vector<std::size_t>& idx, const Vector& x) {
  std::vector<double> full(g.size(), 0.0);
  for (std::size_t i = 0; i < idx.size(); ++i) full[idx[i]] = x[static_cast<Eigen::Index>(i)];
  return GridFunction(g, std::move(full));
}

Vector restrict_to(const GridFunction& f, const std::vector<std::size_t>& idx) {
  Vector y(static_cast<Eigen::Index>(idx.size()));
  for (std::size_t i = 0; i < idx.size(); ++i) y[static_cast<Eigen::Index>(i)] = f[idx[i]];
  return y;
}

// ||D^s e||_2 for the indicator e of one grid point
double point_mass_norm(const Grid& g, double s) {
  std::vector<double> e(g.size(), 0.0);
  e[0] = 1.0;
  return l2_norm(frac_laplacian(GridFunction(g, std::move(e)), s));
}

std::string sci(double v) {
  std::ostringstream os;
  os << std::scientific << v;
  return os.str();
}

void finish_decay(HarmonicDecayReport& rep) {
  rep.constant = rep.ratios.front() * std::pow(rep.lambdas.front(), 0.25);
  for (std::size_t i = 0; i < rep.lambdas.size(); ++i) {
    const double bound = rep.constant * std::pow(rep.lambdas[i], -0.25);
    rep.worst = std::max(rep.worst, bound > 0.0 ? rep.ratios[i] / bound : 0.0);
  }
  rep.pass = rep.worst <= kHarmonicSlack;
}

}  // namespace

double hodge_energy(const GridFunction& f, const GridFunction& phi, double s) {
  const double e = l2_norm(frac_laplacian(phi, s) - f);
  return e * e;
}

HodgeDecomposition hodge_decompose(const GridFunction& f, const DomainMask& domain, double s,
                                   int max_iterations, double tolerance) {
  const Grid& g = f.grid();
  if (!(domain.grid() == g)) throw PreconditionError("hodge_decompose: mask and field grids differ");
  if (!(s > 0.0)) throw PreconditionError("hodge_decompose: need s > 0");
  if (domain.count() == 0) throw PreconditionError("hodge_decompose: empty mask");
  if ((domain.count() << g.dim()) > g.size()) {
    throw PreconditionError("hodge_decompose: mask exceeds 2^-n of the box; enlarge the padding");
  }
  const std::vector<std::size_t> idx = domain.indices();
  const LinearOperator a{static_cast<Eigen::Index>(idx.size()),
                         [&g, &idx, s](const Vector& x, Vector& y) {
                           y = restrict_to(frac_laplacian(extend(g, idx, x), 2 * s), idx);
                         }};
  const Vector rhs = restrict_to(frac_laplacian(f, s), idx);
  const CGResult cg = conjugate_gradient(a, rhs, tolerance, max_iterations);
  if (!cg.converged) {
    throw ConvergenceError("hodge_decompose: relative gradient " + sci(cg.relative_residual) +
                           " after " + std::to_string(cg.iterations) + " iterations");
  }
  GridFunction phi = extend(g, idx, cg.x).with_support(domain);
  const GridFunction dphi = frac_laplacian(phi, s);
  GridFunction h = f - dphi;

  HodgeDecomposition out{f, phi, h, s};
  out.iterations = cg.iterations;
  out.relative_gradient = cg.relative_residual;
  const double nf = l2_norm(f);
  const double nh = l2_norm(h);
  if (nf > 0.0) {
    out.residual = l2_norm(f - dphi - h) / nf;
    out.energy_ratio = (nh + l2_norm(dphi)) / nf;
  }
  if (nh > 0.0) {
    const GridFunction dh = frac_laplacian(h, s);
    double worst = 0.0;
    for (std::size_t i : idx) worst = std::max(worst, std::abs(dh[i]));
    out.orthogonality = worst * g.cell_volume() / (nh * point_mass_norm(g, s));
  }
  return out;
}

HarmonicDecayReport harmonic_decay_check(const GridFunction& f, double r, const Point& x,
                                         std::vector<double> lambdas) {
  if (lambdas.empty()) throw PreconditionError("harmonic_decay_check: no lambdas");
  std::sort(lambdas.begin(), lambdas.end());
  const Grid& g = f.grid();
  const double s = 0.5 * g.dim();
  const DomainMask inner = DomainMask::ball(g, x, r);
  HarmonicDecayReport rep;
  rep.lambdas = lambdas;
  for (double lam : lambdas) {
    const HodgeDecomposition dec = hodge_decompose(f, DomainMask::ball(g, x, lam * r), s);
    if (dec.orthogonality > 1e-8) {
      throw PreconditionError("harmonic_decay_check: remainder not orthogonal (" +
                              sci(dec.orthogonality) + ")");
    }
    const double nh = l2_norm(dec.h);
    rep.ratios.push_back(nh > 0.0 ? l2_norm(dec.h, &inner) / nh : 0.0);
  }
  finish_decay(rep);
  return rep;
}

double harmonic_ratio_sup(const Grid& g, double r, const Point& x, double lambda) {
  if (!(r > 0.0 && lambda >= 1.0)) throw PreconditionError("harmonic_ratio_sup: need r > 0, lambda >= 1");
  const DomainMask inner = DomainMask::ball(g, x, r);
  const DomainMask outer = DomainMask::ball(g, x, lambda * r);
  const std::vector<std::size_t> idx = inner.indices();
  const double s = 0.5 * g.dim();
  const auto m = static_cast<Eigen::Index>(idx.size());
  const LinearOperator a{m, [&](const Vector& v, Vector& y) {
                           const GridFunction f = extend(g, idx, v);
                           y = restrict_to(hodge_decompose(f, outer, s, kHodgeIterationCap, 1e-12).h, idx);
                         }};
  const LinearOperator id{m, [](const Vector& v, Vector& y) { y = v; }};
  return std::sqrt(generalized_power_iteration(a, id, Vector::Ones(m)).value);
}

HarmonicDecayReport harmonic_decay_sup(const Grid& grid, double r, const Point& x,
                                       std::vector<double> lambdas) {
  if (lambdas.empty()) throw PreconditionError("harmonic_decay_sup: no lambdas");
  std::sort(lambdas.begin(), lambdas.end());
  HarmonicDecayReport rep;
  rep.lambdas = lambdas;
  for (double lam : lambdas) rep.ratios.push_back(harmonic_ratio_sup(grid, r, x, lam));
  finish_decay(rep);
  return rep;
}

double pairing(const GridFunction& a, const GridFunction& b, double s, double t) {
  return inner_product(frac_laplacian(a, s + t), b);
}

PairingDecayReport disjoint_pairing_decay(const Grid& grid, const PairingGeometry& geo,
                                          double s, double t,
                                          const std::vector<double>& distances) {
  if (distances.size() < 3) throw PreconditionError("disjoint_pairing_decay: need at least 3 distances");
  if (!(s >= 0.0 && t >= 0.0)) throw PreconditionError("disjoint_pairing_decay: need s, t >= 0");
  const double h = grid.spacing();
  const double dmax = *std::max_element(distances.begin(), distances.end());
  if (geo.radius_a + dmax + 2 * geo.radius_b > grid.box_length() / 3.0) {
    throw PreconditionError("disjoint_pairing_decay: configuration occupies more than 1/3 of the box");
  }
  const GridFunction a = smooth_bump(grid, geo.center, 0.5 * geo.radius_a, geo.radius_a);
  const GridFunction da = frac_laplacian(a, s + t);
  const double na = lp_norm(a, 1.0);
  const int n = grid.dim();
  PairingDecayReport rep;
  rep.expected_slope = -(n + s + t);
  for (double d : distances) {
    if (!(d >= 4 * h)) throw PreconditionError("disjoint_pairing_decay: gap below 4 grid spacings");
    Point cb = geo.center;
    cb[0] += geo.radius_a + d + geo.radius_b;
    const GridFunction b = geo.scale_b * smooth_bump(grid, cb, 0.5 * geo.radius_b, geo.radius_b);
    const DomainMask near = DomainMask::ball(grid, geo.center, geo.radius_a + d);
    if (b.restricted(near).max_abs() > 1e-14 * b.max_abs()) {
      throw PreconditionError("disjoint_pairing_decay: supports not disjoint");
    }
    const double v = std::abs(inner_product(da, b));
    rep.distances.push_back(d);
    rep.values.push_back(v);
    rep.prefactors.push_back(v * std::pow(d, n + s + t) / (na * lp_norm(b, 1.0)));
  }
  rep.slope = loglog_slope(rep.distances, rep.values);
  return rep;
}

GridFunction localization_representative(const GridFunction& b, const Point& x, double gamma,
                                         double d) {
  const Grid& g = b.grid();
  if (!(gamma > 0.0 && d > 0.0)) throw PreconditionError("localization_representative: need gamma, d > 0");
  const DomainMask near = DomainMask::ball(g, x, gamma + d);
  if (b.restricted(near).max_abs() > 1e-14 * b.max_abs()) {
    throw PreconditionError("localization_representative: b does not vanish on B_{gamma+d}(x)");
  }
  // Evaluating the functional on the orthonormal point basis of B_gamma(x)
  // gives the coefficients of D^{n/2} b there.
  const DomainMask ball = DomainMask::ball(g, x, gamma);
  return frac_laplacian(b, 0.5 * g.dim()).restricted(ball).with_support(ball);
}

LocalNormResult local_norm_recovery(const GridFunction& v, double r, const Point& x,
                                    double lambda) {
  const Grid& g = v.grid();
  if (!(r > 0.0 && lambda >= 1.0)) throw PreconditionError("local_norm_recovery: need r > 0, lambda >= 1");
  const DomainMask inner = DomainMask::ball(g, x, r);
  if (v.restricted(inner.complement()).max_abs() > 1e-14 * v.max_abs()) {
    throw PreconditionError("local_norm_recovery: v is not supported in B_r(x)");
  }
  const DomainMask outer = DomainMask::ball(g, x, lambda * r);
  if ((outer.count() << g.dim()) > g.size()) {
    throw PreconditionError("local_norm_recovery: B_{lambda r} exceeds the padding");
  }
  LocalNormResult out;
  out.local_norm = l2_norm(v, &inner);
  if (out.local_norm == 0.0) return out;
  // The sup is the norm of the projection of v onto D^{n/2} of functions
  // supported in the outer ball.
  const HodgeDecomposition dec = hodge_decompose(v, outer, 0.5 * g.dim());
  out.dual_norm = l2_norm(v - dec.h);
  out.ratio = out.local_norm / out.dual_norm;
  return out;
}

ProductNormResult lower_order_product_norm(const GridFunction& u, const GridFunction& v, double s,
                                           const FrequencySymbol& m1, const FrequencySymbol& m2) {
  const Grid& g = u.grid();
  const double n = g.dim();
  if (!(s > 0.0 && s < 0.5 * n)) throw PreconditionError("lower_order_product_norm: need s in (0, n/2)");
  if (!(v.grid() == g)) throw PreconditionError("lower_order_product_norm: grids differ");
  for (const GridFunction* f : {&u, &v}) {
    if (std::abs(f->mean()) > 1e-12 * std::max(1.0, f->max_abs())) {
      throw PreconditionError("lower_order_product_norm: inputs must have mean zero");
    }
  }
  const GridFunction a = apply_symbol(inv_frac_laplacian(u, 0.5 * n - s, ZeroModePolicy::project_mean_first), m1);
  const GridFunction b = apply_symbol(inv_frac_laplacian(v, s, ZeroModePolicy::project_mean_first), m2);
  ProductNormResult out;
  out.norm = l2_norm(a * b);
  const double denom = l2_norm(u) * l2_norm(v);
  out.ratio = denom > 0.0 ? out.norm / denom : 0.0;
  return out;
}

namespace {

FrequencySymbol adjoint(const FrequencySymbol& m) {
  return FrequencySymbol::custom(
      m.dim(), [m](const Point& xi) { return std::conj(m(xi)); }, m.degree(), m.real(), m.id() + "*");
}

// Band-limited maximizer of ||A x * w||_2 / ||x||_2 for the fixed weight w,
// A = m D^-t, by power iteration from `start`.
GridFunction best_factor(const GridFunction& start, const GridFunction& w, double t, const FrequencySymbol& m,
                         const FrequencySymbol& m_adj, std::size_t max_mode, double tolerance) {
  auto forward = [&](const GridFunction& x) {
    return apply_symbol(inv_frac_laplacian(x, t, ZeroModePolicy::project_mean_first), m) * w;
  };
  GridFunction x = start * (1.0 / l2_norm(start));
  double value = l2_norm(forward(x));
  for (int it = 0; it < 500; ++it) {
    const GridFunction y = forward(x) * w;
    GridFunction next =
        band_project(inv_frac_laplacian(apply_symbol(y, m_adj), t, ZeroModePolicy::project_mean_first), max_mode);
    const double norm = l2_norm(next);
    if (!(norm > 0.0)) break;
    next = next * (1.0 / norm);
    const double nv = l2_norm(forward(next));
    if (!(nv > value)) break;
    const bool done = nv <= value * (1.0 + tolerance);
    x = next, value = nv;
    if (done) break;
  }
  return x;
}

}  // namespace

ProductNormExtremal lower_order_product_extremal(const GridFunction& u0, const GridFunction& v0, double s,
                                                 const FrequencySymbol& m1, const FrequencySymbol& m2,
                                                 std::size_t max_mode, double tolerance, int max_rounds) {
  const Grid& g = u0.grid();
  const double n = g.dim();
  if (!(s > 0.0 && s < 0.5 * n)) throw PreconditionError("lower_order_product_extremal: need s in (0, n/2)");
  if (!(v0.grid() == g)) throw PreconditionError("lower_order_product_extremal: grids differ");
  if (max_mode == 0) max_mode = g.points_per_axis() / 8;
  if (max_mode >= g.points_per_axis() / 2) {
    throw PreconditionError("lower_order_product_extremal: max_mode must be below N/2");
  }
  const FrequencySymbol a1 = adjoint(m1), a2 = adjoint(m2);
  auto image = [](const GridFunction& x, double t, const FrequencySymbol& m) {
    return apply_symbol(inv_frac_laplacian(x, t, ZeroModePolicy::project_mean_first), m);
  };
  const GridFunction pu = band_project(u0, max_mode), pv = band_project(v0, max_mode);
  ProductNormExtremal r{lower_order_product_norm(pu, pv, s, m1, m2).ratio, pu * (1.0 / l2_norm(pu)),
                        pv * (1.0 / l2_norm(pv)), 0};
  for (r.rounds = 1; r.rounds <= max_rounds; ++r.rounds) {
    const GridFunction u = best_factor(r.u, image(r.v, s, m2), 0.5 * n - s, m1, a1, max_mode, tolerance);
    const GridFunction v = best_factor(r.v, image(u, 0.5 * n - s, m1), s, m2, a2, max_mode, tolerance);
    const double ratio = lower_order_product_norm(u, v, s, m1, m2).ratio;
    if (!(ratio > r.ratio)) break;
    const bool done = ratio <= r.ratio * (1.0 + tolerance);
    r.u = u, r.v = v, r.ratio = ratio;
    if (done) break;
  }
  return r;
}

}  // namespace fracharm
