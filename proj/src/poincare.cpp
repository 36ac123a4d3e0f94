#include "fracharm/poincare.hpp"

#include <algorithm>
#include <cmath>

#include "fracharm/errors.hpp"
#include "fracharm/krylov.hpp"
#include "fracharm/singular_integral.hpp"

namespace fracharm {

namespace {

double mask_mean(const GridFunction& f, const DomainMask& d) {
  double acc = 0.0;
  for (std::size_t i : d.indices()) acc += f[i];
  return acc / static_cast<double>(d.count());
}

double polynomial_mask_mean(const Polynomial& p, const DomainMask& d) {
  const Grid& g = d.grid();
  double acc = 0.0;
  for (std::size_t i : d.indices()) acc += p(g, g.coordinate(i));
  return acc / static_cast<double>(d.count());
}

std::vector<MultiIndex> indices_up_to(int dim, int degree) {
  std::vector<MultiIndex> out;
  for (int k = 0; k <= degree; ++k) {
    for (const auto& a : multi_indices_of_order(dim, k)) out.push_back(a);
  }
  return out;
}

void check_no_wrap(const Grid& g, double radius, const char* what) {
  if (radius >= 0.5 * g.box_length()) {
    throw PreconditionError(std::string(what) + ": ball of radius " + std::to_string(radius) +
                            " does not fit in the box (need < L/2)");
  }
}

void check_orders(double s, double t, int degree) {
  if (!(s >= 0.0 && s < degree + 1)) throw PreconditionError("mean-value Poincare: need s in [0, N+1)");
  if (!(t >= 0.0 && t < degree + 1 - s)) throw PreconditionError("mean-value Poincare: need t in [0, N+1-s)");
}

MVPoincareResult mv_ratio(const GridFunction& v, const GridFunction& eta,
                          const DomainMask& poly_domain, const DomainMask& semi_domain,
                          const Point& x, double s, double t, double radius, int degree) {
  const MeanValuePolynomial p = meanvalue_polynomial(v, poly_domain, degree, x);
  const GridFunction w = eta * (v - p.p.sample(v.grid()));
  MVPoincareResult r;
  r.numerator = l2_norm(frac_laplacian(w, s));
  r.seminorm = gagliardo_seminorm(v, semi_domain, s + t);
  if (!(r.seminorm > 0.0)) throw PreconditionError("mean-value Poincare: zero seminorm");
  r.normalizer = std::pow(radius, t);
  r.ratio = r.numerator / (r.normalizer * r.seminorm);
  return r;
}

}  // namespace

double Polynomial::operator()(const Grid& grid, const Point& x) const {
  const double L = grid.box_length();
  Point d{};
  for (int i = 0; i < grid.dim(); ++i) {
    d[i] = x[i] - center[i];
    d[i] -= L * std::round(d[i] / L);
  }
  double acc = 0.0;
  for (const auto& [a, c] : coeffs) {
    double term = c / factorial(a);
    for (int i = 0; i < 3; ++i) term *= std::pow(d[i], a[i]);
    acc += term;
  }
  return acc;
}

Polynomial Polynomial::derivative(const MultiIndex& alpha) const {
  Polynomial out{center, {}};
  for (const auto& [a, c] : coeffs) {
    if (a[0] >= alpha[0] && a[1] >= alpha[1] && a[2] >= alpha[2]) {
      out.coeffs[{a[0] - alpha[0], a[1] - alpha[1], a[2] - alpha[2]}] += c;
    }
  }
  return out;
}

GridFunction Polynomial::sample(const Grid& grid) const {
  return GridFunction::sample(grid, [&](const Point& x) { return (*this)(grid, x); });
}

Polynomial Polynomial::operator-(const Polynomial& o) const {
  if (center != o.center) throw PreconditionError("polynomial difference needs a common center");
  Polynomial out = *this;
  for (const auto& [a, c] : o.coeffs) out.coeffs[a] -= c;
  return out;
}

int default_meanvalue_degree(int dim) { return (dim + 1) / 2 - 1; }

MeanValuePolynomial meanvalue_polynomial(const GridFunction& v, const DomainMask& domain,
                                         int degree, const Point& center) {
  if (domain.count() == 0) throw PreconditionError("meanvalue_polynomial: empty mask");
  if (degree < 0 || degree > 2) throw PreconditionError("meanvalue_polynomial: degree N must be 0, 1 or 2");
  if (!(domain.grid() == v.grid())) throw PreconditionError("meanvalue_polynomial: mask grid differs");
  const int n = v.grid().dim();
  MeanValuePolynomial out;
  out.degree = degree;
  out.stages.assign(degree + 1, Polynomial{center, {}});
  Polynomial q{center, {}};  // Q^{N+1} = 0
  for (int i = degree; i >= 0; --i) {
    Polynomial next = q;
    for (const MultiIndex& a : multi_indices_of_order(n, i)) {
      const double mv = mask_mean(partial_derivative(v, a), domain);
      const double mq = polynomial_mask_mean(q.derivative(a), domain);
      next.coeffs[a] += mv - mq;
    }
    q = next;
    out.stages[i] = q;
  }
  out.p = out.stages[0];
  return out;
}

double meanvalue_residual(const GridFunction& v, const DomainMask& domain,
                          const MeanValuePolynomial& p) {
  double worst = 0.0;
  for (const MultiIndex& a : indices_up_to(v.grid().dim(), p.degree)) {
    const double r = std::fabs(mask_mean(partial_derivative(v, a), domain) -
                               polynomial_mask_mean(p.p.derivative(a), domain));
    const double scale = gagliardo_seminorm(v, domain, order(a));
    worst = std::max(worst, scale > 0.0 ? r / scale : r);
  }
  return worst;
}

PoincareResult poincare_ext(const DomainMask& domain, double s, double t, int max_iterations) {
  const Grid& g = domain.grid();
  if (domain.count() == 0) throw PreconditionError("poincare: empty mask");
  if (!(s >= 0.0 && s < t && t <= 2.0)) throw PreconditionError("poincare: need 0 <= s < t <= 2");
  if ((domain.count() << g.dim()) > g.size()) {
    throw PreconditionError("poincare: mask exceeds 2^-n of the box; enlarge the padding");
  }
  const std::vector<std::size_t> idx = domain.indices();
  const auto m = static_cast<Eigen::Index>(idx.size());
  auto make_op = [&](double order) {
    return LinearOperator{m, [&g, idx, order](const Vector& x, Vector& y) {
                            std::vector<double> full(g.size(), 0.0);
                            for (std::size_t i = 0; i < idx.size(); ++i) full[idx[i]] = x[i];
                            const GridFunction r = frac_laplacian(GridFunction(g, std::move(full)), order);
                            y.resize(static_cast<Eigen::Index>(idx.size()));
                            for (std::size_t i = 0; i < idx.size(); ++i) y[i] = r[idx[i]];
                          }};
  };
  const EigenEstimate est = generalized_power_iteration(make_op(2 * s), make_op(2 * t),
                                                        Vector::Ones(m), 1e-8, max_iterations);
  return {std::sqrt(est.value), est.iterations, est.inner_iterations};
}

PoincareResult poincare_constant(const DomainMask& domain, double s, int max_iterations) {
  return poincare_ext(domain, 0.0, s, max_iterations);
}

MVPoincareResult mv_poincare_ratio(const GridFunction& v, double r, const Point& x, double s,
                                   double t, const DyadicCutoffFamily& family, int degree) {
  check_orders(s, t, degree);
  const Grid& g = v.grid();
  check_no_wrap(g, 4 * r, "mv_poincare_ratio");
  const DomainMask ball = DomainMask::ball(g, x, 4 * r);
  return mv_ratio(v, evaluate(family, g, 0, r, x), ball, ball, x, s, t, r, degree);
}

MVPoincareResult annulus_mv_poincare_ratio(const GridFunction& v, double r, const Point& x,
                                           int k, double s, double t,
                                           const DyadicCutoffFamily& family, int degree) {
  check_orders(s, t, degree);
  if (k < 1) throw PreconditionError("annulus_mv_poincare_ratio: k must be >= 1");
  const Grid& g = v.grid();
  check_no_wrap(g, std::ldexp(r, k + 2), "annulus_mv_poincare_ratio");
  const DomainMask a = DomainMask::annulus(g, x, std::ldexp(r, k - 1), std::ldexp(r, k + 1));
  const DomainMask wide = DomainMask::annulus(g, x, std::ldexp(r, k - 2), std::ldexp(r, k + 2));
  return mv_ratio(v, evaluate(family, g, k, r, x), a, wide, x, s, t, std::ldexp(r, k), degree);
}

GapReport polynomial_gap_scan(const GridFunction& v, double r, const Point& x, int k_max,
                              const DyadicCutoffFamily& family) {
  const Grid& g = v.grid();
  if (k_max < 1) throw PreconditionError("polynomial_gap_scan: k_max must be >= 1");
  if (std::ldexp(r, k_max + 1) > 0.5 * g.box_length()) {
    throw PreconditionError("polynomial_gap_scan: support of eta^k_max exceeds the box");
  }
  const int n = g.dim();
  const int degree = default_meanvalue_degree(n);
  const double dn = l2_norm(frac_laplacian(v, 0.5 * n));
  if (!(dn > 0.0)) throw PreconditionError("polynomial_gap_scan: |xi|^{n/2} v vanishes");
  const Polynomial pb = meanvalue_polynomial(v, DomainMask::ball(g, x, r), degree, x).p;
  const GridFunction rest = v - meanvalue_polynomial(v, DomainMask::ball(g, x, 2 * r), degree, x).p.sample(g);
  GapReport rep;
  for (int k = 1; k <= k_max; ++k) {
    const DomainMask ak = DomainMask::annulus(g, x, std::ldexp(r, k), std::ldexp(r, k + 1));
    const Polynomial pa = meanvalue_polynomial(v, ak, degree, x).p;
    const GridFunction eta = evaluate(family, g, k, r, x);
    const double raw = (eta * (pb - pa).sample(g)).max_abs();
    rep.ks.push_back(k);
    rep.raw_gaps.push_back(raw);
    rep.g.push_back(raw / ((1 + k) * dn));
    rep.e.push_back(l2_norm(eta * rest) / (std::pow(std::ldexp(r, k), 0.5 * n) * (1 + k) * dn));
  }
  return rep;
}

double convex_gradient_ratio(const GridFunction& v, const DomainMask& domain, double gamma) {
  const Grid& g = v.grid();
  GridFunction grad2 = GridFunction::zeros(g);
  for (const MultiIndex& a : multi_indices_of_order(g.dim(), 1)) {
    const GridFunction d = partial_derivative(v, a);
    grad2 = grad2 + d * d;
  }
  double energy = 0.0;
  for (std::size_t i : domain.indices()) energy += grad2[i];
  energy *= g.cell_volume();
  if (!(energy > 0.0)) throw PreconditionError("convex_gradient_ratio: gradient vanishes on the mask");
  return double_difference_integral(v, domain, gamma) / energy;
}

double meanvalue_double_integral_ratio(const GridFunction& v, double r, const Point& x,
                                       int degree, double gamma) {
  if (degree < 1 || degree > 2) throw PreconditionError("meanvalue_double_integral_ratio: N must be 1 or 2");
  const Grid& g = v.grid();
  check_no_wrap(g, r, "meanvalue_double_integral_ratio");
  const DomainMask ball = DomainMask::ball(g, x, r);
  const GridFunction w = v - meanvalue_polynomial(v, ball, degree, x).p.sample(g);
  double rhs = 0.0;
  for (const MultiIndex& a : multi_indices_of_order(g.dim(), degree)) {
    rhs += factorial({degree, 0, 0}) / factorial(a) *
           double_difference_integral(partial_derivative(v, a), ball, 0.0);
  }
  if (!(rhs > 0.0)) throw PreconditionError("meanvalue_double_integral_ratio: top derivatives are constant");
  return double_difference_integral(w, ball, gamma) / (std::pow(r, 2.0 * degree - gamma) * rhs);
}

double ball_potential_integral(const Grid& grid, double r, double s) {
  if (!(s > 0.0 && s < 1.0)) throw PreconditionError("ball_potential_integral: need s in (0,1)");
  check_no_wrap(grid, 2 * r, "ball_potential_integral");
  const std::vector<std::size_t> pts = DomainMask::ball(grid, {0, 0, 0}, r).indices();
  const double expo = 2.0 - grid.dim() - 2.0 * s;
  double best = 0.0;
  for (std::size_t i : pts) {
    const Point xi = grid.coordinate(i);
    double acc = 0.0;
    for (std::size_t j : pts) {
      if (j != i) acc += std::pow(grid.periodic_distance(xi, grid.coordinate(j)), expo);
    }
    best = std::max(best, acc * grid.cell_volume());
  }
  return best;
}

}  // namespace fracharm
