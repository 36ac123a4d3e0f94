#include "fracharm/cutoffs.hpp"

#include <cmath>

#include "fracharm/errors.hpp"
#include "fracharm/fields.hpp"
#include "fracharm/multiplier.hpp"
#include "fracharm/numerics.hpp"

namespace fracharm {

namespace {

RadialJet operator*(const RadialJet& a, const RadialJet& b) {
  return {a.v * b.v, a.d1 * b.v + a.v * b.d1, a.d2 * b.v + 2.0 * a.d1 * b.d1 + a.v * b.d2};
}

RadialJet one_minus(const RadialJet& a) { return {1.0 - a.v, -a.d1, -a.d2}; }

// jet of g(r / 2^i) given a jet of g at r / 2^i
RadialJet rescaled(RadialJet j, int i) {
  const double f = std::ldexp(1.0, -i);
  j.d1 *= f;
  j.d2 *= f * f;
  return j;
}

constexpr int kRadialSamples = 20000;

// Sampled maximum refined by golden-section search around the best sample.
template <class F>
double sup_on(F f, double lo, double hi) {
  const double step = (hi - lo) / kRadialSamples;
  int best = 0;
  double fb = f(lo);
  for (int i = 1; i <= kRadialSamples; ++i) {
    const double v = f(lo + step * i);
    if (v > fb) fb = v, best = i;
  }
  double a = std::max(lo, lo + step * (best - 1)), b = std::min(hi, lo + step * (best + 1));
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  for (int it = 0; it < 80; ++it) {
    const double c = b - g * (b - a), d = a + g * (b - a);
    if (f(c) > f(d)) b = d; else a = c;
  }
  return std::max(fb, f(0.5 * (a + b)));
}

}  // namespace

RadialJet DyadicCutoffFamily::base_jet(double r) const {
  const double w = base_.outer - base_.inner;
  const double t = (base_.outer - r) / w;
  return {smooth_step(t), -smooth_step_derivative(t) / w, smooth_step_second_derivative(t) / (w * w)};
}

DyadicCutoffFamily DyadicCutoffFamily::build(int depth, BaseProfile base) {
  if (depth < 1) throw PreconditionError("cutoff family depth K must be >= 1");
  if (!(base.inner >= 1.5) || !(base.outer <= 2.0) || !(base.inner < base.outer)) {
    throw PreconditionError("base profile must equal 1 on B_{3/2} and be supported in B_2");
  }
  DyadicCutoffFamily fam(depth, base);
  for (int k = 0; k <= depth; ++k) {
    const double lo = k == 0 ? 0.0 : std::ldexp(1.0, k - 1);
    const double hi = std::ldexp(1.0, k + 1);
    const double g = sup_on([&](double r) { return fam.gradient_norm(k, r); }, lo, hi);
    const double h = sup_on([&](double r) { return fam.hessian_norm(k, r, 2); }, lo, hi);
    fam.grad_sups_.push_back(g * std::ldexp(1.0, k));
    fam.hess_sups_.push_back(h * std::ldexp(1.0, 2 * k));
  }
  return fam;
}

RadialJet DyadicCutoffFamily::radial(int k, double r) const {
  if (k < 0 || k > depth_) throw PreconditionError("cutoff index outside the family depth");
  const RadialJet b = base_jet(r);
  if (k == 0) return b;
  // level[i] = T_j(r / 2^i) as a jet in r, for i = 0..k-j+1
  std::vector<RadialJet> level(k + 1);
  for (int i = 0; i <= k; ++i) level[i] = rescaled(one_minus(base_jet(std::ldexp(r, -i))), i);
  for (int j = 1; j < k; ++j) {
    for (int i = 0; i + j <= k; ++i) level[i] = level[i] * level[i + 1];
  }
  // level[0] = T_k(r), level[1] = T_k(r / 2)
  return level[0] * one_minus(level[1]);
}

double DyadicCutoffFamily::derivative_constant(int i) const {
  if (i == 1) return 2.0 * grad_sups_[0];
  if (i == 2) return 4.0 * hess_sups_[0];
  throw PreconditionError("derivative constants exist for i = 1, 2");
}

bool DyadicCutoffFamily::derivative_bounds_hold() const {
  for (int k = 0; k <= depth_; ++k) {
    if (grad_sups_[k] > derivative_constant(1) * (1 + 1e-9)) return false;
    if (hess_sups_[k] > derivative_constant(2) * (1 + 1e-9)) return false;
  }
  return true;
}

double DyadicCutoffFamily::gradient_norm(int k, double r) const {
  return std::fabs(radial(k, r).d1);
}

double DyadicCutoffFamily::hessian_norm(int k, double r, int dim) const {
  const RadialJet j = radial(k, r);
  double norm = std::fabs(j.d2);
  // tangential eigenvalue g'(r)/r; at r = 0 it equals g''(0)
  if (dim >= 2 && r > 0.0) norm = std::max(norm, std::fabs(j.d1 / r));
  return norm;
}

DomainMask cutoff_support(const Grid& grid, int k, double r, const Point& x) {
  if (k == 0) return DomainMask::ball(grid, x, 2.0 * r);
  return DomainMask::annulus(grid, x, std::ldexp(r, k - 1), std::ldexp(r, k + 1));
}

GridFunction evaluate(const DyadicCutoffFamily& family, const Grid& grid, int k,
                      double r, const Point& x) {
  if (!(r > 0.0)) throw PreconditionError("cutoff scale r must be positive");
  if (std::ldexp(r, k + 1) > 0.5 * grid.box_length()) {
    throw PreconditionError("cutoff support B_{2^{k+1} r} exceeds the half box");
  }
  const GridFunction f = GridFunction::sample(grid, [&](const Point& p) {
    return family.value(k, grid.periodic_distance(p, x) / r);
  });
  return f.with_support(cutoff_support(grid, k, r, x));
}

NormScalingReport norm_scaling_experiment(const DyadicCutoffFamily& family,
                                          const Grid& grid, double s,
                                          double p_prime,
                                          const std::vector<int>& ks, double r) {
  if (ks.size() < 4) throw PreconditionError("norm_scaling_experiment needs >= 4 values of k");
  if (s < 0.0) throw PreconditionError("norm_scaling_experiment requires s >= 0");
  NormScalingReport rep;
  rep.ks = ks;
  std::vector<double> x, y;
  for (int k : ks) {
    const GridFunction eta = evaluate(family, grid, k, r, {0, 0, 0});
    const double norm = lp_norm(frac_laplacian(eta, s), p_prime);
    rep.norms.push_back(norm);
    x.push_back(k);
    y.push_back(std::log2(norm));
  }
  rep.slope = fit_line(x, y).slope;
  rep.expected = -s + (std::isinf(p_prime) ? 0.0 : grid.dim() / p_prime);
  if (rep.expected == 0.0) {
    rep.relative_error = std::fabs(rep.slope);
    rep.pass = rep.relative_error <= 0.1;
  } else {
    rep.relative_error = std::fabs(rep.slope - rep.expected) / std::fabs(rep.expected);
    rep.pass = rep.relative_error <= 0.1;
  }
  return rep;
}

}  // namespace fracharm
