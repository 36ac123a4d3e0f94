#pragma once

// Dyadic partition of unity built from a smooth radial bump eta0:
//   eta^k = (1 - sum_{l<k} eta^l) * (sum_{l<k} eta^l)(. / 2).
// With T_k = 1 - sum_{l<k} eta^l this reads T_{k+1}(r) = T_k(r) T_k(r/2)
// and eta^k(r) = T_k(r) (1 - T_k(r/2)), which is how it is evaluated.

#include <vector>

#include "fracharm/grid.hpp"

namespace fracharm {

// eta0(r) = smooth_step((outer - r) / (outer - inner)).
struct BaseProfile {
  double inner = 1.5;
  double outer = 2.0;
};

// Value and first two radial derivatives.
struct RadialJet {
  double v = 0.0;
  double d1 = 0.0;
  double d2 = 0.0;
};

class DyadicCutoffFamily {
 public:
  // Throws if the base is not identically 1 on B_{3/2} or not supported in B_2.
  static DyadicCutoffFamily build(int depth, BaseProfile base = {});

  int depth() const { return depth_; }
  const BaseProfile& base() const { return base_; }

  RadialJet radial(int k, double r) const;
  double value(int k, double r) const { return radial(k, r).v; }
  // sup |grad eta^k| and sup of the Hessian operator norm at radius r.
  double gradient_norm(int k, double r) const;
  double hessian_norm(int k, double r, int dim) const;

  // sup_r |D^i eta^k| * 2^{k i}, sampled on a fine radial grid, for k = 0..depth.
  const std::vector<double>& normalized_gradient_sups() const { return grad_sups_; }
  const std::vector<double>& normalized_hessian_sups() const { return hess_sups_; }
  // C_i = 2^i sup |D^i eta0|.  The inner edge of eta^k is 1 - eta0(. / 2^{k-1}),
  // so this is the smallest constant taken from eta0 that bounds every k.
  double derivative_constant(int i) const;
  // 2^{ki} sup |D^i eta^k| <= C_i (1 + 1e-9) for i = 1, 2 and all k.
  bool derivative_bounds_hold() const;

 private:
  DyadicCutoffFamily(int depth, BaseProfile base) : depth_(depth), base_(base) {}
  RadialJet base_jet(double r) const;

  int depth_;
  BaseProfile base_;
  std::vector<double> grad_sups_;
  std::vector<double> hess_sups_;
};

// eta^k((. - x) / r) with its support mask attached: B_{2r}(x) for k = 0,
// else the annulus 2^{k-1} r <= |. - x| < 2^{k+1} r.
GridFunction evaluate(const DyadicCutoffFamily& family, const Grid& grid, int k,
                      double r, const Point& x);
DomainMask cutoff_support(const Grid& grid, int k, double r, const Point& x);

struct NormScalingReport {
  std::vector<int> ks;
  std::vector<double> norms;  // ||frac_laplacian(eta^k_{r,x}, s)||_{p'}
  double slope = 0.0;         // of log2 norm against k
  double expected = 0.0;      // -s + n / p'
  double relative_error = 0.0;
  bool pass = false;
};

// Fitted slope must lie within 10% of -s + n/p' (absolute 0.1 when that is 0).
NormScalingReport norm_scaling_experiment(const DyadicCutoffFamily& family,
                                          const Grid& grid, double s,
                                          double p_prime,
                                          const std::vector<int>& ks, double r);

}  // namespace fracharm
