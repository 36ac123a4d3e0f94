#pragma once

// Mean-value polynomials, Poincare constants on masks, and the
// mean-value Poincare experiments on balls and dyadic annuli.

#include <map>
#include <vector>

#include "fracharm/cutoffs.hpp"
#include "fracharm/grid.hpp"
#include "fracharm/multiplier.hpp"

namespace fracharm {

// sum_alpha c_alpha (x - center)^alpha / alpha!, with x - center the
// minimum-image displacement.
struct Polynomial {
  Point center{};
  std::map<MultiIndex, double> coeffs;

  double operator()(const Grid& grid, const Point& x) const;
  Polynomial derivative(const MultiIndex& alpha) const;
  GridFunction sample(const Grid& grid) const;
  Polynomial operator-(const Polynomial& o) const;  // centers must agree
};

struct MeanValuePolynomial {
  int degree = 0;
  Polynomial p;
  // stages[i] = Q^i, stages[0] = P
  std::vector<Polynomial> stages;
};

// ceil(n/2) - 1
int default_meanvalue_degree(int dim);

// Q^N down to Q^0; derivative means of v are taken spectrally, those of
// the polynomial stages exactly on the mask.  Degree 0..2.
MeanValuePolynomial meanvalue_polynomial(const GridFunction& v, const DomainMask& domain,
                                         int degree, const Point& center = {0, 0, 0});

// max over |alpha| <= N of |mean_D d^alpha (v - P)| / ||grad^{|alpha|} v||_{L2(D)}
double meanvalue_residual(const GridFunction& v, const DomainMask& domain,
                          const MeanValuePolynomial& p);

struct PoincareResult {
  double constant = 0.0;
  int iterations = 0;
  int inner_iterations = 0;
};

// sup ||D^s f||_2 / ||D^t f||_2 over f supported in the mask, D^s = |xi|^s,
// 0 <= s < t <= 2.  The mask may occupy at most 2^-n of the box.
PoincareResult poincare_ext(const DomainMask& domain, double s, double t,
                            int max_iterations = 1000);
// sup ||f||_2 / ||D^s f||_2
PoincareResult poincare_constant(const DomainMask& domain, double s,
                                 int max_iterations = 1000);

struct MVPoincareResult {
  double numerator = 0.0;   // ||D^s(eta (v - P))||_2
  double seminorm = 0.0;    // [v]_{E, s+t}
  double normalizer = 0.0;  // (radius)^t
  double ratio = 0.0;
};

// Ball: eta = eta^0_{r,x}, P on B_{4r}(x), seminorm on B_{4r}(x), normalizer r^t.
MVPoincareResult mv_poincare_ratio(const GridFunction& v, double r, const Point& x, double s,
                                   double t, const DyadicCutoffFamily& family, int degree);
// Annulus: eta^k_{r,x}, P on B_{2^{k+1}r} \ B_{2^{k-1}r}, seminorm on
// B_{2^{k+2}r} \ B_{2^{k-2}r}, normalizer (2^k r)^t.
MVPoincareResult annulus_mv_poincare_ratio(const GridFunction& v, double r, const Point& x,
                                           int k, double s, double t,
                                           const DyadicCutoffFamily& family, int degree);

struct GapReport {
  std::vector<int> ks;
  std::vector<double> raw_gaps;  // ||eta^k (P_{B_r} - P_{A_k})||_inf
  std::vector<double> g;         // raw gap / ((1+k) ||D^{n/2} v||_2)
  std::vector<double> e;         // ||eta^k (v - P_{B_2r})||_2 / ((2^k r)^{n/2} (1+k) ||D^{n/2} v||_2)
};

// k = 1..k_max with A_k = B_{2^{k+1}r}(x) \ B_{2^k r}(x) and degree ceil(n/2) - 1.
GapReport polynomial_gap_scan(const GridFunction& v, double r, const Point& x, int k_max,
                              const DyadicCutoffFamily& family);

// sum_{D x D} |v(x) - v(y)|^2 |x - y|^-gamma over ||grad v||^2_{L2(D)}
double convex_gradient_ratio(const GridFunction& v, const DomainMask& domain, double gamma);

// After subtracting the degree-N mean-value polynomial on B_r(x):
// sum |v(x)-v(y)|^2/|x-y|^gamma over r^{2N-gamma} sum |grad^N v(x) - grad^N v(y)|^2,
// both double sums over B_r(x) x B_r(x).  N >= 1.
double meanvalue_double_integral_ratio(const GridFunction& v, double r, const Point& x,
                                       int degree, double gamma);

// max over grid points x in B_r(0) of sum_{y in B_r(0), y != x} |x - y|^{2-n-2s} h^n
double ball_potential_integral(const Grid& grid, double r, double s);

}  // namespace fracharm
