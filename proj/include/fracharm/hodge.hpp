#pragma once

// Variational Hodge decomposition on a mask, the decay of its harmonic
// part, pairings of disjointly supported functions and local dual norms.

#include <vector>

#include "fracharm/grid.hpp"
#include "fracharm/multiplier.hpp"

namespace fracharm {

inline constexpr int kHodgeIterationCap = 500;
inline constexpr double kHodgeGradientTolerance = 1e-10;
inline constexpr double kHarmonicSlack = 1.1;

struct HodgeDecomposition {
  GridFunction f;
  GridFunction phi;  // supported in the mask
  GridFunction h;    // f - D^s phi
  double s = 0.0;
  int iterations = 0;
  double relative_gradient = 0.0;  // |R D^s h| / |R D^s f|
  double residual = 0.0;           // ||f - D^s phi - h||_2 / ||f||_2
  // max over point masses psi in the mask of |<h, D^s psi>| / (||h|| ||D^s psi||)
  double orthogonality = 0.0;
  double energy_ratio = 0.0;  // (||h||_2 + ||D^s phi||_2) / ||f||_2
};

// phi minimizes ||D^s phi - f||_2 over functions supported in the mask,
// D^s = |xi|^s.  The mask may occupy at most 2^-n of the box.  Throws
// ConvergenceError when conjugate gradients on the restricted normal
// equations miss `tolerance` within `max_iterations`.
HodgeDecomposition hodge_decompose(const GridFunction& f, const DomainMask& domain, double s,
                                   int max_iterations = kHodgeIterationCap,
                                   double tolerance = kHodgeGradientTolerance);

// ||D^s phi - f||_2^2
double hodge_energy(const GridFunction& f, const GridFunction& phi, double s);

struct HarmonicDecayReport {
  std::vector<double> lambdas;
  std::vector<double> ratios;  // ||h||_{L2(B_r)} / ||h||_2
  double constant = 0.0;       // ratio * lambda^{1/4} at the smallest lambda
  double worst = 0.0;          // max ratio / (constant lambda^{-1/4})
  bool pass = false;           // worst <= kHarmonicSlack
};

// h from hodge_decompose(f, B_{lambda r}(x), n/2) for every lambda.  Throws
// PreconditionError when a remainder misses the orthogonality tolerance.
HarmonicDecayReport harmonic_decay_check(const GridFunction& f, double r, const Point& x,
                                         std::vector<double> lambdas);

// sup ||h||_{L2(B_r)} / ||h||_2 over every remainder h of a decomposition on
// B_{lambda r}(x) with s = n/2: the largest singular value of the indicator
// of B_r composed with the projection onto those remainders.
double harmonic_ratio_sup(const Grid& grid, double r, const Point& x, double lambda);
// Same report with ratios given by harmonic_ratio_sup.
HarmonicDecayReport harmonic_decay_sup(const Grid& grid, double r, const Point& x,
                                       std::vector<double> lambdas);

// a is a nonnegative bump on B_{radius_a}(center); for gap d, b is a bump on
// B_{radius_b}(center + (radius_a + d + radius_b) e_1).
struct PairingGeometry {
  Point center{};
  double radius_a = 1.0;
  double radius_b = 1.0;
  double scale_b = 1.0;
};

struct PairingDecayReport {
  std::vector<double> distances;
  std::vector<double> values;       // |<D^s a, D^t b>|
  std::vector<double> prefactors;   // value d^{n+s+t} / (||a||_1 ||b||_1)
  double slope = 0.0;
  double expected_slope = 0.0;      // -(n + s + t)
};

PairingDecayReport disjoint_pairing_decay(const Grid& grid, const PairingGeometry& geometry,
                                          double s, double t, const std::vector<double>& distances);

// <D^s a, D^t b>, computed as <D^{s+t} a, b>.
double pairing(const GridFunction& a, const GridFunction& b, double s, double t);

// The function a on B_gamma(x) with <D^{n/4} b, D^{n/4} phi> = <a, phi> for
// every phi supported there; b must vanish on B_{gamma+d}(x).
GridFunction localization_representative(const GridFunction& b, const Point& x, double gamma,
                                         double d);

struct LocalNormResult {
  double local_norm = 0.0;  // ||v||_{L2(B_r)}
  double dual_norm = 0.0;   // sup <v, D^{n/2} phi> / ||D^{n/2} phi||_2, phi in B_{lambda r}
  double ratio = 0.0;       // 0 when v vanishes
};

LocalNormResult local_norm_recovery(const GridFunction& v, double r, const Point& x,
                                    double lambda);

struct ProductNormResult {
  double norm = 0.0;  // ||M1 D^{s-n/2} u * M2 D^{-s} v||_2
  double ratio = 0.0;
};

// s in (0, n/2); u and v must have mean zero.
ProductNormResult lower_order_product_norm(const GridFunction& u, const GridFunction& v, double s,
                                           const FrequencySymbol& m1, const FrequencySymbol& m2);

struct ProductNormExtremal {
  double ratio = 0.0;  // lower_order_product_norm(u, v, ...).ratio
  GridFunction u, v;   // unit L2 norm
  int rounds = 0;
};

// Local maximum of the lower-order product ratio over u, v in the band
// 0 < |k|_inf <= max_mode (0 selects N/8), by alternating power iteration
// from the projections of (u0, v0); the ratio never decreases.
ProductNormExtremal lower_order_product_extremal(const GridFunction& u0, const GridFunction& v0, double s,
                                                 const FrequencySymbol& m1, const FrequencySymbol& m2,
                                                 std::size_t max_mode = 0, double tolerance = 1e-6,
                                                 int max_rounds = 200);

}  // namespace fracharm
