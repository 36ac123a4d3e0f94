#pragma once

// The commutator H(u, v) = |xi|^{n/2}(uv) - u |xi|^{n/2} v - v |xi|^{n/2} u,
// the pointwise symbol defect behind its compensation, and the
// structure identity for sphere-valued maps.

#include <cstdint>
#include <optional>
#include <vector>

#include "fracharm/grid.hpp"

namespace fracharm {

// Spectral mass above N/4 (sup-norm of the mode) allowed in a factor of a product.
inline constexpr double kAliasingTolerance = 1e-8;

// Fraction of sum |F|^2 carried by modes with |k|_inf > N/4.
double aliasing_fraction(const GridFunction& f);

class SphereValuedMap {
 public:
  // Throws PreconditionError unless sum_i (u^i)^2 = 1 within 1e-12 everywhere.
  static SphereValuedMap make(std::vector<GridFunction> components);
  // (cos phi, sin phi)
  static SphereValuedMap from_phase(const GridFunction& phi);
  // Pointwise normalization of an arbitrary nonvanishing vector field.
  static SphereValuedMap normalized(const std::vector<GridFunction>& components);

  int target_dim() const { return static_cast<int>(components_.size()); }
  const std::vector<GridFunction>& components() const { return components_; }
  const Grid& grid() const { return components_.front().grid(); }

 private:
  explicit SphereValuedMap(std::vector<GridFunction> c) : components_(std::move(c)) {}
  std::vector<GridFunction> components_;
};

// Order defaults to n/2.  Throws PreconditionError when either factor
// violates the aliasing guard.
GridFunction commutator_H(const GridFunction& u, const GridFunction& v,
                          std::optional<double> order = std::nullopt);

struct DefectSample {
  Point x{};
  Point xi{};
  double p = 1.0;
  double theta = 0.5;
};

// ||x - xi|^p - |xi|^p - |x|^p| over |x|^{p theta}|xi|^{p(1-theta)} for
// p <= 1, over |x|^{p-1}|xi| + |xi|^{p-1}|x| for p > 1.
double defect_ratio(const DefectSample& sample, int dim);

// ||x - y|^p - |y|^p| over |x|^p for p < 1, over |x|^p + |x||y|^{p-1}
// for p >= 1.
double triangle_ratio(const Point& x, const Point& y, double p, int dim);

struct ScanResult {
  double sup = 0.0;
  Point x_at_sup{};
  Point y_at_sup{};
  std::size_t samples = 0;
};

// Seeded scans on |xi| = 1 (resp. |y| = 1): the partner point has a
// uniform direction and a log-uniform radius in [1e-3, 1e3].
ScanResult defect_scan(int dim, double p, double theta, std::size_t samples,
                       std::uint64_t seed);
ScanResult triangle_scan(int dim, double p, std::size_t samples, std::uint64_t seed);

struct DominationReport {
  double max_ratio = 0.0;
  std::size_t modes_compared = 0;
};

// Pointwise over the lattice: |H^(xi)| over the dominating convolution
// (|.|^{n/4}|u^|) * (|.|^{n/4}|v^|) for n <= 2, or the two-term version
// with orders (n-2)/2 and 1 for n >= 3.  Modes whose denominator falls
// below 1e-12 of its maximum are skipped.
DominationReport fourier_domination_check(const GridFunction& u, const GridFunction& v);

// Discrete lattice convolution L^-n sum_eta A(xi - eta) B(eta) of two
// coefficient tables; exact (no wrap) when both vanish above N/4.
std::vector<Complex> lattice_convolution(const Grid& grid, const std::vector<Complex>& a,
                                         const std::vector<Complex>& b);

struct HNormRatios {
  // ||H||_2 / (||D u||_2 ||D v||_2), D = |xi|^{n/2}
  double l2 = 0.0;
  // ||H^||_{2,1} / (||D u||_2 ||D v||_2)
  double lorentz21 = 0.0;
  // ||H||_2 / (||(D u)^||_{2,inf} ||D v||_2)
  double weak = 0.0;
};

HNormRatios h_norm_ratios(const GridFunction& u, const GridFunction& v);
double h_norm_ratio(const GridFunction& u, const GridFunction& v);

struct HNormExtremal {
  double ratio = 0.0;  // h_norm_ratio(u, v)
  GridFunction u, v;   // normalized to ||D u||_2 = ||D v||_2 = 1
  int rounds = 0;
};

// Local maximum of h_norm_ratio over fields whose modes satisfy
// 0 < |k|_inf <= max_mode (< N/2; 0 selects N/8), by alternating power
// iteration on the linear maps u -> H(u, v) and v -> H(u, v) started from
// the projections of (u0, v0).  The ratio never decreases along the way.
// Stops when a round improves it by less than `tolerance` relative.
HNormExtremal h_norm_extremal(const GridFunction& u0, const GridFunction& v0, std::size_t max_mode = 0,
                              double tolerance = 1e-6, int max_rounds = 200);

// || sum_i w^i D w^i + 1/2 sum_i H(w^i, w^i) - 1/2 D(eta^2) ||_2 with w = eta u.
double structure_identity_residual(const SphereValuedMap& u, const GridFunction& eta);

}  // namespace fracharm
