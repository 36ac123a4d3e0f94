#pragma once

// Fourier multiplier operators on the periodic grid.

#include <array>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "fracharm/grid.hpp"

namespace fracharm {

using MultiIndex = std::array<int, 3>;

inline int order(const MultiIndex& a) { return a[0] + a[1] + a[2]; }

// coeff * xi^beta * |xi|^gamma
struct PowerTerm {
  Complex coeff{1.0, 0.0};
  MultiIndex beta{0, 0, 0};
  double gamma = 0.0;
};

enum class ZeroModePolicy { annihilate, identity_at_zero, project_mean_first };

class FrequencySymbol {
 public:
  using Evaluator = std::function<Complex(const Point&)>;

  // Sum of power terms; degree and reality are derived and then checked.
  static FrequencySymbol from_terms(int dim, std::vector<PowerTerm> terms,
                                    std::string id);
  // Arbitrary evaluator.  The declared degree and reality flag are verified
  // on sample lattice points; a mismatch raises PreconditionError.
  static FrequencySymbol custom(int dim, Evaluator eval,
                                std::optional<double> degree, bool real,
                                std::string id);

  static FrequencySymbol identity(int dim);
  static FrequencySymbol abs_pow(int dim, double s);
  // i xi_j / |xi|
  static FrequencySymbol riesz(int dim, int j);

  // "abs_pow:s", "riesz:j", "identity"; derived symbols are built in code.
  static FrequencySymbol parse(int dim, const std::string& id);

  Complex operator()(const Point& xi) const;

  int dim() const { return dim_; }
  std::optional<double> degree() const { return degree_; }
  bool real() const { return real_; }
  const std::string& id() const { return id_; }
  const std::optional<std::vector<PowerTerm>>& terms() const { return terms_; }

  // Largest relative deviation of m(lambda xi) / (lambda^degree m(xi)) from
  // one over the sample points, lambda in {2, 4}.
  double homogeneity_defect() const;
  // Largest |m(-xi) - conj m(xi)| / |m(xi)| over the sample points.
  double reality_defect() const;

 private:
  FrequencySymbol() = default;
  void verify() const;
  double sample_scale() const;

  int dim_ = 1;
  Evaluator eval_;
  std::optional<std::vector<PowerTerm>> terms_;
  std::optional<double> degree_;
  bool real_ = true;
  std::string id_;
};

// m_{alpha,s}(xi) = (2 pi i)^{-|alpha|} |xi|^{|alpha|-s} d^alpha(|xi|^s m(xi)).
// Closed form for sums of power terms, 4th-order differences otherwise.
FrequencySymbol derived_symbol(const FrequencySymbol& m, const MultiIndex& alpha,
                               double s);

GridFunction apply_symbol(const GridFunction& f, const FrequencySymbol& m,
                          ZeroModePolicy policy = ZeroModePolicy::annihilate);
std::vector<Complex> apply_symbol_complex(
    const GridFunction& f, const FrequencySymbol& m,
    ZeroModePolicy policy = ZeroModePolicy::annihilate);
// In-place multiplication of a coefficient table.
void multiply_spectrum(Spectrum& spec, const FrequencySymbol& m,
                       ZeroModePolicy policy);

// Multiplier |xi|^s.  s = 0 is the identity; s < 0 is inv_frac_laplacian.
GridFunction frac_laplacian(const GridFunction& f, double s,
                            ZeroModePolicy policy = ZeroModePolicy::annihilate);
// Multiplier |xi|^-s on nonzero modes.  Requires mean zero unless the
// policy is project_mean_first.
GridFunction inv_frac_laplacian(
    const GridFunction& f, double s,
    ZeroModePolicy policy = ZeroModePolicy::annihilate);

// Spectral partial derivative d^alpha.
GridFunction partial_derivative(const GridFunction& f, const MultiIndex& alpha);
// All multi-indices with |alpha| == k in dimension dim, lexicographic.
std::vector<MultiIndex> multi_indices_of_order(int dim, int k);
double factorial(const MultiIndex& a);

// x^alpha on the centered coordinates.
GridFunction monomial(const Grid& grid, const MultiIndex& alpha);

// || M |xi|^s (x^alpha phi) - sum_{beta <= alpha} d^beta(x^alpha)/beta!
//    * M_{beta,s} |xi|^{s-|beta|} phi ||_{L2(window)}
double product_rule_residual(const GridFunction& phi, const MultiIndex& alpha,
                             double s, const DomainMask& window,
                             const FrequencySymbol& m);
double product_rule_residual(const GridFunction& phi, const MultiIndex& alpha,
                             double s, const DomainMask& window);

struct AnnihilationReport {
  std::vector<double> radii;
  std::vector<double> values;  // |int eta_R x^alpha |xi|^s phi|
  double slope = 0.0;
  double bound = 0.0;  // -s + |alpha| + n / p_prime
  bool pass = false;
};

// eta_R(x) = eta0(x / R) with eta0 = 1 on B_{3/2}, 0 off B_2.
AnnihilationReport polynomial_annihilation(const MultiIndex& alpha, double s,
                                           const GridFunction& phi,
                                           const std::vector<double>& radii,
                                           double p_prime);

}  // namespace fracharm
