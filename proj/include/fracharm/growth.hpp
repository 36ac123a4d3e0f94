#pragma once

// Discrete iteration lemmas on dyadic annulus sequences, Morrey and
// Campanato functionals, and Hoelder-exponent estimation.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "fracharm/errors.hpp"
#include "fracharm/grid.hpp"

namespace fracharm {

inline constexpr double kIterationSlack = 1e-12;

// A hypothesis inequality fails; witness() is the smallest failing N.
class HypothesisViolation : public PreconditionError {
 public:
  HypothesisViolation(const std::string& what, int witness)
      : PreconditionError(what), witness_(witness) {}
  int witness() const { return witness_; }

 private:
  int witness_;
};

// a_k for k in [k_min, k_max], zero outside.
class AnnulusSequence {
 public:
  // Throws PreconditionError on an empty range or a negative or
  // non-finite value.
  AnnulusSequence(int k_min, std::vector<double> values);

  int k_min() const { return k_min_; }
  int k_max() const { return k_min_ + static_cast<int>(values_.size()) - 1; }
  double operator[](int k) const;
  const std::vector<double>& values() const { return values_; }
  // A_N = sum_{k <= N} a_k
  double partial_sum(int n) const;
  double total() const;
  // b_k = a_{k - shift}
  AnnulusSequence shifted(int shift) const;

  // "k,a_k" header, one row per index.
  std::string to_csv() const;
  static AnnulusSequence from_csv(const std::string& text);
  void save_csv(const std::string& path) const;
  static AnnulusSequence load_csv(const std::string& path);

 private:
  int k_min_;
  std::vector<double> values_;
};

struct GrowthRow {
  int n = 0;
  double lhs = 0.0;
  double rhs = 0.0;
  bool holds = false;
};

struct GrowthReport {
  double beta = 0.0;
  double mu = 0.0;        // largest mu with tau_k <= 2^{-mu k} on the realized range
  double tau = 0.0;
  double constant = 0.0;  // Lambda_2 (driteration) or Lambda_4 (iteration_reduce)
  double lambda3 = 0.0;   // iteration_reduce only
  int k_shift = 0;        // K of iteration_reduce
  int n_bar = 0;          // conclusion holds for N <= n_bar
  std::vector<GrowthRow> rows;  // conclusion, every N in [k_min, n_bar]
  bool verified = false;

  nlohmann::json to_json() const;
};

// Verifies sum_{k<=N} a_k <= Lambda (sum_{k>N} 2^{gamma(N+1-k)} a_k + 2^{alpha N})
// for every N <= 0, then derives beta in (0, 1) and Lambda_2 with
// sum_{k<=N} a_k <= Lambda_2 2^{beta N} and checks it for every N <= 0.
GrowthReport driteration(const AnnulusSequence& a, double gamma, double alpha, double lambda);

// Verifies the four-term hypothesis with parameters (Lambda_1, Lambda_2,
// gamma, L) for every N <= 0, reduces it to the driteration form for
// N <= -K with constant Lambda_3 and concludes through driteration.
GrowthReport iteration_reduce(const AnnulusSequence& a, double lambda1, double lambda2,
                              double gamma, int l);

// Minimal Lambda for which driteration's hypothesis holds.
double minimal_driteration_lambda(const AnnulusSequence& a, double gamma, double alpha);

struct GeneratedSequence {
  AnnulusSequence a;
  double parameter = 0.0;  // Lambda for driteration, the scale factor for iteration_reduce
};

// Random nonnegative sequence with Lambda inflated to the minimal admissible value.
GeneratedSequence generate_driteration_sequence(std::uint64_t seed, double gamma, double alpha);
// Random shape scaled to the largest multiple satisfying the four-term hypothesis.
GeneratedSequence generate_iteration_sequence(std::uint64_t seed, double lambda1, double lambda2,
                                              double gamma, int l);

// Sequences whose smallest hypothesis violation is at N = witness <= 0.
AnnulusSequence driteration_counterexample(int witness, double gamma, double alpha, double lambda);
AnnulusSequence iteration_counterexample(int witness, double lambda1, double lambda2, double gamma,
                                         int l);

struct CampanatoResult {
  double j = 0.0;  // Morrey quantity
  double m = 0.0;  // Campanato quantity (mean removed)
  Point j_center{};
  double j_radius = 0.0;
  Point m_center{};
  double m_radius = 0.0;
};

// sup over x in D and dyadic rho in {R, R/2, ...} >= 4h of
// (rho^-lambda int_{D cap B_rho(x)} |v|^2)^{1/2} and the mean-shifted variant.
CampanatoResult campanato_functionals(const GridFunction& v, const DomainMask& domain,
                                      double lambda, double radius);

struct CampanatoProfile {
  std::vector<double> radii;     // decreasing
  std::vector<double> morrey;    // sup_x int_{D cap B_rho(x)} |v|^2
  std::vector<double> campanato; // sup_x int_{D cap B_rho(x)} |v - mean|^2
  std::vector<Point> morrey_at;
  std::vector<Point> campanato_at;
};

// Radii R, R/2, ... down to smallest * h.
CampanatoProfile campanato_profile(const GridFunction& v, const DomainMask& domain, double radius,
                                   double smallest = 4.0);

// Smallest radius of the Hoelder fits, in grid spacings.
inline constexpr double kHolderSmallestRadius = 64.0;

struct HolderReport {
  // half the fitted exponent of the increments of sup_x [v]^2_{B_r(x), n/2}
  double seminorm_exponent = 0.0;
  std::optional<double> campanato_exponent;  // empty when v is flat on E
  // fit of the modulus of continuity at increments h..8h, capped at 1
  double quotient_exponent = 0.0;
  bool flat = false;
  double disagreement = 0.0;  // largest pairwise difference of the available estimates

  nlohmann::json to_json() const;
};

// Radii run over R, R/2, ... down to kHolderSmallestRadius h (at least three).
HolderReport holder_exponent_estimate(const GridFunction& v, const DomainMask& e, double radius);

struct HomogeneousLocalization {
  double lhs = 0.0;  // [v]^2_{B_r(x), s}
  double rhs = 0.0;  // sum_{k <= -1} [v]^2_{A_k, s}
  double ratio = 0.0;
  int annuli = 0;
};

// A_k = B_{2^{k+1} r} \ B_{2^{k-1} r}, k = -1, -2, ... while 2^{k+1} r >= 8h.
HomogeneousLocalization homogeneous_norm_localization(const GridFunction& v, double r,
                                                      const Point& x, double s);

}  // namespace fracharm
