#include "fracharm/growth.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>

namespace fracharm {

namespace {

bool within(double lhs, double rhs) { return lhs <= rhs + kIterationSlack * std::abs(rhs); }

void check_positive(double v, const char* name) {
  if (!(v > 0.0 && std::isfinite(v))) {
    throw PreconditionError(std::string("growth: ") + name + " must be positive and finite");
  }
}

// sum_{k > N} 2^{gamma (N + shift - k)} a_k
double upper_tail(const AnnulusSequence& a, int n, double gamma, int shift) {
  double sum = 0.0;
  for (int k = std::max(n + 1, a.k_min()); k <= a.k_max(); ++k) {
    sum += std::exp2(gamma * (n + shift - k)) * a[k];
  }
  return sum;
}

// sum_{k <= N} 2^{gamma (k - N)} a_k
double lower_weighted(const AnnulusSequence& a, int n, double gamma) {
  double sum = 0.0;
  for (int k = a.k_min(); k <= std::min(n, a.k_max()); ++k) sum += std::exp2(gamma * (k - n)) * a[k];
  return sum;
}

double driteration_rhs(const AnnulusSequence& a, int n, double gamma, double alpha) {
  return upper_tail(a, n, gamma, 1) + std::exp2(alpha * n);
}

// The a-dependent part of the four-term right side.
double iteration_rhs_linear(const AnnulusSequence& a, int n, double lambda1, double lambda2,
                            double gamma, int l) {
  return 0.5 * a.partial_sum(n + l) + lambda1 * lower_weighted(a, n, gamma) +
         lambda2 * upper_tail(a, n, gamma, 0);
}

// sup_{x >= 0} (x/2 + 1) 2^{-m x / 2}
double count_constant(double m) {
  const double x = 2.0 / (m * std::log(2.0)) - 2.0;
  return x > 0.0 ? (0.5 * x + 1.0) * std::exp2(-0.5 * m * x) : 1.0;
}

std::vector<GrowthRow> conclusion_rows(const AnnulusSequence& a, int n_bar, double constant,
                                       double beta, bool& ok) {
  std::vector<GrowthRow> rows;
  ok = true;
  for (int n = std::min(a.k_min(), n_bar); n <= n_bar; ++n) {
    GrowthRow row{n, a.partial_sum(n), constant * std::exp2(beta * n), false};
    row.holds = within(row.lhs, row.rhs);
    ok = ok && row.holds;
    rows.push_back(row);
  }
  return rows;
}

AnnulusSequence random_shape(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> len(5, 60);
  std::uniform_int_distribution<int> top(-6, 4);
  std::uniform_real_distribution<double> slope(-0.5, 2.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> noise(0.0, 2.0);
  const int k_max = top(rng);
  const int k_min = k_max - len(rng) + 1;
  const double c = slope(rng);
  const double zero_rate = 0.5 * unit(rng);
  std::vector<double> v;
  for (int k = k_min; k <= k_max; ++k) {
    v.push_back(unit(rng) < zero_rate ? 0.0 : std::exp2(c * k + noise(rng)));
  }
  return AnnulusSequence(k_min, std::move(v));
}

}  // namespace

AnnulusSequence::AnnulusSequence(int k_min, std::vector<double> values)
    : k_min_(k_min), values_(std::move(values)) {
  if (values_.empty()) throw PreconditionError("AnnulusSequence: empty index range");
  for (double v : values_) {
    if (!(v >= 0.0 && std::isfinite(v))) {
      throw PreconditionError("AnnulusSequence: values must be nonnegative and finite");
    }
  }
}

double AnnulusSequence::operator[](int k) const {
  if (k < k_min_ || k > k_max()) return 0.0;
  return values_[static_cast<std::size_t>(k - k_min_)];
}

double AnnulusSequence::partial_sum(int n) const {
  double sum = 0.0;
  for (int k = k_min_; k <= std::min(n, k_max()); ++k) sum += (*this)[k];
  return sum;
}

double AnnulusSequence::total() const { return partial_sum(k_max()); }

AnnulusSequence AnnulusSequence::shifted(int shift) const {
  return AnnulusSequence(k_min_ + shift, values_);
}

std::string AnnulusSequence::to_csv() const {
  std::ostringstream os;
  os.precision(17);
  os << "k,a_k\n";
  for (int k = k_min_; k <= k_max(); ++k) os << k << ',' << (*this)[k] << '\n';
  return os.str();
}

AnnulusSequence AnnulusSequence::from_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line.rfind("k,", 0) != 0) {
    throw PreconditionError("AnnulusSequence: missing 'k,a_k' header");
  }
  std::optional<int> first;
  int expected = 0;
  std::vector<double> values;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw PreconditionError("AnnulusSequence: malformed row '" + line + "'");
    int k = 0;
    double v = 0.0;
    try {
      k = std::stoi(line.substr(0, comma));
      v = std::stod(line.substr(comma + 1));
    } catch (const std::exception&) {
      throw PreconditionError("AnnulusSequence: malformed row '" + line + "'");
    }
    if (!first) {
      first = k;
      expected = k;
    }
    if (k != expected) throw PreconditionError("AnnulusSequence: indices must be consecutive");
    ++expected;
    values.push_back(v);
  }
  if (!first) throw PreconditionError("AnnulusSequence: no rows");
  return AnnulusSequence(*first, std::move(values));
}

void AnnulusSequence::save_csv(const std::string& path) const {
  std::ofstream out(path);
  out << to_csv();
  if (!out) throw Error("AnnulusSequence: cannot write " + path);
}

AnnulusSequence AnnulusSequence::load_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("AnnulusSequence: cannot read " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return from_csv(os.str());
}

nlohmann::json GrowthReport::to_json() const {
  nlohmann::json rows_json = nlohmann::json::array();
  for (const GrowthRow& r : rows) {
    rows_json.push_back({{"N", r.n}, {"lhs", r.lhs}, {"rhs", r.rhs}, {"holds", r.holds}});
  }
  return {{"beta", beta},       {"mu", mu},         {"tau", tau},
          {"constant", constant}, {"lambda3", lambda3}, {"K", k_shift},
          {"N_bar", n_bar},     {"verified", verified}, {"rows", rows_json}};
}

double minimal_driteration_lambda(const AnnulusSequence& a, double gamma, double alpha) {
  double lambda = 0.0;
  for (int n = a.k_min(); n <= 0; ++n) {
    lambda = std::max(lambda, a.partial_sum(n) / driteration_rhs(a, n, gamma, alpha));
  }
  return lambda;
}

GrowthReport driteration(const AnnulusSequence& a, double gamma, double alpha, double lambda) {
  check_positive(gamma, "gamma");
  check_positive(alpha, "alpha");
  check_positive(lambda, "Lambda");
  for (int n = a.k_min(); n <= 0; ++n) {
    if (!within(a.partial_sum(n), lambda * driteration_rhs(a, n, gamma, alpha))) {
      throw HypothesisViolation("driteration: hypothesis fails at N = " + std::to_string(n), n);
    }
  }
  GrowthReport rep;
  rep.tau = lambda / (1.0 + lambda) * (1.0 - std::exp2(-gamma));
  const double q = rep.tau + std::exp2(-gamma);
  // N~ = N - K with K = floor(|N~| / 2) uses tau_{K+1}, K + 1 <= |k_min|/2 + 1.
  const int k_top = std::max(0, -a.k_min()) / 2 + 1;
  rep.mu = std::numeric_limits<double>::infinity();
  double tau_k = rep.tau;
  for (int k = 1; k <= k_top; ++k) {
    rep.mu = std::min(rep.mu, -std::log2(tau_k) / k);
    tau_k *= q;
  }
  const double m = std::min({rep.mu, alpha, 1.0});
  rep.beta = 0.5 * m;
  const double total = a.total();
  rep.constant = total == 0.0 ? lambda : total / (1.0 - std::exp2(-gamma)) + count_constant(m);
  rep.n_bar = 0;
  rep.rows = conclusion_rows(a, 0, rep.constant, rep.beta, rep.verified);
  return rep;
}

GrowthReport iteration_reduce(const AnnulusSequence& a, double lambda1, double lambda2,
                              double gamma, int l) {
  check_positive(lambda1, "Lambda_1");
  check_positive(lambda2, "Lambda_2");
  check_positive(gamma, "gamma");
  if (l < 1) throw PreconditionError("iteration_reduce: L must be >= 1");
  for (int n = a.k_min(); n <= 0; ++n) {
    const double rhs = iteration_rhs_linear(a, n, lambda1, lambda2, gamma, l) + lambda2 * std::exp2(gamma * n);
    if (!within(a.partial_sum(n), rhs)) {
      throw HypothesisViolation("iteration_reduce: hypothesis fails at N = " + std::to_string(n), n);
    }
  }
  int k = 1;
  while (std::exp2(-gamma * k) > 1.0 / (4.0 * lambda1)) ++k;
  const double lambda3 = std::exp2(gamma * k) * (4.0 * lambda1 + std::exp2(gamma * l + 2) + 4.0 * lambda2);
  bool reduced_ok = true;
  for (int n = a.k_min(); n <= -k; ++n) {
    reduced_ok = reduced_ok && within(a.partial_sum(n),
                                      lambda3 * (upper_tail(a, n, gamma, 0) + std::exp2(gamma * n)));
  }
  // b_k = a_{k-K} satisfies the driteration hypothesis with alpha = gamma.
  GrowthReport rep = driteration(a.shifted(k), gamma, gamma, lambda3);
  rep.lambda3 = lambda3;
  rep.k_shift = k;
  rep.n_bar = -k;
  rep.constant *= std::exp2(rep.beta * k);
  bool ok = false;
  rep.rows = conclusion_rows(a, -k, rep.constant, rep.beta, ok);
  rep.verified = ok && reduced_ok;
  return rep;
}

GeneratedSequence generate_driteration_sequence(std::uint64_t seed, double gamma, double alpha) {
  std::mt19937_64 rng(seed);
  AnnulusSequence a = random_shape(rng);
  const double lambda = minimal_driteration_lambda(a, gamma, alpha);
  return {a, lambda > 0.0 ? lambda : 1.0};
}

GeneratedSequence generate_iteration_sequence(std::uint64_t seed, double lambda1, double lambda2,
                                              double gamma, int l) {
  std::mt19937_64 rng(seed);
  const AnnulusSequence w = random_shape(rng);
  double scale = std::numeric_limits<double>::infinity();
  for (int n = w.k_min(); n <= 0; ++n) {
    const double excess = w.partial_sum(n) - iteration_rhs_linear(w, n, lambda1, lambda2, gamma, l);
    if (excess > 0.0) scale = std::min(scale, lambda2 * std::exp2(gamma * n) / excess);
  }
  if (!std::isfinite(scale)) scale = 1.0;
  std::vector<double> v = w.values();
  for (double& x : v) x *= scale;
  return {AnnulusSequence(w.k_min(), std::move(v)), scale};
}

AnnulusSequence driteration_counterexample(int witness, double gamma, double alpha, double lambda) {
  check_positive(gamma, "gamma");
  check_positive(alpha, "alpha");
  check_positive(lambda, "Lambda");
  if (witness > 0) throw PreconditionError("counterexample: witness must be <= 0");
  std::vector<double> v(8, 0.0);
  v[5] = 4.0 * lambda * std::exp2(alpha * witness) + 1.0;
  return AnnulusSequence(witness - 5, std::move(v));
}

AnnulusSequence iteration_counterexample(int witness, double lambda1, double lambda2, double gamma,
                                         int l) {
  check_positive(lambda1, "Lambda_1");
  check_positive(lambda2, "Lambda_2");
  check_positive(gamma, "gamma");
  if (l < 1) throw PreconditionError("counterexample: L must be >= 1");
  if (witness > 0) throw PreconditionError("counterexample: witness must be <= 0");
  // A single spike m steps below the witness: absorbed while
  // lambda1 2^{-gamma m'} >= 1/2, violated from m' = m on.
  int m = 1;
  while (lambda1 * std::exp2(-gamma * m) >= 0.5) ++m;
  const double gap = 0.5 - lambda1 * std::exp2(-gamma * m);
  std::vector<double> v(static_cast<std::size_t>(m + 5), 0.0);
  v[2] = 4.0 * lambda2 * std::exp2(gamma * witness) / gap;
  return AnnulusSequence(witness - m - 2, std::move(v));
}

}  // namespace fracharm
