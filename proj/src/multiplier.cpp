#include "fracharm/multiplier.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "fracharm/errors.hpp"
#include "fracharm/fields.hpp"
#include "fracharm/numerics.hpp"

namespace fracharm {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double norm3(const Point& xi) {
  return std::sqrt(xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2]);
}

double int_pow(double x, int k) {
  double r = 1.0;
  for (int i = 0; i < k; ++i) r *= x;
  return r;
}

Complex eval_terms(const std::vector<PowerTerm>& terms, const Point& xi) {
  const double r = norm3(xi);
  Complex sum = 0.0;
  for (const auto& t : terms) {
    if (t.coeff == Complex(0.0)) continue;
    double v = std::pow(r, t.gamma);
    for (int d = 0; d < 3; ++d) v *= int_pow(xi[d], t.beta[d]);
    sum += t.coeff * v;
  }
  return sum;
}

void add_term(std::vector<PowerTerm>& terms, const PowerTerm& t) {
  if (t.coeff == Complex(0.0)) return;
  for (auto& existing : terms) {
    if (existing.beta == t.beta && std::fabs(existing.gamma - t.gamma) < 1e-14) {
      existing.coeff += t.coeff;
      return;
    }
  }
  terms.push_back(t);
}

std::vector<PowerTerm> differentiate(const std::vector<PowerTerm>& terms, int j) {
  std::vector<PowerTerm> out;
  for (const auto& t : terms) {
    if (t.beta[j] > 0) {
      PowerTerm a = t;
      a.coeff *= static_cast<double>(t.beta[j]);
      a.beta[j] -= 1;
      add_term(out, a);
    }
    if (t.gamma != 0.0) {
      PowerTerm b = t;
      b.coeff *= t.gamma;
      b.beta[j] += 1;
      b.gamma -= 2.0;
      add_term(out, b);
    }
  }
  return out;
}

std::vector<PowerTerm> scale_by_abs_pow(std::vector<PowerTerm> terms, double t) {
  for (auto& term : terms) term.gamma += t;
  return terms;
}

std::vector<Point> sample_points(int dim) {
  const std::vector<Point> base = {
      {1, 0, 0}, {-2, 1, 0}, {3, -1, 2}, {0, 2, -1}, {5, 3, 1}, {-1, -4, 3}};
  std::vector<Point> out;
  for (Point p : base) {
    for (int d = dim; d < 3; ++d) p[d] = 0.0;
    if (norm3(p) > 0.0) out.push_back(p);
  }
  return out;
}

std::string format_double(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

// 4th-order central difference along axis j with step proportional to |xi|.
Complex central_difference(const FrequencySymbol::Evaluator& g, const Point& xi,
                           int j) {
  const double h = 5e-3 * norm3(xi);
  auto at = [&](double k) {
    Point p = xi;
    p[j] += k * h;
    return g(p);
  };
  return (-at(2) + 8.0 * at(1) - 8.0 * at(-1) + at(-2)) / (12.0 * h);
}

}  // namespace

// ---------------------------------------------------------- symbols

FrequencySymbol FrequencySymbol::from_terms(int dim, std::vector<PowerTerm> terms,
                                            std::string id) {
  if (dim < 1 || dim > 3) throw PreconditionError("symbol dim must be 1, 2 or 3");
  FrequencySymbol m;
  m.dim_ = dim;
  m.id_ = std::move(id);
  std::optional<double> degree;
  bool homogeneous = true;
  bool real = true;
  for (const auto& t : terms) {
    for (int d = dim; d < 3; ++d) {
      if (t.beta[d] != 0) throw PreconditionError("term exponent beyond symbol dim");
    }
    const double deg = order(t.beta) + t.gamma;
    if (!degree) degree = deg;
    if (std::fabs(*degree - deg) > 1e-12) homogeneous = false;
    const Complex want = (order(t.beta) % 2 == 0) ? std::conj(t.coeff) : -std::conj(t.coeff);
    if (std::abs(want - t.coeff) > 1e-14 * std::abs(t.coeff)) real = false;
  }
  m.degree_ = homogeneous ? degree.value_or(0.0) : std::optional<double>{};
  m.real_ = real;
  m.terms_ = terms;
  m.eval_ = [terms = std::move(terms)](const Point& xi) { return eval_terms(terms, xi); };
  m.verify();
  return m;
}

FrequencySymbol FrequencySymbol::custom(int dim, Evaluator eval,
                                        std::optional<double> degree, bool real,
                                        std::string id) {
  if (dim < 1 || dim > 3) throw PreconditionError("symbol dim must be 1, 2 or 3");
  if (!eval) throw PreconditionError("symbol evaluator is empty");
  FrequencySymbol m;
  m.dim_ = dim;
  m.eval_ = std::move(eval);
  m.degree_ = degree;
  m.real_ = real;
  m.id_ = std::move(id);
  m.verify();
  return m;
}

FrequencySymbol FrequencySymbol::identity(int dim) {
  return from_terms(dim, {PowerTerm{}}, "identity");
}

FrequencySymbol FrequencySymbol::abs_pow(int dim, double s) {
  return from_terms(dim, {PowerTerm{1.0, {0, 0, 0}, s}}, "abs_pow:" + format_double(s));
}

FrequencySymbol FrequencySymbol::riesz(int dim, int j) {
  if (j < 0 || j >= dim) throw PreconditionError("riesz index out of range");
  PowerTerm t{Complex(0.0, 1.0), {0, 0, 0}, -1.0};
  t.beta[j] = 1;
  return from_terms(dim, {t}, "riesz:" + std::to_string(j));
}

FrequencySymbol FrequencySymbol::parse(int dim, const std::string& id) {
  if (id == "identity") return identity(dim);
  const auto colon = id.find(':');
  if (colon == std::string::npos) throw PreconditionError("unknown symbol id: " + id);
  const std::string kind = id.substr(0, colon);
  const std::string arg = id.substr(colon + 1);
  try {
    if (kind == "abs_pow") return abs_pow(dim, std::stod(arg));
    if (kind == "riesz") return riesz(dim, std::stoi(arg));
  } catch (const std::logic_error&) {
    throw PreconditionError("malformed symbol argument: " + id);
  }
  throw PreconditionError("unknown symbol id: " + id);
}

Complex FrequencySymbol::operator()(const Point& xi) const { return eval_(xi); }

double FrequencySymbol::sample_scale() const {
  double scale = 0.0;
  for (const Point& xi : sample_points(dim_)) scale = std::max(scale, std::abs(eval_(xi)));
  return scale;
}

// Deviations are relative to the larger of |value| and the largest sampled
// magnitude, so a symbol vanishing at a sample point reports no rounding noise.
double FrequencySymbol::homogeneity_defect() const {
  if (!degree_) return 0.0;
  const double floor = sample_scale();
  double worst = 0.0;
  for (const Point& xi : sample_points(dim_)) {
    const Complex base = eval_(xi);
    for (double lambda : {2.0, 4.0}) {
      const Point scaled{lambda * xi[0], lambda * xi[1], lambda * xi[2]};
      const Complex expect = std::pow(lambda, *degree_) * base;
      const Complex got = eval_(scaled);
      const double denom = std::max(std::abs(expect), std::pow(lambda, *degree_) * floor);
      if (denom == 0.0) continue;
      worst = std::max(worst, std::abs(got - expect) / denom);
    }
  }
  return worst;
}

double FrequencySymbol::reality_defect() const {
  const double floor = sample_scale();
  double worst = 0.0;
  for (const Point& xi : sample_points(dim_)) {
    const Complex a = eval_(xi);
    const Complex b = eval_(Point{-xi[0], -xi[1], -xi[2]});
    const double scale = std::max({std::abs(a), std::abs(b), floor});
    if (scale == 0.0) continue;
    worst = std::max(worst, std::abs(b - std::conj(a)) / scale);
  }
  return worst;
}

void FrequencySymbol::verify() const {
  for (const Point& xi : sample_points(dim_)) {
    const Complex v = eval_(xi);
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
      throw PreconditionError("symbol " + id_ + " is not finite away from 0");
    }
  }
  if (degree_ && homogeneity_defect() > 1e-10) {
    throw PreconditionError("symbol " + id_ + " is not homogeneous of degree " +
                            format_double(*degree_));
  }
  if (real_ && reality_defect() > 1e-10) {
    throw PreconditionError("symbol " + id_ + " does not satisfy m(-xi) = conj m(xi)");
  }
}

FrequencySymbol derived_symbol(const FrequencySymbol& m, const MultiIndex& alpha,
                               double s) {
  const int k = order(alpha);
  if (k == 0) return m;
  if (k > 2) throw PreconditionError("derived_symbol supports |alpha| <= 2");
  for (int d = 0; d < 3; ++d) {
    if (alpha[d] < 0 || (d >= m.dim() && alpha[d] != 0)) {
      throw PreconditionError("derived_symbol: invalid multi-index");
    }
  }
  const Complex prefactor = std::pow(Complex(0.0, kTwoPi), -k);
  std::ostringstream id;
  id << "derived:" << m.id() << ",(" << alpha[0] << "," << alpha[1] << ","
     << alpha[2] << ")," << format_double(s);

  if (m.terms()) {
    std::vector<PowerTerm> g = scale_by_abs_pow(*m.terms(), s);
    for (int d = 0; d < 3; ++d) {
      for (int r = 0; r < alpha[d]; ++r) g = differentiate(g, d);
    }
    g = scale_by_abs_pow(std::move(g), k - s);
    for (auto& t : g) t.coeff *= prefactor;
    if (g.empty()) g.push_back(PowerTerm{0.0, {0, 0, 0}, m.degree().value_or(0.0)});
    return FrequencySymbol::from_terms(m.dim(), std::move(g), id.str());
  }

  std::vector<int> axes;
  for (int d = 0; d < 3; ++d) {
    for (int r = 0; r < alpha[d]; ++r) axes.push_back(d);
  }
  FrequencySymbol::Evaluator g = [m, s](const Point& xi) {
    return std::pow(norm3(xi), s) * m(xi);
  };
  for (int axis : axes) {
    g = [g, axis](const Point& xi) { return central_difference(g, xi, axis); };
  }
  FrequencySymbol::Evaluator out = [g, k, s, prefactor](const Point& xi) {
    return prefactor * std::pow(norm3(xi), k - s) * g(xi);
  };
  return FrequencySymbol::custom(m.dim(), std::move(out), m.degree(), m.real(),
                                 id.str());
}

// ------------------------------------------------------- application

void multiply_spectrum(Spectrum& spec, const FrequencySymbol& m,
                       ZeroModePolicy policy) {
  if (m.dim() != spec.grid.dim()) throw PreconditionError("symbol dim differs from grid");
  for (std::size_t i = 0; i < spec.coeffs.size(); ++i) {
    if (i == 0) {
      if (policy != ZeroModePolicy::identity_at_zero) spec.coeffs[0] = 0.0;
      continue;
    }
    const Complex v = m(spec.grid.frequency(i));
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
      throw PreconditionError("symbol " + m.id() + " is not finite on the lattice");
    }
    spec.coeffs[i] *= v;
  }
}

std::vector<Complex> apply_symbol_complex(const GridFunction& f,
                                          const FrequencySymbol& m,
                                          ZeroModePolicy policy) {
  Spectrum spec = transform_forward(f);
  multiply_spectrum(spec, m, policy);
  return transform_inverse(spec);
}

GridFunction apply_symbol(const GridFunction& f, const FrequencySymbol& m,
                          ZeroModePolicy policy) {
  if (!m.real()) {
    throw PreconditionError("symbol " + m.id() +
                            " is not real-preserving; use apply_symbol_complex");
  }
  Spectrum spec = transform_forward(f);
  multiply_spectrum(spec, m, policy);
  return transform_inverse_real(spec);
}

GridFunction frac_laplacian(const GridFunction& f, double s, ZeroModePolicy policy) {
  if (s == 0.0) return f;
  if (s < 0.0) return inv_frac_laplacian(f, -s, policy);
  Spectrum spec = transform_forward(f);
  const Grid& grid = f.grid();
  spec.coeffs[0] = 0.0;
  for (std::size_t i = 1; i < spec.coeffs.size(); ++i) {
    spec.coeffs[i] *= std::pow(grid.frequency_norm(i), s);
  }
  return transform_inverse_real(spec);
}

GridFunction inv_frac_laplacian(const GridFunction& f, double s,
                                ZeroModePolicy policy) {
  if (!(s > 0.0)) throw PreconditionError("inv_frac_laplacian requires s > 0");
  const double mean = f.mean();
  double ms = 0.0;
  for (double v : f.values()) ms += v * v;
  const double rms = std::sqrt(ms / static_cast<double>(f.size()));
  if (policy != ZeroModePolicy::project_mean_first &&
      std::fabs(mean) > 1e-10 * rms) {
    throw PreconditionError(
        "inv_frac_laplacian: input mean is not zero; request project_mean_first");
  }
  Spectrum spec = transform_forward(f);
  const Grid& grid = f.grid();
  spec.coeffs[0] = 0.0;
  for (std::size_t i = 1; i < spec.coeffs.size(); ++i) {
    spec.coeffs[i] *= std::pow(grid.frequency_norm(i), -s);
  }
  return transform_inverse_real(spec);
}

GridFunction partial_derivative(const GridFunction& f, const MultiIndex& alpha) {
  if (order(alpha) == 0) return f;
  const Grid& grid = f.grid();
  for (int d = grid.dim(); d < 3; ++d) {
    if (alpha[d] != 0) throw PreconditionError("derivative index beyond grid dim");
  }
  Spectrum spec = transform_forward(f);
  for (std::size_t i = 0; i < spec.coeffs.size(); ++i) {
    const Point xi = grid.frequency(i);
    Complex factor = 1.0;
    for (int d = 0; d < grid.dim(); ++d) {
      factor *= std::pow(Complex(0.0, kTwoPi * xi[d]), alpha[d]);
    }
    spec.coeffs[i] *= factor;
  }
  return transform_inverse_real(spec);
}

std::vector<MultiIndex> multi_indices_of_order(int dim, int k) {
  std::vector<MultiIndex> out;
  const int hi1 = dim >= 2 ? k : 0;
  const int hi2 = dim >= 3 ? k : 0;
  for (int a = k; a >= 0; --a) {
    for (int b = std::min(k - a, hi1); b >= 0; --b) {
      const int c = k - a - b;
      if (c > hi2) continue;
      out.push_back({a, b, c});
    }
  }
  return out;
}

double factorial(const MultiIndex& a) {
  double r = 1.0;
  for (int d = 0; d < 3; ++d) {
    for (int i = 2; i <= a[d]; ++i) r *= i;
  }
  return r;
}

GridFunction monomial(const Grid& grid, const MultiIndex& alpha) {
  for (int d = grid.dim(); d < 3; ++d) {
    if (alpha[d] != 0) throw PreconditionError("monomial index beyond grid dim");
  }
  return GridFunction::sample(grid, [&](const Point& x) {
    double v = 1.0;
    for (int d = 0; d < 3; ++d) v *= int_pow(x[d], alpha[d]);
    return v;
  });
}

double product_rule_residual(const GridFunction& phi, const MultiIndex& alpha,
                             double s, const DomainMask& window,
                             const FrequencySymbol& m) {
  if (order(alpha) > s) throw PreconditionError("product_rule_residual requires |alpha| <= s");
  const Grid& grid = phi.grid();
  const GridFunction lhs =
      apply_symbol(frac_laplacian(monomial(grid, alpha) * phi, s), m);
  GridFunction rhs = GridFunction::zeros(grid);
  for (int b0 = 0; b0 <= alpha[0]; ++b0) {
    for (int b1 = 0; b1 <= alpha[1]; ++b1) {
      for (int b2 = 0; b2 <= alpha[2]; ++b2) {
        const MultiIndex beta{b0, b1, b2};
        const MultiIndex rest{alpha[0] - b0, alpha[1] - b1, alpha[2] - b2};
        // d^beta x^alpha = alpha!/(alpha-beta)! x^(alpha-beta)
        const double weight = factorial(alpha) / (factorial(rest) * factorial(beta));
        const FrequencySymbol mb = derived_symbol(m, beta, s);
        const GridFunction term =
            apply_symbol(frac_laplacian(phi, s - order(beta)), mb);
        rhs = rhs + monomial(grid, rest) * term * weight;
      }
    }
  }
  return l2_norm(lhs - rhs, &window);
}

double product_rule_residual(const GridFunction& phi, const MultiIndex& alpha,
                             double s, const DomainMask& window) {
  return product_rule_residual(phi, alpha, s, window,
                               FrequencySymbol::identity(phi.grid().dim()));
}

AnnihilationReport polynomial_annihilation(const MultiIndex& alpha, double s,
                                           const GridFunction& phi,
                                           const std::vector<double>& radii,
                                           double p_prime) {
  if (radii.size() < 3) throw PreconditionError("polynomial_annihilation needs >= 3 radii");
  if (!(s > order(alpha))) throw PreconditionError("polynomial_annihilation requires s > |alpha|");
  const Grid& grid = phi.grid();
  for (std::size_t i = 0; i < radii.size(); ++i) {
    if (!(radii[i] > 0.0) || (i > 0 && radii[i] <= radii[i - 1])) {
      throw PreconditionError("radii must be positive and increasing");
    }
    if (2.0 * radii[i] > 0.5 * grid.box_length()) {
      throw PreconditionError("cutoff support 2R exceeds the half box");
    }
  }
  const GridFunction lap = frac_laplacian(phi, s);
  const GridFunction xa = monomial(grid, alpha);
  AnnihilationReport report;
  report.radii = radii;
  for (double R : radii) {
    const GridFunction eta = GridFunction::sample(grid, [&](const Point& x) {
      return bump_profile(norm3(x) / R, 1.5, 2.0);
    });
    report.values.push_back(std::fabs(inner_product(eta * xa, lap)));
  }
  const double n = grid.dim();
  report.bound = -s + order(alpha) + (std::isinf(p_prime) ? 0.0 : n / p_prime);
  report.slope = loglog_slope(report.radii, report.values);
  report.pass = report.slope <= report.bound;
  return report;
}

}  // namespace fracharm
