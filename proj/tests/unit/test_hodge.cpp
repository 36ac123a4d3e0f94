#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "fracharm/errors.hpp"
#include "fracharm/fields.hpp"
#include "fracharm/hodge.hpp"

using namespace fracharm;

namespace {

constexpr double kPi = std::numbers::pi;

// Columns |xi|^s e_j for the grid points j of the mask, full-grid rows.
Eigen::MatrixXd range_matrix(const DomainMask& d, double s) {
  const Grid& g = d.grid();
  const auto idx = d.indices();
  Eigen::MatrixXd out(static_cast<Eigen::Index>(g.size()), static_cast<Eigen::Index>(idx.size()));
  for (std::size_t j = 0; j < idx.size(); ++j) {
    std::vector<double> e(g.size(), 0.0);
    e[idx[j]] = 1.0;
    const GridFunction col = frac_laplacian(GridFunction(g, e), s);
    for (std::size_t i = 0; i < g.size(); ++i) out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = col[i];
  }
  return out;
}

Eigen::VectorXd as_vector(const GridFunction& f) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(f.size()));
  for (std::size_t i = 0; i < f.size(); ++i) v[static_cast<Eigen::Index>(i)] = f[i];
  return v;
}

GridFunction random_in(const DomainMask& d, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  std::vector<double> v(d.grid().size(), 0.0);
  for (std::size_t i : d.indices()) v[i] = nd(rng);
  return GridFunction(d.grid(), v);
}

}  // namespace

TEST_CASE("hodge decomposition matches the dense least-squares solution") {
  const Grid g = Grid::make(1, 64, 1.0);
  const DomainMask d = DomainMask::ball(g, {0.1, 0, 0}, 0.125);
  const GridFunction f = band_limited_field(g, 3);
  for (double s : {0.25, 0.5, 1.0}) {
    const HodgeDecomposition dec = hodge_decompose(f, d, s);
    const Eigen::MatrixXd b = range_matrix(d, s);
    const Eigen::VectorXd coef = (b.transpose() * b).ldlt().solve(b.transpose() * as_vector(f));
    const auto idx = d.indices();
    double err = 0.0, scale = coef.cwiseAbs().maxCoeff();
    for (std::size_t j = 0; j < idx.size(); ++j) err = std::max(err, std::abs(dec.phi[idx[j]] - coef[static_cast<Eigen::Index>(j)]));
    CHECK(err <= 1e-7 * scale);
    CHECK(dec.phi.restricted(d.complement()).max_abs() == 0.0);
    const Eigen::VectorXd h = as_vector(f) - b * coef;
    CHECK((as_vector(dec.h) - h).cwiseAbs().maxCoeff() <= 1e-8 * h.cwiseAbs().maxCoeff());
  }
}

TEST_CASE("hodge invariants over 20 seeds, n = 1, s = 1/2") {
  const Grid g = Grid::make(1, 1024, 1.0);
  const DomainMask d = DomainMask::ball(g, {0, 0, 0}, 0.125);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const HodgeDecomposition dec = hodge_decompose(band_limited_field(g, seed), d, 0.5);
    CHECK(dec.residual <= 1e-10);
    CHECK(dec.orthogonality <= 1e-8);
    CHECK(dec.energy_ratio <= 5.0);
    CHECK(dec.iterations <= 500);
    CHECK(dec.relative_gradient <= 1e-10);
  }
}

TEST_CASE("orthogonality measured directly against point masses") {
  const Grid g = Grid::make(1, 256, 1.0);
  const DomainMask d = DomainMask::ball(g, {0, 0, 0}, 0.1);
  const HodgeDecomposition dec = hodge_decompose(band_limited_field(g, 5), d, 0.5);
  double worst = 0.0;
  for (std::size_t i : d.indices()) {
    std::vector<double> e(g.size(), 0.0);
    e[i] = 1.0;
    const GridFunction dpsi = frac_laplacian(GridFunction(g, e), 0.5);
    worst = std::max(worst, std::abs(inner_product(dec.h, dpsi)) / (l2_norm(dec.h) * l2_norm(dpsi)));
  }
  CHECK(worst == doctest::Approx(dec.orthogonality).epsilon(1e-6));
  CHECK(worst <= 1e-8);
}

TEST_CASE("hodge: exactly representable input and the zero input") {
  const Grid g = Grid::make(1, 512, 1.0);
  const DomainMask d = DomainMask::ball(g, {0, 0, 0}, 0.2);
  const GridFunction inner = windowed_field(g, 9, {0, 0, 0}, 0.15);
  const GridFunction f = frac_laplacian(inner, 0.5);
  const HodgeDecomposition dec = hodge_decompose(f, d, 0.5);
  CHECK(l2_norm(dec.h) <= 1e-8 * l2_norm(f));
  CHECK(l2_norm(dec.phi - inner) <= 1e-6 * l2_norm(inner));

  const HodgeDecomposition zero = hodge_decompose(GridFunction::zeros(g), d, 0.5);
  CHECK(zero.phi.max_abs() == 0.0);
  CHECK(zero.h.max_abs() == 0.0);
  CHECK(zero.iterations == 0);
}

TEST_CASE("the computed phi minimizes the energy") {
  const Grid g = Grid::make(1, 512, 1.0);
  const DomainMask d = DomainMask::ball(g, {0, 0, 0}, 0.15);
  const GridFunction f = band_limited_field(g, 17);
  const HodgeDecomposition dec = hodge_decompose(f, d, 0.5);
  const double e0 = hodge_energy(f, dec.phi, 0.5);
  CHECK(e0 == doctest::Approx(std::pow(l2_norm(dec.h), 2)).epsilon(1e-12));
  for (std::uint64_t k = 0; k < 10; ++k) {
    const GridFunction psi = random_in(d, 100 + k);
    const double scale = l2_norm(dec.phi) / l2_norm(psi);
    for (double eps : {1e-3, -1e-3, 1e-1}) {
      CHECK(hodge_energy(f, dec.phi + (eps * scale) * psi, 0.5) - e0 >= -1e-10 * e0);
    }
  }
}

TEST_CASE("input far from the mask is barely captured, less so with a wider gap") {
  const Grid g = Grid::make(1, 4096, 1.0);
  const DomainMask d = DomainMask::ball(g, {0, 0, 0}, 1.0 / 32);
  double prev = 1.0;
  for (double c : {0.1, 0.2, 0.4}) {
    const GridFunction f = smooth_bump(g, {c, 0, 0}, 0.01, 0.02);
    const HodgeDecomposition dec = hodge_decompose(f, d, 0.5);
    const double frac = l2_norm(frac_laplacian(dec.phi, 0.5)) / l2_norm(f);
    CHECK(frac < prev);
    prev = frac;
  }
  CHECK(prev < 0.05);
}

TEST_CASE("hodge preconditions and convergence failure") {
  const Grid g = Grid::make(1, 256, 1.0);
  const GridFunction f = band_limited_field(g, 1);
  CHECK_THROWS_AS(hodge_decompose(f, DomainMask::ball(g, {0, 0, 0}, 0.3), 0.5), PreconditionError);
  CHECK_THROWS_AS(hodge_decompose(f, DomainMask::ball(g, {0, 0, 0}, 0.1), 0.0), PreconditionError);
  CHECK_THROWS_AS(hodge_decompose(f, DomainMask::empty(g), 0.5), PreconditionError);
  const Grid other = Grid::make(1, 128, 1.0);
  CHECK_THROWS_AS(hodge_decompose(f, DomainMask::ball(other, {0, 0, 0}, 0.1), 0.5), PreconditionError);
  CHECK_THROWS_AS(hodge_decompose(f, DomainMask::ball(g, {0, 0, 0}, 0.2), 0.5, 3), ConvergenceError);
}

TEST_CASE("harmonic decay: zero input and per-field ratios") {
  const Grid g = Grid::make(1, 2048, 2048.0);
  const HarmonicDecayReport zero = harmonic_decay_check(GridFunction::zeros(g), 8, {0, 0, 0}, {8, 16, 32});
  for (double rho : zero.ratios) CHECK(rho == 0.0);
  const HarmonicDecayReport rep = harmonic_decay_check(band_limited_field(g, 2), 8, {0, 0, 0}, {32, 8, 16});
  REQUIRE(rep.ratios.size() == 3);
  CHECK(rep.lambdas.front() == 8.0);
  for (double rho : rep.ratios) CHECK((rho > 0.0 && rho < 1.0));
}

TEST_CASE("worst-case remainder ratio agrees with a dense projection") {
  const Grid g = Grid::make(1, 128, 128.0);
  const double r = 2.0, lambda = 4.0;
  const DomainMask inner = DomainMask::ball(g, {0, 0, 0}, r);
  const DomainMask outer = DomainMask::ball(g, {0, 0, 0}, lambda * r);
  const Eigen::MatrixXd b = range_matrix(outer, 0.5);
  const Eigen::MatrixXd proj = Eigen::MatrixXd::Identity(b.rows(), b.rows()) -
                               b * (b.transpose() * b).ldlt().solve(b.transpose());
  const auto idx = inner.indices();
  Eigen::MatrixXd sub(idx.size(), idx.size());
  for (std::size_t i = 0; i < idx.size(); ++i)
    for (std::size_t j = 0; j < idx.size(); ++j) sub(i, j) = proj(idx[i], idx[j]);
  const double dense = std::sqrt(Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(sub).eigenvalues().maxCoeff());
  CHECK(harmonic_ratio_sup(g, r, {0, 0, 0}, lambda) == doctest::Approx(dense).epsilon(1e-6));
}

TEST_CASE("worst-case remainder ratio decays at least like lambda^-1/4") {
  const Grid g = Grid::make(1, 4096, 4096.0);
  const HarmonicDecayReport rep = harmonic_decay_sup(g, 8, {0, 0, 0}, {8, 16, 32});
  for (std::size_t i = 1; i < rep.ratios.size(); ++i) CHECK(rep.ratios[i] <= 1.05 * rep.ratios[i - 1]);
  CHECK(rep.ratios[2] <= rep.ratios[0] * std::pow(4.0, -0.25) * 1.1);
  CHECK(rep.pass);
  // Each per-field ratio is below the sup.
  const HarmonicDecayReport one = harmonic_decay_check(band_limited_field(g, 4), 8, {0, 0, 0}, {8, 16, 32});
  for (std::size_t i = 0; i < 3; ++i) CHECK(one.ratios[i] <= rep.ratios[i] * (1 + 1e-6));
}

TEST_CASE("pairing equals the two-sided form") {
  const Grid g = Grid::make(2, 64, 1.0);
  const GridFunction a = band_limited_field(g, 1);
  const GridFunction b = band_limited_field(g, 2);
  const double two_sided = inner_product(frac_laplacian(a, 0.3), frac_laplacian(b, 0.7));
  CHECK(pairing(a, b, 0.3, 0.7) == doctest::Approx(two_sided).epsilon(1e-12));
}

TEST_CASE("disjoint supports: no pairing at order zero, linear in b") {
  const Grid g = Grid::make(1, 4096, 4096.0);
  const std::vector<double> ds{32, 64, 128, 256};
  const PairingDecayReport zero = disjoint_pairing_decay(g, {{0, 0, 0}, 4, 4, 1}, 0.0, 0.0, ds);
  for (double v : zero.values) CHECK(v <= 1e-12);
  const PairingDecayReport one = disjoint_pairing_decay(g, {{0, 0, 0}, 4, 4, 1}, 0.25, 0.25, ds);
  const PairingDecayReport two = disjoint_pairing_decay(g, {{0, 0, 0}, 4, 4, 2}, 0.25, 0.25, ds);
  for (std::size_t i = 0; i < ds.size(); ++i) {
    CHECK(two.values[i] == doctest::Approx(2 * one.values[i]).epsilon(0.01));
    CHECK(two.prefactors[i] == doctest::Approx(one.prefactors[i]).epsilon(0.01));
  }
}

TEST_CASE("disjoint-support decay exponent, n = 1") {
  const Grid g = Grid::make(1, 65536, 65536.0);
  const double r = 16;
  const PairingDecayReport rep =
      disjoint_pairing_decay(g, {{0, 0, 0}, 2, 2, 1}, 0.25, 0.25, {4 * r, 8 * r, 16 * r, 32 * r});
  CHECK(rep.expected_slope == -1.5);
  CHECK(std::abs(rep.slope / rep.expected_slope - 1) <= 0.15);
}

TEST_CASE("disjoint-support decay exponent, n = 2") {
  const Grid g = Grid::make(2, 1024, 1024.0);
  const double r = 8;
  const PairingDecayReport rep =
      disjoint_pairing_decay(g, {{0, 0, 0}, 4, 4, 1}, 0.5, 0.5, {4 * r, 8 * r, 16 * r, 32 * r});
  CHECK(rep.expected_slope == -3.0);
  CHECK(std::abs(rep.slope / rep.expected_slope - 1) <= 0.15);
}

TEST_CASE("disjoint_pairing_decay preconditions") {
  const Grid g = Grid::make(1, 1024, 1024.0);
  CHECK_THROWS_AS(disjoint_pairing_decay(g, {{0, 0, 0}, 4, 4, 1}, 0.25, 0.25, {32, 64}), PreconditionError);
  CHECK_THROWS_AS(disjoint_pairing_decay(g, {{0, 0, 0}, 4, 4, 1}, 0.25, 0.25, {32, 64, 400}),
                  PreconditionError);
  CHECK_THROWS_AS(disjoint_pairing_decay(g, {{0, 0, 0}, 4, 4, 1}, 0.25, 0.25, {2, 64, 128}),
                  PreconditionError);
}

TEST_CASE("localization representative") {
  const Grid g = Grid::make(1, 2048, 2048.0);
  const Point x{0, 0, 0};
  const double gamma = 16;
  const GridFunction none = localization_representative(GridFunction::zeros(g), x, gamma, 32);
  CHECK(none.max_abs() == 0.0);

  std::vector<double> norms;
  for (double d : {2 * gamma, 4 * gamma, 8 * gamma}) {
    const GridFunction b = windowed_field(g, 7, {gamma + d + 2 * gamma, 0, 0}, 2 * gamma);
    const GridFunction a = localization_representative(b, x, gamma, d);
    CHECK(a.restricted(DomainMask::ball(g, x, gamma).complement()).max_abs() == 0.0);
    for (std::uint64_t k = 0; k < 5; ++k) {
      const GridFunction phi = random_in(DomainMask::ball(g, x, gamma), 40 + k);
      const double lhs = inner_product(frac_laplacian(b, 0.25), frac_laplacian(phi, 0.25));
      const double scale = l2_norm(frac_laplacian(b, 0.25)) * l2_norm(frac_laplacian(phi, 0.25));
      CHECK(std::abs(lhs - inner_product(a, phi)) <= 1e-10 * scale);
    }
    norms.push_back(l2_norm(a) / l2_norm(b));
  }
  CHECK(norms[1] <= 1.1 * norms[0]);
  CHECK(norms[2] <= 1.1 * norms[1]);

  const GridFunction close = windowed_field(g, 7, {gamma + 8, 0, 0}, 4);
  CHECK_THROWS_AS(localization_representative(close, x, gamma, 16), PreconditionError);
}

TEST_CASE("local norm recovery") {
  const Grid g = Grid::make(1, 1024, 1024.0);
  const Point x{0, 0, 0};
  const double r = 8;
  const LocalNormResult zero = local_norm_recovery(GridFunction::zeros(g), r, x, 4);
  CHECK(zero.ratio == 0.0);

  const GridFunction v = windowed_field(g, 11, x, r);
  double prev = 0.0;
  for (double lambda : {4.0, 8.0, 16.0, 32.0}) {
    const LocalNormResult res = local_norm_recovery(v, r, x, lambda);
    CHECK(res.ratio >= 1.0 - 1e-10);
    CHECK(res.local_norm == doctest::Approx(l2_norm(v)).epsilon(1e-12));
    if (prev > 0.0) {
      CHECK(res.ratio <= prev * (1 + 1e-8));
      if (lambda >= 16.0) CHECK(res.ratio >= 0.9 * prev);
    }
    prev = res.ratio;
  }
  CHECK_THROWS_AS(local_norm_recovery(v, r, x, 64), PreconditionError);
  CHECK_THROWS_AS(local_norm_recovery(windowed_field(g, 11, {40, 0, 0}, r), r, x, 4), PreconditionError);
}

TEST_CASE("local norm dual sup agrees with a dense projection") {
  const Grid g = Grid::make(1, 128, 128.0);
  const Point x{0, 0, 0};
  const GridFunction v = windowed_field(g, 3, x, 4, 32);
  const LocalNormResult res = local_norm_recovery(v, 4, x, 3);
  const Eigen::MatrixXd b = range_matrix(DomainMask::ball(g, x, 12), 0.5);
  const Eigen::VectorXd c = (b.transpose() * b).ldlt().solve(b.transpose() * as_vector(v));
  const double dense = std::sqrt(g.cell_volume()) * (b * c).norm();
  CHECK(res.dual_norm == doctest::Approx(dense).epsilon(1e-7));
}

TEST_CASE("lower order product norm") {
  const Grid g = Grid::make(2, 32, 1.0);
  const FrequencySymbol id = FrequencySymbol::identity(2);
  const GridFunction cx = GridFunction::sample(g, [](const Point& p) { return std::cos(2 * kPi * p[0]); });
  const GridFunction cy = GridFunction::sample(g, [](const Point& p) { return std::cos(2 * kPi * p[1]); });
  const GridFunction cx2 = GridFunction::sample(g, [](const Point& p) { return std::cos(4 * kPi * p[0]); });
  // unit frequencies: |xi|^{-1/2} cos = cos, product norm 1/2, norms 1/sqrt2
  CHECK(lower_order_product_norm(cx, cy, 0.5, id, id).ratio == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(lower_order_product_norm(cx2, cy, 0.5, id, id).ratio ==
        doctest::Approx(std::sqrt(0.5)).epsilon(1e-12));
  CHECK(lower_order_product_norm(cx, cy, 0.5, FrequencySymbol::riesz(2, 0), id).ratio ==
        doctest::Approx(1.0).epsilon(1e-12));
  CHECK(lower_order_product_norm(GridFunction::zeros(g), cy, 0.5, id, id).norm == 0.0);

  const GridFunction u0 = band_limited_field(g, 1);
  const GridFunction v0 = band_limited_field(g, 2);
  const GridFunction u = u0 - GridFunction::constant(g, u0.mean());
  const GridFunction v = v0 - GridFunction::constant(g, v0.mean());
  const double base = lower_order_product_norm(u, v, 0.5, id, id).ratio;
  CHECK(lower_order_product_norm(3.0 * u, -2.0 * v, 0.5, id, id).ratio == doctest::Approx(base).epsilon(1e-12));

  CHECK_THROWS_AS(lower_order_product_norm(u, v, 1.0, id, id), PreconditionError);
  CHECK_THROWS_AS(lower_order_product_norm(u, v, 0.0, id, id), PreconditionError);
  CHECK_THROWS_AS(lower_order_product_norm(u + GridFunction::constant(g, 1.0), v, 0.5, id, id),
                  PreconditionError);
}

TEST_CASE("lower order product extremal against a dense singular-value scan") {
  // Band 0 < |k|_inf <= 1 on an 8 x 8 grid: an 8-dimensional real space.
  const Grid g = Grid::make(2, 8, 1.0);
  const FrequencySymbol m1 = FrequencySymbol::riesz(2, 0), m2 = FrequencySymbol::riesz(2, 1);
  const double w = std::sqrt(g.cell_volume());
  Eigen::MatrixXd raw(g.size(), 12);
  for (int j = 0; j < 12; ++j) {
    const GridFunction f = band_project(band_limited_field(g, 40 + j, 1), 1);
    for (std::size_t i = 0; i < g.size(); ++i) raw(i, j) = w * f[i];
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(raw, Eigen::ComputeThinU);
  REQUIRE(svd.singularValues()[7] > 1e-8);
  REQUIRE(svd.singularValues()[8] < 1e-10);
  std::vector<GridFunction> basis;
  for (int j = 0; j < 8; ++j) {
    std::vector<double> vals(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) vals[i] = svd.matrixU()(i, j) / w;
    basis.emplace_back(g, vals);
  }
  auto combine = [&](const Eigen::VectorXd& c) {
    GridFunction u = GridFunction::zeros(g);
    for (int i = 0; i < 8; ++i) u = u + c[i] * basis[i];
    return u;
  };
  auto best_over_v = [&](const GridFunction& u) {
    Eigen::MatrixXd m(g.size(), 8);
    for (int j = 0; j < 8; ++j) {
      const GridFunction a = apply_symbol(inv_frac_laplacian(u, 0.5, ZeroModePolicy::project_mean_first), m1);
      const GridFunction b = apply_symbol(inv_frac_laplacian(basis[j], 0.5, ZeroModePolicy::project_mean_first), m2);
      const GridFunction p = a * b;
      for (std::size_t i = 0; i < g.size(); ++i) m(i, j) = w * p[i];
    }
    return Eigen::JacobiSVD<Eigen::MatrixXd>(m).singularValues()[0];
  };
  std::mt19937_64 rng(5);
  std::normal_distribution<double> normal;
  double scan = 0.0;
  for (int t = 0; t < 20000; ++t) {
    Eigen::VectorXd c(8);
    for (int i = 0; i < 8; ++i) c[i] = normal(rng);
    scan = std::max(scan, best_over_v(combine(c.normalized())));
  }
  const ProductNormExtremal r =
      lower_order_product_extremal(band_limited_field(g, 1, 1), band_limited_field(g, 2, 1), 0.5, m1, m2, 1, 1e-10);
  CHECK(r.ratio >= scan * (1 - 1e-9));
  CHECK(r.ratio <= scan * 1.02);
  CHECK(lower_order_product_norm(r.u, r.v, 0.5, m1, m2).ratio == doctest::Approx(r.ratio).epsilon(1e-12));
  CHECK(l2_norm(r.u) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(high_mode_fraction(r.v, 1) < 1e-20);
}

TEST_CASE("lower order product extremal: monotone and start-independent") {
  const Grid g = Grid::make(2, 32, 1.0);
  const FrequencySymbol m1 = FrequencySymbol::riesz(2, 0), m2 = FrequencySymbol::riesz(2, 1);
  const GridFunction u = band_project(band_limited_field(g, 1)), v = band_project(band_limited_field(g, 2));
  const ProductNormExtremal a = lower_order_product_extremal(u, v, 0.5, m1, m2);
  CHECK(a.ratio >= lower_order_product_norm(u, v, 0.5, m1, m2).ratio);
  const ProductNormExtremal b =
      lower_order_product_extremal(band_limited_field(g, 7), band_limited_field(g, 8), 0.5, m1, m2);
  CHECK(a.ratio == doctest::Approx(b.ratio).epsilon(1e-4));
  CHECK_THROWS_AS(lower_order_product_extremal(u, v, 1.0, m1, m2), PreconditionError);
  CHECK_THROWS_AS(lower_order_product_extremal(u, v, 0.5, m1, m2, 16), PreconditionError);
}
