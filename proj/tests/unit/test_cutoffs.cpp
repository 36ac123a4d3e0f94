#include <doctest.h>

#include <cmath>

#include "fracharm/cutoffs.hpp"
#include "fracharm/errors.hpp"
#include "fracharm/fields.hpp"

using namespace fracharm;

TEST_CASE("first member matches the recursion by hand") {
  const auto fam = DyadicCutoffFamily::build(1);
  for (double r = 0.0; r < 5.0; r += 0.01) {
    const double e0 = bump_profile(r, 1.5, 2.0);
    const double e0half = bump_profile(r / 2, 1.5, 2.0);
    CHECK(fam.value(0, r) == doctest::Approx(e0).epsilon(1e-15));
    CHECK(fam.value(1, r) == doctest::Approx((1 - e0) * e0half).epsilon(1e-14));
    if (r <= 1.0 || r >= 4.0) CHECK(fam.value(1, r) == 0.0);
  }
}

TEST_CASE("family invariants up to depth 10") {
  const int K = 10;
  const auto fam = DyadicCutoffFamily::build(K);
  double worst_partition = 0.0, worst_support = 0.0, worst_range = 0.0;
  for (int k = 0; k <= K; ++k) {
    const double top = std::ldexp(1.0, k + 1) * 1.2;
    for (int i = 0; i <= 4000; ++i) {
      const double r = top * i / 4000.0;
      double sum = 0.0;
      for (int l = 0; l <= k; ++l) sum += fam.value(l, r);
      if (r < std::ldexp(1.0, k)) worst_partition = std::max(worst_partition, std::fabs(sum - 1.0));
      const double v = fam.value(k, r);
      worst_range = std::max({worst_range, -v, v - 1.0});
      const bool outside = k == 0 ? r >= 2.0 : (r >= std::ldexp(1.0, k + 1) || r <= std::ldexp(1.0, k - 1));
      if (outside) worst_support = std::max(worst_support, std::fabs(v));
    }
  }
  CHECK(worst_partition <= 1e-12);
  CHECK(worst_support <= 1e-14);
  CHECK(worst_range <= 1e-14);
  double origin = 0.0;
  for (int k = 0; k <= K; ++k) origin += fam.value(k, 0.0);
  CHECK(origin == 1.0);
}

TEST_CASE("derivative bounds") {
  const auto fam = DyadicCutoffFamily::build(10);
  CHECK(fam.derivative_bounds_hold());
  const auto& g = fam.normalized_gradient_sups();
  const auto& h = fam.normalized_hessian_sups();
  const double gmax = *std::max_element(g.begin() + 1, g.end());
  const double gmin = *std::min_element(g.begin() + 1, g.end());
  const double hmax = *std::max_element(h.begin() + 1, h.end());
  const double hmin = *std::min_element(h.begin() + 1, h.end());
  CHECK(gmax / gmin <= 2.0);
  CHECK(hmax / hmin <= 2.0);
  // jets agree with difference quotients of the values
  for (int k : {0, 1, 3, 6}) {
    for (double r : {0.7, 1.2, 1.7, 3.3, 5.5, 11.0, 40.0, 90.0}) {
      const double e = 1e-5 * std::ldexp(1.0, k);
      const RadialJet j = fam.radial(k, r);
      const double d1 = (fam.value(k, r + e) - fam.value(k, r - e)) / (2 * e);
      const double d2 = (fam.radial(k, r + e).d1 - fam.radial(k, r - e).d1) / (2 * e);
      CHECK(j.d1 == doctest::Approx(d1).epsilon(1e-6).scale(std::ldexp(1.0, -k)));
      CHECK(j.d2 == doctest::Approx(d2).epsilon(1e-5).scale(std::ldexp(1.0, -2 * k)));
    }
  }
}

TEST_CASE("build preconditions") {
  CHECK_THROWS_AS(DyadicCutoffFamily::build(0), PreconditionError);
  CHECK_THROWS_AS(DyadicCutoffFamily::build(2, {1.2, 2.0}), PreconditionError);
  CHECK_THROWS_AS(DyadicCutoffFamily::build(2, {1.5, 2.5}), PreconditionError);
  CHECK_THROWS_AS(DyadicCutoffFamily::build(2).value(3, 1.0), PreconditionError);
}

TEST_CASE("grid evaluation") {
  const auto fam = DyadicCutoffFamily::build(6);
  const Grid g = Grid::make(2, 128, 64.0);
  const Point x{1.5, -2.0, 0};
  const GridFunction e0 = evaluate(fam, g, 0, 1.0, {0, 0, 0});
  const GridFunction ref = smooth_bump(g, {0, 0, 0}, 1.5, 2.0);
  CHECK((e0 - ref).max_abs() <= 1e-15);

  // dilation: eta^k_{2r,x}(p) = eta^k_{r,x}((p - x)/2 + x)
  const GridFunction big = evaluate(fam, g, 2, 2.0, x);
  for (std::size_t i = 0; i < g.size(); i += 37) {
    const Point p = g.coordinate(i);
    const double d = g.periodic_distance(p, x);
    CHECK(big[i] == doctest::Approx(fam.value(2, (d / 2.0) / 1.0)).epsilon(1e-14));
  }

  for (int k = 0; k + 3 <= 3; ++k) {
    const GridFunction a = evaluate(fam, g, k, 1.0, x);
    const GridFunction b = evaluate(fam, g, k + 3, 1.0, x);
    CHECK(a.support()->disjoint_from(*b.support()));
  }
  // annulus masks from the grid core carry the whole support
  for (int k = 1; k <= 4; ++k) {
    const GridFunction e = evaluate(fam, g, k, 1.0, x);
    const DomainMask m = DomainMask::annulus(g, x, std::ldexp(1.0, k - 1), std::ldexp(1.0, k + 1));
    for (std::size_t i = 0; i < g.size(); ++i) {
      if (!m.contains(i)) CHECK(e[i] == 0.0);
    }
  }
  // scaled partition on B_{2^k r}(x)
  const int k = 4;
  GridFunction sum = GridFunction::zeros(g);
  for (int l = 0; l <= k; ++l) sum = sum + evaluate(fam, g, l, 1.0, x);
  const DomainMask inner = DomainMask::ball(g, x, std::ldexp(1.0, k));
  for (std::size_t i : inner.indices()) CHECK(std::fabs(sum[i] - 1.0) <= 1e-12);

  CHECK_THROWS_AS(evaluate(fam, g, 5, 1.0, x), PreconditionError);
}

TEST_CASE("norm scaling of fractional Laplacians of cutoffs") {
  const auto fam = DyadicCutoffFamily::build(8);
  SUBCASE("n = 1, s = 1/2, p' = inf") {
    const Grid g = Grid::make(1, 1 << 16, 4096.0);
    const auto rep = norm_scaling_experiment(fam, g, 0.5, INFINITY, {1, 2, 3, 4, 5, 6, 7, 8}, 1.0);
    CHECK(rep.expected == -0.5);
    CHECK(rep.pass);
    CHECK(rep.slope == doctest::Approx(-0.5).epsilon(0.1));
  }
  SUBCASE("n = 2, s = 1, p' = 2") {
    const Grid g = Grid::make(2, 1024, 256.0);
    const auto rep = norm_scaling_experiment(fam, g, 1.0, 2.0, {1, 2, 3, 4, 5}, 1.0);
    CHECK(rep.expected == 0.0);
    CHECK(rep.pass);
    CHECK(std::fabs(rep.slope) <= 0.1);
  }
  SUBCASE("s = 0 is the sup of the cutoff itself") {
    const Grid g = Grid::make(1, 1 << 14, 1024.0);
    const auto rep = norm_scaling_experiment(fam, g, 0.0, INFINITY, {1, 2, 3, 4, 5}, 1.0);
    for (double v : rep.norms) CHECK(v == doctest::Approx(rep.norms[0]).epsilon(0.1));
  }
  const Grid g = Grid::make(1, 1024, 1024.0);
  CHECK_THROWS_AS(norm_scaling_experiment(fam, g, 0.5, 2.0, {1, 2, 3}, 1.0), PreconditionError);
}
