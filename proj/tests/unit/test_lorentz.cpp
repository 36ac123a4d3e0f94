#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "fracharm/errors.hpp"
#include "fracharm/fields.hpp"
#include "fracharm/lorentz.hpp"

using namespace fracharm;

namespace {
GridFunction indicator(const Grid& g, double radius) {
  return GridFunction::constant(g, 1.0).restricted(DomainMask::ball(g, {0, 0, 0}, radius));
}

std::vector<double> all_breaks(const RearrangementProfile& a, const RearrangementProfile& b) {
  std::vector<double> t(a.breaks().begin(), a.breaks().end());
  t.insert(t.end(), b.breaks().begin(), b.breaks().end());
  const std::size_t base = t.size();
  for (std::size_t i = 0; i < base; ++i) t.push_back(0.5 * t[i]);
  t.push_back(0.0);
  return t;
}
}  // namespace

TEST_CASE("rearrangement basics") {
  const Grid g = Grid::make(1, 256, 1.0);
  const GridFunction ind = indicator(g, 0.2);
  const double mu = DomainMask::ball(g, {0, 0, 0}, 0.2).measure();
  const RearrangementProfile p = decreasing_rearrangement(ind);
  CHECK(p.steps() == 2);
  CHECK(p.at(0.0) == 1.0);
  CHECK(p.at(mu * 0.999) == 1.0);
  CHECK(p.at(mu) == 0.0);
  CHECK(p.total_measure() == doctest::Approx(1.0));
  CHECK(p.distribution(0.5) == doctest::Approx(mu));

  const RearrangementProfile z = decreasing_rearrangement(GridFunction::zeros(g));
  CHECK(z.steps() == 1);
  CHECK(z.values()[0] == 0.0);

  const GridFunction f = band_limited_field(g, 3);
  std::vector<double> perm(f.values().begin(), f.values().end());
  std::shuffle(perm.begin(), perm.end(), std::mt19937_64(5));
  CHECK(decreasing_rearrangement(GridFunction(g, perm)) == decreasing_rearrangement(f));
  CHECK(decreasing_rearrangement(f * -2.5) == decreasing_rearrangement(f).scaled(2.5));

  // f*(t) = inf{s : d(s) <= t} at every break
  const RearrangementProfile pf = decreasing_rearrangement(f);
  for (std::size_t i = 0; i + 1 < pf.steps(); i += 7) {
    const double t = pf.breaks()[i];
    CHECK(pf.distribution(pf.at(t)) <= t * (1 + 1e-15));
    CHECK(pf.distribution(pf.values()[i]) == doctest::Approx(i == 0 ? 0.0 : pf.breaks()[i - 1]));
  }
  std::ostringstream csv;
  p.write_csv(csv);
  CHECK(csv.str().rfind("t,value\n", 0) == 0);
  CHECK_THROWS_AS(RearrangementProfile({1.0, 2.0}, {1.0, 2.0}), PreconditionError);
}

TEST_CASE("lorentz norms of indicators and the layer cake identity") {
  const Grid g = Grid::make(2, 64, 1.0);
  const GridFunction ind = indicator(g, 0.3);
  const double mu = DomainMask::ball(g, {0, 0, 0}, 0.3).measure();
  for (double p : {1.5, 2.0, 3.0}) {
    for (double q : {1.0, 2.0, 5.0}) {
      CHECK(lorentz_norm(ind, p, q) == doctest::Approx(std::pow(p / q, 1 / q) * std::pow(mu, 1 / p)).epsilon(1e-12));
    }
    CHECK(lorentz_norm(ind, p, INFINITY) == doctest::Approx(std::pow(mu, 1 / p)).epsilon(1e-12));
  }
  const GridFunction f = band_limited_field(g, 8);
  CHECK(lorentz_norm(f, 2.0, 2.0) == doctest::Approx(lp_norm(f, 2.0)).epsilon(1e-12));
  CHECK(lorentz_norm(f, 3.0, 3.0) == doctest::Approx(lp_norm(f, 3.0)).epsilon(1e-12));
  CHECK(lorentz_norm(f, INFINITY, INFINITY) == doctest::Approx(f.max_abs()));
  CHECK(lorentz_norm(GridFunction::zeros(g), 2.0, 1.0) == 0.0);
  CHECK_THROWS_AS(lorentz_norm(f, INFINITY, 2.0), PreconditionError);
  CHECK_THROWS_AS(lorentz_norm(f, 1.0, 2.0), PreconditionError);
  CHECK_THROWS_AS(lorentz_norm(f, 2.0, 0.5), PreconditionError);
}

TEST_CASE("product rearrangement inequality is exact") {
  const Grid g = Grid::make(2, 64, 1.0);
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const GridFunction f = band_limited_field(g, seed);
    const GridFunction h = band_limited_field(g, seed + 100);
    const RearrangementProfile pf = decreasing_rearrangement(f);
    const RearrangementProfile ph = decreasing_rearrangement(h);
    const RearrangementProfile pfh = decreasing_rearrangement(f * h);
    std::size_t violations = 0;
    for (double t : all_breaks(pf, ph)) {
      if (pfh.at(2 * t) > pf.at(t) * ph.at(t)) ++violations;
    }
    for (double t : pfh.breaks()) {
      if (pfh.at(t) > pf.at(0.5 * t) * ph.at(0.5 * t)) ++violations;
    }
    CHECK(violations == 0);
  }
}

TEST_CASE("scaling under box doubling") {
  for (int dim : {1, 2}) {
    const Grid g = Grid::make(dim, 64, 1.0);
    const Grid g2 = Grid::make(dim, 64, 2.0);
    const GridFunction f = band_limited_field(g, 4);
    const GridFunction dilated(g2, std::vector<double>(f.values().begin(), f.values().end()));
    for (double p : {1.5, 2.0, 4.0}) {
      for (double q : {1.0, 3.0, double(INFINITY)}) {
        const double ratio = lorentz_norm(dilated, p, q) / lorentz_norm(f, p, q);
        CHECK(ratio == doctest::Approx(std::pow(2.0, dim / p)).epsilon(0.01));
      }
    }
  }
}

TEST_CASE("weak norm bound with constant (q/p)^(1/q)") {
  const Grid g = Grid::make(1, 1024, 1.0);
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const RearrangementProfile prof = decreasing_rearrangement(band_limited_field(g, seed));
    for (double p : {1.5, 2.0, 4.0}) {
      for (double q : {1.0, 2.0, 3.0}) {
        const double weak = lorentz_norm(prof, p, INFINITY);
        CHECK(weak <= std::pow(q / p, 1 / q) * lorentz_norm(prof, p, q) * (1 + 1e-12));
      }
    }
  }
  // attained by indicators: weak norm mu^{1/p} = (q/p)^{1/q} * (p/q)^{1/q} mu^{1/p}
  const RearrangementProfile ind({0.3, 1.0}, {1.0, 0.0});
  CHECK(lorentz_norm(ind, 2.0, INFINITY) ==
        doctest::Approx(std::pow(3.0 / 2.0, 1.0 / 3.0) * lorentz_norm(ind, 2.0, 3.0)).epsilon(1e-14));
}

TEST_CASE("weighted power profiles") {
  // lambda = n/2: the L^{2,inf} norm of |x|^{-1/2} in one dimension is sqrt 2
  std::vector<double> w2;
  for (std::size_t n : {1u << 15, 1u << 16}) {
    const Grid g = Grid::make(1, n, 1.0);
    w2.push_back(lorentz_norm(weighted_power_profile(g, 0.5, 16.0), 2.0, INFINITY));
  }
  CHECK(w2[1] == doctest::Approx(w2[0]).epsilon(0.05));
  CHECK(w2[1] == doctest::Approx(std::sqrt(2.0)).epsilon(0.01));
  // p = 4 diverges like cap^{1/2}
  const Grid g = Grid::make(1, 1u << 16, 1.0);
  std::vector<double> w4;
  for (double cap : {8.0, 16.0, 32.0}) w4.push_back(lorentz_norm(weighted_power_profile(g, 0.5, cap), 4.0, INFINITY));
  for (std::size_t i = 1; i < w4.size(); ++i) {
    CHECK(std::log2(w4[i] / w4[i - 1]) == doctest::Approx(0.5).epsilon(0.05 / 0.5));
  }
  // two dimensions, lambda = 1: sqrt(pi)
  const Grid g2 = Grid::make(2, 256, 1.0);
  CHECK(lorentz_norm(weighted_power_profile(g2, 1.0, 8.0), 2.0, INFINITY) == doctest::Approx(std::sqrt(3.14159265358979)).epsilon(0.01));
  // small lambda: profile tends to the constant 1
  // (the origin sample sits at the cap)
  const Grid coarse = Grid::make(1, 256, 1.0);
  const RearrangementProfile flat = weighted_power_profile(coarse, 1e-9, 2.0);
  CHECK(flat.values()[0] == 2.0);
  CHECK(flat.at(coarse.spacing()) == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(flat.at(0.999) == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(lorentz_norm(flat, 2.0, INFINITY) == doctest::Approx(1.0).epsilon(1e-6));
  CHECK_THROWS_AS(weighted_power_profile(g, 1.0, 8.0), PreconditionError);
}

TEST_CASE("spectral profile uses the L^-n weight") {
  const Grid g = Grid::make(1, 128, 2.0);
  const GridFunction f = band_limited_field(g, 2);
  const RearrangementProfile p = decreasing_rearrangement(transform_forward(f));
  CHECK(p.total_measure() == doctest::Approx(64.0));
  CHECK(lorentz_norm(p, 2.0, 2.0) == doctest::Approx(l2_norm(f)).epsilon(1e-12));
}
