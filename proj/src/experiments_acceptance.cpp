#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <set>
#include <sstream>

#include "experiment_suites.hpp"
#include "fracharm/cutoffs.hpp"
#include "fracharm/errors.hpp"
#include "fracharm/fields.hpp"
#include "fracharm/growth.hpp"
#include "fracharm/hodge.hpp"
#include "fracharm/lorentz.hpp"
#include "fracharm/multiplier.hpp"
#include "fracharm/numerics.hpp"
#include "fracharm/poincare.hpp"
#include "fracharm/singular_integral.hpp"

namespace fracharm::detail {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string str(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

template <class Case>
std::vector<Case> select_cases(const ExperimentConfig& c, std::vector<Case> cases) {
  if (!c.dim) return cases;
  std::vector<Case> out;
  for (const Case& k : cases) {
    if (k.dim == *c.dim) out.push_back(k);
  }
  if (out.empty()) config_error("dim", "no case of this experiment runs in dimension " + std::to_string(*c.dim));
  return out;
}

}  // namespace

void definition_equivalence(const ExperimentConfig& c, Report& rep) {
  const auto start = std::chrono::steady_clock::now();
  const Grid g = config_grid(c, 1, 4096, 1.0);
  const double s = config_s(c, 0.5, 0.0, 1.0);
  const CalibratedConstant cns = calibrate_cns(g, s);
  const double l = g.box_length();
  const GridFunction f = smooth_bump(g, {0, 0, 0}, 0.0, 0.3 * l);
  const GridFunction quad = frac_lap_quadrature(f, s, cns);
  const GridFunction spec = frac_laplacian(f, s);
  const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  Table& t = rep.table("profile", {"x", "quadrature", "spectral"});
  double err = 0.0, scale = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const Point x = g.coordinate(i);
    if (g.periodic_distance(x, {0, 0, 0}) > l / 6) continue;
    err = std::max(err, std::abs(quad[i] - spec[i]));
    scale = std::max(scale, std::abs(spec[i]));
    t.add({x[0], quad[i], spec[i]});
  }
  rep.constants.push_back(cns);
  rep.check("relative interior Linf error", err / scale, "<=", 1e-3);
  rep.check("runtime seconds", elapsed, "<=", 10.0);
}

void norm_equivalence(const ExperimentConfig& c, Report& rep) {
  const Grid g = config_grid(c, 1, 2048, 1.0);
  const double s = config_s(c, 0.25, 0.0, 1.0);
  Table& t = rep.table("ratios", {"seed", "equivalence_ratio"});
  double lo = kInf, hi = 0.0;
  for (std::uint64_t i = 0; i < 10; ++i) {
    const std::uint64_t seed = c.seed + i;
    const double r = equivalence_ratio(windowed_field(g, seed, {0, 0, 0}, g.box_length() / 6), s);
    t.add({static_cast<double>(seed), r});
    lo = std::min(lo, r);
    hi = std::max(hi, r);
  }
  rep.check("max/min equivalence ratio", hi / lo, "<=", 1.02);
}

void partition_of_unity(const ExperimentConfig& c, Report& rep) {
  const std::vector<double> sc = config_scales(c, {10});
  const int depth = static_cast<int>(sc.front());
  if (depth < 1 || depth > 40) config_error("scales", "the first entry is the depth K, 1..40");
  const DyadicCutoffFamily fam = DyadicCutoffFamily::build(depth);
  const double top = std::ldexp(1.0, depth + 1) * 1.2;
  const int samples = 200000;
  double partition = 0.0, support = 0.0, range = 0.0;
  Table& t = rep.table("partition", {"r", "sum_minus_one"});
  for (int i = 0; i <= samples; ++i) {
    const double r = top * i / samples;
    double sum = 0.0;
    for (int k = 0; k <= depth; ++k) {
      const double v = fam.value(k, r);
      sum += v;
      range = std::max({range, -v, v - 1.0});
      const bool outside = k == 0 ? r >= 2.0 : (r >= std::ldexp(1.0, k + 1) || r <= std::ldexp(1.0, k - 1));
      if (outside) support = std::max(support, std::abs(v));
    }
    if (r < std::ldexp(1.0, depth)) {
      partition = std::max(partition, std::abs(sum - 1.0));
      if (i % 1000 == 0) t.add({r, sum - 1.0});
    }
  }
  rep.check("max |sum eta^k - 1| on B_{2^K}", partition, "<=", 1e-12);
  rep.check("max |eta^k| off its annulus", support, "==", 0.0);
  rep.check("max excursion outside [0,1]", range, "<=", 0.0);
  rep.check("derivative bounds 2^{ki} sup|D^i eta^k| <= C_i", fam.derivative_bounds_hold() ? 1.0 : 0.0, "==",
            1.0);
}

void cutoff_scaling(const ExperimentConfig& c, Report& rep) {
  struct Case {
    int dim;
    double s, p_prime;
    std::size_t n;
    double box;
    int k_max;
  };
  const auto cases = select_cases<Case>(c, {{1, 0.5, kInf, 1 << 16, 4096.0, 8}, {2, 1.0, 2.0, 1024, 256.0, 5}});
  const DyadicCutoffFamily fam = DyadicCutoffFamily::build(8);
  for (const Case& k : cases) {
    const Grid g = config_grid(c, k.dim, k.n, k.box);
    const double s = config_s(c, k.s, 0.0, 2.0);
    std::vector<int> ks;
    for (int i = 1; i <= k.k_max; ++i) ks.push_back(i);
    const NormScalingReport r = norm_scaling_experiment(fam, g, s, k.p_prime, ks, 1.0);
    const std::string tag = "n" + std::to_string(k.dim) + "_s" + str(s) + "_p" + str(k.p_prime);
    Table& t = rep.table("norms_" + tag, {"k", "norm"});
    for (std::size_t i = 0; i < r.ks.size(); ++i) t.add({static_cast<double>(r.ks[i]), r.norms[i]});
    const double tol = r.expected != 0.0 ? 0.1 * std::abs(r.expected) : 0.1;
    rep.check("|slope - (" + str(r.expected) + ")| " + tag, std::abs(r.slope - r.expected), "<=", tol);
  }
}

void hodge(const ExperimentConfig& c, Report& rep) {
  const Grid g = config_grid(c, 1, 1024, 1.0);
  const double s = config_s(c, 0.5 * g.dim(), 0.0, 2.0);
  const DomainMask d = DomainMask::ball(g, {0, 0, 0}, g.box_length() / 8);
  Table& t = rep.table("cases", {"seed", "iterations", "relative_gradient", "residual", "orthogonality",
                                 "energy_ratio"});
  double res = 0.0, orth = 0.0, energy = 0.0, iters = 0.0;
  for (std::uint64_t i = 0; i < 20; ++i) {
    const std::uint64_t seed = c.seed + i;
    const HodgeDecomposition dec = hodge_decompose(band_limited_field(g, seed), d, s);
    t.add({static_cast<double>(seed), static_cast<double>(dec.iterations), dec.relative_gradient, dec.residual,
           dec.orthogonality, dec.energy_ratio});
    res = std::max(res, dec.residual);
    orth = std::max(orth, dec.orthogonality);
    energy = std::max(energy, dec.energy_ratio);
    iters = std::max(iters, static_cast<double>(dec.iterations));
  }
  rep.check("max residual", res, "<=", 1e-10);
  rep.check("max orthogonality", orth, "<=", 1e-8);
  rep.check("max (|h| + |D^s phi|) / |f|", energy, "<=", 5.0);
  rep.check("max CG iterations", iters, "<=", kHodgeIterationCap);
}

void disjoint_decay(const ExperimentConfig& c, Report& rep) {
  struct Case {
    int dim;
    double s;
    std::size_t n;
    double r, radius;
  };
  const auto cases = select_cases<Case>(c, {{1, 0.25, 65536, 16.0, 2.0}, {2, 0.5, 1024, 8.0, 4.0}});
  const std::vector<double> mult = config_scales(c, {4, 8, 16, 32});
  for (const Case& k : cases) {
    const Grid g = config_grid(c, k.dim, k.n, static_cast<double>(k.n));
    const double s = config_s(c, k.s, 0.0, 2.0);
    std::vector<double> ds;
    for (double m : mult) ds.push_back(m * k.r);
    const PairingDecayReport r = disjoint_pairing_decay(g, {{0, 0, 0}, k.radius, k.radius, 1.0}, s, s, ds);
    const std::string tag = "n" + std::to_string(k.dim) + "_s" + str(s) + "_t" + str(s);
    Table& t = rep.table("pairing_" + tag, {"d", "value", "prefactor"});
    for (std::size_t i = 0; i < ds.size(); ++i) t.add({r.distances[i], r.values[i], r.prefactors[i]});
    rep.check("|slope / (" + str(r.expected_slope) + ") - 1| " + tag, std::abs(r.slope / r.expected_slope - 1),
              "<=", 0.15);
  }
}

void poincare_scaling(const ExperimentConfig& c, Report& rep) {
  const Grid g = config_grid(c, 1, 1024, 1024.0);
  const std::vector<double> radii = config_scales(c, {8, 16, 32});
  if (radii.size() < 3) config_error("scales", "need at least three radii");
  const std::vector<double> orders = c.s ? std::vector<double>{config_s(c, 0.5, 0.0, 2.0)} : std::vector<double>{0.5, 1.0};
  for (double s : orders) {
    Table& t = rep.table("constants_s" + str(s), {"r", "constant", "iterations"});
    std::vector<double> cs;
    for (double r : radii) {
      const PoincareResult p = poincare_constant(DomainMask::ball(g, {0, 0, 0}, r), s);
      cs.push_back(p.constant);
      t.add({r, p.constant, static_cast<double>(p.iterations)});
    }
    const double slope = loglog_slope(radii, cs);
    rep.check("|slope / s - 1| s=" + str(s), std::abs(slope / s - 1), "<=", 0.05);
  }
}

void harmonic_decay(const ExperimentConfig& c, Report& rep) {
  const Grid g = config_grid(c, 1, 4096, 4096.0);
  const std::vector<double> lambdas = config_scales(c, {8, 16, 32});
  if (lambdas.size() < 2) config_error("scales", "need at least two values of Lambda");
  const double r = 8.0 * g.spacing();
  const HarmonicDecayReport sup = harmonic_decay_sup(g, r, {0, 0, 0}, lambdas);
  const HarmonicDecayReport one = harmonic_decay_check(band_limited_field(g, c.seed), r, {0, 0, 0}, lambdas);
  Table& t = rep.table("ratios", {"lambda", "sup_ratio", "field_ratio"});
  double monotone = 0.0;
  for (std::size_t i = 0; i < lambdas.size(); ++i) {
    t.add({lambdas[i], sup.ratios[i], one.ratios[i]});
    if (i > 0) monotone = std::max(monotone, sup.ratios[i] / sup.ratios[i - 1]);
  }
  const double span = lambdas.back() / lambdas.front();
  rep.check("rho(last) / rho(first)", sup.ratios.back() / sup.ratios.front(), "<=", std::pow(span, -0.25) * 1.1);
  rep.check("max rho(next) / rho(prev)", monotone, "<=", 1.05);
}

void lorentz_algebra(const ExperimentConfig& c, Report& rep) {
  // (fg)*(2t) <= f*(t) g*(t) at every breakpoint of f*, g* and (fg)*
  const Grid g2 = Grid::make(2, 64, 1.0);
  std::size_t violations = 0;
  Table& prod = rep.table("product", {"seed", "breakpoints", "violations"});
  for (std::uint64_t i = 0; i < 5; ++i) {
    const GridFunction f = band_limited_field(g2, member_seed(c.seed, 2 * i));
    const GridFunction h = band_limited_field(g2, member_seed(c.seed, 2 * i + 1));
    const RearrangementProfile pf = decreasing_rearrangement(f), ph = decreasing_rearrangement(h);
    const RearrangementProfile pfh = decreasing_rearrangement(f * h);
    std::set<double> ts(pf.breaks().begin(), pf.breaks().end());
    ts.insert(ph.breaks().begin(), ph.breaks().end());
    ts.insert(0.0);
    std::size_t bad = 0;
    for (double t : ts) bad += pfh.at(2 * t) > pf.at(t) * ph.at(t);
    for (double t : pfh.breaks()) bad += pfh.at(t) > pf.at(0.5 * t) * ph.at(0.5 * t);
    const std::size_t count = ts.size() + pfh.steps();
    prod.add({static_cast<double>(i), static_cast<double>(count), static_cast<double>(bad)});
    violations += bad;
  }
  rep.check("product rearrangement violations", static_cast<double>(violations), "==", 0.0);

  // ||f(./2)||_{p,q} on the doubled box = 2^{n/p} ||f||_{p,q}
  double scaling = 0.0;
  Table& sc = rep.table("scaling", {"dim", "p", "q", "ratio", "expected"});
  for (int dim : {1, 2}) {
    const Grid g = Grid::make(dim, 64, 1.0), gd = Grid::make(dim, 64, 2.0);
    const GridFunction f = band_limited_field(g, c.seed);
    const GridFunction dilated(gd, std::vector<double>(f.values().begin(), f.values().end()));
    for (double p : {1.5, 2.0, 4.0}) {
      for (double q : {1.0, 3.0, kInf}) {
        const double ratio = lorentz_norm(dilated, p, q) / lorentz_norm(f, p, q);
        const double expected = std::pow(2.0, dim / p);
        sc.add({static_cast<double>(dim), p, q, ratio, expected});
        scaling = std::max(scaling, std::abs(ratio / expected - 1));
      }
    }
  }
  rep.check("max relative scaling error", scaling, "<=", 0.01);

  // sup_t t^{1/p} f*(t) <= (q/p)^{1/q} ||f||_{p,q}
  double weak = 0.0;
  const Grid g1 = Grid::make(1, 1024, 1.0);
  Table& wk = rep.table("weak_bound", {"seed", "p", "q", "weak_over_bound"});
  for (std::uint64_t i = 0; i < 5; ++i) {
    const RearrangementProfile prof = decreasing_rearrangement(band_limited_field(g1, member_seed(c.seed, i)));
    for (double p : {1.5, 2.0, 4.0}) {
      for (double q : {1.0, 2.0, 3.0}) {
        const double ratio = lorentz_norm(prof, p, kInf) / (std::pow(q / p, 1 / q) * lorentz_norm(prof, p, q));
        wk.add({static_cast<double>(i), p, q, ratio});
        weak = std::max(weak, ratio);
      }
    }
  }
  rep.check("max weak norm / ((q/p)^{1/q} ||f||_{p,q})", weak, "<=", 1.0 + 1e-12);
}

void iteration(const ExperimentConfig& c, Report& rep) {
  const std::uint64_t count = c.scales.empty() ? 1000 : static_cast<std::uint64_t>(config_scales(c, {}).front());
  const double drit[3][2] = {{1.0, 1.0}, {0.5, 2.0}, {2.0, 0.25}};
  struct P {
    double l1, l2, gamma;
    int l;
  };
  const P iter[4] = {{1, 1, 1, 2}, {3, 0.5, 0.5, 1}, {0.25, 2, 2, 3}, {10, 10, 1, 1}};
  Table& t = rep.table("sequences", {"seed", "lemma", "k_min", "k_max", "beta", "constant", "verified"});
  double failed_d = 0.0, failed_i = 0.0;
  for (std::uint64_t i = 0; i < count; ++i) {
    const std::uint64_t seed = member_seed(c.seed, i);
    const auto& p = drit[i % 3];
    const GeneratedSequence a = generate_driteration_sequence(seed, p[0], p[1]);
    const GrowthReport ra = driteration(a.a, p[0], p[1], a.parameter);
    failed_d += !ra.verified;
    t.add({static_cast<double>(seed), 1, static_cast<double>(a.a.k_min()), static_cast<double>(a.a.k_max()), ra.beta,
           ra.constant, ra.verified ? 1.0 : 0.0});
    const P& q = iter[i % 4];
    const GeneratedSequence b = generate_iteration_sequence(seed, q.l1, q.l2, q.gamma, q.l);
    const GrowthReport rb = iteration_reduce(b.a, q.l1, q.l2, q.gamma, q.l);
    failed_i += !rb.verified;
    t.add({static_cast<double>(seed), 2, static_cast<double>(b.a.k_min()), static_cast<double>(b.a.k_max()), rb.beta,
           rb.constant, rb.verified ? 1.0 : 0.0});
  }
  rep.check("driteration conclusions failing", failed_d, "==", 0.0);
  rep.check("iteration_reduce conclusions failing", failed_i, "==", 0.0);

  Table& w = rep.table("counterexamples", {"lemma", "witness", "reported"});
  double wrong = 0.0;
  for (int witness : {0, -1, -3, -10}) {
    int got = 1;
    try {
      driteration(driteration_counterexample(witness, 1.0, 1.0, 2.0), 1.0, 1.0, 2.0);
    } catch (const HypothesisViolation& e) {
      got = e.witness();
    }
    w.add({1, static_cast<double>(witness), static_cast<double>(got)});
    wrong += got != witness;
    got = 1;
    try {
      iteration_reduce(iteration_counterexample(witness, 1.0, 1.0, 1.0, 2), 1.0, 1.0, 1.0, 2);
    } catch (const HypothesisViolation& e) {
      got = e.witness();
    }
    w.add({2, static_cast<double>(witness), static_cast<double>(got)});
    wrong += got != witness;
  }
  rep.check("counterexamples with a wrong witness", wrong, "==", 0.0);
}

void dirichlet_growth(const ExperimentConfig& c, Report& rep) {
  const Grid g = config_grid(c, 1, 8192, 1.0);
  const std::vector<double> alphas = config_scales(c, {0.25, 0.5});
  const double l = g.box_length();
  const Point x0{0, 0, 0};
  const DomainMask e = DomainMask::ball(g, x0, 0.2 * l);
  const GridFunction window = smooth_bump(g, x0, 0.3 * l, 0.45 * l);
  Table& t = rep.table("estimates", {"alpha", "seminorm", "campanato", "quotient", "flat"});
  for (double alpha : alphas) {
    if (alpha >= 1.0) config_error("scales", "exponents must lie in (0, 1)");
    const GridFunction v = GridFunction::sample(g, [&](const Point& p) {
                             return std::pow(g.periodic_distance(p, x0), alpha);
                           }) * window;
    const HolderReport h = holder_exponent_estimate(v, e, 0.05 * l);
    const double camp = h.campanato_exponent.value_or(std::nan(""));
    t.add({alpha, h.seminorm_exponent, h.campanato_exponent.value_or(0.0), h.quotient_exponent,
           h.campanato_exponent ? 0.0 : 1.0});
    const std::string tag = " alpha=" + str(alpha);
    rep.check("|seminorm estimate - alpha|" + tag, std::abs(h.seminorm_exponent - alpha), "<=", 0.05);
    rep.check("|campanato estimate - alpha|" + tag, std::abs(camp - alpha), "<=", 0.05);
    rep.check("|quotient estimate - alpha|" + tag, std::abs(h.quotient_exponent - alpha), "<=", 0.05);
  }
}

}  // namespace fracharm::detail
