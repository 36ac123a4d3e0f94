#include <algorithm>
#include <cmath>
#include <sstream>

#include "experiment_suites.hpp"
#include "fracharm/compensation.hpp"
#include "fracharm/cutoffs.hpp"
#include "fracharm/errors.hpp"
#include "fracharm/fields.hpp"
#include "fracharm/growth.hpp"
#include "fracharm/hodge.hpp"
#include "fracharm/lorentz.hpp"
#include "fracharm/multiplier.hpp"
#include "fracharm/poincare.hpp"
#include "fracharm/singular_integral.hpp"

namespace fracharm::detail {

namespace {

constexpr std::uint64_t kFamilySize = 20;

double d(std::uint64_t v) { return static_cast<double>(v); }

GridFunction mean_free(const GridFunction& f) {
  return f - GridFunction::constant(f.grid(), f.mean());
}

// A windowed field in B_r(x) with its mean removed by a bump inside the same ball.
GridFunction mean_zero_bump(const Grid& g, std::uint64_t seed, const Point& x, double r) {
  const GridFunction w = windowed_field(g, seed, x, r);
  const GridFunction b = smooth_bump(g, x, 0.5 * r, r);
  return w - (w.mean() / b.mean()) * b;
}

GridFunction convolve(const GridFunction& f, const GridFunction& g) {
  Spectrum a = transform_forward(f);
  const Spectrum b = transform_forward(g);
  for (std::size_t i = 0; i < a.coeffs.size(); ++i) a.coeffs[i] *= b.coeffs[i];
  return transform_inverse_real(a);
}

}  // namespace

Suite compensation_suite(const ExperimentConfig& c) {
  const Grid g = config_grid(c, 1, 512, 1.0);
  const int n = g.dim();
  Suite suite;
  suite.checks = [g, seed = c.seed](Report& rep) {
    const double l = g.box_length();
    const GridFunction eta = smooth_bump(g, {0, 0, 0}, 0.1 * l, 0.4 * l);
    const double scale = l2_norm(frac_laplacian(eta * eta, 0.5 * g.dim()));
    Table& t = rep.table("structure_identity", {"seed", "relative_residual"});
    double worst = 0.0;
    for (std::uint64_t i = 0; i < 10; ++i) {
      const std::uint64_t s = member_seed(seed, i);
      const GridFunction phi = band_limited_field(g, s, std::max<std::size_t>(1, g.points_per_axis() / 64));
      const double r = structure_identity_residual(SphereValuedMap::from_phase(phi), eta) / scale;
      t.add({d(s), r});
      worst = std::max(worst, r);
    }
    rep.check("max relative structure-identity residual", worst, "<=", 1e-10);
  };
  suite.families.push_back(
      {"h_norm_ratio", "||H(u,v)||_2 / (||D u||_2 ||D v||_2): max over 50 seeded band-limited pairs, calibrated by alternating power iteration over the band", g,
       {"pair", "l2", "lorentz21", "weak"}, [g](std::uint64_t seed, std::uint64_t scale, Table& t) {
         std::vector<double> ratios;
         for (std::uint64_t i = 0; i < 50 * scale; ++i) {
           const HNormRatios r = h_norm_ratios(band_limited_field(g, member_seed(seed, 2 * i)),
                                               band_limited_field(g, member_seed(seed, 2 * i + 1)));
           t.add({d(i), r.l2, r.lorentz21, r.weak});
           ratios.push_back(r.l2);
         }
         return ratios;
       },
       [g](std::uint64_t seed) {
         return h_norm_extremal(band_limited_field(g, member_seed(seed, 0)), band_limited_field(g, member_seed(seed, 1)))
             .ratio;
       }});
  suite.families.push_back(
      {"defect_ratio", "sup over 1e6 seeded samples with |xi| = 1, p = n/2, theta = 1/2", g,
       {"samples", "sup", "x1", "xi1"}, [n](std::uint64_t seed, std::uint64_t scale, Table& t) {
         const ScanResult r = defect_scan(n, 0.5 * n, 0.5, 1000000 * scale, seed);
         t.add({d(r.samples), r.sup, r.x_at_sup[0], r.y_at_sup[0]});
         return std::vector<double>{r.sup};
       }});
  return suite;
}

Suite commutator_bounds_suite(const ExperimentConfig& c) {
  const Grid g = config_grid(c, 1, 256, 1.0);
  const int n = g.dim();
  const double p = config_s(c, 0.5, 0.0, 1.0);
  Suite suite;
  suite.families.push_back(
      {"fourier_domination", "max over 50 seeded pairs of |H^| over the dominating convolution", g,
       {"pair", "max_ratio", "modes"}, [g](std::uint64_t seed, std::uint64_t scale, Table& t) {
         std::vector<double> ratios;
         for (std::uint64_t i = 0; i < 50 * scale; ++i) {
           const DominationReport r = fourier_domination_check(band_limited_field(g, member_seed(seed, 2 * i)),
                                                               band_limited_field(g, member_seed(seed, 2 * i + 1)));
           t.add({d(i), r.max_ratio, d(r.modes_compared)});
           ratios.push_back(r.max_ratio);
         }
         return ratios;
       }});
  suite.families.push_back({"triangle_ratio", "sup over 1e6 seeded samples with |y| = 1 of ||x-y|^p - |y|^p| / |x|^p",
                            g, {"samples", "sup"}, [n, p](std::uint64_t seed, std::uint64_t scale, Table& t) {
                              const ScanResult r = triangle_scan(n, p, 1000000 * scale, seed);
                              t.add({d(r.samples), r.sup});
                              return std::vector<double>{r.sup};
                            }});
  return suite;
}

Suite inverse_scaling_suite(const ExperimentConfig& c) {
  const Grid g = config_grid(c, 1, 2048, 1.0);
  const double s = config_s(c, 0.5, 0.0, 0.5 * g.dim() + 1.0);
  Suite suite;
  suite.families.push_back(
      {"inverse_laplacian_scaling", "max over mean-zero bumps in B_r of ||D^-s f||_2 / (r^s ||f||_2)", g,
       {"seed", "r", "ratio"}, [g, s](std::uint64_t seed, std::uint64_t scale, Table& t) {
         std::vector<double> ratios;
         for (double frac : {1.0 / 64, 1.0 / 32, 1.0 / 16}) {
           const double r = frac * g.box_length();
           for (std::uint64_t i = 0; i < kFamilySize * scale; ++i) {
             const GridFunction f = mean_zero_bump(g, member_seed(seed, i), {0, 0, 0}, r);
             const double ratio = l2_norm(inv_frac_laplacian(f, s)) / (std::pow(r, s) * l2_norm(f));
             t.add({d(i), r, ratio});
             ratios.push_back(ratio);
           }
         }
         return ratios;
       }});
  return suite;
}

Suite lorentz_inequalities_suite(const ExperimentConfig& c) {
  const Grid g = config_grid(c, 1, 1024, 1.0);
  const double r = g.box_length() / 8;
  Suite suite;
  suite.families.push_back(
      {"lorentz_hoelder", "max of ||fg||_{2,1} / (||f||_{4,2} ||g||_{4,2}) over seeded pairs", g,
       {"pair", "ratio"}, [g](std::uint64_t seed, std::uint64_t scale, Table& t) {
         std::vector<double> ratios;
         for (std::uint64_t i = 0; i < kFamilySize * scale; ++i) {
           const GridFunction f = band_limited_field(g, member_seed(seed, 2 * i));
           const GridFunction h = band_limited_field(g, member_seed(seed, 2 * i + 1));
           const double ratio = lorentz_norm(f * h, 2, 1) / (lorentz_norm(f, 4, 2) * lorentz_norm(h, 4, 2));
           t.add({d(i), ratio});
           ratios.push_back(ratio);
         }
         return ratios;
       }});
  suite.families.push_back(
      {"lorentz_compact_support", "max of ||f||_{2,1} / (|D|^{1/4} ||f||_4) for f supported in D = B_{L/8}", g,
       {"seed", "ratio"}, [g, r](std::uint64_t seed, std::uint64_t scale, Table& t) {
         const double measure = DomainMask::ball(g, {0, 0, 0}, r).measure();
         std::vector<double> ratios;
         for (std::uint64_t i = 0; i < kFamilySize * scale; ++i) {
           const GridFunction f = windowed_field(g, member_seed(seed, i), {0, 0, 0}, r);
           const double ratio = lorentz_norm(f, 2, 1) / (std::pow(measure, 0.25) * lp_norm(f, 4));
           t.add({d(i), ratio});
           ratios.push_back(ratio);
         }
         return ratios;
       }});
  suite.families.push_back(
      {"oneil_convolution", "max of ||f*g||_{2,1} / (||f||_{4/3,2} ||g||_{4/3,2}) over seeded windowed pairs", g,
       {"pair", "ratio"}, [g, r](std::uint64_t seed, std::uint64_t scale, Table& t) {
         std::vector<double> ratios;
         for (std::uint64_t i = 0; i < kFamilySize * scale; ++i) {
           const GridFunction f = windowed_field(g, member_seed(seed, 2 * i), {0, 0, 0}, r);
           const GridFunction h = windowed_field(g, member_seed(seed, 2 * i + 1), {0, 0, 0}, r);
           const double ratio =
               lorentz_norm(convolve(f, h), 2, 1) / (lorentz_norm(f, 4.0 / 3, 2) * lorentz_norm(h, 4.0 / 3, 2));
           t.add({d(i), ratio});
           ratios.push_back(ratio);
         }
         return ratios;
       }});
  return suite;
}

Suite meanvalue_poincare_suite(const ExperimentConfig& c) {
  const Grid g = config_grid(c, 1, 2048, 1.0);
  const Grid fine = Grid::make(g.dim(), 2 * g.points_per_axis(), g.box_length());
  const double l = g.box_length();
  const auto fam = std::make_shared<DyadicCutoffFamily>(DyadicCutoffFamily::build(6));
  const int degree = default_meanvalue_degree(g.dim());
  Suite suite;
  suite.checks = [fine, fam, l, degree, seed = c.seed](Report& rep) {
    Table& t = rep.table("annulus_per_k", {"k", "max_ratio"});
    std::vector<double> per_k;
    for (int k = 1; k <= 4; ++k) {
      double worst = 0.0;
      for (std::uint64_t i = 0; i < 5; ++i) {
        worst = std::max(worst, annulus_mv_poincare_ratio(band_limited_field(fine, member_seed(seed, i)), l / 256,
                                                          {0, 0, 0}, k, 0.5, 0.0, *fam, degree)
                                    .ratio);
      }
      t.add({static_cast<double>(k), worst});
      per_k.push_back(worst);
    }
    rep.check("annulus constants max/min over k = 1..4",
              *std::max_element(per_k.begin(), per_k.end()) / *std::min_element(per_k.begin(), per_k.end()), "<=",
              2.0);
  };
  suite.families.push_back(
      {"mv_poincare_ball", "max over seeded fields of ||D^s(eta (v-P))||_2 / [v]_{B_4r,s}, s = 1/2, t = 0", g,
       {"seed", "ratio"}, [g, fam, l, degree](std::uint64_t seed, std::uint64_t scale, Table& t) {
         std::vector<double> ratios;
         for (std::uint64_t i = 0; i < kFamilySize * scale; ++i) {
           const double r = mv_poincare_ratio(band_limited_field(g, member_seed(seed, i)), l / 32, {0.1 * l, 0, 0},
                                              0.5, 0.0, *fam, degree)
                                .ratio;
           t.add({d(i), r});
           ratios.push_back(r);
         }
         return ratios;
       }});
  suite.families.push_back(
      {"mv_poincare_annulus", "max over k = 1..4 and seeded fields of the annulus ratio, s = 1/2, t = 0", fine,
       {"seed", "k", "ratio"}, [fine, fam, l, degree](std::uint64_t seed, std::uint64_t scale, Table& t) {
         std::vector<double> ratios;
         for (int k = 1; k <= 4; ++k) {
           for (std::uint64_t i = 0; i < kFamilySize * scale; ++i) {
             const double r = annulus_mv_poincare_ratio(band_limited_field(fine, member_seed(seed, i)), l / 256,
                                                        {0, 0, 0}, k, 0.5, 0.0, *fam, degree)
                                  .ratio;
             t.add({d(i), static_cast<double>(k), r});
             ratios.push_back(r);
           }
         }
         return ratios;
       }});
  for (const char* which : {"g", "e"}) {
    const bool gap = which[0] == 'g';
    suite.families.push_back(
        {std::string("polynomial_gap_") + which,
         gap ? "max over k <= 4 and seeded fields of ||eta^k (P_B - P_Ak)||_inf / ((1+k) ||D^{n/2} v||_2)"
             : "max over k <= 4 and seeded fields of ||eta^k (v - P)||_2 / ((2^k r)^{n/2} (1+k) ||D^{n/2} v||_2)",
         fine, {"seed", "k", "value"}, [fine, fam, l, gap](std::uint64_t seed, std::uint64_t scale, Table& t) {
           std::vector<double> ratios;
           for (std::uint64_t i = 0; i < kFamilySize * scale; ++i) {
             const GapReport r = polynomial_gap_scan(band_limited_field(fine, member_seed(seed, i)), l / 128,
                                                     {0, 0, 0}, 4, *fam);
             for (std::size_t j = 0; j < r.ks.size(); ++j) {
               const double v = gap ? r.g[j] : r.e[j];
               t.add({d(i), static_cast<double>(r.ks[j]), v});
               ratios.push_back(v);
             }
           }
           return ratios;
         }});
  }
  for (double gamma : {0.0, g.dim() + 1.0}) {
    const std::string name = gamma == 0.0 ? "convex_gradient_gamma0" : "convex_gradient_gamma_n_plus_1";
    suite.families.push_back(
        {name, "max over seeded fields of sum_{DxD} |v(x)-v(y)|^2 |x-y|^-gamma / ||grad v||^2_{L2(D)}", g,
         {"seed", "ratio"}, [g, l, gamma](std::uint64_t seed, std::uint64_t scale, Table& t) {
           const DomainMask dm = DomainMask::ball(g, {0.1 * l, 0, 0}, 0.05 * l);
           std::vector<double> ratios;
           for (std::uint64_t i = 0; i < kFamilySize * scale; ++i) {
             const double r = convex_gradient_ratio(band_limited_field(g, member_seed(seed, i)), dm, gamma);
             t.add({d(i), r});
             ratios.push_back(r);
           }
           return ratios;
         }});
  }
  return suite;
}

Suite localization_suite(const ExperimentConfig& c) {
  const Grid g2 = Grid::make(2, 32, 1.0);
  const Grid g1 = config_grid(c, 1, 1024, 1024.0);
  const Grid g3 = Grid::make(3, 64, 1.0);
  Suite suite;
  suite.families.push_back(
      {"lower_order_product",
       "||R1 D^{s-n/2} u * R2 D^{-s} v||_2 / (||u||_2 ||v||_2), n = 2, s = 1/2: max over seeded mean-zero pairs, calibrated by alternating power iteration over the band", g2,
       {"pair", "ratio"}, [g2](std::uint64_t seed, std::uint64_t scale, Table& t) {
         const FrequencySymbol m1 = FrequencySymbol::riesz(2, 0), m2 = FrequencySymbol::riesz(2, 1);
         std::vector<double> ratios;
         for (std::uint64_t i = 0; i < kFamilySize * scale; ++i) {
           const GridFunction u = mean_free(band_limited_field(g2, member_seed(seed, 2 * i)));
           const GridFunction v = mean_free(band_limited_field(g2, member_seed(seed, 2 * i + 1)));
           const double r = lower_order_product_norm(u, v, 0.5, m1, m2).ratio;
           t.add({d(i), r});
           ratios.push_back(r);
         }
         return ratios;
       },
       [g2](std::uint64_t seed) {
         return lower_order_product_extremal(band_limited_field(g2, member_seed(seed, 0)),
                                             band_limited_field(g2, member_seed(seed, 1)), 0.5,
                                             FrequencySymbol::riesz(2, 0), FrequencySymbol::riesz(2, 1))
             .ratio;
       }});
  suite.families.push_back(
      {"local_norm_recovery", "max over seeded v in B_r of ||v||_{L2(B_r)} over its dual norm on B_{16r}", g1,
       {"seed", "local_norm", "dual_norm", "ratio"}, [g1](std::uint64_t seed, std::uint64_t scale, Table& t) {
         const double r = 8 * g1.spacing();
         std::vector<double> ratios;
         for (std::uint64_t i = 0; i < kFamilySize * scale; ++i) {
           const LocalNormResult res = local_norm_recovery(windowed_field(g1, member_seed(seed, i), {0, 0, 0}, r), r,
                                                           {0, 0, 0}, 16);
           t.add({d(i), res.local_norm, res.dual_norm, res.ratio});
           ratios.push_back(res.ratio);
         }
         return ratios;
       }});
  suite.families.push_back(
      {"localization_representative", "max over seeded b outside B_{3 gamma} of ||a||_2 / ||b||_2 on B_gamma", g1,
       {"seed", "ratio"}, [g1](std::uint64_t seed, std::uint64_t scale, Table& t) {
         const double gamma = 16 * g1.spacing(), gap = 2 * gamma;
         std::vector<double> ratios;
         for (std::uint64_t i = 0; i < kFamilySize * scale; ++i) {
           const GridFunction b = windowed_field(g1, member_seed(seed, i), {gamma + gap + 2 * gamma, 0, 0}, 2 * gamma);
           const double r = l2_norm(localization_representative(b, {0, 0, 0}, gamma, gap)) / l2_norm(b);
           t.add({d(i), r});
           ratios.push_back(r);
         }
         return ratios;
       }});
  suite.families.push_back(
      {"product_rule_localization",
       "max over seeded (u, phi) of ||D(P phi) - P D phi||_{L2(B_r)} over the right side, n = 3, Lambda = 3", g3,
       {"seed", "lhs", "rhs", "ratio"}, [g3](std::uint64_t seed, std::uint64_t scale, Table& t) {
         const int n = g3.dim();
         const double half = 0.5 * n, r = 2 * g3.spacing(), lambda = 3.0;
         const Point x0{0, 0, 0};
         const DyadicCutoffFamily fam = DyadicCutoffFamily::build(4);
         const DomainMask inner = DomainMask::ball(g3, x0, r);
         std::vector<double> ratios;
         for (std::uint64_t i = 0; i < 5 * scale; ++i) {
           const GridFunction u = band_limited_field(g3, member_seed(seed, 2 * i));
           const Polynomial p =
               meanvalue_polynomial(u, DomainMask::ball(g3, x0, lambda * r), default_meanvalue_degree(n), x0).p;
           const GridFunction ps = p.sample(g3);
           GridFunction phi = windowed_field(g3, member_seed(seed, 2 * i + 1), x0, r);
           phi = (1.0 / l2_norm(frac_laplacian(phi, half))) * phi;
           const GridFunction lhs_f = frac_laplacian(ps * phi, half) - ps * frac_laplacian(phi, half);
           const double lhs = l2_norm(lhs_f, &inner);
           const GridFunction du = frac_laplacian(u, half);
           const GridFunction eta = evaluate(fam, g3, 0, lambda * r, x0);
           const DomainMask outer = DomainMask::ball(g3, x0, 2 * lambda * r);
           double rhs = l2_norm(frac_laplacian(eta * (u - ps), half)) + l2_norm(du, &outer);
           // annuli of eta^k that fit in the box
           for (int k = 1; std::ldexp(lambda * r, k + 1) <= 0.5 * g3.box_length(); ++k) {
             rhs += std::ldexp(1.0, -k) / lambda * l2_norm(evaluate(fam, g3, k, lambda * r, x0) * du);
           }
           t.add({d(i), lhs, rhs, lhs / rhs});
           ratios.push_back(lhs / rhs);
         }
         return ratios;
       }});
  return suite;
}

Suite homogeneous_norm_suite(const ExperimentConfig& c) {
  const Grid g = config_grid(c, 1, 1024, 1.0);
  const double s = config_s(c, 0.5 * g.dim(), 0.0, 2.0);
  Suite suite;
  suite.families.push_back(
      {"homogeneous_localization", "max over seeded fields of [v]^2_{B_r,s} / sum_{k<=-1} [v]^2_{A_k,s}", g,
       {"seed", "lhs", "rhs", "ratio"}, [g, s](std::uint64_t seed, std::uint64_t scale, Table& t) {
         std::vector<double> ratios;
         for (std::uint64_t i = 0; i < kFamilySize * scale; ++i) {
           const HomogeneousLocalization h =
               homogeneous_norm_localization(band_limited_field(g, member_seed(seed, i)), g.box_length() / 8, {0, 0, 0}, s);
           t.add({d(i), h.lhs, h.rhs, h.ratio});
           ratios.push_back(h.ratio);
         }
         return ratios;
       }});
  suite.families.push_back(
      {"seminorm_comparison",
       "C_eps with eps = 1/2, gamma = 1, v windowed in B_r: max of ([v]_{B_r} - eps [v]_{B_8r})_+ over the bracketed right side", g,
       {"seed", "lhs", "bracket", "ratio"}, [g](std::uint64_t seed, std::uint64_t scale, Table& t) {
         const int n = g.dim();
         const double half = 0.5 * n, eps = 0.5, gamma = 1.0;
         const double r = g.box_length() / 64, h = g.spacing();
         const Point x{0, 0, 0};
         const DyadicCutoffFamily fam = DyadicCutoffFamily::build(4);
         std::vector<double> ratios;
         for (std::uint64_t i = 0; i < kFamilySize * scale; ++i) {
           const GridFunction v = windowed_field(g, member_seed(seed, i), x, r);
           const double lhs = gagliardo_seminorm(v, DomainMask::ball(g, x, r), half) -
                              eps * gagliardo_seminorm(v, DomainMask::ball(g, x, 8 * r), half);
           const GridFunction dv = frac_laplacian(v, 0.5 * half);
           const DomainMask b16 = DomainMask::ball(g, x, 16 * r);
           double bracket = l2_norm(dv, &b16);
           for (int k = 1; std::ldexp(8 * r, k + 1) <= 0.5 * g.box_length(); ++k) {
             bracket += std::ldexp(1.0, -n * k) * l2_norm(evaluate(fam, g, k, 8 * r, x) * dv);
           }
           for (int j = -1; std::ldexp(r, j + 5) >= 8 * h; --j) {
             bracket += std::exp2(-gamma * std::abs(j)) *
                        gagliardo_seminorm(v, DomainMask::annulus(g, x, std::ldexp(r, j - 5), std::ldexp(r, j + 5)), half);
           }
           for (int j = 0; std::ldexp(r, j + 5) <= 0.5 * g.box_length(); ++j) {
             bracket += std::exp2(-gamma * std::abs(j)) *
                        gagliardo_seminorm(v, DomainMask::annulus(g, x, std::ldexp(r, j - 5), std::ldexp(r, j + 5)), half);
           }
           const double ratio = std::max(0.0, lhs) / bracket;
           t.add({d(i), lhs, bracket, ratio});
           ratios.push_back(ratio);
         }
         return ratios;
       }});
  return suite;
}

}  // namespace fracharm::detail
