#include <algorithm>
#include <cmath>
#include <limits>

#include "fracharm/growth.hpp"
#include "fracharm/numerics.hpp"
#include "fracharm/singular_integral.hpp"

namespace fracharm {

namespace {

// Lattice offsets with |offset| h < radius.
std::vector<Index3> ball_offsets(const Grid& g, double radius) {
  const double h = g.spacing();
  const auto m = static_cast<std::ptrdiff_t>(std::ceil(radius / h));
  const int n = g.dim();
  std::vector<Index3> out;
  for (std::ptrdiff_t i = -m; i <= m; ++i) {
    for (std::ptrdiff_t j = (n > 1 ? -m : 0); j <= (n > 1 ? m : 0); ++j) {
      for (std::ptrdiff_t k = (n > 2 ? -m : 0); k <= (n > 2 ? m : 0); ++k) {
        const double d2 = static_cast<double>(i * i + j * j + k * k) * h * h;
        if (d2 < radius * radius) out.push_back({i, j, k});
      }
    }
  }
  return out;
}

std::vector<double> dyadic_radii(const Grid& g, double radius, double smallest, const char* what) {
  if (radius < 8 * g.spacing()) throw PreconditionError(std::string(what) + ": R must be at least 8h");
  if (radius >= 0.5 * g.box_length()) throw PreconditionError(std::string(what) + ": R exceeds the padding");
  std::vector<double> radii;
  for (double r = radius; r >= smallest * g.spacing(); r *= 0.5) radii.push_back(r);
  return radii;
}

// Centers of E, thinned to at most `limit` points.
std::vector<std::size_t> centers(const DomainMask& e, std::size_t limit) {
  std::vector<std::size_t> idx = e.indices();
  if (idx.size() <= limit) return idx;
  const std::size_t stride = (idx.size() + limit - 1) / limit;
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < idx.size(); i += stride) out.push_back(idx[i]);
  return out;
}

constexpr std::size_t kSeminormCenters = 256;

}  // namespace

CampanatoProfile campanato_profile(const GridFunction& v, const DomainMask& domain, double radius,
                                   double smallest) {
  const Grid& g = v.grid();
  CampanatoProfile prof;
  prof.radii = dyadic_radii(g, radius, smallest, "campanato");
  const double vol = g.cell_volume();
  const std::vector<std::size_t> pts = domain.indices();
  std::vector<double> vals;
  for (double rho : prof.radii) {
    const std::vector<Index3> offs = ball_offsets(g, rho);
    double best_j = 0.0, best_m = 0.0;
    Point at_j{}, at_m{};
    for (std::size_t c : pts) {
      const Index3 base = g.multi_index(c);
      vals.clear();
      for (const Index3& o : offs) {
        const std::size_t p = g.flat_index({base[0] + o[0], base[1] + o[1], base[2] + o[2]});
        if (domain.contains(p)) vals.push_back(v[p]);
      }
      // deviations taken relative to the first sample so constants give exactly 0
      const double ref = vals.front();
      double sum = 0.0, sq = 0.0;
      for (double x : vals) {
        sum += x - ref;
        sq += x * x;
      }
      const double mean = sum / static_cast<double>(vals.size());
      double dev = 0.0;
      for (double x : vals) dev += (x - ref - mean) * (x - ref - mean);
      if (sq * vol > best_j) {
        best_j = sq * vol;
        at_j = g.coordinate(c);
      }
      if (dev * vol > best_m) {
        best_m = dev * vol;
        at_m = g.coordinate(c);
      }
    }
    prof.morrey.push_back(best_j);
    prof.campanato.push_back(best_m);
    prof.morrey_at.push_back(at_j);
    prof.campanato_at.push_back(at_m);
  }
  return prof;
}

CampanatoResult campanato_functionals(const GridFunction& v, const DomainMask& domain,
                                      double lambda, double radius) {
  if (!(lambda > 0.0)) throw PreconditionError("campanato: lambda must be positive");
  const CampanatoProfile prof = campanato_profile(v, domain, radius, 4.0);
  CampanatoResult out;
  for (std::size_t i = 0; i < prof.radii.size(); ++i) {
    const double w = std::pow(prof.radii[i], -lambda);
    const double j = std::sqrt(w * prof.morrey[i]);
    const double m = std::sqrt(w * prof.campanato[i]);
    if (j > out.j) {
      out.j = j;
      out.j_center = prof.morrey_at[i];
      out.j_radius = prof.radii[i];
    }
    if (m > out.m) {
      out.m = m;
      out.m_center = prof.campanato_at[i];
      out.m_radius = prof.radii[i];
    }
  }
  return out;
}

nlohmann::json HolderReport::to_json() const {
  nlohmann::json j{{"seminorm_exponent", seminorm_exponent},
                   {"quotient_exponent", quotient_exponent},
                   {"flat", flat},
                   {"disagreement", disagreement}};
  j["campanato_exponent"] = campanato_exponent ? nlohmann::json(*campanato_exponent) : nlohmann::json("flat");
  return j;
}

HolderReport holder_exponent_estimate(const GridFunction& v, const DomainMask& e, double radius) {
  const Grid& g = v.grid();
  const int n = g.dim();
  const std::vector<double> radii = dyadic_radii(g, radius, kHolderSmallestRadius, "holder_exponent_estimate");
  if (radii.size() < 3) throw PreconditionError("holder_exponent_estimate: fewer than 3 scales");
  if (e.count() == 0) throw PreconditionError("holder_exponent_estimate: empty E");
  HolderReport rep;

  // (a) seminorm growth.  The lattice adds a nearly constant offset to
  // sup_x [v]^2, so the fit runs on increments between consecutive radii.
  const std::vector<std::size_t> cs = centers(e, kSeminormCenters);
  std::vector<double> semi;
  for (double r : radii) {
    double best = 0.0;
    for (std::size_t c : cs) {
      best = std::max(best, gagliardo_seminorm(v, DomainMask::ball(g, g.coordinate(c), r), 0.5 * n));
    }
    semi.push_back(best * best);
  }
  std::vector<double> inc_r, inc;
  for (std::size_t i = 1; i < radii.size(); ++i) {
    inc_r.push_back(radii[i]);
    inc.push_back(semi[i - 1] - semi[i]);
  }

  // (b) Campanato: the largest alpha on a 0.001 grid for which
  // rho^{-(n + 2 alpha)} sup_x int |v - mean|^2 does not grow as rho -> 0.
  const CampanatoProfile prof = campanato_profile(v, e, radius, kHolderSmallestRadius);
  const double peak = *std::max_element(prof.campanato.begin(), prof.campanato.end());
  rep.flat = !(peak > 0.0) ||
             *std::min_element(prof.campanato.begin(), prof.campanato.end()) <= 1e-28 * peak;
  if (!rep.flat) {
    const double growth = loglog_slope(prof.radii, prof.campanato);
    double best = 0.0;
    for (int i = 1; i <= 1000; ++i) {
      const double alpha = 0.001 * i;
      if (growth - (n + 2 * alpha) >= 0.0) best = alpha;
    }
    rep.campanato_exponent = best;
  }

  // (c) modulus of continuity along the axes at increments h, 2h, 4h, 8h
  std::vector<double> deltas, omega;
  const std::vector<std::size_t> pts = e.indices();
  for (std::ptrdiff_t step = 1; step <= 8; step *= 2) {
    double w = 0.0;
    for (std::size_t p : pts) {
      const Index3 b = g.multi_index(p);
      for (int axis = 0; axis < n; ++axis) {
        Index3 q = b;
        q[axis] += step;
        const std::size_t qi = g.flat_index(q);
        if (e.contains(qi)) w = std::max(w, std::abs(v[qi] - v[p]));
      }
    }
    deltas.push_back(static_cast<double>(step) * g.spacing());
    omega.push_back(w);
  }

  if (rep.flat) {
    rep.seminorm_exponent = 1.0;
    rep.quotient_exponent = 1.0;
  } else {
    rep.seminorm_exponent = 0.5 * loglog_slope(inc_r, inc);
    rep.quotient_exponent = std::min(1.0, loglog_slope(deltas, omega));
  }
  std::vector<double> est{rep.seminorm_exponent, rep.quotient_exponent};
  if (rep.campanato_exponent) est.push_back(*rep.campanato_exponent);
  for (double a : est)
    for (double b : est) rep.disagreement = std::max(rep.disagreement, std::abs(a - b));
  return rep;
}

HomogeneousLocalization homogeneous_norm_localization(const GridFunction& v, double r,
                                                      const Point& x, double s) {
  const bool integer = std::abs(s - std::round(s)) < 1e-12 && s >= 1.0;
  if (!(integer || (s > 0.0 && s < 2.0 && std::abs(s - 1.0) > 1e-12))) {
    throw PreconditionError("homogeneous_norm_localization: need s in (0,1), (1,2) or a positive integer");
  }
  const Grid& g = v.grid();
  if (r >= 0.5 * g.box_length()) throw PreconditionError("homogeneous_norm_localization: r exceeds the padding");
  HomogeneousLocalization out;
  const double lhs = gagliardo_seminorm(v, DomainMask::ball(g, x, r), s);
  out.lhs = lhs * lhs;
  for (int k = -1; std::ldexp(r, k + 1) >= 8 * g.spacing(); --k) {
    const double a = gagliardo_seminorm(v, DomainMask::annulus(g, x, std::ldexp(r, k - 1), std::ldexp(r, k + 1)), s);
    out.rhs += a * a;
    ++out.annuli;
  }
  if (out.annuli < 3) throw PreconditionError("homogeneous_norm_localization: fewer than 3 resolvable annuli");
  out.ratio = out.rhs > 0.0 ? out.lhs / out.rhs : 0.0;
  return out;
}

}  // namespace fracharm
