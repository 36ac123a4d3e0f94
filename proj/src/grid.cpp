#include "fracharm/grid.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <string>
#include <tuple>

#include "fracharm/errors.hpp"

namespace fracharm {

namespace {

bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

// Plans are created once per (dim, N, direction) and executed through the
// new-array interface, which FFTW documents as thread safe.
class PlanCache {
 public:
  fftw_plan get(int dim, std::size_t n, int sign) {
    std::lock_guard<std::mutex> lock(mutex_);
    const auto key = std::make_tuple(dim, n, sign);
    if (auto it = plans_.find(key); it != plans_.end()) return it->second;
    std::size_t total = 1;
    for (int d = 0; d < dim; ++d) total *= n;
    std::vector<Complex> scratch_in(total), scratch_out(total);
    std::array<int, 3> dims{static_cast<int>(n), static_cast<int>(n),
                            static_cast<int>(n)};
    fftw_plan plan = fftw_plan_dft(
        dim, dims.data(), reinterpret_cast<fftw_complex*>(scratch_in.data()),
        reinterpret_cast<fftw_complex*>(scratch_out.data()), sign,
        FFTW_ESTIMATE | FFTW_UNALIGNED);
    if (plan == nullptr) throw Error("fftw plan creation failed");
    plans_.emplace(key, plan);
    return plan;
  }

  ~PlanCache() {
    for (auto& [key, plan] : plans_) fftw_destroy_plan(plan);
  }

 private:
  std::mutex mutex_;
  std::map<std::tuple<int, std::size_t, int>, fftw_plan> plans_;
};

PlanCache& plan_cache() {
  static PlanCache cache;
  return cache;
}

std::vector<Complex> run_fft(const Grid& grid, std::span<const Complex> in,
                             int sign) {
  std::vector<Complex> input(in.begin(), in.end());
  std::vector<Complex> out(grid.size());
  fftw_plan plan =
      plan_cache().get(grid.dim(), grid.points_per_axis(), sign);
  fftw_execute_dft(plan, reinterpret_cast<fftw_complex*>(input.data()),
                   reinterpret_cast<fftw_complex*>(out.data()));
  return out;
}

}  // namespace

// ---------------------------------------------------------------- Grid

Grid::Grid(int dim, std::size_t n, double length)
    : dim_(dim), n_(n), length_(length) {
  size_ = 1;
  for (int d = 0; d < dim_; ++d) size_ *= n_;
}

Grid Grid::make(int dim, std::size_t points_per_axis, double box_length,
                std::size_t size_guard) {
  if (dim < 1 || dim > 3) {
    throw PreconditionError("dim must be 1, 2 or 3 (got " +
                            std::to_string(dim) + ")");
  }
  if (points_per_axis < 8 || !is_power_of_two(points_per_axis)) {
    throw PreconditionError(
        "points_per_axis must be a power of two >= 8 (got " +
        std::to_string(points_per_axis) + ")");
  }
  if (!(box_length > 0.0) || !std::isfinite(box_length)) {
    throw PreconditionError("box_length must be positive and finite");
  }
  double total = 1.0;
  for (int d = 0; d < dim; ++d) total *= static_cast<double>(points_per_axis);
  if (total > static_cast<double>(size_guard)) {
    throw PreconditionError("points_per_axis^dim exceeds the size guard (" +
                            std::to_string(size_guard) + ")");
  }
  return Grid(dim, points_per_axis, box_length);
}

double Grid::cell_volume() const { return std::pow(spacing(), dim_); }

Index3 Grid::multi_index(std::size_t flat) const {
  Index3 idx{0, 0, 0};
  for (int d = dim_ - 1; d >= 0; --d) {
    idx[d] = static_cast<std::ptrdiff_t>(flat % n_);
    flat /= n_;
  }
  return idx;
}

std::size_t Grid::flat_index(const Index3& idx) const {
  const auto n = static_cast<std::ptrdiff_t>(n_);
  std::size_t flat = 0;
  for (int d = 0; d < dim_; ++d) {
    std::ptrdiff_t i = idx[d] % n;
    if (i < 0) i += n;
    flat = flat * n_ + static_cast<std::size_t>(i);
  }
  return flat;
}

Index3 Grid::signed_index(std::size_t flat) const {
  Index3 idx = multi_index(flat);
  const auto half = static_cast<std::ptrdiff_t>(n_ / 2);
  for (int d = 0; d < dim_; ++d) {
    if (idx[d] >= half) idx[d] -= static_cast<std::ptrdiff_t>(n_);
  }
  return idx;
}

Point Grid::coordinate(std::size_t flat) const {
  const Index3 idx = signed_index(flat);
  Point p{0.0, 0.0, 0.0};
  for (int d = 0; d < dim_; ++d) p[d] = static_cast<double>(idx[d]) * spacing();
  return p;
}

Point Grid::frequency(std::size_t flat) const {
  const Index3 idx = signed_index(flat);
  Point xi{0.0, 0.0, 0.0};
  for (int d = 0; d < dim_; ++d) xi[d] = static_cast<double>(idx[d]) / length_;
  return xi;
}

double Grid::frequency_norm(std::size_t flat) const {
  const Point xi = frequency(flat);
  return std::sqrt(xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2]);
}

double Grid::periodic_distance(const Point& a, const Point& b) const {
  double sum = 0.0;
  for (int d = 0; d < dim_; ++d) {
    double diff = std::fabs(a[d] - b[d]);
    diff = std::fmod(diff, length_);
    diff = std::min(diff, length_ - diff);
    sum += diff * diff;
  }
  return std::sqrt(sum);
}

std::size_t Grid::nearest_index(const Point& p) const {
  Index3 idx{0, 0, 0};
  for (int d = 0; d < dim_; ++d) {
    idx[d] = static_cast<std::ptrdiff_t>(std::llround(p[d] / spacing()));
  }
  return flat_index(idx);
}

nlohmann::json Grid::to_json() const {
  return {{"dim", dim_},
          {"points_per_axis", n_},
          {"box_length", length_},
          {"spacing", spacing()}};
}

// ---------------------------------------------------------- DomainMask

DomainMask::DomainMask(Grid grid, std::vector<std::uint8_t> inside)
    : grid_(std::move(grid)), inside_(std::move(inside)) {
  if (inside_.size() != grid_.size()) {
    throw PreconditionError("mask size does not match grid");
  }
  count_ = static_cast<std::size_t>(
      std::count_if(inside_.begin(), inside_.end(),
                    [](std::uint8_t v) { return v != 0; }));
}

DomainMask DomainMask::full(const Grid& grid) {
  return DomainMask(grid, std::vector<std::uint8_t>(grid.size(), 1));
}

DomainMask DomainMask::empty(const Grid& grid) {
  return DomainMask(grid, std::vector<std::uint8_t>(grid.size(), 0));
}

DomainMask DomainMask::from_predicate(
    const Grid& grid, const std::function<bool(const Point&)>& pred) {
  std::vector<std::uint8_t> inside(grid.size(), 0);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    inside[i] = pred(grid.coordinate(i)) ? 1 : 0;
  }
  return DomainMask(grid, std::move(inside));
}

DomainMask DomainMask::ball(const Grid& grid, const Point& center,
                            double radius) {
  return from_predicate(grid, [&](const Point& p) {
    return grid.periodic_distance(p, center) < radius;
  });
}

DomainMask DomainMask::annulus(const Grid& grid, const Point& center,
                               double inner, double outer) {
  return from_predicate(grid, [&](const Point& p) {
    const double d = grid.periodic_distance(p, center);
    return d >= inner && d < outer;
  });
}

DomainMask DomainMask::complement() const {
  std::vector<std::uint8_t> inside(inside_.size());
  for (std::size_t i = 0; i < inside.size(); ++i) inside[i] = inside_[i] ? 0 : 1;
  return DomainMask(grid_, std::move(inside));
}

DomainMask DomainMask::unite(const DomainMask& other) const {
  if (!(grid_ == other.grid_)) throw PreconditionError("mask grids differ");
  std::vector<std::uint8_t> inside(inside_.size());
  for (std::size_t i = 0; i < inside.size(); ++i) {
    inside[i] = (inside_[i] || other.inside_[i]) ? 1 : 0;
  }
  return DomainMask(grid_, std::move(inside));
}

DomainMask DomainMask::intersect(const DomainMask& other) const {
  if (!(grid_ == other.grid_)) throw PreconditionError("mask grids differ");
  std::vector<std::uint8_t> inside(inside_.size());
  for (std::size_t i = 0; i < inside.size(); ++i) {
    inside[i] = (inside_[i] && other.inside_[i]) ? 1 : 0;
  }
  return DomainMask(grid_, std::move(inside));
}

bool DomainMask::is_subset_of(const DomainMask& other) const {
  for (std::size_t i = 0; i < inside_.size(); ++i) {
    if (inside_[i] && !other.inside_[i]) return false;
  }
  return true;
}

bool DomainMask::disjoint_from(const DomainMask& other) const {
  for (std::size_t i = 0; i < inside_.size(); ++i) {
    if (inside_[i] && other.inside_[i]) return false;
  }
  return true;
}

double DomainMask::measure() const {
  return static_cast<double>(count_) * grid_.cell_volume();
}

std::vector<std::size_t> DomainMask::indices() const {
  std::vector<std::size_t> out;
  out.reserve(count_);
  for (std::size_t i = 0; i < inside_.size(); ++i) {
    if (inside_[i]) out.push_back(i);
  }
  return out;
}

// -------------------------------------------------------- GridFunction

GridFunction::GridFunction(Grid grid, std::vector<double> values)
    : grid_(std::move(grid)), values_(std::move(values)) {
  if (values_.size() != grid_.size()) {
    throw PreconditionError("grid function size does not match grid");
  }
  for (double v : values_) {
    if (!std::isfinite(v)) {
      throw PreconditionError("grid function contains a non-finite value");
    }
  }
}

GridFunction GridFunction::zeros(const Grid& grid) {
  return GridFunction(grid, std::vector<double>(grid.size(), 0.0));
}

GridFunction GridFunction::constant(const Grid& grid, double value) {
  return GridFunction(grid, std::vector<double>(grid.size(), value));
}

GridFunction GridFunction::sample(
    const Grid& grid, const std::function<double(const Point&)>& f) {
  std::vector<double> values(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) values[i] = f(grid.coordinate(i));
  return GridFunction(grid, std::move(values));
}

GridFunction GridFunction::with_support(const DomainMask& mask) const {
  if (!(mask.grid() == grid_)) throw PreconditionError("mask grid differs");
  const double tol = 1e-14 * max_abs();
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (!mask.contains(i) && std::fabs(values_[i]) > tol) {
      throw PreconditionError("values do not vanish outside the support mask");
    }
  }
  GridFunction out = *this;
  out.support_ = mask;
  return out;
}

double GridFunction::max_abs() const {
  double m = 0.0;
  for (double v : values_) m = std::max(m, std::fabs(v));
  return m;
}

double GridFunction::mean() const {
  double sum = 0.0;
  for (double v : values_) sum += v;
  return sum / static_cast<double>(values_.size());
}

namespace {
void require_same_grid(const Grid& a, const Grid& b) {
  if (!(a == b)) throw PreconditionError("grid functions live on different grids");
}
}  // namespace

GridFunction GridFunction::operator+(const GridFunction& o) const {
  require_same_grid(grid_, o.grid_);
  std::vector<double> v(values_.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = values_[i] + o.values_[i];
  return GridFunction(grid_, std::move(v));
}

GridFunction GridFunction::operator-(const GridFunction& o) const {
  require_same_grid(grid_, o.grid_);
  std::vector<double> v(values_.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = values_[i] - o.values_[i];
  return GridFunction(grid_, std::move(v));
}

GridFunction GridFunction::operator*(const GridFunction& o) const {
  require_same_grid(grid_, o.grid_);
  std::vector<double> v(values_.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = values_[i] * o.values_[i];
  return GridFunction(grid_, std::move(v));
}

GridFunction GridFunction::operator*(double c) const {
  std::vector<double> v(values_.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = c * values_[i];
  return GridFunction(grid_, std::move(v));
}

GridFunction GridFunction::restricted(const DomainMask& mask) const {
  require_same_grid(grid_, mask.grid());
  std::vector<double> v(values_.size(), 0.0);
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (mask.contains(i)) v[i] = values_[i];
  }
  return GridFunction(grid_, std::move(v));
}

// ---------------------------------------------------------- transforms

Spectrum transform_forward(const Grid& grid, std::span<const Complex> values) {
  if (values.size() != grid.size()) {
    throw PreconditionError("transform input size does not match grid");
  }
  std::vector<Complex> out = run_fft(grid, values, FFTW_FORWARD);
  const double w = grid.cell_volume();
  for (auto& c : out) c *= w;
  return Spectrum{grid, std::move(out)};
}

Spectrum transform_forward(const GridFunction& f) {
  std::vector<Complex> in(f.values().begin(), f.values().end());
  return transform_forward(f.grid(), in);
}

std::vector<Complex> transform_inverse(const Spectrum& spectrum) {
  const Grid& grid = spectrum.grid;
  std::vector<Complex> out = run_fft(grid, spectrum.coeffs, FFTW_BACKWARD);
  const double w = 1.0 / std::pow(grid.box_length(), grid.dim());
  for (auto& c : out) c *= w;
  return out;
}

GridFunction transform_inverse_real(const Spectrum& spectrum) {
  const std::vector<Complex> c = transform_inverse(spectrum);
  std::vector<double> v(c.size());
  for (std::size_t i = 0; i < c.size(); ++i) v[i] = c[i].real();
  return GridFunction(spectrum.grid, std::move(v));
}

// --------------------------------------------------------------- norms

double lp_norm(const GridFunction& f, double p, const DomainMask* mask) {
  if (!(p >= 1.0)) throw PreconditionError("lp_norm requires p >= 1");
  if (mask != nullptr && !(mask->grid() == f.grid())) {
    throw PreconditionError("mask grid differs");
  }
  const auto values = f.values();
  if (std::isinf(p)) {
    double m = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) {
      if (mask == nullptr || mask->contains(i)) m = std::max(m, std::fabs(values[i]));
    }
    return m;
  }
  // Scale by the sup to keep |f|^p representable.
  const double scale = f.max_abs();
  if (scale == 0.0) return 0.0;
  double sum = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (mask == nullptr || mask->contains(i)) {
      sum += std::pow(std::fabs(values[i]) / scale, p);
    }
  }
  return scale * std::pow(sum * f.grid().cell_volume(), 1.0 / p);
}

double l2_norm(const GridFunction& f, const DomainMask* mask) {
  if (mask != nullptr && !(mask->grid() == f.grid())) {
    throw PreconditionError("mask grid differs");
  }
  double sum = 0.0;
  const auto values = f.values();
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (mask == nullptr || mask->contains(i)) sum += values[i] * values[i];
  }
  return std::sqrt(sum * f.grid().cell_volume());
}

double inner_product(const GridFunction& f, const GridFunction& g) {
  require_same_grid(f.grid(), g.grid());
  double sum = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) sum += f[i] * g[i];
  return sum * f.grid().cell_volume();
}

double spectral_l2_norm_squared(const Spectrum& s) {
  double sum = 0.0;
  for (const auto& c : s.coeffs) sum += std::norm(c);
  return sum / std::pow(s.grid.box_length(), s.grid.dim());
}

}  // namespace fracharm
