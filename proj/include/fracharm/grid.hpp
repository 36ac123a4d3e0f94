#pragma once

// Periodic-box discretization of R^n: grid geometry, sampled fields,
// domain masks, the spectral transform pair and quadrature norms.
//
// Layout: row-major, axis 0 slowest.  Index 0 along every axis is the
// coordinate origin, so coordinates are the centered representatives in
// [-L/2, L/2) and the box "center" is the origin.
//
// Fourier normalization:
//   forward   F(xi) = h^n * sum_j f(x_j) exp(-2 pi i x_j . xi)
//   inverse   f(x)  = L^-n * sum_xi F(xi) exp(2 pi i x . xi)
// with xi = mode / L.  Discrete Parseval then reads
//   h^n sum_j |f(x_j)|^2 = L^-n sum_xi |F(xi)|^2.

#include <array>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include <json.hpp>

namespace fracharm {

using Point = std::array<double, 3>;
using Index3 = std::array<std::ptrdiff_t, 3>;
using Complex = std::complex<double>;

inline constexpr std::size_t kDefaultSizeGuard = std::size_t{1} << 24;

class Grid {
 public:
  // Throws PreconditionError naming the offending field.
  static Grid make(int dim, std::size_t points_per_axis, double box_length,
                   std::size_t size_guard = kDefaultSizeGuard);

  int dim() const { return dim_; }
  std::size_t points_per_axis() const { return n_; }
  double box_length() const { return length_; }
  double spacing() const { return length_ / static_cast<double>(n_); }
  double cell_volume() const;
  std::size_t size() const { return size_; }

  Index3 multi_index(std::size_t flat) const;
  // Periodic wrap of arbitrary integer indices.
  std::size_t flat_index(const Index3& idx) const;

  // Signed lattice offset along each axis in [-N/2, N/2).
  Index3 signed_index(std::size_t flat) const;
  Point coordinate(std::size_t flat) const;
  Point frequency(std::size_t flat) const;
  double frequency_norm(std::size_t flat) const;

  // Minimum over lattice translates.
  double periodic_distance(const Point& a, const Point& b) const;
  // Grid point nearest to p (periodic).
  std::size_t nearest_index(const Point& p) const;

  bool operator==(const Grid& other) const = default;

  nlohmann::json to_json() const;

 private:
  Grid(int dim, std::size_t n, double length);

  int dim_ = 1;
  std::size_t n_ = 8;
  double length_ = 1.0;
  std::size_t size_ = 8;
};

class DomainMask {
 public:
  DomainMask(Grid grid, std::vector<std::uint8_t> inside);

  static DomainMask full(const Grid& grid);
  static DomainMask empty(const Grid& grid);
  // Points with periodic distance < radius from center.
  static DomainMask ball(const Grid& grid, const Point& center, double radius);
  // B_outer \ B_inner, i.e. inner <= dist < outer.
  static DomainMask annulus(const Grid& grid, const Point& center, double inner,
                            double outer);
  static DomainMask from_predicate(const Grid& grid,
                                   const std::function<bool(const Point&)>& pred);

  DomainMask complement() const;
  DomainMask unite(const DomainMask& other) const;
  DomainMask intersect(const DomainMask& other) const;
  bool is_subset_of(const DomainMask& other) const;
  bool disjoint_from(const DomainMask& other) const;

  const Grid& grid() const { return grid_; }
  bool contains(std::size_t flat) const { return inside_[flat] != 0; }
  std::size_t count() const { return count_; }
  double measure() const;
  std::vector<std::size_t> indices() const;

 private:
  Grid grid_;
  std::vector<std::uint8_t> inside_;
  std::size_t count_ = 0;
};

class GridFunction {
 public:
  // Throws PreconditionError on size mismatch or a non-finite value.
  GridFunction(Grid grid, std::vector<double> values);

  static GridFunction zeros(const Grid& grid);
  static GridFunction constant(const Grid& grid, double value);
  static GridFunction sample(const Grid& grid,
                             const std::function<double(const Point&)>& f);

  const Grid& grid() const { return grid_; }
  std::span<const double> values() const { return values_; }
  double operator[](std::size_t i) const { return values_[i]; }
  std::size_t size() const { return values_.size(); }

  // Attaches a support mask; values must vanish outside it to within
  // 1e-14 * max|values|.
  GridFunction with_support(const DomainMask& mask) const;
  const std::optional<DomainMask>& support() const { return support_; }

  double max_abs() const;
  double mean() const;

  GridFunction operator+(const GridFunction& o) const;
  GridFunction operator-(const GridFunction& o) const;
  // Pointwise product.
  GridFunction operator*(const GridFunction& o) const;
  GridFunction operator*(double c) const;
  friend GridFunction operator*(double c, const GridFunction& f) { return f * c; }
  // Values set to zero outside the mask.
  GridFunction restricted(const DomainMask& mask) const;

 private:
  Grid grid_;
  std::vector<double> values_;
  std::optional<DomainMask> support_;
};

// Coefficient table on the frequency lattice.
struct Spectrum {
  Grid grid;
  std::vector<Complex> coeffs;
};

Spectrum transform_forward(const GridFunction& f);
Spectrum transform_forward(const Grid& grid, std::span<const Complex> values);
std::vector<Complex> transform_inverse(const Spectrum& spectrum);
// Real part of the inverse transform.
GridFunction transform_inverse_real(const Spectrum& spectrum);

// (sum_{x in mask} |f(x)|^p h^n)^{1/p}; sup norm for p = infinity.
double lp_norm(const GridFunction& f, double p,
               const DomainMask* mask = nullptr);
double l2_norm(const GridFunction& f, const DomainMask* mask = nullptr);
// h^n sum f g
double inner_product(const GridFunction& f, const GridFunction& g);
// L^-n sum |F|^2, the coefficient side of Parseval.
double spectral_l2_norm_squared(const Spectrum& s);

}  // namespace fracharm
