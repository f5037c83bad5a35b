#pragma once

// Points, point sets and direction keys. A point set is homogeneously exact
// (GMP rationals) or floating (double); every exact set also carries a double
// shadow of its coordinates for the floating-point kernels.

#include <gmpxx.h>

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "dirlab/error.hpp"

namespace dirlab {

using Rational = mpq_class;
using BigInt = mpz_class;

enum class NumberMode { Exact, Float };

const char* mode_name(NumberMode mode) noexcept;

// Snap resolution for float-mode direction keys.
inline constexpr double kDirectionResolution = 1e-9;
// Duplicate-detection resolution for float-mode point sets.
inline constexpr double kDuplicateResolution = 1e-12;

using Scalar = std::variant<Rational, double>;

double to_double(const Scalar& value);

class Point {
 public:
  explicit Point(std::vector<Rational> coords);
  explicit Point(std::vector<double> coords);

  NumberMode mode() const noexcept {
    return std::holds_alternative<std::vector<Rational>>(coords_) ? NumberMode::Exact
                                                                  : NumberMode::Float;
  }
  std::size_t dimension() const noexcept;

  const std::vector<Rational>& exact() const;
  const std::vector<double>& floating() const;
  Scalar operator[](std::size_t i) const;

  friend bool operator==(const Point& a, const Point& b) { return a.coords_ == b.coords_; }

 private:
  std::variant<std::vector<Rational>, std::vector<double>> coords_;
};

// Slope (x_1-y_1)/(x_d-y_d), ..., (x_{d-1}-y_{d-1})/(x_d-y_d) of a segment.
struct SlopeVector {
  std::vector<Scalar> entries;

  std::vector<double> to_doubles() const;
  friend bool operator==(const SlopeVector& a, const SlopeVector& b) {
    return a.entries == b.entries;
  }
};

// Canonical representative of a direction class.
//  - exact mode: primitive integer vector parallel to x - y;
//  - float mode: unit vector snapped to multiples of kDirectionResolution,
//    stored as the integer multipliers.
// With antipodal identification the first nonzero entry is positive.
class DirectionKey {
 public:
  DirectionKey(std::vector<BigInt> primitive, bool antipodal);
  DirectionKey(std::vector<std::int64_t> quantized, bool antipodal);

  NumberMode mode() const noexcept { return mode_; }
  bool antipodal_identified() const noexcept { return antipodal_; }
  std::size_t dimension() const noexcept;

  const std::vector<BigInt>& primitive() const;
  const std::vector<std::int64_t>& quantized() const;

  // Unit vector in double precision, for charts and separation checks.
  std::vector<double> unit() const;
  std::string to_string() const;

  friend bool operator==(const DirectionKey& a, const DirectionKey& b);
  friend bool operator<(const DirectionKey& a, const DirectionKey& b);

 private:
  NumberMode mode_;
  bool antipodal_;
  std::vector<BigInt> primitive_;
  std::vector<std::int64_t> quantized_;
};

// Exact point sets whose coordinates share a modest common denominator are
// also stored as scaled 64-bit integers; the pair kernels use this view.
struct IntegerLattice {
  std::int64_t denominator = 1;
  std::vector<std::int64_t> numerators;  // row-major, size n * d
  std::vector<std::int64_t> lo;          // per-coordinate minimum numerator
  std::vector<std::int64_t> hi;          // per-coordinate maximum numerator
};

class PointSet {
 public:
  PointSet() = default;

  // Row-major coordinates. Both factories reject duplicates, non-finite
  // values and dimension < 2. Order is preserved unless `canonical_order`.
  static PointSet exact(int dimension, std::vector<Rational> coords,
                        bool canonical_order = false);
  static PointSet floating(int dimension, std::vector<double> coords,
                           bool canonical_order = false);
  static PointSet from_points(const std::vector<Point>& points, bool canonical_order = false);

  int dimension() const noexcept { return dimension_; }
  std::size_t size() const noexcept { return size_; }
  NumberMode mode() const noexcept { return mode_; }
  bool empty() const noexcept { return size_ == 0; }

  Point point(std::size_t i) const;
  std::span<const Rational> exact_row(std::size_t i) const;
  std::span<const double> row(std::size_t i) const;

  const std::vector<double>& doubles() const noexcept { return doubles_; }
  const std::vector<Rational>& rationals() const noexcept { return rationals_; }

  // Present for exact sets with |numerators| < 2^40 after scaling.
  const std::optional<IntegerLattice>& lattice() const noexcept { return lattice_; }

  // Uniform scaling and translation; used by invariance checks.
  PointSet transformed(const Rational& scale, const std::vector<Rational>& shift) const;
  PointSet subset(std::span<const std::size_t> indices) const;

  friend bool operator==(const PointSet& a, const PointSet& b);

 private:
  void finish(bool canonical_order);

  int dimension_ = 0;
  std::size_t size_ = 0;
  NumberMode mode_ = NumberMode::Exact;
  std::vector<Rational> rationals_;
  std::vector<double> doubles_;
  std::optional<IntegerLattice> lattice_;
};

// Direction of x - y. Throws DegeneratePair for x == y and ModeMismatch when
// the points have different modes or dimensions.
DirectionKey canonical_direction(const Point& x, const Point& y, bool antipodal,
                                 double resolution = kDirectionResolution);

// Throws VerticalPair when x_d == y_d.
SlopeVector slope_of_pair(const Point& x, const Point& y);

// Dimension of the affine hull: 0 for one point, 1 for collinear sets, ...
int collinearity_rank(const PointSet& points);

// Primitive form of an integer vector (divide by gcd, optional sign
// normalization). Shared by the exact kernels.
void reduce_primitive(std::span<std::int64_t> v, bool antipodal);
void reduce_primitive(std::vector<BigInt>& v, bool antipodal);

std::vector<std::int64_t> quantize_unit(std::span<const double> diff, bool antipodal,
                                        double resolution);

}  // namespace dirlab

template <>
struct std::hash<dirlab::DirectionKey> {
  std::size_t operator()(const dirlab::DirectionKey& key) const noexcept;
};
