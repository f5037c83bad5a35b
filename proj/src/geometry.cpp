#include "dirlab/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace dirlab {

const char* error_code_name(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::DegeneratePair: return "DegeneratePair";
    case ErrorCode::VerticalPair: return "VerticalPair";
    case ErrorCode::SizeLimit: return "SizeLimit";
    case ErrorCode::PreconditionFailed: return "PreconditionFailed";
    case ErrorCode::NotSeparated: return "NotSeparated";
    case ErrorCode::DepthExhausted: return "DepthExhausted";
    case ErrorCode::WrongDimension: return "WrongDimension";
    case ErrorCode::ModeMismatch: return "ModeMismatch";
    case ErrorCode::Parse: return "Parse";
    case ErrorCode::Io: return "Io";
    case ErrorCode::Internal: return "Internal";
  }
  return "Unknown";
}

const char* mode_name(NumberMode mode) noexcept {
  return mode == NumberMode::Exact ? "exact" : "float";
}

double to_double(const Scalar& value) {
  if (const auto* r = std::get_if<Rational>(&value)) return r->get_d();
  return std::get<double>(value);
}

// ---------------------------------------------------------------------------
// Point

Point::Point(std::vector<Rational> coords) : coords_(std::move(coords)) {
  for (auto& c : std::get<0>(coords_)) c.canonicalize();
}

Point::Point(std::vector<double> coords) : coords_(std::move(coords)) {
  for (double c : std::get<1>(coords_)) {
    if (!std::isfinite(c)) fail(ErrorCode::InvalidArgument, "point coordinate is not finite");
  }
}

std::size_t Point::dimension() const noexcept {
  return std::visit([](const auto& v) { return v.size(); }, coords_);
}

const std::vector<Rational>& Point::exact() const {
  if (mode() != NumberMode::Exact) fail(ErrorCode::ModeMismatch, "point is not exact");
  return std::get<0>(coords_);
}

const std::vector<double>& Point::floating() const {
  if (mode() != NumberMode::Float) fail(ErrorCode::ModeMismatch, "point is not floating");
  return std::get<1>(coords_);
}

Scalar Point::operator[](std::size_t i) const {
  if (mode() == NumberMode::Exact) return std::get<0>(coords_).at(i);
  return std::get<1>(coords_).at(i);
}

std::vector<double> SlopeVector::to_doubles() const {
  std::vector<double> out;
  out.reserve(entries.size());
  for (const auto& e : entries) out.push_back(to_double(e));
  return out;
}

// ---------------------------------------------------------------------------
// DirectionKey

DirectionKey::DirectionKey(std::vector<BigInt> primitive, bool antipodal)
    : mode_(NumberMode::Exact), antipodal_(antipodal), primitive_(std::move(primitive)) {}

DirectionKey::DirectionKey(std::vector<std::int64_t> quantized, bool antipodal)
    : mode_(NumberMode::Float), antipodal_(antipodal), quantized_(std::move(quantized)) {}

std::size_t DirectionKey::dimension() const noexcept {
  return mode_ == NumberMode::Exact ? primitive_.size() : quantized_.size();
}

const std::vector<BigInt>& DirectionKey::primitive() const {
  if (mode_ != NumberMode::Exact) fail(ErrorCode::ModeMismatch, "direction key is not exact");
  return primitive_;
}

const std::vector<std::int64_t>& DirectionKey::quantized() const {
  if (mode_ != NumberMode::Float) fail(ErrorCode::ModeMismatch, "direction key is not floating");
  return quantized_;
}

std::vector<double> DirectionKey::unit() const {
  std::vector<double> u(dimension());
  for (std::size_t i = 0; i < u.size(); ++i) {
    u[i] = mode_ == NumberMode::Exact ? primitive_[i].get_d()
                                      : static_cast<double>(quantized_[i]);
  }
  double norm = 0.0;
  for (double c : u) norm += c * c;
  norm = std::sqrt(norm);
  for (double& c : u) c /= norm;
  return u;
}

std::string DirectionKey::to_string() const {
  std::ostringstream out;
  out << '(';
  for (std::size_t i = 0; i < dimension(); ++i) {
    if (i) out << ',';
    if (mode_ == NumberMode::Exact) {
      out << primitive_[i].get_str();
    } else {
      out << static_cast<double>(quantized_[i]) * kDirectionResolution;
    }
  }
  out << ')';
  return out.str();
}

bool operator==(const DirectionKey& a, const DirectionKey& b) {
  return a.mode_ == b.mode_ && a.antipodal_ == b.antipodal_ && a.primitive_ == b.primitive_ &&
         a.quantized_ == b.quantized_;
}

bool operator<(const DirectionKey& a, const DirectionKey& b) {
  if (a.mode_ != b.mode_) return a.mode_ < b.mode_;
  if (a.mode_ == NumberMode::Exact) {
    return std::lexicographical_compare(a.primitive_.begin(), a.primitive_.end(),
                                        b.primitive_.begin(), b.primitive_.end());
  }
  return a.quantized_ < b.quantized_;
}

// ---------------------------------------------------------------------------
// Primitive reduction

void reduce_primitive(std::span<std::int64_t> v, bool antipodal) {
  std::int64_t g = 0;
  for (std::int64_t c : v) g = std::gcd(g, c < 0 ? -c : c);
  if (g == 0) fail(ErrorCode::DegeneratePair, "zero difference vector");
  bool flip = false;
  if (antipodal) {
    for (std::int64_t c : v) {
      if (c != 0) {
        flip = c < 0;
        break;
      }
    }
  }
  for (auto& c : v) {
    c /= g;
    if (flip) c = -c;
  }
}

void reduce_primitive(std::vector<BigInt>& v, bool antipodal) {
  BigInt g = 0;
  for (const auto& c : v) mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), c.get_mpz_t());
  if (g == 0) fail(ErrorCode::DegeneratePair, "zero difference vector");
  bool flip = false;
  if (antipodal) {
    for (const auto& c : v) {
      if (sgn(c) != 0) {
        flip = sgn(c) < 0;
        break;
      }
    }
  }
  for (auto& c : v) {
    mpz_divexact(c.get_mpz_t(), c.get_mpz_t(), g.get_mpz_t());
    if (flip) c = -c;
  }
}

std::vector<std::int64_t> quantize_unit(std::span<const double> diff, bool antipodal,
                                        double resolution) {
  double scale = 0.0;
  for (double c : diff) scale = std::max(scale, std::abs(c));
  if (scale == 0.0) fail(ErrorCode::DegeneratePair, "zero difference vector");
  double norm = 0.0;
  for (double c : diff) norm += (c / scale) * (c / scale);
  norm = std::sqrt(norm) * scale;

  std::vector<std::int64_t> out(diff.size());
  for (std::size_t i = 0; i < diff.size(); ++i) {
    out[i] = std::llround(diff[i] / norm / resolution);
  }
  if (antipodal) {
    for (std::int64_t c : out) {
      if (c != 0) {
        if (c < 0) {
          for (auto& e : out) e = -e;
        }
        break;
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Pair operations

namespace {

void check_pair(const Point& x, const Point& y) {
  if (x.mode() != y.mode()) fail(ErrorCode::ModeMismatch, "points have different number modes");
  if (x.dimension() != y.dimension()) {
    fail(ErrorCode::ModeMismatch, "points have different dimensions");
  }
  if (x.dimension() < 2) fail(ErrorCode::InvalidArgument, "dimension must be at least 2");
}

}  // namespace

DirectionKey canonical_direction(const Point& x, const Point& y, bool antipodal,
                                 double resolution) {
  check_pair(x, y);
  const std::size_t d = x.dimension();
  if (x.mode() == NumberMode::Exact) {
    const auto& a = x.exact();
    const auto& b = y.exact();
    std::vector<Rational> diff(d);
    BigInt common = 1;
    for (std::size_t i = 0; i < d; ++i) {
      diff[i] = a[i] - b[i];
      mpz_lcm(common.get_mpz_t(), common.get_mpz_t(), diff[i].get_den_mpz_t());
    }
    std::vector<BigInt> ints(d);
    for (std::size_t i = 0; i < d; ++i) {
      ints[i] = diff[i].get_num() * (common / diff[i].get_den());
    }
    reduce_primitive(ints, antipodal);
    return DirectionKey(std::move(ints), antipodal);
  }
  const auto& a = x.floating();
  const auto& b = y.floating();
  std::vector<double> diff(d);
  for (std::size_t i = 0; i < d; ++i) diff[i] = a[i] - b[i];
  return DirectionKey(quantize_unit(diff, antipodal, resolution), antipodal);
}

SlopeVector slope_of_pair(const Point& x, const Point& y) {
  check_pair(x, y);
  const std::size_t d = x.dimension();
  SlopeVector out;
  out.entries.reserve(d - 1);
  if (x.mode() == NumberMode::Exact) {
    const auto& a = x.exact();
    const auto& b = y.exact();
    Rational denom = a[d - 1] - b[d - 1];
    if (sgn(denom) == 0) fail(ErrorCode::VerticalPair, "pair has equal last coordinates");
    for (std::size_t i = 0; i + 1 < d; ++i) out.entries.emplace_back(Rational((a[i] - b[i]) / denom));
    return out;
  }
  const auto& a = x.floating();
  const auto& b = y.floating();
  double denom = a[d - 1] - b[d - 1];
  if (denom == 0.0) fail(ErrorCode::VerticalPair, "pair has equal last coordinates");
  for (std::size_t i = 0; i + 1 < d; ++i) out.entries.emplace_back((a[i] - b[i]) / denom);
  return out;
}

int collinearity_rank(const PointSet& points) {
  if (points.empty()) fail(ErrorCode::InvalidArgument, "collinearity_rank of an empty set");
  const std::size_t n = points.size();
  const auto d = static_cast<std::size_t>(points.dimension());
  if (n == 1) return 0;

  if (points.mode() == NumberMode::Exact) {
    // Incremental row echelon basis over Q of the differences p_i - p_0.
    std::vector<std::vector<Rational>> basis;
    std::vector<std::size_t> pivots;
    auto origin = points.exact_row(0);
    for (std::size_t i = 1; i < n && basis.size() < d; ++i) {
      auto row = points.exact_row(i);
      std::vector<Rational> v(d);
      for (std::size_t k = 0; k < d; ++k) v[k] = row[k] - origin[k];
      for (std::size_t b = 0; b < basis.size(); ++b) {
        const std::size_t p = pivots[b];
        if (sgn(v[p]) == 0) continue;
        Rational f = v[p] / basis[b][p];
        for (std::size_t k = 0; k < d; ++k) v[k] -= f * basis[b][k];
      }
      for (std::size_t k = 0; k < d; ++k) {
        if (sgn(v[k]) != 0) {
          pivots.push_back(k);
          basis.push_back(std::move(v));
          break;
        }
      }
    }
    return static_cast<int>(basis.size());
  }

  // Float mode: Gram-Schmidt with a tolerance relative to the set's extent.
  double extent = 0.0;
  auto origin = points.row(0);
  for (std::size_t i = 1; i < n; ++i) {
    auto row = points.row(i);
    for (std::size_t k = 0; k < d; ++k) extent = std::max(extent, std::abs(row[k] - origin[k]));
  }
  const double tol = 1e-9 * extent;
  std::vector<std::vector<double>> basis;
  for (std::size_t i = 1; i < n && basis.size() < d; ++i) {
    auto row = points.row(i);
    std::vector<double> v(d);
    for (std::size_t k = 0; k < d; ++k) v[k] = row[k] - origin[k];
    for (const auto& b : basis) {
      double dot = 0.0;
      for (std::size_t k = 0; k < d; ++k) dot += v[k] * b[k];
      for (std::size_t k = 0; k < d; ++k) v[k] -= dot * b[k];
    }
    double norm = 0.0;
    for (double c : v) norm += c * c;
    norm = std::sqrt(norm);
    if (norm > tol) {
      for (double& c : v) c /= norm;
      basis.push_back(std::move(v));
    }
  }
  return static_cast<int>(basis.size());
}

// ---------------------------------------------------------------------------
// PointSet

namespace {

constexpr std::int64_t kLatticeLimit = std::int64_t{1} << 40;

std::optional<IntegerLattice> build_lattice(int dimension, std::size_t n,
                                            const std::vector<Rational>& coords) {
  BigInt common = 1;
  for (const auto& c : coords) {
    mpz_lcm(common.get_mpz_t(), common.get_mpz_t(), c.get_den_mpz_t());
    if (common >= kLatticeLimit) return std::nullopt;
  }
  IntegerLattice lat;
  lat.denominator = common.get_si();
  lat.numerators.resize(coords.size());
  const auto d = static_cast<std::size_t>(dimension);
  lat.lo.assign(d, 0);
  lat.hi.assign(d, 0);
  for (std::size_t i = 0; i < coords.size(); ++i) {
    BigInt v = coords[i].get_num() * (common / coords[i].get_den());
    if (abs(v) >= kLatticeLimit) return std::nullopt;
    lat.numerators[i] = v.get_si();
  }
  for (std::size_t k = 0; k < d; ++k) {
    if (n == 0) break;
    lat.lo[k] = lat.hi[k] = lat.numerators[k];
    for (std::size_t i = 1; i < n; ++i) {
      lat.lo[k] = std::min(lat.lo[k], lat.numerators[i * d + k]);
      lat.hi[k] = std::max(lat.hi[k], lat.numerators[i * d + k]);
    }
  }
  return lat;
}

template <class T>
void apply_order(std::vector<T>& coords, std::size_t d, const std::vector<std::size_t>& order) {
  std::vector<T> out;
  out.reserve(coords.size());
  for (std::size_t idx : order) {
    for (std::size_t k = 0; k < d; ++k) out.push_back(coords[idx * d + k]);
  }
  coords = std::move(out);
}

}  // namespace

PointSet PointSet::exact(int dimension, std::vector<Rational> coords, bool canonical_order) {
  if (dimension < 2) fail(ErrorCode::InvalidArgument, "dimension must be at least 2");
  if (coords.size() % static_cast<std::size_t>(dimension) != 0) {
    fail(ErrorCode::InvalidArgument, "coordinate count is not a multiple of the dimension");
  }
  PointSet ps;
  ps.dimension_ = dimension;
  ps.size_ = coords.size() / static_cast<std::size_t>(dimension);
  ps.mode_ = NumberMode::Exact;
  for (auto& c : coords) c.canonicalize();
  ps.rationals_ = std::move(coords);
  ps.finish(canonical_order);
  return ps;
}

PointSet PointSet::floating(int dimension, std::vector<double> coords, bool canonical_order) {
  if (dimension < 2) fail(ErrorCode::InvalidArgument, "dimension must be at least 2");
  if (coords.size() % static_cast<std::size_t>(dimension) != 0) {
    fail(ErrorCode::InvalidArgument, "coordinate count is not a multiple of the dimension");
  }
  for (double c : coords) {
    if (!std::isfinite(c)) fail(ErrorCode::InvalidArgument, "point coordinate is not finite");
  }
  PointSet ps;
  ps.dimension_ = dimension;
  ps.size_ = coords.size() / static_cast<std::size_t>(dimension);
  ps.mode_ = NumberMode::Float;
  ps.doubles_ = std::move(coords);
  ps.finish(canonical_order);
  return ps;
}

PointSet PointSet::from_points(const std::vector<Point>& points, bool canonical_order) {
  if (points.empty()) fail(ErrorCode::InvalidArgument, "cannot infer dimension of an empty list");
  const auto mode = points.front().mode();
  const auto d = points.front().dimension();
  for (const auto& p : points) {
    if (p.mode() != mode) fail(ErrorCode::ModeMismatch, "mixed number modes in point list");
    if (p.dimension() != d) fail(ErrorCode::InvalidArgument, "mixed dimensions in point list");
  }
  if (mode == NumberMode::Exact) {
    std::vector<Rational> flat;
    flat.reserve(points.size() * d);
    for (const auto& p : points) flat.insert(flat.end(), p.exact().begin(), p.exact().end());
    return exact(static_cast<int>(d), std::move(flat), canonical_order);
  }
  std::vector<double> flat;
  flat.reserve(points.size() * d);
  for (const auto& p : points) flat.insert(flat.end(), p.floating().begin(), p.floating().end());
  return floating(static_cast<int>(d), std::move(flat), canonical_order);
}

void PointSet::finish(bool canonical_order) {
  const auto d = static_cast<std::size_t>(dimension_);
  std::vector<std::size_t> order(size_);
  std::iota(order.begin(), order.end(), 0);

  if (mode_ == NumberMode::Exact) {
    auto less = [&](std::size_t a, std::size_t b) {
      for (std::size_t k = 0; k < d; ++k) {
        int c = cmp(rationals_[a * d + k], rationals_[b * d + k]);
        if (c != 0) return c < 0;
      }
      return false;
    };
    std::sort(order.begin(), order.end(), less);
    for (std::size_t i = 1; i < size_; ++i) {
      if (!less(order[i - 1], order[i])) {
        fail(ErrorCode::InvalidArgument,
             "duplicate point at rows " + std::to_string(order[i - 1]) + " and " +
                 std::to_string(order[i]));
      }
    }
    if (canonical_order) apply_order(rationals_, d, order);
    doubles_.resize(rationals_.size());
    for (std::size_t i = 0; i < rationals_.size(); ++i) doubles_[i] = rationals_[i].get_d();
    lattice_ = build_lattice(dimension_, size_, rationals_);
    return;
  }

  auto snapped = [&](std::size_t row, std::size_t k) {
    return std::nearbyint(doubles_[row * d + k] / kDuplicateResolution);
  };
  auto less = [&](std::size_t a, std::size_t b) {
    for (std::size_t k = 0; k < d; ++k) {
      double x = snapped(a, k), y = snapped(b, k);
      if (x != y) return x < y;
    }
    return false;
  };
  std::sort(order.begin(), order.end(), less);
  for (std::size_t i = 1; i < size_; ++i) {
    if (!less(order[i - 1], order[i])) {
      fail(ErrorCode::InvalidArgument,
           "duplicate point (at resolution 1e-12) at rows " + std::to_string(order[i - 1]) +
               " and " + std::to_string(order[i]));
    }
  }
  if (canonical_order) {
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return std::lexicographical_compare(doubles_.begin() + a * d, doubles_.begin() + (a + 1) * d,
                                          doubles_.begin() + b * d, doubles_.begin() + (b + 1) * d);
    });
    apply_order(doubles_, d, order);
  }
}

Point PointSet::point(std::size_t i) const {
  const auto d = static_cast<std::size_t>(dimension_);
  if (mode_ == NumberMode::Exact) {
    return Point(std::vector<Rational>(rationals_.begin() + i * d, rationals_.begin() + (i + 1) * d));
  }
  return Point(std::vector<double>(doubles_.begin() + i * d, doubles_.begin() + (i + 1) * d));
}

std::span<const Rational> PointSet::exact_row(std::size_t i) const {
  if (mode_ != NumberMode::Exact) fail(ErrorCode::ModeMismatch, "point set is not exact");
  const auto d = static_cast<std::size_t>(dimension_);
  return {rationals_.data() + i * d, d};
}

std::span<const double> PointSet::row(std::size_t i) const {
  const auto d = static_cast<std::size_t>(dimension_);
  return {doubles_.data() + i * d, d};
}

PointSet PointSet::transformed(const Rational& scale, const std::vector<Rational>& shift) const {
  const auto d = static_cast<std::size_t>(dimension_);
  if (shift.size() != d) fail(ErrorCode::InvalidArgument, "shift has wrong dimension");
  if (mode_ == NumberMode::Exact) {
    std::vector<Rational> out(rationals_.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = scale * rationals_[i] + shift[i % d];
    return exact(dimension_, std::move(out));
  }
  std::vector<double> out(doubles_.size());
  const double s = scale.get_d();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = s * doubles_[i] + shift[i % d].get_d();
  return floating(dimension_, std::move(out));
}

PointSet PointSet::subset(std::span<const std::size_t> indices) const {
  const auto d = static_cast<std::size_t>(dimension_);
  if (mode_ == NumberMode::Exact) {
    std::vector<Rational> out;
    out.reserve(indices.size() * d);
    for (std::size_t i : indices) {
      auto r = exact_row(i);
      out.insert(out.end(), r.begin(), r.end());
    }
    return exact(dimension_, std::move(out));
  }
  std::vector<double> out;
  out.reserve(indices.size() * d);
  for (std::size_t i : indices) {
    auto r = row(i);
    out.insert(out.end(), r.begin(), r.end());
  }
  return floating(dimension_, std::move(out));
}

bool operator==(const PointSet& a, const PointSet& b) {
  if (a.mode_ != b.mode_ || a.dimension_ != b.dimension_ || a.size_ != b.size_) return false;
  return a.mode_ == NumberMode::Exact ? a.rationals_ == b.rationals_ : a.doubles_ == b.doubles_;
}

}  // namespace dirlab

std::size_t std::hash<dirlab::DirectionKey>::operator()(
    const dirlab::DirectionKey& key) const noexcept {
  std::size_t h = key.antipodal_identified() ? 0x9e3779b97f4a7c15ULL : 0;
  auto mix = [&h](std::size_t v) { h ^= v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2); };
  if (key.mode() == dirlab::NumberMode::Exact) {
    for (const auto& c : key.primitive()) {
      mix(static_cast<std::size_t>(mpz_get_ui(c.get_mpz_t())));
      mix(static_cast<std::size_t>(sgn(c) + 1));
    }
  } else {
    for (auto c : key.quantized()) mix(static_cast<std::size_t>(c));
  }
  return h;
}
