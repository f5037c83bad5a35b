#include "dirlab/generators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace dirlab {

namespace {

// m^k, saturating at max + 1 so cap checks never overflow.
std::size_t checked_power(std::size_t m, int k, std::size_t max) {
  std::size_t out = 1;
  for (int i = 0; i < k; ++i) {
    if (m != 0 && out > max / m) return max + 1;
    out *= m;
  }
  return out;
}

std::size_t integer_root_floor(std::size_t n, int degree) {
  if (degree == 1) return n;
  auto k = static_cast<std::size_t>(std::floor(std::pow(static_cast<double>(n), 1.0 / degree)));
  auto fits = [&](std::size_t c) {
    return checked_power(c, degree, n) <= n;
  };
  while (k > 0 && !fits(k)) --k;
  while (fits(k + 1)) ++k;
  return std::max<std::size_t>(k, 1);
}

std::vector<Rational> grid_axis(std::size_t count) {
  std::vector<Rational> axis;
  if (count == 1) {
    axis.emplace_back(0);
    return axis;
  }
  for (std::size_t j = 0; j < count; ++j) {
    Rational r(static_cast<unsigned long>(j), static_cast<unsigned long>(count - 1));
    r.canonicalize();
    axis.push_back(r);
  }
  return axis;
}

// Visits every tuple of the product grid in lexicographic order.
template <class Fn>
void for_each_grid_point(const std::vector<std::size_t>& counts, Fn&& fn) {
  std::vector<std::size_t> idx(counts.size(), 0);
  for (std::size_t c : counts) {
    if (c == 0) return;
  }
  while (true) {
    fn(idx);
    std::size_t k = counts.size();
    while (k > 0) {
      --k;
      if (++idx[k] < counts[k]) break;
      idx[k] = 0;
      if (k == 0) return;
    }
    if (counts.empty()) return;
  }
}

}  // namespace

// ---------------------------------------------------------------------------

IfsSystem::IfsSystem(int dimension, std::vector<SimilarityMap> maps)
    : dimension_(dimension), maps_(std::move(maps)) {
  if (dimension_ < 2) fail(ErrorCode::InvalidArgument, "IFS dimension must be at least 2");
  if (maps_.empty()) fail(ErrorCode::InvalidArgument, "IFS needs at least one map");
  for (auto& m : maps_) {
    m.ratio.canonicalize();
    if (sgn(m.ratio) <= 0 || m.ratio >= 1) {
      fail(ErrorCode::InvalidArgument, "IFS ratio must lie in (0,1)");
    }
    if (m.offset.size() != static_cast<std::size_t>(dimension_)) {
      fail(ErrorCode::InvalidArgument, "IFS offset has wrong dimension");
    }
    for (auto& o : m.offset) {
      o.canonicalize();
      if (sgn(o) < 0 || o + m.ratio > 1) {
        fail(ErrorCode::InvalidArgument, "IFS map does not send [0,1]^d into itself");
      }
    }
  }
}

IfsSystem IfsSystem::garnett() {
  const Rational quarter(1, 4);
  const Rational far(3, 4);
  std::vector<SimilarityMap> maps;
  for (const auto& y : {Rational(0), far}) {
    for (const auto& x : {Rational(0), far}) maps.push_back({quarter, {x, y}});
  }
  return IfsSystem(2, std::move(maps));
}

std::optional<double> IfsSystem::similarity_dimension() const {
  for (const auto& m : maps_) {
    if (m.ratio != maps_.front().ratio) return std::nullopt;
  }
  return std::log(static_cast<double>(maps_.size())) / -std::log(maps_.front().ratio.get_d());
}

// ---------------------------------------------------------------------------

void LatticeSpec::validate() const {
  if (q < 1) fail(ErrorCode::InvalidArgument, "lattice q must be at least 1");
  if (d < 2) fail(ErrorCode::InvalidArgument, "lattice dimension must be at least 2");
  if (!(s > 0.0) || s > d) fail(ErrorCode::InvalidArgument, "lattice s must lie in (0, d]");
}

double LatticeSpec::radius() const {
  return std::pow(static_cast<double>(q), -static_cast<double>(d) / s);
}

PointSet lattice_set(const LatticeSpec& spec) {
  spec.validate();
  const auto d = static_cast<std::size_t>(spec.d);
  const std::size_t total = checked_power(static_cast<std::size_t>(spec.q) + 1, spec.d, kDefaultPointCap);
  if (total > kDefaultPointCap) {
    fail(ErrorCode::SizeLimit, "(q+1)^d exceeds the point cap of " + std::to_string(kDefaultPointCap));
  }
  std::vector<Rational> axis;
  for (int j = 0; j <= spec.q; ++j) {
    Rational r(j, spec.q);
    r.canonicalize();
    axis.push_back(r);
  }
  std::vector<Rational> coords;
  coords.reserve(total * d);
  for_each_grid_point(std::vector<std::size_t>(d, axis.size()), [&](const auto& idx) {
    for (std::size_t k = 0; k < d; ++k) coords.push_back(axis[idx[k]]);
  });
  return PointSet::exact(spec.d, std::move(coords));
}

PointSet ifs_approximant(const IfsSystem& system, int depth, std::size_t cap) {
  if (depth < 0) fail(ErrorCode::InvalidArgument, "IFS depth must be non-negative");
  const std::size_t m = system.maps().size();
  if (checked_power(m, depth, cap) > cap) {
    fail(ErrorCode::SizeLimit, std::to_string(m) + "^" + std::to_string(depth) +
                                   " exceeds the point cap of " + std::to_string(cap));
  }
  const auto d = static_cast<std::size_t>(system.dimension());
  std::vector<std::vector<Rational>> current{std::vector<Rational>(d, Rational(0))};
  for (int level = 0; level < depth; ++level) {
    std::vector<std::vector<Rational>> next;
    next.reserve(current.size() * m);
    for (const auto& map : system.maps()) {
      for (const auto& p : current) {
        std::vector<Rational> image(d);
        for (std::size_t k = 0; k < d; ++k) image[k] = map.ratio * p[k] + map.offset[k];
        next.push_back(std::move(image));
      }
    }
    std::sort(next.begin(), next.end());
    next.erase(std::unique(next.begin(), next.end()), next.end());
    current = std::move(next);
  }
  std::vector<Rational> coords;
  coords.reserve(current.size() * d);
  for (auto& p : current) {
    for (auto& c : p) coords.push_back(std::move(c));
  }
  return PointSet::exact(system.dimension(), std::move(coords), true);
}

PointSet hyperplane_sample(int d, std::size_t n) {
  if (d < 2) fail(ErrorCode::InvalidArgument, "dimension must be at least 2");
  if (n < 2) fail(ErrorCode::InvalidArgument, "hyperplane sample needs n >= 2");
  const std::size_t k = integer_root_floor(n, d - 1);
  const auto axis = grid_axis(k);
  const Rational half(1, 2);
  std::vector<Rational> coords;
  for_each_grid_point(std::vector<std::size_t>(static_cast<std::size_t>(d - 1), k),
                      [&](const auto& idx) {
                        for (std::size_t i : idx) coords.push_back(axis[i]);
                        coords.push_back(half);
                      });
  return PointSet::exact(d, std::move(coords), true);
}

PointSet lipschitz_graph_sample(int d, std::size_t n) {
  if (d < 2) fail(ErrorCode::InvalidArgument, "dimension must be at least 2");
  if (n < 2) fail(ErrorCode::InvalidArgument, "graph sample needs n >= 2");
  const auto axes = static_cast<std::size_t>(d - 1);
  const std::size_t k = integer_root_floor(n, d - 1);
  std::vector<std::size_t> counts(axes, k);
  // Grow leading axes by one while the grid still fits in n points.
  for (std::size_t a = 0; a < axes; ++a) {
    std::size_t product = 1;
    for (std::size_t b = 0; b < axes; ++b) product *= (b == a ? counts[b] + 1 : counts[b]);
    if (product <= n) counts[a] += 1;
  }
  std::vector<std::vector<Rational>> axis_values;
  for (std::size_t c : counts) axis_values.push_back(grid_axis(c));
  const Rational quarter(1, 4);
  std::vector<Rational> coords;
  for_each_grid_point(counts, [&](const auto& idx) {
    Rational height = 0;
    for (std::size_t a = 0; a < axes; ++a) {
      const Rational& x = axis_values[a][idx[a]];
      coords.push_back(x);
      height += x * x * quarter;
    }
    coords.push_back(height);
  });
  return PointSet::exact(d, std::move(coords), true);
}

// ---------------------------------------------------------------------------

double CantorPreset::dimension(int d) const {
  return d * std::log(static_cast<double>(copies)) / std::log(static_cast<double>(base));
}

std::vector<Rational> CantorPreset::offsets() const {
  if (copies < 1 || base < 2 || copies > base) {
    fail(ErrorCode::InvalidArgument, "Cantor preset needs 1 <= copies <= base, base >= 2");
  }
  std::vector<Rational> out;
  const Rational span = 1 - Rational(1, base);
  for (int j = 0; j < copies; ++j) {
    Rational o = copies == 1 ? Rational(0) : span * Rational(j, copies - 1);
    o.canonicalize();
    out.push_back(o);
  }
  return out;
}

CantorPreset cantor_preset_for(int d, double s, double tolerance) {
  if (d < 2) fail(ErrorCode::InvalidArgument, "dimension must be at least 2");
  if (!(s > d - 1) || s > d + tolerance) {
    fail(ErrorCode::PreconditionFailed,
         "product Cantor target dimension must satisfy d - 1 < s <= d");
  }
  for (int base = 2; base <= 64; ++base) {
    std::optional<CantorPreset> best;
    double best_err = std::numeric_limits<double>::infinity();
    for (int copies = 1; copies <= base; ++copies) {
      CantorPreset p{copies, base};
      double err = std::abs(p.dimension(d) - s);
      if (err <= tolerance && err < best_err) {
        best = p;
        best_err = err;
      }
    }
    if (best) return *best;
  }
  fail(ErrorCode::PreconditionFailed,
       "no product Cantor preset with base <= 64 matches dimension " + std::to_string(s));
}

std::vector<Rational> cantor_factor(const CantorPreset& preset, int depth) {
  if (depth < 0) fail(ErrorCode::InvalidArgument, "Cantor depth must be non-negative");
  const auto offsets = preset.offsets();
  const Rational ratio(1, preset.base);
  std::vector<Rational> values{Rational(0)};
  for (int level = 0; level < depth; ++level) {
    std::vector<Rational> next;
    next.reserve(values.size() * offsets.size());
    for (const auto& o : offsets) {
      for (const auto& v : values) next.push_back(ratio * v + o);
    }
    std::sort(next.begin(), next.end());
    next.erase(std::unique(next.begin(), next.end()), next.end());
    values = std::move(next);
  }
  return values;
}

PointSet product_cantor(int d, const CantorPreset& preset, int depth, std::size_t cap) {
  if (d < 2) fail(ErrorCode::InvalidArgument, "dimension must be at least 2");
  if (depth < 1) fail(ErrorCode::InvalidArgument, "product Cantor depth must be at least 1");
  const std::size_t per_axis = checked_power(static_cast<std::size_t>(preset.copies), depth, cap);
  if (checked_power(per_axis, d, cap) > cap) {
    fail(ErrorCode::SizeLimit, "product Cantor approximant exceeds the point cap of " +
                                   std::to_string(cap));
  }
  const auto axis = cantor_factor(preset, depth);
  const auto dim = static_cast<std::size_t>(d);
  std::vector<Rational> coords;
  coords.reserve(checked_power(axis.size(), d, cap) * dim);
  for_each_grid_point(std::vector<std::size_t>(dim, axis.size()), [&](const auto& idx) {
    for (std::size_t k = 0; k < dim; ++k) coords.push_back(axis[idx[k]]);
  });
  return PointSet::exact(d, std::move(coords));
}

PointSet product_cantor(int d, double s, int depth, std::size_t cap) {
  return product_cantor(d, cantor_preset_for(d, s), depth, cap);
}

}  // namespace dirlab
