#include "dirlab/directions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <numeric>
#include <set>
#include <unordered_map>

#include "dirlab/parallel.hpp"
#include "pair_kernels.hpp"

namespace dirlab {

namespace {

// Sorts the rows of a row-major matrix lexicographically and drops repeats.
void sort_unique_rows(std::vector<std::int64_t>& flat, std::size_t d) {
  const std::size_t rows = flat.size() / d;
  std::vector<std::size_t> order(rows);
  std::iota(order.begin(), order.end(), 0);
  auto row_less = [&](std::size_t a, std::size_t b) {
    return std::lexicographical_compare(flat.begin() + a * d, flat.begin() + (a + 1) * d,
                                        flat.begin() + b * d, flat.begin() + (b + 1) * d);
  };
  std::sort(order.begin(), order.end(), row_less);
  std::vector<std::int64_t> out;
  out.reserve(flat.size());
  for (std::size_t r = 0; r < rows; ++r) {
    const std::size_t idx = order[r];
    if (r > 0 && !row_less(order[r - 1], idx)) continue;
    out.insert(out.end(), flat.begin() + idx * d, flat.begin() + (idx + 1) * d);
  }
  flat = std::move(out);
}

}  // namespace

// ---------------------------------------------------------------------------
// Census

std::size_t DirectionCensus::size() const noexcept {
  return narrow_.size() / static_cast<std::size_t>(std::max(dimension_, 1)) + wide_.size();
}

DirectionKey DirectionCensus::key(std::size_t i) const {
  const auto d = static_cast<std::size_t>(dimension_);
  const std::size_t narrow_rows = narrow_.size() / d;
  if (i >= narrow_rows) return wide_.at(i - narrow_rows);
  const std::int64_t* row = narrow_.data() + i * d;
  if (mode_ == NumberMode::Float) {
    return DirectionKey(std::vector<std::int64_t>(row, row + d), antipodal_);
  }
  std::vector<BigInt> prim(d);
  for (std::size_t k = 0; k < d; ++k) prim[k] = static_cast<long>(row[k]);
  return DirectionKey(std::move(prim), antipodal_);
}

std::vector<DirectionKey> DirectionCensus::keys() const {
  std::vector<DirectionKey> out;
  out.reserve(size());
  for (std::size_t i = 0; i < size(); ++i) out.push_back(key(i));
  return out;
}

std::vector<double> DirectionCensus::unit(std::size_t i) const {
  const auto d = static_cast<std::size_t>(dimension_);
  const std::size_t narrow_rows = narrow_.size() / d;
  if (i >= narrow_rows) return wide_.at(i - narrow_rows).unit();
  std::vector<double> u(d);
  double norm = 0.0;
  for (std::size_t k = 0; k < d; ++k) {
    u[k] = static_cast<double>(narrow_[i * d + k]);
    norm += u[k] * u[k];
  }
  norm = std::sqrt(norm);
  for (double& c : u) c /= norm;
  return u;
}

bool DirectionCensus::contains(const DirectionKey& key) const {
  if (key.mode() != mode_ || key.antipodal_identified() != antipodal_ ||
      key.dimension() != static_cast<std::size_t>(dimension_)) {
    return false;
  }
  if (std::binary_search(wide_.begin(), wide_.end(), key)) return true;
  const auto d = static_cast<std::size_t>(dimension_);
  std::vector<std::int64_t> probe(d);
  if (mode_ == NumberMode::Float) {
    probe = key.quantized();
  } else {
    for (std::size_t k = 0; k < d; ++k) {
      if (!key.primitive()[k].fits_slong_p()) return false;
      probe[k] = key.primitive()[k].get_si();
    }
  }
  std::size_t lo = 0, hi = narrow_.size() / d;
  while (lo < hi) {
    std::size_t mid = (lo + hi) / 2;
    auto row = narrow_.begin() + static_cast<std::ptrdiff_t>(mid * d);
    if (std::lexicographical_compare(row, row + static_cast<std::ptrdiff_t>(d), probe.begin(), probe.end())) {
      lo = mid + 1;
    } else {
      hi = mid;
    }
  }
  return lo < narrow_.size() / d &&
         std::equal(probe.begin(), probe.end(), narrow_.begin() + static_cast<std::ptrdiff_t>(lo * d));
}

DirectionCensus distinct_directions(const PointSet& points, bool antipodal) {
  const std::size_t n = points.size();
  if (n < 2) fail(ErrorCode::PreconditionFailed, "direction census needs at least two points");
  const auto d = static_cast<std::size_t>(points.dimension());

  DirectionCensus census;
  census.dimension_ = points.dimension();
  census.mode_ = points.mode();
  census.antipodal_ = antipodal;
  census.n_points_ = n;
  const std::uint64_t unordered = static_cast<std::uint64_t>(n) * (n - 1) / 2;
  census.n_pairs_ = antipodal ? unordered : 2 * unordered;

  auto emit = [&](std::span<std::int64_t> key) {
    census.narrow_.insert(census.narrow_.end(), key.begin(), key.end());
    if (!antipodal) {
      for (auto c : key) census.narrow_.push_back(-c);
    }
  };

  if (points.mode() == NumberMode::Exact) {
    if (auto hist = detail::difference_histogram(points)) {
      std::vector<std::int64_t> buf(d);
      for (std::size_t r = 0; r < hist->size(); ++r) {
        std::copy_n(hist->diffs.begin() + static_cast<std::ptrdiff_t>(r * d), d, buf.begin());
        reduce_primitive(buf, true);
        emit(buf);
      }
      sort_unique_rows(census.narrow_, d);
      return census;
    }
    std::set<DirectionKey> keys;
    for (std::size_t i = 0; i < n; ++i) {
      const Point a = points.point(i);
      for (std::size_t j = i + 1; j < n; ++j) {
        const Point b = points.point(j);
        keys.insert(canonical_direction(b, a, antipodal));
        if (!antipodal) keys.insert(canonical_direction(a, b, antipodal));
      }
    }
    census.wide_.assign(keys.begin(), keys.end());
    return census;
  }

  constexpr std::size_t kFlushRows = std::size_t{1} << 22;
  std::vector<double> diff(d);
  for (std::size_t i = 0; i < n; ++i) {
    auto a = points.row(i);
    for (std::size_t j = i + 1; j < n; ++j) {
      auto b = points.row(j);
      for (std::size_t k = 0; k < d; ++k) diff[k] = b[k] - a[k];
      auto key = quantize_unit(diff, true, kDirectionResolution);
      emit(key);
    }
    if (census.narrow_.size() / d > kFlushRows) sort_unique_rows(census.narrow_, d);
  }
  sort_unique_rows(census.narrow_, d);
  return census;
}

// ---------------------------------------------------------------------------

std::uint64_t primitive_count(int q, int d) {
  if (q < 1) fail(ErrorCode::InvalidArgument, "primitive_count needs q >= 1");
  if (d < 2) fail(ErrorCode::InvalidArgument, "primitive_count needs d >= 2");
  const auto dim = static_cast<std::size_t>(d);
  // Odometer over [0,q]^d keeping prefix gcds, so each step costs O(1) amortized.
  std::vector<long> v(dim, 0);
  std::vector<long> prefix(dim + 1, 0);
  std::uint64_t count = 0;
  while (true) {
    for (std::size_t k = 0; k < dim; ++k) prefix[k + 1] = std::gcd(prefix[k], v[k]);
    if (prefix[dim] == 1) ++count;
    std::size_t k = dim;
    while (k > 0) {
      --k;
      if (++v[k] <= q) break;
      v[k] = 0;
      if (k == 0) return count;
    }
  }
}

const char* pps_status_name(PpsStatus status) noexcept {
  switch (status) {
    case PpsStatus::Pass: return "pass";
    case PpsStatus::Fail: return "fail";
    case PpsStatus::NotApplicable: return "not_applicable";
  }
  return "unknown";
}

PpsReport pps_check(const PointSet& points) {
  if (points.dimension() != 3) {
    fail(ErrorCode::WrongDimension, "PPS bounds apply to point sets in R^3");
  }
  PpsReport report;
  report.n = points.size();
  const auto n = static_cast<long>(report.n);
  report.threshold = (n % 2 == 1) ? 2 * n - 5 : 2 * n - 7;
  report.rank = report.n == 0 ? 0 : collinearity_rank(points);
  if (report.rank < 3) {
    report.status = PpsStatus::NotApplicable;
    return report;
  }
  report.count = distinct_directions(points, true).size();
  report.status = static_cast<long>(report.count) >= report.threshold ? PpsStatus::Pass
                                                                       : PpsStatus::Fail;
  return report;
}

// ---------------------------------------------------------------------------
// Cube-face chart and coverage

CubeFaceChart::CubeFaceChart(int dimension, double pitch, bool antipodal)
    : dimension_(dimension), pitch_(pitch), antipodal_(antipodal) {
  if (dimension < 2) fail(ErrorCode::InvalidArgument, "chart dimension must be at least 2");
  if (!(pitch > 0.0) || pitch > 1.0) fail(ErrorCode::InvalidArgument, "chart pitch must lie in (0,1]");
  per_axis_ = static_cast<std::uint64_t>(std::ceil(2.0 / pitch - 1e-9));
  face_cells_ = 1;
  for (int k = 0; k + 1 < dimension; ++k) {
    if (face_cells_ > (std::uint64_t{1} << 60) / per_axis_) {
      fail(ErrorCode::SizeLimit, "cube-face chart has too many cells");
    }
    face_cells_ *= per_axis_;
  }
  total_ = face_cells_ * faces();
}

std::uint64_t CubeFaceChart::faces() const noexcept {
  return static_cast<std::uint64_t>(dimension_) * (antipodal_ ? 1 : 2);
}

std::uint64_t CubeFaceChart::cell_of(const double* v) const {
  const auto d = static_cast<std::size_t>(dimension_);
  std::size_t axis = 0;
  double lead = std::abs(v[0]);
  for (std::size_t k = 1; k < d; ++k) {
    if (std::abs(v[k]) > lead) {
      lead = std::abs(v[k]);
      axis = k;
    }
  }
  if (lead == 0.0) fail(ErrorCode::DegeneratePair, "zero vector has no direction");
  const bool negative = v[axis] < 0.0;
  const double scale = (antipodal_ && negative) ? -lead : lead;
  std::uint64_t face = antipodal_ ? axis : 2 * axis + (negative ? 1 : 0);
  std::uint64_t cell = 0;
  for (std::size_t k = 0; k < d; ++k) {
    if (k == axis) continue;
    const double w = v[k] / scale;
    auto idx = static_cast<std::int64_t>(std::floor((w + 1.0) / pitch_));
    idx = std::clamp<std::int64_t>(idx, 0, static_cast<std::int64_t>(per_axis_) - 1);
    cell = cell * per_axis_ + static_cast<std::uint64_t>(idx);
  }
  return face * face_cells_ + cell;
}

CoverageGrid::CoverageGrid(CubeFaceChart chart,
                           std::vector<std::pair<std::uint64_t, std::uint64_t>> cells,
                           std::uint64_t total_hits)
    : chart_(chart), cells_(std::move(cells)), total_hits_(total_hits) {}

double CoverageGrid::fraction() const noexcept {
  return static_cast<double>(cells_.size()) / static_cast<double>(chart_.total_cells());
}

namespace {

constexpr std::uint64_t kDenseCells = std::uint64_t{1} << 22;

// Per-chart hit accumulator: dense when the chart is small, hashed otherwise.
class HitTable {
 public:
  explicit HitTable(const CubeFaceChart& chart) {
    if (chart.total_cells() <= kDenseCells) dense_.assign(chart.total_cells(), 0);
  }
  void add(std::uint64_t cell, std::uint64_t count) {
    if (!dense_.empty()) {
      dense_[cell] += count;
    } else {
      sparse_[cell] += count;
    }
  }
  void merge(const HitTable& other) {
    for (std::size_t i = 0; i < other.dense_.size(); ++i) dense_[i] += other.dense_[i];
    for (const auto& [c, h] : other.sparse_) sparse_[c] += h;
  }
  std::vector<std::pair<std::uint64_t, std::uint64_t>> cells() const {
    std::vector<std::pair<std::uint64_t, std::uint64_t>> out;
    for (std::size_t i = 0; i < dense_.size(); ++i) {
      if (dense_[i]) out.emplace_back(i, dense_[i]);
    }
    out.insert(out.end(), sparse_.begin(), sparse_.end());
    std::sort(out.begin(), out.end());
    return out;
  }

 private:
  std::vector<std::uint64_t> dense_;
  std::unordered_map<std::uint64_t, std::uint64_t> sparse_;
};

}  // namespace

std::vector<CoverageGrid> sphere_coverage(const PointSet& points, std::span<const double> epsilons,
                                          bool antipodal, unsigned threads) {
  const std::size_t n = points.size();
  if (n < 2) fail(ErrorCode::PreconditionFailed, "sphere coverage needs at least two points");
  const auto d = static_cast<std::size_t>(points.dimension());
  std::vector<CubeFaceChart> charts;
  for (double eps : epsilons) charts.emplace_back(points.dimension(), eps, antipodal);

  const std::uint64_t unordered = static_cast<std::uint64_t>(n) * (n - 1) / 2;
  const std::uint64_t total_hits = antipodal ? unordered : 2 * unordered;

  auto add_direction = [&](std::vector<HitTable>& tables, double* v, std::uint64_t count) {
    for (std::size_t c = 0; c < charts.size(); ++c) {
      tables[c].add(charts[c].cell_of(v), count);
      if (!antipodal) {
        for (std::size_t k = 0; k < d; ++k) v[k] = -v[k];
        tables[c].add(charts[c].cell_of(v), count);
        for (std::size_t k = 0; k < d; ++k) v[k] = -v[k];
      }
    }
  };
  auto make_tables = [&] {
    std::vector<HitTable> tables;
    for (const auto& chart : charts) tables.emplace_back(chart);
    return tables;
  };

  std::vector<HitTable> result = make_tables();
  std::optional<detail::DifferenceHistogram> hist;
  if (points.mode() == NumberMode::Exact) hist = detail::difference_histogram(points);
  if (hist) {
    std::vector<double> v(d);
    for (std::size_t r = 0; r < hist->size(); ++r) {
      for (std::size_t k = 0; k < d; ++k) v[k] = static_cast<double>(hist->diffs[r * d + k]);
      add_direction(result, v.data(), hist->counts[r]);
    }
  } else {
    // Row blocks balanced by pair count; integer merges keep the result
    // independent of the schedule.
    const std::size_t blocks = std::max<std::size_t>(1, std::min<std::size_t>(threads, n - 1));
    std::vector<std::size_t> bounds{0};
    const double per_block = static_cast<double>(unordered) / static_cast<double>(blocks);
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < n && bounds.size() < blocks; ++i) {
      acc += static_cast<double>(n - 1 - i);
      if (acc >= per_block * static_cast<double>(bounds.size())) bounds.push_back(i + 1);
    }
    bounds.push_back(n);
    std::vector<std::vector<HitTable>> partial(bounds.size() - 1);
    parallel_blocks(bounds.size() - 1, threads, [&](std::size_t b) {
      partial[b] = make_tables();
      std::vector<double> v(d);
      for (std::size_t i = bounds[b]; i < bounds[b + 1]; ++i) {
        auto a = points.row(i);
        for (std::size_t j = i + 1; j < n; ++j) {
          auto p = points.row(j);
          for (std::size_t k = 0; k < d; ++k) v[k] = p[k] - a[k];
          if (detail::leading_negative(v.data(), d)) {
            for (std::size_t k = 0; k < d; ++k) v[k] = -v[k];
          }
          add_direction(partial[b], v.data(), 1);
        }
      }
    });
    for (auto& part : partial) {
      for (std::size_t c = 0; c < charts.size(); ++c) result[c].merge(part[c]);
    }
  }

  std::vector<CoverageGrid> grids;
  for (std::size_t c = 0; c < charts.size(); ++c) {
    grids.emplace_back(charts[c], result[c].cells(), total_hits);
  }
  return grids;
}

CoverageGrid sphere_coverage(const PointSet& points, double epsilon, bool antipodal,
                             unsigned threads) {
  const double eps[] = {epsilon};
  return std::move(sphere_coverage(points, eps, antipodal, threads).front());
}

// ---------------------------------------------------------------------------
// Separated subsets

namespace {

// Appends the band/sector indices of a unit vector in R^m.
void append_separation_cell(std::span<const double> u, double delta, std::vector<std::int64_t>& out) {
  const std::size_t m = u.size();
  if (delta >= 2.0) {
    out.insert(out.end(), m - 1, 0);
    return;
  }
  const double min_angle = 2.0 * std::asin(delta / 2.0);
  constexpr double pi = std::numbers::pi;
  if (m == 2) {
    auto sectors = static_cast<std::int64_t>(std::floor(2.0 * pi / min_angle));
    if (sectors < 2) {
      sectors = 1;
    } else if (sectors % 2 == 1) {
      --sectors;  // an even count keeps parity classes apart across the wrap
    }
    double phi = std::atan2(u[1], u[0]);
    if (phi < 0) phi += 2.0 * pi;
    auto idx = static_cast<std::int64_t>(std::floor(phi / (2.0 * pi / static_cast<double>(sectors))));
    out.push_back(std::clamp<std::int64_t>(idx, 0, sectors - 1));
    return;
  }
  const double theta = std::acos(std::clamp(u[0], -1.0, 1.0));
  const auto bands = std::max<std::int64_t>(1, static_cast<std::int64_t>(std::floor(pi / min_angle)));
  const double width = pi / static_cast<double>(bands);
  const auto band = std::clamp<std::int64_t>(static_cast<std::int64_t>(std::floor(theta / width)), 0, bands - 1);
  out.push_back(band);
  const double min_radius = std::min(std::sin(static_cast<double>(band) * width),
                                     std::sin(static_cast<double>(band + 1) * width));
  double radius = 0.0;
  for (std::size_t k = 1; k < m; ++k) radius += u[k] * u[k];
  radius = std::sqrt(radius);
  if (min_radius <= 1e-12 || radius == 0.0) {
    out.insert(out.end(), m - 2, 0);
    return;
  }
  std::vector<double> rest(u.begin() + 1, u.end());
  for (double& c : rest) c /= radius;
  // |r1 a - r2 b| >= min(r1, r2) |a - b| for unit a, b.
  append_separation_cell(rest, delta / min_radius, out);
}

}  // namespace

std::vector<std::int64_t> separation_cell(std::span<const double> unit, double delta) {
  if (unit.size() < 2) fail(ErrorCode::InvalidArgument, "separation chart needs dimension >= 2");
  std::vector<std::int64_t> out;
  out.reserve(unit.size() - 1);
  // Small safety factor against rounding at band boundaries.
  append_separation_cell(unit, delta * (1.0 + 1e-9), out);
  return out;
}

SeparatedSubset separated_subset(const DirectionCensus& census, double delta) {
  if (!(delta > 0.0) || delta > 1.0) fail(ErrorCode::InvalidArgument, "delta must lie in (0,1]");
  SeparatedSubset out;
  out.delta = delta;
  out.colors = 1 << (census.dimension() - 1);
  std::map<std::vector<std::int64_t>, std::size_t> representative;
  for (std::size_t i = 0; i < census.size(); ++i) {
    auto cell = separation_cell(census.unit(i), delta);
    representative.emplace(std::move(cell), i);
  }
  out.occupied_cells = representative.size();
  std::vector<std::vector<std::size_t>> classes(static_cast<std::size_t>(out.colors));
  for (const auto& [cell, index] : representative) {
    std::size_t color = 0;
    for (std::size_t k = 0; k < cell.size(); ++k) color |= static_cast<std::size_t>(cell[k] & 1) << k;
    classes[color].push_back(index);
  }
  std::size_t best = 0;
  for (std::size_t c = 1; c < classes.size(); ++c) {
    if (classes[c].size() > classes[best].size()) best = c;
  }
  std::sort(classes[best].begin(), classes[best].end());
  for (std::size_t index : classes[best]) out.keys.push_back(census.key(index));
  return out;
}

}  // namespace dirlab
