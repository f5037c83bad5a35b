#include "dirlab/measure.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <unordered_map>

#include "dirlab/parallel.hpp"

namespace dirlab {

// ---------------------------------------------------------------------------
// Weighted point sets

namespace {

void check_sizes(const PointSet& base, std::size_t masses) {
  if (masses != base.size()) {
    fail(ErrorCode::InvalidArgument, "mass vector length " + std::to_string(masses) +
                                         " does not match support size " +
                                         std::to_string(base.size()));
  }
  if (base.empty()) fail(ErrorCode::InvalidArgument, "a measure needs at least one atom");
}

}  // namespace

WeightedPointSet::WeightedPointSet(PointSet base, std::vector<double> masses,
                                   std::optional<double> thickening_radius)
    : base_(std::move(base)), masses_(std::move(masses)), radius_(thickening_radius) {
  check_sizes(base_, masses_.size());
  long double total = 0.0L;
  for (double m : masses_) {
    if (!(m >= 0.0) || !std::isfinite(m)) fail(ErrorCode::InvalidArgument, "masses must be finite and nonnegative");
    total += m;
  }
  if (std::abs(static_cast<double>(total) - 1.0) > 1e-12) {
    fail(ErrorCode::InvalidArgument, "masses sum to " + std::to_string(static_cast<double>(total)) + ", not 1");
  }
}

WeightedPointSet::WeightedPointSet(PointSet base, std::vector<Rational> masses,
                                   std::optional<double> thickening_radius)
    : base_(std::move(base)), radius_(thickening_radius) {
  check_sizes(base_, masses.size());
  Rational total = 0;
  masses_.reserve(masses.size());
  for (const auto& m : masses) {
    if (sgn(m) < 0) fail(ErrorCode::InvalidArgument, "masses must be nonnegative");
    total += m;
    masses_.push_back(m.get_d());
  }
  if (total != 1) fail(ErrorCode::InvalidArgument, "rational masses must sum to exactly 1");
  exact_masses_ = std::move(masses);
}

WeightedPointSet WeightedPointSet::uniform(PointSet base, std::optional<double> thickening_radius) {
  const std::size_t n = base.size();
  if (n == 0) fail(ErrorCode::InvalidArgument, "a measure needs at least one atom");
  Rational m(1, static_cast<unsigned long>(n));
  return WeightedPointSet(std::move(base), std::vector<Rational>(n, m), thickening_radius);
}

const std::vector<Rational>& WeightedPointSet::exact_masses() const {
  if (!exact_masses_) fail(ErrorCode::ModeMismatch, "measure carries floating masses only");
  return *exact_masses_;
}

// ---------------------------------------------------------------------------
// Separation, Frostman measures, energies

ClosestPair closest_pair(const PointSet& points) {
  const std::size_t n = points.size();
  if (n < 2) fail(ErrorCode::PreconditionFailed, "closest pair needs at least two points");
  const auto d = static_cast<std::size_t>(points.dimension());
  const auto& x = points.doubles();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return x[a * d] < x[b * d]; });
  ClosestPair best;
  double best_sq = std::numeric_limits<double>::infinity();
  for (std::size_t a = 0; a < n; ++a) {
    const double* p = &x[order[a] * d];
    for (std::size_t b = a + 1; b < n; ++b) {
      const double* q = &x[order[b] * d];
      const double gap = q[0] - p[0];
      if (gap * gap >= best_sq) break;
      double sq = 0.0;
      for (std::size_t k = 0; k < d; ++k) sq += (q[k] - p[k]) * (q[k] - p[k]);
      if (sq < best_sq) {
        best_sq = sq;
        best.i = std::min(order[a], order[b]);
        best.j = std::max(order[a], order[b]);
      }
    }
  }
  best.distance = std::sqrt(best_sq);
  return best;
}

namespace {

double frostman_radius(std::size_t n, double s) { return std::pow(static_cast<double>(n), -1.0 / s); }

void check_exponent(const PointSet& points, double s) {
  if (!(s > 0.0) || s > points.dimension()) {
    fail(ErrorCode::InvalidArgument, "s must lie in (0, d]");
  }
}

// Relative slack for comparisons against n^{-1/s}, which is rounded.
constexpr double kRadiusSlack = 1e-12;

}  // namespace

WeightedPointSet discrete_frostman(const PointSet& points, double s) {
  check_exponent(points, s);
  const std::size_t n = points.size();
  if (n == 0) fail(ErrorCode::InvalidArgument, "a measure needs at least one atom");
  const double radius = frostman_radius(n, s);
  if (n >= 2) {
    const auto pair = closest_pair(points);
    if (pair.distance < radius * (1.0 - kRadiusSlack)) {
      fail(ErrorCode::NotSeparated, "points " + std::to_string(pair.i) + " and " +
                                        std::to_string(pair.j) + " are at distance " +
                                        std::to_string(pair.distance) + " < " + std::to_string(radius));
    }
  }
  return WeightedPointSet::uniform(points, radius);
}

double energy_integral(const WeightedPointSet& mu, double s, unsigned threads) {
  if (!(s > 0.0)) fail(ErrorCode::InvalidArgument, "energy exponent must be positive");
  const std::size_t n = mu.size();
  const auto d = static_cast<std::size_t>(mu.dimension());
  const auto& x = mu.base().doubles();
  const auto& m = mu.masses();
  constexpr std::size_t kRows = 128;
  const std::size_t blocks = (n + kRows - 1) / kRows;
  std::vector<double> partial(blocks, 0.0);
  const double half = -s / 2.0;
  parallel_blocks(blocks, threads, [&](std::size_t b) {
    double acc = 0.0;
    for (std::size_t i = b * kRows; i < std::min(n, (b + 1) * kRows); ++i) {
      const double* p = &x[i * d];
      double row = 0.0;
      for (std::size_t j = i + 1; j < n; ++j) {
        const double* q = &x[j * d];
        double sq = 0.0;
        for (std::size_t k = 0; k < d; ++k) sq += (q[k] - p[k]) * (q[k] - p[k]);
        const double kernel = s == 2.0 ? 1.0 / sq : std::pow(sq, half);
        row += m[j] * kernel;
      }
      acc += m[i] * row;
    }
    partial[b] = acc;
  });
  double total = 0.0;
  for (double v : partial) total += v;
  return 2.0 * total;
}

Rational energy_integral_exact(const WeightedPointSet& mu, int s) {
  if (s <= 0 || s % 2 != 0) fail(ErrorCode::InvalidArgument, "exact energy needs a positive even s");
  if (mu.base().mode() != NumberMode::Exact || !mu.has_exact_masses()) {
    fail(ErrorCode::ModeMismatch, "exact energy needs exact points and masses");
  }
  const std::size_t n = mu.size();
  const auto d = static_cast<std::size_t>(mu.dimension());
  const auto& m = mu.exact_masses();
  Rational total = 0;
  Rational sq, diff, term;
  for (std::size_t i = 0; i < n; ++i) {
    auto p = mu.base().exact_row(i);
    for (std::size_t j = i + 1; j < n; ++j) {
      auto q = mu.base().exact_row(j);
      sq = 0;
      for (std::size_t k = 0; k < d; ++k) {
        diff = q[k] - p[k];
        sq += diff * diff;
      }
      term = m[i] * m[j];
      for (int e = 0; e < s / 2; ++e) term /= sq;
      total += term;
    }
  }
  return 2 * total;
}

double default_adaptability_constant(int d, double s) {
  if (!(s > d - 1)) fail(ErrorCode::InvalidArgument, "default adaptability constant needs s > d - 1");
  return 4.0 * d * (1.0 + 1.0 / (s - (d - 1)));
}

AdaptabilityReport is_adaptable(const PointSet& points, double s, std::optional<double> constant,
                                unsigned threads) {
  check_exponent(points, s);
  AdaptabilityReport report;
  report.n = points.size();
  if (report.n == 0) fail(ErrorCode::InvalidArgument, "adaptability needs at least one point");
  report.s = s;
  report.radius = frostman_radius(report.n, s);
  report.constant = constant ? *constant : default_adaptability_constant(points.dimension(), s);
  if (report.n >= 2) {
    report.min_distance = closest_pair(points).distance;
    report.separated = report.min_distance >= report.radius * (1.0 - kRadiusSlack);
  } else {
    report.min_distance = std::numeric_limits<double>::infinity();
    report.separated = true;
  }
  report.energy = energy_integral(WeightedPointSet::uniform(points, report.radius), s, threads);
  report.pass = report.separated && report.energy <= report.constant;
  return report;
}

// ---------------------------------------------------------------------------
// Dyadic and quarter-cube bookkeeping

namespace {

// floor(x * 2^bits) clamped to [0, 2^bits - 1] per coordinate; the support
// must lie in [0,1]^d.
std::vector<std::int64_t> dyadic_cells(const PointSet& points, int bits) {
  const std::size_t n = points.size();
  const auto d = static_cast<std::size_t>(points.dimension());
  const std::int64_t top = (std::int64_t{1} << bits) - 1;
  std::vector<std::int64_t> cells(n * d);
  auto outside = [] { fail(ErrorCode::PreconditionFailed, "support must lie in [0,1]^d"); };
  if (points.mode() == NumberMode::Exact) {
    BigInt num;
    BigInt q;
    const auto& r = points.rationals();
    for (std::size_t i = 0; i < n * d; ++i) {
      if (sgn(r[i]) < 0 || r[i] > 1) outside();
      num = r[i].get_num();
      num <<= bits;
      mpz_fdiv_q(q.get_mpz_t(), num.get_mpz_t(), r[i].get_den_mpz_t());
      cells[i] = std::min<std::int64_t>(q.get_si(), top);
    }
  } else {
    const auto& x = points.doubles();
    const double scale = std::ldexp(1.0, bits);
    for (std::size_t i = 0; i < n * d; ++i) {
      if (!(x[i] >= 0.0 && x[i] <= 1.0)) outside();
      cells[i] = std::min<std::int64_t>(static_cast<std::int64_t>(std::floor(x[i] * scale)), top);
    }
  }
  return cells;
}

struct CellHash {
  std::size_t operator()(const std::vector<std::int64_t>& v) const noexcept {
    std::uint64_t h = 0x9e3779b97f4a7c15ULL;
    for (auto c : v) {
      h ^= static_cast<std::uint64_t>(c) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    }
    return static_cast<std::size_t>(h);
  }
};

// Mass accumulator: exact when the measure has rational masses.
struct MassSum {
  bool exact = false;
  Rational q = 0;
  long double f = 0.0L;

  void add(const WeightedPointSet& mu, std::size_t i) {
    if (exact) {
      q += mu.exact_masses()[i];
    } else {
      f += mu.masses()[i];
    }
  }
  double value() const { return exact ? q.get_d() : static_cast<double>(f); }
  bool at_least(const MassSum& other, double factor) const {
    if (exact) return q >= other.q * Rational(factor);
    return f >= other.f * static_cast<long double>(factor);
  }
  bool less(const MassSum& other) const { return exact ? q < other.q : f < other.f; }
};

WeightedPointSet restrict_normalized(const WeightedPointSet& mu, const std::vector<std::size_t>& atoms,
                                     const MassSum& mass) {
  PointSet base = mu.base().subset(atoms);
  if (mass.exact) {
    std::vector<Rational> m;
    m.reserve(atoms.size());
    for (auto i : atoms) m.push_back(mu.exact_masses()[i] / mass.q);
    return WeightedPointSet(std::move(base), std::move(m), mu.thickening_radius());
  }
  std::vector<double> m;
  m.reserve(atoms.size());
  for (auto i : atoms) m.push_back(static_cast<double>(mu.masses()[i] / mass.f));
  return WeightedPointSet(std::move(base), std::move(m), mu.thickening_radius());
}

}  // namespace

double default_split_threshold(int d) { return std::ldexp(1.0, -(2 * d + 1)); }

CubeSplit stopping_time_split(const WeightedPointSet& mu, std::optional<double> c, int max_depth) {
  const int d = mu.dimension();
  const auto dim = static_cast<std::size_t>(d);
  const double threshold = c ? *c : default_split_threshold(d);
  if (!(threshold > 0.0 && threshold < 1.0)) fail(ErrorCode::InvalidArgument, "split threshold must lie in (0,1)");
  if (max_depth < 1) fail(ErrorCode::InvalidArgument, "max_depth must be at least 1");
  if (2 * max_depth > 62) fail(ErrorCode::InvalidArgument, "max_depth must be at most 31");
  if (d > 8) fail(ErrorCode::InvalidArgument, "quarter-cube split supports d <= 8");

  const auto cells = dyadic_cells(mu.base(), 2 * max_depth);
  const bool exact = mu.has_exact_masses();
  const std::size_t children = std::size_t{1} << (2 * dim);

  std::vector<std::size_t> current(mu.size());
  std::iota(current.begin(), current.end(), 0);
  std::vector<MassSum> child_mass(children);
  std::vector<std::size_t> child_of(mu.size());

  for (int level = 0; level < max_depth; ++level) {
    const int shift = 2 * (max_depth - level - 1);
    for (auto& m : child_mass) m = MassSum{exact};
    MassSum cube{exact};
    for (auto i : current) {
      std::size_t code = 0;
      for (std::size_t k = 0; k < dim; ++k) {
        code = code * 4 + static_cast<std::size_t>((cells[i * dim + k] >> shift) & 3);
      }
      child_of[i] = code;
      child_mass[code].add(mu, i);
      cube.add(mu, i);
    }

    auto digit = [&](std::size_t code, std::size_t k) { return (code >> (2 * (dim - 1 - k))) & 3; };
    // Two children are usable when some coordinate index differs by at least
    // 2, i.e. the cubes leave a gap of one child side between them. Returns
    // the first such coordinate and how many coordinates have a gap.
    auto gaps = [&](std::size_t a, std::size_t b) {
      std::pair<std::size_t, int> out{dim, 0};
      for (std::size_t k = 0; k < dim; ++k) {
        const auto da = digit(a, k), db = digit(b, k);
        if ((da > db ? da - db : db - da) >= 2) {
          if (out.second++ == 0) out.first = k;
        }
      }
      return out;
    };

    // At most 1/threshold children can be heavy enough.
    std::vector<std::size_t> heavy;
    for (std::size_t code = 0; code < children; ++code) {
      if (child_mass[code].at_least(cube, threshold)) heavy.push_back(code);
    }
    std::optional<std::pair<std::size_t, std::size_t>> best;
    std::size_t best_coordinate = 0;
    int best_gaps = 0;
    const MassSum* best_min = nullptr;
    for (std::size_t a = 0; a < heavy.size(); ++a) {
      const MassSum& ma = child_mass[heavy[a]];
      for (std::size_t b = a + 1; b < heavy.size(); ++b) {
        const auto [k, count] = gaps(heavy[a], heavy[b]);
        if (count == 0) continue;
        const MassSum& mb = child_mass[heavy[b]];
        const MassSum* lo = mb.less(ma) ? &mb : &ma;
        const bool better = !best_min || best_min->less(*lo) || (!lo->less(*best_min) && count > best_gaps);
        if (better) {
          best = {heavy[a], heavy[b]};
          best_coordinate = k;
          best_gaps = count;
          best_min = lo;
        }
      }
    }

    if (best) {
      CubeSplit split;
      split.level = level + 1;
      split.threshold = threshold;
      split.sep_coordinate = static_cast<int>(best_coordinate);
      split.sep_distance = std::ldexp(1.0, -2 * (level + 1));
      for (auto i : current) {
        if (child_of[i] == best->first) split.e1_atoms.push_back(i);
        if (child_of[i] == best->second) split.e2_atoms.push_back(i);
      }
      const MassSum& m1 = child_mass[best->first];
      const MassSum& m2 = child_mass[best->second];
      split.mass1 = m1.value();
      split.mass2 = m2.value();
      split.parent_mass = cube.value();
      if (exact) {
        split.exact_mass1 = m1.q;
        split.exact_mass2 = m2.q;
        split.exact_parent_mass = cube.q;
      }
      const int corner_shift = 2 * (max_depth - level - 1);
      for (std::size_t k = 0; k < dim; ++k) {
        split.cube1.push_back(cells[split.e1_atoms.front() * dim + k] >> corner_shift);
        split.cube2.push_back(cells[split.e2_atoms.front() * dim + k] >> corner_shift);
      }
      split.e1 = restrict_normalized(mu, split.e1_atoms, m1);
      split.e2 = restrict_normalized(mu, split.e2_atoms, m2);
      return split;
    }

    std::size_t heaviest = 0;
    for (std::size_t code = 1; code < children; ++code) {
      if (child_mass[heaviest].less(child_mass[code])) heaviest = code;
    }
    std::vector<std::size_t> next;
    for (auto i : current) {
      if (child_of[i] == heaviest) next.push_back(i);
    }
    current = std::move(next);
  }
  fail(ErrorCode::DepthExhausted,
       "no quarter-cube split found by level " + std::to_string(max_depth));
}

double frostman_constant(const WeightedPointSet& mu, double s, int depth) {
  if (depth < 1) fail(ErrorCode::InvalidArgument, "depth must be at least 1");
  if (depth > 62) fail(ErrorCode::InvalidArgument, "depth must be at most 62");
  const auto dim = static_cast<std::size_t>(mu.dimension());
  const auto cells = dyadic_cells(mu.base(), depth);
  double best = 0.0;
  std::vector<std::int64_t> key(dim);
  for (int j = 0; j <= depth; ++j) {
    std::unordered_map<std::vector<std::int64_t>, long double, CellHash> mass;
    for (std::size_t i = 0; i < mu.size(); ++i) {
      for (std::size_t k = 0; k < dim; ++k) key[k] = cells[i * dim + k] >> (depth - j);
      mass[key] += mu.masses()[i];
    }
    const double scale = std::pow(2.0, j * s);
    for (const auto& [cell, m] : mass) best = std::max(best, static_cast<double>(m) * scale);
  }
  return best;
}

// ---------------------------------------------------------------------------
// Slope density

std::vector<double> SlopeDensityField::center(std::size_t cell) const {
  const auto axes = static_cast<std::size_t>(dimension - 1);
  std::vector<double> t(axes);
  for (std::size_t k = axes; k-- > 0;) {
    t[k] = 0.5 + (static_cast<double>(cell % cells_per_axis) + 0.5) * pitch;
    cell /= cells_per_axis;
  }
  return t;
}

namespace {

struct GridSpec {
  double epsilon;
  double pitch;
  std::size_t n;  // cells per axis
};

GridSpec make_grid(double epsilon, double pitch) {
  if (!(epsilon > 0.0)) fail(ErrorCode::InvalidArgument, "epsilon must be positive");
  if (!(pitch > 0.0) || pitch > epsilon) fail(ErrorCode::InvalidArgument, "grid pitch must lie in (0, epsilon]");
  const double cells = 0.5 / pitch;
  const double rounded = std::round(cells);
  if (std::abs(cells - rounded) > 1e-9 * rounded) {
    fail(ErrorCode::InvalidArgument, "1/(2 pitch) must be an integer");
  }
  return {epsilon, pitch, static_cast<std::size_t>(rounded)};
}

inline double cell_center(std::size_t i, double pitch) { return 0.5 + (static_cast<double>(i) + 0.5) * pitch; }

inline bool in_window(double slope, double t, double eps) { return t - eps <= slope && slope <= t + eps; }

double window_overlap(double slope, double eps) {
  return std::max(0.0, std::min(slope + eps, 1.0) - std::max(slope - eps, 0.5));
}

// Candidate cell range [lo, hi] for one slope coordinate, widened by one cell
// on each side; callers re-check with in_window.
inline bool candidate_range(double slope, const GridSpec& g, std::int64_t& lo, std::int64_t& hi) {
  const double top = static_cast<double>(g.n);
  double a = std::floor((slope - g.epsilon - 0.5) / g.pitch - 0.5) - 1.0;
  double b = std::floor((slope + g.epsilon - 0.5) / g.pitch - 0.5) + 1.0;
  if (!(b >= 0.0) || !(a <= top)) return false;
  a = std::max(a, 0.0);
  b = std::min(b, top - 1.0);
  lo = static_cast<std::int64_t>(a);
  hi = static_cast<std::int64_t>(b);
  return lo <= hi;
}

// One coordinate of a product measure: sorted atom values with weights.
struct Factor {
  std::vector<double> values;
  std::vector<double> weights;
};

// Detects a support that is a full Cartesian grid carrying a product measure.
std::optional<std::vector<Factor>> product_factors(const WeightedPointSet& mu) {
  const std::size_t n = mu.size();
  const auto d = static_cast<std::size_t>(mu.dimension());
  const auto& x = mu.base().doubles();
  const auto& m = mu.masses();
  std::vector<Factor> factors(d);
  std::vector<std::vector<std::size_t>> index(d, std::vector<std::size_t>(n));
  std::size_t grid = 1;
  for (std::size_t k = 0; k < d; ++k) {
    std::vector<double> vals(n);
    for (std::size_t i = 0; i < n; ++i) vals[i] = x[i * d + k];
    std::sort(vals.begin(), vals.end());
    vals.erase(std::unique(vals.begin(), vals.end()), vals.end());
    if (grid > n / vals.size() + 1) return std::nullopt;
    grid *= vals.size();
    factors[k].values = vals;
    factors[k].weights.assign(vals.size(), 0.0);
    std::vector<long double> marginal(vals.size(), 0.0L);
    for (std::size_t i = 0; i < n; ++i) {
      const auto pos = static_cast<std::size_t>(
          std::lower_bound(vals.begin(), vals.end(), x[i * d + k]) - vals.begin());
      index[k][i] = pos;
      marginal[pos] += m[i];
    }
    for (std::size_t v = 0; v < vals.size(); ++v) factors[k].weights[v] = static_cast<double>(marginal[v]);
  }
  if (grid != n) return std::nullopt;
  for (std::size_t i = 0; i < n; ++i) {
    double predicted = 1.0;
    for (std::size_t k = 0; k < d; ++k) predicted *= factors[k].weights[index[k][i]];
    if (std::abs(predicted - m[i]) > 1e-12 * std::max(m[i], predicted) + 1e-300) return std::nullopt;
  }
  return factors;
}

// Distribution of a - b for a ~ f1, b ~ f2, merged on equal values, with
// prefix sums of the weights and of weight * value.
struct DiffAxis {
  std::vector<double> values;
  std::vector<double> weights;
  std::vector<double> prefix;        // prefix[i] = sum of weights[0..i)
  std::vector<double> prefix_moment; // sum of weights * values

  double weight(std::size_t lo, std::size_t hi) const { return prefix[hi] - prefix[lo]; }
  double moment(std::size_t lo, std::size_t hi) const { return prefix_moment[hi] - prefix_moment[lo]; }

  // Index range of values v with lo_bound <= v / denom <= hi_bound.
  std::pair<std::size_t, std::size_t> slope_range(double denom, double lo_bound, double hi_bound) const {
    auto first = values.begin();
    auto last = values.end();
    if (denom > 0) {
      auto a = std::partition_point(first, last, [&](double v) { return !(v / denom >= lo_bound); });
      auto b = std::partition_point(a, last, [&](double v) { return v / denom <= hi_bound; });
      return {static_cast<std::size_t>(a - first), static_cast<std::size_t>(b - first)};
    }
    auto a = std::partition_point(first, last, [&](double v) { return !(v / denom <= hi_bound); });
    auto b = std::partition_point(a, last, [&](double v) { return v / denom >= lo_bound; });
    return {static_cast<std::size_t>(a - first), static_cast<std::size_t>(b - first)};
  }
};

DiffAxis difference_axis(const Factor& f1, const Factor& f2) {
  std::vector<std::pair<double, double>> raw;
  raw.reserve(f1.values.size() * f2.values.size());
  for (std::size_t a = 0; a < f1.values.size(); ++a) {
    for (std::size_t b = 0; b < f2.values.size(); ++b) {
      raw.emplace_back(f1.values[a] - f2.values[b], f1.weights[a] * f2.weights[b]);
    }
  }
  std::sort(raw.begin(), raw.end());
  DiffAxis axis;
  for (const auto& [v, w] : raw) {
    if (!axis.values.empty() && axis.values.back() == v) {
      axis.weights.back() += w;
    } else {
      axis.values.push_back(v);
      axis.weights.push_back(w);
    }
  }
  axis.prefix.assign(axis.values.size() + 1, 0.0);
  axis.prefix_moment.assign(axis.values.size() + 1, 0.0);
  for (std::size_t i = 0; i < axis.values.size(); ++i) {
    axis.prefix[i + 1] = axis.prefix[i] + axis.weights[i];
    axis.prefix_moment[i + 1] = axis.prefix_moment[i] + axis.weights[i] * axis.values[i];
  }
  return axis;
}

// Pairs of (mu1, mu2), either listed atom by atom or through per-axis
// difference distributions of a product measure.
class PairSource {
 public:
  PairSource(const WeightedPointSet& mu1, const WeightedPointSet& mu2) : mu1_(mu1), mu2_(mu2) {
    if (mu1.dimension() != mu2.dimension()) fail(ErrorCode::ModeMismatch, "measures live in different dimensions");
    d_ = static_cast<std::size_t>(mu1.dimension());
    constexpr double kDirectPairs = 4.0 * 1024 * 1024;
    if (static_cast<double>(mu1.size()) * static_cast<double>(mu2.size()) > kDirectPairs) {
      auto f1 = product_factors(mu1);
      auto f2 = f1 ? product_factors(mu2) : std::nullopt;
      if (f1 && f2) {
        for (std::size_t k = 0; k < d_; ++k) axes_.push_back(difference_axis((*f1)[k], (*f2)[k]));
        product_ = true;
        for (double v : axes_.back().values) {
          if (v == 0.0) vertical();
        }
        return;
      }
    }
    const auto& a = mu1.base().doubles();
    const auto& b = mu2.base().doubles();
    for (std::size_t i = 0; i < mu1.size(); ++i) {
      for (std::size_t j = 0; j < mu2.size(); ++j) {
        if (a[i * d_ + d_ - 1] == b[j * d_ + d_ - 1]) vertical();
      }
    }
  }

  bool product() const noexcept { return product_; }

  SlopeDensityField field(const GridSpec& g, unsigned threads) const {
    SlopeDensityField out;
    out.dimension = static_cast<int>(d_);
    out.epsilon = g.epsilon;
    out.pitch = g.pitch;
    out.cells_per_axis = g.n;
    out.product_path = product_;
    const std::size_t axes = d_ - 1;
    std::size_t cells = 1;
    for (std::size_t k = 0; k < axes; ++k) {
      if (cells > (std::size_t{1} << 28) / g.n) fail(ErrorCode::SizeLimit, "slope grid too fine");
      cells *= g.n;
    }
    out.values.assign(cells, 0.0);
    const std::size_t inner = cells / g.n;  // cells per first-axis slab
    const std::size_t blocks = std::min<std::size_t>(g.n, std::max(1u, threads));
    parallel_blocks(blocks, threads, [&](std::size_t b) {
      const std::size_t lo = b * g.n / blocks;
      const std::size_t hi = (b + 1) * g.n / blocks;
      if (product_) {
        product_slab(g, lo, hi, inner, out.values);
      } else {
        direct_slab(g, lo, hi, inner, out.values);
      }
    });
    const double norm = std::pow(g.epsilon, -static_cast<double>(axes));
    double integral = 0.0;
    for (double& v : out.values) {
      v *= norm;
      integral += v;
    }
    out.integral = integral * std::pow(g.pitch, static_cast<double>(axes));
    out.overlap_integral = overlap_integral(g.epsilon) * norm;
    return out;
  }

  // Pair mass with every slope coordinate in [lo, hi].
  double box_mass(double lo, double hi) const {
    if (product_) {
      const DiffAxis& den = axes_.back();
      double total = 0.0;
      for (std::size_t r = 0; r < den.values.size(); ++r) {
        double w = den.weights[r];
        for (std::size_t k = 0; k + 1 < d_ && w != 0.0; ++k) {
          auto [a, b] = axes_[k].slope_range(den.values[r], lo, hi);
          w *= axes_[k].weight(a, b);
        }
        total += w;
      }
      return total;
    }
    double total = 0.0;
    for_each_pair([&](const double* slope, double w) {
      for (std::size_t k = 0; k + 1 < d_; ++k) {
        if (!(lo <= slope[k] && slope[k] <= hi)) return;
      }
      total += w;
    });
    return total;
  }

 private:
  [[noreturn]] static void vertical() {
    fail(ErrorCode::PreconditionFailed, "a pair has equal last coordinates (c2 = 0)");
  }

  template <class Fn>
  void for_each_pair(Fn&& fn) const {
    const auto& a = mu1_.base().doubles();
    const auto& b = mu2_.base().doubles();
    const auto& m1 = mu1_.masses();
    const auto& m2 = mu2_.masses();
    std::vector<double> slope(d_);
    for (std::size_t i = 0; i < mu1_.size(); ++i) {
      const double* x = &a[i * d_];
      for (std::size_t j = 0; j < mu2_.size(); ++j) {
        const double* y = &b[j * d_];
        const double den = x[d_ - 1] - y[d_ - 1];
        for (std::size_t k = 0; k + 1 < d_; ++k) slope[k] = (x[k] - y[k]) / den;
        fn(slope.data(), m1[i] * m2[j]);
      }
    }
  }

  void direct_slab(const GridSpec& g, std::size_t first_lo, std::size_t first_hi, std::size_t inner,
                   std::vector<double>& values) const {
    const std::size_t axes = d_ - 1;
    std::vector<std::vector<std::size_t>> hits(axes);
    std::vector<std::size_t> odometer(axes);
    for_each_pair([&](const double* slope, double w) {
      for (std::size_t k = 0; k < axes; ++k) {
        hits[k].clear();
        std::int64_t lo, hi;
        if (!candidate_range(slope[k], g, lo, hi)) return;
        if (k == 0) {
          lo = std::max<std::int64_t>(lo, static_cast<std::int64_t>(first_lo));
          hi = std::min<std::int64_t>(hi, static_cast<std::int64_t>(first_hi) - 1);
        }
        for (std::int64_t i = lo; i <= hi; ++i) {
          if (in_window(slope[k], cell_center(static_cast<std::size_t>(i), g.pitch), g.epsilon)) {
            hits[k].push_back(static_cast<std::size_t>(i));
          }
        }
        if (hits[k].empty()) return;
      }
      std::fill(odometer.begin(), odometer.end(), 0);
      while (true) {
        std::size_t cell = 0;
        for (std::size_t k = 0; k < axes; ++k) cell = cell * g.n + hits[k][odometer[k]];
        values[cell] += w;
        std::size_t k = axes;
        while (k > 0) {
          --k;
          if (++odometer[k] < hits[k].size()) break;
          odometer[k] = 0;
          if (k == 0) return;
        }
        if (axes == 0) return;
      }
    });
    (void)inner;
  }

  void product_slab(const GridSpec& g, std::size_t first_lo, std::size_t first_hi, std::size_t inner,
                    std::vector<double>& values) const {
    const std::size_t axes = d_ - 1;
    const DiffAxis& den = axes_.back();
    std::vector<std::vector<double>> window(axes, std::vector<double>(g.n, 0.0));
    for (std::size_t r = 0; r < den.values.size(); ++r) {
      const double dv = den.values[r];
      for (std::size_t k = 0; k < axes; ++k) {
        const std::size_t lo = k == 0 ? first_lo : 0;
        const std::size_t hi = k == 0 ? first_hi : g.n;
        for (std::size_t i = lo; i < hi; ++i) {
          const double t = cell_center(i, g.pitch);
          auto [a, b] = axes_[k].slope_range(dv, t - g.epsilon, t + g.epsilon);
          window[k][i] = axes_[k].weight(a, b);
        }
      }
      const double w = den.weights[r];
      for (std::size_t i0 = first_lo; i0 < first_hi; ++i0) {
        const double head = w * window[0][i0];
        if (head == 0.0) continue;
        double* slab = &values[i0 * inner];
        if (axes == 1) {
          slab[0] += head;
          continue;
        }
        // Remaining axes: accumulate the outer product into the slab.
        for (std::size_t cell = 0; cell < inner; ++cell) {
          double v = head;
          std::size_t rest = cell;
          for (std::size_t k = axes; k-- > 1;) {
            v *= window[k][rest % g.n];
            rest /= g.n;
          }
          slab[cell] += v;
        }
      }
    }
  }

  double overlap_integral(double eps) const {
    if (!product_) {
      double total = 0.0;
      for_each_pair([&](const double* slope, double w) {
        double v = w;
        for (std::size_t k = 0; k + 1 < d_ && v != 0.0; ++k) v *= window_overlap(slope[k], eps);
        total += v;
      });
      return total;
    }
    // The overlap is piecewise affine in the slope between these breakpoints.
    std::vector<double> br{0.5 - eps, 0.5 + eps, 1.0 - eps, 1.0 + eps};
    std::sort(br.begin(), br.end());
    const DiffAxis& den = axes_.back();
    double total = 0.0;
    for (std::size_t r = 0; r < den.values.size(); ++r) {
      const double dv = den.values[r];
      double w = den.weights[r];
      for (std::size_t k = 0; k + 1 < d_ && w != 0.0; ++k) {
        double acc = 0.0;
        for (std::size_t p = 0; p + 1 < br.size(); ++p) {
          const double u0 = br[p], u1 = br[p + 1];
          if (!(u1 > u0)) continue;
          const double f0 = window_overlap(u0, eps), f1 = window_overlap(u1, eps);
          const double slope = (f1 - f0) / (u1 - u0);
          auto [a, b] = axes_[k].slope_range(dv, u0, u1);
          acc += (f0 - slope * u0) * axes_[k].weight(a, b) + slope * axes_[k].moment(a, b) / dv;
        }
        w *= acc;
      }
      total += w;
    }
    return total;
  }

  const WeightedPointSet& mu1_;
  const WeightedPointSet& mu2_;
  std::size_t d_ = 0;
  bool product_ = false;
  std::vector<DiffAxis> axes_;
};

}  // namespace

std::vector<SlopeDensityField> nu_eps(const WeightedPointSet& mu1, const WeightedPointSet& mu2,
                                      std::span<const double> epsilons,
                                      std::span<const double> pitches, unsigned threads) {
  if (epsilons.size() != pitches.size()) fail(ErrorCode::InvalidArgument, "one pitch per epsilon is required");
  std::vector<GridSpec> grids;
  for (std::size_t i = 0; i < epsilons.size(); ++i) grids.push_back(make_grid(epsilons[i], pitches[i]));
  PairSource source(mu1, mu2);
  std::vector<SlopeDensityField> out;
  for (const auto& g : grids) out.push_back(source.field(g, threads));
  return out;
}

SlopeDensityField nu_eps(const WeightedPointSet& mu1, const WeightedPointSet& mu2, double epsilon,
                         double pitch, unsigned threads) {
  const double e[] = {epsilon};
  const double p[] = {pitch};
  return std::move(nu_eps(mu1, mu2, e, p, threads).front());
}

double chart_pair_mass(const WeightedPointSet& mu1, const WeightedPointSet& mu2) {
  return PairSource(mu1, mu2).box_mass(0.5, 1.0);
}

namespace {

WeightedPointSet relabeled(const WeightedPointSet& mu, const std::vector<int>& order,
                           const std::vector<int>& signs) {
  const auto d = static_cast<std::size_t>(mu.dimension());
  const auto& x = mu.base().doubles();
  std::vector<double> coords(x.size());
  for (std::size_t i = 0; i < mu.size(); ++i) {
    for (std::size_t k = 0; k < d; ++k) {
      const double sign = k + 1 < d ? signs[k] : 1.0;
      coords[i * d + k] = sign * x[i * d + static_cast<std::size_t>(order[k])];
    }
  }
  return WeightedPointSet(PointSet::floating(mu.dimension(), std::move(coords)), mu.masses(),
                          mu.thickening_radius());
}

}  // namespace

NuBoundsReport nu_integral_bounds(const WeightedPointSet& mu, double s, std::span<const double> epsilons,
                                  std::optional<double> c, int max_depth, unsigned threads) {
  if (epsilons.empty()) fail(ErrorCode::InvalidArgument, "epsilon list is empty");
  const int d = mu.dimension();
  NuBoundsReport report;
  report.predicted_exponent = s - (d - 1);
  report.split = stopping_time_split(mu, c, max_depth);

  const int sep = report.split.sep_coordinate;
  for (int k = 0; k < d; ++k) {
    if (k != sep) report.axis_order.push_back(k);
  }
  report.axis_order.push_back(sep);

  // Orientation: the sign pattern with the largest in-chart pair mass.
  const std::size_t patterns = std::size_t{1} << (d - 1);
  double best_mass = -1.0;
  for (std::size_t mask = 0; mask < patterns; ++mask) {
    std::vector<int> signs(static_cast<std::size_t>(d - 1));
    for (int k = 0; k < d - 1; ++k) signs[static_cast<std::size_t>(k)] = (mask >> k) & 1 ? -1 : 1;
    const double mass = chart_pair_mass(relabeled(report.split.e1, report.axis_order, signs),
                                        relabeled(report.split.e2, report.axis_order, signs));
    if (mass > best_mass) {
      best_mass = mass;
      report.signs = signs;
    }
  }
  report.chart_mass = best_mass;
  if (!(best_mass > 0.0)) fail(ErrorCode::PreconditionFailed, "no pair slope falls in the chart");

  const auto e1 = relabeled(report.split.e1, report.axis_order, report.signs);
  const auto e2 = relabeled(report.split.e2, report.axis_order, report.signs);
  report.epsilons.assign(epsilons.begin(), epsilons.end());
  for (double eps : report.epsilons) {
    if (!(eps > 0.0)) fail(ErrorCode::InvalidArgument, "epsilon must be positive");
    report.pitches.push_back(0.5 / std::ceil(1.0 / eps - 1e-9));
  }
  const auto fields = nu_eps(e1, e2, report.epsilons, report.pitches, threads);
  const double scale = std::ldexp(best_mass, d - 1);
  for (const auto& f : fields) {
    report.integrals.push_back(f.integral);
    report.normalized.push_back(f.integral / scale);
    report.overlap_normalized.push_back(f.overlap_integral / scale);
  }

  const auto finest = static_cast<std::size_t>(
      std::min_element(report.epsilons.begin(), report.epsilons.end()) - report.epsilons.begin());
  report.limit = report.normalized[finest];
  if (report.epsilons.size() >= 2) {
    std::vector<double> xs, ys;
    double band = 0.0;
    for (std::size_t i = 0; i < report.epsilons.size(); ++i) {
      if (i == finest) continue;
      xs.push_back(report.epsilons[i]);
      ys.push_back(std::abs(report.normalized[i] - report.limit));
      band = std::max(band, std::abs(report.normalized[i] / report.limit - 1.0) /
                                std::pow(report.epsilons[i], report.predicted_exponent));
    }
    report.band_constant = band;
    report.deviation_fit = fit_loglog(xs, ys);
  }
  return report;
}

}  // namespace dirlab
