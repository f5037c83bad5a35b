#pragma once

// Distinct-direction census, primitive lattice counting, the
// Pach-Pinchasi-Sharir lower-bound check, sphere coverage on a cube-face chart,
// and extraction of pairwise separated direction subsets.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "dirlab/geometry.hpp"

namespace dirlab {

class DirectionCensus {
 public:
  int dimension() const noexcept { return dimension_; }
  NumberMode mode() const noexcept { return mode_; }
  bool antipodal() const noexcept { return antipodal_; }
  std::size_t n_points() const noexcept { return n_points_; }
  // n(n-1)/2 with antipodal identification, n(n-1) otherwise.
  std::uint64_t n_pairs() const noexcept { return n_pairs_; }

  std::size_t size() const noexcept;
  DirectionKey key(std::size_t i) const;
  std::vector<DirectionKey> keys() const;
  std::vector<double> unit(std::size_t i) const;
  bool contains(const DirectionKey& key) const;

 private:
  friend DirectionCensus distinct_directions(const PointSet&, bool);

  int dimension_ = 0;
  NumberMode mode_ = NumberMode::Exact;
  bool antipodal_ = true;
  std::size_t n_points_ = 0;
  std::uint64_t n_pairs_ = 0;
  // Keys that fit in 64-bit integers (all float-mode keys), row-major and
  // lexicographically sorted; wider exact keys live in `wide_`, sorted.
  std::vector<std::int64_t> narrow_;
  std::vector<DirectionKey> wide_;
};

// Requires |P| >= 2.
DirectionCensus distinct_directions(const PointSet& points, bool antipodal);

// #{v in Z^d ∩ [0,q]^d : gcd(v) = 1} by direct enumeration.
std::uint64_t primitive_count(int q, int d);

enum class PpsStatus { Pass, Fail, NotApplicable };
const char* pps_status_name(PpsStatus status) noexcept;

struct PpsReport {
  std::size_t n = 0;
  int rank = 0;
  std::size_t count = 0;   // antipodal direction classes
  long threshold = 0;      // 2n-5 (n odd), 2n-7 (n even)
  PpsStatus status = PpsStatus::NotApplicable;

  bool pass() const noexcept { return status == PpsStatus::Pass; }
};

// Throws WrongDimension unless d = 3. Sets of affine rank < 3 are reported as
// NotApplicable.
PpsReport pps_check(const PointSet& points);

// Cube-face chart of S^{d-1}: a direction is projected to the face of its
// dominant coordinate and the face [-1,1]^{d-1} is cut into cells of side
// `pitch`. With antipodal identification only the d positive faces are used.
class CubeFaceChart {
 public:
  CubeFaceChart(int dimension, double pitch, bool antipodal);

  int dimension() const noexcept { return dimension_; }
  double pitch() const noexcept { return pitch_; }
  bool antipodal() const noexcept { return antipodal_; }
  std::uint64_t cells_per_axis() const noexcept { return per_axis_; }
  std::uint64_t faces() const noexcept;
  std::uint64_t total_cells() const noexcept { return total_; }

  // Cell of the direction of a nonzero vector (need not be normalized).
  std::uint64_t cell_of(const double* v) const;

 private:
  int dimension_;
  double pitch_;
  bool antipodal_;
  std::uint64_t per_axis_;
  std::uint64_t face_cells_;
  std::uint64_t total_;
};

class CoverageGrid {
 public:
  CoverageGrid(CubeFaceChart chart, std::vector<std::pair<std::uint64_t, std::uint64_t>> cells,
               std::uint64_t total_hits);

  const CubeFaceChart& chart() const noexcept { return chart_; }
  int dimension() const noexcept { return chart_.dimension(); }
  double epsilon() const noexcept { return chart_.pitch(); }
  std::uint64_t total_cells() const noexcept { return chart_.total_cells(); }
  std::size_t occupied_cells() const noexcept { return cells_.size(); }
  std::uint64_t total_hits() const noexcept { return total_hits_; }
  double fraction() const noexcept;

  // (cell index, hit count), sorted by cell index.
  const std::vector<std::pair<std::uint64_t, std::uint64_t>>& cells() const noexcept {
    return cells_;
  }

 private:
  CubeFaceChart chart_;
  std::vector<std::pair<std::uint64_t, std::uint64_t>> cells_;
  std::uint64_t total_hits_;
};

// Bins every pair direction into the chart at pitch epsilon; epsilon in (0,1].
CoverageGrid sphere_coverage(const PointSet& points, double epsilon, bool antipodal,
                             unsigned threads = 1);
// Same pairs, several pitches, one pass over the pairs.
std::vector<CoverageGrid> sphere_coverage(const PointSet& points, std::span<const double> epsilons,
                                          bool antipodal, unsigned threads = 1);

// Hierarchical polar-band chart used for separation: cells are indexed by
// d-1 integers and two cells whose indices share every parity but differ
// somewhere contain points at Euclidean distance >= delta.
std::vector<std::int64_t> separation_cell(std::span<const double> unit, double delta);

struct SeparatedSubset {
  double delta = 0.0;
  std::size_t occupied_cells = 0;
  int colors = 0;
  std::vector<DirectionKey> keys;
};

// One representative per occupied cell, then the largest of the 2^{d-1}
// parity classes. Output is pairwise delta-separated and has at least
// occupied_cells / 2^{d-1} elements. delta in (0, 1].
SeparatedSubset separated_subset(const DirectionCensus& census, double delta);

}  // namespace dirlab
