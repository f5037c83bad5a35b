#pragma once

// Internal: pair-difference multisets for exact point sets on an integer
// lattice. Direction census and sphere coverage only depend on the multiset
// of differences p_j - p_i, so grids and self-similar sets (many repeated
// differences) are processed once per distinct difference.

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "dirlab/geometry.hpp"

namespace dirlab::detail {

inline constexpr std::size_t kMaxFastDim = 8;

struct DifferenceHistogram {
  int dimension = 0;
  // Distinct differences with their first nonzero entry positive, row-major,
  // in lexicographic order.
  std::vector<std::int64_t> diffs;
  // Number of unordered pairs {i, j} with p_j - p_i = +-diff.
  std::vector<std::uint64_t> counts;

  std::size_t size() const noexcept { return counts.size(); }
};

// nullopt when the set has no integer lattice view or too many coordinates.
std::optional<DifferenceHistogram> difference_histogram(const PointSet& points);

// True when the first nonzero entry is negative.
template <class T>
bool leading_negative(const T* v, std::size_t d) {
  for (std::size_t k = 0; k < d; ++k) {
    if (v[k] != 0) return v[k] < 0;
  }
  return false;
}

}  // namespace dirlab::detail
