#include "pair_kernels.hpp"

#include <algorithm>
#include <numeric>
#include <unordered_map>

namespace dirlab::detail {

namespace {

constexpr std::uint64_t kDenseLimit = std::uint64_t{1} << 25;

struct VecHash {
  std::size_t operator()(const std::array<std::int64_t, kMaxFastDim>& v) const noexcept {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (auto c : v) {
      h ^= static_cast<std::uint64_t>(c);
      h *= 0x100000001b3ULL;
      h ^= h >> 29;
    }
    return static_cast<std::size_t>(h);
  }
};

}  // namespace

std::optional<DifferenceHistogram> difference_histogram(const PointSet& points) {
  const auto& lattice = points.lattice();
  const auto d = static_cast<std::size_t>(points.dimension());
  if (!lattice || d > kMaxFastDim) return std::nullopt;
  const std::size_t n = points.size();
  const auto& num = lattice->numerators;

  DifferenceHistogram out;
  out.dimension = points.dimension();

  // Dense table over the box of possible differences.
  std::vector<std::uint64_t> stride(d);
  std::vector<std::int64_t> width(d);
  std::uint64_t cells = 1;
  bool dense = n < 92682;  // pair counts fit in 32 bits
  for (std::size_t k = d; k-- > 0;) {
    width[k] = lattice->hi[k] - lattice->lo[k];
    stride[k] = cells;
    const auto span = static_cast<std::uint64_t>(2 * width[k] + 1);
    if (cells > kDenseLimit / span) {
      dense = false;
      break;
    }
    cells *= span;
  }

  std::int64_t diff[kMaxFastDim];
  if (dense) {
    std::vector<std::uint32_t> table(cells, 0);
    for (std::size_t i = 0; i < n; ++i) {
      const std::int64_t* a = num.data() + i * d;
      for (std::size_t j = i + 1; j < n; ++j) {
        const std::int64_t* b = num.data() + j * d;
        for (std::size_t k = 0; k < d; ++k) diff[k] = b[k] - a[k];
        if (leading_negative(diff, d)) {
          for (std::size_t k = 0; k < d; ++k) diff[k] = -diff[k];
        }
        std::uint64_t index = 0;
        for (std::size_t k = 0; k < d; ++k) {
          index += static_cast<std::uint64_t>(diff[k] + width[k]) * stride[k];
        }
        ++table[index];
      }
    }
    // Table order is lexicographic in the differences.
    for (std::uint64_t index = 0; index < cells; ++index) {
      if (table[index] == 0) continue;
      std::uint64_t rest = index;
      for (std::size_t k = 0; k < d; ++k) {
        out.diffs.push_back(static_cast<std::int64_t>(rest / stride[k]) - width[k]);
        rest %= stride[k];
      }
      out.counts.push_back(table[index]);
    }
    return out;
  }

  std::unordered_map<std::array<std::int64_t, kMaxFastDim>, std::uint64_t, VecHash> table;
  std::array<std::int64_t, kMaxFastDim> key{};
  for (std::size_t i = 0; i < n; ++i) {
    const std::int64_t* a = num.data() + i * d;
    for (std::size_t j = i + 1; j < n; ++j) {
      const std::int64_t* b = num.data() + j * d;
      for (std::size_t k = 0; k < d; ++k) key[k] = b[k] - a[k];
      if (leading_negative(key.data(), d)) {
        for (std::size_t k = 0; k < d; ++k) key[k] = -key[k];
      }
      ++table[key];
    }
  }
  std::vector<std::pair<std::array<std::int64_t, kMaxFastDim>, std::uint64_t>> entries(table.begin(),
                                                                                      table.end());
  std::sort(entries.begin(), entries.end());
  for (const auto& [v, c] : entries) {
    out.diffs.insert(out.diffs.end(), v.begin(), v.begin() + static_cast<std::ptrdiff_t>(d));
    out.counts.push_back(c);
  }
  return out;
}

}  // namespace dirlab::detail
