#pragma once

// Finite configurations: lattice grids, self-similar attractor approximants
// (Garnett four-corner set, product Cantor sets), hyperplane samples and
// samples of a curved graph. All outputs lie in [0,1]^d, are exact, and are
// returned in lexicographic order.

#include <cstddef>
#include <optional>
#include <vector>

#include "dirlab/geometry.hpp"

namespace dirlab {

inline constexpr std::size_t kDefaultPointCap = 1'000'000;

// x -> ratio * x + offset
struct SimilarityMap {
  Rational ratio;
  std::vector<Rational> offset;
};

class IfsSystem {
 public:
  // Validates that every map sends [0,1]^d into itself.
  IfsSystem(int dimension, std::vector<SimilarityMap> maps);

  // Four maps of ratio 1/4 anchored at the corners of the unit square.
  static IfsSystem garnett();

  int dimension() const noexcept { return dimension_; }
  const std::vector<SimilarityMap>& maps() const noexcept { return maps_; }

  // log(m) / log(1/r) when every map has the same ratio r.
  std::optional<double> similarity_dimension() const;

 private:
  int dimension_;
  std::vector<SimilarityMap> maps_;
};

struct LatticeSpec {
  int q = 1;
  int d = 2;
  double s = 2.0;  // target dimension; sets the thickening radius q^{-d/s}

  void validate() const;
  double radius() const;
};

// The (q+1)^d points q^{-1}(Z^d ∩ [0,q]^d).
PointSet lattice_set(const LatticeSpec& spec);

// Images of the origin under all depth-fold compositions of the maps.
// Throws SizeLimit when m^depth exceeds `cap`.
PointSet ifs_approximant(const IfsSystem& system, int depth, std::size_t cap = kDefaultPointCap);

// Largest uniform (d-1)-dimensional grid with at most n points on x_d = 1/2.
PointSet hyperplane_sample(int d, std::size_t n);

// Grid samples of the graph x_d = sum_{i<d} x_i^2 / 4 over [0,1]^{d-1}. The
// per-axis counts are the largest near-uniform grid with at most n points.
PointSet lipschitz_graph_sample(int d, std::size_t n);

// One-dimensional middle-gap Cantor family: `copies` maps of ratio 1/base at
// evenly spaced offsets from 0 to 1 - 1/base. The d-fold product has
// similarity dimension d * log(copies) / log(base).
struct CantorPreset {
  int copies = 2;
  int base = 2;

  double dimension(int d) const;
  std::vector<Rational> offsets() const;
};

// Smallest base (then closest copy count) whose product dimension is within
// `tolerance` of s. Throws PreconditionFailed unless d - 1 < s <= d.
CantorPreset cantor_preset_for(int d, double s, double tolerance = 1e-3);

PointSet product_cantor(int d, const CantorPreset& preset, int depth,
                        std::size_t cap = kDefaultPointCap);
PointSet product_cantor(int d, double s, int depth, std::size_t cap = kDefaultPointCap);

// Depth-`depth` approximant of the one-dimensional factor, sorted.
std::vector<Rational> cantor_factor(const CantorPreset& preset, int depth);

}  // namespace dirlab
