#pragma once

// Brute-force oracles. Each one is written directly from the definition and
// shares no kernel code with the library, so agreement is meaningful.

#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include "dirlab/geometry.hpp"
#include "dirlab/measure.hpp"

namespace dirlab::reference {

// Canonical strings of all pair directions: reduced integer vectors for exact
// sets, rounded unit vectors (units of `resolution`) for float sets.
std::set<std::string> directions(const PointSet& points, bool antipodal,
                                 double resolution = kDirectionResolution);

// Same string form for a library key.
std::string key_string(const DirectionKey& key);

// #{v in [0,q]^d integer : gcd(v) = 1} by per-point gcd.
std::uint64_t primitive_count(int q, int d);

// sum over ordered pairs i != j of m_i m_j |p_i - p_j|^{-s}.
double energy(const WeightedPointSet& mu, double s);

// Cell-by-cell ν_ε: for each cell, sum m1 m2 over pairs in pair order, then
// multiply by eps^{-(d-1)}.
std::vector<double> nu_eps(const WeightedPointSet& mu1, const WeightedPointSet& mu2, double eps,
                           double pitch);

// Mass of pairs with every slope coordinate in [1/2, 1].
double chart_pair_mass(const WeightedPointSet& mu1, const WeightedPointSet& mu2);

// Smallest Euclidean distance between two of the given unit vectors.
double min_pairwise_distance(const std::vector<std::vector<double>>& units);

// Number of distinct cube-face cells hit by the pair directions, computed
// from unit vectors with the chart written out longhand.
std::size_t occupied_cells(const PointSet& points, double eps, bool antipodal);

}  // namespace dirlab::reference
