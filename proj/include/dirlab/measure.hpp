#pragma once

// Discrete measures on finite point sets: Frostman-type uniform measures,
// Riesz energies, the quarter-cube stopping-time split, dyadic Frostman
// constants and the slope density nu_eps with its integral.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "dirlab/fit.hpp"
#include "dirlab/geometry.hpp"

namespace dirlab {

class WeightedPointSet {
 public:
  WeightedPointSet() = default;
  // Masses must be nonnegative and sum to 1 within 1e-12.
  WeightedPointSet(PointSet base, std::vector<double> masses,
                   std::optional<double> thickening_radius = std::nullopt);
  // Rational masses must sum to exactly 1.
  WeightedPointSet(PointSet base, std::vector<Rational> masses,
                   std::optional<double> thickening_radius = std::nullopt);

  // Mass 1/n on every point, exact.
  static WeightedPointSet uniform(PointSet base,
                                  std::optional<double> thickening_radius = std::nullopt);

  const PointSet& base() const noexcept { return base_; }
  int dimension() const noexcept { return base_.dimension(); }
  std::size_t size() const noexcept { return base_.size(); }
  const std::vector<double>& masses() const noexcept { return masses_; }
  bool has_exact_masses() const noexcept { return exact_masses_.has_value(); }
  const std::vector<Rational>& exact_masses() const;
  std::optional<double> thickening_radius() const noexcept { return radius_; }

 private:
  PointSet base_;
  std::vector<double> masses_;
  std::optional<std::vector<Rational>> exact_masses_;
  std::optional<double> radius_;
};

// Closest pair, found by a sweep along the first coordinate. Needs n >= 2.
struct ClosestPair {
  std::size_t i = 0;
  std::size_t j = 0;
  double distance = 0.0;
};
ClosestPair closest_pair(const PointSet& points);

// Uniform masses with thickening radius n^{-1/s}. Throws NotSeparated.
WeightedPointSet discrete_frostman(const PointSet& points, double s);

// sum_{i != j} m_i m_j |p_i - p_j|^{-s}. Rows are summed in fixed blocks and
// the block partials are added in order, so the value does not depend on
// `threads`.
double energy_integral(const WeightedPointSet& mu, double s, unsigned threads = 1);

// Exact energy for exact points and masses when s is a positive even integer.
Rational energy_integral_exact(const WeightedPointSet& mu, int s);

// 4d (1 + 1/(s - (d-1))); requires s > d - 1.
double default_adaptability_constant(int d, double s);

struct AdaptabilityReport {
  std::size_t n = 0;
  double s = 0.0;
  double radius = 0.0;
  double min_distance = 0.0;
  bool separated = false;
  double energy = 0.0;
  double constant = 0.0;
  bool pass = false;
};

// `constant` defaults to default_adaptability_constant.
AdaptabilityReport is_adaptable(const PointSet& points, double s,
                                std::optional<double> constant = std::nullopt,
                                unsigned threads = 1);

// 2^{-(2d+1)}.
double default_split_threshold(int d);

struct CubeSplit {
  // Restrictions to the two chosen cubes, renormalized to total mass 1.
  WeightedPointSet e1;
  WeightedPointSet e2;
  // Indices of the restricted atoms in the input support.
  std::vector<std::size_t> e1_atoms;
  std::vector<std::size_t> e2_atoms;
  int level = 0;                  // level of the chosen cubes (side 4^{-level})
  int sep_coordinate = 0;
  double sep_distance = 0.0;      // quarter of the parent cube side
  double mass1 = 0.0;             // mu(E1), unnormalized
  double mass2 = 0.0;
  double parent_mass = 0.0;       // mu(Q) of the parent cube
  double threshold = 0.0;         // c
  std::optional<Rational> exact_mass1;
  std::optional<Rational> exact_mass2;
  std::optional<Rational> exact_parent_mass;
  std::vector<std::int64_t> cube1;  // integer corner of E1's cube at `level`
  std::vector<std::int64_t> cube2;
};

// Quarter-cube recursion from [0,1]^d. At each cube, picks the pair of
// non-touching children (index gap >= 2 in some coordinate) with both masses
// >= c mu(Q) and the largest smaller mass; ties go to the pair gapped in more
// coordinates, then to the first pair in lexicographic order. Otherwise it descends into the heaviest child. Throws
// DepthExhausted when no split is found by level max_depth,
// PreconditionFailed for support outside [0,1]^d.
CubeSplit stopping_time_split(const WeightedPointSet& mu, std::optional<double> c = std::nullopt,
                              int max_depth = 8);

// max over dyadic cubes Q of side 2^{-j}, 0 <= j <= depth, of mu(Q)/side^s.
double frostman_constant(const WeightedPointSet& mu, double s, int depth);

struct SlopeDensityField {
  int dimension = 0;        // ambient d; the grid has d-1 axes
  double epsilon = 0.0;
  double pitch = 0.0;
  std::size_t cells_per_axis = 0;
  // Row-major over the d-1 axes; cell i has center 1/2 + (i + 1/2) pitch.
  std::vector<double> values;
  double integral = 0.0;          // sum of values * pitch^{d-1}
  double overlap_integral = 0.0;  // exact integral of nu_eps over [1/2,1]^{d-1}
  bool product_path = false;

  std::vector<double> center(std::size_t cell) const;
};

// nu_eps(t) = eps^{-(d-1)} sum of m1(x) m2(y) over pairs with
// t_i - eps <= (x_i - y_i)/(x_d - y_d) <= t_i + eps for every i < d.
// pitch <= eps and 1/(2 pitch) must be an integer. Throws PreconditionFailed
// when some pair has x_d == y_d.
SlopeDensityField nu_eps(const WeightedPointSet& mu1, const WeightedPointSet& mu2, double epsilon,
                         double pitch, unsigned threads = 1);
// One field per (epsilon, pitch) pair, sharing the pair preprocessing.
std::vector<SlopeDensityField> nu_eps(const WeightedPointSet& mu1, const WeightedPointSet& mu2,
                                      std::span<const double> epsilons,
                                      std::span<const double> pitches, unsigned threads = 1);

// Mass of pairs whose slope vector lies in [1/2,1]^{d-1}.
double chart_pair_mass(const WeightedPointSet& mu1, const WeightedPointSet& mu2);

struct NuBoundsReport {
  CubeSplit split;
  std::vector<int> axis_order;   // coordinates of the relabeled sets; last is the separation axis
  std::vector<int> signs;        // sign applied to each relabeled non-separation coordinate
  double chart_mass = 0.0;       // in-chart pair mass of the normalized restrictions
  double predicted_exponent = 0.0;  // s - (d-1)
  std::vector<double> epsilons;
  std::vector<double> pitches;
  std::vector<double> integrals;             // midpoint sums
  std::vector<double> normalized;            // integrals / (2^{d-1} chart_mass)
  std::vector<double> overlap_normalized;    // same with the exact overlap integral
  double limit = 0.0;                        // normalized value at the finest eps
  std::optional<LinearFit> deviation_fit;    // log|I - L| against log eps
  std::optional<double> band_constant;       // max |I/L - 1| / eps^{s-(d-1)}
};

// Splits mu, relabels so the separation axis comes last, picks the sign
// pattern that maximizes the in-chart pair mass and evaluates nu_eps at each
// epsilon with pitch epsilon/2.
NuBoundsReport nu_integral_bounds(const WeightedPointSet& mu, double s,
                                  std::span<const double> epsilons,
                                  std::optional<double> c = std::nullopt, int max_depth = 8,
                                  unsigned threads = 1);

}  // namespace dirlab
