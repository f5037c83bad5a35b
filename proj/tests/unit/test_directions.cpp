#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <set>

#include "dirlab/directions.hpp"
#include "dirlab/error.hpp"
#include "dirlab/generators.hpp"
#include "reference/reference.hpp"

using namespace dirlab;

namespace {

PointSet exact_set(int d, std::initializer_list<long> coords) {
  std::vector<Rational> c;
  for (long x : coords) c.emplace_back(x);
  return PointSet::exact(d, c);
}

std::set<std::string> keys_of(const DirectionCensus& c) {
  std::set<std::string> out;
  for (const auto& k : c.keys()) out.insert(reference::key_string(k));
  return out;
}

PointSet random_rational(std::mt19937_64& rng, int d, std::size_t n, long den) {
  std::uniform_int_distribution<long> num(0, den);
  std::set<std::vector<long>> seen;
  std::vector<Rational> c;
  while (seen.size() < n) {
    std::vector<long> row(d);
    for (auto& x : row) x = num(rng);
    if (!seen.insert(row).second) continue;
    for (long x : row) c.emplace_back(x, den);
  }
  for (auto& x : c) x.canonicalize();
  return PointSet::exact(d, c);
}

PointSet random_float(std::mt19937_64& rng, int d, std::size_t n) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> c(d * n);
  for (auto& x : c) x = u(rng);
  return PointSet::floating(d, c);
}

}  // namespace

TEST(Census, SmallExamples) {
  EXPECT_EQ(distinct_directions(exact_set(2, {0, 0, 1, 1, 2, 2}), true).size(), 1u);
  auto sq = distinct_directions(lattice_set({1, 2, 2.0}), true);
  EXPECT_EQ(keys_of(sq), (std::set<std::string>{"(1,0)", "(0,1)", "(1,1)", "(1,-1)"}));
  EXPECT_EQ(distinct_directions(lattice_set({2, 2, 2.0}), true).size(), 8u);
  EXPECT_EQ(sq.n_pairs(), 6u);
  EXPECT_EQ(distinct_directions(lattice_set({1, 2, 2.0}), false).size(), 8u);
}

TEST(Census, GarnettDepthOneHasFourClasses) {
  // Six pairs, but the two pairs on each side of the square share a direction.
  auto c = distinct_directions(ifs_approximant(IfsSystem::garnett(), 1), true);
  EXPECT_EQ(c.size(), 4u);
  EXPECT_EQ(keys_of(c), reference::directions(ifs_approximant(IfsSystem::garnett(), 1), true));
}

TEST(Census, ContainsAndUnit) {
  auto c = distinct_directions(lattice_set({2, 2, 2.0}), true);
  EXPECT_TRUE(c.contains(DirectionKey(std::vector<BigInt>{1, 2}, true)));
  EXPECT_FALSE(c.contains(DirectionKey(std::vector<BigInt>{1, 3}, true)));
  for (std::size_t i = 0; i < c.size(); ++i) {
    auto u = c.unit(i);
    EXPECT_NEAR(std::hypot(u[0], u[1]), 1.0, 1e-15);
  }
}

TEST(Census, NeedsTwoPoints) { EXPECT_THROW(distinct_directions(exact_set(2, {0, 0}), true), Error); }

TEST(Census, ExactOracleEquivalence) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 60; ++trial) {
    const int d = 2 + trial % 3;
    const std::size_t n = 2 + trial % 11;
    auto p = random_rational(rng, d, n, 4 + trial % 9);
    for (bool antipodal : {true, false})
      EXPECT_EQ(keys_of(distinct_directions(p, antipodal)), reference::directions(p, antipodal))
          << "trial " << trial;
  }
}

TEST(Census, WideExactKeysMatchOracle) {
  // Denominators this large push the keys past 64 bits.
  std::vector<Rational> c{Rational(1, 1000003), Rational(2, 999983), Rational(7, 11),
                          Rational(999999, 1000000), Rational(1, 3), Rational(5, 7919)};
  auto p = PointSet::exact(2, c);
  EXPECT_FALSE(p.lattice().has_value());
  EXPECT_EQ(keys_of(distinct_directions(p, true)), reference::directions(p, true));
}

TEST(Census, FloatOracleEquivalence) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    auto p = random_float(rng, 2 + trial % 2, 3 + trial % 10);
    EXPECT_EQ(keys_of(distinct_directions(p, true)), reference::directions(p, true));
  }
}

TEST(Census, LargeLatticeMatchesOracle) {
  auto p = lattice_set({12, 2, 2.0});
  EXPECT_EQ(keys_of(distinct_directions(p, true)), reference::directions(p, true));
}

TEST(PrimitiveCount, Examples) {
  EXPECT_EQ(primitive_count(1, 2), 3u);
  EXPECT_EQ(primitive_count(2, 2), 5u);
  for (int q = 1; q <= 30; ++q) EXPECT_EQ(primitive_count(q, 2), reference::primitive_count(q, 2));
  for (int q = 1; q <= 12; ++q) EXPECT_EQ(primitive_count(q, 3), reference::primitive_count(q, 3));
  EXPECT_EQ(primitive_count(5, 4), reference::primitive_count(5, 4));
}

TEST(PrimitiveCount, DensityNearZetaInverse) {
  const double q = 100;
  const double ratio = primitive_count(100, 2) / (q * q) / (6.0 / (M_PI * M_PI));
  EXPECT_NEAR(ratio, 1.0, 0.02);
}

TEST(Pps, Examples) {
  auto tetra = exact_set(3, {1, 1, 1, 1, -1, -1, -1, 1, -1, -1, -1, 1, 0, 0, 0});
  auto r = pps_check(tetra);
  EXPECT_EQ(r.n, 5u);
  EXPECT_EQ(r.rank, 3);
  EXPECT_EQ(r.threshold, 5);
  EXPECT_GE(r.count, 5u);
  EXPECT_TRUE(r.pass());
  auto six = exact_set(3, {0, 0, 0, 1, 0, 0, 0, 1, 0, 0, 0, 1, 1, 1, 0, 1, 0, 1});
  auto r6 = pps_check(six);
  EXPECT_EQ(r6.threshold, 5);
  EXPECT_TRUE(r6.pass());
  auto flat = exact_set(3, {0, 0, 0, 1, 0, 0, 0, 1, 0, 1, 1, 0});
  EXPECT_EQ(pps_check(flat).status, PpsStatus::NotApplicable);
  EXPECT_THROW(pps_check(exact_set(2, {0, 0, 1, 0, 0, 1})), Error);
}

TEST(Coverage, CollinearOrientedHitsTwoCells) {
  auto p = exact_set(2, {0, 0, 1, 2, 2, 4, 3, 6});
  for (double eps : {0.5, 0.1, 0.01}) {
    auto g = sphere_coverage(p, eps, false);
    EXPECT_EQ(g.occupied_cells(), 2u) << eps;
    EXPECT_EQ(g.total_hits(), 12u);
    EXPECT_EQ(sphere_coverage(p, eps, true).occupied_cells(), 1u);
  }
}

TEST(Coverage, GridIsDense) {
  auto p = lattice_set({49, 2, 2.0});
  EXPECT_GE(sphere_coverage(p, 0.05, true).fraction(), 0.5);
}

TEST(Coverage, ChartGeometry) {
  CubeFaceChart chart(3, 0.1, true);
  EXPECT_EQ(chart.cells_per_axis(), 20u);
  EXPECT_EQ(chart.faces(), 3u);
  EXPECT_EQ(chart.total_cells(), 3u * 400u);
  CubeFaceChart oriented(3, 0.3, false);
  EXPECT_EQ(oriented.cells_per_axis(), 7u);
  EXPECT_EQ(oriented.faces(), 6u);
  double v[3] = {0.0, 0.0, 1.0};
  double w[3] = {0.0, 0.0, -2.0};
  EXPECT_EQ(chart.cell_of(v), chart.cell_of(w));
  EXPECT_NE(oriented.cell_of(v), oriented.cell_of(w));
}

TEST(Coverage, MatchesLonghandChart) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 12; ++trial) {
    const int d = 2 + trial % 3;
    auto p = trial % 2 ? random_float(rng, d, 30) : random_rational(rng, d, 30, 17);
    for (double eps : {0.3, 0.07}) {
      for (bool antipodal : {true, false}) {
        EXPECT_EQ(sphere_coverage(p, eps, antipodal).occupied_cells(),
                  reference::occupied_cells(p, eps, antipodal))
            << trial << " " << eps << " " << antipodal;
      }
    }
  }
}

TEST(Coverage, MultiEpsilonEqualsSingle) {
  auto p = ifs_approximant(IfsSystem::garnett(), 4);
  std::vector<double> eps{0.2, 0.05, 0.01};
  auto many = sphere_coverage(p, eps, true, 2);
  ASSERT_EQ(many.size(), 3u);
  for (std::size_t i = 0; i < eps.size(); ++i) {
    auto one = sphere_coverage(p, eps[i], true);
    EXPECT_EQ(many[i].cells(), one.cells());
    EXPECT_EQ(many[i].total_hits(), one.total_hits());
  }
}

TEST(Coverage, HyperplaneHalvingDoublesCells) {
  auto p = hyperplane_sample(3, 2500);
  auto a = sphere_coverage(p, 0.1, true).occupied_cells();
  auto b = sphere_coverage(p, 0.05, true).occupied_cells();
  EXPECT_NEAR(static_cast<double>(b) / a, 2.0, 0.3);
}

TEST(Coverage, RejectsBadEpsilon) {
  auto p = lattice_set({2, 2, 2.0});
  EXPECT_THROW(sphere_coverage(p, 0.0, true), Error);
  EXPECT_THROW(sphere_coverage(p, 1.5, true), Error);
}

TEST(Separated, SingleKey) {
  auto c = distinct_directions(exact_set(2, {0, 0, 1, 1}), true);
  auto s = separated_subset(c, 0.1);
  ASSERT_EQ(s.keys.size(), 1u);
  EXPECT_EQ(s.keys[0], c.key(0));
}

TEST(Separated, SquareCorners) {
  auto c = distinct_directions(lattice_set({1, 2, 2.0}), true);
  auto s = separated_subset(c, 0.1);
  EXPECT_EQ(s.occupied_cells, 4u);
  EXPECT_EQ(s.colors, 2);
  EXPECT_GE(s.keys.size(), 2u);
  std::vector<std::vector<double>> units;
  for (const auto& k : s.keys) units.push_back(k.unit());
  if (units.size() > 1) EXPECT_GE(reference::min_pairwise_distance(units), 0.1);
}

TEST(Separated, ContractOnRandomCensuses) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 16; ++trial) {
    const int d = 2 + trial % 3;
    auto p = random_rational(rng, d, 40, 29);
    auto c = distinct_directions(p, true);
    for (double delta : {0.3, 0.05, 0.01}) {
      auto s = separated_subset(c, delta);
      const std::size_t colors = std::size_t{1} << (d - 1);
      EXPECT_GE(s.keys.size() * colors, s.occupied_cells);
      std::vector<std::vector<double>> units;
      for (const auto& k : s.keys) {
        EXPECT_TRUE(c.contains(k));
        units.push_back(k.unit());
      }
      if (units.size() > 1) EXPECT_GE(reference::min_pairwise_distance(units), delta);
    }
  }
}

TEST(Separated, CellParityRule) {
  // Two cells whose indices differ but agree in parity are at least delta apart.
  std::mt19937_64 rng(9);
  std::normal_distribution<double> g;
  const double delta = 0.2;
  std::vector<std::pair<std::vector<std::int64_t>, std::vector<double>>> samples;
  for (int i = 0; i < 400; ++i) {
    std::vector<double> u{g(rng), g(rng), g(rng)};
    double n = std::hypot(u[0], u[1], u[2]);
    for (auto& x : u) x /= n;
    samples.emplace_back(separation_cell(u, delta), u);
  }
  for (std::size_t i = 0; i < samples.size(); ++i)
    for (std::size_t j = i + 1; j < samples.size(); ++j) {
      const auto& a = samples[i].first;
      const auto& b = samples[j].first;
      bool same_parity = true;
      for (std::size_t k = 0; k < a.size(); ++k) same_parity &= ((a[k] - b[k]) % 2 == 0);
      if (a == b || !same_parity) continue;
      const auto& u = samples[i].second;
      const auto& v = samples[j].second;
      double dist = std::hypot(u[0] - v[0], u[1] - v[1], u[2] - v[2]);
      EXPECT_GE(dist, delta);
    }
}
