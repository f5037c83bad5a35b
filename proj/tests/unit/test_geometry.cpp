#include <gtest/gtest.h>

#include <cmath>

#include "dirlab/error.hpp"
#include "dirlab/geometry.hpp"

using namespace dirlab;

namespace {

Point ip(std::initializer_list<long> v) {
  std::vector<Rational> c;
  for (long x : v) c.emplace_back(x);
  return Point(c);
}

std::vector<BigInt> big(std::initializer_list<long> v) {
  std::vector<BigInt> out;
  for (long x : v) out.emplace_back(x);
  return out;
}

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::Internal;
}

PointSet exact_set(int d, std::initializer_list<long> coords) {
  std::vector<Rational> c;
  for (long x : coords) c.emplace_back(x);
  return PointSet::exact(d, c);
}

}  // namespace

TEST(CanonicalDirection, AxisDirection) {
  auto k = canonical_direction(ip({2, 0}), ip({0, 0}), true);
  EXPECT_EQ(k.primitive(), big({1, 0}));
}

TEST(CanonicalDirection, GcdReduction) {
  auto k = canonical_direction(ip({2, 4}), ip({0, 0}), true);
  EXPECT_EQ(k.primitive(), big({1, 2}));
}

TEST(CanonicalDirection, OrientedKeepsSign) {
  auto k = canonical_direction(ip({0, 0, 0}), ip({1, 1, 1}), false);
  EXPECT_EQ(k.primitive(), big({-1, -1, -1}));
  auto a = canonical_direction(ip({0, 0, 0}), ip({1, 1, 1}), true);
  EXPECT_EQ(a.primitive(), big({1, 1, 1}));
}

TEST(CanonicalDirection, AntipodalIsSymmetric) {
  auto a = canonical_direction(ip({3, 1}), ip({1, 5}), true);
  auto b = canonical_direction(ip({1, 5}), ip({3, 1}), true);
  EXPECT_EQ(a, b);
  auto c = canonical_direction(ip({3, 1}), ip({1, 5}), false);
  auto d = canonical_direction(ip({1, 5}), ip({3, 1}), false);
  EXPECT_FALSE(c == d);
}

TEST(CanonicalDirection, RationalCoordinates) {
  Point x(std::vector<Rational>{Rational(1, 3), Rational(1, 2)});
  Point y(std::vector<Rational>{Rational(0), Rational(0)});
  EXPECT_EQ(canonical_direction(x, y, true).primitive(), big({2, 3}));
}

TEST(CanonicalDirection, Errors) {
  EXPECT_EQ(code_of([] { canonical_direction(ip({1, 1}), ip({1, 1}), true); }), ErrorCode::DegeneratePair);
  EXPECT_EQ(code_of([] { canonical_direction(ip({1, 1}), Point(std::vector<double>{0.0, 0.0}), true); }),
            ErrorCode::ModeMismatch);
}

TEST(CanonicalDirection, FloatModeSnapsToResolution) {
  Point x(std::vector<double>{1.0, 1.0});
  Point y(std::vector<double>{0.0, 0.0});
  Point z(std::vector<double>{2.0, 2.0 + 1e-13});
  auto a = canonical_direction(x, y, true);
  auto b = canonical_direction(z, y, true);
  EXPECT_EQ(a.mode(), NumberMode::Float);
  EXPECT_EQ(a, b);
  auto u = a.unit();
  EXPECT_NEAR(u[0], std::sqrt(0.5), 1e-9);
}

TEST(SlopeOfPair, Examples) {
  auto s2 = slope_of_pair(ip({1, 3}), ip({0, 1}));
  ASSERT_EQ(s2.entries.size(), 1u);
  EXPECT_EQ(std::get<Rational>(s2.entries[0]), Rational(1, 2));
  auto s3 = slope_of_pair(ip({2, 3, 5}), ip({0, 1, 1}));
  ASSERT_EQ(s3.entries.size(), 2u);
  EXPECT_EQ(std::get<Rational>(s3.entries[0]), Rational(1, 2));
  EXPECT_EQ(std::get<Rational>(s3.entries[1]), Rational(1, 2));
  EXPECT_EQ(code_of([] { slope_of_pair(ip({1, 1}), ip({0, 1})); }), ErrorCode::VerticalPair);
}

TEST(SlopeOfPair, SwapInvariant) {
  EXPECT_EQ(slope_of_pair(ip({5, 2, 7}), ip({1, 3, 4})), slope_of_pair(ip({1, 3, 4}), ip({5, 2, 7})));
}

TEST(CollinearityRank, Examples) {
  EXPECT_EQ(collinearity_rank(exact_set(2, {0, 0, 1, 1, 2, 2})), 1);
  EXPECT_EQ(collinearity_rank(exact_set(3, {0, 0, 0, 1, 0, 0, 0, 1, 0, 0, 0, 1})), 3);
  EXPECT_EQ(collinearity_rank(exact_set(3, {0, 0, 0, 1, 0, 0, 0, 1, 0, 1, 1, 0})), 2);
  EXPECT_EQ(collinearity_rank(exact_set(2, {3, 4})), 0);
}

TEST(CollinearityRank, FloatSets) {
  auto p = PointSet::floating(2, {0.0, 0.0, 0.5, 0.25, 1.0, 0.5});
  EXPECT_EQ(collinearity_rank(p), 1);
  auto q = PointSet::floating(2, {0.0, 0.0, 0.5, 0.25, 1.0, 0.6});
  EXPECT_EQ(collinearity_rank(q), 2);
}

TEST(PointSet, RejectsDuplicatesAndBadInput) {
  EXPECT_EQ(code_of([] { exact_set(2, {1, 1, 1, 1}); }), ErrorCode::InvalidArgument);
  EXPECT_EQ(code_of([] { PointSet::floating(2, {0.0, 0.0, 0.0, 0.0}); }), ErrorCode::InvalidArgument);
  EXPECT_EQ(code_of([] { PointSet::floating(2, {0.0, std::nan("")}); }), ErrorCode::InvalidArgument);
  EXPECT_EQ(code_of([] { exact_set(1, {1, 2}); }), ErrorCode::InvalidArgument);
  EXPECT_EQ(code_of([] { exact_set(2, {1, 2, 3}); }), ErrorCode::InvalidArgument);
}

TEST(PointSet, CanonicalOrderAndLatticeView) {
  std::vector<Rational> c{Rational(1, 2), Rational(0), Rational(0), Rational(1, 3)};
  auto p = PointSet::exact(2, c, true);
  EXPECT_EQ(p.exact_row(0)[0], Rational(0));
  ASSERT_TRUE(p.lattice().has_value());
  EXPECT_EQ(p.lattice()->denominator, 6);
  EXPECT_EQ(p.lattice()->numerators, (std::vector<std::int64_t>{0, 2, 3, 0}));
  EXPECT_DOUBLE_EQ(p.row(0)[1], 1.0 / 3.0);
}

TEST(PointSet, TransformedAndSubset) {
  auto p = exact_set(2, {0, 0, 1, 2, 3, 1});
  auto t = p.transformed(Rational(1, 2), {Rational(1), Rational(0)});
  EXPECT_EQ(t.exact_row(1)[0], Rational(3, 2));
  EXPECT_EQ(t.exact_row(1)[1], Rational(1));
  std::vector<std::size_t> idx{2, 0};
  auto s = p.subset(idx);
  EXPECT_EQ(s.size(), 2u);
  EXPECT_EQ(s.exact_row(0)[0], Rational(3));
}

TEST(ReducePrimitive, Int64AndBig) {
  std::vector<std::int64_t> v{-4, 6, 0};
  reduce_primitive(v, true);
  EXPECT_EQ(v, (std::vector<std::int64_t>{2, -3, 0}));
  std::vector<std::int64_t> w{0, -5, 10};
  reduce_primitive(w, false);
  EXPECT_EQ(w, (std::vector<std::int64_t>{0, -1, 2}));
  auto b = big({0, -9, 6});
  reduce_primitive(b, true);
  EXPECT_EQ(b, big({0, 3, -2}));
}

TEST(DirectionKey, OrderingAndString) {
  DirectionKey a(big({1, 2}), true);
  DirectionKey b(big({1, 3}), true);
  EXPECT_TRUE(a < b);
  EXPECT_FALSE(b < a);
  EXPECT_EQ(a.to_string(), "(1,2)");
  EXPECT_EQ(std::hash<DirectionKey>{}(a), std::hash<DirectionKey>{}(DirectionKey(big({1, 2}), true)));
}
