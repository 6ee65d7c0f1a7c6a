#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "relumax/constructions.hpp"
#include "relumax/regions.hpp"

using namespace relumax;
using namespace relumax::verify;

TEST(Feasible, Examples) {
  {
    LinearSystem s(1);
    s.add({1}, 0).add({1}, Rational(-1, 2));
    const auto w = feasible(s, Box::unit(1));
    ASSERT_TRUE(w);
    EXPECT_GE((*w)[0], Rational(1, 2));
    EXPECT_LE((*w)[0], Rational(1));
  }
  {
    LinearSystem s(1);
    s.add({1}, 0, Relation::kGt).add({-1}, 0, Relation::kGt);
    EXPECT_FALSE(feasible(s, Box::uniform(1, -5, 5)));
  }
  {
    LinearSystem s(3);
    s.add({1, -1, 0}, 0).add({0, 1, -1}, 0);
    const auto w = feasible(s, Box::unit(3));
    ASSERT_TRUE(w);
    EXPECT_GE((*w)[0], (*w)[1]);
    EXPECT_GE((*w)[1], (*w)[2]);
  }
}

TEST(Feasible, StrictVersusClosed) {
  // x >= 1 on [0,1] touches the boundary only
  LinearSystem s(1);
  s.add({1}, -1);
  EXPECT_TRUE(feasible(s, Box::unit(1)));
  EXPECT_FALSE(feasible(s, Box::unit(1), /*open_box=*/true));
  LinearSystem t(1);
  t.add({1}, -1, Relation::kGt);
  EXPECT_FALSE(feasible(t, Box::unit(1)));
  // degenerate side has no interior
  EXPECT_FALSE(feasible(LinearSystem(2), Box(std::vector<Interval>{{0, 1}, {Rational(1, 2), Rational(1, 2)}}), true));
  EXPECT_TRUE(feasible(LinearSystem(2), Box(std::vector<Interval>{{0, 1}, {Rational(1, 2), Rational(1, 2)}})));
  EXPECT_THROW(feasible(LinearSystem(2), Box::unit(3)), InvalidInput);
}

TEST(Feasible, NegativeBoxesAndEquality) {
  // x1 + x2 = -3 on [-2,-1]^2: the segment (-2,-1)..(-1,-2) crosses the interior
  LinearSystem s(2);
  s.add({1, 1}, 3).add({-1, -1}, -3);
  const auto w = feasible(s, Box::uniform(2, -2, -1));
  ASSERT_TRUE(w);
  EXPECT_EQ((*w)[0] + (*w)[1], Rational(-3));
  const auto inner = feasible(s, Box::uniform(2, -2, -1), true);
  ASSERT_TRUE(inner);
  EXPECT_GT((*inner)[0], Rational(-2));
  EXPECT_LT((*inner)[0], Rational(-1));
  // x1 + x2 = -4 touches only the corner (-2,-2)
  LinearSystem c(2);
  c.add({1, 1}, 4).add({-1, -1}, -4);
  EXPECT_EQ(*feasible(c, Box::uniform(2, -2, -1)), (Vec{-2, -2}));
  EXPECT_FALSE(feasible(c, Box::uniform(2, -2, -1), true));
}

// Witness soundness against brute-force grid search on random small systems.
TEST(Feasible, RandomSystemsAgainstGrid) {
  std::mt19937_64 rng(123);
  std::uniform_int_distribution<long> c(-3, 3);
  int feasible_count = 0;
  for (int trial = 0; trial < 300; ++trial) {
    LinearSystem s(2);
    const int rows = 1 + trial % 4;
    for (int r = 0; r < rows; ++r) s.add({c(rng), c(rng)}, Rational(c(rng), 2), Relation::kGt);
    const auto w = feasible(s, Box::unit(2), true);
    bool grid_hit = false;
    for (long i = 1; i < 64 && !grid_hit; ++i)
      for (long j = 1; j < 64 && !grid_hit; ++j) grid_hit = s.satisfied_by({Rational(i, 64), Rational(j, 64)});
    if (w) {
      ++feasible_count;
      EXPECT_TRUE(s.satisfied_by(*w));
      EXPECT_GT((*w)[0], Rational(0));
      EXPECT_LT((*w)[0], Rational(1));
      EXPECT_GT((*w)[1], Rational(0));
      EXPECT_LT((*w)[1], Rational(1));
    }
    if (grid_hit) EXPECT_TRUE(w) << "trial " << trial;
  }
  EXPECT_GT(feasible_count, 50);
}

TEST(Regions, Examples) {
  const ReluNetwork affine(2, {}, AffineMap(2, {{1, 2}}, {3}));
  EXPECT_EQ(collect_regions(affine, Box::unit(2)).size(), 1u);

  const ReluNetwork single(1, {AffineMap(1, {{1}}, {Rational(-1, 2)})}, AffineMap(1, {{1}}, {0}));
  EXPECT_EQ(collect_regions(single, Box::unit(1)).size(), 2u);

  const auto gadget = collect_regions(max2_gadget(), Box::unit(2));
  ASSERT_EQ(gadget.size(), 2u);
  for (const auto& r : gadget) {
    EXPECT_TRUE(r.pattern[0][0]);
    EXPECT_FALSE(r.pattern[0][1]);
  }
}

TEST(Regions, BudgetSignal) {
  bool exceeded = false;
  const auto regions = collect_regions(tournament_max(3), Box::unit(3), 2, &exceeded);
  EXPECT_TRUE(exceeded);
  EXPECT_EQ(regions.size(), 2u);
  collect_regions(tournament_max(3), Box::unit(3), kDefaultBudget, &exceeded);
  EXPECT_FALSE(exceeded);
}

TEST(Regions, AffineRestrictionAndPartition) {
  std::mt19937_64 rng(8);
  for (std::uint64_t seed = 1; seed <= 12; ++seed) {
    const auto net = random_network(2 + seed % 2, {4, 3}, WeightGrid{}, seed);
    const Box box = Box::uniform(net.input_dim(), -1, 1);
    const auto regions = collect_regions(net, box);
    ASSERT_FALSE(regions.empty());
    for (const auto& r : regions) {
      EXPECT_TRUE(r.system.satisfied_by(r.witness));
      EXPECT_EQ(r.restriction.at(r.witness), oracle::forward(net, r.witness));
    }
    // every sampled point lies in the closure of some region and matches its restriction
    for (int s = 0; s < 400; ++s) {
      const Vec x = oracle::random_point(rng, net.input_dim(), -1, 1, 50);
      bool covered = false;
      for (const auto& r : regions)
        if (r.system.closure_satisfied_by(x)) {
          covered = true;
          EXPECT_EQ(r.restriction.at(x), oracle::forward(net, x));
        }
      EXPECT_TRUE(covered);
    }
  }
}

TEST(Regions, DeterministicOrder) {
  const auto net = random_network(3, {5, 4}, WeightGrid{}, 99);
  const auto a = collect_regions(net, Box::unit(3));
  const auto b = collect_regions(net, Box::unit(3));
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].pattern, b[i].pattern);
    EXPECT_EQ(a[i].witness, b[i].witness);
  }
}
