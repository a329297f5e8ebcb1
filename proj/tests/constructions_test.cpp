#include <gtest/gtest.h>

#include "lenslab/lenslab.hpp"
#include "oracles.hpp"

using namespace lenslab;

namespace {

Rng seeded(std::uint64_t s) { return Rng(split_seed(11, s)); }

// Mass carried from coarse cell j into coarse cell i, counted interval by
// interval.
Matrix<Rational> counted_coupling(const IETSpec& iet, std::size_t k) {
  const std::size_t len = iet.n_intervals / k;
  Matrix<Rational> m(k, k);
  for (std::size_t u = 0; u < iet.n_intervals; ++u)
    m(iet.permutation(u) / len, u / len) += Rational(1, static_cast<long>(iet.n_intervals));
  return m;
}

}  // namespace

TEST(Realize, SmallTarget) {
  RationalTarget t(2, 4, {{1, 1}, {1, 1}});
  auto iet = realize_coupling_as_iet(t);
  EXPECT_EQ(iet.n_intervals, 8U);
  EXPECT_EQ(induced_coupling<Rational>(iet, 2), t.coupling<Rational>());
}

TEST(Realize, RandomTargetsExact) {
  auto rng = seeded(1);
  for (int trial = 0; trial < 200; ++trial) {
    auto t = random_rational_target(rng, 6, 24);
    auto iet = realize_coupling_as_iet(t);
    EXPECT_EQ(iet.n_intervals, t.k() * static_cast<std::size_t>(t.denominator()));
    EXPECT_EQ(induced_coupling<Rational>(iet, t.k()), t.coupling<Rational>());
    EXPECT_EQ(counted_coupling(iet, t.k()), t.coupling<Rational>().matrix());
  }
}

TEST(Realize, RejectsInfeasibleTargets) {
  EXPECT_THROW(RationalTarget(2, 3, {{1, 1}, {1, 1}}), InfeasibleTarget);
  EXPECT_THROW(RationalTarget(2, 4, {{2, 1}, {0, 1}}), InfeasibleTarget);
  EXPECT_THROW(RationalTarget(2, 4, {{3, -1}, {-1, 3}}), InfeasibleTarget);
  EXPECT_THROW(RationalTarget(2, 4, {{2, 0}}), InfeasibleTarget);
  EXPECT_THROW(RationalTarget(0, 4, {}), InfeasibleTarget);
  EXPECT_THROW(induced_coupling<Rational>(IETSpec(Permutation::identity(5)), 2), DimensionMismatch);
}

TEST(DensityGap, WithinBound) {
  auto rng = seeded(2);
  for (std::size_t k = 1; k <= 5; ++k)
    for (std::int64_t mult : {1, 3, 10}) {
      auto c = random_coupling<Rational>(rng, k, 4, 13);
      const std::int64_t len = static_cast<std::int64_t>(k) * mult;
      auto gap = density_gap(c, len);
      EXPECT_EQ(gap.target.denominator(), len);
      EXPECT_LT(gap.distance, Rational(static_cast<long>(k * k), static_cast<long>(len)));
      EXPECT_EQ(gap.distance, coupling_distance(gap.target.coupling<Rational>(), c));
    }
  EXPECT_THROW(density_gap(product_coupling<Rational>(3), 4), InvalidArgument);
}

TEST(DensityGap, RepresentableIsExact) {
  RationalTarget t(3, 6, {{2, 0, 0}, {0, 1, 1}, {0, 1, 1}});
  auto gap = density_gap(t.coupling<Rational>(), 6);
  EXPECT_EQ(gap.distance, Rational(0));
  EXPECT_EQ(gap.target, t);
}

TEST(DensityGap, FloatBackend) {
  auto rng = seeded(3);
  auto c = random_coupling<double>(rng, 4);
  auto gap = density_gap(c, 40);
  EXPECT_LT(gap.distance, 16.0 / 40.0);
}

TEST(Blocks, DistinctSizes) {
  EXPECT_EQ(distinct_block_sizes(1), (std::vector<std::size_t>{1}));
  EXPECT_EQ(distinct_block_sizes(6), (std::vector<std::size_t>{1, 2, 3}));
  EXPECT_EQ(distinct_block_sizes(8), (std::vector<std::size_t>{1, 2, 5}));
  EXPECT_THROW(distinct_block_sizes(0), InvalidArgument);
  for (std::size_t k = 1; k <= 40; ++k) {
    auto s = distinct_block_sizes(k);
    EXPECT_NO_THROW(validate_blocks(consecutive_blocks(s), k));
  }
}

TEST(Blocks, Validation) {
  EXPECT_THROW(validate_blocks({{0}, {1}}, 2), BadBlocks);
  EXPECT_THROW(validate_blocks({{0}, {}}, 1), BadBlocks);
  EXPECT_THROW(validate_blocks({{0}, {0, 1}}, 3), BadBlocks);
  EXPECT_THROW(validate_blocks({{0}, {1, 2}}, 4), BadBlocks);
  EXPECT_THROW(validate_blocks({{0}, {1, 5}}, 3), BadBlocks);
}

TEST(Rigidity, StartsAtOne) {
  auto blocks = consecutive_blocks(distinct_block_sizes(8));
  auto xi = block_diagonal_coupling<Rational>(blocks, 8);
  EXPECT_TRUE(coupling_violations(xi.matrix()).empty());
  EXPECT_EQ(rigidity_probe(bernoulli_system<Rational>(2, 3), blocks, 0), Rational(1));
}

TEST(Rigidity, BernoulliReachesProductValue) {
  auto blocks = consecutive_blocks(distinct_block_sizes(8));
  auto sys = bernoulli_system<Rational>(2, 3);
  // product mass on the block squares: (1 + 4 + 25) / 64
  for (long long n = 3; n <= 6; ++n) EXPECT_EQ(rigidity_probe(sys, blocks, n), Rational(15, 32));
  EXPECT_GT(rigidity_probe(sys, blocks, 1), Rational(15, 32));
}

TEST(Rigidity, RotationIsPeriodic) {
  for (std::size_t k : {6U, 7U, 10U}) {
    auto blocks = consecutive_blocks(distinct_block_sizes(k));
    for (std::size_t s = 1; s < k; ++s) {
      auto sys = rotation_system<Rational>(k, s);
      EXPECT_EQ(rigidity_probe(sys, blocks, static_cast<long long>(k)), Rational(1));
      for (long long n = 0; n < 5; ++n)
        EXPECT_EQ(rigidity_probe(sys, blocks, n), rigidity_probe(sys, blocks, n + static_cast<long long>(k)));
    }
  }
}

TEST(Mixing, BernoulliVanishesAfterL) {
  auto sys = bernoulli_system<Rational>(2, 3);
  EXPECT_EQ(mixing_residual(sys, 0), Rational(7, 64));
  EXPECT_GT(mixing_residual(sys, 2), Rational(0));
  EXPECT_EQ(mixing_residual(sys, 3), Rational(0));
  EXPECT_EQ(mixing_residual(sys, 50), Rational(0));
}

TEST(Mixing, RotationNeverMixes) {
  auto sys = rotation_system<Rational>(5, 2);
  for (unsigned long long n = 0; n < 12; ++n) EXPECT_EQ(mixing_residual(sys, n), Rational(4, 25));
}

TEST(Witness, AllPairsBinaryShift) {
  for (std::size_t len = 1; len <= 2; ++len) {
    const std::size_t k = std::size_t{1} << len;
    auto perms = oracle::all_perms(k);
    for (std::size_t a = 0; a < perms.size(); a += 3)
      for (std::size_t b = 0; b < perms.size(); b += 5) {
        auto w = transitivity_witness(2, len, perms[a], perms[b], Rational(1, 100));
        EXPECT_EQ(w.n, len);
        EXPECT_EQ(w.fine_k, k * k);
        EXPECT_TRUE(w.check_source && w.check_image && w.exact_source && w.exact_image);
        EXPECT_TRUE(w.preimages_resolved);
        EXPECT_TRUE(coupling_violations(w.xi.matrix()).empty());
      }
  }
}

TEST(Witness, Rejects) {
  EXPECT_THROW(transitivity_witness(2, 1, Permutation::identity(3), Permutation::identity(2), Rational(1, 2)),
               DimensionMismatch);
  EXPECT_THROW(transitivity_witness(2, 6, Permutation::identity(64), Permutation::identity(64), Rational(1, 2)),
               SizeGuard);
}

TEST(Entropy, BlockIsRealized) {
  for (const std::string text : {"0,1/2,0", "1/2", "0,0,0,0", "1/2,0,1/2,1/2,0"}) {
    auto b = BlockTarget::parse(text);
    const std::size_t n = b.bits.size();
    auto lambda = realize_entropy_block(b);
    auto f = entropy_factor_F(bernoulli_system<Rational>(2, n), lambda, n);
    ASSERT_EQ(f.size(), n + 1);
    for (std::size_t t = 0; t < n; ++t) EXPECT_EQ(f[t], block_value(b.bits[t])) << text;
    EXPECT_EQ(b.str(), text);
  }
}

TEST(Entropy, ProductGivesQuarter) {
  auto f = entropy_factor_F(bernoulli_system<Rational>(2, 2), product_coupling<Rational>(4), 3);
  for (const auto& x : f) EXPECT_EQ(x, Rational(1, 4));
}

TEST(Entropy, Rejects) {
  EXPECT_THROW(BlockTarget::parse("0,1"), InvalidArgument);
  EXPECT_THROW(BlockTarget::parse(""), InvalidArgument);
  EXPECT_EQ(BlockTarget::parse("0.5, 0").str(), "1/2,0");
  EXPECT_THROW(realize_entropy_block(BlockTarget::parse("0,0,0,0,0,0,0,0,0,0,0,0,0")), SizeGuard);
  EXPECT_THROW(entropy_factor_F(rotation_system<Rational>(3, 1), product_coupling<Rational>(3), 1), DimensionMismatch);
}

TEST(Commuters, BernoulliCyclic) {
  for (std::size_t d = 1; d <= 3; ++d)
    for (std::size_t ell = 1; ell <= 2; ++ell)
      for (std::size_t len = 1; len <= 2; ++len) {
        if (d * ell < 2) continue;
        auto r = bernoulli_commuter_report(d, ell, len);
        EXPECT_TRUE(r.commutes);
        EXPECT_TRUE(r.cycles_alpha_sets);
        EXPECT_EQ(r.resolved_residual, Rational(0)) << d << "," << ell << "," << len;
        EXPECT_EQ(r.map.order(), d);
      }
  EXPECT_THROW(bernoulli_commuter_report(1, 1, 2), InvalidArgument);
}

TEST(Commuters, StepResidualCanBePositive) {
  auto r = bernoulli_commuter_report(2, 1, 1);
  EXPECT_GT(r.step_residual, Rational(0));
}

TEST(Commuters, Odometer) {
  auto odo = odometer_system<Rational>(4);
  auto t4 = system_power(odo, 4);
  for (const auto& pi : oracle::all_perms(4)) {
    auto s = odometer_commuter(pi, 2, 4);
    EXPECT_TRUE(commutes_with(s, t4));
    EXPECT_EQ(self_joining_residual(t4, graph_coupling<Rational>(s)), Rational(0));
  }
  EXPECT_FALSE(commutes_with(odometer_commuter(Permutation({1, 0, 2, 3}), 2, 4), odo));
  EXPECT_THROW(odometer_commuter(Permutation::identity(4), 3, 2), InvalidArgument);
  EXPECT_THROW(odometer_commuter(Permutation::identity(3), 2, 4), DimensionMismatch);
}
