#include <gtest/gtest.h>

#include <numeric>
#include <sstream>

#include "lenslab/lenslab.hpp"
#include "oracles.hpp"

using namespace lenslab;

namespace {

Rng seeded(std::uint64_t s) { return Rng(split_seed(7, s)); }

std::vector<FiniteSystem<Rational>> small_zoo() {
  return {rotation_system<Rational>(5, 2), odometer_system<Rational>(3), bernoulli_system<Rational>(2, 2),
          bernoulli_system<Rational>(3, 1), iet_system<Rational>(IETSpec(Permutation({3, 1, 0, 2})))};
}

}  // namespace

TEST(Lens, MatchesNaiveSandwich) {
  auto rng = seeded(1);
  for (const auto& s : small_zoo())
    for (int t = 0; t < 5; ++t) {
      auto c = random_coupling<Rational>(rng, s.k());
      EXPECT_EQ(lens_step(s, c).matrix(), oracle::naive_lens(s.matrix(), c.matrix()));
    }
}

TEST(Lens, MatchesNaiveSandwichFloat) {
  auto rng = seeded(2);
  auto s = bernoulli_system<double>(2, 3);
  auto c = random_coupling<double>(rng, 8);
  EXPECT_LE(l1_distance(lens_step(s, c).matrix(), oracle::naive_lens(s.matrix(), c.matrix())), 1e-14);
}

TEST(Lens, StaysInPolytope) {
  auto rng = seeded(3);
  for (const auto& s : small_zoo()) {
    auto c = random_coupling<Rational>(rng, s.k());
    for (int n = 0; n < 4; ++n) {
      c = lens_step(s, c);
      EXPECT_TRUE(coupling_violations(c.matrix()).empty());
    }
  }
}

TEST(Lens, ProductIsFixed) {
  for (const auto& s : small_zoo()) {
    auto p = product_coupling<Rational>(s.k());
    EXPECT_EQ(lens_step(s, p), p);
    EXPECT_EQ(one_sided_step(s, p), p);
    EXPECT_EQ(self_joining_residual(s, p), Rational(0));
  }
}

TEST(Lens, ConjugatesGraphCouplings) {
  for (std::size_t k = 1; k <= 4; ++k) {
    auto perms = oracle::all_perms(k);
    for (const auto& tau : perms) {
      auto sys = FiniteSystem<Rational>::from_permutation(tau);
      for (const auto& sigma : perms)
        EXPECT_EQ(lens_step(sys, graph_coupling<Rational>(sigma)),
                  graph_coupling<Rational>(conjugate(sigma, tau)));
    }
  }
}

TEST(Lens, OneSidedComposesGraph) {
  auto tau = Permutation({2, 0, 3, 1});
  auto sys = FiniteSystem<Rational>::from_permutation(tau);
  for (const auto& sigma : oracle::all_perms(4))
    EXPECT_EQ(one_sided_step(sys, graph_coupling<Rational>(sigma)), graph_coupling<Rational>(compose(tau, sigma)));
}

TEST(Lens, OneSidedStochasticIsLeftTransport) {
  auto rng = seeded(4);
  auto s = bernoulli_system<Rational>(2, 2);
  auto c = random_coupling<Rational>(rng, 4);
  EXPECT_EQ(one_sided_step(s, c).matrix(), oracle::naive_multiply(oracle::naive_transpose(s.matrix()), c.matrix()));
}

TEST(Lens, InverseUndoesStep) {
  auto rng = seeded(5);
  auto s = rotation_system<Rational>(7, 3);
  auto c = random_coupling<Rational>(rng, 7);
  EXPECT_EQ(lens_step_inverse(s, lens_step(s, c)), c);
  EXPECT_EQ(lens_step(s, lens_step_inverse(s, c)), c);
  EXPECT_EQ(lens_power(s, c, -1), lens_step_inverse(s, c));
  EXPECT_THROW(lens_step_inverse(bernoulli_system<Rational>(2, 2), product_coupling<Rational>(4)), NotExact);
}

TEST(Lens, PowerIsRepeatedStep) {
  auto rng = seeded(6);
  for (const auto& s : small_zoo()) {
    auto c = random_coupling<Rational>(rng, s.k());
    auto cur = c;
    for (long long n = 0; n <= 5; ++n) {
      EXPECT_EQ(lens_power(s, c, n), cur);
      cur = lens_step(s, cur);
    }
  }
  EXPECT_THROW(lens_power(bernoulli_system<Rational>(2, 1), product_coupling<Rational>(2), -2),
               NegativePowerOfStochastic);
}

TEST(Lens, Affine) {
  auto rng = seeded(7);
  for (const auto& s : small_zoo()) {
    auto c = random_coupling<Rational>(rng, s.k());
    auto d = random_coupling<Rational>(rng, s.k());
    for (const Rational& a : {Rational(0), Rational(1, 3), Rational(5, 7), Rational(1)})
      EXPECT_EQ(lens_step(s, mix(a, c, d)), mix(a, lens_step(s, c), lens_step(s, d)));
  }
}

TEST(Lens, DimensionMismatch) {
  EXPECT_THROW(lens_step(rotation_system<Rational>(3, 1), product_coupling<Rational>(4)), DimensionMismatch);
  EXPECT_THROW(one_sided_step(bernoulli_system<Rational>(2, 2), product_coupling<Rational>(3)), DimensionMismatch);
}

TEST(Lens, CesaroBound) {
  auto rng = seeded(8);
  for (const auto& s : small_zoo()) {
    auto c = random_coupling<Rational>(rng, s.k());
    auto orb = orbit(s, c, 41, LensMode::two_sided);
    for (std::size_t n : {1U, 5U, 20U, 40U}) {
      auto avg = cesaro_average(orb, n);
      EXPECT_LE(self_joining_residual(s, avg), Rational(2, static_cast<long>(n)));
    }
  }
}

TEST(Lens, OrbitBookkeeping) {
  auto s = rotation_system<Rational>(4, 1);
  auto c = graph_coupling<Rational>(Permutation::transposition(4, 0, 1));
  auto orb = orbit(s, c, 8, LensMode::two_sided);
  EXPECT_EQ(orb.length(), 9U);
  EXPECT_EQ(orb.states[0], c);
  EXPECT_EQ(orb.states[4], c);
  EXPECT_TRUE(orb.repair_residuals.empty());
  EXPECT_THROW(cesaro_average(orb, 9), InvalidArgument);
}

TEST(Lens, FloatOrbitRepairs) {
  auto s = bernoulli_system<double>(2, 3);
  auto rng = seeded(9);
  auto orb = orbit(s, random_coupling<double>(rng, 8), 20, LensMode::two_sided);
  ASSERT_EQ(orb.repair_residuals.size(), 20U);
  for (double r : orb.repair_residuals) EXPECT_LE(r, 1e-9);
  for (const auto& st : orb.states) EXPECT_LE(st.max_sum_deviation(), 1e-12);
}

TEST(Period, TranspositionUnderRotation) {
  auto s = rotation_system<Rational>(6, 1);
  auto r = detect_period(s, graph_coupling<Rational>(Permutation::transposition(6, 0, 1)), 10);
  ASSERT_TRUE(r.period.has_value());
  EXPECT_EQ(*r.period, 6U);
  ASSERT_EQ(r.residual_by_p.size(), 10U);
  EXPECT_EQ(r.residual_by_p[5], Rational(0));
  EXPECT_GT(r.residual_by_p[2], Rational(0));
}

TEST(Period, ProductHasPeriodOne) {
  auto r = detect_period(bernoulli_system<Rational>(2, 2), product_coupling<Rational>(4), 3);
  ASSERT_TRUE(r.period.has_value());
  EXPECT_EQ(*r.period, 1U);
}

TEST(Period, RotationPeriodDividesOrder) {
  auto rng = seeded(10);
  for (std::size_t k = 2; k <= 9; ++k)
    for (std::size_t s = 1; s < k; ++s) {
      auto c = random_coupling<Rational>(rng, k);
      auto r = detect_period(rotation_system<Rational>(k, s), c, k);
      ASSERT_TRUE(r.period.has_value());
      EXPECT_EQ((k / std::gcd(k, s)) % *r.period, 0U) << "k=" << k << " s=" << s;
    }
}

TEST(Period, NoneWithinBound) {
  auto r = detect_period(rotation_system<Rational>(7, 1), graph_coupling<Rational>(Permutation::transposition(7, 0, 1)), 3);
  EXPECT_FALSE(r.period.has_value());
  EXPECT_THROW(detect_period(rotation_system<Rational>(7, 1), product_coupling<Rational>(7), 0), InvalidArgument);
}

TEST(Hits, PeriodicOrbitDensity) {
  auto s = rotation_system<Rational>(6, 1);
  auto c = graph_coupling<Rational>(Permutation::transposition(6, 0, 1));
  auto orb = orbit(s, c, 11, LensMode::two_sided);
  auto h = quasi_attractor_hits<Rational>(orb, [&](const CouplingMatrix<Rational>& x) { return x == c; }, 6);
  ASSERT_EQ(h.window_density.size(), 2U);
  EXPECT_DOUBLE_EQ(h.window_density[0], 1.0 / 6.0);
  EXPECT_DOUBLE_EQ(h.cumulative_density[1], 2.0 / 12.0);
  EXPECT_DOUBLE_EQ(h.overall, 2.0 / 12.0);
}

TEST(Resolved, PreimageTest) {
  auto fine = bernoulli_system<Rational>(2, 2);
  EXPECT_TRUE(resolves_preimages(fine, block_refinement(2, 2)));
  EXPECT_FALSE(resolves_preimages(fine, block_refinement(4, 1)));
  EXPECT_THROW(resolved_lens_step(fine, block_refinement(4, 1), product_coupling<Rational>(4)), InvalidArgument);
}

TEST(Resolved, LiftedStepCouplingMatchesStepLens) {
  // For a coupling lifted from the coarse cells the resolved lens agrees
  // with the coarse stochastic lens.
  auto rng = seeded(11);
  auto coarse = bernoulli_system<Rational>(2, 2);
  auto fine = bernoulli_system<Rational>(2, 3);
  auto ref = block_refinement(4, 2);
  auto c = random_coupling<Rational>(rng, 4);
  EXPECT_EQ(resolved_lens_step(fine, ref, lift_coupling(c, ref)), lens_step(coarse, c));
}

TEST(OrbitCsv, Header) {
  auto orb = orbit(rotation_system<Rational>(3, 1), product_coupling<Rational>(3), 2, LensMode::one_sided);
  std::ostringstream os;
  write_orbit_csv(os, orb);
  EXPECT_EQ(os.str(), "n,residual_to_fixed,distance_to_initial,distance_to_product\n0,0,0,0\n1,0,0,0\n2,0,0,0\n");
}

TEST(Lens, ConjugationInPreimageOrder) {
  // same statement with the cell map read backwards: pre = tau^-1
  for (const auto& pre : oracle::all_perms(4)) {
    auto sys = FiniteSystem<Rational>::from_permutation(pre.inverse());
    for (const auto& sigma : oracle::all_perms(4)) {
      auto g = graph_coupling<Rational>(sigma);
      EXPECT_EQ(lens_step(sys, g), graph_coupling<Rational>(compose(compose(pre.inverse(), sigma), pre)));
      EXPECT_EQ(lens_step_inverse(sys, g), graph_coupling<Rational>(compose(compose(pre, sigma), pre.inverse())));
      EXPECT_EQ(one_sided_step(sys, g), graph_coupling<Rational>(compose(pre.inverse(), sigma)));
    }
  }
}

TEST(Lens, RotationRefinementCommutes) {
  auto rng = seeded(12);
  auto coarse = rotation_system<Rational>(4, 1);
  auto fine = rotation_system<Rational>(8, 2);
  auto ref = block_refinement(4, 2);
  for (int t = 0; t < 20; ++t) {
    auto c = random_coupling<Rational>(rng, 8, 4);
    EXPECT_EQ(restrict_coupling(lens_step(fine, c), ref), lens_step(coarse, restrict_coupling(c, ref)));
  }
}

TEST(Lens, BernoulliRefinementNeedsStepCouplings) {
  // restrict does not commute with the lens for arbitrary fine couplings
  auto coarse = bernoulli_system<Rational>(2, 1);
  auto fine = bernoulli_system<Rational>(2, 2);
  auto ref = block_refinement(2, 2);
  auto diag = graph_coupling<Rational>(Permutation::identity(4));
  EXPECT_NE(restrict_coupling(lens_step(fine, diag), ref), lens_step(coarse, restrict_coupling(diag, ref)));
}
