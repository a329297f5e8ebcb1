#include <gtest/gtest.h>

#include "lenslab/lenslab.hpp"
#include "oracles.hpp"

using namespace lenslab;

namespace {

Rng seeded(std::uint64_t s) { return Rng(split_seed(42, s)); }

}  // namespace

TEST(Coupling, ProductAndGraph) {
  auto p = product_coupling<Rational>(3);
  EXPECT_EQ(p(1, 2), Rational(1, 9));
  EXPECT_TRUE(coupling_violations(p.matrix()).empty());

  auto g = graph_coupling<Rational>(Permutation({1, 2, 0}));
  EXPECT_EQ(g(1, 0), Rational(1, 3));
  EXPECT_EQ(g(0, 2), Rational(1, 3));
  EXPECT_EQ(g(0, 0), Rational(0));
  EXPECT_THROW(product_coupling<Rational>(0), InvalidArgument);
}

TEST(Coupling, FromMatrixRejectsBadMarginals) {
  Matrix<Rational> m(2, 2, Rational(1, 4));
  EXPECT_NO_THROW(CouplingMatrix<Rational>::from_matrix(m));
  m(0, 0) = Rational(1, 2);
  auto d = coupling_violations(m);
  ASSERT_EQ(d.size(), 2U);
  EXPECT_EQ(d[0].name, "row_sum(0)");
  EXPECT_EQ(d[1].name, "col_sum(0)");
  EXPECT_THROW(CouplingMatrix<Rational>::from_matrix(m), InvalidCoupling);
}

TEST(Coupling, NegativeEntryDiagnosed) {
  Matrix<Rational> m(2, 2);
  m(0, 0) = Rational(3, 4);
  m(0, 1) = Rational(-1, 4);
  m(1, 0) = Rational(-1, 4);
  m(1, 1) = Rational(3, 4);
  auto d = coupling_violations(m);
  ASSERT_EQ(d.size(), 2U);
  EXPECT_EQ(d[0].name, "negative_entry(0,1)");
}

TEST(Coupling, MetricAxioms) {
  auto rng = seeded(1);
  for (int t = 0; t < 100; ++t) {
    auto a = random_coupling<Rational>(rng, 6);
    auto b = random_coupling<Rational>(rng, 6);
    auto c = random_coupling<Rational>(rng, 6);
    EXPECT_EQ(coupling_distance(a, a), Rational(0));
    EXPECT_EQ(coupling_distance(a, b), coupling_distance(b, a));
    EXPECT_LE(coupling_distance(a, c), coupling_distance(a, b) + coupling_distance(b, c));
    EXPECT_EQ(coupling_distance(a, b), oracle::l1(a.matrix(), b.matrix()));
    if (!(a == b)) {
      EXPECT_GT(coupling_distance(a, b), Rational(0));
    }
    // the polytope has L1 diameter at most 2
    EXPECT_LE(coupling_distance(a, b), Rational(2));
  }
}

TEST(Coupling, DistanceBetweenGraphsOfDisjointPermutations) {
  auto a = graph_coupling<Rational>(Permutation::identity(4));
  auto b = graph_coupling<Rational>(Permutation::cyclic_shift(4, 1));
  EXPECT_EQ(coupling_distance(a, b), Rational(2));
  EXPECT_THROW(coupling_distance(a, product_coupling<Rational>(3)), DimensionMismatch);
}

TEST(Coupling, RestrictAfterLiftIsIdentity) {
  auto rng = seeded(2);
  for (std::size_t k = 1; k <= 5; ++k)
    for (std::size_t r = 1; r <= 4; ++r) {
      auto c = random_coupling<Rational>(rng, k);
      auto ref = block_refinement(k, r);
      auto lifted = lift_coupling(c, ref);
      EXPECT_EQ(lifted.k(), k * r);
      EXPECT_TRUE(coupling_violations(lifted.matrix()).empty());
      EXPECT_EQ(restrict_coupling(lifted, ref), c);
    }
}

TEST(Coupling, RestrictSumsBlocks) {
  auto fine = graph_coupling<Rational>(Permutation({1, 0, 3, 2}));
  auto coarse = restrict_coupling(fine, block_refinement(2, 2));
  EXPECT_EQ(coarse(0, 0), Rational(1, 2));
  EXPECT_EQ(coarse(1, 1), Rational(1, 2));
  EXPECT_EQ(coarse(0, 1), Rational(0));
}

TEST(Coupling, MarkovComposeIsHomomorphismOnGraphs) {
  for (std::size_t k = 1; k <= 4; ++k) {
    auto perms = oracle::all_perms(k);
    for (const auto& s : perms)
      for (const auto& p : perms)
        EXPECT_EQ(markov_compose(graph_coupling<Rational>(s), graph_coupling<Rational>(p)),
                  graph_coupling<Rational>(compose(s, p)));
  }
}

TEST(Coupling, ProductAbsorbs) {
  auto rng = seeded(3);
  auto c = random_coupling<Rational>(rng, 5);
  auto p = product_coupling<Rational>(5);
  EXPECT_EQ(markov_compose(c, p), p);
  EXPECT_EQ(markov_compose(p, c), p);
}

TEST(Coupling, MixIsAffine) {
  auto rng = seeded(4);
  auto c = random_coupling<Rational>(rng, 4);
  auto d = random_coupling<Rational>(rng, 4);
  EXPECT_EQ(mix(Rational(1), c, d), c);
  EXPECT_EQ(mix(Rational(0), c, d), d);
  auto half = mix(Rational(1, 2), c, d);
  EXPECT_TRUE(coupling_violations(half.matrix()).empty());
  EXPECT_EQ(coupling_distance(half, c), coupling_distance(c, d) / 2);
  EXPECT_THROW(mix(Rational(3, 2), c, d), InvalidArgument);
  EXPECT_THROW(mix(Rational(-1, 2), c, d), InvalidArgument);
}

TEST(Coupling, CastKeepsValues) {
  auto g = graph_coupling<Rational>(Permutation({2, 0, 1}));
  auto f = coupling_cast<double>(g);
  EXPECT_DOUBLE_EQ(f(0, 1), 1.0 / 3.0);
  EXPECT_DOUBLE_EQ(f(0, 0), 0.0);
}

TEST(Neighborhood, PermutationDiagonal) {
  auto g = graph_coupling<Rational>(Permutation({1, 2, 0}));
  // graph puts mass at (sigma(j), j); the neighbourhood reads C(i, eta(i))
  auto eta = Permutation({1, 2, 0}).inverse();
  EXPECT_TRUE(in_neighborhood(g, NeighborhoodSpec<Rational>::permutation_diagonal(eta, Rational(1, 100))));
  EXPECT_FALSE(in_neighborhood(product_coupling<Rational>(3),
                               NeighborhoodSpec<Rational>::permutation_diagonal(eta, Rational(1, 10))));
  EXPECT_TRUE(in_neighborhood(product_coupling<Rational>(3),
                              NeighborhoodSpec<Rational>::permutation_diagonal(eta, Rational(1, 4))));
}

TEST(Neighborhood, Entrywise) {
  auto p = product_coupling<Rational>(2);
  auto near = mix(Rational(9, 10), p, graph_coupling<Rational>(Permutation::identity(2)));
  EXPECT_TRUE(in_neighborhood(near, NeighborhoodSpec<Rational>::entrywise(p.matrix(), Rational(1, 39))));
  EXPECT_FALSE(in_neighborhood(near, NeighborhoodSpec<Rational>::entrywise(p.matrix(), Rational(1, 40))));
  EXPECT_THROW(NeighborhoodSpec<Rational>::permutation_diagonal(Permutation::identity(2), Rational(0)),
               InvalidArgument);
}

TEST(Repair, ProjectsSmallDrift) {
  Matrix<double> m(3, 3, 1.0 / 9.0);
  m(0, 0) += 1e-11;
  m(2, 1) -= 1e-11;
  auto r = repair_to_polytope(m, 1e-9);
  EXPECT_LE(r.coupling.max_sum_deviation(), 1e-13);
  EXPECT_GT(r.initial_deviation, 0.0);
}

TEST(Repair, RefusesLargeDrift) {
  Matrix<double> m(2, 2, 0.25);
  m(0, 0) = 0.5;
  EXPECT_THROW(repair_to_polytope(m, 1e-9), NotRepairable);
}
