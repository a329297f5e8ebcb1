#pragma once

// Deterministic randomness. One 64-bit seed; sub-task streams are derived
// with splitmix64 so results do not depend on scheduling.

#include <cstddef>
#include <cstdint>
#include <algorithm>
#include <random>
#include <vector>

#include "lenslab/constructions.hpp"
#include "lenslab/coupling.hpp"
#include "lenslab/permutation.hpp"

namespace lenslab {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t split_seed(std::uint64_t seed, std::uint64_t stream) {
  return splitmix64(seed ^ splitmix64(stream + 0x632be59bd9b4e019ULL));
}

using Rng = std::mt19937_64;

// Uniform integer in [0, n) by rejection; independent of the standard
// library's distribution implementation.
inline std::size_t uniform_index(Rng& rng, std::size_t n) {
  if (n <= 1) return 0;
  const std::uint64_t bound = static_cast<std::uint64_t>(n);
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
  std::uint64_t x;
  do {
    x = rng();
  } while (x >= limit);
  return static_cast<std::size_t>(x % bound);
}

inline Permutation random_permutation(Rng& rng, std::size_t n) {
  std::vector<std::size_t> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = i;
  for (std::size_t i = n; i > 1; --i) std::swap(v[i - 1], v[uniform_index(rng, i)]);
  return Permutation(std::move(v));
}

// Random point of the polytope: a convex combination of `terms` graph
// couplings with integer weights in [1, max_weight]. Exact in rationals.
template <Scalar T>
CouplingMatrix<T> random_coupling(Rng& rng, std::size_t k, std::size_t terms = 3,
                                  std::size_t max_weight = 9) {
  std::vector<std::int64_t> w(terms);
  std::int64_t total = 0;
  for (auto& x : w) {
    x = 1 + static_cast<std::int64_t>(uniform_index(rng, max_weight));
    total += x;
  }
  Matrix<T> m(k, k);
  for (std::size_t t = 0; t < terms; ++t) {
    const Permutation p = random_permutation(rng, k);
    const T mass = fraction<T>(w[t], total * static_cast<std::int64_t>(k));
    for (std::size_t j = 0; j < k; ++j) m(p(j), j) += mass;
  }
  return CouplingMatrix<T>::assume_valid(std::move(m));
}

// Valid target with k in [1, kmax] and k | L <= lmax: m is a sum of L/k
// random permutation matrices, so every row and column sums to L/k.
inline RationalTarget random_rational_target(Rng& rng, std::size_t kmax, std::size_t lmax) {
  if (kmax == 0 || lmax < 1) throw InvalidArgument("random_rational_target: empty range");
  const std::size_t k = 1 + uniform_index(rng, std::min(kmax, lmax));
  const std::size_t share = 1 + uniform_index(rng, lmax / k);
  RationalTarget::IntMatrix m(k, std::vector<std::int64_t>(k, 0));
  for (std::size_t t = 0; t < share; ++t) {
    const Permutation p = random_permutation(rng, k);
    for (std::size_t j = 0; j < k; ++j) m[p(j)][j] += 1;
  }
  return RationalTarget(k, static_cast<std::int64_t>(k * share), std::move(m));
}

}  // namespace lenslab
