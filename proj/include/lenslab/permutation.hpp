#pragma once

#include <cstddef>
#include <cstdint>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "lenslab/errors.hpp"

namespace lenslab {

// Bijection of {0..n-1}. `p(i)` is the image of i (forward map).
class Permutation {
 public:
  Permutation() = default;

  explicit Permutation(std::vector<std::size_t> images) : map_(std::move(images)) {
    std::vector<bool> seen(map_.size(), false);
    for (std::size_t i = 0; i < map_.size(); ++i) {
      const std::size_t v = map_[i];
      if (v >= map_.size() || seen[v])
        throw InvalidPermutation("not a bijection of {0.." +
                                 std::to_string(map_.size()) + "-1}: position " +
                                 std::to_string(i));
      seen[v] = true;
    }
  }

  static Permutation identity(std::size_t n) {
    std::vector<std::size_t> v(n);
    std::iota(v.begin(), v.end(), std::size_t{0});
    return Permutation(std::move(v));
  }

  // i -> i + s mod n
  static Permutation cyclic_shift(std::size_t n, std::size_t s) {
    std::vector<std::size_t> v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = (i + s) % n;
    return Permutation(std::move(v));
  }

  static Permutation transposition(std::size_t n, std::size_t a, std::size_t b) {
    Permutation p = identity(n);
    if (a >= n || b >= n) throw InvalidPermutation("transposition index out of range");
    std::swap(p.map_[a], p.map_[b]);
    return p;
  }

  std::size_t size() const { return map_.size(); }
  std::size_t operator()(std::size_t i) const { return map_[i]; }
  std::span<const std::size_t> images() const { return map_; }

  Permutation inverse() const {
    std::vector<std::size_t> inv(map_.size());
    for (std::size_t i = 0; i < map_.size(); ++i) inv[map_[i]] = i;
    Permutation p;
    p.map_ = std::move(inv);
    return p;
  }

  bool is_identity() const {
    for (std::size_t i = 0; i < map_.size(); ++i)
      if (map_[i] != i) return false;
    return true;
  }

  // Any integer power; negative powers use the inverse.
  Permutation power(long long n) const {
    Permutation base = n < 0 ? inverse() : *this;
    unsigned long long e = n < 0 ? static_cast<unsigned long long>(-(n + 1)) + 1ULL
                                 : static_cast<unsigned long long>(n);
    Permutation result = identity(map_.size());
    while (e > 0) {
      if (e & 1ULL) result = compose(result, base);
      e >>= 1ULL;
      if (e > 0) base = compose(base, base);
    }
    return result;
  }

  // lcm of cycle lengths
  std::uint64_t order() const {
    std::vector<bool> seen(map_.size(), false);
    std::uint64_t ord = 1;
    for (std::size_t i = 0; i < map_.size(); ++i) {
      if (seen[i]) continue;
      std::uint64_t len = 0;
      for (std::size_t j = i; !seen[j]; j = map_[j]) {
        seen[j] = true;
        ++len;
      }
      ord = std::lcm(ord, len);
    }
    return ord;
  }

  // (f ∘ g)(x) = f(g(x))
  friend Permutation compose(const Permutation& f, const Permutation& g) {
    if (f.size() != g.size())
      throw DimensionMismatch("permutation composition", f.size(), g.size());
    Permutation out;
    out.map_.resize(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) out.map_[i] = f.map_[g.map_[i]];
    return out;
  }

  friend bool operator==(const Permutation&, const Permutation&) = default;

 private:
  std::vector<std::size_t> map_;
};

// τ ∘ σ ∘ τ⁻¹
inline Permutation conjugate(const Permutation& sigma, const Permutation& tau) {
  return compose(compose(tau, sigma), tau.inverse());
}

}  // namespace lenslab
