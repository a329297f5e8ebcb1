#pragma once

// Finite measure-preserving systems at resolution k.
//
// Convention, used everywhere: Q[a][i] = k * mu(A_a ∩ T^{-1} A_i).
// For an exact system with forward cell map tau (T maps A_a onto
// A_{tau(a)}), Q[a][tau(a)] = 1 and all other entries vanish.

#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "lenslab/errors.hpp"
#include "lenslab/matrix.hpp"
#include "lenslab/partition.hpp"
#include "lenslab/permutation.hpp"
#include "lenslab/rational.hpp"

namespace lenslab {

struct Diagnostic {
  std::string name;                  // e.g. "row_sum(3)"
  std::vector<std::size_t> indices;  // offending indices
  std::string detail;
};

// Checks the FiniteSystem invariants on a raw matrix. Empty result means valid.
template <Scalar T>
std::vector<Diagnostic> validate_system_matrix(const Matrix<T>& q, bool exact_flag,
                                               const T& tol = sum_tolerance<T>()) {
  std::vector<Diagnostic> out;
  if (!q.square() || q.rows() == 0) {
    out.push_back({"shape", {q.rows(), q.cols()}, "Q must be square and nonempty"});
    return out;
  }
  const std::size_t k = q.rows();
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < k; ++j)
      if (q(i, j) < 0)
        out.push_back({"negative_entry(" + std::to_string(i) + "," + std::to_string(j) + ")",
                       {i, j},
                       "entry is negative"});
  for (std::size_t i = 0; i < k; ++i) {
    T dev = abs_value(T(q.row_sum(i) - T(1)));
    if (dev > tol)
      out.push_back({"row_sum(" + std::to_string(i) + ")", {i},
                     "row sums to " + std::to_string(to_double(q.row_sum(i)))});
  }
  for (std::size_t j = 0; j < k; ++j) {
    T dev = abs_value(T(q.col_sum(j) - T(1)));
    if (dev > tol)
      out.push_back({"col_sum(" + std::to_string(j) + ")", {j},
                     "column sums to " + std::to_string(to_double(q.col_sum(j)))});
  }
  if (exact_flag) {
    for (std::size_t i = 0; i < k; ++i)
      for (std::size_t j = 0; j < k; ++j)
        if (q(i, j) != 0 && q(i, j) != 1)
          out.push_back({"exact_entry(" + std::to_string(i) + "," + std::to_string(j) + ")",
                         {i, j},
                         "exact system entries must be 0 or 1"});
  }
  return out;
}

namespace detail {

template <Scalar T>
std::optional<Permutation> as_permutation(const Matrix<T>& q) {
  std::vector<std::size_t> images(q.rows());
  for (std::size_t a = 0; a < q.rows(); ++a) {
    std::optional<std::size_t> hit;
    for (std::size_t i = 0; i < q.cols(); ++i) {
      if (q(a, i) == 0) continue;
      if (q(a, i) != 1 || hit) return std::nullopt;
      hit = i;
    }
    if (!hit) return std::nullopt;
    images[a] = *hit;
  }
  try {
    return Permutation(std::move(images));
  } catch (const InvalidPermutation&) {
    return std::nullopt;
  }
}

inline std::string join_names(const std::vector<Diagnostic>& d) {
  std::string s;
  for (const auto& x : d) s += (s.empty() ? "" : ", ") + x.name;
  return s;
}

}  // namespace detail

template <Scalar T>
class FiniteSystem {
 public:
  // Validates; the exact flag is derived (true iff Q is a permutation matrix).
  static FiniteSystem from_matrix(Matrix<T> q) {
    auto diags = validate_system_matrix(q, false);
    if (!diags.empty())
      throw InvalidSystem("not doubly stochastic: " + detail::join_names(diags));
    Partition p = make_uniform_partition(q.rows());
    return FiniteSystem(std::move(p), std::move(q));
  }

  static FiniteSystem from_matrix(Partition p, Matrix<T> q) {
    if (p.k() != q.rows()) throw DimensionMismatch("partition vs matrix", p.k(), q.rows());
    auto diags = validate_system_matrix(q, false);
    if (!diags.empty())
      throw InvalidSystem("not doubly stochastic: " + detail::join_names(diags));
    return FiniteSystem(std::move(p), std::move(q));
  }

  static FiniteSystem from_permutation(const Permutation& tau) {
    return from_permutation(make_uniform_partition(tau.size()), tau);
  }

  static FiniteSystem from_permutation(Partition p, const Permutation& tau) {
    if (p.k() != tau.size()) throw DimensionMismatch("partition vs permutation", p.k(), tau.size());
    Matrix<T> q(tau.size(), tau.size());
    for (std::size_t a = 0; a < tau.size(); ++a) q(a, tau(a)) = T(1);
    return FiniteSystem(std::move(p), std::move(q));
  }

  std::size_t k() const { return partition_.k(); }
  const Partition& partition() const { return partition_; }
  const Matrix<T>& matrix() const { return q_; }
  bool exact() const { return tau_.has_value(); }

  // Forward cell map of an exact system.
  const Permutation& cell_map() const {
    if (!tau_) throw NotExact("cell_map");
    return *tau_;
  }

  // Nonzero entries of row a of Q, as (column, value).
  const std::vector<std::pair<std::size_t, T>>& row_support(std::size_t a) const {
    return support_[a];
  }

 private:
  FiniteSystem(Partition p, Matrix<T> q)
      : partition_(std::move(p)), q_(std::move(q)), support_(row_supports(q_)) {
    tau_ = detail::as_permutation(q_);
  }

  Partition partition_;
  Matrix<T> q_;
  std::optional<Permutation> tau_;
  std::vector<std::vector<std::pair<std::size_t, T>>> support_;
};

template <Scalar T>
std::vector<Diagnostic> validate_system(const FiniteSystem<T>& sys) {
  return validate_system_matrix(sys.matrix(), sys.exact());
}

// Q^n; for exact systems negative n uses (Q^T)^{|n|}.
template <Scalar T>
FiniteSystem<T> system_power(const FiniteSystem<T>& sys, long long n) {
  if (sys.exact())
    return FiniteSystem<T>::from_permutation(sys.partition(), sys.cell_map().power(n));
  if (n < 0) throw NegativePowerOfStochastic();
  return FiniteSystem<T>::from_matrix(sys.partition(),
                                      matrix_power(sys.matrix(), static_cast<unsigned long long>(n)));
}

}  // namespace lenslab
