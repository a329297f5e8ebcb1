#pragma once

// Fixed points of the lens: {C : Q^T C Q = C, row/col sums 1/k, C >= 0}.
//
// The product coupling is strictly positive and always fixed, so it lies in
// the relative interior of that polytope. Its affine hull is therefore the
// whole affine solution set of the equality constraints, and a nullspace
// basis of the homogeneous system describes it completely.

#include <cstddef>
#include <vector>

#include "lenslab/coupling.hpp"
#include "lenslab/errors.hpp"
#include "lenslab/lens.hpp"
#include "lenslab/matrix.hpp"

namespace lenslab {

inline constexpr std::size_t kFixedSpaceMaxK = 64;

// Basis of {x : A x = 0} from the reduced row echelon form. Pivots with
// magnitude <= pivot_tol are treated as zero (always exact for rationals).
template <Scalar T>
std::vector<std::vector<T>> nullspace(Matrix<T> a, const T& pivot_tol = T(0)) {
  const std::size_t rows = a.rows();
  const std::size_t cols = a.cols();
  std::vector<std::size_t> pivot_cols;
  std::size_t r = 0;
  for (std::size_t c = 0; c < cols && r < rows; ++c) {
    std::size_t best = rows;
    T best_mag(0);
    for (std::size_t i = r; i < rows; ++i) {
      T mag = abs_value(a(i, c));
      if (mag > pivot_tol && (best == rows || mag > best_mag)) {
        best = i;
        best_mag = mag;
        if constexpr (is_exact_v<T>) break;  // any nonzero pivot is exact
      }
    }
    if (best == rows) continue;
    if (best != r)
      for (std::size_t j = 0; j < cols; ++j) std::swap(a(r, j), a(best, j));
    const T inv = T(1) / a(r, c);
    for (std::size_t j = c; j < cols; ++j) a(r, j) *= inv;
    for (std::size_t i = 0; i < rows; ++i) {
      if (i == r || is_zero(a(i, c))) continue;
      const T f = a(i, c);
      for (std::size_t j = c; j < cols; ++j)
        if (!is_zero(a(r, j))) a(i, j) -= f * a(r, j);
    }
    pivot_cols.push_back(c);
    ++r;
  }
  std::vector<bool> is_pivot(cols, false);
  for (auto c : pivot_cols) is_pivot[c] = true;
  std::vector<std::vector<T>> basis;
  for (std::size_t free = 0; free < cols; ++free) {
    if (is_pivot[free]) continue;
    std::vector<T> v(cols, T(0));
    v[free] = T(1);
    for (std::size_t p = 0; p < pivot_cols.size(); ++p) v[pivot_cols[p]] = -a(p, free);
    basis.push_back(std::move(v));
  }
  return basis;
}

template <Scalar T>
struct FixedPointSpace {
  std::size_t k = 0;
  std::size_t dimension = 0;               // affine dimension
  std::vector<Matrix<T>> directions;       // basis of the direction space
  CouplingMatrix<T> interior_point;        // the product coupling
};

// Homogeneous constraint matrix on vec(C) (index i*k + j):
//   (Q^T C Q - C)(i, j) = 0, row sums = 0, column sums = 0.
template <Scalar T>
Matrix<T> fixed_point_constraints(const FiniteSystem<T>& sys) {
  const std::size_t k = sys.k();
  const std::size_t n = k * k;
  Matrix<T> a(n + 2 * k, n);
  const Matrix<T>& q = sys.matrix();
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < k; ++j) {
      const std::size_t row = i * k + j;
      for (std::size_t x = 0; x < k; ++x) {
        if (is_zero(q(x, i))) continue;
        for (std::size_t y = 0; y < k; ++y)
          if (!is_zero(q(y, j))) a(row, x * k + y) += q(x, i) * q(y, j);
      }
      a(row, row) -= T(1);
    }
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < k; ++j) {
      a(n + i, i * k + j) = T(1);
      a(n + k + j, i * k + j) = T(1);
    }
  return a;
}

template <Scalar T>
FixedPointSpace<T> fixed_point_space(const FiniteSystem<T>& sys) {
  const std::size_t k = sys.k();
  if (k > kFixedSpaceMaxK)
    throw SizeGuard("fixed_point_space: k = " + std::to_string(k) + " exceeds " +
                    std::to_string(kFixedSpaceMaxK));
  T tol(0);
  if constexpr (!is_exact_v<T>) tol = 1e-10;
  auto basis = nullspace(fixed_point_constraints(sys), tol);
  FixedPointSpace<T> out{k, basis.size(), {}, product_coupling<T>(k)};
  for (auto& v : basis) {
    Matrix<T> d(k, k);
    for (std::size_t i = 0; i < k; ++i)
      for (std::size_t j = 0; j < k; ++j) d(i, j) = std::move(v[i * k + j]);
    out.directions.push_back(std::move(d));
  }
  return out;
}

}  // namespace lenslab
