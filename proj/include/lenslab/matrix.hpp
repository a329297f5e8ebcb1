#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "lenslab/errors.hpp"
#include "lenslab/rational.hpp"

namespace lenslab {

// Dense row-major matrix. Small and value-semantic; the library works at
// resolutions of at most a few thousand cells.
template <Scalar T>
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, const T& fill = T(0))
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  static Matrix identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = T(1);
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool square() const { return rows_ == cols_; }

  T& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  const T& operator()(std::size_t i, std::size_t j) const {
    return data_[i * cols_ + j];
  }

  std::span<T> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }
  std::span<const T> row(std::size_t i) const {
    return {data_.data() + i * cols_, cols_};
  }
  std::span<const T> values() const { return data_; }

  T row_sum(std::size_t i) const {
    T s(0);
    for (const T& x : row(i)) s += x;
    return s;
  }
  T col_sum(std::size_t j) const {
    T s(0);
    for (std::size_t i = 0; i < rows_; ++i) s += (*this)(i, j);
    return s;
  }
  T total() const {
    T s(0);
    for (const T& x : data_) s += x;
    return s;
  }

  Matrix transpose() const {
    Matrix t(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    return t;
  }

  Matrix& operator+=(const Matrix& o) {
    require_same_shape(o);
    for (std::size_t n = 0; n < data_.size(); ++n) data_[n] += o.data_[n];
    return *this;
  }
  Matrix& operator-=(const Matrix& o) {
    require_same_shape(o);
    for (std::size_t n = 0; n < data_.size(); ++n) data_[n] -= o.data_[n];
    return *this;
  }
  Matrix& operator*=(const T& s) {
    for (T& x : data_) x *= s;
    return *this;
  }

  friend Matrix operator+(Matrix a, const Matrix& b) { return a += b; }
  friend Matrix operator-(Matrix a, const Matrix& b) { return a -= b; }
  friend Matrix operator*(Matrix a, const T& s) { return a *= s; }
  friend Matrix operator*(const T& s, Matrix a) { return a *= s; }

  friend bool operator==(const Matrix& a, const Matrix& b) {
    return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
  }

 private:
  void require_same_shape(const Matrix& o) const {
    if (rows_ != o.rows_ || cols_ != o.cols_)
      throw DimensionMismatch("matrix shapes differ");
  }

  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<T> data_;
};

template <Scalar T>
bool is_zero(const T& x) {
  return x == 0;
}

// Product that skips zero entries of the left factor; couplings built from
// permutations and de Bruijn matrices are very sparse.
template <Scalar T>
Matrix<T> multiply(const Matrix<T>& a, const Matrix<T>& b) {
  if (a.cols() != b.rows())
    throw DimensionMismatch("matrix product", a.cols(), b.rows());
  Matrix<T> out(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t m = 0; m < a.cols(); ++m) {
      const T& x = a(i, m);
      if (is_zero(x)) continue;
      for (std::size_t j = 0; j < b.cols(); ++j) {
        const T& y = b(m, j);
        if (!is_zero(y)) out(i, j) += x * y;
      }
    }
  }
  return out;
}

template <Scalar T>
Matrix<T> matrix_power(Matrix<T> base, unsigned long long n) {
  if (!base.square()) throw DimensionMismatch("power of non-square matrix");
  Matrix<T> result = Matrix<T>::identity(base.rows());
  while (n > 0) {
    if (n & 1ULL) result = multiply(result, base);
    n >>= 1ULL;
    if (n > 0) base = multiply(base, base);
  }
  return result;
}

// Sum of absolute entrywise differences.
template <Scalar T>
T l1_distance(const Matrix<T>& a, const Matrix<T>& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw DimensionMismatch("l1 distance between differently shaped matrices");
  T s(0);
  auto av = a.values();
  auto bv = b.values();
  for (std::size_t n = 0; n < av.size(); ++n) s += abs_value(T(av[n] - bv[n]));
  return s;
}

template <Scalar U, Scalar T>
Matrix<U> matrix_cast(const Matrix<T>& m) {
  Matrix<U> out(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) {
      if constexpr (std::is_same_v<U, T>) {
        out(i, j) = m(i, j);
      } else if constexpr (std::is_same_v<U, double>) {
        out(i, j) = to_double(m(i, j));
      } else {
        out(i, j) = Rational(m(i, j));
      }
    }
  return out;
}

// Nonzero pattern of each row, for sparse-aware products.
template <Scalar T>
std::vector<std::vector<std::pair<std::size_t, T>>> row_supports(const Matrix<T>& m) {
  std::vector<std::vector<std::pair<std::size_t, T>>> out(m.rows());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j)
      if (!is_zero(m(i, j))) out[i].emplace_back(j, m(i, j));
  return out;
}

}  // namespace lenslab
