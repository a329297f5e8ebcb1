#pragma once

// Test-side reference computations written directly from the definitions,
// without the library's sparse paths.

#include <algorithm>
#include <cstddef>
#include <vector>

#include "lenslab/lenslab.hpp"

namespace oracle {

using lenslab::Matrix;
using lenslab::Rational;

template <class T>
Matrix<T> naive_multiply(const Matrix<T>& a, const Matrix<T>& b) {
  Matrix<T> c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < b.cols(); ++j) {
      T s(0);
      for (std::size_t t = 0; t < a.cols(); ++t) s += a(i, t) * b(t, j);
      c(i, j) = s;
    }
  return c;
}

template <class T>
Matrix<T> naive_power(const Matrix<T>& a, std::size_t n) {
  Matrix<T> out = Matrix<T>::identity(a.rows());
  for (std::size_t i = 0; i < n; ++i) out = naive_multiply(out, a);
  return out;
}

template <class T>
Matrix<T> naive_transpose(const Matrix<T>& a) {
  Matrix<T> t(a.cols(), a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) t(j, i) = a(i, j);
  return t;
}

// sum_{x,y} Q[x][i] C[x][y] Q[y][j]
template <class T>
Matrix<T> naive_lens(const Matrix<T>& q, const Matrix<T>& c) {
  const std::size_t k = q.rows();
  Matrix<T> out(k, k);
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < k; ++j) {
      T s(0);
      for (std::size_t x = 0; x < k; ++x)
        for (std::size_t y = 0; y < k; ++y) s += q(x, i) * c(x, y) * q(y, j);
      out(i, j) = s;
    }
  return out;
}

// De Bruijn matrix written from the word definition: w -> w[1..] + s.
inline Matrix<Rational> de_bruijn(std::size_t d, std::size_t len) {
  std::size_t k = 1;
  for (std::size_t t = 0; t < len; ++t) k *= d;
  Matrix<Rational> q(k, k);
  for (std::size_t w = 0; w < k; ++w)
    for (std::size_t s = 0; s < d; ++s) q(w, (w * d) % k + s) = Rational(1, static_cast<long>(d));
  return q;
}

template <class T>
T l1(const Matrix<T>& a, const Matrix<T>& b) {
  T s(0);
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) s += lenslab::abs_value(T(a(i, j) - b(i, j)));
  return s;
}

inline std::vector<lenslab::Permutation> all_perms(std::size_t n) {
  std::vector<std::size_t> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = i;
  std::vector<lenslab::Permutation> out;
  do {
    out.emplace_back(v);
  } while (std::next_permutation(v.begin(), v.end()));
  return out;
}

}  // namespace oracle
