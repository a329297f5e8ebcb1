#pragma once

// The coupling space at resolution k: nonnegative k x k matrices with every
// row and column summing to 1/k. C(i, j) stands for rho(A_i x A_j).

#include <algorithm>
#include <cstddef>
#include <string>
#include <variant>
#include <vector>

#include "lenslab/errors.hpp"
#include "lenslab/matrix.hpp"
#include "lenslab/partition.hpp"
#include "lenslab/permutation.hpp"
#include "lenslab/rational.hpp"
#include "lenslab/system.hpp"

namespace lenslab {

template <Scalar T>
std::vector<Diagnostic> coupling_violations(const Matrix<T>& m,
                                            const T& tol = sum_tolerance<T>()) {
  std::vector<Diagnostic> out;
  if (!m.square() || m.rows() == 0) {
    out.push_back({"shape", {m.rows(), m.cols()}, "coupling must be square and nonempty"});
    return out;
  }
  const std::size_t k = m.rows();
  const T target = fraction<T>(1, static_cast<std::int64_t>(k));
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < k; ++j)
      if (m(i, j) < 0)
        out.push_back({"negative_entry(" + std::to_string(i) + "," + std::to_string(j) + ")",
                       {i, j}, "entry is negative"});
  for (std::size_t i = 0; i < k; ++i)
    if (abs_value(T(m.row_sum(i) - target)) > tol)
      out.push_back({"row_sum(" + std::to_string(i) + ")", {i}, "row sum differs from 1/k"});
  for (std::size_t j = 0; j < k; ++j)
    if (abs_value(T(m.col_sum(j) - target)) > tol)
      out.push_back({"col_sum(" + std::to_string(j) + ")", {j}, "column sum differs from 1/k"});
  return out;
}

template <Scalar T>
class CouplingMatrix {
 public:
  static CouplingMatrix from_matrix(Matrix<T> m) {
    auto diags = coupling_violations(m);
    if (!diags.empty())
      throw InvalidCoupling("not in the transportation polytope: " + detail::join_names(diags));
    return CouplingMatrix(std::move(m));
  }

  // For operations whose output provably stays in the polytope (float
  // rounding aside). Skips the O(k^2) check.
  static CouplingMatrix assume_valid(Matrix<T> m) { return CouplingMatrix(std::move(m)); }

  std::size_t k() const { return c_.rows(); }
  const Matrix<T>& matrix() const { return c_; }
  const T& operator()(std::size_t i, std::size_t j) const { return c_(i, j); }

  // Largest deviation of a row or column sum from 1/k.
  T max_sum_deviation() const {
    const T target = fraction<T>(1, static_cast<std::int64_t>(k()));
    T worst(0);
    for (std::size_t i = 0; i < k(); ++i) {
      worst = std::max(worst, abs_value(T(c_.row_sum(i) - target)));
      worst = std::max(worst, abs_value(T(c_.col_sum(i) - target)));
    }
    return worst;
  }

  friend bool operator==(const CouplingMatrix&, const CouplingMatrix&) = default;

 private:
  explicit CouplingMatrix(Matrix<T> m) : c_(std::move(m)) {}
  Matrix<T> c_;
};

template <Scalar U, Scalar T>
CouplingMatrix<U> coupling_cast(const CouplingMatrix<T>& c) {
  return CouplingMatrix<U>::assume_valid(matrix_cast<U>(c.matrix()));
}

// mu ⊗ mu
template <Scalar T>
CouplingMatrix<T> product_coupling(std::size_t k) {
  if (k == 0) throw InvalidArgument("product_coupling: k must be >= 1");
  const auto kk = static_cast<std::int64_t>(k);
  return CouplingMatrix<T>::assume_valid(Matrix<T>(k, k, fraction<T>(1, kk * kk)));
}

// Graph coupling of the cell permutation sigma (forward map): the mass of
// A_j is carried to A_{sigma(j)}, so C(sigma(j), j) = 1/k.
template <Scalar T>
CouplingMatrix<T> graph_coupling(const Permutation& sigma) {
  const std::size_t k = sigma.size();
  if (k == 0) throw InvalidArgument("graph_coupling of an empty permutation");
  Matrix<T> m(k, k);
  const T w = fraction<T>(1, static_cast<std::int64_t>(k));
  for (std::size_t j = 0; j < k; ++j) m(sigma(j), j) = w;
  return CouplingMatrix<T>::assume_valid(std::move(m));
}

// Composition of the Markov operators attached to two couplings:
// k * C1 * C2. Graph couplings compose like their permutations.
template <Scalar T>
CouplingMatrix<T> markov_compose(const CouplingMatrix<T>& c1, const CouplingMatrix<T>& c2) {
  if (c1.k() != c2.k()) throw DimensionMismatch("markov_compose", c1.k(), c2.k());
  Matrix<T> m = multiply(c1.matrix(), c2.matrix());
  m *= T(static_cast<long>(c1.k()));
  return CouplingMatrix<T>::assume_valid(std::move(m));
}

// a*C + (1-a)*C'
template <Scalar T>
CouplingMatrix<T> mix(const T& a, const CouplingMatrix<T>& c, const CouplingMatrix<T>& d) {
  if (c.k() != d.k()) throw DimensionMismatch("mix", c.k(), d.k());
  if (a < 0 || a > 1) throw InvalidArgument("mix weight outside [0,1]");
  Matrix<T> m = c.matrix() * a;
  m += d.matrix() * T(T(1) - a);
  return CouplingMatrix<T>::assume_valid(std::move(m));
}

// Relatively independent extension along a block refinement: every coarse
// entry is spread uniformly over its r x r block.
template <Scalar T>
CouplingMatrix<T> lift_coupling(const CouplingMatrix<T>& coarse, const RefinementMap& ref) {
  if (ref.coarse().k() != coarse.k())
    throw DimensionMismatch("lift_coupling", ref.coarse().k(), coarse.k());
  const std::size_t r = ref.ratio();
  const std::size_t n = ref.fine().k();
  const auto rr = static_cast<std::int64_t>(r * r);
  const T scale = fraction<T>(1, rr);
  Matrix<T> m(n, n);
  for (std::size_t u = 0; u < n; ++u)
    for (std::size_t v = 0; v < n; ++v) m(u, v) = coarse(u / r, v / r) * scale;
  return CouplingMatrix<T>::assume_valid(std::move(m));
}

// Push-forward to the coarse partition (sum over blocks).
template <Scalar T>
CouplingMatrix<T> restrict_coupling(const CouplingMatrix<T>& fine, const RefinementMap& ref) {
  if (ref.fine().k() != fine.k()) throw DimensionMismatch("restrict_coupling", ref.fine().k(), fine.k());
  const std::size_t r = ref.ratio();
  const std::size_t k = ref.coarse().k();
  Matrix<T> m(k, k);
  for (std::size_t u = 0; u < fine.k(); ++u)
    for (std::size_t v = 0; v < fine.k(); ++v) {
      const T& x = fine(u, v);
      if (!is_zero(x)) m(u / r, v / r) += x;
    }
  return CouplingMatrix<T>::assume_valid(std::move(m));
}

// Entrywise L1 distance. At fixed resolution the cell indicators are a
// finite total family of test functions, so this metrizes weak convergence.
template <Scalar T>
T coupling_distance(const CouplingMatrix<T>& a, const CouplingMatrix<T>& b) {
  if (a.k() != b.k()) throw DimensionMismatch("coupling_distance", a.k(), b.k());
  return l1_distance(a.matrix(), b.matrix());
}

enum class NeighborhoodKind { entrywise, permutation_diagonal };

// U(alpha, eps, P) (entrywise) or V(alpha, eta, eps) (permutation diagonal).
template <Scalar T>
struct NeighborhoodSpec {
  NeighborhoodKind kind;
  T epsilon;
  Matrix<T> target;  // entrywise kind
  Permutation eta;   // permutation-diagonal kind

  static NeighborhoodSpec entrywise(Matrix<T> p, T eps) {
    if (!(eps > 0)) throw InvalidArgument("neighborhood epsilon must be positive");
    if (!p.square()) throw DimensionMismatch("neighborhood target must be square");
    return {NeighborhoodKind::entrywise, std::move(eps), std::move(p), Permutation{}};
  }

  static NeighborhoodSpec permutation_diagonal(Permutation eta, T eps) {
    if (!(eps > 0)) throw InvalidArgument("neighborhood epsilon must be positive");
    return {NeighborhoodKind::permutation_diagonal, std::move(eps), Matrix<T>{}, std::move(eta)};
  }
};

template <Scalar T>
bool in_neighborhood(const CouplingMatrix<T>& c, const NeighborhoodSpec<T>& spec) {
  if (spec.kind == NeighborhoodKind::entrywise) {
    if (spec.target.rows() != c.k()) throw DimensionMismatch("in_neighborhood", spec.target.rows(), c.k());
    for (std::size_t i = 0; i < c.k(); ++i)
      for (std::size_t j = 0; j < c.k(); ++j)
        if (!(abs_value(T(c(i, j) - spec.target(i, j))) < spec.epsilon)) return false;
    return true;
  }
  if (spec.eta.size() != c.k()) throw DimensionMismatch("in_neighborhood", spec.eta.size(), c.k());
  const T w = fraction<T>(1, static_cast<std::int64_t>(c.k()));
  for (std::size_t i = 0; i < c.k(); ++i)
    if (!(abs_value(T(c(i, spec.eta(i)) - w)) < spec.epsilon)) return false;
  return true;
}

struct RepairResult {
  CouplingMatrix<double> coupling;
  double initial_deviation = 0.0;  // max |row/col sum - 1/k| before repair
  int iterations = 0;
};

// Sinkhorn row/column rescaling back onto the polytope after float drift.
inline RepairResult repair_to_polytope(const Matrix<double>& m, double tol) {
  constexpr double kTarget = 1e-13;
  constexpr int kMaxIterations = 10000;
  if (!m.square() || m.rows() == 0) throw NotRepairable("coupling must be square and nonempty");
  const std::size_t k = m.rows();
  const double w = 1.0 / static_cast<double>(k);

  auto deviation = [&](const Matrix<double>& x) {
    double worst = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
      worst = std::max(worst, std::fabs(x.row_sum(i) - w));
      worst = std::max(worst, std::fabs(x.col_sum(i) - w));
    }
    return worst;
  };

  for (double x : m.values())
    if (x < -tol) throw NotRepairable("entry below -tol");
  const double initial = deviation(m);
  if (initial > tol) throw NotRepairable("row/column sum deviation exceeds tolerance");
  bool negative = false;
  for (double x : m.values()) negative = negative || x < 0.0;
  if (initial < kTarget && !negative)
    return {CouplingMatrix<double>::assume_valid(m), initial, 0};

  Matrix<double> x = m;
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < k; ++j) x(i, j) = std::max(0.0, x(i, j));

  int it = 0;
  for (; it < kMaxIterations && deviation(x) >= kTarget; ++it) {
    for (std::size_t i = 0; i < k; ++i) {
      const double s = x.row_sum(i);
      if (s <= 0.0) throw NotRepairable("zero row cannot be rescaled");
      for (double& v : x.row(i)) v *= w / s;
    }
    for (std::size_t j = 0; j < k; ++j) {
      const double s = x.col_sum(j);
      if (s <= 0.0) throw NotRepairable("zero column cannot be rescaled");
      for (std::size_t i = 0; i < k; ++i) x(i, j) *= w / s;
    }
  }
  if (deviation(x) >= kTarget) throw NotRepairable("Sinkhorn iteration did not converge");
  return {CouplingMatrix<double>::assume_valid(std::move(x)), initial, it};
}

}  // namespace lenslab
