#pragma once

// The lens action on couplings and the one-sided map.
//
//   lens_step(C)      = Q^T C Q    rho(A x B) -> rho(T^{-1}A x T^{-1}B)
//   one_sided_step(C) = Q^T C      rho(A x B) -> rho(T^{-1}A x B)
//
// For exact systems both are relabelings of C. For stochastic Q the lens is
// exact on step couplings (uniform inside cell rectangles) and forward-only.

#include <algorithm>
#include <cstddef>
#include <functional>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "lenslab/coupling.hpp"
#include "lenslab/errors.hpp"
#include "lenslab/matrix.hpp"
#include "lenslab/system.hpp"

namespace lenslab {

namespace detail {

template <Scalar T>
void require_same_k(const FiniteSystem<T>& sys, const CouplingMatrix<T>& c, const char* op) {
  if (sys.k() != c.k()) throw DimensionMismatch(op, sys.k(), c.k());
}

// Q^T C using the row supports of Q.
template <Scalar T>
Matrix<T> transport_rows(const FiniteSystem<T>& sys, const Matrix<T>& c) {
  const std::size_t k = sys.k();
  Matrix<T> out(k, c.cols());
  for (std::size_t a = 0; a < k; ++a) {
    for (const auto& [i, q] : sys.row_support(a)) {
      auto dst = out.row(i);
      auto src = c.row(a);
      for (std::size_t b = 0; b < src.size(); ++b)
        if (!is_zero(src[b])) dst[b] += q * src[b];
    }
  }
  return out;
}

// M Q using the row supports of Q.
template <Scalar T>
Matrix<T> transport_cols(const FiniteSystem<T>& sys, const Matrix<T>& m) {
  const std::size_t k = sys.k();
  Matrix<T> out(m.rows(), k);
  for (std::size_t i = 0; i < m.rows(); ++i) {
    auto src = m.row(i);
    auto dst = out.row(i);
    for (std::size_t b = 0; b < k; ++b) {
      if (is_zero(src[b])) continue;
      for (const auto& [j, q] : sys.row_support(b)) dst[j] += src[b] * q;
    }
  }
  return out;
}

}  // namespace detail

template <Scalar T>
CouplingMatrix<T> lens_step(const FiniteSystem<T>& sys, const CouplingMatrix<T>& c) {
  detail::require_same_k(sys, c, "lens_step");
  const std::size_t k = sys.k();
  if (sys.exact()) {
    const Permutation& tau = sys.cell_map();
    Matrix<T> out(k, k);
    for (std::size_t a = 0; a < k; ++a)
      for (std::size_t b = 0; b < k; ++b) out(tau(a), tau(b)) = c(a, b);
    return CouplingMatrix<T>::assume_valid(std::move(out));
  }
  return CouplingMatrix<T>::assume_valid(
      detail::transport_cols(sys, detail::transport_rows(sys, c.matrix())));
}

// Q C Q^T, exact systems only.
template <Scalar T>
CouplingMatrix<T> lens_step_inverse(const FiniteSystem<T>& sys, const CouplingMatrix<T>& c) {
  detail::require_same_k(sys, c, "lens_step_inverse");
  if (!sys.exact()) throw NotExact("lens_step_inverse");
  const Permutation& tau = sys.cell_map();
  const std::size_t k = sys.k();
  Matrix<T> out(k, k);
  for (std::size_t a = 0; a < k; ++a)
    for (std::size_t b = 0; b < k; ++b) out(a, b) = c(tau(a), tau(b));
  return CouplingMatrix<T>::assume_valid(std::move(out));
}

template <Scalar T>
CouplingMatrix<T> one_sided_step(const FiniteSystem<T>& sys, const CouplingMatrix<T>& c) {
  detail::require_same_k(sys, c, "one_sided_step");
  const std::size_t k = sys.k();
  if (sys.exact()) {
    const Permutation& tau = sys.cell_map();
    Matrix<T> out(k, k);
    for (std::size_t a = 0; a < k; ++a)
      for (std::size_t b = 0; b < k; ++b) out(tau(a), b) = c(a, b);
    return CouplingMatrix<T>::assume_valid(std::move(out));
  }
  return CouplingMatrix<T>::assume_valid(detail::transport_rows(sys, c.matrix()));
}

// n-fold lens; n < 0 allowed for exact systems.
template <Scalar T>
CouplingMatrix<T> lens_power(const FiniteSystem<T>& sys, const CouplingMatrix<T>& c, long long n) {
  if (sys.exact()) return lens_step(system_power(sys, n), c);
  if (n < 0) throw NegativePowerOfStochastic();
  CouplingMatrix<T> out = c;
  for (long long i = 0; i < n; ++i) out = lens_step(sys, out);
  return out;
}

// ||Q^T C Q - C||_1; zero exactly on self-joinings.
template <Scalar T>
T self_joining_residual(const FiniteSystem<T>& sys, const CouplingMatrix<T>& c) {
  return coupling_distance(lens_step(sys, c), c);
}

// --- exact evaluation through a finer partition -----------------------------
//
// The stochastic lens only sees step couplings. A coupling given at a finer
// resolution is evaluated exactly on the coarse cells whenever every
// T^{-1}(coarse cell) is a union of fine cells; the lens image is then
// restrict(lens_fine(C_fine)).

template <Scalar T>
bool resolves_preimages(const FiniteSystem<T>& fine, const RefinementMap& ref) {
  if (fine.k() != ref.fine().k()) throw DimensionMismatch("resolves_preimages", ref.fine().k(), fine.k());
  for (std::size_t a = 0; a < fine.k(); ++a) {
    std::vector<T> mass(ref.coarse().k(), T(0));
    for (const auto& [u, q] : fine.row_support(a)) mass[ref.parent(u)] += q;
    for (const T& m : mass)
      if (m != 0 && m != 1) return false;
  }
  return true;
}

template <Scalar T>
CouplingMatrix<T> resolved_lens_step(const FiniteSystem<T>& fine, const RefinementMap& ref,
                                     const CouplingMatrix<T>& c_fine) {
  if (!resolves_preimages(fine, ref))
    throw InvalidArgument("fine partition does not resolve preimages of the coarse cells");
  return restrict_coupling(lens_step(fine, c_fine), ref);
}

// ||T~rho - rho||_1 on the coarse cells, evaluated exactly from fine data.
template <Scalar T>
T resolved_self_joining_residual(const FiniteSystem<T>& fine, const RefinementMap& ref,
                                 const CouplingMatrix<T>& c_fine) {
  return coupling_distance(resolved_lens_step(fine, ref, c_fine), restrict_coupling(c_fine, ref));
}

// --- orbits -----------------------------------------------------------------

enum class LensMode { two_sided, one_sided };

template <Scalar T>
struct LensOrbit {
  FiniteSystem<T> system;
  CouplingMatrix<T> initial;
  LensMode mode;
  std::vector<CouplingMatrix<T>> states;  // states[0] == initial
  std::vector<double> repair_residuals;   // float backend: drift before each repair

  std::size_t length() const { return states.size(); }
};

template <Scalar T>
CouplingMatrix<T> step(const FiniteSystem<T>& sys, const CouplingMatrix<T>& c, LensMode mode) {
  return mode == LensMode::two_sided ? lens_step(sys, c) : one_sided_step(sys, c);
}

template <Scalar T>
LensOrbit<T> orbit(const FiniteSystem<T>& sys, const CouplingMatrix<T>& c, std::size_t n,
                   LensMode mode, double repair_tol = 1e-9) {
  detail::require_same_k(sys, c, "orbit");
  LensOrbit<T> out{sys, c, mode, {}, {}};
  out.states.reserve(n + 1);
  out.states.push_back(c);
  for (std::size_t i = 0; i < n; ++i) {
    CouplingMatrix<T> next = step(sys, out.states.back(), mode);
    if constexpr (!is_exact_v<T>) {
      RepairResult r = repair_to_polytope(next.matrix(), repair_tol);
      out.repair_residuals.push_back(r.initial_deviation);
      next = std::move(r.coupling);
    }
    out.states.push_back(std::move(next));
  }
  return out;
}

// (1/N) sum_{n=1..N} states[n]
template <Scalar T>
CouplingMatrix<T> cesaro_average(const LensOrbit<T>& orb, std::size_t n) {
  if (orb.mode != LensMode::two_sided)
    throw InvalidArgument("cesaro_average needs a two-sided orbit");
  if (n == 0 || n >= orb.states.size())
    throw InvalidArgument("cesaro_average: need 1 <= N < orbit length");
  const std::size_t k = orb.initial.k();
  Matrix<T> acc(k, k);
  for (std::size_t i = 1; i <= n; ++i) acc += orb.states[i].matrix();
  acc *= fraction<T>(1, static_cast<std::int64_t>(n));
  return CouplingMatrix<T>::assume_valid(std::move(acc));
}

template <Scalar T>
struct PeriodReport {
  std::optional<std::size_t> period;
  std::vector<T> residual_by_p;  // residual_by_p[p - 1] = ||T~^p C - C||_1
};

template <Scalar T>
PeriodReport<T> detect_period(const FiniteSystem<T>& sys, const CouplingMatrix<T>& c,
                              std::size_t maxp, const T& tol = sum_tolerance<T>() * 1000) {
  if (maxp == 0) throw InvalidArgument("detect_period: maxp must be >= 1");
  detail::require_same_k(sys, c, "detect_period");
  PeriodReport<T> report;
  CouplingMatrix<T> cur = c;
  for (std::size_t p = 1; p <= maxp; ++p) {
    cur = lens_step(sys, cur);
    T r = coupling_distance(cur, c);
    if (!report.period && r <= tol) report.period = p;
    report.residual_by_p.push_back(std::move(r));
  }
  return report;
}

struct HitStatistics {
  std::vector<double> window_density;      // per consecutive window
  std::vector<double> cumulative_density;  // over [0, end of window]
  double overall = 0.0;
};

// Fraction of orbit indices whose state satisfies `target`, per window.
template <Scalar T>
HitStatistics quasi_attractor_hits(const LensOrbit<T>& orb,
                                   const std::function<bool(const CouplingMatrix<T>&)>& target,
                                   std::size_t window) {
  if (orb.states.empty()) throw InvalidArgument("quasi_attractor_hits: empty orbit");
  if (window == 0) throw InvalidArgument("quasi_attractor_hits: window must be >= 1");
  HitStatistics out;
  std::size_t total_hits = 0;
  for (std::size_t start = 0; start < orb.states.size(); start += window) {
    const std::size_t end = std::min(orb.states.size(), start + window);
    std::size_t hits = 0;
    for (std::size_t n = start; n < end; ++n)
      if (target(orb.states[n])) ++hits;
    total_hits += hits;
    out.window_density.push_back(static_cast<double>(hits) / static_cast<double>(end - start));
    out.cumulative_density.push_back(static_cast<double>(total_hits) / static_cast<double>(end));
  }
  out.overall = static_cast<double>(total_hits) / static_cast<double>(orb.states.size());
  return out;
}

// CSV with columns n,residual_to_fixed,distance_to_initial,distance_to_product.
template <Scalar T>
void write_orbit_csv(std::ostream& os, const LensOrbit<T>& orb) {
  os << "n,residual_to_fixed,distance_to_initial,distance_to_product\n";
  const auto product = product_coupling<T>(orb.initial.k());
  for (std::size_t n = 0; n < orb.states.size(); ++n) {
    const auto& s = orb.states[n];
    auto fmt = [](const T& x) {
      if constexpr (is_exact_v<T>) {
        return to_string(x);
      } else {
        std::ostringstream o;
        o.precision(17);
        o << x;
        return o.str();
      }
    };
    os << n << ',' << fmt(self_joining_residual(orb.system, s)) << ','
       << fmt(coupling_distance(s, orb.initial)) << ',' << fmt(coupling_distance(s, product))
       << '\n';
  }
}

}  // namespace lenslab
