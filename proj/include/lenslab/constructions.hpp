#pragma once

// Executable constructions on top of the lens: interval exchanges realizing
// rational couplings, the rigidity probe, transitivity witnesses for the
// Bernoulli shift, the entropy factor and its block realizer, and maps
// commuting with Bernoulli shifts and odometer levels.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <set>
#include <string>
#include <vector>

#include "lenslab/coupling.hpp"
#include "lenslab/errors.hpp"
#include "lenslab/lens.hpp"
#include "lenslab/matrix.hpp"
#include "lenslab/partition.hpp"
#include "lenslab/permutation.hpp"
#include "lenslab/rational.hpp"
#include "lenslab/system.hpp"
#include "lenslab/zoo.hpp"

namespace lenslab {

// ---------------------------------------------------------------------------
// Rational targets and their interval-exchange realization
// ---------------------------------------------------------------------------

// P = m / L with integer m whose rows and columns all sum to L / k.
class RationalTarget {
 public:
  using IntMatrix = std::vector<std::vector<std::int64_t>>;

  RationalTarget(std::size_t k, std::int64_t denominator, IntMatrix m)
      : k_(k), denominator_(denominator), m_(std::move(m)) {
    if (k_ == 0) throw InfeasibleTarget("target needs k >= 1");
    if (denominator_ <= 0 || denominator_ % static_cast<std::int64_t>(k_) != 0)
      throw InfeasibleTarget("denominator L must be a positive multiple of k");
    if (m_.size() != k_) throw InfeasibleTarget("target must have k rows");
    const std::int64_t share = denominator_ / static_cast<std::int64_t>(k_);
    std::vector<std::int64_t> col(k_, 0);
    for (std::size_t i = 0; i < k_; ++i) {
      if (m_[i].size() != k_) throw InfeasibleTarget("target must have k columns");
      std::int64_t row = 0;
      for (std::size_t j = 0; j < k_; ++j) {
        if (m_[i][j] < 0) throw InfeasibleTarget("target entries must be nonnegative");
        row += m_[i][j];
        col[j] += m_[i][j];
      }
      if (row != share) throw InfeasibleTarget("row " + std::to_string(i) + " does not sum to L/k");
    }
    for (std::size_t j = 0; j < k_; ++j)
      if (col[j] != share) throw InfeasibleTarget("column " + std::to_string(j) + " does not sum to L/k");
  }

  std::size_t k() const { return k_; }
  std::int64_t denominator() const { return denominator_; }
  const IntMatrix& counts() const { return m_; }

  template <Scalar T>
  CouplingMatrix<T> coupling() const {
    Matrix<T> c(k_, k_);
    for (std::size_t i = 0; i < k_; ++i)
      for (std::size_t j = 0; j < k_; ++j) c(i, j) = fraction<T>(m_[i][j], denominator_);
    return CouplingMatrix<T>::assume_valid(std::move(c));
  }

  friend bool operator==(const RationalTarget&, const RationalTarget&) = default;

 private:
  std::size_t k_;
  std::int64_t denominator_;
  IntMatrix m_;
};

// Interval exchange on k*L equal subintervals whose graph coupling, pushed to
// the k coarse cells, equals the target exactly. Coarse cell c owns the fine
// intervals c*L .. c*L + L - 1.
//
// Greedy sweep: source cells are handled in order;
// source cell j sends k*m[i][j] consecutive subintervals to destination cell
// i (i in order), landing at the first free subintervals of cell i. The graph
// coupling puts the mass of A_j carried into A_i at (i, j), so m[i][j] counts
// source j -> destination i.
inline IETSpec realize_coupling_as_iet(const RationalTarget& target) {
  const std::size_t k = target.k();
  const auto len = static_cast<std::size_t>(target.denominator());
  const auto& m = target.counts();
  if (k * len > (std::size_t{1} << 24)) throw SizeGuard("realize_coupling_as_iet: k*L too large");
  std::vector<std::size_t> images(k * len);
  std::vector<std::size_t> dest_cursor(k, 0);
  for (std::size_t src = 0; src < k; ++src) {
    std::size_t src_cursor = 0;
    for (std::size_t dst = 0; dst < k; ++dst) {
      const auto count = static_cast<std::size_t>(m[dst][src]) * k;
      if (src_cursor + count > len || dest_cursor[dst] + count > len)
        throw InfeasibleTarget("marginals violated during sweep");
      for (std::size_t t = 0; t < count; ++t)
        images[src * len + src_cursor + t] = dst * len + dest_cursor[dst] + t;
      src_cursor += count;
      dest_cursor[dst] += count;
    }
  }
  return IETSpec(Permutation(std::move(images)));
}

// Coupling induced on the k coarse cells by an IET on k*L pieces.
template <Scalar T>
CouplingMatrix<T> induced_coupling(const IETSpec& iet, std::size_t k) {
  if (k == 0 || iet.n_intervals % k != 0)
    throw DimensionMismatch("IET interval count is not a multiple of k");
  return restrict_coupling(graph_coupling<T>(iet.permutation),
                           block_refinement(k, iet.n_intervals / k));
}

template <Scalar T>
struct DensityGap {
  RationalTarget target;
  T distance;  // L1 distance between target coupling and the input
};

namespace detail {

// 0/1 matrix with given row and column sums, supported on `allowed`
// (Edmonds-Karp on source -> rows -> columns -> sink). Returns false when no
// such matrix exists.
inline bool bipartite_fill(const std::vector<std::vector<std::size_t>>& allowed,
                           const std::vector<std::int64_t>& row_need,
                           const std::vector<std::int64_t>& col_need,
                           std::vector<std::vector<int>>& x) {
  const std::size_t k = row_need.size();
  const std::size_t nodes = 2 * k + 2;
  const std::size_t source = 2 * k, sink = 2 * k + 1;
  std::vector<std::vector<std::int64_t>> cap(nodes, std::vector<std::int64_t>(nodes, 0));
  std::int64_t required = 0;
  for (std::size_t i = 0; i < k; ++i) {
    cap[source][i] = row_need[i];
    cap[k + i][sink] = col_need[i];
    required += row_need[i];
    for (std::size_t j : allowed[i]) cap[i][k + j] = 1;
  }
  std::int64_t flow = 0;
  while (true) {
    std::vector<std::size_t> parent(nodes, nodes);
    parent[source] = source;
    std::vector<std::size_t> queue{source};
    for (std::size_t h = 0; h < queue.size() && parent[sink] == nodes; ++h) {
      const std::size_t u = queue[h];
      for (std::size_t v = 0; v < nodes; ++v)
        if (parent[v] == nodes && cap[u][v] > 0) {
          parent[v] = u;
          queue.push_back(v);
        }
    }
    if (parent[sink] == nodes) break;
    std::int64_t push = INT64_MAX;
    for (std::size_t v = sink; v != source; v = parent[v]) push = std::min(push, cap[parent[v]][v]);
    for (std::size_t v = sink; v != source; v = parent[v]) {
      cap[parent[v]][v] -= push;
      cap[v][parent[v]] += push;
    }
    flow += push;
  }
  if (flow != required) return false;
  x.assign(k, std::vector<int>(k, 0));
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j : allowed[i]) x[i][j] = cap[i][k + j] == 0 ? 1 : 0;
  return true;
}

}  // namespace detail

// Rounds L*C to integers and repairs the marginals with a 0/1 transportation
// fix-up on the entries with a positive fractional part. Every entry moves by
// less than 1/L, so the L1 distance is below k^2 / L.
template <Scalar T>
DensityGap<T> density_gap(const CouplingMatrix<T>& c, std::int64_t denominator) {
  const std::size_t k = c.k();
  if (denominator <= 0 || denominator % static_cast<std::int64_t>(k) != 0)
    throw InvalidArgument("density_gap: L must be a positive multiple of k");
  const std::int64_t share = denominator / static_cast<std::int64_t>(k);
  RationalTarget::IntMatrix base(k, std::vector<std::int64_t>(k, 0));
  std::vector<std::vector<double>> fractional(k, std::vector<double>(k, 0.0));
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < k; ++j) {
      const T scaled = c(i, j) * T(denominator);
      if constexpr (is_exact_v<T>) {
        const Rational f = frac(scaled);
        base[i][j] = static_cast<std::int64_t>(Rational(scaled - f).convert_to<long long>());
        fractional[i][j] = to_double(f);
      } else {
        double fl = std::floor(scaled + 1e-9);
        base[i][j] = static_cast<std::int64_t>(fl);
        fractional[i][j] = std::max(0.0, scaled - fl);
      }
    }
  std::vector<std::int64_t> row_need(k, share), col_need(k, share);
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < k; ++j) {
      row_need[i] -= base[i][j];
      col_need[j] -= base[i][j];
    }
  for (std::size_t i = 0; i < k; ++i)
    if (row_need[i] < 0 || col_need[i] < 0) throw InfeasibleTarget("density_gap: marginals overshoot");

  // Prefer entries with larger fractional part.
  std::vector<std::vector<std::size_t>> allowed(k);
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j < k; ++j)
      if (fractional[i][j] > 0.0) allowed[i].push_back(j);
    std::stable_sort(allowed[i].begin(), allowed[i].end(),
                     [&](std::size_t a, std::size_t b) { return fractional[i][a] > fractional[i][b]; });
  }
  std::vector<std::vector<int>> add;
  if (!detail::bipartite_fill(allowed, row_need, col_need, add)) {
    for (auto& row : allowed) {
      row.resize(k);
      std::iota(row.begin(), row.end(), std::size_t{0});
    }
    if (!detail::bipartite_fill(allowed, row_need, col_need, add))
      throw InfeasibleTarget("density_gap: no integer repair of the marginals");
  }
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < k; ++j) base[i][j] += add[i][j];
  RationalTarget target(k, denominator, std::move(base));
  T dist = coupling_distance(target.coupling<T>(), c);
  return {std::move(target), std::move(dist)};
}

// ---------------------------------------------------------------------------
// Rigidity probe
// ---------------------------------------------------------------------------

using Blocks = std::vector<std::vector<std::size_t>>;

// Sizes 1, 2, ..., r with the remainder added to the last block; always
// pairwise distinct and summing to k.
inline std::vector<std::size_t> distinct_block_sizes(std::size_t k) {
  if (k == 0) throw InvalidArgument("distinct_block_sizes: k must be >= 1");
  std::vector<std::size_t> sizes;
  std::size_t used = 0;
  for (std::size_t s = 1; used + s <= k; ++s) {
    sizes.push_back(s);
    used += s;
  }
  sizes.back() += k - used;
  return sizes;
}

inline Blocks consecutive_blocks(const std::vector<std::size_t>& sizes) {
  Blocks out;
  std::size_t next = 0;
  for (std::size_t s : sizes) {
    std::vector<std::size_t> b(s);
    std::iota(b.begin(), b.end(), next);
    next += s;
    out.push_back(std::move(b));
  }
  return out;
}

inline void validate_blocks(const Blocks& blocks, std::size_t k) {
  std::vector<bool> seen(k, false);
  std::set<std::size_t> sizes;
  std::size_t total = 0;
  for (const auto& b : blocks) {
    if (b.empty()) throw BadBlocks("empty block");
    if (!sizes.insert(b.size()).second)
      throw BadBlocks("block sizes must be pairwise distinct (size " + std::to_string(b.size()) + " repeats)");
    for (std::size_t c : b) {
      if (c >= k || seen[c]) throw BadBlocks("blocks must partition the cells exactly once");
      seen[c] = true;
      ++total;
    }
  }
  if (total != k) throw BadBlocks("blocks do not cover every cell");
}

// xi = sum_i a_i mu_{B_i} ⊗ mu_{B_i}: mass 1/(k |B_i|) on each entry of the
// block square B_i x B_i.
template <Scalar T>
CouplingMatrix<T> block_diagonal_coupling(const Blocks& blocks, std::size_t k) {
  validate_blocks(blocks, k);
  Matrix<T> m(k, k);
  for (const auto& b : blocks) {
    const T w = fraction<T>(1, static_cast<std::int64_t>(k * b.size()));
    for (std::size_t u : b)
      for (std::size_t v : b) m(u, v) = w;
  }
  return CouplingMatrix<T>::assume_valid(std::move(m));
}

// Mass that the n-th lens image of xi puts on the union of block squares.
template <Scalar T>
T rigidity_probe(const FiniteSystem<T>& sys, const Blocks& blocks, long long n) {
  const std::size_t k = sys.k();
  const CouplingMatrix<T> xi = block_diagonal_coupling<T>(blocks, k);
  const CouplingMatrix<T> image = lens_power(sys, xi, n);
  T score(0);
  for (const auto& b : blocks)
    for (std::size_t u : b)
      for (std::size_t v : b) score += image(u, v);
  return score;
}

// ---------------------------------------------------------------------------
// Mixing profile and transitivity witness
// ---------------------------------------------------------------------------

// max_{i,j} | mu(A_i ∩ T^{-n} A_j) - 1/k^2 |, which equals the same
// quantity for mu(T^n A_i ∩ A_j) by measure preservation.
template <Scalar T>
T mixing_residual(const FiniteSystem<T>& sys, unsigned long long n) {
  const std::size_t k = sys.k();
  const Matrix<T> qn = system_power(sys, static_cast<long long>(n)).matrix();
  const auto kk = static_cast<std::int64_t>(k);
  const T inv_k = fraction<T>(1, kk);
  const T inv_k2 = fraction<T>(1, kk * kk);
  T worst(0);
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < k; ++j) worst = std::max(worst, abs_value(T(qn(i, j) * inv_k - inv_k2)));
  return worst;
}

struct WitnessResult {
  std::size_t n = 0;
  std::size_t fine_k = 0;
  CouplingMatrix<Rational> xi = CouplingMatrix<Rational>::assume_valid(Matrix<Rational>(1, 1, Rational(1)));
  CouplingMatrix<Rational> source = xi;  // restrict(xi)
  CouplingMatrix<Rational> image = xi;   // restrict(lens^n(xi))
  bool check_source = false;  // restrict(xi) in V(alpha, sigma, eps)
  bool check_image = false;   // restrict(lens^n xi) in V(alpha, pi, eps)
  bool exact_source = false;  // diagonal entries equal 1/k exactly
  bool exact_image = false;
  bool preimages_resolved = false;  // T^{-n} of coarse cells are unions of fine cells
};

// Bernoulli shift on d symbols, base partition = cylinders of length L
// (k = d^L). With n = L the sets T^{-n}A_s and A_i are exactly independent,
// so B^i_s = A_i ∩ T^{-n}A_s are the length-2L cylinders (i, s), each of
// mass 1/k^2, and xi(B^i_s x B^{sigma(i)}_{pi(s)}) = 1/k^2 is a graph
// coupling at the fine resolution.
inline WitnessResult transitivity_witness(std::size_t d, std::size_t len, const Permutation& sigma,
                                          const Permutation& pi, const Rational& epsilon) {
  const std::size_t k = checked_power(d, len);
  const std::size_t fine_k = checked_power(d, 2 * len, 1024);
  if (sigma.size() != k) throw DimensionMismatch("witness sigma", k, sigma.size());
  if (pi.size() != k) throw DimensionMismatch("witness pi", k, pi.size());

  const FiniteSystem<Rational> fine = bernoulli_system<Rational>(d, 2 * len);
  const RefinementMap ref = block_refinement(k, k);

  std::vector<std::size_t> images(fine_k);
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t s = 0; s < k; ++s) images[i * k + s] = sigma(i) * k + pi(s);
  // graph_coupling puts mass at (image(u), u); the witness needs it at
  // (u, image(u)), i.e. the graph coupling of the inverse map.
  const Permutation fine_map(std::move(images));

  WitnessResult out;
  out.n = len;
  out.fine_k = fine_k;
  out.xi = graph_coupling<Rational>(fine_map.inverse());
  out.source = restrict_coupling(out.xi, ref);
  out.image = restrict_coupling(lens_power(fine, out.xi, static_cast<long long>(len)), ref);
  out.preimages_resolved = resolves_preimages(system_power(fine, static_cast<long long>(len)), ref);

  out.check_source = in_neighborhood(out.source, NeighborhoodSpec<Rational>::permutation_diagonal(sigma, epsilon));
  out.check_image = in_neighborhood(out.image, NeighborhoodSpec<Rational>::permutation_diagonal(pi, epsilon));
  const Rational w(1, static_cast<long>(k));
  out.exact_source = out.exact_image = true;
  for (std::size_t i = 0; i < k; ++i) {
    out.exact_source = out.exact_source && out.source(i, sigma(i)) == w;
    out.exact_image = out.exact_image && out.image(i, pi(i)) == w;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Entropy factor
// ---------------------------------------------------------------------------

// F(lambda)[n] = (lens^n lambda)(A x A), A = cylinders starting with symbol 0
// of the two-symbol shift (the first half of the cells).
template <Scalar T>
std::vector<T> entropy_factor_F(const FiniteSystem<T>& sys, const CouplingMatrix<T>& lambda,
                                std::size_t count) {
  const std::size_t k = sys.k();
  if (k < 2 || (k & (k - 1)) != 0)
    throw DimensionMismatch("entropy_factor_F needs a two-symbol cylinder system (k = 2^L)");
  if (lambda.k() != k) throw DimensionMismatch("entropy_factor_F", k, lambda.k());
  const std::size_t half = k / 2;
  std::vector<T> out;
  out.reserve(count + 1);
  CouplingMatrix<T> cur = lambda;
  for (std::size_t n = 0; n <= count; ++n) {
    if (n > 0) cur = lens_step(sys, cur);
    T s(0);
    for (std::size_t i = 0; i < half; ++i)
      for (std::size_t j = 0; j < half; ++j) s += cur(i, j);
    out.push_back(std::move(s));
  }
  return out;
}

enum class BlockBit { zero, half };

inline Rational block_value(BlockBit b) { return b == BlockBit::zero ? Rational(0) : Rational(1, 2); }

struct BlockTarget {
  std::vector<BlockBit> bits;

  // "0,1/2,0"
  static BlockTarget parse(const std::string& text) {
    BlockTarget b;
    std::size_t start = 0;
    while (start <= text.size()) {
      std::size_t comma = text.find(',', start);
      if (comma == std::string::npos) comma = text.size();
      std::string item = text.substr(start, comma - start);
      item.erase(std::remove(item.begin(), item.end(), ' '), item.end());
      if (item == "0")
        b.bits.push_back(BlockBit::zero);
      else if (item == "1/2" || item == "0.5")
        b.bits.push_back(BlockBit::half);
      else
        throw InvalidArgument("block entries must be 0 or 1/2, got '" + item + "'");
      start = comma + 1;
    }
    return b;
  }

  std::string str() const {
    std::string s;
    for (std::size_t t = 0; t < bits.size(); ++t) s += (t ? "," : "") + std::string(bits[t] == BlockBit::zero ? "0" : "1/2");
    return s;
  }
};

inline constexpr std::size_t kMaxBlockLength = 12;

// Graph coupling of the cylinder map that flips coordinate t when b_t = 0
// and keeps it when b_t = 1/2, at resolution 2^n. Its lens images give
// F[t] = mu(x_t = 0 and (Sx)_t = 0) = b_t for t < n.
inline CouplingMatrix<Rational> realize_entropy_block(const BlockTarget& b) {
  const std::size_t n = b.bits.size();
  if (n == 0) throw InvalidArgument("realize_entropy_block: empty block");
  if (n > kMaxBlockLength) throw SizeGuard("realize_entropy_block: 2^n cells exceed the limit");
  const std::size_t k = std::size_t{1} << n;
  std::vector<std::size_t> images(k);
  for (std::size_t w = 0; w < k; ++w) {
    auto word = decode_word(w, 2, n);
    for (std::size_t t = 0; t < n; ++t)
      if (b.bits[t] == BlockBit::zero) word[t] ^= 1U;
    images[w] = encode_word(word, 2);
  }
  return graph_coupling<Rational>(Permutation(std::move(images)));
}

// ---------------------------------------------------------------------------
// Commuting maps
// ---------------------------------------------------------------------------

// P_S Q == Q P_S with (P_S)[a][S(a)] = 1, i.e. Q[S(a)][j] == Q[a][S^{-1}(j)].
template <Scalar T>
bool commutes_with(const Permutation& s, const FiniteSystem<T>& sys) {
  if (s.size() != sys.k()) throw DimensionMismatch("commutes_with", sys.k(), s.size());
  const Permutation inv = s.inverse();
  const Matrix<T>& q = sys.matrix();
  for (std::size_t a = 0; a < sys.k(); ++a)
    for (std::size_t j = 0; j < sys.k(); ++j)
      if (q(s(a), j) != q(a, inv(j))) return false;
  return true;
}

// Alphabet Z_d x Z_ell coded as symbol = alpha * ell + beta; words of length
// L. S adds 1 mod d to every alpha-coordinate and keeps the beta-coordinates.
inline Permutation bernoulli_cyclic_commuter(std::size_t d, std::size_t ell, std::size_t len) {
  if (d < 1 || ell < 1 || len < 1) throw InvalidArgument("bernoulli_cyclic_commuter: d, ell, L must be >= 1");
  const std::size_t alphabet = d * ell;
  const std::size_t k = checked_power(alphabet, len);
  std::vector<std::size_t> images(k);
  for (std::size_t w = 0; w < k; ++w) {
    auto word = decode_word(w, alphabet, len);
    for (auto& sym : word) {
      const std::size_t alpha = sym / ell;
      const std::size_t beta = sym % ell;
      sym = ((alpha + 1) % d) * ell + beta;
    }
    images[w] = encode_word(word, alphabet);
  }
  return Permutation(std::move(images));
}

struct BernoulliCommuterReport {
  Permutation map;
  bool commutes = false;          // with the cylinder shift matrix at length L
  bool cycles_alpha_sets = false;  // S {alpha_0 = i} = {alpha_0 = i + 1}
  Rational resolved_residual;     // self-joining residual of Delta_S on length-L cells,
                                  // evaluated exactly from length-(L+1) data
  Rational step_residual;         // ||Q^T Delta_S Q - Delta_S||_1 at length L (step lens)
};

inline BernoulliCommuterReport bernoulli_commuter_report(std::size_t d, std::size_t ell, std::size_t len) {
  const std::size_t alphabet = d * ell;
  if (alphabet < 2) throw InvalidArgument("bernoulli_commuter_report: alphabet needs at least 2 symbols");
  BernoulliCommuterReport r;
  r.map = bernoulli_cyclic_commuter(d, ell, len);
  const auto sys = bernoulli_system<Rational>(alphabet, len);
  r.commutes = commutes_with(r.map, sys);

  r.cycles_alpha_sets = true;
  for (std::size_t w = 0; w < sys.k(); ++w) {
    const std::size_t alpha0 = decode_word(w, alphabet, len)[0] / ell;
    const std::size_t image_alpha0 = decode_word(r.map(w), alphabet, len)[0] / ell;
    r.cycles_alpha_sets = r.cycles_alpha_sets && image_alpha0 == (alpha0 + 1) % d;
  }

  const auto fine = bernoulli_system<Rational>(alphabet, len + 1);
  const auto fine_map = bernoulli_cyclic_commuter(d, ell, len + 1);
  r.resolved_residual = resolved_self_joining_residual(fine, block_refinement(sys.k(), alphabet),
                                                       graph_coupling<Rational>(fine_map));
  r.step_residual = self_joining_residual(sys, graph_coupling<Rational>(r.map));
  return r;
}

// Level-m odometer cells a = sum_t x_t 2^t. S_pi applies pi to the value of
// the first n digits (a mod 2^n) and keeps digits n..m-1.
inline Permutation odometer_commuter(const Permutation& pi, std::size_t n, std::size_t m) {
  if (m < n) throw InvalidArgument("odometer_commuter: need m >= n");
  const std::size_t low = checked_power(2, n);
  if (pi.size() != low) throw DimensionMismatch("odometer_commuter pi", low, pi.size());
  const std::size_t k = checked_power(2, m);
  std::vector<std::size_t> images(k);
  for (std::size_t a = 0; a < k; ++a) images[a] = a - a % low + pi(a % low);
  return Permutation(std::move(images));
}

}  // namespace lenslab
