#pragma once

// Finite abelian groups G = Z_{m_1} x ... x Z_{m_r}, their automorphisms and
// rotations R_z(x) = x + z. An automorphism T conjugates rotations into
// rotations: T ∘ R_z ∘ T^{-1} = R_{T z}.

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "lenslab/errors.hpp"
#include "lenslab/permutation.hpp"

namespace lenslab {

inline constexpr std::size_t kMaxGroupOrder = 1U << 20;

class FiniteAbelianGroup {
 public:
  using Element = std::vector<long long>;

  explicit FiniteAbelianGroup(std::vector<long long> moduli) : moduli_(std::move(moduli)) {
    if (moduli_.empty()) throw InvalidArgument("group needs at least one cyclic factor");
    order_ = 1;
    for (long long m : moduli_) {
      if (m < 1) throw InvalidArgument("cyclic factor moduli must be >= 1");
      if (order_ > kMaxGroupOrder / static_cast<std::size_t>(m))
        throw SizeGuard("group order exceeds " + std::to_string(kMaxGroupOrder));
      order_ *= static_cast<std::size_t>(m);
    }
  }

  const std::vector<long long>& moduli() const { return moduli_; }
  std::size_t rank() const { return moduli_.size(); }
  std::size_t order() const { return order_; }

  Element normalize(Element x) const {
    if (x.size() != rank()) throw DimensionMismatch("group element", rank(), x.size());
    for (std::size_t i = 0; i < rank(); ++i) x[i] = ((x[i] % moduli_[i]) + moduli_[i]) % moduli_[i];
    return x;
  }

  Element add(const Element& x, const Element& y) const {
    Element z(rank());
    for (std::size_t i = 0; i < rank(); ++i) z[i] = x.at(i) + y.at(i);
    return normalize(std::move(z));
  }

  // Mixed-radix index with the first factor most significant.
  std::size_t index(const Element& x) const {
    Element n = normalize(x);
    std::size_t idx = 0;
    for (std::size_t i = 0; i < rank(); ++i) idx = idx * static_cast<std::size_t>(moduli_[i]) + static_cast<std::size_t>(n[i]);
    return idx;
  }

  Element element(std::size_t idx) const {
    Element x(rank());
    for (std::size_t i = rank(); i-- > 0;) {
      x[i] = static_cast<long long>(idx % static_cast<std::size_t>(moduli_[i]));
      idx /= static_cast<std::size_t>(moduli_[i]);
    }
    return x;
  }

  // R_z as a permutation of element indices.
  Permutation rotation(const Element& z) const {
    std::vector<std::size_t> img(order_);
    for (std::size_t i = 0; i < order_; ++i) img[i] = index(add(element(i), z));
    return Permutation(std::move(img));
  }

 private:
  std::vector<long long> moduli_;
  std::size_t order_ = 1;
};

// Endomorphism given by an integer matrix: (M x)_i = sum_j M[i][j] x_j mod m_i.
// Construction checks that it is well defined and bijective.
class GroupAutomorphism {
 public:
  GroupAutomorphism(const FiniteAbelianGroup& g, std::vector<std::vector<long long>> matrix)
      : group_(g), matrix_(std::move(matrix)) {
    const std::size_t r = g.rank();
    if (matrix_.size() != r) throw DimensionMismatch("automorphism matrix rows", r, matrix_.size());
    for (std::size_t i = 0; i < r; ++i) {
      if (matrix_[i].size() != r) throw DimensionMismatch("automorphism matrix cols", r, matrix_[i].size());
      // Z_{m_j} -> Z_{m_i}: x -> M_ij x is well defined iff m_i | M_ij m_j.
      for (std::size_t j = 0; j < r; ++j)
        if ((matrix_[i][j] * g.moduli()[j]) % g.moduli()[i] != 0)
          throw NonInvertible("matrix entry (" + std::to_string(i) + "," + std::to_string(j) +
                              ") does not define a homomorphism");
    }
    std::vector<std::size_t> img(g.order());
    for (std::size_t x = 0; x < g.order(); ++x) img[x] = g.index(apply(g.element(x)));
    try {
      as_permutation_ = Permutation(std::move(img));
    } catch (const InvalidPermutation&) {
      throw NonInvertible("group endomorphism is not bijective");
    }
  }

  FiniteAbelianGroup::Element apply(const FiniteAbelianGroup::Element& x) const {
    const std::size_t r = group_.rank();
    FiniteAbelianGroup::Element y(r, 0);
    for (std::size_t i = 0; i < r; ++i)
      for (std::size_t j = 0; j < r; ++j) y[i] += matrix_[i][j] * x.at(j);
    return group_.normalize(std::move(y));
  }

  // Action on element indices.
  const Permutation& permutation() const { return as_permutation_; }
  const FiniteAbelianGroup& group() const { return group_; }

 private:
  FiniteAbelianGroup group_;
  std::vector<std::vector<long long>> matrix_;
  Permutation as_permutation_;
};

struct RotationConjugation {
  FiniteAbelianGroup::Element image;  // T z
  bool identity_holds = false;        // T ∘ R_z ∘ T^{-1} == R_{T z} pointwise on G
};

inline RotationConjugation group_rotation_conjugation(const GroupAutomorphism& t,
                                                      const FiniteAbelianGroup::Element& z) {
  const auto& g = t.group();
  RotationConjugation out{t.apply(z), false};
  const Permutation tp = t.permutation();
  const Permutation composite = compose(compose(tp, g.rotation(z)), tp.inverse());
  out.identity_holds = composite == g.rotation(out.image);
  return out;
}

}  // namespace lenslab
