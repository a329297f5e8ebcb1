#pragma once

#include <cstddef>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "lenslab/errors.hpp"
#include "lenslab/rational.hpp"

namespace lenslab {

// k equal-mass cells of the underlying probability space.
class Partition {
 public:
  explicit Partition(std::vector<std::string> labels) : labels_(std::move(labels)) {
    if (labels_.empty()) throw InvalidArgument("partition needs at least one cell");
    std::set<std::string> distinct(labels_.begin(), labels_.end());
    if (distinct.size() != labels_.size())
      throw InvalidArgument("partition labels must be distinct");
  }

  std::size_t k() const { return labels_.size(); }
  const std::vector<std::string>& labels() const { return labels_; }
  const std::string& label(std::size_t i) const { return labels_.at(i); }
  Rational cell_mass() const { return Rational(1, static_cast<long>(labels_.size())); }

  friend bool operator==(const Partition&, const Partition&) = default;

 private:
  std::vector<std::string> labels_;
};

inline Partition make_uniform_partition(std::size_t k) {
  if (k == 0) throw InvalidArgument("make_uniform_partition: k must be >= 1");
  std::vector<std::string> labels(k);
  for (std::size_t i = 0; i < k; ++i) labels[i] = std::to_string(i);
  return Partition(std::move(labels));
}

// Block refinement: fine cell u lies inside coarse cell u / r.
class RefinementMap {
 public:
  RefinementMap(Partition coarse, Partition fine)
      : coarse_(std::move(coarse)), fine_(std::move(fine)) {
    if (fine_.k() % coarse_.k() != 0)
      throw InvalidArgument("fine cell count is not a multiple of the coarse count");
    ratio_ = fine_.k() / coarse_.k();
  }

  const Partition& coarse() const { return coarse_; }
  const Partition& fine() const { return fine_; }
  std::size_t ratio() const { return ratio_; }
  std::size_t parent(std::size_t fine_cell) const {
    if (fine_cell >= fine_.k()) throw InvalidArgument("fine cell out of range");
    return fine_cell / ratio_;
  }
  std::vector<std::size_t> parents() const {
    std::vector<std::size_t> out(fine_.k());
    for (std::size_t u = 0; u < out.size(); ++u) out[u] = u / ratio_;
    return out;
  }

 private:
  Partition coarse_;
  Partition fine_;
  std::size_t ratio_ = 1;
};

// Splits every cell into r consecutive children labelled "<parent>.<child>".
inline std::pair<Partition, RefinementMap> refine(const Partition& p, std::size_t r) {
  if (r == 0) throw InvalidArgument("refine: r must be >= 1");
  std::vector<std::string> labels;
  labels.reserve(p.k() * r);
  for (std::size_t i = 0; i < p.k(); ++i)
    for (std::size_t c = 0; c < r; ++c)
      labels.push_back(r == 1 ? p.label(i) : p.label(i) + "." + std::to_string(c));
  Partition fine(std::move(labels));
  return {fine, RefinementMap(p, fine)};
}

// Block refinement between two uniform partitions with plain labels.
inline RefinementMap block_refinement(std::size_t coarse_k, std::size_t r) {
  return RefinementMap(make_uniform_partition(coarse_k), make_uniform_partition(coarse_k * r));
}

}  // namespace lenslab
