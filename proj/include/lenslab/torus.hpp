#pragma once

// Exact rational arithmetic on tori T^d (d = 1..3) and the skew product
// Tbar(x, y, z) = (x + alpha, x + y, x + y + z). Conjugating the rotation
// S_{a,b,c} by Tbar gives the rotation by W(a,b,c) = (a, a+b, a+b+c).

#include <array>
#include <cstddef>
#include <initializer_list>
#include <string>
#include <vector>

#include "lenslab/errors.hpp"
#include "lenslab/rational.hpp"

namespace lenslab {

class TorusPoint {
 public:
  TorusPoint() = default;
  TorusPoint(std::initializer_list<Rational> coords) : TorusPoint(std::vector<Rational>(coords)) {}
  explicit TorusPoint(std::vector<Rational> coords) : coords_(std::move(coords)) {
    if (coords_.empty() || coords_.size() > 3)
      throw InvalidArgument("torus points have dimension 1 to 3");
    for (auto& c : coords_) c = frac(c);
  }

  std::size_t dim() const { return coords_.size(); }
  const Rational& operator[](std::size_t i) const { return coords_.at(i); }
  const std::vector<Rational>& coords() const { return coords_; }

  friend TorusPoint operator+(const TorusPoint& a, const TorusPoint& b) {
    require_same_dim(a, b);
    std::vector<Rational> c(a.dim());
    for (std::size_t i = 0; i < a.dim(); ++i) c[i] = a.coords_[i] + b.coords_[i];
    return TorusPoint(std::move(c));
  }
  friend TorusPoint operator-(const TorusPoint& a, const TorusPoint& b) {
    require_same_dim(a, b);
    std::vector<Rational> c(a.dim());
    for (std::size_t i = 0; i < a.dim(); ++i) c[i] = a.coords_[i] - b.coords_[i];
    return TorusPoint(std::move(c));
  }
  friend bool operator==(const TorusPoint&, const TorusPoint&) = default;

  std::string str() const {
    std::string s = "(";
    for (std::size_t i = 0; i < coords_.size(); ++i) s += (i ? "," : "") + to_string(coords_[i]);
    return s + ")";
  }

 private:
  static void require_same_dim(const TorusPoint& a, const TorusPoint& b) {
    if (a.dim() != b.dim()) throw DimensionMismatch("torus points", a.dim(), b.dim());
  }
  std::vector<Rational> coords_;
};

// W(a, b, c) = (a, a + b, a + b + c)
inline TorusPoint skew_W_step(const TorusPoint& t) {
  if (t.dim() != 3) throw DimensionMismatch("skew_W_step", 3, t.dim());
  return TorusPoint{t[0], t[0] + t[1], t[0] + t[1] + t[2]};
}

// W restricted to the invariant torus {a} x T^2: (b, c) -> (b + a, b + c + a).
inline TorusPoint invariant_torus_step(const Rational& a, const TorusPoint& bc) {
  if (bc.dim() != 2) throw DimensionMismatch("invariant_torus_step", 2, bc.dim());
  return TorusPoint{bc[0] + a, bc[0] + bc[1] + a};
}

// Translation component linear in the symbolic rotation number alpha:
// constant + alpha_coeff * alpha.
struct AlphaForm {
  Rational constant{0};
  Rational alpha_coeff{0};

  friend AlphaForm operator+(const AlphaForm& a, const AlphaForm& b) {
    return {a.constant + b.constant, a.alpha_coeff + b.alpha_coeff};
  }
  friend AlphaForm operator*(long long s, const AlphaForm& a) {
    return {a.constant * s, a.alpha_coeff * s};
  }
  AlphaForm operator-() const { return {-constant, -alpha_coeff}; }
  Rational evaluate(const Rational& alpha) const { return constant + alpha_coeff * alpha; }
};

// x -> A x + t on T^3 with A an integer matrix, t symbolic in alpha.
struct AffineTorusMap {
  using IntMatrix = std::array<std::array<long long, 3>, 3>;
  IntMatrix linear{};
  std::array<AlphaForm, 3> translation{};

  static AffineTorusMap identity() {
    AffineTorusMap m;
    for (int i = 0; i < 3; ++i) m.linear[i][i] = 1;
    return m;
  }

  long long determinant() const {
    const auto& a = linear;
    return a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1]) -
           a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0]) +
           a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0]);
  }

  AffineTorusMap inverse() const {
    const long long det = determinant();
    if (det != 1 && det != -1) throw NonInvertible("affine torus map is not unimodular");
    const auto& a = linear;
    AffineTorusMap inv;
    // adjugate / det
    inv.linear[0][0] = (a[1][1] * a[2][2] - a[1][2] * a[2][1]) * det;
    inv.linear[0][1] = (a[0][2] * a[2][1] - a[0][1] * a[2][2]) * det;
    inv.linear[0][2] = (a[0][1] * a[1][2] - a[0][2] * a[1][1]) * det;
    inv.linear[1][0] = (a[1][2] * a[2][0] - a[1][0] * a[2][2]) * det;
    inv.linear[1][1] = (a[0][0] * a[2][2] - a[0][2] * a[2][0]) * det;
    inv.linear[1][2] = (a[0][2] * a[1][0] - a[0][0] * a[1][2]) * det;
    inv.linear[2][0] = (a[1][0] * a[2][1] - a[1][1] * a[2][0]) * det;
    inv.linear[2][1] = (a[0][1] * a[2][0] - a[0][0] * a[2][1]) * det;
    inv.linear[2][2] = (a[0][0] * a[1][1] - a[0][1] * a[1][0]) * det;
    for (int i = 0; i < 3; ++i) {
      AlphaForm s;
      for (int j = 0; j < 3; ++j) s = s + inv.linear[i][j] * translation[j];
      inv.translation[i] = -s;
    }
    return inv;
  }

  // (f ∘ g)(x) = f(g(x))
  friend AffineTorusMap compose(const AffineTorusMap& f, const AffineTorusMap& g) {
    AffineTorusMap out;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        for (int m = 0; m < 3; ++m) out.linear[i][j] += f.linear[i][m] * g.linear[m][j];
    for (int i = 0; i < 3; ++i) {
      AlphaForm s = f.translation[i];
      for (int m = 0; m < 3; ++m) s = s + f.linear[i][m] * g.translation[m];
      out.translation[i] = s;
    }
    return out;
  }

  TorusPoint apply(const TorusPoint& p, const Rational& alpha) const {
    if (p.dim() != 3) throw DimensionMismatch("affine torus map", 3, p.dim());
    std::vector<Rational> out(3);
    for (int i = 0; i < 3; ++i) {
      Rational s = translation[i].evaluate(alpha);
      for (int j = 0; j < 3; ++j) s += p[j] * linear[i][j];
      out[i] = s;
    }
    return TorusPoint(std::move(out));
  }
};

// Tbar(x, y, z) = (x + alpha, x + y, x + y + z) with alpha symbolic.
inline AffineTorusMap skew_Tbar() {
  AffineTorusMap m;
  m.linear = {{{1, 0, 0}, {1, 1, 0}, {1, 1, 1}}};
  m.translation[0] = AlphaForm{0, 1};
  return m;
}

inline AffineTorusMap torus_rotation(const TorusPoint& t) {
  if (t.dim() != 3) throw DimensionMismatch("torus_rotation", 3, t.dim());
  AffineTorusMap m = AffineTorusMap::identity();
  for (int i = 0; i < 3; ++i) m.translation[i] = AlphaForm{t[i], 0};
  return m;
}

struct ConjugationResult {
  TorusPoint translation;     // Tbar ∘ S_t ∘ Tbar^{-1} = S_translation
  bool is_rotation = false;   // linear part of the composite is the identity
  bool alpha_free = false;    // translation has no alpha dependence
  bool pointwise_agrees = false;  // composite(p) - p == translation at every sample
};

// Composes Tbar ∘ S_t ∘ Tbar^{-1} symbolically, then re-checks it pointwise at
// the given alpha on the sample points by applying the three maps in turn.
inline ConjugationResult skew_Tbar_conjugation(const TorusPoint& t, const Rational& alpha,
                                               const std::vector<TorusPoint>& samples) {
  const AffineTorusMap tbar = skew_Tbar();
  const AffineTorusMap tbar_inv = tbar.inverse();
  const AffineTorusMap rot = torus_rotation(t);
  const AffineTorusMap composite = compose(compose(tbar, rot), tbar_inv);

  ConjugationResult out;
  out.is_rotation = composite.linear == AffineTorusMap::identity().linear;
  out.alpha_free = true;
  std::vector<Rational> trans(3);
  for (int i = 0; i < 3; ++i) {
    out.alpha_free = out.alpha_free && composite.translation[i].alpha_coeff == 0;
    trans[i] = composite.translation[i].constant;
  }
  out.translation = TorusPoint(std::move(trans));

  out.pointwise_agrees = true;
  for (const auto& p : samples) {
    TorusPoint q = tbar_inv.apply(p, alpha);
    q = q + t;
    q = tbar.apply(q, alpha);
    if (q - p != out.translation) out.pointwise_agrees = false;
  }
  return out;
}

}  // namespace lenslab
