#pragma once

// Numeric backends. Every container in the library is templated on a scalar
// type that is either `Rational` (exact, GMP-backed) or `double`.

#include <cctype>
#include <cmath>
#include <concepts>
#include <cstdint>
#include <string>
#include <string_view>

#include <boost/multiprecision/gmp.hpp>

#include "lenslab/errors.hpp"

namespace lenslab {

using Rational = boost::multiprecision::number<boost::multiprecision::gmp_rational,
                                               boost::multiprecision::et_off>;
using BigInt = boost::multiprecision::number<boost::multiprecision::gmp_int,
                                             boost::multiprecision::et_off>;

template <class T>
struct scalar_traits;

template <>
struct scalar_traits<Rational> {
  static constexpr bool exact = true;
  static constexpr std::string_view name = "rational";
};

template <>
struct scalar_traits<double> {
  static constexpr bool exact = false;
  static constexpr std::string_view name = "float";
};

template <class T>
concept Scalar = requires { scalar_traits<T>::exact; };

template <Scalar T>
inline constexpr bool is_exact_v = scalar_traits<T>::exact;

// Invariant tolerance used when validating sums: zero for rationals.
template <Scalar T>
T sum_tolerance() {
  if constexpr (is_exact_v<T>) {
    return T(0);
  } else {
    return 1e-12;
  }
}

template <Scalar T>
T fraction(std::int64_t num, std::int64_t den) {
  if (den == 0) throw InvalidArgument("fraction with zero denominator");
  if constexpr (is_exact_v<T>) {
    return Rational(num, den);
  } else {
    return static_cast<double>(num) / static_cast<double>(den);
  }
}

inline Rational abs_value(const Rational& x) { return x < 0 ? Rational(-x) : x; }
inline double abs_value(double x) { return std::fabs(x); }

inline double to_double(const Rational& x) { return x.convert_to<double>(); }
inline double to_double(double x) { return x; }

template <Scalar T>
T from_rational(const Rational& r) {
  if constexpr (is_exact_v<T>) {
    return r;
  } else {
    return to_double(r);
  }
}

// Canonical "p/q" text (or "p" for integers).
inline std::string to_string(const Rational& x) { return x.str(); }

// Accepts "p", "p/q" and "-p/q"; result is canonicalized.
inline Rational parse_rational(std::string_view text) {
  std::string s(text);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.pop_back();
  std::size_t first = 0;
  while (first < s.size() && std::isspace(static_cast<unsigned char>(s[first]))) ++first;
  s = s.substr(first);
  if (s.empty()) throw InvalidArgument("empty rational literal");
  auto slash = s.find('/');
  auto digits_ok = [](std::string_view part) {
    std::size_t i = (!part.empty() && (part[0] == '-' || part[0] == '+')) ? 1 : 0;
    if (i == part.size()) return false;
    for (; i < part.size(); ++i)
      if (!std::isdigit(static_cast<unsigned char>(part[i]))) return false;
    return true;
  };
  if (slash == std::string::npos) {
    if (!digits_ok(s)) throw InvalidArgument("bad rational literal '" + s + "'");
    return Rational(BigInt(s));
  }
  std::string num = s.substr(0, slash);
  std::string den = s.substr(slash + 1);
  if (!digits_ok(num) || !digits_ok(den))
    throw InvalidArgument("bad rational literal '" + s + "'");
  BigInt d(den);
  if (d == 0) throw InvalidArgument("zero denominator in '" + s + "'");
  return Rational(BigInt(num), d);
}

// x mod 1, in [0, 1).
inline Rational frac(const Rational& x) {
  BigInt num = boost::multiprecision::numerator(x);
  BigInt den = boost::multiprecision::denominator(x);
  BigInt r;
  mpz_fdiv_r(r.backend().data(), num.backend().data(), den.backend().data());
  return Rational(r, den);
}

}  // namespace lenslab
