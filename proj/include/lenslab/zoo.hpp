#pragma once

// Concrete finite systems: cyclic rotations, dyadic odometer levels,
// Bernoulli shifts on cylinder words (de Bruijn matrices) and interval
// exchanges of equal-length pieces.

#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "lenslab/errors.hpp"
#include "lenslab/permutation.hpp"
#include "lenslab/system.hpp"

namespace lenslab {

inline constexpr std::size_t kMaxCells = 4096;

// Words are read left to right as coordinates 0..L-1 and indexed big-endian:
// index = sum_t w[t] * d^(L-1-t). The first coordinates of a word therefore
// select a block of consecutive indices.
inline std::size_t encode_word(std::span<const std::size_t> word, std::size_t d) {
  std::size_t idx = 0;
  for (std::size_t s : word) {
    if (s >= d) throw InvalidArgument("symbol outside alphabet");
    idx = idx * d + s;
  }
  return idx;
}

inline std::vector<std::size_t> decode_word(std::size_t index, std::size_t d, std::size_t len) {
  std::vector<std::size_t> w(len);
  for (std::size_t t = len; t-- > 0;) {
    w[t] = index % d;
    index /= d;
  }
  return w;
}

// d^L, or SizeGuard when above `limit`.
inline std::size_t checked_power(std::size_t d, std::size_t len, std::size_t limit = kMaxCells) {
  std::size_t n = 1;
  for (std::size_t t = 0; t < len; ++t) {
    if (n > limit / d) throw SizeGuard(std::to_string(d) + "^" + std::to_string(len) +
                                       " cells exceed the limit of " + std::to_string(limit));
    n *= d;
  }
  return n;
}

inline std::string word_label(std::span<const std::size_t> word, std::size_t d) {
  std::string s;
  for (std::size_t t = 0; t < word.size(); ++t) {
    if (d > 10 && t > 0) s += '.';
    s += std::to_string(word[t]);
  }
  return s;
}

// a -> a + s mod k
template <Scalar T>
FiniteSystem<T> rotation_system(std::size_t k, std::size_t s) {
  if (k == 0) throw InvalidArgument("rotation_system: k must be >= 1");
  if (s >= k) throw InvalidArgument("rotation_system: need 0 <= s < k");
  return FiniteSystem<T>::from_permutation(Permutation::cyclic_shift(k, s));
}

// Level m of the dyadic adding machine. Cell index = sum_t x_t 2^t, so +1
// with carry into x_1, x_2, ... is a + 1 mod 2^m. Labels are x_0 x_1 ... x_{m-1}.
template <Scalar T>
FiniteSystem<T> odometer_system(std::size_t m) {
  if (m == 0) throw InvalidArgument("odometer_system: m must be >= 1");
  const std::size_t k = checked_power(2, m);
  std::vector<std::string> labels(k);
  for (std::size_t a = 0; a < k; ++a)
    for (std::size_t t = 0; t < m; ++t) labels[a] += ((a >> t) & 1U) ? '1' : '0';
  return FiniteSystem<T>::from_permutation(Partition(std::move(labels)),
                                           Permutation::cyclic_shift(k, 1));
}

// Full shift on d symbols at cylinder length L.
// Q[w][w'] = 1/d when w' is w shifted left with any new last symbol.
template <Scalar T>
FiniteSystem<T> bernoulli_system(std::size_t d, std::size_t len) {
  if (d < 2) throw InvalidArgument("bernoulli_system: d must be >= 2");
  if (len == 0) throw InvalidArgument("bernoulli_system: L must be >= 1");
  const std::size_t k = checked_power(d, len);
  const std::size_t tail = k / d;  // d^(L-1)
  std::vector<std::string> labels(k);
  Matrix<T> q(k, k);
  const T w = fraction<T>(1, static_cast<std::int64_t>(d));
  for (std::size_t a = 0; a < k; ++a) {
    labels[a] = word_label(decode_word(a, d, len), d);
    const std::size_t shifted = (a % tail) * d;
    for (std::size_t s = 0; s < d; ++s) q(a, shifted + s) = w;
  }
  return FiniteSystem<T>::from_matrix(Partition(std::move(labels)), std::move(q));
}

// [0,1) cut into n equal intervals; interval u is translated onto position
// permutation(u).
struct IETSpec {
  std::size_t n_intervals = 0;
  Permutation permutation;

  explicit IETSpec(Permutation p) : n_intervals(p.size()), permutation(std::move(p)) {
    if (n_intervals == 0) throw InvalidArgument("IETSpec needs at least one interval");
  }
};

template <Scalar T>
FiniteSystem<T> iet_system(const IETSpec& spec) {
  return FiniteSystem<T>::from_permutation(spec.permutation);
}

// Fibonacci approximants (F_{m+1}, F_m) of the golden rotation with
// F_{m+1} <= kmax, starting from (2, 1).
inline std::vector<std::pair<std::size_t, std::size_t>> fibonacci_approximants(std::size_t kmax) {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  std::size_t a = 1, b = 2;  // F_m, F_{m+1}
  while (b <= kmax) {
    out.emplace_back(b, a);
    std::size_t next = a + b;
    a = b;
    b = next;
  }
  return out;
}

// --- spec strings -------------------------------------------------------------
//
// "rot:k=13,s=5", "odo:m=4", "bern:d=2,L=3", "iet:perm=2,0,1", "skew:alpha=1/7"

struct ZooSpec {
  std::string kind;
  std::map<std::string, std::string> params;

  const std::string& param(const std::string& key) const {
    auto it = params.find(key);
    if (it == params.end()) throw InvalidArgument("zoo spec '" + kind + "' needs parameter " + key);
    return it->second;
  }
};

inline std::size_t parse_size(const std::string& text, const std::string& what) {
  if (text.empty()) throw InvalidArgument(what + ": empty integer");
  for (char c : text)
    if (c < '0' || c > '9') throw InvalidArgument(what + ": '" + text + "' is not a nonnegative integer");
  try {
    return static_cast<std::size_t>(std::stoull(text));
  } catch (const std::exception&) {
    throw InvalidArgument(what + ": '" + text + "' is out of range");
  }
}

inline std::vector<std::size_t> parse_index_list(const std::string& text, const std::string& what) {
  std::vector<std::size_t> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t comma = text.find(',', start);
    if (comma == std::string::npos) comma = text.size();
    std::string item = text.substr(start, comma - start);
    while (!item.empty() && item.front() == ' ') item.erase(item.begin());
    while (!item.empty() && item.back() == ' ') item.pop_back();
    out.push_back(parse_size(item, what));
    start = comma + 1;
  }
  return out;
}

inline ZooSpec parse_zoo_spec(const std::string& text) {
  auto colon = text.find(':');
  if (colon == std::string::npos || colon == 0)
    throw InvalidArgument("zoo spec '" + text + "' must look like kind:key=value,...");
  ZooSpec spec{text.substr(0, colon), {}};
  const std::string body = text.substr(colon + 1);
  // "perm=2,0,1" carries commas inside its value; a token without '=' is
  // appended to the previous value.
  std::string last_key;
  std::size_t start = 0;
  while (start <= body.size() && !body.empty()) {
    std::size_t comma = body.find(',', start);
    if (comma == std::string::npos) comma = body.size();
    std::string token = body.substr(start, comma - start);
    auto eq = token.find('=');
    if (eq == std::string::npos) {
      if (last_key.empty()) throw InvalidArgument("zoo spec '" + text + "': stray token '" + token + "'");
      spec.params[last_key] += "," + token;
    } else {
      last_key = token.substr(0, eq);
      spec.params[last_key] = token.substr(eq + 1);
    }
    start = comma + 1;
  }
  static const std::map<std::string, std::vector<std::string>> required = {
      {"rot", {"k", "s"}}, {"odo", {"m"}}, {"bern", {"d", "L"}}, {"iet", {"perm"}}, {"skew", {"alpha"}}};
  auto it = required.find(spec.kind);
  if (it == required.end()) throw InvalidArgument("unknown zoo system kind '" + spec.kind + "'");
  for (const auto& key : it->second) spec.param(key);
  for (const auto& [key, value] : spec.params) {
    (void)value;
    if (std::find(it->second.begin(), it->second.end(), key) == it->second.end())
      throw InvalidArgument("zoo spec '" + spec.kind + "' has unknown parameter '" + key + "'");
  }
  return spec;
}

template <Scalar T>
FiniteSystem<T> make_zoo_system(const ZooSpec& spec) {
  if (spec.kind == "rot")
    return rotation_system<T>(parse_size(spec.param("k"), "rot k"), parse_size(spec.param("s"), "rot s"));
  if (spec.kind == "odo") return odometer_system<T>(parse_size(spec.param("m"), "odo m"));
  if (spec.kind == "bern")
    return bernoulli_system<T>(parse_size(spec.param("d"), "bern d"), parse_size(spec.param("L"), "bern L"));
  if (spec.kind == "iet")
    return iet_system<T>(IETSpec(Permutation(parse_index_list(spec.param("perm"), "iet perm"))));
  throw InvalidArgument("zoo spec '" + spec.kind + "' does not describe a finite system");
}

template <Scalar T>
FiniteSystem<T> make_zoo_system(const std::string& text) {
  return make_zoo_system<T>(parse_zoo_spec(text));
}

}  // namespace lenslab
