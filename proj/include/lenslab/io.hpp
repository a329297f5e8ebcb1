#pragma once

// JSON and CSV formats.
//
//   FiniteSystem    {"k": int, "exact": bool, "Q": rows}
//   CouplingMatrix  {"k": int, "C": rows}; CSV "i,j,value"
//   RationalTarget  {"k": int, "L": int, "m": rows}
//   IETSpec         permutation array
//   PeriodReport    {"period": int|null, "residual_by_p": [{"p": int, "residual": x}]}
//   WitnessResult   object with embedded couplings
//
// Rational entries are written as "p/q" strings, float entries as numbers.
// Readers accept either form for either backend.

#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "lenslab/constructions.hpp"
#include "lenslab/coupling.hpp"
#include "lenslab/errors.hpp"
#include "lenslab/lens.hpp"
#include "lenslab/system.hpp"
#include "lenslab/zoo.hpp"

namespace lenslab {

using Json = nlohmann::json;

template <Scalar T>
Json scalar_to_json(const T& x) {
  if constexpr (is_exact_v<T>) {
    return to_string(x);
  } else {
    return x;
  }
}

template <Scalar T>
T scalar_from_json(const Json& j) {
  if (j.is_string()) return from_rational<T>(parse_rational(j.get<std::string>()));
  if (j.is_number_integer()) return T(j.get<long long>());
  if (j.is_number()) {
    if constexpr (is_exact_v<T>) {
      return Rational(j.get<double>());
    } else {
      return j.get<double>();
    }
  }
  throw InvalidArgument("expected a number or a \"p/q\" string");
}

template <Scalar T>
Json matrix_to_json(const Matrix<T>& m) {
  Json rows = Json::array();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (std::size_t j = 0; j < m.cols(); ++j) row.push_back(scalar_to_json(m(i, j)));
    rows.push_back(std::move(row));
  }
  return rows;
}

// Accepts nested rows or a flat row-major array of k*k entries.
template <Scalar T>
Matrix<T> matrix_from_json(const Json& j, std::size_t k) {
  if (!j.is_array()) throw InvalidArgument("matrix must be a JSON array");
  Matrix<T> m(k, k);
  if (!j.empty() && !j[0].is_array()) {
    if (j.size() != k * k) throw DimensionMismatch("flat matrix entries", k * k, j.size());
    for (std::size_t n = 0; n < k * k; ++n) m(n / k, n % k) = scalar_from_json<T>(j[n]);
    return m;
  }
  if (j.size() != k) throw DimensionMismatch("matrix rows", k, j.size());
  for (std::size_t i = 0; i < k; ++i) {
    if (!j[i].is_array() || j[i].size() != k) throw DimensionMismatch("matrix row " + std::to_string(i));
    for (std::size_t c = 0; c < k; ++c) m(i, c) = scalar_from_json<T>(j[i][c]);
  }
  return m;
}

template <Scalar T>
Json to_json(const FiniteSystem<T>& sys) {
  return Json{{"k", sys.k()}, {"exact", sys.exact()}, {"Q", matrix_to_json(sys.matrix())}};
}

// Parses without validating; pair with validate_system_matrix.
template <Scalar T>
Matrix<T> system_matrix_from_json(const Json& j, bool* exact_flag = nullptr) {
  if (!j.is_object() || !j.contains("k") || !j.contains("Q"))
    throw InvalidArgument("system JSON needs \"k\" and \"Q\"");
  const auto k = j.at("k").get<std::size_t>();
  if (k == 0) throw InvalidArgument("system JSON: k must be >= 1");
  if (exact_flag) *exact_flag = j.value("exact", false);
  return matrix_from_json<T>(j.at("Q"), k);
}

template <Scalar T>
FiniteSystem<T> system_from_json(const Json& j) {
  bool exact_flag = false;
  Matrix<T> q = system_matrix_from_json<T>(j, &exact_flag);
  auto sys = FiniteSystem<T>::from_matrix(std::move(q));
  if (exact_flag != sys.exact())
    throw InvalidSystem("\"exact\" flag disagrees with Q being a permutation matrix");
  return sys;
}

template <Scalar T>
Json to_json(const CouplingMatrix<T>& c) {
  return Json{{"k", c.k()}, {"C", matrix_to_json(c.matrix())}};
}

template <Scalar T>
CouplingMatrix<T> coupling_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("k") || !j.contains("C"))
    throw InvalidArgument("coupling JSON needs \"k\" and \"C\"");
  return CouplingMatrix<T>::from_matrix(matrix_from_json<T>(j.at("C"), j.at("k").get<std::size_t>()));
}

template <Scalar T>
void write_coupling_csv(std::ostream& os, const CouplingMatrix<T>& c) {
  os << "i,j,value\n";
  for (std::size_t i = 0; i < c.k(); ++i)
    for (std::size_t j = 0; j < c.k(); ++j) {
      os << i << ',' << j << ',';
      if constexpr (is_exact_v<T>) {
        os << to_string(c(i, j));
      } else {
        std::ostringstream o;
        o.precision(17);
        o << c(i, j);
        os << o.str();
      }
      os << '\n';
    }
}

inline Json to_json(const RationalTarget& t) {
  return Json{{"k", t.k()}, {"L", t.denominator()}, {"m", t.counts()}};
}

inline RationalTarget rational_target_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("k") || !j.contains("L") || !j.contains("m"))
    throw InvalidArgument("target JSON needs \"k\", \"L\" and \"m\"");
  return RationalTarget(j.at("k").get<std::size_t>(), j.at("L").get<std::int64_t>(),
                        j.at("m").get<RationalTarget::IntMatrix>());
}

inline Json to_json(const IETSpec& s) {
  return Json(std::vector<std::size_t>(s.permutation.images().begin(), s.permutation.images().end()));
}

inline IETSpec iet_from_json(const Json& j) {
  return IETSpec(Permutation(j.get<std::vector<std::size_t>>()));
}

template <Scalar T>
Json to_json(const PeriodReport<T>& r) {
  Json table = Json::array();
  for (std::size_t p = 0; p < r.residual_by_p.size(); ++p)
    table.push_back(Json{{"p", p + 1}, {"residual", scalar_to_json(r.residual_by_p[p])}});
  return Json{{"period", r.period ? Json(*r.period) : Json(nullptr)}, {"residual_by_p", table}};
}

inline Json to_json(const WitnessResult& w) {
  return Json{{"n", w.n},
              {"fine_k", w.fine_k},
              {"xi", to_json(w.xi)},
              {"source", to_json(w.source)},
              {"image", to_json(w.image)},
              {"check_source", w.check_source},
              {"check_image", w.check_image},
              {"exact_source", w.exact_source},
              {"exact_image", w.exact_image},
              {"preimages_resolved", w.preimages_resolved}};
}

}  // namespace lenslab
