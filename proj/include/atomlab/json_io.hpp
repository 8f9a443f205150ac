#pragma once

#include <complex>
#include <string>

#include <json.hpp>

#include "atomlab/rational.hpp"
#include "atomlab/roots.hpp"

namespace atomlab {

using Json = nlohmann::json;

/// Rationals travel as strings "p/q" (plain integers also accepted).
inline Rational rational_from_json(const Json& j) {
  if (j.is_string()) return rational_from_string(j.get<std::string>());
  if (j.is_number_integer()) return Rational(j.get<long>());
  throw std::invalid_argument("expected rational as \"p/q\" string or integer");
}

inline Json rational_to_json(const Rational& r) { return to_string(r); }

inline QMatrix qmatrix_from_json(const Json& j, Eigen::Index rows, Eigen::Index cols) {
  if (!j.is_array() || static_cast<Eigen::Index>(j.size()) != rows)
    throw std::invalid_argument("matrix: expected " + std::to_string(rows) + " rows");
  QMatrix m = qmatrix_zero(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const Json& row = j[static_cast<size_t>(r)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols)
      throw std::invalid_argument("matrix: expected " + std::to_string(cols) + " columns");
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = rational_from_json(row[static_cast<size_t>(c)]);
  }
  return m;
}

inline Json qmatrix_to_json(const QMatrix& m) {
  Json rows = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(rational_to_json(m(r, c)));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline Json complex_to_json(const std::complex<double>& z) {
  return Json{{"re", z.real()}, {"im", z.imag()}};
}

inline Json spectrum_to_json(const Spectrum& s) {
  Json arr = Json::array();
  for (const auto& c : s.clusters) {
    Json e = complex_to_json(c.value);
    e["multiplicity"] = c.multiplicity;
    e["exact"] = c.exact;
    arr.push_back(std::move(e));
  }
  return arr;
}

}  // namespace atomlab
