#pragma once

#include <algorithm>
#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

#include "atomlab/rational.hpp"

namespace atomlab {

/// Dense univariate polynomial over Q, coefficients indexed by degree.
/// Normal form keeps no trailing zeros; the zero polynomial has an empty
/// coefficient list and degree -1.
class PolyQ {
 public:
  PolyQ() = default;
  explicit PolyQ(std::vector<Rational> coeffs) : c_(std::move(coeffs)) { trim(); }
  static PolyQ constant(Rational v) { return PolyQ(std::vector<Rational>{std::move(v)}); }
  /// c * x^k
  static PolyQ monomial(Rational c, int k) {
    std::vector<Rational> v(static_cast<size_t>(k) + 1, Rational(0));
    v.back() = std::move(c);
    return PolyQ(std::move(v));
  }

  bool is_zero() const { return c_.empty(); }
  int degree() const { return static_cast<int>(c_.size()) - 1; }
  const std::vector<Rational>& coeffs() const { return c_; }
  Rational coeff(int k) const {
    if (k < 0 || k >= static_cast<int>(c_.size())) return Rational(0);
    return c_[static_cast<size_t>(k)];
  }
  Rational leading() const {
    if (is_zero()) throw std::domain_error("PolyQ::leading on zero polynomial");
    return c_.back();
  }

  friend PolyQ operator+(const PolyQ& a, const PolyQ& b) {
    std::vector<Rational> v(std::max(a.c_.size(), b.c_.size()), Rational(0));
    for (size_t i = 0; i < a.c_.size(); ++i) v[i] += a.c_[i];
    for (size_t i = 0; i < b.c_.size(); ++i) v[i] += b.c_[i];
    return PolyQ(std::move(v));
  }
  friend PolyQ operator-(const PolyQ& a, const PolyQ& b) {
    std::vector<Rational> v(std::max(a.c_.size(), b.c_.size()), Rational(0));
    for (size_t i = 0; i < a.c_.size(); ++i) v[i] += a.c_[i];
    for (size_t i = 0; i < b.c_.size(); ++i) v[i] -= b.c_[i];
    return PolyQ(std::move(v));
  }
  friend PolyQ operator-(const PolyQ& a) {
    std::vector<Rational> v = a.c_;
    for (auto& x : v) x = -x;
    return PolyQ(std::move(v));
  }
  friend PolyQ operator*(const PolyQ& a, const PolyQ& b) {
    if (a.is_zero() || b.is_zero()) return {};
    std::vector<Rational> v(a.c_.size() + b.c_.size() - 1, Rational(0));
    for (size_t i = 0; i < a.c_.size(); ++i)
      for (size_t j = 0; j < b.c_.size(); ++j) v[i + j] += a.c_[i] * b.c_[j];
    return PolyQ(std::move(v));
  }
  friend PolyQ operator*(const Rational& s, const PolyQ& a) {
    std::vector<Rational> v = a.c_;
    for (auto& x : v) x *= s;
    return PolyQ(std::move(v));
  }
  friend bool operator==(const PolyQ& a, const PolyQ& b) { return a.c_ == b.c_; }
  friend bool operator!=(const PolyQ& a, const PolyQ& b) { return !(a == b); }

  Rational operator()(const Rational& x) const {
    Rational acc(0);
    for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * x + *it;
    return acc;
  }
  std::complex<double> operator()(const std::complex<double>& x) const {
    std::complex<double> acc(0.0, 0.0);
    for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * x + to_double(*it);
    return acc;
  }

  PolyQ derivative() const {
    if (c_.size() <= 1) return {};
    std::vector<Rational> v(c_.size() - 1);
    for (size_t i = 1; i < c_.size(); ++i) v[i - 1] = Rational(static_cast<long>(i)) * c_[i];
    return PolyQ(std::move(v));
  }

  PolyQ monic() const {
    if (is_zero()) throw std::domain_error("PolyQ::monic on zero polynomial");
    Rational inv = Rational(1) / c_.back();
    return inv * *this;
  }

  /// Number of trailing zero coefficients, i.e. the multiplicity of the root 0.
  int valuation() const {
    if (is_zero()) return -1;
    int v = 0;
    while (c_[static_cast<size_t>(v)] == 0) ++v;
    return v;
  }

  /// Quotient of *this by x^k; requires valuation >= k.
  PolyQ shift_down(int k) const {
    if (k == 0) return *this;
    if (valuation() < k) throw std::domain_error("PolyQ::shift_down below valuation");
    return PolyQ(std::vector<Rational>(c_.begin() + k, c_.end()));
  }

  std::string str(const std::string& var = "x") const;

 private:
  void trim() {
    while (!c_.empty() && c_.back() == 0) c_.pop_back();
  }
  std::vector<Rational> c_;
};

inline std::string PolyQ::str(const std::string& var) const {
  if (is_zero()) return "0";
  std::string out;
  for (int k = degree(); k >= 0; --k) {
    Rational a = coeff(k);
    if (a == 0) continue;
    if (!out.empty()) out += a > 0 ? " + " : " - ";
    else if (a < 0) out += "-";
    Rational mag = abs(a);
    if (mag != 1 || k == 0) out += mag.get_str();
    if (k > 0) {
      if (mag != 1) out += "*";
      out += var;
      if (k > 1) out += "^" + std::to_string(k);
    }
  }
  return out;
}

/// Euclidean division: p = q*d + r with deg r < deg d.
inline std::pair<PolyQ, PolyQ> divmod(const PolyQ& p, const PolyQ& d) {
  if (d.is_zero()) throw std::domain_error("divmod: division by the zero polynomial");
  std::vector<Rational> rem(p.coeffs());
  const int dn = d.degree();
  const Rational lead = d.leading();
  std::vector<Rational> quot(
      p.degree() >= dn ? static_cast<size_t>(p.degree() - dn) + 1 : 0, Rational(0));
  for (int k = p.degree(); k >= dn; --k) {
    const size_t kk = static_cast<size_t>(k);
    if (kk >= rem.size() || rem[kk] == 0) continue;
    const Rational f = rem[kk] / lead;
    quot[static_cast<size_t>(k - dn)] = f;
    for (int j = 0; j <= dn; ++j) rem[static_cast<size_t>(k - dn + j)] -= f * d.coeff(j);
  }
  return {PolyQ(std::move(quot)), PolyQ(std::move(rem))};
}

/// Exact quotient; throws when the division is not exact.
inline PolyQ divexact(const PolyQ& p, const PolyQ& d) {
  auto [q, r] = divmod(p, d);
  if (!r.is_zero()) throw std::domain_error("divexact: division is not exact");
  return q;
}

/// Monic gcd over Q by the Euclidean algorithm.
inline PolyQ poly_gcd(PolyQ a, PolyQ b) {
  while (!b.is_zero()) {
    PolyQ r = divmod(a, b).second;
    a = std::move(b);
    b = std::move(r);
  }
  if (a.is_zero()) return a;
  return a.monic();
}

/// Yun's squarefree decomposition: returns (factor, multiplicity) pairs with
/// squarefree monic factors, so p ~ prod factor^multiplicity.
inline std::vector<std::pair<PolyQ, int>> squarefree_decomposition(const PolyQ& p) {
  std::vector<std::pair<PolyQ, int>> out;
  if (p.degree() < 1) return out;
  PolyQ monic = p.monic();
  PolyQ g = poly_gcd(monic, monic.derivative());
  PolyQ w = divexact(monic, g);
  int mult = 1;
  while (w.degree() >= 1) {
    const PolyQ y = poly_gcd(w, g);
    const PolyQ z = divexact(w, y);
    if (z.degree() >= 1) out.emplace_back(z.monic(), mult);
    w = y;
    g = divexact(g, y);
    ++mult;
  }
  return out;
}

/// Exact characteristic polynomial det(lambda*I - M) by Faddeev-LeVerrier.
inline PolyQ charpoly(const QMatrix& m) {
  const Eigen::Index n = m.rows();
  if (m.cols() != n) throw std::invalid_argument("charpoly: matrix not square");
  std::vector<Rational> c(static_cast<size_t>(n) + 1, Rational(0));
  c[static_cast<size_t>(n)] = 1;
  QMatrix mk = qmatrix_zero(n, n);  // M_0 = 0
  QMatrix id = qmatrix_identity(n);
  Rational ck(1);
  for (Eigen::Index k = 1; k <= n; ++k) {
    mk = m * (mk + ck * id);
    Rational tr(0);
    for (Eigen::Index i = 0; i < n; ++i) tr += mk(i, i);
    ck = -tr / Rational(static_cast<long>(k));
    c[static_cast<size_t>(n - k)] = ck;
  }
  return PolyQ(std::move(c));
}

}  // namespace atomlab
