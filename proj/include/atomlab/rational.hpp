#pragma once

#include <cstdint>
#include <ostream>
#include <stdexcept>
#include <string>

#include <gmpxx.h>

#include <Eigen/Core>

namespace atomlab {

// Exact scalars. GMP keeps them arbitrary precision; Eigen matrices over
// these types do the linear algebra.
using Integer = mpz_class;

/// mpq_class with the invariant that values are always canonical. The raw
/// two-argument mpq_class constructor does not reduce (mpq_class(2, 4) stays
/// 2/4 and then breaks exact comparison), so that entry point canonicalizes
/// here and everything else forwards to the base.
class Rational : public mpq_class {
 public:
  Rational() : mpq_class() {}
  template <typename T, typename = std::enable_if_t<std::is_integral_v<T>>>
  Rational(T v) : mpq_class(static_cast<long>(v)) {}  // NOLINT(google-explicit-constructor)
  template <typename A, typename B,
            typename = std::enable_if_t<std::is_integral_v<A> && std::is_integral_v<B>>>
  Rational(A num, B den) : mpq_class(static_cast<long>(num), static_cast<long>(den)) {
    if (den == 0) throw std::invalid_argument("Rational: zero denominator");
    canonicalize();
  }
  Rational(const mpz_class& v) : mpq_class(v) {}          // NOLINT(google-explicit-constructor)
  Rational(const mpq_class& v) : mpq_class(v) {}          // NOLINT(google-explicit-constructor)
  Rational(mpq_class&& v) : mpq_class(std::move(v)) {}    // NOLINT(google-explicit-constructor)
  template <class T, class U>
  Rational(const __gmp_expr<T, U>& e) : mpq_class(e) {}   // NOLINT(google-explicit-constructor)
};

inline Rational rational(long num, long den = 1) { return Rational(num, den); }

/// Parse "p", "p/q" or a plain integer string. Throws on malformed input.
inline Rational rational_from_string(const std::string& s) {
  if (s.empty()) throw std::invalid_argument("rational_from_string: empty");
  Rational r;
  if (r.set_str(s, 10) != 0)
    throw std::invalid_argument("rational_from_string: bad literal '" + s + "'");
  r.canonicalize();
  if (r.get_den() == 0) throw std::invalid_argument("rational_from_string: zero denominator");
  return r;
}

inline std::string to_string(const Rational& r) { return r.get_str(); }

inline double to_double(const Rational& r) { return r.get_d(); }

inline bool is_integer(const Rational& r) { return r.get_den() == 1; }

/// Exact binomial coefficient C(n, k).
inline Integer binomial(unsigned long n, unsigned long k) {
  Integer b;
  mpz_bin_uiui(b.get_mpz_t(), n, k);
  return b;
}

inline Rational pow(const Rational& base, long e) {
  if (e == 0) return Rational(1);
  Rational b = base;
  bool neg = e < 0;
  unsigned long a = neg ? static_cast<unsigned long>(-e) : static_cast<unsigned long>(e);
  Rational out;
  mpz_pow_ui(out.get_num_mpz_t(), b.get_num_mpz_t(), a);
  mpz_pow_ui(out.get_den_mpz_t(), b.get_den_mpz_t(), a);
  out.canonicalize();
  if (neg) {
    if (out == 0) throw std::domain_error("pow: negative power of zero");
    out = Rational(1) / out;
  }
  return out;
}

/// Rationals extended by sqrt(-1); the coefficient field for dual classes and
/// Mukai-type pairings.
struct GaussianRational {
  Rational re{0};
  Rational im{0};

  GaussianRational() = default;
  GaussianRational(Rational r) : re(std::move(r)) {}              // NOLINT(google-explicit-constructor)
  GaussianRational(long r) : re(r) {}                             // NOLINT(google-explicit-constructor)
  GaussianRational(Rational r, Rational i) : re(std::move(r)), im(std::move(i)) {}

  static GaussianRational i() { return {Rational(0), Rational(1)}; }

  bool is_zero() const { return re == 0 && im == 0; }
  bool is_real() const { return im == 0; }

  GaussianRational conj() const { return {re, -im}; }
  Rational norm() const { return re * re + im * im; }

  friend GaussianRational operator+(const GaussianRational& a, const GaussianRational& b) {
    return {a.re + b.re, a.im + b.im};
  }
  friend GaussianRational operator-(const GaussianRational& a, const GaussianRational& b) {
    return {a.re - b.re, a.im - b.im};
  }
  friend GaussianRational operator-(const GaussianRational& a) { return {-a.re, -a.im}; }
  friend GaussianRational operator*(const GaussianRational& a, const GaussianRational& b) {
    return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
  }
  friend GaussianRational operator/(const GaussianRational& a, const GaussianRational& b) {
    Rational n = b.norm();
    if (n == 0) throw std::domain_error("GaussianRational: division by zero");
    GaussianRational c = a * b.conj();
    return {c.re / n, c.im / n};
  }
  GaussianRational& operator+=(const GaussianRational& o) { return *this = *this + o; }
  GaussianRational& operator-=(const GaussianRational& o) { return *this = *this - o; }
  GaussianRational& operator*=(const GaussianRational& o) { return *this = *this * o; }
  GaussianRational& operator/=(const GaussianRational& o) { return *this = *this / o; }

  friend bool operator==(const GaussianRational& a, const GaussianRational& b) {
    return a.re == b.re && a.im == b.im;
  }
  friend bool operator!=(const GaussianRational& a, const GaussianRational& b) { return !(a == b); }
};

inline std::string to_string(const GaussianRational& z) {
  if (z.im == 0) return z.re.get_str();
  return z.re.get_str() + (z.im > 0 ? "+" : "") + z.im.get_str() + "*i";
}

inline std::ostream& operator<<(std::ostream& os, const GaussianRational& z) {
  return os << to_string(z);
}

}  // namespace atomlab

namespace Eigen {

template <>
struct NumTraits<atomlab::Rational> : GenericNumTraits<atomlab::Rational> {
  using Real = atomlab::Rational;
  using NonInteger = atomlab::Rational;
  using Literal = atomlab::Rational;
  using Nested = atomlab::Rational;

  static inline Real epsilon() { return {}; }
  static inline Real dummy_precision() { return {}; }
  static inline int digits10() { return 0; }

  enum {
    IsInteger = 0,
    IsSigned = 1,
    IsComplex = 0,
    RequireInitialization = 1,
    ReadCost = 6,
    AddCost = 150,
    MulCost = 100
  };
};

// GaussianRational is declared non-complex to Eigen on purpose: products then
// stay plain field arithmetic and never route through std::conj/imag. Use
// .transpose() (not .adjoint()) and atomlab conj() explicitly.
template <>
struct NumTraits<atomlab::GaussianRational> : GenericNumTraits<atomlab::GaussianRational> {
  using Real = atomlab::GaussianRational;
  using NonInteger = atomlab::GaussianRational;
  using Literal = atomlab::GaussianRational;
  using Nested = atomlab::GaussianRational;

  static inline Real epsilon() { return {}; }
  static inline Real dummy_precision() { return {}; }
  static inline int digits10() { return 0; }

  enum {
    IsInteger = 0,
    IsSigned = 1,
    IsComplex = 0,
    RequireInitialization = 1,
    ReadCost = 12,
    AddCost = 300,
    MulCost = 400
  };
};

}  // namespace Eigen

namespace atomlab {

// Dense exact matrix types.
using QMatrix = Eigen::Matrix<Rational, Eigen::Dynamic, Eigen::Dynamic>;
using QVector = Eigen::Matrix<Rational, Eigen::Dynamic, 1>;
using QRowVector = Eigen::Matrix<Rational, 1, Eigen::Dynamic>;
using GMatrix = Eigen::Matrix<GaussianRational, Eigen::Dynamic, Eigen::Dynamic>;
using GVector = Eigen::Matrix<GaussianRational, Eigen::Dynamic, 1>;

inline QMatrix qmatrix_zero(Eigen::Index rows, Eigen::Index cols) {
  return QMatrix::Constant(rows, cols, Rational(0));
}

inline QMatrix qmatrix_identity(Eigen::Index n) {
  QMatrix m = qmatrix_zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) m(i, i) = 1;
  return m;
}

inline GMatrix gmatrix_zero(Eigen::Index rows, Eigen::Index cols) {
  return GMatrix::Constant(rows, cols, GaussianRational{});
}

inline GMatrix gmatrix_identity(Eigen::Index n) {
  GMatrix m = gmatrix_zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) m(i, i) = GaussianRational(1);
  return m;
}

/// Entrywise equality for matrices over exact scalars (Eigen's operator== is
/// coefficient-wise, not boolean).
template <class MatA, class MatB>
bool exact_equal(const MatA& a, const MatB& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) return false;
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      if (!(a(i, j) == b(i, j))) return false;
  return true;
}

/// In-place Gauss-Jordan inverse over an exact field. Returns false when
/// singular. Works for Rational and GaussianRational alike.
template <class Mat>
bool exact_inverse(const Mat& a, Mat& out) {
  using Scalar = typename Mat::Scalar;
  const Eigen::Index n = a.rows();
  if (a.cols() != n) throw std::invalid_argument("exact_inverse: matrix not square");
  Mat m = a;
  Mat inv = Mat::Constant(n, n, Scalar(0));
  for (Eigen::Index i = 0; i < n; ++i) inv(i, i) = Scalar(1);
  for (Eigen::Index col = 0; col < n; ++col) {
    Eigen::Index piv = -1;
    for (Eigen::Index r = col; r < n; ++r)
      if (!(m(r, col) == Scalar(0))) { piv = r; break; }
    if (piv < 0) return false;
    if (piv != col) { m.row(piv).swap(m.row(col)); inv.row(piv).swap(inv.row(col)); }
    Scalar d = m(col, col);
    for (Eigen::Index j = 0; j < n; ++j) { m(col, j) = m(col, j) / d; inv(col, j) = inv(col, j) / d; }
    for (Eigen::Index r = 0; r < n; ++r) {
      if (r == col || m(r, col) == Scalar(0)) continue;
      Scalar f = m(r, col);
      for (Eigen::Index j = 0; j < n; ++j) {
        m(r, j) = m(r, j) - f * m(col, j);
        inv(r, j) = inv(r, j) - f * inv(col, j);
      }
    }
  }
  out = std::move(inv);
  return true;
}

/// Row space rank over an exact field (destructive elimination on a copy).
template <class Mat>
Eigen::Index exact_rank(Mat m) {
  using Scalar = typename Mat::Scalar;
  const Eigen::Index rows = m.rows(), cols = m.cols();
  Eigen::Index rank = 0;
  for (Eigen::Index col = 0; col < cols && rank < rows; ++col) {
    Eigen::Index piv = -1;
    for (Eigen::Index r = rank; r < rows; ++r)
      if (!(m(r, col) == Scalar(0))) { piv = r; break; }
    if (piv < 0) continue;
    if (piv != rank) m.row(piv).swap(m.row(rank));
    Scalar d = m(rank, col);
    for (Eigen::Index r = rank + 1; r < rows; ++r) {
      if (m(r, col) == Scalar(0)) continue;
      Scalar f = m(r, col) / d;
      for (Eigen::Index j = col; j < cols; ++j) m(r, j) = m(r, j) - f * m(rank, j);
    }
    ++rank;
  }
  return rank;
}

}  // namespace atomlab
