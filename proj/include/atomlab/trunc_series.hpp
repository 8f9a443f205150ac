#pragma once

#include <map>
#include <stdexcept>
#include <vector>

#include "atomlab/rational.hpp"

namespace atomlab {

/// Truncated power series in q with coefficients in an arbitrary ring R.
/// Coefficients are indexed 0..order; arithmetic drops everything beyond the
/// truncation order and never extends it.
template <class R>
class TruncSeries {
 public:
  explicit TruncSeries(int order, R zero = R{})
      : order_(order), zero_(zero), c_(static_cast<size_t>(order) + 1, zero) {
    if (order < 0) throw std::invalid_argument("TruncSeries: negative order");
  }

  int order() const { return order_; }
  const R& coeff(int k) const { return c_.at(static_cast<size_t>(k)); }
  R& coeff(int k) { return c_.at(static_cast<size_t>(k)); }

  friend TruncSeries operator+(const TruncSeries& a, const TruncSeries& b) {
    TruncSeries out = a.check_compatible(b);
    for (int k = 0; k <= out.order_; ++k) out.c_[k] = a.c_[k] + b.c_[k];
    return out;
  }
  friend TruncSeries operator-(const TruncSeries& a, const TruncSeries& b) {
    TruncSeries out = a.check_compatible(b);
    for (int k = 0; k <= out.order_; ++k) out.c_[k] = a.c_[k] - b.c_[k];
    return out;
  }
  friend TruncSeries operator*(const TruncSeries& a, const TruncSeries& b) {
    TruncSeries out = a.check_compatible(b);
    for (int i = 0; i <= a.order_; ++i)
      for (int j = 0; i + j <= a.order_; ++j)
        out.c_[static_cast<size_t>(i + j)] =
            out.c_[static_cast<size_t>(i + j)] + a.c_[static_cast<size_t>(i)] * b.c_[static_cast<size_t>(j)];
    return out;
  }
  friend bool operator==(const TruncSeries& a, const TruncSeries& b) {
    return a.order_ == b.order_ && a.c_ == b.c_;
  }

 private:
  TruncSeries check_compatible(const TruncSeries& o) const {
    if (order_ != o.order_) throw std::invalid_argument("TruncSeries: mixed truncation orders");
    return TruncSeries(order_, zero_);
  }
  int order_;
  R zero_;
  std::vector<R> c_;
};

/// Laurent polynomial in u over Q; exponents may be negative. This is the
/// coefficient ring for the hypergeometric q-expansions before any numeric
/// evaluation happens.
class LaurentU {
 public:
  LaurentU() = default;
  static LaurentU term(Rational c, int e) {
    LaurentU out;
    if (c != 0) out.t_[e] = std::move(c);
    return out;
  }
  static LaurentU constant(Rational c) { return term(std::move(c), 0); }

  bool is_zero() const { return t_.empty(); }
  Rational coeff(int e) const {
    auto it = t_.find(e);
    return it == t_.end() ? Rational(0) : it->second;
  }
  const std::map<int, Rational>& terms() const { return t_; }
  int min_exp() const {
    if (is_zero()) throw std::domain_error("LaurentU::min_exp of zero");
    return t_.begin()->first;
  }
  int max_exp() const {
    if (is_zero()) throw std::domain_error("LaurentU::max_exp of zero");
    return t_.rbegin()->first;
  }

  friend LaurentU operator+(const LaurentU& a, const LaurentU& b) {
    LaurentU out = a;
    for (const auto& [e, c] : b.t_) out.add_term(e, c);
    return out;
  }
  friend LaurentU operator-(const LaurentU& a, const LaurentU& b) {
    LaurentU out = a;
    for (const auto& [e, c] : b.t_) out.add_term(e, -c);
    return out;
  }
  friend LaurentU operator-(const LaurentU& a) {
    LaurentU out;
    for (const auto& [e, c] : a.t_) out.t_[e] = -c;
    return out;
  }
  friend LaurentU operator*(const LaurentU& a, const LaurentU& b) {
    LaurentU out;
    for (const auto& [ea, ca] : a.t_)
      for (const auto& [eb, cb] : b.t_) out.add_term(ea + eb, ca * cb);
    return out;
  }
  friend LaurentU operator*(const Rational& s, const LaurentU& a) {
    LaurentU out;
    if (s == 0) return out;
    for (const auto& [e, c] : a.t_) out.t_[e] = s * c;
    return out;
  }
  LaurentU& operator+=(const LaurentU& o) { return *this = *this + o; }
  LaurentU& operator-=(const LaurentU& o) { return *this = *this - o; }
  friend bool operator==(const LaurentU& a, const LaurentU& b) { return a.t_ == b.t_; }
  friend bool operator!=(const LaurentU& a, const LaurentU& b) { return !(a == b); }

  /// Multiply by u^k.
  LaurentU shifted(int k) const {
    LaurentU out;
    for (const auto& [e, c] : t_) out.t_[e + k] = c;
    return out;
  }

  /// u -> -u (negates odd-exponent coefficients).
  LaurentU negate_u() const {
    LaurentU out;
    for (const auto& [e, c] : t_) out.t_[e] = (e % 2 != 0) ? -c : c;
    return out;
  }

  Rational eval(const Rational& u) const {
    Rational acc(0);
    for (const auto& [e, c] : t_) acc += c * pow(u, e);
    return acc;
  }

 private:
  void add_term(int e, const Rational& c) {
    auto it = t_.find(e);
    if (it == t_.end()) {
      if (c != 0) t_[e] = c;
    } else {
      it->second += c;
      if (it->second == 0) t_.erase(it);
    }
  }
  std::map<int, Rational> t_;
};

}  // namespace atomlab
