#pragma once

#include <map>
#include <string>
#include <tuple>

#include "atomlab/rational.hpp"
#include "atomlab/trunc_series.hpp"

namespace atomlab {

/// Noncommutative differential operators in D = u*q*d/dq over Q[q, u, u^-1].
/// Normal form collects q on the left and D on the right, so every operator
/// is a sum of terms coeff * q^a * u^b * D^c. The single relation is
///   D o q^a = q^a o (D + a*u).
class DiffOp {
 public:
  // (q-power a >= 0, u-power b, D-power c >= 0) -> coefficient
  using Key = std::tuple<int, int, int>;

  DiffOp() = default;
  static DiffOp zero() { return {}; }
  static DiffOp term(Rational coeff, int q_pow, int u_pow, int d_pow) {
    DiffOp op;
    op.add(q_pow, u_pow, d_pow, coeff);
    return op;
  }
  static DiffOp one() { return term(Rational(1), 0, 0, 0); }
  static DiffOp d() { return term(Rational(1), 0, 0, 1); }
  static DiffOp q() { return term(Rational(1), 1, 0, 0); }
  static DiffOp u(int pow = 1) { return term(Rational(1), 0, pow, 0); }

  bool is_zero() const { return terms_.empty(); }
  const std::map<Key, Rational>& terms() const { return terms_; }
  Rational coeff(int q_pow, int u_pow, int d_pow) const {
    auto it = terms_.find({q_pow, u_pow, d_pow});
    return it == terms_.end() ? Rational(0) : it->second;
  }
  int max_q_power() const {
    int m = 0;
    for (const auto& [k, c] : terms_) m = std::max(m, std::get<0>(k));
    return m;
  }

  friend DiffOp operator+(const DiffOp& a, const DiffOp& b) {
    DiffOp out = a;
    for (const auto& [k, c] : b.terms_) out.add(std::get<0>(k), std::get<1>(k), std::get<2>(k), c);
    return out;
  }
  friend DiffOp operator-(const DiffOp& a, const DiffOp& b) {
    DiffOp out = a;
    for (const auto& [k, c] : b.terms_) out.add(std::get<0>(k), std::get<1>(k), std::get<2>(k), -c);
    return out;
  }
  friend DiffOp operator-(const DiffOp& a) {
    DiffOp out;
    for (const auto& [k, c] : a.terms_) out.terms_[k] = -c;
    return out;
  }
  friend DiffOp operator*(const Rational& s, const DiffOp& a) {
    DiffOp out;
    if (s == 0) return out;
    for (const auto& [k, c] : a.terms_) out.terms_[k] = s * c;
    return out;
  }
  friend bool operator==(const DiffOp& a, const DiffOp& b) { return a.terms_ == b.terms_; }
  friend bool operator!=(const DiffOp& a, const DiffOp& b) { return !(a == b); }

  /// Composition of operators; total and associative.
  friend DiffOp operator*(const DiffOp& l, const DiffOp& r) { return diffop_mul(l, r); }

  friend DiffOp diffop_mul(const DiffOp& l, const DiffOp& r) {
    DiffOp out;
    for (const auto& [kl, cl] : l.terms_) {
      const auto [a1, b1, c1] = kl;
      for (const auto& [kr, cr] : r.terms_) {
        const auto [a2, b2, c2] = kr;
        // D^c1 o q^a2 = q^a2 o (D + a2*u)^c1, expanded binomially.
        Rational base = cl * cr;
        Integer a2z(static_cast<long>(a2));
        for (int k = 0; k <= c1; ++k) {
          Rational coeff = base * Rational(binomial(static_cast<unsigned long>(c1),
                                                    static_cast<unsigned long>(k)));
          if (a2 == 0 && k != c1) continue;  // a2^(c1-k) vanishes
          if (c1 - k > 0) {
            Integer p;
            mpz_pow_ui(p.get_mpz_t(), a2z.get_mpz_t(), static_cast<unsigned long>(c1 - k));
            coeff *= Rational(p);
          }
          out.add(a1 + a2, b1 + b2 + (c1 - k), c2 + k, coeff);
        }
      }
    }
    return out;
  }

  /// Symbolic action on the test monomial q^e: substituting D q^e = e*u*q^e
  /// turns q^a u^b D^c into e^c q^(a+e) u^(b+c). Returned as a Laurent
  /// polynomial in u per resulting q-power.
  std::map<int, LaurentU> apply_to_monomial(int e) const {
    std::map<int, LaurentU> out;
    for (const auto& [k, c] : terms_) {
      const auto [a, b, cc] = k;
      Rational w = c * pow(Rational(e), cc);
      out[a + e] += LaurentU::term(w, b + cc);
    }
    for (auto it = out.begin(); it != out.end();) {
      if (it->second.is_zero()) it = out.erase(it);
      else ++it;
    }
    return out;
  }

  std::string str() const;

 private:
  void add(int a, int b, int c, const Rational& v) {
    if (v == 0) return;
    Key k{a, b, c};
    auto it = terms_.find(k);
    if (it == terms_.end()) {
      terms_[k] = v;
    } else {
      it->second += v;
      if (it->second == 0) terms_.erase(it);
    }
  }
  std::map<Key, Rational> terms_;
};

inline std::string DiffOp::str() const {
  if (terms_.empty()) return "0";
  std::string out;
  for (const auto& [k, c] : terms_) {
    const auto [a, b, cc] = k;
    std::string t = c.get_str();
    if (a) t += "*q" + (a > 1 ? "^" + std::to_string(a) : "");
    if (b) t += "*u" + (b != 1 ? "^" + std::to_string(b) : "");
    if (cc) t += "*D" + (cc > 1 ? "^" + std::to_string(cc) : "");
    if (!out.empty()) out += " + ";
    out += t;
  }
  return out;
}

}  // namespace atomlab
