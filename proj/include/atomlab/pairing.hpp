#pragma once

#include <vector>

#include "atomlab/errors.hpp"
#include "atomlab/rational.hpp"

namespace atomlab {

/// Truncated even cohomology ring of a d-dimensional variety with ambient
/// basis P^0..P^d: cup product P^a P^b = P^{a+b} (zero beyond d), and
/// integral of the top class given by deg.
struct TruncRing {
  int d = 0;
  Rational deg = Rational(1);

  static TruncRing projective_space(int n) { return TruncRing{n, Rational(1)}; }
};

/// Cohomology class in the P-basis with Gaussian rational coefficients
/// (coefficient k is the P^k component, cohomological degree 2k).
using MukaiVector = GVector;

inline MukaiVector mukai_zero(const TruncRing& ring) {
  return GVector::Constant(ring.d + 1, 1, GaussianRational{});
}

inline MukaiVector mukai_unit(const TruncRing& ring) {
  MukaiVector v = mukai_zero(ring);
  v(0) = GaussianRational(1);
  return v;
}

inline MukaiVector cup(const TruncRing& ring, const MukaiVector& a, const MukaiVector& b) {
  MukaiVector out = mukai_zero(ring);
  for (int i = 0; i <= ring.d; ++i)
    for (int j = 0; i + j <= ring.d; ++j) out(i + j) += a(i) * b(j);
  return out;
}

inline GaussianRational integrate(const TruncRing& ring, const MukaiVector& v) {
  return v(ring.d) * GaussianRational(ring.deg);
}

/// exp of a degree-one class c*P, truncated: sum_j (c P)^j / j!.
inline MukaiVector exp_p1(const TruncRing& ring, const GaussianRational& c) {
  MukaiVector out = mukai_zero(ring);
  GaussianRational term(1);
  for (int j = 0; j <= ring.d; ++j) {
    out(j) = term;
    term = term * c / GaussianRational(Rational(j + 1));
  }
  return out;
}

/// v^dual: multiply the degree-2a component by i^{2a} = (-1)^a.
inline MukaiVector v_dual(const MukaiVector& v) {
  MukaiVector out = v;
  for (Eigen::Index a = 0; a < v.size(); ++a)
    if (a % 2 == 1) out(a) = -out(a);
  return out;
}

namespace detail {

inline GaussianRational p1_component(const TruncRing& ring, const MukaiVector& c1,
                                     const char* caller) {
  for (int k = 0; k <= ring.d; ++k)
    if (k != 1 && !c1(k).is_zero())
      throw DomainError(std::string(caller) + ": c1 must be concentrated in P^1");
  return ring.d >= 1 ? c1(1) : GaussianRational{};
}

}  // namespace detail

/// <v, w> = integral of (v^dual cup w cup exp(c1/2)).
inline GaussianRational mukai_pairing(const TruncRing& ring, const MukaiVector& v,
                                      const MukaiVector& w, const MukaiVector& c1) {
  const GaussianRational c = detail::p1_component(ring, c1, "mukai_pairing");
  const MukaiVector twist = exp_p1(ring, c / GaussianRational(Rational(2)));
  return integrate(ring, cup(ring, cup(ring, v_dual(v), w), twist));
}

/// Truncated sqrt of a unit-constant-term class via the binomial series.
inline MukaiVector sqrt_class(const TruncRing& ring, const MukaiVector& td) {
  if (td(0) != GaussianRational(1))
    throw BadTodd("sqrt_class: constant term must be 1");
  MukaiVector x = td;
  x(0) = GaussianRational{};  // td = 1 + x, x nilpotent
  MukaiVector out = mukai_unit(ring);
  MukaiVector xpow = mukai_unit(ring);
  Rational coeff(1);
  for (int j = 1; j <= ring.d; ++j) {
    // binomial(1/2, j) = binomial(1/2, j-1) * (1/2 - (j-1)) / j
    coeff *= (rational(1, 2) - Rational(j - 1)) / Rational(j);
    xpow = cup(ring, xpow, x);
    for (int k = 0; k <= ring.d; ++k) out(k) += GaussianRational(coeff) * xpow(k);
  }
  return out;
}

/// chi(a, b) = <sqrt(td) cup a, sqrt(td) cup b>, with c1 read off from td
/// (td = 1 + c1/2 + ...).
inline GaussianRational euler_pairing(const TruncRing& ring, const MukaiVector& a,
                                      const MukaiVector& b, const MukaiVector& td) {
  const MukaiVector root = sqrt_class(ring, td);
  MukaiVector c1 = mukai_zero(ring);
  if (ring.d >= 1) c1(1) = td(1) * GaussianRational(Rational(2));
  return mukai_pairing(ring, cup(ring, root, a), cup(ring, root, b), c1);
}

/// Todd class of P^n, (P / (1 - e^{-P}))^{n+1}, truncated exactly.
inline MukaiVector todd_projective_space(const TruncRing& ring) {
  const int n = ring.d;
  // P / (1 - e^{-P}) = 1 / (sum_{j>=0} (-1)^j P^j / (j+1)!)
  MukaiVector den = mukai_zero(ring);
  Rational fact(1);
  for (int j = 0; j <= n; ++j) {
    fact *= Rational(j + 1);
    den(j) = GaussianRational((j % 2 == 0 ? Rational(1) : Rational(-1)) / fact);
  }
  // invert the unit-constant-term class by Neumann series
  MukaiVector x = den;
  x(0) = GaussianRational{};
  MukaiVector inv = mukai_unit(ring);
  MukaiVector xpow = mukai_unit(ring);
  for (int j = 1; j <= n; ++j) {
    xpow = cup(ring, xpow, x);
    const Rational sign = (j % 2 == 0) ? Rational(1) : Rational(-1);
    for (int k = 0; k <= n; ++k) inv(k) += GaussianRational(sign) * xpow(k);
  }
  MukaiVector td = mukai_unit(ring);
  for (int rep = 0; rep <= n; ++rep) td = cup(ring, td, inv);
  return td;
}

/// Matrix of cup product by (-1)^d exp(-c1) on the P-basis.
inline GMatrix serre_operator(const TruncRing& ring, const MukaiVector& c1, int d) {
  const GaussianRational c = detail::p1_component(ring, c1, "serre_operator");
  const MukaiVector e = exp_p1(ring, -c);
  const GaussianRational sign((d % 2 == 0) ? Rational(1) : Rational(-1));
  GMatrix m = gmatrix_zero(ring.d + 1, ring.d + 1);
  for (int j = 0; j <= ring.d; ++j)        // image of P^j
    for (int k = 0; j + k <= ring.d; ++k)  // P^{j+k} component
      m(j + k, j) = sign * e(k);
  return m;
}

struct SerreRelationReport {
  int samples = 0;
  bool passed = true;
  MukaiVector witness_a, witness_b;  // populated on failure
};

/// Checks chi(a, b) = chi(b, S a) exactly on the given sample vectors.
inline SerreRelationReport serre_relation_check(const TruncRing& ring, const MukaiVector& c1,
                                                const MukaiVector& td, int d,
                                                const std::vector<std::pair<MukaiVector, MukaiVector>>& samples) {
  const GMatrix s = serre_operator(ring, c1, d);
  SerreRelationReport rep;
  for (const auto& [a, b] : samples) {
    ++rep.samples;
    const MukaiVector sa = s * a;
    if (euler_pairing(ring, a, b, td) != euler_pairing(ring, b, sa, td)) {
      rep.passed = false;
      rep.witness_a = a;
      rep.witness_b = b;
      throw RelationViolated("serre_relation_check: chi(a,b) != chi(b,Sa) on a sample");
    }
  }
  return rep;
}

/// mon_1 = (G^T)^{-1} G for an invertible Gram matrix.
inline GMatrix monodromy_from_pairing(const GMatrix& g) {
  GMatrix gt = g.transpose();
  GMatrix inv;
  if (!exact_inverse(gt, inv)) throw SingularMatrix("monodromy_from_pairing: singular pairing");
  return inv * g;
}

/// Gram matrix of the Euler pairing on the P-basis.
inline GMatrix euler_gram(const TruncRing& ring, const MukaiVector& td) {
  GMatrix g = gmatrix_zero(ring.d + 1, ring.d + 1);
  for (int i = 0; i <= ring.d; ++i)
    for (int j = 0; j <= ring.d; ++j) {
      MukaiVector a = mukai_zero(ring), b = mukai_zero(ring);
      a(i) = GaussianRational(1);
      b(j) = GaussianRational(1);
      g(i, j) = euler_pairing(ring, a, b, td);
    }
  return g;
}

}  // namespace atomlab
