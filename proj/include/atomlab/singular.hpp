#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <map>
#include <numbers>
#include <string>
#include <vector>

#include "atomlab/errors.hpp"
#include "atomlab/rational.hpp"
#include "atomlab/roots.hpp"

namespace atomlab {

/// Polynomial germ in at most two variables (x, y) with rational coefficients,
/// vanishing at the origin to order >= 2.
class PolyGerm {
 public:
  using Exponent = std::pair<int, int>;

  explicit PolyGerm(std::map<Exponent, Rational> terms) : t_(std::move(terms)) {
    for (auto it = t_.begin(); it != t_.end();) {
      if (it->second == 0) it = t_.erase(it);
      else ++it;
    }
    if (t_.empty()) throw DomainError("PolyGerm: zero germ");
    for (const auto& [e, c] : t_) {
      if (e.first < 0 || e.second < 0) throw DomainError("PolyGerm: negative exponent");
      if (e.first + e.second < 2)
        throw DomainError("PolyGerm: germ must vanish to order >= 2 at the origin");
    }
  }

  /// x^n (or y^n on variable 1).
  static PolyGerm power(int n, int variable = 0) {
    if (n < 2) throw DomainError("PolyGerm::power: exponent must be >= 2");
    std::map<Exponent, Rational> t;
    t[variable == 0 ? Exponent{n, 0} : Exponent{0, n}] = 1;
    return PolyGerm(std::move(t));
  }

  const std::map<Exponent, Rational>& terms() const { return t_; }
  int degree() const {
    int d = 0;
    for (const auto& [e, c] : t_) d = std::max(d, e.first + e.second);
    return d;
  }
  bool uses_variable(int v) const {
    for (const auto& [e, c] : t_)
      if ((v == 0 ? e.first : e.second) > 0) return true;
    return false;
  }

  PolyGerm external_sum(const PolyGerm& other) const {
    if (uses_variable(1) || other.uses_variable(0))
      throw DomainError("external_sum: variable sets must be disjoint (x for the left germ, y for the right)");
    std::map<Exponent, Rational> t = t_;
    for (const auto& [e, c] : other.t_) t[e] += c;
    return PolyGerm(std::move(t));
  }

  /// Partial derivative; may vanish to order < 2, so returned as a raw term map.
  std::map<Exponent, Rational> derivative(int v) const {
    std::map<Exponent, Rational> out;
    for (const auto& [e, c] : t_) {
      const int ev = v == 0 ? e.first : e.second;
      if (ev == 0) continue;
      Exponent de = v == 0 ? Exponent{e.first - 1, e.second} : Exponent{e.first, e.second - 1};
      out[de] += Rational(ev) * c;
    }
    return out;
  }

 private:
  std::map<Exponent, Rational> t_;
};

/// Cyclic group Z/N acting diagonally with integer weights per variable.
struct CyclicAction {
  int order = 1;                 // N >= 1
  std::array<int, 2> weights{};  // weight per variable, mod N

  void validate() const {
    if (order < 1) throw DomainError("CyclicAction: order must be >= 1");
  }
  int weighted_degree(int ex, int ey) const {
    const long w = static_cast<long>(ex) * weights[0] + static_cast<long>(ey) * weights[1];
    return static_cast<int>(((w % order) + order) % order);
  }
  bool preserves(const PolyGerm& f) const {
    for (const auto& [e, c] : f.terms())
      if (weighted_degree(e.first, e.second) != 0) return false;
    return true;
  }
};

struct MilnorData {
  long mu = 0;
  long mu_g = -1;  // -1 when no action was supplied
  std::vector<PolyGerm::Exponent> standard_monomials;
};

namespace detail {

/// Quotient dimension of the jet space (monomials of total degree <= bound in
/// the variables the germ actually uses) by the truncated Jacobian span; also
/// reports the standard-monomial basis.
inline std::pair<long, std::vector<PolyGerm::Exponent>> milnor_at_bound(const PolyGerm& f,
                                                                        int bound) {
  using Exponent = PolyGerm::Exponent;
  const bool use_x = f.uses_variable(0), use_y = f.uses_variable(1);
  std::vector<Exponent> monomials;
  for (int d = 0; d <= bound; ++d)
    for (int ex = d; ex >= 0; --ex) {
      if (!use_x && ex > 0) continue;
      if (!use_y && d - ex > 0) continue;
      monomials.push_back({ex, d - ex});
    }
  std::map<Exponent, size_t> index;
  // columns ordered by decreasing graded-lex rank, so elimination pivots on
  // high-degree monomials and the quotient basis collects the low ones
  for (size_t i = 0; i < monomials.size(); ++i) index[monomials[i]] = monomials.size() - 1 - i;

  const auto fx = f.derivative(0);
  const auto fy = f.derivative(1);
  std::vector<std::vector<Rational>> rows;
  for (const auto* part : {&fx, &fy}) {
    if (part->empty()) continue;
    for (const auto& m : monomials) {
      std::vector<Rational> row(monomials.size(), Rational(0));
      bool nonzero = false;
      for (const auto& [e, c] : *part) {
        const int ex = e.first + m.first, ey = e.second + m.second;
        if (ex + ey > bound) continue;  // quotient by m^{bound+1}
        row[index.at({ex, ey})] += c;
        nonzero = true;
      }
      if (nonzero) rows.push_back(std::move(row));
    }
  }

  // exact elimination, tracking pivot columns
  std::vector<bool> pivot(monomials.size(), false);
  size_t rank = 0;
  for (size_t col = 0; col < monomials.size() && rank < rows.size(); ++col) {
    size_t piv = rank;
    while (piv < rows.size() && rows[piv][col] == 0) ++piv;
    if (piv == rows.size()) continue;
    std::swap(rows[piv], rows[rank]);
    const Rational d = rows[rank][col];
    for (size_t r = 0; r < rows.size(); ++r) {
      if (r == rank || rows[r][col] == 0) continue;
      const Rational fct = rows[r][col] / d;
      for (size_t j = col; j < monomials.size(); ++j) rows[r][j] -= fct * rows[rank][j];
    }
    pivot[col] = true;
    ++rank;
  }

  std::vector<Exponent> standard;
  for (const auto& m : monomials)
    if (!pivot[index.at(m)]) standard.push_back(m);
  return {static_cast<long>(standard.size()), std::move(standard)};
}

}  // namespace detail

/// Milnor number as the stabilized jet-quotient dimension. The bound grows
/// from deg(f)+2 to 2 deg(f)+4; two consecutive equal dimensions certify
/// stabilization (Nakayama), otherwise the singularity is not isolated.
inline MilnorData milnor_number(const PolyGerm& f) {
  const int start = f.degree() + 2;
  const int stop = 2 * f.degree() + 4;
  long prev = -1;
  for (int bound = start; bound <= stop; ++bound) {
    auto [dim, standard] = detail::milnor_at_bound(f, bound);
    if (dim == prev) {
      MilnorData out;
      out.mu = dim;
      out.standard_monomials = std::move(standard);
      return out;
    }
    prev = dim;
  }
  throw NonIsolated("milnor_number: jet dimension did not stabilize up to bound " +
                    std::to_string(stop));
}

/// Dimension of the invariants in the Milnor ring: standard monomials of
/// weighted degree 0 mod N.
inline MilnorData equivariant_milnor(const PolyGerm& f, const CyclicAction& action) {
  action.validate();
  if (!action.preserves(f))
    throw ActionMismatch("equivariant_milnor: the action does not preserve the germ");
  MilnorData data = milnor_number(f);
  long count = 0;
  for (const auto& e : data.standard_monomials)
    if (action.weighted_degree(e.first, e.second) == 0) ++count;
  data.mu_g = count;
  return data;
}

struct ThomSebastiani {
  long direct = 0;   // mu(f boxplus g) by jet computation
  long product = 0;  // mu(f) * mu(g)
};

/// Thom-Sebastiani multiplicativity, computed both ways.
inline ThomSebastiani thom_sebastiani_mu(const PolyGerm& f, const PolyGerm& g) {
  ThomSebastiani out;
  out.direct = milnor_number(f.external_sum(g)).mu;
  out.product = milnor_number(f).mu * milnor_number(g).mu;
  if (out.direct != out.product)
    throw Inconsistent("thom_sebastiani_mu: direct and product computations disagree");
  return out;
}

using CriticalPoint = std::array<Complex, 2>;

struct UnfoldingOrbit {
  std::vector<CriticalPoint> points;
  Complex value;
  int stabilizer_order = 1;
};

struct UnfoldingReport {
  int n = 0;  // N
  std::vector<CriticalPoint> critical_points;
  std::vector<Complex> critical_values;                  // distinct values
  std::vector<std::pair<Complex, int>> value_clusters;   // (value, point count)
  std::vector<UnfoldingOrbit> orbits;
  std::vector<std::pair<std::string, int>> chemical_formula;
  bool degenerate = false;
};

/// Critical-point analysis of the Z/N-equivariant unfolding
///   F = x1^N + x2^N - z1 x1 x2 + z2,
/// using the gradient equations x_i^{N-1} = (z1/N) x_{3-i} in closed form:
/// besides the origin, for each of the N-2 roots c of c^{N-2} = (z1/N)^N
/// there are the N points (b, (N c / z1) b^{-1}) with b^N = c. Critical values
/// are z2 and z2 - (N-2) c; the origin is a full Z/N orbit, the rest are free.
inline UnfoldingReport ts_unfolding_atoms(int n, const Rational& z1, const Rational& z2,
                                          double tol = 1e-9) {
  if (n < 3) throw DomainError("ts_unfolding_atoms: N must be >= 3");
  if (z1 == 0) throw DomainError("ts_unfolding_atoms: z1 must be nonzero");

  UnfoldingReport rep;
  rep.n = n;

  // roots of c^{N-2} = (z1/N)^N
  const Rational target = pow(z1 / Rational(n), n);
  std::vector<Rational> coeffs(static_cast<size_t>(n - 1), Rational(0));
  coeffs[0] = -target;
  coeffs[static_cast<size_t>(n - 2)] = 1;
  const Spectrum cs = roots_clustered(PolyQ(std::move(coeffs)), 1e-12);
  std::vector<Complex> c_roots;
  for (const auto& cl : cs.clusters)
    for (int i = 0; i < cl.multiplicity; ++i) c_roots.push_back(cl.value);

  UnfoldingOrbit origin;
  origin.points.push_back({Complex(0, 0), Complex(0, 0)});
  origin.value = Complex(to_double(z2), 0.0);
  origin.stabilizer_order = n;
  rep.orbits.push_back(origin);
  rep.critical_points.push_back(origin.points[0]);
  rep.critical_values.push_back(origin.value);
  rep.value_clusters.emplace_back(origin.value, 1);

  const double z1d = to_double(z1);
  for (const Complex& c : c_roots) {
    UnfoldingOrbit orbit;
    orbit.stabilizer_order = 1;
    orbit.value = Complex(to_double(z2), 0.0) - static_cast<double>(n - 2) * c;
    const double mag = std::pow(std::abs(c), 1.0 / n);
    const double arg = std::arg(c);
    for (int k = 0; k < n; ++k) {
      const double theta = (arg + 2.0 * std::numbers::pi * k) / n;
      const Complex beta(mag * std::cos(theta), mag * std::sin(theta));
      const Complex x2 = static_cast<double>(n) * c / (z1d * beta);
      orbit.points.push_back({beta, x2});
      rep.critical_points.push_back({beta, x2});
    }
    rep.critical_values.push_back(orbit.value);
    rep.value_clusters.emplace_back(orbit.value, n);
    rep.orbits.push_back(std::move(orbit));
  }

  for (size_t i = 0; i < rep.critical_values.size(); ++i)
    for (size_t j = i + 1; j < rep.critical_values.size(); ++j)
      if (std::abs(rep.critical_values[i] - rep.critical_values[j]) < tol) rep.degenerate = true;

  rep.chemical_formula.emplace_back("G-Morse", 1);
  rep.chemical_formula.emplace_back("free-Morse", n - 2);
  return rep;
}

}  // namespace atomlab
