#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Eigenvalues>

#include "atomlab/errors.hpp"
#include "atomlab/poly.hpp"

namespace atomlab {

using Complex = std::complex<double>;

struct EigenvalueCluster {
  Complex value;         // cluster representative (exact where recognized symbolically)
  int multiplicity = 0;  // algebraic multiplicity (sum over merged roots)
  bool exact = false;    // true when produced by a symbolic factor
};

/// Eigenvalues with algebraic multiplicities; multiplicities sum to the rank
/// (resp. the polynomial degree) by construction.
struct Spectrum {
  std::vector<EigenvalueCluster> clusters;

  int total_multiplicity() const {
    int t = 0;
    for (const auto& c : clusters) t += c.multiplicity;
    return t;
  }
};

struct ClusterAmbiguity : DomainError {
  using DomainError::DomainError;
};

namespace detail {

inline std::vector<Complex> companion_roots(const PolyQ& monic) {
  const int n = monic.degree();
  Eigen::MatrixXd comp = Eigen::MatrixXd::Zero(n, n);
  for (int i = 1; i < n; ++i) comp(i, i - 1) = 1.0;
  for (int i = 0; i < n; ++i) comp(i, n - 1) = -to_double(monic.coeff(i));
  Eigen::ComplexEigenSolver<Eigen::MatrixXd> solver(comp, /*computeEigenvectors=*/false);
  std::vector<Complex> roots(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) roots[static_cast<size_t>(i)] = solver.eigenvalues()(i);
  return roots;
}

/// Refine a group of nearby companion-matrix roots by re-expanding the exact
/// polynomial around the group center and solving the local polynomial. The
/// Taylor shift is exact over Q(i), so roots separated by far less than the
/// eigensolver's sqrt(eps) resolution come back with full relative accuracy.
inline std::vector<Complex> refine_root_group(const PolyQ& monic, Complex center, size_t count) {
  const int n = monic.degree();
  const GaussianRational c{Rational(mpq_class(center.real())), Rational(mpq_class(center.imag()))};

  // in-place exact Taylor shift: after the loop a[k] is the delta^k
  // coefficient of monic(center + delta)
  std::vector<GaussianRational> a(static_cast<size_t>(n) + 1);
  for (int k = 0; k <= n; ++k) a[static_cast<size_t>(k)] = GaussianRational(monic.coeff(k));
  for (int k = 0; k < n; ++k)
    for (int j = n - 1; j >= k; --j)
      a[static_cast<size_t>(j)] += c * a[static_cast<size_t>(j + 1)];

  // exact zeros of the shifted polynomial are roots exactly at the center
  size_t valuation = 0;
  while (valuation <= static_cast<size_t>(n) && a[valuation].is_zero()) ++valuation;

  std::vector<Complex> deltas;
  for (size_t i = 0; i < std::min(valuation, count); ++i) deltas.emplace_back(0.0, 0.0);

  if (deltas.size() < count) {
    // small local roots are the inverses of the large roots of the reversed
    // polynomial, which the eigensolver resolves with good relative accuracy
    const size_t deg = static_cast<size_t>(n) - valuation;
    auto to_c = [](const GaussianRational& g) { return Complex(to_double(g.re), to_double(g.im)); };
    const Complex lead = to_c(a[valuation]);  // constant term of the reversed polynomial's monic scaling
    Eigen::MatrixXcd comp = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(deg),
                                                   static_cast<Eigen::Index>(deg));
    for (size_t i = 1; i < deg; ++i)
      comp(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i - 1)) = 1.0;
    for (size_t i = 0; i < deg; ++i)
      comp(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(deg - 1)) =
          -to_c(a[static_cast<size_t>(n) - i]) / lead;
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(comp, false);
    std::vector<Complex> inverse_roots;
    for (Eigen::Index i = 0; i < static_cast<Eigen::Index>(deg); ++i)
      inverse_roots.push_back(solver.eigenvalues()(i));
    std::sort(inverse_roots.begin(), inverse_roots.end(),
              [](Complex x, Complex y) { return std::abs(x) > std::abs(y); });
    for (const Complex& w : inverse_roots) {
      if (deltas.size() >= count) break;
      deltas.push_back(std::abs(w) > 0 ? 1.0 / w : Complex(0.0, 0.0));
    }
  }

  std::vector<Complex> refined;
  refined.reserve(deltas.size());
  for (const Complex& d : deltas) refined.push_back(center + d);
  return refined;
}

}  // namespace detail

/// Complex roots of p with multiplicities, clustering roots that sit within
/// tol of each other. Exact factors lambda^a and lambda^m - c are peeled off
/// symbolically before the companion-matrix fallback; those cover every
/// characteristic polynomial arising from the jump matrices in this project.
inline Spectrum roots_clustered(const PolyQ& p, double tol = 1e-9) {
  if (p.is_zero()) throw std::invalid_argument("roots_clustered: zero polynomial");
  if (tol <= 0) throw std::invalid_argument("roots_clustered: tol must be positive");

  PolyQ q = p.monic();
  struct RootAtom {
    Complex value;
    int mult;
    bool exact;
  };
  std::vector<RootAtom> atoms;

  const int val = q.valuation();
  if (val > 0) {
    atoms.push_back({Complex(0.0, 0.0), val, true});
    q = q.shift_down(val);
  }

  if (q.degree() > 0) {
    // binomial lambda^m - c has exact roots in polar form
    bool binomial_form = true;
    for (int k = 1; k < q.degree(); ++k)
      if (q.coeff(k) != 0) { binomial_form = false; break; }
    if (binomial_form) {
      const int m = q.degree();
      const Rational c = -q.coeff(0);
      const double mag = std::pow(std::abs(to_double(c)), 1.0 / m);
      const double base_arg = to_double(c) >= 0 ? 0.0 : std::numbers::pi;
      for (int k = 0; k < m; ++k) {
        const double theta = (base_arg + 2.0 * std::numbers::pi * k) / m;
        atoms.push_back({Complex(mag * std::cos(theta), mag * std::sin(theta)), 1, true});
      }
      q = PolyQ::constant(Rational(1));
    }
  }

  if (q.degree() > 0) {
    // exact multiplicities come from the squarefree decomposition over Q;
    // each squarefree factor is solved numerically with simple roots only
    for (const auto& [factor, mult] : squarefree_decomposition(q)) {
      const std::vector<Complex> raw = detail::companion_roots(factor);
      // group at the eigensolver's resolution, then sharpen every group by
      // exact re-expansion; the tol-clustering then sees trustworthy positions
      const size_t nr = raw.size();
      std::vector<int> group(nr, -1);
      int ngroups = 0;
      auto coarse = [](Complex a, Complex b) {
        return std::abs(a - b) <= 1e-6 * (1.0 + std::min(std::abs(a), std::abs(b)));
      };
      for (size_t i = 0; i < nr; ++i) {
        if (group[i] >= 0) continue;
        group[i] = ngroups;
        std::vector<size_t> stack{i};
        while (!stack.empty()) {
          const size_t a = stack.back();
          stack.pop_back();
          for (size_t b = 0; b < nr; ++b)
            if (group[b] < 0 && coarse(raw[a], raw[b])) {
              group[b] = ngroups;
              stack.push_back(b);
            }
        }
        ++ngroups;
      }
      for (int g = 0; g < ngroups; ++g) {
        Complex center(0, 0);
        size_t count = 0;
        for (size_t i = 0; i < nr; ++i)
          if (group[i] == g) {
            center += raw[i];
            ++count;
          }
        center /= static_cast<double>(count);
        for (const Complex& z : detail::refine_root_group(factor, center, count))
          atoms.push_back({z, mult, false});
      }
    }
  }

  // one clustering pass over symbolic and refined numeric roots together:
  // connected components at tol, rejected when a component's diameter exceeds
  // tol (the merge would be order-dependent)
  const size_t na = atoms.size();
  std::vector<int> comp(na, -1);
  int ncomp = 0;
  for (size_t i = 0; i < na; ++i) {
    if (comp[i] >= 0) continue;
    comp[i] = ncomp;
    std::vector<size_t> stack{i};
    while (!stack.empty()) {
      const size_t a = stack.back();
      stack.pop_back();
      for (size_t b = 0; b < na; ++b)
        if (comp[b] < 0 && std::abs(atoms[a].value - atoms[b].value) <= tol) {
          comp[b] = ncomp;
          stack.push_back(b);
        }
    }
    ++ncomp;
  }
  for (size_t i = 0; i < na; ++i)
    for (size_t j = i + 1; j < na; ++j)
      if (comp[i] == comp[j] && std::abs(atoms[i].value - atoms[j].value) > tol)
        throw ClusterAmbiguity(
            "roots_clustered: merge at tol is order-dependent (cluster diameter exceeds tol)");

  Spectrum spec;
  spec.clusters.assign(static_cast<size_t>(ncomp), EigenvalueCluster{});
  for (size_t i = 0; i < na; ++i) {
    auto& c = spec.clusters[static_cast<size_t>(comp[i])];
    c.multiplicity += atoms[i].mult;
    c.value += static_cast<double>(atoms[i].mult) * atoms[i].value;
  }
  for (auto& c : spec.clusters) c.value /= static_cast<double>(c.multiplicity);
  for (size_t i = 0; i < na; ++i) {
    auto& c = spec.clusters[static_cast<size_t>(comp[i])];
    if (atoms[i].exact) {
      c.value = atoms[i].value;  // exact representative wins
      c.exact = true;
    }
  }
  std::sort(spec.clusters.begin(), spec.clusters.end(), [](const auto& a, const auto& b) {
    if (std::abs(a.value) != std::abs(b.value)) return std::abs(a.value) < std::abs(b.value);
    return std::arg(a.value) < std::arg(b.value);
  });
  return spec;
}

}  // namespace atomlab
