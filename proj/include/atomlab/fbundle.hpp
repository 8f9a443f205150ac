#pragma once

#include <map>
#include <optional>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Eigenvalues>

#include "atomlab/errors.hpp"
#include "atomlab/poly.hpp"
#include "atomlab/qde.hpp"
#include "atomlab/roots.hpp"

namespace atomlab {

/// Germ-level (pointwise) F-bundle data: residual endomorphism kappa, the
/// diagonal grading, and optional cohomological degree labels.
struct ConnectionGerm {
  QMatrix kappa;
  QMatrix grading;
  std::optional<std::vector<int>> degrees;  // per basis vector
  std::optional<int> top_degree;            // D such that grading_i = (deg_i - D)/2

  int rank() const { return static_cast<int>(kappa.rows()); }

  static ConnectionGerm make(QMatrix kappa, QMatrix grading) {
    validate_shapes(kappa, grading);
    return ConnectionGerm{std::move(kappa), std::move(grading), std::nullopt, std::nullopt};
  }

  static ConnectionGerm graded(QMatrix kappa, std::vector<int> degrees, int top_degree) {
    const auto n = kappa.rows();
    if (static_cast<Eigen::Index>(degrees.size()) != n)
      throw DomainError("ConnectionGerm: degree labels do not match rank");
    QMatrix g = qmatrix_zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
      g(i, i) = rational(degrees[static_cast<size_t>(i)] - top_degree, 2);
    validate_shapes(kappa, g);
    return ConnectionGerm{std::move(kappa), std::move(g), std::move(degrees), top_degree};
  }

 private:
  static void validate_shapes(const QMatrix& kappa, const QMatrix& grading) {
    if (kappa.rows() != kappa.cols()) throw DomainError("ConnectionGerm: kappa not square");
    if (grading.rows() != kappa.rows() || grading.cols() != kappa.cols())
      throw DomainError("ConnectionGerm: grading shape mismatch");
    for (Eigen::Index i = 0; i < grading.rows(); ++i)
      for (Eigen::Index j = 0; j < grading.cols(); ++j)
        if (i != j && grading(i, j) != 0) throw DomainError("ConnectionGerm: grading not diagonal");
  }
};

/// K(q0) as an exact rational matrix.
inline QMatrix residual_kappa(const SmallConnection& conn, const Rational& q0) {
  return conn.k.eval(q0);
}

struct SplitBlock {
  EigenvalueCluster cluster;
  Eigen::MatrixXcd projector;
  int dim = 0;
  std::optional<QMatrix> exact_projector;  // present when built over Q
};

using SplitBlocks = std::vector<SplitBlock>;

namespace detail {

/// Rational roots of a monic-normalizable rational polynomial, by divisor
/// search on the primitive integer model; returns root -> multiplicity, or
/// nullopt when the polynomial does not split completely over Q.
inline std::optional<std::map<Rational, int>> rational_roots_complete(PolyQ p) {
  std::map<Rational, int> roots;
  const int val = p.valuation();
  if (val > 0) {
    roots[Rational(0)] = val;
    p = p.shift_down(val);
  }
  while (p.degree() > 0) {
    Integer den(1);
    for (int k = 0; k <= p.degree(); ++k) {
      Integer l;
      mpz_lcm(l.get_mpz_t(), den.get_mpz_t(), p.coeff(k).get_den().get_mpz_t());
      den = l;
    }
    std::vector<Integer> ic(static_cast<size_t>(p.degree()) + 1);
    for (int k = 0; k <= p.degree(); ++k)
      ic[static_cast<size_t>(k)] = Integer(p.coeff(k) * Rational(den));
    // candidate roots r/s: r | constant, s | leading
    Integer a0 = ic.front(), an = ic.back();
    if (a0 == 0) return std::nullopt;  // valuation was peeled; defensive
    bool found = false;
    Rational root;
    // bounded trial division: structured charpolys have small constants, and
    // anything expensive falls back to the numeric path
    bool search_exhausted = false;
    auto divisors = [&search_exhausted](const Integer& v) {
      std::vector<Integer> out;
      Integer a = abs(v);
      long steps = 0;
      for (Integer d(1); d * d <= a; ++d) {
        if (++steps > 200000) {
          search_exhausted = true;
          break;
        }
        if (a % d == 0) {
          out.push_back(d);
          out.push_back(a / d);
        }
      }
      return out;
    };
    for (const Integer& r : divisors(a0)) {
      for (const Integer& s : divisors(an)) {
        for (int sign : {1, -1}) {
          Rational cand = Rational(Integer(sign * r)) / Rational(s);
          if (p(cand) == 0) {
            root = cand;
            found = true;
            break;
          }
        }
        if (found) break;
      }
      if (found) break;
    }
    if (!found || search_exhausted) return std::nullopt;
    int mult = 0;
    while (p.degree() > 0 && p(root) == 0) {
      // exact deflation by (x - root)
      std::vector<Rational> q(static_cast<size_t>(p.degree()), Rational(0));
      Rational carry(0);
      for (int k = p.degree(); k >= 1; --k) {
        carry = p.coeff(k) + carry * root;
        q[static_cast<size_t>(k - 1)] = carry;
      }
      p = PolyQ(std::move(q));
      ++mult;
    }
    roots[root] += mult;
  }
  return roots;
}

/// Hermite interpolation basis: h_i of degree < sum(mult) with
/// h_i^{(s)}(z_j)/s! = delta_{ij} delta_{s0}, solved from the confluent
/// Vandermonde system. Field is any exact or floating scalar.
template <class Scalar, class ValVec>
std::vector<std::vector<Scalar>> hermite_projector_polys(const ValVec& values,
                                                         const std::vector<int>& mults) {
  const size_t nc = values.size();
  int deg = 0;
  for (int m : mults) deg += m;
  const int n = deg;
  // rows: conditions (j, s); cols: coefficients of h
  std::vector<std::vector<Scalar>> vmat;
  for (size_t j = 0; j < nc; ++j) {
    for (int s = 0; s < mults[j]; ++s) {
      std::vector<Scalar> row(static_cast<size_t>(n), Scalar(0));
      // d^s/dx^s x^k / s! at z_j = C(k, s) z_j^(k-s)
      for (int k = s; k < n; ++k) {
        Scalar c = Scalar(1);
        for (int t = 0; t < s; ++t) c = c * Scalar(k - t) / Scalar(t + 1);
        Scalar zp = Scalar(1);
        for (int t = 0; t < k - s; ++t) zp = zp * values[j];
        row[static_cast<size_t>(k)] = c * zp;
      }
      vmat.push_back(std::move(row));
    }
  }
  // solve vmat * coeffs = e_(j,0) for each cluster j by one Gauss-Jordan pass
  const size_t dim = static_cast<size_t>(n);
  std::vector<std::vector<Scalar>> rhs(nc, std::vector<Scalar>(dim, Scalar(0)));
  {
    size_t row = 0;
    for (size_t j = 0; j < nc; ++j) {
      rhs[j][row] = Scalar(1);
      row += static_cast<size_t>(mults[j]);
    }
  }
  // augmented elimination
  std::vector<std::vector<Scalar>> sol(nc, std::vector<Scalar>(dim, Scalar(0)));
  std::vector<std::vector<Scalar>> aug(dim, std::vector<Scalar>(dim + nc, Scalar(0)));
  for (size_t r = 0; r < dim; ++r) {
    for (size_t c = 0; c < dim; ++c) aug[r][c] = vmat[r][c];
    for (size_t j = 0; j < nc; ++j) aug[r][dim + j] = rhs[j][r];
  }
  for (size_t col = 0; col < dim; ++col) {
    size_t piv = col;
    if constexpr (std::is_same_v<Scalar, Complex>) {
      double best = std::abs(aug[col][col]);
      for (size_t r = col + 1; r < dim; ++r)
        if (std::abs(aug[r][col]) > best) { best = std::abs(aug[r][col]); piv = r; }
    } else {
      while (piv < dim && aug[piv][col] == Scalar(0)) ++piv;
      if (piv == dim) throw DomainError("hermite interpolation: singular confluent Vandermonde");
    }
    std::swap(aug[col], aug[piv]);
    Scalar d = aug[col][col];
    for (size_t c = 0; c < dim + nc; ++c) aug[col][c] = aug[col][c] / d;
    for (size_t r = 0; r < dim; ++r) {
      if (r == col) continue;
      Scalar fct = aug[r][col];
      if constexpr (std::is_same_v<Scalar, Complex>) {
        if (std::abs(fct) == 0.0) continue;
      } else {
        if (fct == Scalar(0)) continue;
      }
      for (size_t c = 0; c < dim + nc; ++c) aug[r][c] = aug[r][c] - fct * aug[col][c];
    }
  }
  for (size_t j = 0; j < nc; ++j)
    for (size_t r = 0; r < dim; ++r) sol[j][r] = aug[r][dim + j];
  return sol;
}

}  // namespace detail

/// Generalized-eigenspace decomposition of a rational matrix. Eigenvalue
/// clusters come from roots_clustered on the exact characteristic polynomial;
/// projectors are Hermite interpolation evaluated on kappa, exactly over Q
/// when the polynomial splits there and in complex doubles otherwise.
inline SplitBlocks spectral_split(const QMatrix& kappa, double tol = 1e-9) {
  if (kappa.rows() != kappa.cols()) throw DomainError("spectral_split: matrix not square");
  const Eigen::Index n = kappa.rows();
  const PolyQ p = charpoly(kappa);

  SplitBlocks out;
  if (auto rr = detail::rational_roots_complete(p)) {
    std::vector<Rational> values;
    std::vector<int> mults;
    for (const auto& [root, mult] : *rr) {
      values.push_back(root);
      mults.push_back(mult);
    }
    const auto polys = detail::hermite_projector_polys<Rational>(values, mults);
    for (size_t j = 0; j < values.size(); ++j) {
      QMatrix proj = qmatrix_zero(n, n);
      QMatrix pw = qmatrix_identity(n);
      for (size_t k = 0; k < polys[j].size(); ++k) {
        proj += polys[j][k] * pw;
        pw = pw * kappa;
      }
      SplitBlock b;
      b.cluster = {Complex(to_double(values[j]), 0.0), mults[j], true};
      b.dim = mults[j];
      b.projector = Eigen::MatrixXcd::Zero(n, n);
      for (Eigen::Index r = 0; r < n; ++r)
        for (Eigen::Index c = 0; c < n; ++c) b.projector(r, c) = to_double(proj(r, c));
      b.exact_projector = std::move(proj);
      out.push_back(std::move(b));
    }
    return out;
  }

  const Spectrum spec = roots_clustered(p, tol);
  std::vector<Complex> values;
  std::vector<int> mults;
  for (const auto& c : spec.clusters) {
    values.push_back(c.value);
    mults.push_back(c.multiplicity);
  }
  const auto polys = detail::hermite_projector_polys<Complex>(values, mults);
  Eigen::MatrixXcd kc(n, n);
  for (Eigen::Index r = 0; r < n; ++r)
    for (Eigen::Index c = 0; c < n; ++c) kc(r, c) = Complex(to_double(kappa(r, c)), 0.0);
  for (size_t j = 0; j < values.size(); ++j) {
    Eigen::MatrixXcd proj = Eigen::MatrixXcd::Zero(n, n);
    Eigen::MatrixXcd pw = Eigen::MatrixXcd::Identity(n, n);
    for (size_t k = 0; k < polys[j].size(); ++k) {
      proj += polys[j][k] * pw;
      pw = pw * kc;
    }
    out.push_back(SplitBlock{spec.clusters[j], std::move(proj), mults[j], std::nullopt});
  }
  return out;
}

/// Block-diagonal juxtaposition; rank adds, spectrum is the multiset union.
inline ConnectionGerm external_sum(const ConnectionGerm& a, const ConnectionGerm& b) {
  const Eigen::Index na = a.kappa.rows(), nb = b.kappa.rows();
  QMatrix kappa = qmatrix_zero(na + nb, na + nb);
  QMatrix grading = qmatrix_zero(na + nb, na + nb);
  kappa.topLeftCorner(na, na) = a.kappa;
  kappa.bottomRightCorner(nb, nb) = b.kappa;
  grading.topLeftCorner(na, na) = a.grading;
  grading.bottomRightCorner(nb, nb) = b.grading;
  ConnectionGerm out = ConnectionGerm::make(std::move(kappa), std::move(grading));
  if (a.degrees && b.degrees && a.top_degree == b.top_degree) {
    std::vector<int> degs = *a.degrees;
    degs.insert(degs.end(), b.degrees->begin(), b.degrees->end());
    out.degrees = std::move(degs);
    out.top_degree = a.top_degree;
  }
  return out;
}

/// Pullback of the disk coordinate u -> lambda*u: kappa scales by 1/lambda,
/// grading is untouched.
inline ConnectionGerm dilation(const ConnectionGerm& c, const Rational& lambda) {
  if (lambda == 0) throw DomainError("dilation: lambda must be nonzero");
  ConnectionGerm out = c;
  out.kappa = (Rational(1) / lambda) * out.kappa;
  return out;
}

/// Tensor with the rank-one bundle d + c2/u^2 du: kappa shifts by +c2*Id.
inline ConnectionGerm exponential_shift(const ConnectionGerm& c, const Rational& c2) {
  ConnectionGerm out = c;
  for (Eigen::Index i = 0; i < out.kappa.rows(); ++i) out.kappa(i, i) += c2;
  return out;
}

/// Tensor with the rank-one bundle d + c1/u du: grading shifts by +c1*Id.
inline ConnectionGerm power_shift(const ConnectionGerm& c, const Rational& c1) {
  ConnectionGerm out = c;
  for (Eigen::Index i = 0; i < out.grading.rows(); ++i) out.grading(i, i) += c1;
  return out;
}

enum class CyclicVerdict { Maximal, Overmaximal, Neither };

/// Decides whether h is a cyclic vector for the unital algebra generated by
/// the given commuting matrices, by iterated span growth. Maximal means the
/// evaluation-at-h map is an isomorphism from that algebra onto the fiber.
inline CyclicVerdict cyclic_vector_check(const std::vector<QMatrix>& mu, const QVector& h) {
  if (mu.empty()) throw DomainError("cyclic_vector_check: no generators");
  const Eigen::Index n = h.size();
  for (const auto& m : mu)
    if (m.rows() != n || m.cols() != n)
      throw DomainError("cyclic_vector_check: generator shape mismatch");
  for (size_t i = 0; i < mu.size(); ++i)
    for (size_t j = i + 1; j < mu.size(); ++j)
      if (!exact_equal(mu[i] * mu[j], mu[j] * mu[i]))
        throw NotCommuting("cyclic_vector_check: generators " + std::to_string(i) + " and " +
                           std::to_string(j) + " do not commute");

  // Krylov closure of {Id} under left multiplication by the generators,
  // tracked as row-reduced vectors of length n^2.
  std::vector<QMatrix> basis;
  std::vector<QRowVector> reduced;  // row echelon residues of vectorized basis
  auto vectorize = [n](const QMatrix& m) {
    QRowVector v(n * n);
    for (Eigen::Index r = 0; r < n; ++r)
      for (Eigen::Index c = 0; c < n; ++c) v(r * n + c) = m(r, c);
    return v;
  };
  auto try_insert = [&](const QMatrix& m) {
    QRowVector v = vectorize(m);
    for (const auto& r : reduced) {
      Eigen::Index lead = 0;
      while (lead < r.size() && r(lead) == 0) ++lead;
      if (lead < r.size() && v(lead) != 0) v -= (v(lead) / r(lead)) * r;
    }
    bool nonzero = false;
    for (Eigen::Index i = 0; i < v.size(); ++i)
      if (v(i) != 0) { nonzero = true; break; }
    if (!nonzero) return false;
    // keep reduced rows sorted by leading index for back-substitution-free checks
    reduced.push_back(std::move(v));
    std::sort(reduced.begin(), reduced.end(), [](const QRowVector& a, const QRowVector& b) {
      Eigen::Index la = 0, lb = 0;
      while (la < a.size() && a(la) == 0) ++la;
      while (lb < b.size() && b(lb) == 0) ++lb;
      return la < lb;
    });
    basis.push_back(m);
    return true;
  };

  try_insert(qmatrix_identity(n));
  bool grew = true;
  while (grew) {
    grew = false;
    const auto snapshot = basis;
    for (const auto& b : snapshot)
      for (const auto& g : mu)
        if (try_insert(g * b)) grew = true;
  }
  const Eigen::Index alg_dim = static_cast<Eigen::Index>(basis.size());

  QMatrix ev(n, alg_dim);
  for (Eigen::Index c = 0; c < alg_dim; ++c) ev.col(c) = basis[static_cast<size_t>(c)] * h;
  const Eigen::Index ev_dim = exact_rank(QMatrix(ev.transpose()));

  if (ev_dim == n && alg_dim == n) return CyclicVerdict::Maximal;
  if (ev_dim == n) return CyclicVerdict::Overmaximal;
  return CyclicVerdict::Neither;
}

struct GaugeReport {
  int pole_order = 0;           // pole order of the gauged nabla_{d/du} at u = 0
  QMatrix residue;              // u^0 coefficient of the gauged u-connection matrix
  bool residue_nilpotent = false;
  int nilpotency_index = 0;     // least k with residue^k = 0 (0 when residue = 0)
  bool regular_singular = false;
};

/// Gauge u^g (g = grading + T/2, T the odd-parity indicator) applied to the
/// u-direction connection of a strictly degree-raising germ. The transformed
/// coefficient is computed entrywise as a Laurent matrix in u; the report
/// asserts pole order <= 1 and exact nilpotence of the residue.
inline GaugeReport nef_gauge_check(const ConnectionGerm& germ) {
  if (!germ.degrees || !germ.top_degree)
    throw DomainError("nef_gauge_check: degree labels required");
  const auto& degs = *germ.degrees;
  const int top = *germ.top_degree;
  const Eigen::Index n = germ.kappa.rows();

  // kappa is even: admissible blocks go H^i -> H^{i+2j}, and strictness means j >= 1
  for (Eigen::Index r = 0; r < n; ++r)
    for (Eigen::Index c = 0; c < n; ++c) {
      if (germ.kappa(r, c) == 0) continue;
      const int step = degs[static_cast<size_t>(r)] - degs[static_cast<size_t>(c)];
      if (step < 2 || step % 2 != 0)
        throw NotDegreeRaising("nef_gauge_check: kappa block from degree " +
                               std::to_string(degs[static_cast<size_t>(c)]) + " to degree " +
                               std::to_string(degs[static_cast<size_t>(r)]) +
                               " is not strictly raising by an even step");
    }

  // integral gauge exponents g_i = (deg_i - D)/2 + parity/2
  std::vector<long> g(static_cast<size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    const int rel = degs[static_cast<size_t>(i)] - top;
    g[static_cast<size_t>(i)] = (rel % 2 == 0) ? rel / 2 : (rel + 1) / 2;
  }

  // W(u) = -u^{-1} kappa + (grading + T/2); conjugation by u^g multiplies the
  // (r, c) entry by u^{g_r - g_c} and subtracts the derivative term g_r on the
  // diagonal.
  std::map<long, QMatrix> laurent;  // u-power -> matrix coefficient
  auto add = [&](long pw, Eigen::Index r, Eigen::Index c, const Rational& v) {
    if (v == 0) return;
    auto it = laurent.find(pw);
    if (it == laurent.end()) it = laurent.emplace(pw, qmatrix_zero(n, n)).first;
    it->second(r, c) += v;
  };
  for (Eigen::Index r = 0; r < n; ++r) {
    for (Eigen::Index c = 0; c < n; ++c) {
      const long shift = g[static_cast<size_t>(r)] - g[static_cast<size_t>(c)];
      if (germ.kappa(r, c) != 0) add(shift - 1, r, c, -germ.kappa(r, c));
      if (r == c) {
        const int rel = degs[static_cast<size_t>(r)] - top;
        const Rational gr_plus_half_t =
            rational(rel, 2) + (rel % 2 != 0 ? rational(1, 2) : Rational(0));
        add(shift, r, c, gr_plus_half_t);       // grading + T/2 term
        add(0, r, c, -Rational(static_cast<long>(g[static_cast<size_t>(r)])));  // derivative of u^{-g}
      }
    }
  }
  for (auto it = laurent.begin(); it != laurent.end();) {
    bool zero = true;
    for (Eigen::Index r = 0; r < n && zero; ++r)
      for (Eigen::Index c = 0; c < n && zero; ++c)
        if (it->second(r, c) != 0) zero = false;
    if (zero) it = laurent.erase(it);
    else ++it;
  }

  GaugeReport rep;
  rep.residue = laurent.count(0) ? laurent.at(0) : qmatrix_zero(n, n);
  rep.pole_order = laurent.empty()
                       ? 0
                       : static_cast<int>(std::max<long>(0, 1 - laurent.begin()->first));
  QMatrix pw = qmatrix_identity(n);
  rep.nilpotency_index = 0;
  rep.residue_nilpotent = false;
  for (int k = 1; k <= n; ++k) {
    pw = pw * rep.residue;
    if (exact_equal(pw, qmatrix_zero(n, n))) {
      rep.nilpotency_index = k;
      rep.residue_nilpotent = true;
      break;
    }
  }
  if (exact_equal(rep.residue, qmatrix_zero(n, n))) {
    rep.residue_nilpotent = true;
    rep.nilpotency_index = 0;
  }
  rep.regular_singular = rep.pole_order <= 1 && rep.residue_nilpotent;
  return rep;
}

}  // namespace atomlab
