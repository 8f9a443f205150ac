#pragma once

#include <algorithm>
#include <utility>
#include <vector>

#include "atomlab/diffop.hpp"
#include "atomlab/errors.hpp"
#include "atomlab/poly.hpp"
#include "atomlab/rational.hpp"
#include "atomlab/trunc_series.hpp"

namespace atomlab {

/// Fano/CY complete intersection of hypersurfaces of degrees d_i >= 2 in
/// P^{N-1}, with d_tot <= N and dim X = N - 1 - k >= 1.
struct CompleteIntersection {
  int ambient_n;              // N: ambient is P^{N-1}
  std::vector<int> degrees;   // d_1..d_k

  CompleteIntersection(int N, std::vector<int> degs) : ambient_n(N), degrees(std::move(degs)) {
    if (ambient_n < 3) throw InvalidCI("complete intersection: need N >= 3");
    if (degrees.empty()) throw InvalidCI("complete intersection: need at least one degree");
    for (int d : degrees)
      if (d < 2) throw InvalidCI("complete intersection: degrees must be >= 2");
    if (total_degree() > ambient_n)
      throw InvalidCI("complete intersection: d_tot > N is neither Fano nor Calabi-Yau");
    if (dim() < 1) throw InvalidCI("complete intersection: dim X must be >= 1");
    if (dim() > 12) throw InvalidCI("complete intersection: dim X > 12 unsupported");
  }

  int codim() const { return static_cast<int>(degrees.size()); }
  int total_degree() const {
    int t = 0;
    for (int d : degrees) t += d;
    return t;
  }
  int dim() const { return ambient_n - 1 - codim(); }
  int fano_index() const { return ambient_n - total_degree(); }
  int rank() const { return dim() + 1; }  // ambient cohomology P^0..P^dimX
  Integer degree() const {
    Integer d(1);
    for (int di : degrees) d *= di;
    return d;
  }
};

/// Matrix over Q[q] stored as a list of constant matrices per q-power,
/// A(q) = sum_m coeff[m] q^m.
class JumpMatrix {
 public:
  JumpMatrix() = default;
  explicit JumpMatrix(Eigen::Index n) { coeffs_.push_back(qmatrix_zero(n, n)); }

  Eigen::Index size() const { return coeffs_.empty() ? 0 : coeffs_.front().rows(); }
  int max_power() const { return static_cast<int>(coeffs_.size()) - 1; }

  QMatrix at_power(int m) const {
    if (m < 0 || m > max_power()) return qmatrix_zero(size(), size());
    return coeffs_[static_cast<size_t>(m)];
  }
  Rational& entry(int m, Eigen::Index i, Eigen::Index j) {
    while (max_power() < m) coeffs_.push_back(qmatrix_zero(size(), size()));
    return coeffs_[static_cast<size_t>(m)](i, j);
  }

  QMatrix eval(const Rational& q0) const {
    QMatrix out = qmatrix_zero(size(), size());
    Rational p(1);
    for (int m = 0; m <= max_power(); ++m) {
      out += p * coeffs_[static_cast<size_t>(m)];
      p *= q0;
    }
    return out;
  }

  friend JumpMatrix operator*(const Rational& s, const JumpMatrix& a) {
    JumpMatrix out = a;
    for (auto& c : out.coeffs_) c = s * c;
    return out;
  }
  friend bool operator==(const JumpMatrix& a, const JumpMatrix& b) {
    if (a.size() != b.size()) return false;
    const int mp = std::max(a.max_power(), b.max_power());
    for (int m = 0; m <= mp; ++m)
      if (!exact_equal(a.at_power(m), b.at_power(m))) return false;
    return true;
  }
  friend bool operator!=(const JumpMatrix& a, const JumpMatrix& b) { return !(a == b); }

  /// Drop trailing all-zero q-power layers.
  void trim() {
    auto all_zero = [](const QMatrix& m) {
      for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j)
          if (m(i, j) != 0) return false;
      return true;
    };
    while (coeffs_.size() > 1 && all_zero(coeffs_.back())) coeffs_.pop_back();
  }

  /// Diagonal-jump shape for Fano index f: subdiagonal 1s at q^0, integer
  /// entries at (i, j) with j - i = m*f - 1 at q^m (m >= 1), zero elsewhere.
  bool has_jump_shape(int f) const {
    const Eigen::Index n = size();
    const QMatrix a0 = at_power(0);
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = 0; j < n; ++j)
        if (a0(i, j) != (i == j + 1 ? 1 : 0)) return false;
    for (int m = 1; m <= max_power(); ++m) {
      const QMatrix& am = at_power(m);
      for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) {
          const bool jump_pos = (j - i == static_cast<Eigen::Index>(m) * f - 1);
          if (!jump_pos && am(i, j) != 0) return false;
          if (jump_pos && !is_integer(am(i, j))) return false;
        }
    }
    return true;
  }

  /// Flip symmetry along the antidiagonal: A[i][j] == A[n-1-j][n-1-i].
  bool centro_symmetric() const {
    const Eigen::Index n = size();
    for (int m = 0; m <= max_power(); ++m) {
      const QMatrix& am = at_power(m);
      for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j)
          if (am(i, j) != am(n - 1 - j, n - 1 - i)) return false;
    }
    return true;
  }

 private:
  std::vector<QMatrix> coeffs_;
};

/// Quantum multiplication data of eq-type small connections: A (multiplication
/// by the hyperplane class), K = f*A (multiplication by c1), and the grading.
struct SmallConnection {
  CompleteIntersection ci;
  JumpMatrix a;
  JumpMatrix k;
  QMatrix grading;  // diag(i - dimX/2), i = 0..dimX
};

/// Hypergeometric q-expansion: for each d = 0..order a coefficient vector over
/// the ambient basis P^0..P^dimX with exact u-Laurent entries.
struct GiventalSeries {
  CompleteIntersection ci;
  int order;
  std::vector<std::vector<LaurentU>> gamma;  // gamma[d][p-power]
};

/// The order-(N-k) operator in D = u q d/dq:
///   D^{N-k} - (-1)^{N-d_tot} q * prod_i ( d_i * prod_{m=1}^{d_i-1} (d_i D + m u) ).
inline DiffOp build_qde(const CompleteIntersection& ci) {
  const int order = ci.ambient_n - ci.codim();
  DiffOp lhs = DiffOp::one();
  for (int i = 0; i < order; ++i) lhs = diffop_mul(DiffOp::d(), lhs);

  DiffOp rhs = DiffOp::one();
  for (int d : ci.degrees) {
    rhs = Rational(d) * rhs;
    for (int m = 1; m < d; ++m) {
      DiffOp factor = Rational(d) * DiffOp::d() + Rational(m) * DiffOp::u();
      rhs = diffop_mul(rhs, factor);
    }
  }
  rhs = diffop_mul(DiffOp::q(), rhs);
  const int sign = (ci.fano_index() % 2 == 0) ? 1 : -1;
  return lhs - Rational(sign) * rhs;
}

namespace detail {

/// Jump positions (i, j) at q-order m for index f and rank n: j - i = m*f - 1.
inline std::vector<std::pair<int, int>> jump_positions(int n, int f, int m) {
  std::vector<std::pair<int, int>> pos;
  const int off = m * f - 1;
  if (off < 0 || off > n - 1) return pos;
  for (int i = 0; i + off < n; ++i) pos.emplace_back(i, i + off);
  return pos;
}

inline int max_jump_order(int n, int f) { return f >= 1 ? n / f : 0; }

/// Eliminate the first-order system u q d/dq Psi = -A Psi down to the scalar
/// operator annihilating psi_{dimX}, normalized to be monic in D^{n}.
/// `entry(m, i, j)` supplies the jump coefficients.
template <class EntryFn>
DiffOp eliminate_system(int n, int f, const EntryFn& entry) {
  std::vector<DiffOp> l(static_cast<size_t>(n));
  l[static_cast<size_t>(n - 1)] = DiffOp::one();
  const int mmax = max_jump_order(n, f);
  for (int i = n - 1; i >= 1; --i) {
    DiffOp acc = -diffop_mul(DiffOp::d(), l[static_cast<size_t>(i)]);
    for (int m = 1; m <= mmax; ++m) {
      const int j = i + m * f - 1;
      if (j < i || j > n - 1) continue;
      Rational v = entry(m, i, j);
      if (v == 0) continue;
      acc = acc - v * diffop_mul(DiffOp::term(Rational(1), m, 0, 0), l[static_cast<size_t>(j)]);
    }
    l[static_cast<size_t>(i - 1)] = acc;
  }
  DiffOp row0 = diffop_mul(DiffOp::d(), l[0]);
  for (int m = 1; m <= mmax; ++m) {
    const int j = m * f - 1;
    if (j < 0 || j > n - 1) continue;
    Rational v = entry(m, 0, j);
    if (v == 0) continue;
    row0 = row0 + v * diffop_mul(DiffOp::term(Rational(1), m, 0, 0), l[static_cast<size_t>(j)]);
  }
  const Rational norm = (n % 2 == 0) ? Rational(-1) : Rational(1);  // (-1)^(n-1)
  return norm * row0;
}

/// Exact dense solve of an (over)determined linear system rows * x = rhs.
/// Throws when inconsistent or underdetermined.
inline std::vector<Rational> solve_exact_linear(std::vector<std::vector<Rational>> rows,
                                                std::vector<Rational> rhs, size_t nvars) {
  const size_t neq = rows.size();
  size_t rank = 0;
  std::vector<size_t> pivot_col;
  for (size_t col = 0; col < nvars && rank < neq; ++col) {
    size_t piv = rank;
    while (piv < neq && rows[piv][col] == 0) ++piv;
    if (piv == neq) continue;
    std::swap(rows[piv], rows[rank]);
    std::swap(rhs[piv], rhs[rank]);
    const Rational d = rows[rank][col];
    for (size_t r = 0; r < neq; ++r) {
      if (r == rank || rows[r][col] == 0) continue;
      const Rational fct = rows[r][col] / d;
      for (size_t j = col; j < nvars; ++j) rows[r][j] -= fct * rows[rank][j];
      rhs[r] -= fct * rhs[rank];
    }
    pivot_col.push_back(col);
    ++rank;
  }
  for (size_t r = rank; r < neq; ++r)
    if (rhs[r] != 0) throw Inconsistent("coefficient matching: inconsistent linear system");
  if (rank < nvars)
    throw NoSolution("coefficient matching: underdetermined system (convention bug)");
  std::vector<Rational> x(nvars, Rational(0));
  for (size_t r = 0; r < rank; ++r) x[pivot_col[r]] = rhs[r] / rows[r][pivot_col[r]];
  return x;
}

}  // namespace detail

/// Recover A by eliminating u q d/dq Psi = -A Psi to the scalar operator and
/// matching its normal-form coefficients against build_qde(ci). The matching
/// is triangular with respect to q-order: entries at q^m enter linearly once
/// all lower orders are fixed, so each stage is one exact linear solve.
inline JumpMatrix solve_jump_matrix(const CompleteIntersection& ci) {
  const int f = ci.fano_index();
  if (f < 1) throw NotFano("solve_jump_matrix: index 0 (Calabi-Yau) has no jump recovery");
  const int n = ci.rank();
  const DiffOp target = build_qde(ci);
  const int mmax = detail::max_jump_order(n, f);

  std::map<std::tuple<int, int, int>, Rational> solved;  // (m,i,j) -> value
  auto entry_fn = [&](const std::map<std::tuple<int, int, int>, Rational>& probe) {
    return [&solved, &probe](int m, int i, int j) -> Rational {
      if (auto it = probe.find({m, i, j}); it != probe.end()) return it->second;
      if (auto it = solved.find({m, i, j}); it != solved.end()) return it->second;
      return Rational(0);
    };
  };

  for (int m = 1; m <= mmax; ++m) {
    const auto pos = detail::jump_positions(n, f, m);
    if (pos.empty()) continue;
    std::map<std::tuple<int, int, int>, Rational> probe;
    const DiffOp base = detail::eliminate_system(n, f, entry_fn(probe)) - target;

    // residual coefficients at q-power m are affine-linear in this stage's unknowns
    std::vector<DiffOp> columns;
    for (const auto& [i, j] : pos) {
      probe.clear();
      probe[{m, i, j}] = 1;
      columns.push_back(detail::eliminate_system(n, f, entry_fn(probe)) - target - base);
    }
    probe.clear();

    std::map<std::pair<int, int>, size_t> eq_index;  // (u-pow, D-pow) at q^m
    auto note = [&](const DiffOp& op) {
      for (const auto& [k, c] : op.terms()) {
        if (std::get<0>(k) != m) continue;
        eq_index.emplace(std::make_pair(std::get<1>(k), std::get<2>(k)), eq_index.size());
      }
    };
    note(base);
    for (const auto& col : columns) note(col);

    std::vector<std::vector<Rational>> rows(eq_index.size(),
                                            std::vector<Rational>(pos.size(), Rational(0)));
    std::vector<Rational> rhs(eq_index.size(), Rational(0));
    for (const auto& [key, row] : eq_index) rhs[row] = -base.coeff(m, key.first, key.second);
    for (size_t p = 0; p < pos.size(); ++p)
      for (const auto& [key, row] : eq_index)
        rows[row][p] = columns[p].coeff(m, key.first, key.second);

    const auto x = detail::solve_exact_linear(std::move(rows), std::move(rhs), pos.size());
    for (size_t p = 0; p < pos.size(); ++p) solved[{m, pos[p].first, pos[p].second}] = x[p];
  }

  const std::map<std::tuple<int, int, int>, Rational> no_probe;
  if (detail::eliminate_system(n, f, entry_fn(no_probe)) != target)
    throw Inconsistent("solve_jump_matrix: eliminated operator does not reproduce the QDE");

  JumpMatrix a(n);
  for (int i = 1; i < n; ++i) a.entry(0, i, i - 1) = 1;
  for (const auto& [key, v] : solved) {
    const auto [m, i, j] = key;
    a.entry(m, i, j) = v;
  }
  a.trim();
  return a;
}

/// Exact hypergeometric coefficient vectors
///   Gamma_d(P, u) = prod_i prod_{m=1}^{d d_i} (d_i P + m u) / prod_{m=1}^{d} (P + m u)^N
/// reduced in Q[P]/(P^rank), for d = 0..order.
inline GiventalSeries givental_series(const CompleteIntersection& ci, int order) {
  if (order < 1) throw InvalidCI("givental_series: order must be >= 1");
  const int n = ci.rank();
  GiventalSeries s{ci, order, {}};
  s.gamma.reserve(static_cast<size_t>(order) + 1);

  using PVec = std::vector<LaurentU>;  // index = P-power, entries Laurent in u
  auto mul_linear = [&](const PVec& v, const Rational& p_coeff, const LaurentU& u_part) {
    // v * (p_coeff * P + u_part), truncated at P^n
    PVec out(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) {
      out[static_cast<size_t>(i)] = v[static_cast<size_t>(i)] * u_part;
      if (i > 0) out[static_cast<size_t>(i)] += p_coeff * v[static_cast<size_t>(i - 1)];
    }
    return out;
  };
  // 1/(P + m u) = (1/(m u)) * sum_j (-1)^j (P/(m u))^j
  auto mul_inv_linear = [&](const PVec& v, long m) {
    PVec geo(static_cast<size_t>(n));
    Rational c(1, m);
    for (int j = 0; j < n; ++j) {
      geo[static_cast<size_t>(j)] = LaurentU::term(c, -(j + 1));
      c *= rational(-1, m);
    }
    PVec out(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i)
      for (int j = 0; i + j < n; ++j)
        out[static_cast<size_t>(i + j)] += v[static_cast<size_t>(i)] * geo[static_cast<size_t>(j)];
    return out;
  };

  for (int d = 0; d <= order; ++d) {
    PVec g(static_cast<size_t>(n));
    g[0] = LaurentU::constant(Rational(1));
    for (int di : ci.degrees)
      for (int m = 1; m <= d * di; ++m)
        g = mul_linear(g, Rational(di), LaurentU::term(Rational(m), 1));
    for (int m = 1; m <= d; ++m)
      for (int rep = 0; rep < ci.ambient_n; ++rep) g = mul_inv_linear(g, m);
    s.gamma.push_back(std::move(g));
  }
  return s;
}

/// Independent recovery of A from the hypergeometric data: the fundamental
/// solution T(q) q^{-N0/u} of the first-order system satisfies
///   u d T_d + [N0, T_d] + sum_{m=1..d} A_m T_{d-m} = 0,
/// and the last row of T_d is the reversed Gamma_d(P, -u). Rows of T_d are
/// recovered descending from the last one; the row-0 identity is an
/// overdetermined linear system for the order-d jump entries.
inline JumpMatrix fit_jump_matrix_from_series(const CompleteIntersection& ci, int order) {
  const int f = ci.fano_index();
  if (f < 1) throw NotFano("fit_jump_matrix_from_series: index 0 (Calabi-Yau) rejected");
  const int n = ci.rank();
  const int needed = (n + f - 1) / f;
  if (order < needed)
    throw InsufficientOrder("fit_jump_matrix_from_series: order " + std::to_string(order) +
                            " < " + std::to_string(needed));

  const GiventalSeries series = givental_series(ci, order);
  using Row = std::vector<LaurentU>;
  using Mat = std::vector<Row>;

  auto zero_row = [&]() { return Row(static_cast<size_t>(n)); };
  auto shift_left = [&](const Row& r) {
    Row out = zero_row();
    for (int j = 0; j + 1 < n; ++j) out[static_cast<size_t>(j)] = r[static_cast<size_t>(j + 1)];
    return out;
  };

  std::vector<Mat> t(static_cast<size_t>(order) + 1, Mat(static_cast<size_t>(n), zero_row()));
  for (int i = 0; i < n; ++i) t[0][static_cast<size_t>(i)][static_cast<size_t>(i)] = LaurentU::constant(Rational(1));

  std::map<std::tuple<int, int, int>, Rational> solved;  // (m,i,j) -> value

  auto a_entry = [&](int m, int i, int j,
                     const std::map<std::tuple<int, int, int>, Rational>& probe) -> Rational {
    if (auto it = probe.find({m, i, j}); it != probe.end()) return it->second;
    if (auto it = solved.find({m, i, j}); it != solved.end()) return it->second;
    return Rational(0);
  };

  // builds T_d rows from the last row and returns the row-0 constraint vector
  auto run_order = [&](int d, const std::map<std::tuple<int, int, int>, Rational>& probe,
                       Mat* out_t) -> Row {
    Mat td(static_cast<size_t>(n), zero_row());
    for (int j = 0; j < n; ++j)
      td[static_cast<size_t>(n - 1)][static_cast<size_t>(j)] =
          series.gamma[static_cast<size_t>(d)][static_cast<size_t>(n - 1 - j)].negate_u();
    auto am_times_row = [&](int m, int i, int dm) {
      Row acc = zero_row();
      const int j = i + m * f - 1;
      if (j >= 0 && j <= n - 1) {
        const Rational v = a_entry(m, i, j, probe);
        if (v != 0)
          for (int col = 0; col < n; ++col)
            acc[static_cast<size_t>(col)] += v * t[static_cast<size_t>(dm)][static_cast<size_t>(j)][static_cast<size_t>(col)];
      }
      return acc;
    };
    for (int i = n - 1; i >= 1; --i) {
      Row acc = shift_left(td[static_cast<size_t>(i)]);
      for (int col = 0; col < n; ++col)
        acc[static_cast<size_t>(col)] -= LaurentU::term(Rational(d), 1) * td[static_cast<size_t>(i)][static_cast<size_t>(col)];
      for (int m = 1; m <= d; ++m) {
        Row sub = (m == d) ? am_times_row(m, i, 0) : am_times_row(m, i, d - m);
        for (int col = 0; col < n; ++col) acc[static_cast<size_t>(col)] -= sub[static_cast<size_t>(col)];
      }
      td[static_cast<size_t>(i - 1)] = std::move(acc);
    }
    Row con = zero_row();
    for (int col = 0; col < n; ++col)
      con[static_cast<size_t>(col)] = LaurentU::term(Rational(d), 1) * td[0][static_cast<size_t>(col)];
    Row shl = shift_left(td[0]);
    for (int col = 0; col < n; ++col) con[static_cast<size_t>(col)] -= shl[static_cast<size_t>(col)];
    for (int m = 1; m <= d; ++m) {
      Row add = (m == d) ? am_times_row(m, 0, 0) : am_times_row(m, 0, d - m);
      for (int col = 0; col < n; ++col) con[static_cast<size_t>(col)] += add[static_cast<size_t>(col)];
    }
    if (out_t) *out_t = std::move(td);
    return con;
  };

  for (int d = 1; d <= order; ++d) {
    const auto pos = detail::jump_positions(n, f, d);
    std::map<std::tuple<int, int, int>, Rational> probe;
    const Row base = run_order(d, probe, nullptr);

    if (!pos.empty()) {
      std::vector<Row> columns;
      for (const auto& [i, j] : pos) {
        probe.clear();
        probe[{d, i, j}] = 1;
        Row col = run_order(d, probe, nullptr);
        for (int cix = 0; cix < n; ++cix) col[static_cast<size_t>(cix)] -= base[static_cast<size_t>(cix)];
        columns.push_back(std::move(col));
      }
      probe.clear();

      std::map<std::pair<int, int>, size_t> eq_index;  // (vector slot, u-exponent)
      auto note = [&](const Row& r) {
        for (int cix = 0; cix < n; ++cix)
          for (const auto& [e, c] : r[static_cast<size_t>(cix)].terms())
            eq_index.emplace(std::make_pair(cix, e), eq_index.size());
      };
      note(base);
      for (const auto& col : columns) note(col);

      std::vector<std::vector<Rational>> rows(eq_index.size(),
                                              std::vector<Rational>(pos.size(), Rational(0)));
      std::vector<Rational> rhs(eq_index.size(), Rational(0));
      for (const auto& [key, row] : eq_index)
        rhs[row] = -base[static_cast<size_t>(key.first)].coeff(key.second);
      for (size_t p = 0; p < pos.size(); ++p)
        for (const auto& [key, row] : eq_index)
          rows[row][p] = columns[p][static_cast<size_t>(key.first)].coeff(key.second);

      const auto x = detail::solve_exact_linear(std::move(rows), std::move(rhs), pos.size());
      for (size_t p = 0; p < pos.size(); ++p) solved[{d, pos[p].first, pos[p].second}] = x[p];
    }

    Mat td;
    const Row residue = run_order(d, {}, &td);
    for (int cix = 0; cix < n; ++cix)
      if (!residue[static_cast<size_t>(cix)].is_zero())
        throw Inconsistent("fit_jump_matrix_from_series: order " + std::to_string(d) +
                           " constraint violated");
    t[static_cast<size_t>(d)] = std::move(td);
  }

  JumpMatrix a(n);
  for (int i = 1; i < n; ++i) a.entry(0, i, i - 1) = 1;
  for (const auto& [key, v] : solved) {
    const auto [m, i, j] = key;
    a.entry(m, i, j) = v;
  }
  a.trim();
  return a;
}

inline int default_series_order(const CompleteIntersection& ci) {
  const int f = ci.fano_index();
  return (ci.rank() + f - 1) / f + 1;  // one guard order beyond determinacy
}

/// Bundle A (computed twice, by elimination and from the series), K = f*A and
/// the grading G = diag(i - dimX/2).
inline SmallConnection small_connection(const CompleteIntersection& ci) {
  const int f = ci.fano_index();
  if (f < 1) throw NotFano("small_connection: index 0 (Calabi-Yau) rejected");
  JumpMatrix a = solve_jump_matrix(ci);
  const JumpMatrix check = fit_jump_matrix_from_series(ci, default_series_order(ci));
  if (a != check)
    throw CrossCheckFailure("small_connection: elimination and series recoveries disagree");
  JumpMatrix k = Rational(f) * a;
  const int n = ci.rank();
  QMatrix g = qmatrix_zero(n, n);
  for (int i = 0; i < n; ++i) g(i, i) = rational(2 * i - ci.dim(), 2);
  return SmallConnection{ci, std::move(a), std::move(k), std::move(g)};
}

}  // namespace atomlab
