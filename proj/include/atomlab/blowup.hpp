#pragma once

#include <complex>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Eigenvalues>

#include "atomlab/errors.hpp"
#include "atomlab/json_io.hpp"
#include "atomlab/poly.hpp"
#include "atomlab/rational.hpp"
#include "atomlab/roots.hpp"

namespace atomlab {

/// Input data for the blowup block operator along a codimension-r center:
/// geometric blocks are explicit user inputs, the quantum parameter enters
/// through qhat, and epsilon scales the degree-preserving (geometric) blocks
/// in the limiting family.
struct BlowupScenario {
  int dim_hx = 0;
  int dim_hz = 0;
  int r = 0;                    // codimension, >= 2
  QMatrix kx;                   // dim_hx x dim_hx
  QMatrix kz_minus_c1;          // dim_hz x dim_hz
  QMatrix iota_lower;           // H(Z) -> H(X): dim_hx x dim_hz
  QMatrix iota_upper;           // H(X) -> H(Z): dim_hz x dim_hx
  QMatrix c1;                   // c_1(N), dim_hz x dim_hz
  std::vector<QMatrix> chern;   // c_2 .. c_{r-1}, each dim_hz x dim_hz
  Rational qhat = Rational(1);  // limiting quantum parameter
  double epsilon = 1e-3;

  int total_rank() const { return dim_hx + (r - 1) * dim_hz; }

  void validate() const {
    if (r < 2) throw DomainError("blowup scenario: codimension r must be >= 2");
    if (dim_hx < 1 || dim_hz < 1) throw DomainError("blowup scenario: block dimensions must be >= 1");
    auto check = [](const QMatrix& m, Eigen::Index rows, Eigen::Index cols, const char* name) {
      if (m.rows() != rows || m.cols() != cols)
        throw DomainError(std::string("blowup scenario: bad shape for ") + name);
    };
    check(kx, dim_hx, dim_hx, "KX");
    check(kz_minus_c1, dim_hz, dim_hz, "KZminusC1");
    check(iota_lower, dim_hx, dim_hz, "iota_lower");
    check(iota_upper, dim_hz, dim_hx, "iota_upper");
    check(c1, dim_hz, dim_hz, "c1");
    if (static_cast<int>(chern.size()) != std::max(0, r - 2))
      throw DomainError("blowup scenario: chern list must hold c_2..c_{r-1}");
    for (const auto& c : chern) check(c, dim_hz, dim_hz, "chern");
  }
};

namespace detail {

inline QMatrix chern_class(const BlowupScenario& s, int j) {
  // c_j(N) for j = 1..r-1
  if (j == 1) return s.c1;
  return s.chern.at(static_cast<size_t>(j - 2));
}

}  // namespace detail

/// The full blowup block operator: K_X with (r-1) iota_* in the corner,
/// -(r-1) iota^* below it, K_Z - c_1 diagonal blocks chained by -(r-1), and a
/// right column carrying (r-1)(qhat + c_{r-1}), (r-1)c_{r-2}, ..., with
/// K_Z + (r-2)c_1 in the bottom-right.
inline QMatrix build_blowup_kappa(const BlowupScenario& s) {
  s.validate();
  const int n = s.total_rank();
  const int nx = s.dim_hx, nz = s.dim_hz, r = s.r;
  QMatrix m = qmatrix_zero(n, n);
  auto zrow = [&](int j) { return nx + (j - 1) * nz; };  // start row of Z_j, j = 1..r-1

  m.topLeftCorner(nx, nx) = s.kx;
  m.block(0, zrow(r - 1), nx, nz) = Rational(r - 1) * s.iota_lower;
  m.block(zrow(1), 0, nz, nx) = Rational(-(r - 1)) * s.iota_upper;

  const QMatrix qhat_block = [&] {
    QMatrix q = qmatrix_zero(nz, nz);
    for (int i = 0; i < nz; ++i) q(i, i) = s.qhat;
    return q;
  }();

  for (int j = 1; j <= r - 1; ++j) {
    if (j <= r - 2)
      m.block(zrow(j), zrow(j), nz, nz) = s.kz_minus_c1;
    else
      m.block(zrow(j), zrow(j), nz, nz) =
          s.kz_minus_c1 + Rational(r - 1) * s.c1;  // K_Z + (r-2)c_1
    if (j >= 2) {
      QMatrix sub = qmatrix_zero(nz, nz);
      for (int i = 0; i < nz; ++i) sub(i, i) = Rational(-(r - 1));
      m.block(zrow(j), zrow(j - 1), nz, nz) = sub;
    }
    if (j <= r - 2) {
      // last column entry of row Z_j: (r-1)(qhat + c_{r-1}) for j = 1, else (r-1)c_{r-j}
      QMatrix right = Rational(r - 1) * detail::chern_class(s, r - j);
      if (j == 1) right += Rational(r - 1) * qhat_block;
      m.block(zrow(j), zrow(r - 1), nz, nz) += right;
    } else if (r == 2) {
      // degenerate single-Z-block shape: the corner lands on the diagonal
      m.block(zrow(j), zrow(j), nz, nz) +=
          Rational(r - 1) * (qhat_block + detail::chern_class(s, r - 1));
    }
  }
  return m;
}

/// Associated graded of the blowup operator with respect to the cohomological
/// filtration: only -(r-1) iota^*, the -(r-1) subdiagonal chain and the
/// (r-1) qhat corner survive.
inline QMatrix build_gr_kappa(const BlowupScenario& s) {
  s.validate();
  const int n = s.total_rank();
  const int nx = s.dim_hx, nz = s.dim_hz, r = s.r;
  QMatrix m = qmatrix_zero(n, n);
  auto zrow = [&](int j) { return nx + (j - 1) * nz; };

  m.block(zrow(1), 0, nz, nx) = Rational(-(r - 1)) * s.iota_upper;
  for (int j = 2; j <= r - 1; ++j)
    for (int i = 0; i < nz; ++i) m(zrow(j) + i, zrow(j - 1) + i) = Rational(-(r - 1));
  for (int i = 0; i < nz; ++i) m(zrow(1) + i, zrow(r - 1) + i) += Rational(r - 1) * s.qhat;
  return m;
}

/// Limiting-family interpolation: graded part plus epsilon times the
/// degree-preserving geometric blocks.
inline Eigen::MatrixXcd epsilon_kappa(const BlowupScenario& s) {
  const QMatrix full = build_blowup_kappa(s);
  const QMatrix gr = build_gr_kappa(s);
  const int n = s.total_rank();
  Eigen::MatrixXcd m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      m(i, j) = to_double(gr(i, j)) + s.epsilon * (to_double(full(i, j)) - to_double(gr(i, j)));
  return m;
}

/// Predicted nonzero cluster centers: the r-1 roots of
///   lambda^{r-1} = (-1)^r (r-1)^{r-1} qhat,
/// i.e. the spectrum of the graded Z-companion chain. For odd r these are
/// (r-1) qhat^{1/(r-1)} e^{i pi (2j-1)/(r-1)}.
inline std::vector<Complex> predicted_cluster_centers(int r, const Rational& qhat) {
  if (r < 2) throw DomainError("predicted_cluster_centers: r must be >= 2");
  Rational c = pow(Rational(r - 1), r - 1) * qhat;
  if (r % 2 != 0) c = -c;
  // roots of lambda^{r-1} - c
  std::vector<Rational> coeffs(static_cast<size_t>(r), Rational(0));
  coeffs[0] = -c;
  coeffs[static_cast<size_t>(r - 1)] = 1;
  const Spectrum s = roots_clustered(PolyQ(std::move(coeffs)), 1e-12);
  std::vector<Complex> centers;
  for (const auto& cl : s.clusters)
    for (int i = 0; i < cl.multiplicity; ++i) centers.push_back(cl.value);
  return centers;
}

struct ClusterReport {
  std::vector<Complex> centers;         // index 0 is the origin cluster
  std::vector<int> sizes;               // observed eigenvalue counts per center
  std::vector<int> expected_sizes;
  std::vector<Complex> eigenvalues;
  double radius = 0.0;
  double max_deviation = 0.0;           // largest |eigenvalue - assigned center|
};

inline double default_cluster_radius(const BlowupScenario& s) {
  return 0.1 * std::pow(std::abs(to_double(s.qhat)), 1.0 / (s.r - 1));
}

/// Clusters the eigenvalues of m around 0 and the predicted centers and checks
/// the blowup counting: dim H(X) eigenvalues at 0 and dim H(Z) at each center.
inline ClusterReport cluster_verify(const Eigen::MatrixXcd& m, const BlowupScenario& s,
                                    double radius) {
  s.validate();
  const int n = s.total_rank();
  if (m.rows() != n || m.cols() != n)
    throw DomainError("cluster_verify: matrix rank != dim H(X) + (r-1) dim H(Z)");

  ClusterReport rep;
  rep.radius = radius;
  rep.centers.push_back(Complex(0.0, 0.0));
  if (s.qhat == 0) {
    // graded operator is nilpotent: everything clusters at the origin
    rep.sizes.assign(1, 0);
    rep.expected_sizes.assign(1, n);
  } else {
    for (const Complex& c : predicted_cluster_centers(s.r, s.qhat)) rep.centers.push_back(c);
    rep.sizes.assign(rep.centers.size(), 0);
    rep.expected_sizes.assign(rep.centers.size(), s.dim_hz);
    rep.expected_sizes[0] = s.dim_hx;
  }

  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(m, false);
  for (int i = 0; i < n; ++i) {
    const Complex ev = solver.eigenvalues()(i);
    rep.eigenvalues.push_back(ev);
    size_t best = 0;
    double bestd = std::abs(ev - rep.centers[0]);
    for (size_t c = 1; c < rep.centers.size(); ++c) {
      const double d = std::abs(ev - rep.centers[c]);
      if (d < bestd) { bestd = d; best = c; }
    }
    rep.sizes[best] += 1;
    rep.max_deviation = std::max(rep.max_deviation, bestd);
  }

  if (rep.max_deviation > radius || rep.sizes != rep.expected_sizes) {
    std::string msg = "cluster_verify: observed sizes";
    for (int v : rep.sizes) msg += " " + std::to_string(v);
    msg += ", expected";
    for (int v : rep.expected_sizes) msg += " " + std::to_string(v);
    msg += ", max deviation " + std::to_string(rep.max_deviation) + " at radius " +
           std::to_string(radius);
    throw ClusterMismatch(msg);
  }
  return rep;
}

inline ClusterReport cluster_verify(const Eigen::MatrixXcd& m, const BlowupScenario& s) {
  return cluster_verify(m, s, default_cluster_radius(s));
}

/// Betti numbers of the blowup: b_k(Xhat) = b_k(X) + sum_{i=1}^{r-1} b_{k-2i}(Z).
inline std::vector<long> split_cohomology_dims(const std::vector<long>& betti_x,
                                               const std::vector<long>& betti_z, int r) {
  if (r < 2) throw DomainError("split_cohomology_dims: r must be >= 2");
  const size_t len = std::max(betti_x.size(), betti_z.size() + 2 * static_cast<size_t>(r - 1));
  std::vector<long> out(len, 0);
  for (size_t k = 0; k < betti_x.size(); ++k) out[k] = betti_x[k];
  for (int i = 1; i <= r - 1; ++i)
    for (size_t k = 0; k < betti_z.size(); ++k) out[k + 2 * static_cast<size_t>(i)] += betti_z[k];
  while (!out.empty() && out.back() == 0) out.pop_back();
  return out;
}

/// Built-in test scenario: blowup of P^3 at a point (r = 3).
inline BlowupScenario blp3pt_scenario() {
  BlowupScenario s;
  s.dim_hx = 4;
  s.dim_hz = 1;
  s.r = 3;
  s.kx = qmatrix_zero(4, 4);
  for (int i = 1; i < 4; ++i) s.kx(i, i - 1) = Rational(-4);
  s.kz_minus_c1 = qmatrix_zero(1, 1);
  s.iota_lower = qmatrix_zero(4, 1);
  s.iota_lower(3, 0) = 1;  // point class sits in top degree
  s.iota_upper = qmatrix_zero(1, 4);
  s.iota_upper(0, 0) = 1;  // restriction of the unit
  s.c1 = qmatrix_zero(1, 1);
  s.chern = {qmatrix_zero(1, 1)};  // c_2 = 0 on a point
  s.qhat = Rational(1);
  s.epsilon = 1e-3;
  return s;
}

inline BlowupScenario scenario_from_json(const Json& j) {
  BlowupScenario s;
  s.dim_hx = j.at("dimHX").get<int>();
  s.dim_hz = j.at("dimHZ").get<int>();
  s.r = j.at("r").get<int>();
  if (s.r < 2) throw DomainError("blowup scenario: r must be >= 2");
  s.kx = qmatrix_from_json(j.at("KX"), s.dim_hx, s.dim_hx);
  s.kz_minus_c1 = qmatrix_from_json(j.at("KZminusC1"), s.dim_hz, s.dim_hz);
  s.iota_lower = qmatrix_from_json(j.at("iota_lower"), s.dim_hx, s.dim_hz);
  s.iota_upper = qmatrix_from_json(j.at("iota_upper"), s.dim_hz, s.dim_hx);
  s.c1 = j.contains("c1") ? qmatrix_from_json(j.at("c1"), s.dim_hz, s.dim_hz)
                          : qmatrix_zero(s.dim_hz, s.dim_hz);
  if (j.contains("chern"))
    for (const auto& c : j.at("chern"))
      s.chern.push_back(qmatrix_from_json(c, s.dim_hz, s.dim_hz));
  s.qhat = j.contains("Qhat") ? rational_from_json(j.at("Qhat")) : Rational(1);
  s.epsilon = j.contains("epsilon") ? j.at("epsilon").get<double>() : 1e-3;
  s.validate();
  return s;
}

inline Json cluster_report_to_json(const ClusterReport& rep) {
  Json centers = Json::array(), sizes = Json::array(), expected = Json::array(),
       eigs = Json::array();
  for (const auto& c : rep.centers) centers.push_back(complex_to_json(c));
  for (int v : rep.sizes) sizes.push_back(v);
  for (int v : rep.expected_sizes) expected.push_back(v);
  for (const auto& e : rep.eigenvalues) eigs.push_back(complex_to_json(e));
  return Json{{"centers", centers},           {"sizes", sizes},
              {"expected_sizes", expected},   {"eigenvalues", eigs},
              {"radius", rep.radius},         {"max_deviation", rep.max_deviation}};
}

}  // namespace atomlab
