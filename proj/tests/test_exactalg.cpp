#include <doctest.h>

#include <random>

#include "atomlab/diffop.hpp"
#include "atomlab/poly.hpp"
#include "atomlab/rational.hpp"
#include "atomlab/roots.hpp"
#include "atomlab/trunc_series.hpp"

using namespace atomlab;

TEST_CASE("rational parsing and normalization") {
  CHECK(rational_from_string("6/4") == rational(3, 2));
  CHECK(rational_from_string("-7") == Rational(-7));
  CHECK(to_string(rational_from_string("-6/4")) == "-3/2");
  CHECK(rational_from_string("2/-4") == rational(-1, 2));
  CHECK_THROWS(rational_from_string("abc"));
  CHECK_THROWS(rational_from_string(""));
  CHECK(pow(rational(2, 3), -2) == rational(9, 4));
}

TEST_CASE("gaussian rationals form a field with conjugation involution") {
  const GaussianRational i = GaussianRational::i();
  CHECK(i * i == GaussianRational(Rational(-1)));
  const GaussianRational z{rational(3, 2), Rational(-5)};
  CHECK(z.conj().conj() == z);
  CHECK(z * z.conj() == GaussianRational(z.norm()));
  const GaussianRational w{Rational(1), Rational(2)};
  CHECK((z / w) * w == z);
  CHECK_THROWS(z / GaussianRational{});
}

TEST_CASE("polynomial arithmetic keeps normal form") {
  const PolyQ p({Rational(1), Rational(2)});       // 1 + 2x
  const PolyQ q({Rational(-1), Rational(0), Rational(1)});  // x^2 - 1
  CHECK((p * q).degree() == 3);
  CHECK((q - q).is_zero());
  CHECK((q - q).degree() == -1);
  CHECK(p(rational(1, 2)) == Rational(2));
  CHECK(q.derivative() == PolyQ({Rational(0), Rational(2)}));
  CHECK(PolyQ({Rational(0), Rational(0), Rational(3)}).valuation() == 2);
}

TEST_CASE("polynomial division, gcd and squarefree decomposition") {
  const PolyQ a({Rational(-2), Rational(1)});   // x - 2
  const PolyQ b({rational(1, 2), Rational(1)}); // x + 1/2
  const PolyQ p = a * a * a * b;
  auto [quot, rem] = divmod(p, a * a);
  CHECK(rem.is_zero());
  CHECK(quot == a * b);
  CHECK_THROWS(divexact(p + PolyQ::constant(Rational(1)), a));
  CHECK(poly_gcd(a * b, a * a) == a.monic());

  const auto sf = squarefree_decomposition(p);
  REQUIRE(sf.size() == 2);
  CHECK(sf[0].first == b.monic());
  CHECK(sf[0].second == 1);
  CHECK(sf[1].first == a.monic());
  CHECK(sf[1].second == 3);
}

TEST_CASE("charpoly on small exact matrices") {
  // 2x2 identity -> (L-1)^2
  CHECK(charpoly(qmatrix_identity(2)) ==
        PolyQ({Rational(1), Rational(-2), Rational(1)}));
  // 3x3 nilpotent Jordan block -> L^3
  QMatrix j = qmatrix_zero(3, 3);
  j(1, 0) = 1;
  j(2, 1) = 1;
  CHECK(charpoly(j) == PolyQ({Rational(0), Rational(0), Rational(0), Rational(1)}));
  // rational entries
  QMatrix m = qmatrix_zero(2, 2);
  m(0, 0) = rational(1, 2);
  m(1, 1) = rational(1, 3);
  CHECK(charpoly(m) == PolyQ({rational(1, 6), rational(-5, 6), Rational(1)}));
}

TEST_CASE("diffop products match the worked normal forms") {
  // D o q = q D + q u
  CHECK(diffop_mul(DiffOp::d(), DiffOp::q()) ==
        DiffOp::term(Rational(1), 1, 0, 1) + DiffOp::term(Rational(1), 1, 1, 0));
  // D o 1 = D
  CHECK(diffop_mul(DiffOp::d(), DiffOp::one()) == DiffOp::d());
  // (D D) o q = q D^2 + 2 q u D + q u^2, from applying the rule twice
  const DiffOp expected = DiffOp::term(Rational(1), 1, 0, 2) +
                          DiffOp::term(Rational(2), 1, 1, 1) +
                          DiffOp::term(Rational(1), 1, 2, 0);
  CHECK(diffop_mul(diffop_mul(DiffOp::d(), DiffOp::d()), DiffOp::q()) == expected);
}

namespace {

DiffOp random_diffop(std::mt19937& rng) {
  std::uniform_int_distribution<int> nterms(1, 4), qpow(0, 2), upow(-1, 2), dpow(0, 2),
      coeff(-5, 5);
  DiffOp op;
  for (int t = 0, n = nterms(rng); t < n; ++t)
    op = op + DiffOp::term(Rational(coeff(rng)), qpow(rng), upow(rng), dpow(rng));
  return op;
}

}  // namespace

TEST_CASE("diffop multiplication is associative") {
  std::mt19937 rng(2024);
  for (int trial = 0; trial < 50; ++trial) {
    const DiffOp a = random_diffop(rng), b = random_diffop(rng), c = random_diffop(rng);
    CHECK(diffop_mul(diffop_mul(a, b), c) == diffop_mul(a, diffop_mul(b, c)));
  }
}

TEST_CASE("diffop action on monomials matches composed application") {
  // oracle: applying L1 then L2 to q^e coincides with applying L2*L1
  std::mt19937 rng(99);
  for (int trial = 0; trial < 40; ++trial) {
    const DiffOp l1 = random_diffop(rng), l2 = random_diffop(rng);
    const DiffOp prod = diffop_mul(l2, l1);
    for (int e : {0, 1, 2, 5}) {
      auto composed = prod.apply_to_monomial(e);
      // sequential: l1 maps q^e to a combination of monomials, then l2 acts
      std::map<int, LaurentU> sequential;
      for (const auto& [qe, upart] : l1.apply_to_monomial(e)) {
        for (const auto& [qe2, upart2] : l2.apply_to_monomial(qe)) {
          sequential[qe2] += upart * upart2;
        }
      }
      for (auto it = sequential.begin(); it != sequential.end();) {
        if (it->second.is_zero()) it = sequential.erase(it);
        else ++it;
      }
      CHECK(composed == sequential);
    }
  }
}

TEST_CASE("roots_clustered on exact factors") {
  // L^5 - 729 L^2: 0 (x2) and the three cube roots of 729
  PolyQ p({Rational(0), Rational(0), Rational(-729), Rational(0), Rational(0), Rational(1)});
  const Spectrum s = roots_clustered(p, 1e-9);
  REQUIRE(s.clusters.size() == 4);
  CHECK(s.total_multiplicity() == 5);
  CHECK(s.clusters[0].multiplicity == 2);
  CHECK(std::abs(s.clusters[0].value) < 1e-12);
  for (size_t i = 1; i < 4; ++i) {
    CHECK(std::abs(std::abs(s.clusters[i].value) - 9.0) < 1e-12);
    CHECK(s.clusters[i].exact);
  }
  // arguments 0, +-2pi/3
  std::vector<double> args;
  for (size_t i = 1; i < 4; ++i) args.push_back(std::arg(s.clusters[i].value));
  std::sort(args.begin(), args.end());
  CHECK(args[0] == doctest::Approx(-2 * std::numbers::pi / 3).epsilon(1e-12));
  CHECK(args[1] == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(args[2] == doctest::Approx(2 * std::numbers::pi / 3).epsilon(1e-12));
}

TEST_CASE("roots_clustered merges near-multiple roots") {
  // L^2 -> single cluster
  const Spectrum s0 = roots_clustered(PolyQ({Rational(0), Rational(0), Rational(1)}), 1e-9);
  REQUIRE(s0.clusters.size() == 1);
  CHECK(s0.clusters[0].multiplicity == 2);

  // (L-1)(L-1-1e-12): direct root computation then merge at 1e-9
  const Rational eps(1, 1000000000000L);
  const PolyQ p = PolyQ({Rational(-1), Rational(1)}) * PolyQ({-(Rational(1) + eps), Rational(1)});
  const Spectrum s = roots_clustered(p, 1e-9);
  REQUIRE(s.clusters.size() == 1);
  CHECK(s.clusters[0].multiplicity == 2);
  CHECK(std::abs(s.clusters[0].value - Complex(1.0, 0.0)) < 1e-9);
}

TEST_CASE("roots_clustered rejects order-dependent merges") {
  // roots at 0, 0.8e-9, 1.6e-9: chained within tol but diameter over tol
  const Rational a(8, 10000000000L), b(16, 10000000000L);
  const PolyQ p = PolyQ({Rational(0), Rational(1)}) * PolyQ({-a, Rational(1)}) *
                  PolyQ({-b, Rational(1)});
  CHECK_THROWS_AS(roots_clustered(p, 1e-9), ClusterAmbiguity);
}

TEST_CASE("roots_clustered invariants on random polynomials") {
  std::mt19937 rng(5);
  std::uniform_int_distribution<int> coeff(-8, 8), deg(2, 7);
  for (int trial = 0; trial < 30; ++trial) {
    std::vector<Rational> c(static_cast<size_t>(deg(rng)) + 1);
    for (auto& x : c) x = Rational(coeff(rng));
    c.back() = Rational(1 + std::abs(coeff(rng)));
    const PolyQ p(std::move(c));
    const Spectrum s = roots_clustered(p, 1e-9);
    CHECK(s.total_multiplicity() == p.degree());
    const PolyQ monic = p.monic();
    for (const auto& cl : s.clusters) {
      if (cl.multiplicity == 1) CHECK(std::abs(monic(cl.value)) < 1e-9);
    }
  }
}

TEST_CASE("charpoly residual at clustered eigenvalues stays below tol") {
  std::mt19937 rng(8);
  std::uniform_int_distribution<int> entry(-6, 6);
  for (int trial = 0; trial < 20; ++trial) {
    QMatrix m = qmatrix_zero(4, 4);
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) m(i, j) = Rational(entry(rng));
    const PolyQ p = charpoly(m);
    for (const auto& cl : roots_clustered(p, 1e-9).clusters)
      if (cl.multiplicity == 1) CHECK(std::abs(p(cl.value)) < 1e-9 * 1e3);
  }
}

TEST_CASE("clusters recover constructed root multiplicities") {
  // build polynomials with known rational roots and multiplicities; the
  // recovered clusters must reproduce them even though the eigensolver only
  // resolves repeated roots to sqrt(eps)
  std::mt19937 rng(77);
  std::uniform_int_distribution<int> nroots(1, 3), multd(1, 3), numd(-6, 6), dend(1, 4);
  for (int trial = 0; trial < 40; ++trial) {
    std::map<Rational, int> truth;
    const int k = nroots(rng);
    for (int i = 0; i < k; ++i) truth[rational(numd(rng), dend(rng))] += multd(rng);
    PolyQ p = PolyQ::constant(Rational(1));
    for (const auto& [root, mult] : truth)
      for (int m = 0; m < mult; ++m) p = p * PolyQ({-root, Rational(1)});
    const Spectrum s = roots_clustered(p, 1e-9);
    REQUIRE(s.clusters.size() == truth.size());
    for (const auto& [root, mult] : truth) {
      bool matched = false;
      for (const auto& c : s.clusters)
        if (std::abs(c.value - Complex(to_double(root), 0)) < 1e-9 && c.multiplicity == mult)
          matched = true;
      CHECK(matched);
    }
  }
}

TEST_CASE("truncated series arithmetic respects the order") {
  TruncSeries<Rational> a(3, Rational(0)), b(3, Rational(0));
  a.coeff(0) = 1;
  a.coeff(1) = 2;
  a.coeff(3) = 5;
  b.coeff(2) = 1;
  b.coeff(3) = -1;
  const auto prod = a * b;
  CHECK(prod.coeff(0) == 0);
  CHECK(prod.coeff(2) == 1);
  CHECK(prod.coeff(3) == Rational(1));  // 2*q*q^2 - 1*q^3; q^4 and beyond dropped
  CHECK_THROWS(a * TruncSeries<Rational>(2, Rational(0)));
}

TEST_CASE("laurent polynomials in u") {
  const LaurentU x = LaurentU::term(Rational(2), -3) + LaurentU::term(Rational(1), 1);
  CHECK(x.coeff(-3) == 2);
  CHECK(x.negate_u() == LaurentU::term(Rational(-2), -3) + LaurentU::term(Rational(-1), 1));
  CHECK(x.shifted(3).coeff(0) == 2);
  CHECK((x - x).is_zero());
  CHECK(x.eval(Rational(2)) == rational(2, 8) + Rational(2));
}
