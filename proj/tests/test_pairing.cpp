#include <doctest.h>

#include <random>

#include "atomlab/pairing.hpp"

using namespace atomlab;

namespace {

MukaiVector vec(const TruncRing& ring, std::initializer_list<long> vals) {
  MukaiVector v = mukai_zero(ring);
  Eigen::Index i = 0;
  for (long x : vals) v(i++) = GaussianRational(Rational(x));
  return v;
}

/// h^0(P^n, O(m)) counted directly: monomials of degree m in n+1 variables.
long sections_of_twist(int n, int m) {
  // C(n+m, n) by the multiplicative formula, kept independent of the library
  long num = 1, den = 1;
  for (int i = 1; i <= n; ++i) {
    num *= m + i;
    den *= i;
  }
  return num / den;
}

MukaiVector random_vector(const TruncRing& ring, std::mt19937& rng) {
  std::uniform_int_distribution<int> num(-9, 9), den(1, 9);
  MukaiVector v = mukai_zero(ring);
  for (int k = 0; k <= ring.d; ++k) v(k) = GaussianRational(Rational(num(rng), den(rng)));
  return v;
}

}  // namespace

TEST_CASE("dual class") {
  const TruncRing p2 = TruncRing::projective_space(2);
  CHECK(v_dual(mukai_unit(p2)) == mukai_unit(p2));
  CHECK(v_dual(vec(p2, {0, 1, 0})) == vec(p2, {0, -1, 0}));
  std::mt19937 rng(41);
  for (int trial = 0; trial < 20; ++trial) {
    const MukaiVector v = random_vector(p2, rng);
    CHECK(v_dual(v_dual(v)) == v);
  }
}

TEST_CASE("mukai pairing on the projective line") {
  const TruncRing p1 = TruncRing::projective_space(1);
  MukaiVector c1 = mukai_zero(p1);
  c1(1) = GaussianRational(Rational(2));
  CHECK(mukai_pairing(p1, mukai_unit(p1), mukai_unit(p1), c1) == GaussianRational(Rational(1)));
  CHECK(mukai_pairing(p1, vec(p1, {0, 1}), mukai_unit(p1), c1) == GaussianRational(Rational(-1)));
  CHECK_THROWS_AS(mukai_pairing(p1, mukai_unit(p1), mukai_unit(p1), vec(p1, {1, 0})),
                  DomainError);

  SUBCASE("bilinearity in the second slot") {
    std::mt19937 rng(5);
    for (int trial = 0; trial < 20; ++trial) {
      const MukaiVector v = random_vector(p1, rng), w1 = random_vector(p1, rng),
                        w2 = random_vector(p1, rng);
      CHECK(mukai_pairing(p1, v, w1 + w2, c1) ==
            mukai_pairing(p1, v, w1, c1) + mukai_pairing(p1, v, w2, c1));
    }
  }
}

TEST_CASE("sqrt of the Todd class squares back") {
  for (int n = 1; n <= 4; ++n) {
    const TruncRing ring = TruncRing::projective_space(n);
    const MukaiVector td = todd_projective_space(ring);
    const MukaiVector root = sqrt_class(ring, td);
    CHECK(cup(ring, root, root) == td);
  }
  const TruncRing p2 = TruncRing::projective_space(2);
  CHECK_THROWS_AS(sqrt_class(p2, vec(p2, {0, 1, 0})), BadTodd);
}

TEST_CASE("euler pairing reproduces section counts on projective spaces") {
  for (int n = 1; n <= 2; ++n) {
    const TruncRing ring = TruncRing::projective_space(n);
    const MukaiVector td = todd_projective_space(ring);
    for (int m = 0; m <= 3; ++m) {
      const GaussianRational chi =
          euler_pairing(ring, mukai_unit(ring), exp_p1(ring, GaussianRational(Rational(m))), td);
      CHECK(chi == GaussianRational(Rational(sections_of_twist(n, m))));
    }
  }
}

TEST_CASE("euler pairing additivity and chi(1,1) = 1") {
  const TruncRing p1 = TruncRing::projective_space(1);
  const MukaiVector td = todd_projective_space(p1);
  CHECK(euler_pairing(p1, mukai_unit(p1), mukai_unit(p1), td) == GaussianRational(Rational(1)));
  std::mt19937 rng(6);
  for (int trial = 0; trial < 20; ++trial) {
    const MukaiVector a = random_vector(p1, rng), b1 = random_vector(p1, rng),
                      b2 = random_vector(p1, rng);
    CHECK(euler_pairing(p1, a, b1 + b2, td) ==
          euler_pairing(p1, a, b1, td) + euler_pairing(p1, a, b2, td));
    CHECK(euler_pairing(p1, b1 + b2, a, td) ==
          euler_pairing(p1, b1, a, td) + euler_pairing(p1, b2, a, td));
  }
}

TEST_CASE("serre operator") {
  const TruncRing p1 = TruncRing::projective_space(1);
  MukaiVector c1 = mukai_zero(p1);
  c1(1) = GaussianRational(Rational(2));
  const GMatrix s = serre_operator(p1, c1, 1);
  CHECK(s(0, 0) == GaussianRational(Rational(-1)));
  CHECK(s(0, 1) == GaussianRational{});
  CHECK(s(1, 0) == GaussianRational(Rational(2)));
  CHECK(s(1, 1) == GaussianRational(Rational(-1)));

  SUBCASE("c1 = 0 in even dimension is the identity") {
    const TruncRing p2 = TruncRing::projective_space(2);
    CHECK(exact_equal(serre_operator(p2, mukai_zero(p2), 2), gmatrix_identity(3)));
  }
  SUBCASE("S is (-1)^d times unipotent") {
    for (int n = 1; n <= 4; ++n) {
      const TruncRing ring = TruncRing::projective_space(n);
      MukaiVector c = mukai_zero(ring);
      c(1) = GaussianRational(Rational(n + 1));
      const GMatrix s2 = serre_operator(ring, c, n);
      const GaussianRational sign(Rational(n % 2 == 0 ? 1 : -1));
      GMatrix u = s2 - sign * gmatrix_identity(n + 1);
      GMatrix p = gmatrix_identity(n + 1);
      for (int k = 0; k <= n; ++k) p = p * u;
      CHECK(exact_equal(p, gmatrix_zero(n + 1, n + 1)));
    }
  }
}

TEST_CASE("serre relation holds exactly on projective spaces") {
  std::mt19937 rng(77);
  for (int n = 1; n <= 4; ++n) {
    const TruncRing ring = TruncRing::projective_space(n);
    const MukaiVector td = todd_projective_space(ring);
    MukaiVector c1 = mukai_zero(ring);
    c1(1) = GaussianRational(Rational(n + 1));
    std::vector<std::pair<MukaiVector, MukaiVector>> samples;
    for (int i = 0; i < 20; ++i)
      samples.emplace_back(random_vector(ring, rng), random_vector(ring, rng));
    const SerreRelationReport rep = serre_relation_check(ring, c1, td, n, samples);
    CHECK(rep.samples == 20);
    CHECK(rep.passed);
  }
}

TEST_CASE("serre relation degenerates to graded symmetry when c1 = 0") {
  // with S = (-1)^d Id the relation reads chi(a,b) = (-1)^d chi(b,a)
  std::mt19937 rng(78);
  const TruncRing ring = TruncRing::projective_space(2);
  MukaiVector td = mukai_unit(ring);  // c1 = 0 Todd surrogate
  for (int trial = 0; trial < 10; ++trial) {
    const MukaiVector a = random_vector(ring, rng), b = random_vector(ring, rng);
    CHECK(euler_pairing(ring, a, b, td) == euler_pairing(ring, b, a, td));
  }
}

TEST_CASE("degenerate scalar ring: chi is the plain product") {
  const TruncRing p0 = TruncRing::projective_space(0);
  const MukaiVector td = todd_projective_space(p0);
  std::mt19937 rng(12);
  std::uniform_int_distribution<int> num(-9, 9), den(1, 9);
  for (int trial = 0; trial < 10; ++trial) {
    MukaiVector a = mukai_zero(p0), b = mukai_zero(p0);
    a(0) = GaussianRational(rational(num(rng), den(rng)));
    b(0) = GaussianRational(rational(num(rng), den(rng)));
    CHECK(euler_pairing(p0, a, b, td) == a(0) * b(0));
  }
}

TEST_CASE("monodromy from the pairing") {
  const TruncRing p1 = TruncRing::projective_space(1);
  SUBCASE("symmetric pairing gives the identity") {
    GMatrix g = gmatrix_identity(2);
    g(0, 1) = g(1, 0) = GaussianRational(Rational(5));
    g(0, 0) = GaussianRational(Rational(2));
    CHECK(exact_equal(monodromy_from_pairing(g), gmatrix_identity(2)));
  }
  SUBCASE("antisymmetric pairing gives minus the identity") {
    GMatrix g = gmatrix_zero(2, 2);
    g(0, 1) = GaussianRational(Rational(3));
    g(1, 0) = GaussianRational(Rational(-3));
    GMatrix m = monodromy_from_pairing(g);
    CHECK(exact_equal(m, GaussianRational(Rational(-1)) * gmatrix_identity(2)));
  }
  SUBCASE("singular pairing is rejected") {
    CHECK_THROWS_AS(monodromy_from_pairing(gmatrix_zero(2, 2)), SingularMatrix);
  }
  SUBCASE("monodromy preserves the Euler gram matrix exactly") {
    for (int n = 1; n <= 3; ++n) {
      const TruncRing ring = TruncRing::projective_space(n);
      const GMatrix g = euler_gram(ring, todd_projective_space(ring));
      const GMatrix m = monodromy_from_pairing(g);
      CHECK(exact_equal(m.transpose() * g * m, g));
    }
  }
  SUBCASE("euler gram monodromy on P^1 is the Serre operator, unipotent") {
    const GMatrix g = euler_gram(p1, todd_projective_space(p1));
    const GMatrix m = monodromy_from_pairing(g);
    // eigenvalues of a unipotent-times-sign operator: (m + Id)^2 = 0 or (m - Id)^2 = 0
    const GMatrix shifted = m - GaussianRational(Rational(-1)) * gmatrix_identity(2);
    CHECK(exact_equal(shifted * shifted, gmatrix_zero(2, 2)));
  }
}
