#include <doctest.h>

#include <cmath>

#include "ctk/family.hpp"
#include "ctk/opuc.hpp"
#include "support.hpp"

using namespace ctk;
using ctk::testing::Gen;
using ctk::testing::Q;

namespace {

CircleMeasure lebesgue() {
  return CircleMeasure::from_density([](double) { return 1.0; });
}

CircleMeasure one_minus_cos() {
  return CircleMeasure::from_density([](double t) { return 1.0 - std::cos(t); });
}

// Monic orthogonal polynomials by Gram-Schmidt on the quadrature inner product.
std::vector<Series> gram_schmidt(const CircleMeasure& mu, int N, int grid) {
  std::vector<Series> p;
  for (int n = 0; n <= N; ++n) {
    Series q = Series::monomial(1.0, n);
    for (int k = 0; k < n; ++k) {
      const Complex c = quadrature_inner(mu, q, p[k], grid) / quadrature_inner(mu, p[k], p[k], grid);
      q = subtract(q, scale(p[k], c));
    }
    p.push_back(q.window(0, n));
  }
  return p;
}

}  // namespace

TEST_CASE("moments of simple densities") {
  const auto leb = moments_quadrature(lebesgue(), 4);
  CHECK(std::abs(leb.c[0] - 1.0) < 1e-15);
  for (int n = 1; n <= 4; ++n) CHECK(std::abs(leb.c[n]) < 1e-15);

  const auto m1 = moments_quadrature(one_minus_cos(), 3);
  CHECK(std::abs(m1.c[1] + 0.5) < 1e-14);
  CHECK(std::abs(m1.c[2]) < 1e-14);

  const auto sq = CircleMeasure::from_density([](double t) { return 2.0 / 3.0 * std::pow(1.0 - std::cos(t), 2); });
  const auto m2 = moments_quadrature(sq, 3);
  CHECK(std::abs(m2.c[1] + 2.0 / 3.0) < 1e-14);
  CHECK(std::abs(m2.c[2] - 1.0 / 6.0) < 1e-14);
  CHECK(std::abs(m2.at(-1) - std::conj(m2.c[1])) < 1e-15);
}

TEST_CASE("measure validation") {
  CHECK_THROWS_AS(CircleMeasure::from_density([](double t) { return std::cos(t); }), MeasureError);
  CHECK_THROWS_AS(CircleMeasure::from_density([](double) { return 2.0; }), MeasureError);
  CHECK_THROWS_AS(moments_quadrature(lebesgue(), 100, 64), ContractError);
}

TEST_CASE("Szego steps by hand") {
  const auto p1 = szego_step(ExactSeries::constant(1), Q(1, 2), 1);
  CHECK(p1.at(0) == Q(1, 2));
  CHECK(p1.at(1) == 1);
  const auto p2 = szego_step(p1, Q(1, 3), 2);
  CHECK(p2.at(0) == Q(1, 3));
  CHECK(p2.at(1) == Q(2, 3));
  CHECK(p2.at(2) == 1);
  // alpha_n = conj(p_n(0))
  CHECK(p2.at(0) == Q(1, 3));

  const auto free = szego_step(p2, Rational(0), 3);
  CHECK(free.at(0) == 0);
  for (int k = 0; k <= 2; ++k) CHECK(free.at(k + 1) == p2.at(k));

  const auto q = szego_step(Series::polynomial({0.5, 1.0}), Complex(0.0, 0.25), 2);
  CHECK(std::abs(q[0] - Complex(0.0, -0.25)) < 1e-15);

  CHECK_THROWS_AS(szego_step(ExactSeries::polynomial({1, 2}), Q(1, 2), 2), ContractError);
  CHECK_THROWS_AS(szego_step(ExactSeries::constant(1), Rational(1), 1), DomainError);
}

TEST_CASE("forward map on known measures") {
  const auto r = verblunsky_forward(one_minus_cos(), 12);
  for (int n = 1; n <= 12; ++n) CHECK(std::abs(r.alpha(n) - 1.0 / (n + 1)) < 1e-8);

  const auto leb = verblunsky_forward(lebesgue(), 8);
  for (int n = 1; n <= 8; ++n) CHECK(std::abs(leb.alpha(n)) < 1e-14);

  const auto half = verblunsky_forward(family_measure(FamilyParams::exact(2)), 10, 8192);
  for (int n = 1; n <= 10; ++n) CHECK(std::abs(half.alpha(n) - 1.0 / (2 * n + 1)) < 1e-6);
}

TEST_CASE("finite support is detected") {
  // Point mass at z = 1.
  MomentSequence m;
  for (int n = 0; n <= 4; ++n) m.c.push_back(1.0);
  CHECK_THROWS_AS(verblunsky_from_moments(m, 4), FiniteSupportError);
  // Moments no measure has: |c_1| > c_0.
  MomentSequence bad;
  bad.c = {1.0, 1.5, 0.0};
  CHECK_THROWS_AS(verblunsky_from_moments(bad, 2), BreakdownError);
}

TEST_CASE("inverse map examples") {
  const auto flat = bernstein_szego_density(VerblunskySequence{}, 256);
  CHECK(std::abs(flat(1.234) - 1.0) < 1e-15);
  const auto one = bernstein_szego_density(VerblunskySequence({0.5}), 4096);
  for (double t : {0.0, 1.0, 2.5, 4.0}) {
    const double expect = 0.75 / std::norm(std::polar(1.0, t) + 0.5);
    CHECK(std::abs(one(t) - expect) < 1e-12);
  }
}

TEST_CASE("inverse map converges toward the m = 1 density") {
  const auto mu = bernstein_szego_density(family_alphas(FamilyParams::exact(1), 200), 8192, 1e-2);
  const auto c = moments_quadrature(mu, 5, 8192);
  CHECK(std::abs(c.c[1] + 0.5) < 1e-3);
  CHECK(std::abs(c.c[2]) < 1e-3);
}

TEST_CASE("csv import and export") {
  const auto mu = one_minus_cos();
  const auto back = density_from_csv(density_to_csv(mu, 512));
  CHECK(std::abs(back(0.0) - 0.0) < 1e-15);
  CHECK(std::abs(back(M_PI) - 2.0) < 1e-12);
  CHECK(alpha_to_csv(VerblunskySequence({0.5})).find("0.5") != std::string::npos);
}

TEST_CASE("property: orthogonality for the beta family") {
  for (const auto& beta : {Q(1), Q(1, 2), Q(1, 3)}) {
    const auto mu = family_measure(FamilyParams::exact(beta));
    const auto r = verblunsky_forward(mu, 15, 4096);
    std::vector<double> norm;
    for (int n = 0; n <= 15; ++n) norm.push_back(std::sqrt(std::abs(quadrature_inner(mu, r.polys[n], r.polys[n]))));
    for (int n = 0; n <= 15; ++n)
      for (int k = 0; k < n; ++k)
        CHECK(std::abs(quadrature_inner(mu, r.polys[n], r.polys[k])) <= 1e-8 * norm[n] * norm[k]);
  }
}

TEST_CASE("property: monic of degree n, and Levinson agrees with Szego and Gram-Schmidt") {
  const auto mu = family_measure(FamilyParams::exact(Q(1, 2)));
  const auto r = verblunsky_forward(mu, 10);
  const auto gs = gram_schmidt(mu, 10, 4096);
  for (int n = 0; n <= 10; ++n) {
    CHECK(r.polys[n].hi() == n);
    CHECK(r.polys[n][n] == Complex(1.0, 0.0));
    const auto sz = szego_polynomial(r.alpha.prefix(n));
    for (int k = 0; k <= n; ++k) {
      CHECK(std::abs(sz.at(k) - r.polys[n].at(k)) <= 1e-9);
      CHECK(std::abs(gs[n].at(k) - r.polys[n].at(k)) <= 1e-9);
    }
  }
  CHECK(r.szego_mismatch <= 1e-9);
}

TEST_CASE("property: forward after inverse returns the coefficients") {
  Gen g(99);
  for (int trial = 0; trial < 25; ++trial) {
    const int N = g.integer(2, 16);
    const VerblunskySequence a(g.disk_sequence(N, 0.5));
    // Some draws put a zero of p_N close to the circle; the fine grid resolves them.
    const auto mu = bernstein_szego_density(a, 32768);
    const auto r = verblunsky_forward(mu, N / 2, 32768);
    for (int k = 1; k <= N / 2; ++k) CHECK(std::abs(r.alpha(k) - a(k)) <= 1e-6);
    for (int k = 1; k <= N / 2; ++k) CHECK(std::abs(r.alpha(k)) < 1.0);
  }
}
