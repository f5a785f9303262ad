#include <doctest.h>

#include <Eigen/Eigenvalues>

#include "ctk/cartan.hpp"
#include "ctk/errors.hpp"
#include "ctk/exact_linalg.hpp"
#include "support.hpp"

using namespace ctk;
using ctk::testing::Gen;
using ctk::testing::Q;

namespace {

using Mat = std::vector<std::vector<long>>;

// Independent oracle for symmetric connected GCMs: finite iff positive
// definite, affine iff positive semidefinite and singular.
CartanClass classify_by_eigenvalues(const Mat& A) {
  const int n = static_cast<int>(A.size());
  Eigen::MatrixXd m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m(i, j) = static_cast<double>(A[i][j]);
  const Eigen::VectorXd ev = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(m).eigenvalues();
  if (ev.minCoeff() > 1e-9) return CartanClass::Finite;
  if (ev.minCoeff() > -1e-9) return CartanClass::Affine;
  return CartanClass::Indefinite;
}

bool connected(const Mat& A) {
  const int n = static_cast<int>(A.size());
  std::vector<int> seen{0}, mark(n, 0);
  mark[0] = 1;
  for (std::size_t k = 0; k < seen.size(); ++k)
    for (int j = 0; j < n; ++j)
      if (!mark[j] && A[seen[k]][j] != 0) {
        mark[j] = 1;
        seen.push_back(j);
      }
  return static_cast<int>(seen.size()) == n;
}

}  // namespace

TEST_CASE("classification examples") {
  CHECK(validate_and_classify({{2, -1}, {-1, 2}}).cls == CartanClass::Finite);
  CHECK(validate_and_classify({{2, -2}, {-2, 2}}).cls == CartanClass::Affine);
  const auto h = validate_and_classify({{2, -3}, {-3, 2}});
  CHECK(h.cls == CartanClass::Indefinite);
  CHECK(h.det == -5);
  // Affine A_2 with a cycle, affine G_2, finite B_2 and G_2.
  CHECK(validate_and_classify({{2, -1, -1}, {-1, 2, -1}, {-1, -1, 2}}).cls == CartanClass::Affine);
  CHECK(validate_and_classify({{2, -1, 0}, {-1, 2, -3}, {0, -1, 2}}).cls == CartanClass::Affine);
  CHECK(validate_and_classify({{2, -2}, {-1, 2}}).cls == CartanClass::Finite);
  CHECK(validate_and_classify({{2, -3}, {-1, 2}}).cls == CartanClass::Finite);
  CHECK(to_string(CartanClass::Indefinite) == "Indefinite");
}

TEST_CASE("reducible matrices take the worst block") {
  const auto c = validate_and_classify({{2, 0, 0}, {0, 2, -2}, {0, -2, 2}});
  CHECK_FALSE(c.irreducible);
  CHECK(c.components.size() == 2);
  CHECK(c.component_classes[0] == CartanClass::Finite);
  CHECK(c.component_classes[1] == CartanClass::Affine);
  CHECK(c.cls == CartanClass::Affine);
}

TEST_CASE("axioms and symmetrizer") {
  CHECK_THROWS_AS(validate_gcm({{1, -1}, {-1, 2}}), GcmError);
  CHECK_THROWS_AS(validate_gcm({{2, 1}, {1, 2}}), GcmError);
  CHECK_THROWS_AS(validate_gcm({{2, -1}, {0, 2}}), GcmError);
  CHECK_THROWS_AS(validate_gcm({{2, -1}}), GcmError);
  CHECK_THROWS_AS(validate_gcm({{2, -1, -1}, {-2, 2, -1}, {-1, -1, 2}}), GcmError);
  CHECK_THROWS_AS(validate_gcm(Mat(13, std::vector<long>(13, 0))), GcmError);
  const auto g = validate_gcm({{2, -3}, {-1, 2}});
  // A_ij / d_i symmetric.
  CHECK(Rational(g.at(0, 1)) / g.d[0] == Rational(g.at(1, 0)) / g.d[1]);
  CHECK(parse_cartan_json(R"({"n": 2, "A": [[2, -1], [-1, 2]]})") == Mat{{2, -1}, {-1, 2}});
  CHECK(parse_cartan_json("[[2]]") == Mat{{2}});
  CHECK_THROWS_AS(parse_cartan_json(R"({"n": 3, "A": [[2]]})"), UsageError);
  CHECK_THROWS_AS(parse_cartan_json("[[2,"), UsageError);
}

TEST_CASE("property: rank-2 rule") {
  for (long k = 1; k <= 4; ++k)
    for (long l = 1; l <= 4; ++l) {
      const auto c = validate_and_classify({{2, -k}, {-l, 2}});
      CHECK(c.cls == rank2_rule(k, l));
      CHECK(c.det == 4 - k * l);
    }
}

TEST_CASE("property: type A is finite and agrees with the eigenvalue oracle") {
  for (int n = 1; n <= 8; ++n) {
    const auto A = cartan_type_a(n);
    CHECK(validate_and_classify(A).cls == CartanClass::Finite);
    CHECK(validate_and_classify(A).det == n + 1);
  }
  Gen g(5);
  int checked = 0;
  for (int trial = 0; trial < 400; ++trial) {
    const int n = g.integer(2, 6);
    Mat A(n, std::vector<long>(n, 0));
    for (int i = 0; i < n; ++i) {
      A[i][i] = 2;
      for (int j = 0; j < i; ++j) A[i][j] = A[j][i] = g.integer(0, 3) == 0 ? -g.integer(1, 2) : 0;
    }
    if (!connected(A)) continue;
    ++checked;
    CHECK(validate_and_classify(A).cls == classify_by_eigenvalues(A));
  }
  CHECK(checked > 50);
}

TEST_CASE("Zou's effective matrix") {
  const auto a = zou_transform(1, 1, 1);
  CHECK(a.m[0][1] == 1.0);
  CHECK(a.m[1][0] == 2.0);
  CHECK_FALSE(a.is_gcm);
  const auto b = zou_transform(1, 0, 1);
  CHECK(b.is_gcm);
  CHECK(b.reducible);
  const auto c = zou_transform(1, -1, 1);
  CHECK(c.m[0][1] == -1.0);
  CHECK(c.m[1][0] == -2.0);
  CHECK(c.is_gcm);
  CHECK_FALSE(c.reducible);
  CHECK_THROWS_AS(zou_transform(0, 1, 1), DomainError);
}

TEST_CASE("exact linear algebra") {
  const RationalMatrix m = {{Q(2), Q(1)}, {Q(1), Q(3)}};
  CHECK(determinant(m) == 5);
  const auto x = solve(m, {Q(3), Q(4)});
  REQUIRE(x);
  CHECK((*x)[0] == 1);
  CHECK((*x)[1] == 1);
  CHECK_FALSE(solve({{Q(1), Q(2)}, {Q(2), Q(4)}}, {Q(1), Q(1)}));
  // det(l I - m) = l^2 - 5 l + 5
  CHECK(char_poly(m) == std::vector<Rational>{5, -5, 1});
  CHECK(transpose({{Q(1), Q(2)}}) == RationalMatrix{{Q(1)}, {Q(2)}});
}

TEST_CASE("roots and surds") {
  const auto r = poly_roots({-6, 11, -6, 1});  // (x - 1)(x - 2)(x - 3)
  CHECK(r.numeric.empty());
  REQUIRE(r.exact.size() == 3);
  for (const auto& s : r.exact) CHECK(s.is_rational());
  const auto c = poly_roots({10, -1, 1});  // x^2 - x + 10
  REQUIRE(c.exact.size() == 2);
  CHECK(c.exact[0].to_string() == "(1+i*sqrt(39))/2");
  CHECK(c.exact[1].to_string() == "(1-i*sqrt(39))/2");
  CHECK(std::abs(c.exact[0].value() - Complex(0.5, std::sqrt(39.0) / 2)) < 1e-15);
  CHECK(make_surd(0, 1, 8).to_string() == "2*sqrt(2)");
  CHECK(make_surd(1, 1, Q(9, 4)).to_string() == "5/2");
  const auto cubic = poly_roots({1, 1, 0, 1});  // x^3 + x + 1, no rational roots
  CHECK(cubic.exact.empty());
  CHECK(cubic.numeric.size() == 3);
}

TEST_CASE("property: char poly vanishes at exact eigenvalues") {
  Gen g(77);
  for (int trial = 0; trial < 30; ++trial) {
    const int n = g.integer(1, 4);
    RationalMatrix m(n, std::vector<Rational>(n));
    for (auto& row : m)
      for (auto& v : row) v = g.integer(-4, 4);
    const auto p = char_poly(m);
    CHECK(p.back() == 1);
    // p(0) = det(-m)
    CHECK(p[0] == ((n % 2) ? -determinant(m) : determinant(m)));
    for (const auto& root : poly_roots(p).exact) {
      if (!root.is_rational()) continue;
      Rational v = 0;
      for (auto it = p.rbegin(); it != p.rend(); ++it) v = v * root.a + *it;
      CHECK(v == 0);
    }
  }
}
