#pragma once

// Small dense linear algebra over Q, plus exact roots of rational
// polynomials where they exist (rational roots and quadratic surds).

#include <optional>
#include <string>
#include <vector>

#include "ctk/rational.hpp"

namespace ctk {

using RationalMatrix = std::vector<std::vector<Rational>>;

RationalMatrix to_rational(const std::vector<std::vector<long>>& a);
RationalMatrix transpose(const RationalMatrix& a);
RationalMatrix submatrix(const RationalMatrix& a, const std::vector<int>& idx);

Rational determinant(RationalMatrix a);

// Unique solution of a x = b, or nothing when a is singular.
std::optional<std::vector<Rational>> solve(RationalMatrix a, std::vector<Rational> b);

// Coefficients of det(lambda I - a), lowest degree first; monic.
std::vector<Rational> char_poly(const RationalMatrix& a);

// a + b sqrt(d) with d a squarefree integer other than 0 and 1, or b = 0.
struct QuadraticSurd {
  Rational a;
  Rational b;
  Integer d = 1;

  bool is_rational() const { return b == 0 || d == 1; }
  Complex value() const;
  // "(1+i*sqrt(39))/2", "3", "-1/2+sqrt(5)/2" style.
  std::string to_string() const;
  bool operator==(const QuadraticSurd& o) const { return a == o.a && b == o.b && d == o.d; }
};

// Canonical a + b sqrt(D) for rational D: D's square part is pulled out.
QuadraticSurd make_surd(const Rational& a, const Rational& b, const Rational& D);

struct PolyRoots {
  std::vector<QuadraticSurd> exact;   // with multiplicity
  std::vector<Complex> numeric;       // roots of the leftover factor of degree >= 3
};

// Roots of a rational polynomial (lowest degree first): rational roots by the
// rational root theorem, then a leftover quadratic solved exactly.
PolyRoots poly_roots(std::vector<Rational> coeffs);

}  // namespace ctk
