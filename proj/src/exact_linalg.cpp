#include "ctk/exact_linalg.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "ctk/errors.hpp"

namespace ctk {

RationalMatrix to_rational(const std::vector<std::vector<long>>& a) {
  RationalMatrix r;
  for (const auto& row : a) {
    std::vector<Rational> rr;
    for (long v : row) rr.emplace_back(v);
    r.push_back(std::move(rr));
  }
  return r;
}

RationalMatrix transpose(const RationalMatrix& a) {
  if (a.empty()) return {};
  RationalMatrix t(a[0].size(), std::vector<Rational>(a.size()));
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < a[i].size(); ++j) t[j][i] = a[i][j];
  return t;
}

RationalMatrix submatrix(const RationalMatrix& a, const std::vector<int>& idx) {
  RationalMatrix s;
  for (int i : idx) {
    std::vector<Rational> row;
    for (int j : idx) row.push_back(a.at(static_cast<std::size_t>(i)).at(static_cast<std::size_t>(j)));
    s.push_back(std::move(row));
  }
  return s;
}

Rational determinant(RationalMatrix a) {
  const std::size_t n = a.size();
  Rational det = 1;
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t p = k;
    while (p < n && a[p][k] == 0) ++p;
    if (p == n) return 0;
    if (p != k) {
      std::swap(a[p], a[k]);
      det = -det;
    }
    det *= a[k][k];
    for (std::size_t i = k + 1; i < n; ++i) {
      if (a[i][k] == 0) continue;
      const Rational f = a[i][k] / a[k][k];
      for (std::size_t j = k; j < n; ++j) a[i][j] -= f * a[k][j];
    }
  }
  det.canonicalize();
  return det;
}

std::optional<std::vector<Rational>> solve(RationalMatrix a, std::vector<Rational> b) {
  const std::size_t n = a.size();
  if (b.size() != n) throw DomainError("solve: dimension mismatch");
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t p = k;
    while (p < n && a[p][k] == 0) ++p;
    if (p == n) return std::nullopt;
    std::swap(a[p], a[k]);
    std::swap(b[p], b[k]);
    for (std::size_t i = 0; i < n; ++i) {
      if (i == k || a[i][k] == 0) continue;
      const Rational f = a[i][k] / a[k][k];
      for (std::size_t j = k; j < n; ++j) a[i][j] -= f * a[k][j];
      b[i] -= f * b[k];
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    b[i] /= a[i][i];
    b[i].canonicalize();
  }
  return b;
}

std::vector<Rational> char_poly(const RationalMatrix& a) {
  // Faddeev-LeVerrier: M_k = A M_{k-1} + c_{n-k+1} I, c_{n-k} = -tr(A M_k) / k.
  const std::size_t n = a.size();
  std::vector<Rational> c(n + 1, Rational(0));
  c[n] = 1;
  RationalMatrix M(n, std::vector<Rational>(n, Rational(0)));
  for (std::size_t k = 1; k <= n; ++k) {
    RationalMatrix AM(n, std::vector<Rational>(n, Rational(0)));
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t l = 0; l < n; ++l) {
        if (a[i][l] == 0) continue;
        for (std::size_t j = 0; j < n; ++j) AM[i][j] += a[i][l] * M[l][j];
      }
    for (std::size_t i = 0; i < n; ++i) AM[i][i] += c[n - k + 1];
    M = std::move(AM);
    Rational tr = 0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t l = 0; l < n; ++l) tr += a[i][l] * M[l][i];
    c[n - k] = -tr / static_cast<long>(k);
    c[n - k].canonicalize();
  }
  return c;
}

Complex QuadraticSurd::value() const {
  const double av = a.get_d(), bv = b.get_d(), dv = d.get_d();
  if (dv >= 0) return {av + bv * std::sqrt(dv), 0.0};
  return {av, bv * std::sqrt(-dv)};
}

std::string QuadraticSurd::to_string() const {
  if (is_rational()) return ctk::to_string(a);
  // Common denominator q: (P + Q sqrt(d)) / q.
  Integer q;
  mpz_lcm(q.get_mpz_t(), a.get_den_mpz_t(), b.get_den_mpz_t());
  const Integer P = a.get_num() * (q / a.get_den());
  const Integer Q = b.get_num() * (q / b.get_den());
  const Integer ad = abs(d);
  std::string root = (d < 0 ? "i*" : "") + std::string("sqrt(") + ad.get_str() + ")";
  std::ostringstream os;
  const bool wrap = q != 1;
  if (wrap) os << "(";
  if (P != 0) os << P.get_str();
  const Integer aq = abs(Q);
  os << (Q < 0 ? "-" : (P != 0 ? "+" : ""));
  if (aq != 1) os << aq.get_str() << "*";
  os << root;
  if (wrap) os << ")/" << q.get_str();
  return os.str();
}

namespace {

// n = s^2 * f with f squarefree; trial division, n > 0.
void split_square(Integer n, Integer& s, Integer& f) {
  s = 1;
  f = 1;
  for (Integer p = 2; p * p <= n; ++p) {
    while (n % (p * p) == 0) {
      n /= p * p;
      s *= p;
    }
    if (n % p == 0) {
      n /= p;
      f *= p;
    }
    if (p > 10000000) break;
  }
  f *= n;
}

std::vector<Integer> divisors(const Integer& n) {
  std::vector<Integer> out;
  const Integer an = abs(n);
  if (an > Integer("1000000000000")) throw ResourceError("rational root search: coefficient too large");
  for (Integer p = 1; p * p <= an; ++p) {
    if (an % p == 0) {
      out.push_back(p);
      if (p * p != an) out.push_back(an / p);
    }
  }
  return out;
}

Rational horner(const std::vector<Rational>& c, const Rational& x) {
  Rational v = 0;
  for (auto it = c.rbegin(); it != c.rend(); ++it) v = v * x + *it;
  return v;
}

// Synthetic division by (x - r).
std::vector<Rational> deflate(const std::vector<Rational>& c, const Rational& r) {
  const std::size_t n = c.size() - 1;
  std::vector<Rational> q(n);
  Rational carry = 0;
  for (std::size_t k = n; k >= 1; --k) {
    carry = c[k] + carry * r;
    q[k - 1] = carry;
  }
  for (auto& v : q) v.canonicalize();
  return q;
}

}  // namespace

QuadraticSurd make_surd(const Rational& a, const Rational& b, const Rational& D) {
  QuadraticSurd s;
  s.a = a;
  if (b == 0 || D == 0) {
    s.b = 0;
    return s;
  }
  // sqrt(num/den) = sqrt(num*den)/den
  Integer N = D.get_num() * D.get_den();
  const bool neg = N < 0;
  if (neg) N = -N;
  Integer sq, f;
  split_square(N, sq, f);
  Rational coef = b * Rational(sq, D.get_den());
  coef.canonicalize();
  if (f == 1 && !neg) {
    s.a = a + coef;
    s.a.canonicalize();
    s.b = 0;
    return s;
  }
  s.b = coef;
  s.d = neg ? Integer(-f) : f;
  return s;
}

PolyRoots poly_roots(std::vector<Rational> c) {
  while (c.size() > 1 && c.back() == 0) c.pop_back();
  PolyRoots out;
  // Zero roots.
  while (c.size() > 1 && c.front() == 0) {
    out.exact.push_back(make_surd(0, 0, 0));
    c.erase(c.begin());
  }
  bool found = true;
  while (c.size() > 3 && found) {
    found = false;
    Integer L = 1;
    for (const auto& v : c) mpz_lcm(L.get_mpz_t(), L.get_mpz_t(), v.get_den_mpz_t());
    std::vector<Integer> ic;
    for (const auto& v : c) ic.push_back(v.get_num() * (L / v.get_den()));
    if (ic.front() == 0) {
      out.exact.push_back(make_surd(0, 0, 0));
      c = deflate(c, 0);
      found = true;
      continue;
    }
    for (const auto& p : divisors(ic.front())) {
      for (const auto& q : divisors(ic.back())) {
        for (int sgn : {1, -1}) {
          Rational r(sgn * p, q);
          r.canonicalize();
          if (horner(c, r) == 0) {
            out.exact.push_back(make_surd(r, 0, 0));
            c = deflate(c, r);
            found = true;
            break;
          }
        }
        if (found) break;
      }
      if (found) break;
    }
  }
  if (c.size() == 2) {
    Rational r = -c[0] / c[1];
    r.canonicalize();
    out.exact.push_back(make_surd(r, 0, 0));
  } else if (c.size() == 3) {
    // (-b +- sqrt(b^2 - 4ac)) / 2a
    const Rational A = c[2], B = c[1], C = c[0];
    const Rational disc = B * B - 4 * A * C;
    const Rational mid = -B / (2 * A);
    const Rational half = 1 / (2 * A);
    out.exact.push_back(make_surd(mid, half, disc));
    out.exact.push_back(make_surd(mid, -half, disc));
  } else if (c.size() > 3) {
    const int n = static_cast<int>(c.size()) - 1;
    Eigen::MatrixXcd comp = Eigen::MatrixXcd::Zero(n, n);
    for (int i = 1; i < n; ++i) comp(i, i - 1) = 1.0;
    for (int i = 0; i < n; ++i) comp(i, n - 1) = -Rational(c[static_cast<std::size_t>(i)] / c.back()).get_d();
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(comp, false);
    for (int i = 0; i < n; ++i) out.numeric.push_back(es.eigenvalues()(i));
  }
  return out;
}

}  // namespace ctk
