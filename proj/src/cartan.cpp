#include "ctk/cartan.hpp"

#include <cmath>
#include <queue>

#include <nlohmann/json.hpp>

#include "ctk/errors.hpp"
#include "ctk/exact_linalg.hpp"

namespace ctk {

std::string to_string(CartanClass c) {
  switch (c) {
    case CartanClass::Finite: return "Finite";
    case CartanClass::Affine: return "Affine";
    case CartanClass::Indefinite: return "Indefinite";
  }
  return "?";
}

namespace {

std::vector<std::vector<int>> dynkin_components(const std::vector<std::vector<long>>& A) {
  const int n = static_cast<int>(A.size());
  std::vector<int> comp(static_cast<std::size_t>(n), -1);
  std::vector<std::vector<int>> out;
  for (int s = 0; s < n; ++s) {
    if (comp[static_cast<std::size_t>(s)] >= 0) continue;
    out.emplace_back();
    std::queue<int> q;
    q.push(s);
    comp[static_cast<std::size_t>(s)] = static_cast<int>(out.size()) - 1;
    while (!q.empty()) {
      const int i = q.front();
      q.pop();
      out.back().push_back(i);
      for (int j = 0; j < n; ++j) {
        if (j == i || A[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] == 0) continue;
        if (comp[static_cast<std::size_t>(j)] >= 0) continue;
        comp[static_cast<std::size_t>(j)] = comp[static_cast<std::size_t>(s)];
        q.push(j);
      }
    }
    std::sort(out.back().begin(), out.back().end());
  }
  return out;
}

// Classifies an indecomposable block by its principal minors.
CartanClass classify_block(const RationalMatrix& a) {
  const int n = static_cast<int>(a.size());
  bool all_positive = true, proper_positive = true;
  for (unsigned mask = 1; mask < (1u << n); ++mask) {
    std::vector<int> idx;
    for (int i = 0; i < n; ++i)
      if (mask & (1u << i)) idx.push_back(i);
    const Rational m = determinant(submatrix(a, idx));
    if (m <= 0) {
      all_positive = false;
      if (static_cast<int>(idx.size()) < n) proper_positive = false;
    }
  }
  if (all_positive) return CartanClass::Finite;
  if (proper_positive && determinant(a) == 0) return CartanClass::Affine;
  return CartanClass::Indefinite;
}

}  // namespace

GeneralizedCartanMatrix validate_gcm(const std::vector<std::vector<long>>& A) {
  const int n = static_cast<int>(A.size());
  if (n == 0) throw GcmError("empty matrix");
  if (n > 12) throw GcmError("matrices larger than 12x12 are refused (principal-minor enumeration)");
  for (int i = 0; i < n; ++i) {
    const auto& row = A[static_cast<std::size_t>(i)];
    if (static_cast<int>(row.size()) != n) throw GcmError("matrix is not square");
    if (row[static_cast<std::size_t>(i)] != 2) throw GcmError("diagonal entry " + std::to_string(i) + " is not 2");
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      const long aij = row[static_cast<std::size_t>(j)];
      const long aji = A[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)];
      if (aij > 0) throw GcmError("off-diagonal entry (" + std::to_string(i) + "," + std::to_string(j) + ") is positive");
      if ((aij == 0) != (aji == 0))
        throw GcmError("zero pattern not symmetric at (" + std::to_string(i) + "," + std::to_string(j) + ")");
    }
  }
  GeneralizedCartanMatrix g;
  g.n = n;
  g.A = A;
  g.d.assign(static_cast<std::size_t>(n), Rational(0));
  // A_ij / d_i = A_ji / d_j along a spanning tree, then check every edge.
  for (const auto& comp : dynkin_components(A)) {
    g.d[static_cast<std::size_t>(comp.front())] = 1;
    std::queue<int> q;
    q.push(comp.front());
    while (!q.empty()) {
      const int i = q.front();
      q.pop();
      for (int j : comp) {
        if (j == i || g.at(i, j) == 0 || g.d[static_cast<std::size_t>(j)] != 0) continue;
        g.d[static_cast<std::size_t>(j)] = g.d[static_cast<std::size_t>(i)] * Rational(g.at(j, i)) / Rational(g.at(i, j));
        g.d[static_cast<std::size_t>(j)].canonicalize();
        q.push(j);
      }
    }
  }
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (i == j || g.at(i, j) == 0) continue;
      if (Rational(g.at(i, j)) / g.d[static_cast<std::size_t>(i)] != Rational(g.at(j, i)) / g.d[static_cast<std::size_t>(j)])
        throw GcmError("matrix is not symmetrizable (inconsistent cycle through nodes " + std::to_string(i) + ", " +
                       std::to_string(j) + ")");
    }
  return g;
}

Classification validate_and_classify(const std::vector<std::vector<long>>& A) {
  Classification c;
  c.gcm = validate_gcm(A);
  const RationalMatrix a = to_rational(A);
  c.det = determinant(a);
  c.components = dynkin_components(A);
  c.irreducible = c.components.size() == 1;
  if (c.irreducible) {
    c.cls = classify_block(a);
    return c;
  }
  // Reducible: the overall class is the worst one among the blocks.
  c.cls = CartanClass::Finite;
  for (const auto& comp : c.components) {
    const CartanClass k = classify_block(submatrix(a, comp));
    c.component_classes.push_back(k);
    if (static_cast<int>(k) > static_cast<int>(c.cls)) c.cls = k;
  }
  return c;
}

CartanClass rank2_rule(long k, long l) {
  const long p = k * l;
  if (p < 4) return CartanClass::Finite;
  if (p == 4) return CartanClass::Affine;
  return CartanClass::Indefinite;
}

std::vector<std::vector<long>> cartan_type_a(int n) {
  if (n < 1) throw DomainError("cartan_type_a: rank must be >= 1");
  std::vector<std::vector<long>> A(static_cast<std::size_t>(n), std::vector<long>(static_cast<std::size_t>(n), 0));
  for (int i = 0; i < n; ++i) {
    A[static_cast<std::size_t>(i)][static_cast<std::size_t>(i)] = 2;
    if (i + 1 < n) {
      A[static_cast<std::size_t>(i)][static_cast<std::size_t>(i + 1)] = -1;
      A[static_cast<std::size_t>(i + 1)][static_cast<std::size_t>(i)] = -1;
    }
  }
  return A;
}

std::vector<std::vector<long>> parse_cartan_json(const std::string& text) {
  try {
    auto j = nlohmann::json::parse(text);
    const auto& arr = j.is_object() ? j.at("A") : j;
    auto A = arr.get<std::vector<std::vector<long>>>();
    if (j.is_object() && j.contains("n") && j.at("n").get<long>() != static_cast<long>(A.size()))
      throw UsageError("cartan json: n does not match the size of A");
    return A;
  } catch (const nlohmann::json::exception& e) {
    throw UsageError(std::string("cartan json: ") + e.what());
  }
}

ZouMatrix zou_transform(double A, double B, double C) {
  if (A == 0) throw DomainError("zou_transform: A must be nonzero");
  if (B * B + C * C == 0) throw DomainError("zou_transform: B^2 + C^2 must be nonzero");
  ZouMatrix z;
  z.m[0][0] = 2;
  z.m[0][1] = 2 * A * B / (B * B + C * C);
  z.m[1][0] = 2 * B / A;
  z.m[1][1] = 2;
  auto integral = [](double v) { return std::abs(v - std::round(v)) <= 1e-12 * std::max(1.0, std::abs(v)); };
  const double x = z.m[0][1], y = z.m[1][0];
  z.is_gcm = integral(x) && integral(y) && x <= 0 && y <= 0 && ((x == 0) == (y == 0));
  z.reducible = x == 0 && y == 0;
  return z;
}

}  // namespace ctk
