#pragma once

// Generalized Cartan matrices: axioms, symmetrizer, finite/affine/indefinite
// classification, and the effective matrix of Zou's Toda-type equations.

#include <optional>
#include <string>
#include <vector>

#include "ctk/rational.hpp"

namespace ctk {

enum class CartanClass { Finite, Affine, Indefinite };

std::string to_string(CartanClass c);

struct GeneralizedCartanMatrix {
  int n = 0;
  std::vector<std::vector<long>> A;
  std::vector<Rational> d;  // A = diag(d) B with B symmetric
  long at(int i, int j) const { return A[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]; }
};

struct Classification {
  GeneralizedCartanMatrix gcm;
  CartanClass cls = CartanClass::Finite;
  bool irreducible = true;
  std::vector<std::vector<int>> components;    // connected components of the Dynkin graph
  std::vector<CartanClass> component_classes;  // filled when reducible
  Rational det;
};

// Throws GcmError when the axioms fail or A is not symmetrizable. n <= 12.
GeneralizedCartanMatrix validate_gcm(const std::vector<std::vector<long>>& A);
Classification validate_and_classify(const std::vector<std::vector<long>>& A);

// [[2, -k], [-l, 2]]: kl < 4 finite, = 4 affine, > 4 indefinite.
CartanClass rank2_rule(long k, long l);

// Cartan matrix of type A_n (rank n).
std::vector<std::vector<long>> cartan_type_a(int n);

// Parses {"n": 2, "A": [[2, -1], [-1, 2]]} or a bare [[...]] array.
std::vector<std::vector<long>> parse_cartan_json(const std::string& text);

struct ZouMatrix {
  double m[2][2];
  bool is_gcm = false;
  bool reducible = false;
};

// [[2, 2AB/(B^2 + C^2)], [2B/A, 2]].
ZouMatrix zou_transform(double A, double B, double C);

}  // namespace ctk
