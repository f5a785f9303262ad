#pragma once

// SU(1,1) root subgroup products
//
//   P_N(z) = F_N(z) ... F_1(z),   F_k(z) = [[1, conj(a_k) z^{-k}], [a_k z^k, 1]]
//
// (new factors multiply on the left). P_N has the form
// [[delta^*, gamma^*], [gamma, delta]] with gamma, delta polynomials in z,
// gamma(0) = 0 and delta(0) = 1, so only the bottom row is carried:
//
//   gamma <- gamma + a_k z^k delta^*,   delta <- delta + a_k z^k gamma^*.
//
// The normalized product multiplies each factor by (1 - |a_k|^2)^{-1/2}.
//
// Two evaluation paths: series (coefficients, exact in rational mode) and a
// per-point 2x2 recurrence on the circle (densities, no truncation at all).

#include <optional>
#include <vector>

#include "ctk/opuc.hpp"
#include "ctk/series.hpp"

namespace ctk {

template <class T>
struct PartialProduct {
  int N = 0;
  int M = 0;
  bool normalized = false;
  TruncatedSeries<T> gamma;       // window 1..M
  TruncatedSeries<T> delta;       // window 0..M
  TruncatedSeries<T> gamma_full;  // the whole polynomial, degree <= N
  TruncatedSeries<T> delta_full;
  Verblunsky<T> alphas;
  double det_product = 1.0;       // prod (1 - |a_k|^2)
};

using ComplexProduct = PartialProduct<Complex>;
using ExactProduct = PartialProduct<Rational>;

inline constexpr int kMaxProductFactorsDouble = 200000;
inline constexpr int kMaxProductFactorsExact = 4000;

ComplexProduct partial_product(const VerblunskySequence& alphas, int N, int M, bool normalized = false);
ExactProduct partial_product(const ExactVerblunsky& alphas, int N, int M);

// Value of the full 2x2 product at a point, by explicit matrix products.
struct Mat2 {
  Complex a11, a12, a21, a22;
};
Mat2 product_matrix_at(const VerblunskySequence& alphas, int N, Complex z, bool normalized = false);

// Coefficient of z^n in gamma and delta by direct enumeration of the
// multi-index sums (indices <= N). Refuses n > 12.
template <class T>
struct GammaDelta {
  T gamma;
  T delta;
};
GammaDelta<Complex> gamma_delta_bruteforce(const VerblunskySequence& alphas, int n, int N);
GammaDelta<Rational> gamma_delta_bruteforce(const ExactVerblunsky& alphas, int n, int N);

struct DiskSamples {
  static constexpr int kAngles = 64;
  static constexpr double kRadii[3] = {0.3, 0.6, 0.9};
};

template <class T>
struct SchurFn {
  TruncatedSeries<T> series;  // window 0..M-1
};

template <class T>
struct CaratheodoryFn {
  TruncatedSeries<T> series;  // window 0..M
};

// f = -gamma / (z delta), checked |f| <= 1 + 1e-9 on the disk samples.
SchurFn<Complex> schur_function(const ComplexProduct& pp);
SchurFn<Rational> schur_function(const ExactProduct& pp);

// F = (delta - gamma) / (delta + gamma), checked Re F > 0 on the disk samples.
CaratheodoryFn<Complex> caratheodory_function(const ComplexProduct& pp);
CaratheodoryFn<Rational> caratheodory_function(const ExactProduct& pp);

// Maximum modulus / minimum real part over the disk samples.
double schur_disk_max(const Series& f);
double caratheodory_disk_min_real(const Series& F);

struct IdentityResidual {
  double max_abs = 0.0;
  bool exactly_zero = false;
};

// delta - (1 + F)(delta + gamma) / 2 over the reliable window.
IdentityResidual delta_identity_residual(const ComplexProduct& pp);
IdentityResidual delta_identity_residual(const ExactProduct& pp);

struct RsfDensity {
  int N = 0;
  std::vector<double> theta;
  std::vector<double> density;
  double prefactor = 1.0;            // prod (1 - |a_k|^2)
  double mass = 0.0;
  std::vector<double> near_zero;     // thetas where density < 1e-4 max density

  CircleMeasure measure() const;     // renormalized to unit mass
};

// dmu = prod (1 - |a_k|^2) / |gamma + delta|^2 dtheta/2pi from the per-point
// recurrence. `threads` splits the grid; results do not depend on it.
RsfDensity rsf_density(const VerblunskySequence& alphas, int N, int gridsize = kDefaultGrid, int threads = 1);

struct SupDiagnostic {
  std::vector<double> sup_table;       // level n = 0..N: max over grid of |delta + gamma|
  std::vector<double> value_at_one;    // level n = 0..N: |delta + gamma| at theta = 0
  double sup = 0.0;
};

SupDiagnostic circle_sup_diagnostic(const VerblunskySequence& alphas, int N, int gridsize = kDefaultGrid);

// (delta + gamma)(1) computed exactly; real rational coefficients.
Rational sum_at_one_exact(const ExactVerblunsky& alphas, int N);

}  // namespace ctk
