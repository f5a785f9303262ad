#pragma once

// Probability measures on the unit circle, their moments and monic
// orthogonal polynomials, and both directions of the Verblunsky map.
//
// Conventions: the recursion is
//   p_n(z) = z p_{n-1}(z) + conj(alpha_n) z^{n-1} p_{n-1}^*(z),  p_0 = 1,
// and alpha_n = conj(p_n(0)), with the nontrivial coefficients indexed from
// n = 1 (alpha_0 = 1 is implicit and never stored). Simon's OPUC books index
// from zero with the opposite sign: alpha_n here equals -alpha_{n-1} there.

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "ctk/rational.hpp"
#include "ctk/series.hpp"

namespace ctk {

inline constexpr int kDefaultGrid = 4096;

// Absolutely continuous probability measure, given by its density with
// respect to dtheta / 2pi.
class CircleMeasure {
 public:
  using Density = std::function<double(double)>;

  // Checks nonnegativity and unit mass on a uniform grid of `check_grid` points.
  static CircleMeasure from_density(Density density, int check_grid = kDefaultGrid, double mass_tol = 1e-6);

  // Samples on the uniform grid theta_k = 2 pi k / size; periodic linear
  // interpolation in between.
  static CircleMeasure from_samples(std::vector<double> samples, double mass_tol = 1e-6);

  double density(double theta) const { return density_(theta); }
  double operator()(double theta) const { return density_(theta); }

  // Trapezoid-rule mass on `grid` points.
  double mass(int grid = kDefaultGrid) const;

  const std::optional<std::vector<double>>& samples() const { return samples_; }

 private:
  CircleMeasure(Density d, std::optional<std::vector<double>> samples)
      : density_(std::move(d)), samples_(std::move(samples)) {}

  Density density_;
  std::optional<std::vector<double>> samples_;
};

// Fourier moments c_n = int e^{-in theta} dmu, n = 0..N, with c_{-n} = conj(c_n).
struct MomentSequence {
  std::vector<Complex> c;
  double renormalization = 1.0;  // raw c_0 before it was scaled to 1

  int size() const { return static_cast<int>(c.size()); }
  Complex at(int n) const { return n >= 0 ? c.at(static_cast<std::size_t>(n)) : std::conj(c.at(static_cast<std::size_t>(-n))); }
};

// alpha_1..alpha_N, one-based access.
template <class T>
struct Verblunsky {
  std::vector<T> values;

  Verblunsky() = default;
  explicit Verblunsky(std::vector<T> v) : values(std::move(v)) {}

  int size() const { return static_cast<int>(values.size()); }
  const T& operator()(int n) const { return values.at(static_cast<std::size_t>(n - 1)); }
  Verblunsky prefix(int n) const {
    return Verblunsky(std::vector<T>(values.begin(), values.begin() + std::min(n, size())));
  }
};

using VerblunskySequence = Verblunsky<Complex>;
using ExactVerblunsky = Verblunsky<Rational>;

VerblunskySequence to_complex(const ExactVerblunsky& a);

MomentSequence moments_quadrature(const CircleMeasure& mu, int N, int gridsize = kDefaultGrid);

// One step of the Szego recursion; p is monic of degree n-1.
Series szego_step(const Series& p, Complex alpha_n, int n);
ExactSeries szego_step(const ExactSeries& p, const Rational& alpha_n, int n);

// Builds p_N from alpha_1..alpha_N.
Series szego_polynomial(const VerblunskySequence& alpha);

struct ForwardResult {
  VerblunskySequence alpha;
  std::vector<Series> polys;        // p_0..p_N
  std::vector<double> energies;     // ||p_n||^2 = D_{n+1} / D_n
  double szego_mismatch = 0.0;      // max coefficient gap to the Szego step
};

// Levinson-type recursion on the Toeplitz moment matrix.
ForwardResult verblunsky_from_moments(const MomentSequence& moments, int N);
ForwardResult verblunsky_forward(const CircleMeasure& mu, int N, int gridsize = kDefaultGrid);

// Bernstein-Szego approximant prod(1 - |alpha_n|^2) / |p_N(e^{i theta})|^2.
CircleMeasure bernstein_szego_density(const VerblunskySequence& alpha, int gridsize = kDefaultGrid,
                                      double mass_tol = 1e-6);

// Inner product <f, g> = int f conj(g) dmu on a uniform grid.
Complex quadrature_inner(const CircleMeasure& mu, const Series& f, const Series& g, int gridsize = kDefaultGrid);

// CSV with `theta,value` rows on a uniform grid starting at theta = 0.
CircleMeasure density_from_csv(const std::string& text, double mass_tol = 1e-6);
std::string density_to_csv(const CircleMeasure& mu, int gridsize);
std::string moments_to_csv(const MomentSequence& m);
std::string alpha_to_csv(const VerblunskySequence& a);

}  // namespace ctk
