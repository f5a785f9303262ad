#pragma once

// Seeded generators for the property tests.

#include <complex>
#include <cstdint>
#include <random>
#include <vector>

#include "ctk/rational.hpp"

namespace ctk::testing {

class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }

  // Uniform in the disk of radius r.
  Complex in_disk(double r) {
    const double rho = r * std::sqrt(uniform(0.0, 1.0));
    return std::polar(rho, uniform(0.0, 6.283185307179586));
  }

  std::vector<Complex> disk_sequence(int n, double r) {
    std::vector<Complex> v;
    for (int i = 0; i < n; ++i) v.push_back(in_disk(r));
    return v;
  }

  // p/q with |p| < q <= max_den, so strictly inside (-1, 1).
  Rational small_rational(int max_den) {
    const int q = integer(2, max_den);
    Rational r(integer(-(q - 1), q - 1), q);
    r.canonicalize();
    return r;
  }

  std::vector<Rational> rational_sequence(int n, int max_den) {
    std::vector<Rational> v;
    for (int i = 0; i < n; ++i) v.push_back(small_rational(max_den));
    return v;
  }

  std::mt19937_64& engine() { return rng_; }

 private:
  std::mt19937_64 rng_;
};

inline Rational Q(long p, long q = 1) {
  Rational r = Rational(p) / Rational(q);
  r.canonicalize();
  return r;
}

}  // namespace ctk::testing
