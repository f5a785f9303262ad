#include "ctk/special.hpp"

#include <cmath>
#include <numbers>

#include "ctk/errors.hpp"

namespace ctk {

namespace {

bool is_int(double x) { return x == std::floor(x); }

}  // namespace

double gamma_fn(double x) {
  if (is_int(x)) {
    if (x <= 0) throw DomainError("gamma pole at non-positive integer");
    if (x <= 171) {
      double r = 1.0;
      for (int k = 2; k < static_cast<int>(x); ++k) r *= k;
      return r;
    }
  } else if (is_int(x - 0.5) && x > 0 && x < 171) {
    // Gamma(k + 1/2) = sqrt(pi) * (2k-1)!! / 2^k
    const int k = static_cast<int>(x - 0.5);
    double r = std::sqrt(std::numbers::pi);
    for (int j = 1; j <= k; ++j) r *= (2.0 * j - 1.0) / 2.0;
    return r;
  }
  return std::tgamma(x);
}

double gamma_ratio(double x, double y) {
  if (x < 150 && y < 150) return gamma_fn(x) / gamma_fn(y);
  if (x <= 0 || y <= 0) throw DomainError("gamma_ratio needs positive arguments past 150");
  return std::exp(std::lgamma(x) - std::lgamma(y));
}

}  // namespace ctk
