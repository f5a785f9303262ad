#pragma once

// The explicit family alpha_n = 1 / (1 + n beta), m = 1 / beta, whose measure
// is proportional to (1 - cos theta)^m dtheta / 2pi, together with every
// closed form attached to it: the super-telescoping identity, the
// (1 - z)^{-m} coefficients, the Caratheodory function F_m, the
// normalization constants, and the moments.

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ctk/opuc.hpp"
#include "ctk/rational.hpp"
#include "ctk/series.hpp"

namespace ctk {

// beta is the single source of truth; m is derived.
class FamilyParams {
 public:
  static FamilyParams exact(const Rational& beta);
  static FamilyParams real(double beta);

  double beta() const { return beta_; }
  double m() const { return 1.0 / beta_; }
  bool is_exact() const { return beta_exact_.has_value(); }
  const Rational& beta_exact() const;
  Rational m_exact() const;

  // m when it is a positive integer.
  std::optional<int> integral_m() const;

 private:
  explicit FamilyParams(double beta, std::optional<Rational> exact) : beta_(beta), beta_exact_(std::move(exact)) {}
  double beta_;
  std::optional<Rational> beta_exact_;
};

double alpha_beta(const FamilyParams& p, int n);
Rational alpha_beta_exact(const FamilyParams& p, int n);
VerblunskySequence family_alphas(const FamilyParams& p, int N);
ExactVerblunsky family_alphas_exact(const FamilyParams& p, int N);

// The density prefactor * (1 - cos theta)^m as a measure.
CircleMeasure family_measure(const FamilyParams& p, int check_grid = kDefaultGrid);

struct SupertelescopeResult {
  int n = 0;
  Rational lhs;
  Rational rhs;
  bool equal = false;
};

// Sum over i(1) > j(1) > ... > i(L) > j(L) >= 0 with sum (i - j) = n of
// prod 1 / ((i beta + 1)(j beta + 1)), summed in closed form; 1 <= n <= 10.
Rational supertelescope_lhs(const FamilyParams& p, int n);
Rational supertelescope_rhs(const FamilyParams& p, int n);
SupertelescopeResult supertelescope_check(const FamilyParams& p, int n);

struct GeneratingCheck {
  std::vector<Rational> lhs;       // n = 0..max_n, lhs[0] = 1
  std::vector<Rational> binomial;  // coefficients of (1 - z)^{-m}
  bool equal = false;
};
GeneratingCheck supertelescope_generating_check(const FamilyParams& p, int max_n);

// Coefficient of z^n in (1 - z)^{-m}: prod_{k=1}^{n} (m + k - 1) / k.
Rational closed_coeff_exact(const FamilyParams& p, int n);
double closed_coeff(const FamilyParams& p, int n);

struct NormalizationConstants {
  double prod_one_minus_alpha_sq = 0.0;  // prod (1 - alpha_n^2)
  double density_prefactor = 0.0;        // mu = prefactor (1 - cos)^m dtheta/2pi
  double Z = 0.0;                        // 1 / prefactor
};
NormalizationConstants normalization_constants(const FamilyParams& p);

// For integer m the prefactor is m! / (2m - 1)!!.
Rational density_prefactor_exact(int m);

struct FmSeriesInfo {
  int max_inner_terms = 0;       // largest inner k-sum length used
  bool tail_corrected = false;   // an inner sum was completed by its asymptotic tail
};

// F_m from the Gamma-form double sum, to order N. Integer m terminates;
// otherwise inner sums stop once terms drop below 1e-18 or after 2^20 terms
// plus an Euler-Maclaurin tail.
Series fm_series(const FamilyParams& p, int N, FmSeriesInfo* info = nullptr);
// Same double sum in exact arithmetic; m a positive integer.
ExactSeries fm_series_exact(int m, int N);
// The factorial form with (2m - 1)!!.
ExactSeries fm_integral(int m);

// Fourier coefficient c_n of the normalized measure, integer m; c_{-n} = c_n.
Rational mu_moments_closed(int m, int n);

// Fourier coefficients of (1 - cos theta)^m by expanding ((2 - z - 1/z)/2)^m.
std::vector<Rational> one_minus_cos_power_coefficients(int m);

// x^r = 2^{1-r} sum_k binom(r, k) T~_{r-2k}(x), with T~_0 = 1/2, T~_n = T_n.
// Keys are Chebyshev degrees.
std::map<int, Rational> chebyshev_expand_power(int r);
Rational chebyshev_t(int n, const Rational& x);
// Evaluates sum table[d] * T~_d(x).
Rational eval_modified_chebyshev(const std::map<int, Rational>& table, const Rational& x);
double eval_modified_chebyshev(const std::map<int, Rational>& table, double x);

// Limit of the root subgroup products for the family:
//   [[ (1 + F^*)/(2(1 - z^*)^m), (1 - F^*)/(2(1 - z^*)^m) ],
//    [ (1 - F)/(2(1 - z)^m),     (1 + F)/(2(1 - z)^m)     ]]
template <class T>
struct LimitMatrix {
  TruncatedSeries<T> top_left, top_right, bottom_left, bottom_right;
};
LimitMatrix<Complex> limit_product_matrix(const FamilyParams& p, int M);
LimitMatrix<Rational> limit_product_matrix_exact(int m, int M);

struct ConvergenceRow {
  int N = 0;
  int n = 0;
  double sum_coeff = 0.0;     // z^n coefficient of delta + gamma at level N
  double sum_target = 0.0;    // binom(m + n - 1, n)
  double delta_coeff = 0.0;
  double delta_target = 0.0;  // z^n coefficient of (1 + F)/(2 (1 - z)^m)
};

struct ConvergenceReport {
  std::vector<ConvergenceRow> rows;
  std::map<int, double> slopes;  // per n: log-log slope of |sum_coeff - sum_target| vs N
};

ConvergenceReport product_convergence(const FamilyParams& p, const std::vector<int>& levels, int max_n);

struct ErrataEntry {
  std::string id;
  std::string object;
  std::string kind;
  std::optional<int> power;
  std::string published;
  std::string computed;
  std::string note;
};

struct ErrataTable {
  int version = 0;
  std::map<std::string, std::vector<Rational>> published_examples;
  std::vector<ErrataEntry> entries;
};

const ErrataTable& errata_table();
ErrataTable parse_errata(const std::string& json_text);

}  // namespace ctk
