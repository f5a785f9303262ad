#pragma once

// Leading-order pole analysis of the Toda system: exact balances with their
// Kovalevskaya exponents, and a numerical scan that locates movable
// singularities in complex time and fits their local behaviour.

#include <optional>
#include <string>
#include <vector>

#include "ctk/cartan.hpp"
#include "ctk/exact_linalg.hpp"
#include "ctk/toda.hpp"

namespace ctk {

struct KovalevskayaExponent {
  std::optional<QuadraticSurd> exact;  // absent when lambda is irrational of degree > 1 or numeric
  Complex value;
  bool integer = false;
  std::string text;
};

// a_j ~ c_j / (t - t0) for j in the support S, with sum_{i in S} A_ij c_i = -2.
struct Balance {
  std::vector<int> support;
  std::vector<Rational> residues;         // aligned with support
  std::vector<std::pair<int, Rational>> off_support_rho;  // b_j ~ (t - t0)^rho_j for j not in S
  std::vector<std::string> lambdas;       // eigenvalues of the linearization, as text
  std::vector<KovalevskayaExponent> exponents;
  bool all_integer = false;               // exponents and off-support rho
};

struct BalanceReport {
  std::vector<Balance> balances;
  bool has_full_balance = false;
  std::vector<std::vector<int>> singular_supports;  // A_S singular: no balance on S
};

// Exhaustive over the 2^n - 1 supports (n <= 12); exact arithmetic.
BalanceReport balances_and_exponents(const GeneralizedCartanMatrix& g);

enum class Verdict { IntegerResonant, NonInteger, Inconclusive };
std::string to_string(Verdict v);

struct Region {
  Complex lo;  // lower-left corner
  Complex hi;  // upper-right corner
};

struct ScanOptions {
  int grid = 8;         // grid x grid ray targets over the region
  double rtol = 1e-11;
  double atol = 1e-13;
  int threads = 1;
  // Fitting window in log10 |t - t0|; the scan narrows it for poles that
  // have close neighbours.
  double fit_lo = -4.0;
  double fit_hi = -1.5;
};

struct SingularityReport {
  Complex t0;
  double t0_uncertainty = 0.0;
  std::vector<int> support;
  std::vector<Complex> residues;       // aligned with support
  std::vector<double> exponents_a;     // fitted, one per node
  std::vector<double> exponents_b;
  double fit_residual = 0.0;           // RMS of the log-log fits
  double residue_law = 0.0;            // max_j in S |sum_i A_ij c_i + 2|
  std::optional<Balance> balance;
  Verdict verdict = Verdict::Inconclusive;
  TodaState near_state;                // state at the inner end of the fit window
};

// Local analysis of one singularity, starting from a state close to it.
std::optional<SingularityReport> analyze_near(const GeneralizedCartanMatrix& g, const TodaState& seed,
                                              const BalanceReport& balances, const ScanOptions& opts = {});

std::vector<SingularityReport> singularity_scan(const GeneralizedCartanMatrix& g, const TodaState& x0,
                                                const Region& region, const ScanOptions& opts = {});

Region parse_region(const std::string& text);  // "re0,im0,re1,im1"

}  // namespace ctk
