#pragma once

// Kostant-form Toda equations for a generalized Cartan matrix, in the
// coordinates x = eps + sum (a_j h_j + b_j f_j):
//
//   da_j/dt = b_j,   db_j/dt = (sum_i a_i A_ij) b_j,
//
// with complex time, a conserved Hamiltonian, and the finite-type closed
// form through the LDU factorization of exp(t X0).

#include <Eigen/Dense>

#include <string>
#include <vector>

#include "ctk/cartan.hpp"
#include "ctk/rational.hpp"

namespace ctk {

struct TodaState {
  std::vector<Complex> a;
  std::vector<Complex> b;
  Complex t{0.0, 0.0};
};

struct TodaRhs {
  std::vector<Complex> da;
  std::vector<Complex> db;
};

TodaRhs toda_rhs(const GeneralizedCartanMatrix& g, const TodaState& s);

// H = sum_j d_j b_j - 1/2 sum_{i,j} d_j A_ij a_i a_j; needs the symmetrizer.
Complex hamiltonian(const GeneralizedCartanMatrix& g, const TodaState& s);

struct IntegratorOptions {
  double rtol = 1e-10;
  double atol = 1e-12;
  double blowup_magnitude = 1e12;
  double collapse_ratio = 1e-12;  // step collapse relative to the segment length
  long max_steps = 5'000'000;
  bool record = true;             // keep every accepted state
};

struct StepStats {
  long accepted = 0;
  long rejected = 0;
  double max_error_estimate = 0.0;
};

struct Trajectory {
  std::vector<Complex> path;
  std::vector<TodaState> states;
  std::vector<Complex> H_values;
  StepStats stats;
  bool blew_up = false;
  std::string blowup_reason;
  TodaState last;          // last reliable state
  double max_H_drift = 0.0;
};

// Dormand-Prince 5(4) along a polyline of complex times starting at x0.t.
Trajectory integrate_complex(const GeneralizedCartanMatrix& g, const TodaState& x0, const std::vector<Complex>& path,
                             const IntegratorOptions& opts = {});

// "0->1+0.5i->2" style polylines; numbers as in parse_complex.
std::vector<Complex> parse_path(const std::string& text);
// "1", "-0.5i", "1+2i", "1.5-0.25i", "i".
Complex parse_complex(const std::string& text);

struct LduFactorization {
  Eigen::MatrixXcd l;
  Eigen::MatrixXcd d;
  Eigen::MatrixXcd u;
  std::vector<Complex> minors;  // leading principal minors 1..n
  double residual = 0.0;        // |l d u - g| / |g|
};

// Doolittle elimination without pivoting; a leading minor with
// |minor_k| <= eps |g|^k raises FactorizationBoundary.
LduFactorization ldu(const Eigen::MatrixXcd& g, double eps = 1e-12);

// X0 = eps + sum a_j h_j + b_j f_j in the defining representation of sl(n+1).
Eigen::MatrixXcd sl_matrix(const TodaState& s);
// Reads a_j (partial sums of the diagonal) and b_j (subdiagonal) back.
TodaState sl_coordinates(const Eigen::MatrixXcd& x);

// x(t) = l(t)^{-1} X0 l(t) with exp(t X0) = l d u, no sign adjustment.
TodaState adjoint_flow(const TodaState& x0, Complex t);

// Solution of the displayed system for A of type A_n, from the adjoint flow
// started at (-a0, -b0) and negated; t is stored in the result.
TodaState finite_solution(const TodaState& x0, Complex t);

}  // namespace ctk
