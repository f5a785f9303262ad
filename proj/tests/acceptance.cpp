// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <sstream>
#include <string>

#include "ctk/cartan.hpp"
#include "ctk/family.hpp"
#include "ctk/opuc.hpp"
#include "ctk/rsf.hpp"
#include "ctk/singularity.hpp"
#include "ctk/toda.hpp"
#include "support.hpp"

using namespace ctk;
using ctk::testing::Gen;
using ctk::testing::Q;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream detail;
  void require(bool ok, const std::string& what) {
    if (!ok) {
      if (pass) detail << " first failure: " << what << ";";
      pass = false;
    }
  }
};

// Fourier coefficients c_0..c_m of (1 - cos)^m from (1 - (z + 1/z)/2)^m.
std::vector<Rational> cos_power_fourier(int m) {
  std::map<int, Rational> p{{0, Rational(1)}};
  for (int k = 0; k < m; ++k) {
    std::map<int, Rational> q;
    for (const auto& [e, c] : p) {
      q[e] += c;
      q[e + 1] -= c / 2;
      q[e - 1] -= c / 2;
    }
    p = q;
  }
  std::vector<Rational> out;
  for (int n = 0; n <= m; ++n) out.push_back(p[n]);
  return out;
}

void criterion1(Outcome& o) {
  double worst = 0;
  for (const auto& beta : {Q(1), Q(2), Q(1, 2)}) {
    const auto p = FamilyParams::exact(beta);
    const auto r = verblunsky_forward(family_measure(p), 20, 8192);
    for (int n = 1; n <= 20; ++n) worst = std::max(worst, std::abs(r.alpha(n) - alpha_beta(p, n)));
  }
  o.detail << " max |alpha_n - 1/(1+n beta)| = " << worst;
  o.require(worst <= 1e-8, "forward error above 1e-8");
}

void criterion2(Outcome& o) {
  int checks = 0;
  for (const auto& beta : {Q(1, 3), Q(1, 2), Q(1), Q(2), Q(3)}) {
    const auto p = FamilyParams::exact(beta);
    for (int n = 1; n <= 8; ++n) {
      o.require(supertelescope_check(p, n).equal, "supertelescope beta=" + to_string(beta) + " n=" + std::to_string(n));
      ++checks;
    }
    o.require(supertelescope_generating_check(p, 8).equal, "generating function beta=" + to_string(beta));
  }
  o.detail << " " << checks << " exact identities plus 5 generating-function checks";
}

void criterion3(Outcome& o) {
  const auto one = FamilyParams::exact(1);
  const auto exact = family_alphas_exact(one, 400);
  for (int N : {1, 2, 5, 10, 50, 100, 400}) {
    const auto pp = partial_product(exact, N, 2);
    o.require(pp.delta.at(1) + pp.gamma.at(1) == 1 - Q(1, N + 1), "n=1 exact value at N=" + std::to_string(N));
  }
  const int max_n = 6;
  const auto rep = product_convergence(one, {50, 100, 200, 400, 800, 1600}, max_n);
  double worst_ratio = 0;
  for (const auto& r : rep.rows) {
    const double bound = 1.05 * r.n / (r.N + 1);
    worst_ratio = std::max(worst_ratio, std::abs(r.sum_coeff - r.sum_target) / bound);
  }
  o.require(worst_ratio <= 1.0, "beta=1 error exceeds 1.05 n/(N+1)");
  o.detail << " beta=1: max |coeff-1| / (1.05 n/(N+1)) = " << worst_ratio << ";";
  const auto two = product_convergence(FamilyParams::exact(Q(1, 2)), {100, 200, 400, 800, 1600}, 4);
  double last_err = 0;
  for (const auto& r : two.rows)
    if (r.N == 1600) last_err = std::max(last_err, std::abs(r.sum_coeff - (r.n + 1)));
  o.detail << " beta=1/2: max error at N=1600 " << last_err << ", slopes";
  for (const auto& [n, s] : two.slopes) {
    o.detail << " n" << n << ":" << s;
    o.require(s < -0.9 && s > -1.1, "beta=1/2 convergence slope not O(1/N)");
  }
}

void criterion4(Outcome& o) {
  const std::vector<std::vector<Rational>> printed = {
      {1, -1}, {1, Q(-4, 3), Q(1, 3)}, {1, Q(-15, 10), Q(6, 10), Q(-1, 10)}};
  for (int m = 1; m <= 3; ++m) {
    const auto f = fm_series_exact(m, m);
    for (int n = 0; n <= m; ++n) o.require(f.at(n) == printed[m - 1][n], "printed F_" + std::to_string(m));
  }
  const auto c = cos_power_fourier(4);
  const auto f4 = fm_series_exact(4, 4);
  const std::vector<Rational> oracle4 = {1, Q(-56, 35), Q(28, 35), Q(-8, 35), Q(1, 35)};
  for (int n = 0; n <= 4; ++n) {
    o.require(f4.at(n) == oracle4[n], "F_4 vs stated oracle");
    if (n > 0) o.require(f4.at(n) == 2 * c[n] / c[0], "F_4 vs Fourier expansion");
  }
  int logged = 0;
  for (const auto& e : errata_table().entries)
    if (e.object == "F_4" && e.kind == "coefficient") {
      ++logged;
      o.detail << " errata F_4 z^" << *e.power << ": published " << e.published << ", computed " << e.computed << ";";
      o.require(parse_rational(e.computed) == f4.at(*e.power), "errata computed value");
    }
  o.require(logged == 2, "both F_4 discrepancies in the errata table");
  for (int m = 1; m <= 6; ++m) {
    const auto a = fm_series_exact(m, m + 2), b = fm_integral(m);
    for (int n = 0; n <= m + 2; ++n) o.require(a.at(n) == b.at(n), "Gamma form vs integral form m=" + std::to_string(m));
  }
  o.detail << " F_1..F_3 match print, F_4 matches oracle, forms agree m=1..6";
}

void criterion5(Outcome& o) {
  double worst = 0;
  for (int m = 1; m <= 4; ++m) {
    const auto q = moments_quadrature(family_measure(FamilyParams::exact(Q(1, m))), 10, 8192);
    const auto F = fm_integral(m);
    for (int n = 1; n <= 10; ++n) {
      const Rational c = mu_moments_closed(m, n);
      worst = std::max(worst, std::abs(q.c[n] - c.get_d()));
      o.require(F.at(n) == 2 * c, "F_m coefficient = 2 c_n");
    }
  }
  o.detail << " max |closed - quadrature| = " << worst;
  o.require(worst <= 1e-10, "moments above 1e-10");
}

void criterion6(Outcome& o) {
  const int N = 1000;
  const auto d = rsf_density(family_alphas(FamilyParams::exact(1), N), N, 4096, 4);
  double worst = 0;
  for (std::size_t k = 0; k < d.theta.size(); ++k)
    if (d.theta[k] >= 0.3 && d.theta[k] <= 2 * M_PI - 0.3)
      worst = std::max(worst, std::abs(d.density[k] - (1 - std::cos(d.theta[k]))));
  const Rational at_one = sum_at_one_exact(family_alphas_exact(FamilyParams::exact(1), N), N);
  const auto diag = circle_sup_diagnostic(family_alphas(FamilyParams::exact(1), N), N, 64);
  o.detail << " sup distance " << worst << ", mass " << d.mass << ", |delta+gamma|(1) = " << to_string(at_one);
  o.require(worst <= 1e-2, "density distance above 1e-2");
  o.require(std::abs(d.mass - 1) <= 2e-2, "mass off by more than 2e-2");
  o.require(at_one == Q(N + 2, 2), "value at one");
  o.require(std::abs(diag.value_at_one[N] - (N + 2) / 2.0) < 1e-9, "diagnostic value at one");
}

void criterion7(Outcome& o) {
  const auto a1 = validate_gcm({{2}});
  const TodaState x0{{0.0}, {1.0}, 0.0};
  IntegratorOptions io;
  io.rtol = 1e-12;
  io.atol = 1e-14;
  const auto tr = integrate_complex(a1, x0, {0.0, 1.4}, io);
  double err = 0;
  for (const auto& s : tr.states) {
    const double t = s.t.real();
    err = std::max({err, std::abs(s.a[0] - std::tan(t)), std::abs(s.b[0] - 1 / std::pow(std::cos(t), 2))});
  }
  o.require(!tr.blew_up && err <= 1e-8, "tan/sec^2 closed form");
  o.require(tr.max_H_drift <= 1e-9, "Hamiltonian drift");
  o.detail << " closed-form error " << err << ", H drift " << tr.max_H_drift << " (rtol 1e-12);";

  ScanOptions so;
  so.grid = 4;
  const auto reps = singularity_scan(a1, x0, parse_region("1,-1,2,1"), so);
  if (reps.empty()) {
    o.require(false, "no singularity found near pi/2");
  } else {
    const auto& r = reps.front();
    o.detail << " t0 - pi/2 = " << std::abs(r.t0 - M_PI / 2) << ", exponents " << r.exponents_a[0] << "/"
             << r.exponents_b[0] << ", residue " << r.residues.at(0).real() << ";";
    o.require(std::abs(r.t0 - M_PI / 2) <= 1e-6, "t0");
    o.require(std::abs(r.exponents_a[0] + 1) <= 0.02 && std::abs(r.exponents_b[0] + 2) <= 0.02, "exponents");
    o.require(std::abs(r.residues.at(0) + 1.0) <= 0.01, "residue");
  }

  const auto a2 = validate_gcm(cartan_type_a(2));
  Gen g(20240611);
  double worst = 0;
  for (int seed = 0; seed < 20; ++seed) {
    TodaState s;
    for (int j = 0; j < 2; ++j) {
      s.a.push_back(g.uniform(-0.5, 0.5));
      s.b.push_back(g.uniform(-0.5, 0.5));
    }
    for (double t : {0.1, 0.2, 0.3, 0.4}) {
      IntegratorOptions opt;
      opt.rtol = 1e-11;
      opt.record = false;
      const auto num = integrate_complex(a2, s, {0.0, t}, opt);
      const auto ref = finite_solution(s, t);
      for (int j = 0; j < 2; ++j)
        worst = std::max({worst, std::abs(num.last.a[j] - ref.a[j]), std::abs(num.last.b[j] - ref.b[j])});
    }
  }
  o.detail << " A2 oracle max diff " << worst;
  o.require(worst <= 1e-6, "A2 oracle vs integrator");
}

bool has_exponents(const Balance& b, const std::vector<std::string>& want) {
  std::vector<std::string> have;
  for (const auto& e : b.exponents) have.push_back(e.text);
  std::sort(have.begin(), have.end());
  auto w = want;
  std::sort(w.begin(), w.end());
  return have == w;
}

const Balance* full_balance(const BalanceReport& r, int n) {
  for (const auto& b : r.balances)
    if (static_cast<int>(b.support.size()) == n) return &b;
  return nullptr;
}

void criterion8(Outcome& o) {
  const auto a2 = balances_and_exponents(validate_gcm({{2, -1}, {-1, 2}}));
  const auto* f = full_balance(a2, 2);
  o.require(f && has_exponents(*f, {"-1", "2", "-2", "3"}) && f->all_integer, "A2 exponents");
  const auto hyp = balances_and_exponents(validate_gcm({{2, -3}, {-3, 2}}));
  f = full_balance(hyp, 2);
  o.require(f && has_exponents(*f, {"-1", "2", "(1+i*sqrt(39))/2", "(1-i*sqrt(39))/2"}) && !f->all_integer,
            "hyperbolic exponents");
  const auto aff = balances_and_exponents(validate_gcm({{2, -2}, {-2, 2}}));
  bool singles = aff.balances.size() == 2;
  for (const auto& b : aff.balances) singles = singles && b.residues == std::vector<Rational>{-1};
  o.require(!aff.has_full_balance && singles, "affine: no full balance, c = -1 on single nodes");
  o.detail << " A2 {-1,2,-2,3}; hyperbolic {-1,2,(1+-i*sqrt(39))/2} non-integer; affine no full balance";
}

void criterion9(Outcome& o) {
  for (long k = 1; k <= 4; ++k)
    for (long l = 1; l <= 4; ++l)
      o.require(validate_and_classify({{2, -k}, {-l, 2}}).cls == rank2_rule(k, l), "rank 2 rule");
  for (int n = 1; n <= 4; ++n) o.require(validate_and_classify(cartan_type_a(n)).cls == CartanClass::Finite, "A_n finite");
  o.detail << " 16 rank-2 matrices and A1..A4";
}

void criterion10(Outcome& o) {
  Gen g(10);
  int cases = 0;
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<Complex> c;
    for (int i = 0; i < 8; ++i) c.push_back(g.in_disk(2.0));
    const auto f = Series::polynomial(c, g.integer(-5, 5));
    o.require(star(star(f)) == f, "star involution");
    const int N = g.integer(1, 12);
    const VerblunskySequence a(g.disk_sequence(N, 0.9));
    double prod = 1;
    for (const auto& x : a.values) prod *= 1 - std::norm(x);
    for (int k = 0; k < 16; ++k) {
      const Mat2 m = product_matrix_at(a, N, std::polar(1.0, 2 * M_PI * k / 16));
      const double scale = std::norm(m.a22) + std::norm(m.a21);
      o.require(std::abs(std::norm(m.a22) - std::norm(m.a21) - prod) <= 1e-10 * scale, "determinant identity");
    }
    const auto pp = partial_product(a, N, 40);
    o.require(schur_disk_max(schur_function(pp).series) <= 1 + 1e-9, "Schur bound");
    o.require(caratheodory_disk_min_real(caratheodory_function(pp).series) > 0, "Re F > 0");
    const int n = g.integer(1, 6);
    o.require(delta_identity_residual(partial_product(ExactVerblunsky(g.rational_sequence(n, 8)), n, 10)).exactly_zero,
              "exact Lemma residual");
    ++cases;
  }
  double worst = 0;
  for (int trial = 0; trial < 20; ++trial) {
    const int N = g.integer(2, 16);
    const VerblunskySequence a(g.disk_sequence(N, 0.5));
    const auto r = verblunsky_forward(bernstein_szego_density(a, 32768), N / 2, 32768);
    for (int k = 1; k <= N / 2; ++k) worst = std::max(worst, std::abs(r.alpha(k) - a(k)));
  }
  o.require(worst <= 1e-6, "roundtrip");
  o.detail << " " << cases << " random cases per product property, roundtrip max error " << worst;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<void(Outcome&)>>> criteria = {
      {"forward map on the beta family", criterion1},
      {"super-telescoping identity", criterion2},
      {"partial products converge", criterion3},
      {"F_m polynomials and errata", criterion4},
      {"closed-form moments", criterion5},
      {"density reconstruction from products", criterion6},
      {"finite-type Toda", criterion7},
      {"exact Kovalevskaya exponents", criterion8},
      {"Cartan classification", criterion9},
      {"property suites", criterion10},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      criteria[i].second(o);
    } catch (const std::exception& e) {
      o.require(false, std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (!o.pass) ++failed;
    std::printf("%s criterion %zu (%s) [%.2fs]:%s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(), secs,
                o.detail.str().c_str());
  }
  return failed == 0 ? 0 : 1;
}
