#include "ctk/family.hpp"

#include <cmath>
#include <numbers>

#include <nlohmann/json.hpp>

#include "ctk/errata_data.hpp"
#include "ctk/errors.hpp"
#include "ctk/rsf.hpp"
#include "ctk/special.hpp"

namespace ctk {

FamilyParams FamilyParams::exact(const Rational& beta) {
  Rational b = beta;
  b.canonicalize();
  if (b <= 0) throw DomainError("beta must be positive, got " + to_string(b));
  return FamilyParams(b.get_d(), b);
}

FamilyParams FamilyParams::real(double beta) {
  if (!(beta > 0) || !std::isfinite(beta)) throw DomainError("beta must be positive and finite");
  return FamilyParams(beta, std::nullopt);
}

const Rational& FamilyParams::beta_exact() const {
  if (!beta_exact_) throw DomainError("exact arithmetic needs a rational beta");
  return *beta_exact_;
}

Rational FamilyParams::m_exact() const {
  Rational m = 1 / beta_exact();
  m.canonicalize();
  return m;
}

std::optional<int> FamilyParams::integral_m() const {
  if (beta_exact_) {
    const Rational m = m_exact();
    if (is_integer(m) && m <= 1000) return static_cast<int>(m.get_num().get_si());
    return std::nullopt;
  }
  const double m = this->m();
  const double r = std::round(m);
  if (r >= 1 && r <= 1000 && std::abs(m - r) <= 1e-12 * r) return static_cast<int>(r);
  return std::nullopt;
}

double alpha_beta(const FamilyParams& p, int n) {
  if (n <= 0) throw DomainError("alpha_beta: n must be >= 1");
  if (p.is_exact()) return alpha_beta_exact(p, n).get_d();
  return 1.0 / (1.0 + n * p.beta());
}

Rational alpha_beta_exact(const FamilyParams& p, int n) {
  if (n <= 0) throw DomainError("alpha_beta: n must be >= 1");
  Rational a = 1 / (1 + n * p.beta_exact());
  a.canonicalize();
  return a;
}

VerblunskySequence family_alphas(const FamilyParams& p, int N) {
  std::vector<Complex> v;
  v.reserve(static_cast<std::size_t>(std::max(N, 0)));
  for (int n = 1; n <= N; ++n) v.emplace_back(alpha_beta(p, n), 0.0);
  return VerblunskySequence(std::move(v));
}

ExactVerblunsky family_alphas_exact(const FamilyParams& p, int N) {
  std::vector<Rational> v;
  v.reserve(static_cast<std::size_t>(std::max(N, 0)));
  for (int n = 1; n <= N; ++n) v.push_back(alpha_beta_exact(p, n));
  return ExactVerblunsky(std::move(v));
}

CircleMeasure family_measure(const FamilyParams& p, int check_grid) {
  const double m = p.m();
  const double pref = normalization_constants(p).density_prefactor;
  // For m < 1 the density has a cusp at theta = 0 and the trapezoid check
  // converges only like h^{1+m}; the mass tolerance is loosened accordingly.
  const double tol = m >= 1.0 ? 1e-6 : 1e-3;
  return CircleMeasure::from_density(
      [m, pref](double theta) { return pref * std::pow(std::max(0.0, 1.0 - std::cos(theta)), m); }, check_grid,
      tol);
}

// ---- super-telescoping ----------------------------------------------------
//
// Write w(k) = 1 / (k beta + 1). The pairs are peeled off from the top: with
// gaps d_u = i(u) - j(u) and j(u) = i(u+1) + e_u (e_u >= 1), the sum over the
// top u pairs is a finite combination Phi(y) = sum_k c_k w(y + k) of the
// bottom index y = i(u+1). Each step multiplies w(x) w(x + d) Phi(x + d),
// splits the product of distinct shifted w's into partial fractions whose
// coefficients sum to zero, and sums over x = y + e, e >= 1; the sum then
// telescopes to a finite one. The bottom pair sums over j(L) >= 0 the same
// way and leaves a rational number.

namespace {

using ShiftVector = std::map<int, Rational>;  // shift k -> coefficient of w(y + k)

Rational w_at(const Rational& beta, long k) {
  Rational r = 1 / (k * beta + 1);
  r.canonicalize();
  return r;
}

// prod_{a in shifts} w(x + a) = sum_a C_a w(x + a), C_a = beta^{1-|S|} prod_{b != a} 1/(b - a).
ShiftVector partial_fractions(const std::vector<int>& shifts, const Rational& beta) {
  ShiftVector out;
  for (std::size_t i = 0; i < shifts.size(); ++i) {
    Rational c = 1;
    for (std::size_t j = 0; j < shifts.size(); ++j) {
      if (j == i) continue;
      c /= beta * (shifts[j] - shifts[i]);
    }
    c.canonicalize();
    out[shifts[i]] += c;
  }
  return out;
}

// Sum over x = y + e, e >= 1, of w(x) w(x + d) Phi(x + d), as a new shift vector in y.
ShiftVector telescope_step(const ShiftVector& phi, int d, const Rational& beta) {
  ShiftVector pf;
  for (const auto& [k, ck] : phi) {
    std::vector<int> shifts{0, d};
    // w(x + d) w(x + d + k) collapses to w(x + d)^2 only when k = 0, which
    // never happens: Phi shifts are >= 1.
    shifts.push_back(d + k);
    for (const auto& [a, ca] : partial_fractions(shifts, beta)) pf[a] += ck * ca;
  }
  // sum_{e>=1} sum_a C_a w(y + e + a) = -sum_a C_a sum_{e=1}^{a} w(y + e)
  ShiftVector out;
  for (const auto& [a, ca] : pf) {
    if (ca == 0) continue;
    for (int e = 1; e <= a; ++e) out[e] -= ca;
  }
  for (auto it = out.begin(); it != out.end();) {
    it->second.canonicalize();
    it = it->second == 0 ? out.erase(it) : std::next(it);
  }
  return out;
}

// Bottom pair: sum over s >= 0 of w(s) w(s + d) Phi(s + d).
Rational telescope_final(const ShiftVector& phi, int d, const Rational& beta) {
  ShiftVector pf;
  if (phi.empty()) {
    pf = partial_fractions({0, d}, beta);
  } else {
    for (const auto& [k, ck] : phi)
      for (const auto& [a, ca] : partial_fractions({0, d, d + k}, beta)) pf[a] += ck * ca;
  }
  Rational total = 0;
  for (const auto& [a, ca] : pf)
    for (int s = 0; s < a; ++s) total -= ca * w_at(beta, s);
  total.canonicalize();
  return total;
}

Rational composition_value(const std::vector<int>& gaps, const Rational& beta) {
  // Gaps ordered from the top pair down. An empty Phi stands for the constant 1.
  ShiftVector phi;
  bool constant_one = true;
  for (std::size_t u = 0; u + 1 < gaps.size(); ++u) {
    if (constant_one) {
      ShiftVector pf = partial_fractions({0, gaps[u]}, beta);
      ShiftVector out;
      for (const auto& [a, ca] : pf)
        for (int e = 1; e <= a; ++e) out[e] -= ca;
      phi = std::move(out);
      constant_one = false;
    } else {
      phi = telescope_step(phi, gaps[u], beta);
    }
  }
  return telescope_final(constant_one ? ShiftVector{} : phi, gaps.back(), beta);
}

}  // namespace

Rational supertelescope_lhs(const FamilyParams& p, int n) {
  if (n < 1 || n > 10) throw EnumerationGuard("supertelescope: n must lie in 1..10, got " + std::to_string(n));
  const Rational& beta = p.beta_exact();
  Rational total = 0;
  // Compositions of n: bit i set means a cut after position i + 1.
  for (unsigned mask = 0; mask < (1u << (n - 1)); ++mask) {
    std::vector<int> gaps;
    int run = 1;
    for (int i = 0; i < n - 1; ++i) {
      if (mask & (1u << i)) {
        gaps.push_back(run);
        run = 1;
      } else {
        ++run;
      }
    }
    gaps.push_back(run);
    total += composition_value(gaps, beta);
  }
  total.canonicalize();
  return total;
}

Rational supertelescope_rhs(const FamilyParams& p, int n) {
  const Rational binv = 1 / p.beta_exact();
  Rational r = 1;
  for (int k = 1; k <= n; ++k) r *= binv / k + Rational(k - 1, k);
  r.canonicalize();
  return r;
}

SupertelescopeResult supertelescope_check(const FamilyParams& p, int n) {
  SupertelescopeResult r;
  r.n = n;
  r.lhs = supertelescope_lhs(p, n);
  r.rhs = supertelescope_rhs(p, n);
  r.equal = r.lhs == r.rhs;
  return r;
}

GeneratingCheck supertelescope_generating_check(const FamilyParams& p, int max_n) {
  GeneratingCheck g;
  g.lhs.push_back(1);
  for (int n = 1; n <= max_n; ++n) g.lhs.push_back(supertelescope_lhs(p, n));
  const ExactSeries b = binomial_series_exact(p.m_exact(), max_n);
  for (int n = 0; n <= max_n; ++n) g.binomial.push_back(b[n]);
  g.equal = g.lhs == g.binomial;
  return g;
}

Rational closed_coeff_exact(const FamilyParams& p, int n) {
  if (n < 0) throw DomainError("closed_coeff: n must be >= 0");
  const Rational m = p.m_exact();
  Rational r = 1;
  for (int k = 1; k <= n; ++k) r *= (m + k - 1) / k;
  r.canonicalize();
  return r;
}

double closed_coeff(const FamilyParams& p, int n) {
  if (n < 0) throw DomainError("closed_coeff: n must be >= 0");
  if (p.is_exact()) return closed_coeff_exact(p, n).get_d();
  double r = 1.0;
  for (int k = 1; k <= n; ++k) r *= (p.m() + k - 1) / k;
  return r;
}

NormalizationConstants normalization_constants(const FamilyParams& p) {
  const double m = p.m();
  const double sqrt_pi = std::sqrt(std::numbers::pi);
  const double ratio = gamma_ratio(m + 1.0, m + 0.5);
  NormalizationConstants c;
  c.prod_one_minus_alpha_sq = sqrt_pi * std::pow(2.0, -2.0 * m) * ratio;
  c.density_prefactor = sqrt_pi * std::pow(2.0, -m) * ratio;
  c.Z = 1.0 / c.density_prefactor;
  return c;
}

Rational density_prefactor_exact(int m) {
  if (m < 1) throw DomainError("density_prefactor_exact: m must be >= 1");
  Rational r(factorial(static_cast<unsigned>(m)), double_factorial(2L * m - 1));
  r.canonicalize();
  return r;
}

// ---- F_m ------------------------------------------------------------------

namespace {

constexpr int kInnerCap = 1 << 20;
constexpr double kInnerCutoff = 1e-18;

// sum_k binom(m, n+2k) binom(n+2k, k) (-1/2)^{n+2k} in doubles.
double inner_sum(double m, int n, FmSeriesInfo* info) {
  double t = binomial(m, static_cast<unsigned>(n)) * std::pow(-0.5, n);
  double s = 0.0;
  int k = 0;
  for (; k < kInnerCap; ++k) {
    s += t;
    const double a = m - n - 2.0 * k;
    const double next = t * a * (a - 1.0) / (4.0 * (k + 1.0) * (n + k + 1.0));
    if (next == 0.0) {
      ++k;
      break;
    }
    t = next;
    if (std::abs(t) < kInnerCutoff) {
      s += t;
      k += 2;
      break;
    }
  }
  if (k >= kInnerCap) {
    // Terms are eventually of one sign and decay like k^{-p}, p = m + 3/2;
    // add the Euler-Maclaurin estimate of the remaining sum.
    const double p = m + 1.5;
    const double K = kInnerCap;
    s += t * (K / (p - 1.0) - 0.5 + p / (12.0 * K));
    if (info) info->tail_corrected = true;
  }
  if (info) info->max_inner_terms = std::max(info->max_inner_terms, k);
  return s;
}

Rational inner_sum_exact(int m, int n) {
  Rational s = 0;
  for (int k = 0; n + 2 * k <= m; ++k) {
    const int j = n + 2 * k;
    Rational t = binomial(Rational(m), static_cast<unsigned>(j)) * binomial(Rational(j), static_cast<unsigned>(k));
    mpq_class pw = 1;
    for (int i = 0; i < j; ++i) pw *= Rational(-1, 2);
    s += t * pw;
  }
  s.canonicalize();
  return s;
}

}  // namespace

Series fm_series(const FamilyParams& p, int N, FmSeriesInfo* info) {
  if (N < 0) throw DomainError("fm_series: N must be >= 0");
  if (auto mi = p.integral_m()) {
    const ExactSeries e = fm_series_exact(*mi, N);
    return to_complex(e);
  }
  const double m = p.m();
  const double pref = normalization_constants(p).density_prefactor;
  std::vector<Complex> c(static_cast<std::size_t>(N) + 1);
  c[0] = 1.0;
  for (int n = 1; n <= N; ++n) c[static_cast<std::size_t>(n)] = 2.0 * pref * inner_sum(m, n, info);
  return Series(0, std::move(c), false, true);
}

ExactSeries fm_series_exact(int m, int N) {
  if (m < 1) throw DomainError("fm_series_exact: m must be a positive integer");
  if (N < 0) throw DomainError("fm_series_exact: N must be >= 0");
  const Rational pref = density_prefactor_exact(m);
  const int top = std::max(N, m);
  std::vector<Rational> c(static_cast<std::size_t>(top) + 1, Rational(0));
  c[0] = 1;
  for (int n = 1; n <= m; ++n) {
    c[static_cast<std::size_t>(n)] = 2 * pref * inner_sum_exact(m, n);
    c[static_cast<std::size_t>(n)].canonicalize();
  }
  // Degree m: the window up to max(N, m) is the whole polynomial.
  return ExactSeries::polynomial(std::move(c));
}

ExactSeries fm_integral(int m) {
  if (m < 1) throw DomainError("fm_integral: m must be a positive integer");
  const Integer mf = factorial(static_cast<unsigned>(m));
  const Rational lead = Rational(2 * mf * mf, double_factorial(2L * m - 1));
  std::vector<Rational> c(static_cast<std::size_t>(m) + 1, Rational(0));
  c[0] = 1;
  for (int n = 1; n <= m; ++n) {
    Rational s = 0;
    for (int k = 0; n + 2 * k <= m; ++k) {
      Rational t(1);
      t /= factorial(static_cast<unsigned>(m - n - 2 * k));
      t /= factorial(static_cast<unsigned>(k));
      t /= factorial(static_cast<unsigned>(n + k));
      Rational pw = 1;
      for (int i = 0; i < n + 2 * k; ++i) pw *= Rational(-1, 2);
      s += t * pw;
    }
    c[static_cast<std::size_t>(n)] = lead * s;
    c[static_cast<std::size_t>(n)].canonicalize();
  }
  return ExactSeries::polynomial(std::move(c));
}

Rational mu_moments_closed(int m, int n) {
  if (m < 1) throw DomainError("mu_moments_closed: m must be a positive integer");
  n = std::abs(n);
  if (n > m) return 0;
  if (n == 0) return 1;
  Rational c = density_prefactor_exact(m) * inner_sum_exact(m, n);
  c.canonicalize();
  return c;
}

std::vector<Rational> one_minus_cos_power_coefficients(int m) {
  if (m < 0) throw DomainError("one_minus_cos_power_coefficients: m must be >= 0");
  // Laurent coefficients of (1 - (z + 1/z)/2)^m, stored at index n + m.
  std::vector<Rational> c(static_cast<std::size_t>(2 * m) + 1, Rational(0));
  c[static_cast<std::size_t>(m)] = 1;
  const Rational h(1, 2);
  for (int step = 0; step < m; ++step) {
    std::vector<Rational> next(c.size(), Rational(0));
    for (std::size_t i = 0; i < c.size(); ++i) {
      if (c[i] == 0) continue;
      next[i] += c[i];
      if (i + 1 < c.size()) next[i + 1] -= h * c[i];
      if (i > 0) next[i - 1] -= h * c[i];
    }
    c = std::move(next);
  }
  return c;
}

// ---- Chebyshev ------------------------------------------------------------

std::map<int, Rational> chebyshev_expand_power(int r) {
  if (r < 1) throw DomainError("chebyshev_expand_power: r must be >= 1");
  std::map<int, Rational> out;
  Rational scale(1, 1);
  for (int i = 1; i < r; ++i) scale /= 2;
  for (int k = 0; 2 * k <= r; ++k) {
    Rational c = scale * binomial(Rational(r), static_cast<unsigned>(k));
    c.canonicalize();
    out[r - 2 * k] += c;
  }
  return out;
}

Rational chebyshev_t(int n, const Rational& x) {
  if (n < 0) throw DomainError("chebyshev_t: n must be >= 0");
  if (n == 0) return 1;
  Rational prev = 1, cur = x;
  for (int k = 1; k < n; ++k) {
    Rational next = 2 * x * cur - prev;
    prev = std::move(cur);
    cur = std::move(next);
  }
  cur.canonicalize();
  return cur;
}

Rational eval_modified_chebyshev(const std::map<int, Rational>& table, const Rational& x) {
  Rational s = 0;
  for (const auto& [d, c] : table) s += c * (d == 0 ? Rational(1, 2) : chebyshev_t(d, x));
  s.canonicalize();
  return s;
}

double eval_modified_chebyshev(const std::map<int, Rational>& table, double x) {
  double s = 0.0;
  for (const auto& [d, c] : table) {
    const double t = d == 0 ? 0.5 : std::cos(d * std::acos(std::clamp(x, -1.0, 1.0)));
    s += c.get_d() * t;
  }
  return s;
}

// ---- limit matrix -----------------------------------------------------------

namespace {

template <class T>
LimitMatrix<T> assemble(const TruncatedSeries<T>& F, const TruncatedSeries<T>& B, int M) {
  const auto one = TruncatedSeries<T>::constant(T(1));
  const T half = T(T(1) / T(2));
  LimitMatrix<T> L;
  L.bottom_left = scale(mul(subtract(one, F), B, M), half);
  L.bottom_right = scale(mul(add(one, F), B, M), half);
  L.top_left = star(L.bottom_right);
  L.top_right = star(L.bottom_left);
  return L;
}

}  // namespace

LimitMatrix<Complex> limit_product_matrix(const FamilyParams& p, int M) {
  if (M < 0) throw DomainError("limit_product_matrix: M must be >= 0");
  return assemble<Complex>(fm_series(p, M), binomial_series(p.m(), M), M);
}

LimitMatrix<Rational> limit_product_matrix_exact(int m, int M) {
  if (M < 0) throw DomainError("limit_product_matrix: M must be >= 0");
  return assemble<Rational>(fm_integral(m), binomial_series_exact(Rational(m), M), M);
}

ConvergenceReport product_convergence(const FamilyParams& p, const std::vector<int>& levels, int max_n) {
  if (max_n < 1) throw DomainError("product_convergence: max_n must be >= 1");
  ConvergenceReport rep;
  const auto L = limit_product_matrix(p, max_n);
  int top = 0;
  for (int N : levels) top = std::max(top, N);
  const VerblunskySequence alphas = family_alphas(p, top);
  std::map<int, std::vector<std::pair<double, double>>> pts;
  for (int N : levels) {
    if (N < max_n) throw DomainError("product_convergence: every level must be >= max_n");
    const ComplexProduct pp = partial_product(alphas, N, max_n);
    for (int n = 1; n <= max_n; ++n) {
      ConvergenceRow row;
      row.N = N;
      row.n = n;
      row.sum_coeff = (pp.delta.at(n) + pp.gamma.at(n)).real();
      row.sum_target = closed_coeff(p, n);
      row.delta_coeff = pp.delta.at(n).real();
      row.delta_target = L.bottom_right.at(n).real();
      const double dev = std::abs(row.sum_coeff - row.sum_target);
      if (dev > 0) pts[n].emplace_back(std::log(static_cast<double>(N)), std::log(dev));
      rep.rows.push_back(row);
    }
  }
  for (const auto& [n, xy] : pts) {
    if (xy.size() < 2) continue;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (const auto& [x, y] : xy) {
      sx += x;
      sy += y;
      sxx += x * x;
      sxy += x * y;
    }
    const double k = static_cast<double>(xy.size());
    const double den = k * sxx - sx * sx;
    if (den != 0) rep.slopes[n] = (k * sxy - sx * sy) / den;
  }
  return rep;
}

// ---- errata -----------------------------------------------------------------

ErrataTable parse_errata(const std::string& json_text) {
  ErrataTable t;
  try {
    const auto j = nlohmann::json::parse(json_text);
    t.version = j.at("version").get<int>();
    for (const auto& [name, coeffs] : j.at("published_examples").items()) {
      std::vector<Rational> v;
      for (const auto& c : coeffs) v.push_back(parse_rational(c.get<std::string>()));
      t.published_examples[name] = std::move(v);
    }
    for (const auto& e : j.at("entries")) {
      ErrataEntry x;
      x.id = e.at("id").get<std::string>();
      x.object = e.at("object").get<std::string>();
      x.kind = e.at("kind").get<std::string>();
      if (!e.at("power").is_null()) x.power = e.at("power").get<int>();
      x.published = e.at("published").get<std::string>();
      x.computed = e.at("computed").get<std::string>();
      x.note = e.value("note", "");
      t.entries.push_back(std::move(x));
    }
  } catch (const nlohmann::json::exception& ex) {
    throw UsageError(std::string("malformed errata table: ") + ex.what());
  }
  return t;
}

const ErrataTable& errata_table() {
  static const ErrataTable table = parse_errata(generated::kErrataJson);
  return table;
}

}  // namespace ctk
