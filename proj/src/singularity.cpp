#include "ctk/singularity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>
#include <sstream>
#include <thread>

#include "ctk/errors.hpp"

namespace ctk {

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::IntegerResonant: return "integer-resonant";
    case Verdict::NonInteger: return "non-integer";
    case Verdict::Inconclusive: return "inconclusive";
  }
  return "?";
}

namespace {

bool is_integral(const QuadraticSurd& s) { return s.is_rational() && s.a.get_den() == 1; }

void add_exponents(const QuadraticSurd& lambda, std::vector<KovalevskayaExponent>& out) {
  if (lambda.is_rational()) {
    // r(r - 1) = lambda
    const Rational D = 1 + 4 * lambda.a;
    for (int sgn : {1, -1}) {
      KovalevskayaExponent e;
      e.exact = make_surd(Rational(1, 2), Rational(sgn, 2), D);
      e.value = e.exact->value();
      e.integer = is_integral(*e.exact);
      e.text = e.exact->to_string();
      out.push_back(std::move(e));
    }
    return;
  }
  // Irrational lambda cannot give an integer r, since then lambda = r(r - 1).
  const Complex root = std::sqrt(1.0 + 4.0 * lambda.value());
  for (int sgn : {1, -1}) {
    KovalevskayaExponent e;
    e.value = 0.5 * (1.0 + static_cast<double>(sgn) * root);
    e.integer = false;
    e.text = std::string("(1") + (sgn > 0 ? "+" : "-") + "sqrt(1+4*(" + lambda.to_string() + ")))/2";
    out.push_back(std::move(e));
  }
}

void add_numeric_exponents(Complex lambda, std::vector<KovalevskayaExponent>& out) {
  const Complex root = std::sqrt(1.0 + 4.0 * lambda);
  for (int sgn : {1, -1}) {
    KovalevskayaExponent e;
    e.value = 0.5 * (1.0 + static_cast<double>(sgn) * root);
    e.integer = false;
    std::ostringstream os;
    os.precision(17);
    os << "~" << e.value.real() << (e.value.imag() < 0 ? "-" : "+") << std::abs(e.value.imag()) << "i";
    e.text = os.str();
    out.push_back(std::move(e));
  }
}

}  // namespace

BalanceReport balances_and_exponents(const GeneralizedCartanMatrix& g) {
  if (g.n > 12) throw EnumerationGuard("balance enumeration refuses rank > 12");
  BalanceReport rep;
  const RationalMatrix A = to_rational(g.A);
  for (unsigned mask = 1; mask < (1u << g.n); ++mask) {
    std::vector<int> S;
    for (int i = 0; i < g.n; ++i)
      if (mask & (1u << i)) S.push_back(i);
    const int k = static_cast<int>(S.size());
    // Rows j in S, columns i in S: A_ij.
    RationalMatrix At(static_cast<std::size_t>(k), std::vector<Rational>(static_cast<std::size_t>(k)));
    for (int r = 0; r < k; ++r)
      for (int c = 0; c < k; ++c) At[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)] = A[S[c]][S[r]];
    auto c = solve(At, std::vector<Rational>(static_cast<std::size_t>(k), Rational(-2)));
    if (!c) {
      rep.singular_supports.push_back(S);
      continue;
    }
    Balance b;
    b.support = S;
    b.residues = *c;
    bool integral = true;
    for (int j = 0; j < g.n; ++j) {
      if (std::find(S.begin(), S.end(), j) != S.end()) continue;
      Rational rho = 0;
      for (int r = 0; r < k; ++r) rho += (*c)[static_cast<std::size_t>(r)] * A[S[r]][j];
      rho.canonicalize();
      if (rho.get_den() != 1) integral = false;
      b.off_support_rho.emplace_back(j, rho);
    }
    // M = -diag(c) (A_S)^T
    RationalMatrix M(static_cast<std::size_t>(k), std::vector<Rational>(static_cast<std::size_t>(k)));
    for (int r = 0; r < k; ++r)
      for (int q = 0; q < k; ++q)
        M[static_cast<std::size_t>(r)][static_cast<std::size_t>(q)] = -(*c)[static_cast<std::size_t>(r)] * At[r][q];
    const PolyRoots roots = poly_roots(char_poly(M));
    for (const auto& l : roots.exact) {
      b.lambdas.push_back(l.to_string());
      add_exponents(l, b.exponents);
    }
    for (const auto& l : roots.numeric) {
      std::ostringstream os;
      os.precision(17);
      os << "~" << l.real() << (l.imag() < 0 ? "-" : "+") << std::abs(l.imag()) << "i";
      b.lambdas.push_back(os.str());
      add_numeric_exponents(l, b.exponents);
    }
    for (const auto& e : b.exponents)
      if (!e.integer) integral = false;
    b.all_integer = integral;
    if (k == g.n) rep.has_full_balance = true;
    rep.balances.push_back(std::move(b));
  }
  return rep;
}

namespace {

int dominant(const TodaState& s) {
  int j = 0;
  for (int i = 1; i < static_cast<int>(s.a.size()); ++i)
    if (std::abs(s.a[static_cast<std::size_t>(i)]) > std::abs(s.a[static_cast<std::size_t>(j)])) j = i;
  return j;
}

// Newton-type estimate: with L = a_j / b_j, L' = 1 - a_j rho_j / b_j and
// t0 = t - L / L', exact for any pure power law a_j = c (t - t0)^p.
std::optional<Complex> pole_estimate(const GeneralizedCartanMatrix& g, const TodaState& s) {
  const int j = dominant(s);
  const Complex aj = s.a[static_cast<std::size_t>(j)], bj = s.b[static_cast<std::size_t>(j)];
  if (std::abs(bj) == 0.0) return std::nullopt;
  Complex rho = 0.0;
  for (int i = 0; i < g.n; ++i) rho += s.a[static_cast<std::size_t>(i)] * static_cast<double>(g.at(i, j));
  const Complex L = aj / bj;
  const Complex Lp = 1.0 - aj * rho / bj;
  if (std::abs(Lp) < 1e-14) return std::nullopt;
  const Complex t0 = s.t - L / Lp;
  if (!std::isfinite(t0.real()) || !std::isfinite(t0.imag())) return std::nullopt;
  return t0;
}

std::optional<TodaState> move_to(const GeneralizedCartanMatrix& g, const TodaState& s, Complex target,
                                 const ScanOptions& opts) {
  IntegratorOptions io;
  io.rtol = opts.rtol;
  io.atol = opts.atol;
  io.record = false;
  TodaState start = s;
  const Trajectory tr = integrate_complex(g, start, {s.t, target}, io);
  if (tr.blew_up) return std::nullopt;
  return tr.last;
}

struct Fit {
  double slope = 0.0;
  double rms = 0.0;
};

Fit linear_fit(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  Fit f;
  const double den = n * sxx - sx * sx;
  if (den == 0) return f;
  f.slope = (n * sxy - sx * sy) / den;
  const double icpt = (sy - f.slope * sx) / n;
  double ss = 0;
  for (std::size_t i = 0; i < x.size(); ++i) ss += std::pow(y[i] - icpt - f.slope * x[i], 2);
  f.rms = std::sqrt(ss / n);
  return f;
}

// Intercept of the complex least-squares line y = c + k x.
Complex complex_intercept(const std::vector<Complex>& x, const std::vector<Complex>& y) {
  const double n = static_cast<double>(x.size());
  Complex sx = 0, sy = 0;
  double sxx = 0;
  Complex sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += std::norm(x[i]);
    sxy += std::conj(x[i]) * y[i];
  }
  // Normal equations: [n, sum x; sum conj x, sum |x|^2] [c; k] = [sum y; sum conj(x) y]
  const Complex sxc = std::conj(sx);
  const Complex det = n * sxx - sx * sxc;
  if (std::abs(det) == 0.0) return sy / n;
  return (sy * sxx - sx * sxy) / det;
}

bool near_integer(double v, double tol) { return std::abs(v - std::round(v)) <= tol; }

}  // namespace

std::optional<SingularityReport> analyze_near(const GeneralizedCartanMatrix& g, const TodaState& seed,
                                              const BalanceReport& balances, const ScanOptions& opts) {
  TodaState s = seed;
  std::optional<Complex> est = pole_estimate(g, s);
  if (!est) return std::nullopt;
  // Approach the estimate, shrinking the distance tenfold per step down to
  // ten times the inner end of the fit window, then once more to the end.
  const double inner = std::pow(10.0, opts.fit_lo);
  std::optional<Complex> prev;
  for (int it = 0; it < 60; ++it) {
    const double d = std::abs(*est - s.t);
    if (d > 1.0 || d == 0.0) return std::nullopt;
    if (d <= 10.001 * inner) break;
    const double target_d = std::max(0.1 * d, 10.0 * inner);
    const Complex target = *est + (s.t - *est) * (target_d / d);
    auto ns = move_to(g, s, target, opts);
    if (!ns) return std::nullopt;
    s = *ns;
    est = pole_estimate(g, s);
    if (!est) return std::nullopt;
  }
  if (std::abs(*est - s.t) > 11.0 * inner) return std::nullopt;
  prev = est;
  {
    const double d = std::abs(*est - s.t);
    const Complex target = *est + (s.t - *est) * (inner / d);
    auto ns = move_to(g, s, target, opts);
    if (!ns) return std::nullopt;
    s = *ns;
    est = pole_estimate(g, s);
    if (!est) return std::nullopt;
  }
  SingularityReport rep;
  rep.t0 = *est;
  rep.t0_uncertainty = std::abs(*est - *prev);
  rep.near_state = s;

  // Sample outward along the approach ray over the fit window.
  const Complex w = (s.t - rep.t0) / std::abs(s.t - rep.t0);
  std::vector<double> lx;
  std::vector<Complex> tau;
  std::vector<TodaState> samples;
  constexpr int kSamples = 26;
  for (int k = 0; k < kSamples; ++k) {
    const double x = opts.fit_lo + (opts.fit_hi - opts.fit_lo) * k / (kSamples - 1);
    const Complex target = rep.t0 + w * std::pow(10.0, x);
    auto ns = move_to(g, s, target, opts);
    if (!ns) return std::nullopt;
    s = *ns;
    samples.push_back(s);
    tau.push_back(s.t - rep.t0);
    lx.push_back(std::log(std::abs(s.t - rep.t0)));
  }
  double ss = 0.0;
  int nfits = 0;
  for (int j = 0; j < g.n; ++j) {
    std::vector<double> la, lb;
    for (const auto& st : samples) {
      la.push_back(std::log(std::max(std::abs(st.a[static_cast<std::size_t>(j)]), 1e-300)));
      lb.push_back(std::log(std::max(std::abs(st.b[static_cast<std::size_t>(j)]), 1e-300)));
    }
    const Fit fa = linear_fit(lx, la), fb = linear_fit(lx, lb);
    rep.exponents_a.push_back(fa.slope);
    rep.exponents_b.push_back(fb.slope);
    ss += fa.rms * fa.rms + fb.rms * fb.rms;
    nfits += 2;
  }
  rep.fit_residual = std::sqrt(ss / std::max(nfits, 1));
  for (int j = 0; j < g.n; ++j) {
    if (rep.exponents_a[static_cast<std::size_t>(j)] > -0.5) continue;
    rep.support.push_back(j);
    std::vector<Complex> y;
    for (std::size_t k = 0; k < samples.size(); ++k) y.push_back(tau[k] * samples[k].a[static_cast<std::size_t>(j)]);
    rep.residues.push_back(complex_intercept(tau, y));
  }
  if (rep.support.empty()) return std::nullopt;
  for (std::size_t r = 0; r < rep.support.size(); ++r) {
    Complex sum = 2.0;
    for (std::size_t q = 0; q < rep.support.size(); ++q)
      sum += static_cast<double>(g.at(rep.support[q], rep.support[r])) * rep.residues[q];
    rep.residue_law = std::max(rep.residue_law, std::abs(sum));
  }
  for (const auto& b : balances.balances)
    if (b.support == rep.support) rep.balance = b;

  bool fitted_integral = true;
  for (int j = 0; j < g.n; ++j)
    if (!near_integer(rep.exponents_a[static_cast<std::size_t>(j)], 0.05) ||
        !near_integer(rep.exponents_b[static_cast<std::size_t>(j)], 0.05))
      fitted_integral = false;
  if (rep.balance) {
    if (rep.balance->all_integer && fitted_integral && rep.residue_law <= 0.05)
      rep.verdict = Verdict::IntegerResonant;
    else if (!rep.balance->all_integer)
      rep.verdict = Verdict::NonInteger;
    else
      rep.verdict = Verdict::Inconclusive;
  } else {
    rep.verdict = fitted_integral ? Verdict::Inconclusive : Verdict::NonInteger;
  }
  return rep;
}

std::vector<SingularityReport> singularity_scan(const GeneralizedCartanMatrix& g, const TodaState& x0,
                                                const Region& region, const ScanOptions& opts) {
  if (opts.grid < 1) throw DomainError("singularity_scan: grid must be >= 1");
  const BalanceReport balances = balances_and_exponents(g);
  std::vector<Complex> targets;
  for (int i = 0; i < opts.grid; ++i)
    for (int k = 0; k < opts.grid; ++k) {
      const double fx = opts.grid == 1 ? 0.5 : static_cast<double>(i) / (opts.grid - 1);
      const double fy = opts.grid == 1 ? 0.5 : static_cast<double>(k) / (opts.grid - 1);
      const Complex t(region.lo.real() + fx * (region.hi.real() - region.lo.real()),
                      region.lo.imag() + fy * (region.hi.imag() - region.lo.imag()));
      if (std::abs(t - x0.t) > 1e-12) targets.push_back(t);
    }

  std::vector<std::vector<SingularityReport>> per_ray(targets.size());
  auto work = [&](std::size_t r) {
    IntegratorOptions io;
    io.rtol = opts.rtol;
    io.atol = opts.atol;
    const Trajectory tr = integrate_complex(g, x0, {x0.t, targets[r]}, io);
    std::vector<TodaState> seeds;
    if (tr.blew_up) {
      // Back off from the blow-up point; the approach is redone under control.
      TodaState sd = tr.last;
      for (auto it = tr.states.rbegin(); it != tr.states.rend(); ++it)
        if (std::abs(it->t - tr.last.t) >= 0.05) {
          sd = *it;
          break;
        }
      seeds.push_back(sd);
    }
    // A ray passing near a pole shows a local maximum of |a|; the Newton
    // estimate tells whether the pole is close enough to chase.
    auto amp = [&](const TodaState& st) { return std::abs(st.a[static_cast<std::size_t>(dominant(st))]); };
    for (std::size_t k = 1; k + 1 < tr.states.size(); ++k) {
      const double v = amp(tr.states[k]);
      if (v <= 2.0 || v < amp(tr.states[k - 1]) || v < amp(tr.states[k + 1])) continue;
      const auto est = pole_estimate(g, tr.states[k]);
      if (est && std::abs(*est - tr.states[k].t) < 0.5) seeds.push_back(tr.states[k]);
    }
    for (const auto& sd : seeds) {
      try {
        if (auto rep = analyze_near(g, sd, balances, opts)) per_ray[r].push_back(std::move(*rep));
      } catch (const Error&) {
      }
    }
  };
  const int nthreads = std::max(1, std::min<int>(opts.threads, static_cast<int>(targets.size())));
  std::vector<std::thread> pool;
  std::size_t next = 0;
  std::mutex mu;
  for (int w = 0; w < nthreads; ++w)
    pool.emplace_back([&] {
      while (true) {
        std::size_t r;
        {
          std::lock_guard<std::mutex> lock(mu);
          if (next >= targets.size()) return;
          r = next++;
        }
        work(r);
      }
    });
  for (auto& th : pool) th.join();

  // Merge duplicates in ray order so the output does not depend on scheduling.
  // Only poles inside the region are reported.
  const double xlo = std::min(region.lo.real(), region.hi.real()), xhi = std::max(region.lo.real(), region.hi.real());
  const double ylo = std::min(region.lo.imag(), region.hi.imag()), yhi = std::max(region.lo.imag(), region.hi.imag());
  std::vector<SingularityReport> out;
  for (auto& reps : per_ray)
    for (auto& rep : reps) {
      if (rep.t0.real() < xlo || rep.t0.real() > xhi || rep.t0.imag() < ylo || rep.t0.imag() > yhi) continue;
      bool dup = false;
      for (auto& o : out)
        if (std::abs(o.t0 - rep.t0) < 1e-5) {
          if (rep.t0_uncertainty < o.t0_uncertainty) o = rep;
          dup = true;
          break;
        }
      if (!dup) out.push_back(std::move(rep));
    }
  // Poles with a neighbour closer than ten times the outer end of the window
  // are refitted on a window scaled down to a tenth of that distance.
  for (std::size_t k = 0; k < out.size(); ++k) {
    double d = std::numeric_limits<double>::infinity();
    for (std::size_t q = 0; q < out.size(); ++q)
      if (q != k) d = std::min(d, std::abs(out[q].t0 - out[k].t0));
    if (std::pow(10.0, opts.fit_hi) <= 0.1 * d) continue;
    ScanOptions narrow = opts;
    narrow.fit_hi = std::log10(0.1 * d);
    narrow.fit_lo = std::max(std::min(opts.fit_lo, narrow.fit_hi - 2.5), -7.0);
    if (narrow.fit_hi - narrow.fit_lo < 1.0) {
      out[k].verdict = Verdict::Inconclusive;
      continue;
    }
    try {
      if (auto rep = analyze_near(g, out[k].near_state, balances, narrow)) out[k] = std::move(*rep);
    } catch (const Error&) {
    }
  }
  std::sort(out.begin(), out.end(), [](const SingularityReport& a, const SingularityReport& b) {
    if (std::abs(a.t0) != std::abs(b.t0)) return std::abs(a.t0) < std::abs(b.t0);
    return std::arg(a.t0) < std::arg(b.t0);
  });
  return out;
}

Region parse_region(const std::string& text) {
  std::vector<double> v;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      v.push_back(std::stod(item));
    } catch (const std::exception&) {
      throw UsageError("region: cannot parse '" + item + "'; expected re0,im0,re1,im1");
    }
  }
  if (v.size() != 4) throw UsageError("region needs four numbers re0,im0,re1,im1");
  if (v[0] > v[2] || v[1] > v[3]) throw UsageError("region corners must be lower-left then upper-right");
  return {{v[0], v[1]}, {v[2], v[3]}};
}

}  // namespace ctk
