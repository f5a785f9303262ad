#include "ctk/rsf.hpp"

#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <thread>

namespace ctk {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

template <class T>
void check_alphas(const Verblunsky<T>& alphas, int N) {
  if (N < 0) throw DomainError("partial product: N must be non-negative");
  if (N > alphas.size()) throw DomainError("partial product: fewer than N coefficients supplied");
  for (int k = 1; k <= N; ++k)
    if (magnitude(alphas(k)) >= 1.0) throw DomainError("partial product: |alpha_" + std::to_string(k) + "| >= 1");
}

template <class T>
PartialProduct<T> build_product(const Verblunsky<T>& alphas, int N, int M, int max_factors) {
  if (M < 1) throw DomainError("partial product: M must be at least 1");
  check_alphas(alphas, N);
  if (N > max_factors) throw ResourceError("partial product: N exceeds the memory budget");

  // Degrees: gamma <= N, delta <= N - 1.
  const std::size_t len = static_cast<std::size_t>(N) + 1;
  std::vector<T> g(len, T(0)), d(len, T(0));
  d[0] = T(1);
  double det = 1.0;
  for (int k = 1; k <= N; ++k) {
    const T a = alphas(k);
    det *= 1.0 - magnitude(a) * magnitude(a);
    // a z^k delta^*: coefficient at k - m is a conj(delta_m), m = 0..k-1.
    std::vector<T> dg(static_cast<std::size_t>(k) + 1, T(0)), dd(static_cast<std::size_t>(k) + 1, T(0));
    for (int m = 0; m < k; ++m) {
      const auto p = static_cast<std::size_t>(k - m);
      if (!(d[static_cast<std::size_t>(m)] == T(0))) dg[p] = a * conj_of(d[static_cast<std::size_t>(m)]);
      if (!(g[static_cast<std::size_t>(m)] == T(0))) dd[p] = a * conj_of(g[static_cast<std::size_t>(m)]);
    }
    for (std::size_t p = 1; p <= static_cast<std::size_t>(k); ++p) {
      g[p] += dg[p];
      d[p] += dd[p];
    }
  }

  PartialProduct<T> out;
  out.N = N;
  out.M = M;
  out.alphas = alphas.prefix(N);
  out.det_product = det;
  out.gamma_full = TruncatedSeries<T>::polynomial(g);
  out.delta_full = TruncatedSeries<T>::polynomial(d);
  // gamma(0) = 0, so the window starting at 1 is still exact below.
  const auto gw = out.gamma_full.window(1, M);
  out.gamma = TruncatedSeries<T>(1, gw.coeffs(), gw.exact_above(), true);
  out.delta = out.delta_full.window(0, M);
  return out;
}

template <class T>
SchurFn<T> schur_impl(const PartialProduct<T>& pp) {
  if (pp.M < 2) throw DomainError("schur_function: M must be at least 2");
  // gamma / z on window 0..M-1
  std::vector<T> shifted(pp.gamma.coeffs().begin(), pp.gamma.coeffs().end());
  TruncatedSeries<T> g_over_z(0, std::move(shifted), pp.gamma.exact_above(), true);
  if (magnitude(pp.delta[0]) < 1e-300) throw BreakdownError("schur_function: delta(0) vanishes");
  auto f = scale(divide(g_over_z, pp.delta, pp.M - 1), T(-1));
  return SchurFn<T>{std::move(f)};
}

template <class T>
CaratheodoryFn<T> caratheodory_impl(const PartialProduct<T>& pp) {
  const auto num = subtract(pp.delta, pp.gamma);
  const auto den = add(pp.delta, pp.gamma);
  if (magnitude(den.at(0)) < 1e-300) throw BreakdownError("caratheodory_function: (delta + gamma)(0) vanishes");
  auto F = divide(num, den, pp.M);
  F[0] = T(1);
  return CaratheodoryFn<T>{std::move(F)};
}

template <class T>
TruncatedSeries<T> identity_residual_series(const PartialProduct<T>& pp, const TruncatedSeries<T>& F) {
  const auto sum = add(pp.delta, pp.gamma);
  const auto one_plus_F = add(TruncatedSeries<T>::constant(T(1)), F);
  auto half = scale(mul(one_plus_F, sum, pp.M), T(T(1) / T(2)));
  return subtract(pp.delta, half);
}

// Enumerates the index chains behind the gamma / delta coefficients.
// Term convention follows the factor layout above: indices in "i" slots
// contribute a_i for gamma and conj(a_i) for delta, and the "j" slots the
// other way round.
template <class T>
GammaDelta<T> bruteforce_impl(const Verblunsky<T>& alphas, int n, int N) {
  if (n > 12) throw EnumerationGuard("gamma_delta_bruteforce: n > 12 is refused");
  if (n < 1) throw DomainError("gamma_delta_bruteforce: n must be >= 1");
  if (N < n) throw DomainError("gamma_delta_bruteforce: need N >= n");
  check_alphas(alphas, N);

  GammaDelta<T> out{T(0), T(0)};

  // gamma: 0 < i1 < j1 < ... < jr < i_{r+1} <= N, sum i - sum j = n.
  // After i1 the budget n - i1 is spent by the (i_{u+1} - j_u) gaps.
  std::function<void(int, int, T)> grow_gamma = [&](int last_i, int budget, T term) {
    if (budget == 0) {
      out.gamma += term;
      return;
    }
    for (int j = last_i + 1; j < N; ++j) {
      const T tj = term * conj_of(alphas(j));
      for (int i = j + 1; i <= std::min(N, j + budget); ++i) grow_gamma(i, budget - (i - j), tj * alphas(i));
    }
  };
  for (int i1 = 1; i1 <= std::min(n, N); ++i1) grow_gamma(i1, n - i1, alphas(i1));

  // delta: 0 < i1 < j1 < ... < ir < jr <= N, sum (j - i) = n, r >= 1.
  std::function<void(int, int, T)> grow_delta = [&](int last_j, int budget, T term) {
    for (int i = last_j + 1; i < N; ++i) {
      const T ti = term * conj_of(alphas(i));
      for (int j = i + 1; j <= std::min(N, i + budget); ++j) {
        const T tij = ti * alphas(j);
        if (budget - (j - i) == 0)
          out.delta += tij;
        else
          grow_delta(j, budget - (j - i), tij);
      }
    }
  };
  grow_delta(0, n, T(1));
  return out;
}

Mat2 mat_mul(const Mat2& x, const Mat2& y) {
  return {x.a11 * y.a11 + x.a12 * y.a21, x.a11 * y.a12 + x.a12 * y.a22, x.a21 * y.a11 + x.a22 * y.a21,
          x.a21 * y.a12 + x.a22 * y.a22};
}

// Unit roots e^{2 pi i r / G}.
std::vector<Complex> unit_roots(int grid) {
  std::vector<Complex> r(static_cast<std::size_t>(grid));
  for (int k = 0; k < grid; ++k) r[static_cast<std::size_t>(k)] = std::polar(1.0, kTwoPi * k / grid);
  return r;
}

}  // namespace

ComplexProduct partial_product(const VerblunskySequence& alphas, int N, int M, bool normalized) {
  auto pp = build_product(alphas, N, M, kMaxProductFactorsDouble);
  if (normalized) {
    const Complex s = 1.0 / std::sqrt(pp.det_product);
    pp.gamma = scale(pp.gamma, s);
    pp.delta = scale(pp.delta, s);
    pp.gamma_full = scale(pp.gamma_full, s);
    pp.delta_full = scale(pp.delta_full, s);
    pp.normalized = true;
  }
  return pp;
}

ExactProduct partial_product(const ExactVerblunsky& alphas, int N, int M) {
  return build_product(alphas, N, M, kMaxProductFactorsExact);
}

Mat2 product_matrix_at(const VerblunskySequence& alphas, int N, Complex z, bool normalized) {
  check_alphas(alphas, N);
  Mat2 acc{1.0, 0.0, 0.0, 1.0};
  Complex zk = 1.0;
  for (int k = 1; k <= N; ++k) {
    zk *= z;
    const Complex a = alphas(k);
    const double s = normalized ? 1.0 / std::sqrt(1.0 - std::norm(a)) : 1.0;
    const Mat2 f{s, s * std::conj(a) / zk, s * a * zk, s};
    acc = mat_mul(f, acc);
  }
  return acc;
}

GammaDelta<Complex> gamma_delta_bruteforce(const VerblunskySequence& alphas, int n, int N) {
  return bruteforce_impl(alphas, n, N);
}

GammaDelta<Rational> gamma_delta_bruteforce(const ExactVerblunsky& alphas, int n, int N) {
  return bruteforce_impl(alphas, n, N);
}

double schur_disk_max(const Series& f) {
  double worst = 0.0;
  for (double r : DiskSamples::kRadii)
    for (int k = 0; k < DiskSamples::kAngles; ++k)
      worst = std::max(worst, std::abs(eval(f, std::polar(r, kTwoPi * k / DiskSamples::kAngles))));
  return worst;
}

double caratheodory_disk_min_real(const Series& F) {
  double worst = std::numeric_limits<double>::infinity();
  for (double r : DiskSamples::kRadii)
    for (int k = 0; k < DiskSamples::kAngles; ++k)
      worst = std::min(worst, eval(F, std::polar(r, kTwoPi * k / DiskSamples::kAngles)).real());
  return worst;
}

SchurFn<Complex> schur_function(const ComplexProduct& pp) {
  auto f = schur_impl(pp);
  if (schur_disk_max(f.series) > 1.0 + 1e-9)
    throw ContractError("schur_function: |f| exceeds 1 on the disk samples (raise M)");
  return f;
}

SchurFn<Rational> schur_function(const ExactProduct& pp) {
  auto f = schur_impl(pp);
  if (schur_disk_max(to_complex(f.series)) > 1.0 + 1e-9)
    throw ContractError("schur_function: |f| exceeds 1 on the disk samples (raise M)");
  return f;
}

CaratheodoryFn<Complex> caratheodory_function(const ComplexProduct& pp) {
  auto F = caratheodory_impl(pp);
  if (!(caratheodory_disk_min_real(F.series) > 0.0))
    throw ContractError("caratheodory_function: Re F <= 0 on the disk samples (raise M)");
  return F;
}

CaratheodoryFn<Rational> caratheodory_function(const ExactProduct& pp) {
  auto F = caratheodory_impl(pp);
  if (!(caratheodory_disk_min_real(to_complex(F.series)) > 0.0))
    throw ContractError("caratheodory_function: Re F <= 0 on the disk samples (raise M)");
  return F;
}

IdentityResidual delta_identity_residual(const ComplexProduct& pp) {
  const auto r = identity_residual_series(pp, caratheodory_impl(pp).series);
  IdentityResidual out;
  for (const auto& c : r.coeffs()) out.max_abs = std::max(out.max_abs, std::abs(c));
  out.exactly_zero = out.max_abs == 0.0;
  return out;
}

IdentityResidual delta_identity_residual(const ExactProduct& pp) {
  const auto r = identity_residual_series(pp, caratheodory_impl(pp).series);
  IdentityResidual out;
  out.exactly_zero = true;
  for (const auto& c : r.coeffs()) {
    if (c != 0) out.exactly_zero = false;
    out.max_abs = std::max(out.max_abs, std::abs(c.get_d()));
  }
  return out;
}

CircleMeasure RsfDensity::measure() const {
  std::vector<double> s = density;
  for (auto& v : s) v /= mass;
  return CircleMeasure::from_samples(std::move(s));
}

RsfDensity rsf_density(const VerblunskySequence& alphas, int N, int gridsize, int threads) {
  check_alphas(alphas, N);
  if (gridsize < 8) throw ContractError("rsf_density: grid too small");
  const auto roots = unit_roots(gridsize);
  RsfDensity out;
  out.N = N;
  out.theta.resize(static_cast<std::size_t>(gridsize));
  out.density.resize(static_cast<std::size_t>(gridsize));
  for (int k = 1; k <= N; ++k) out.prefactor *= 1.0 - std::norm(alphas(k));

  std::vector<double> denom(static_cast<std::size_t>(gridsize));
  auto work = [&](int begin, int end) {
    for (int j = begin; j < end; ++j) {
      Complex g = 0.0, d = 1.0;
      for (int k = 1; k <= N; ++k) {
        const Complex azk = alphas(k) * roots[static_cast<std::size_t>((static_cast<long>(k) * j) % gridsize)];
        const Complex ng = g + azk * std::conj(d);
        const Complex nd = d + azk * std::conj(g);
        g = ng;
        d = nd;
      }
      denom[static_cast<std::size_t>(j)] = std::norm(g + d);
    }
  };
  threads = std::max(1, std::min(threads, gridsize));
  if (threads == 1) {
    work(0, gridsize);
  } else {
    std::vector<std::thread> pool;
    const int chunk = (gridsize + threads - 1) / threads;
    for (int t = 0; t < threads; ++t) {
      const int b = t * chunk, e = std::min(gridsize, b + chunk);
      if (b < e) pool.emplace_back(work, b, e);
    }
    for (auto& th : pool) th.join();
  }

  double sum = 0.0, peak = 0.0;
  for (int j = 0; j < gridsize; ++j) {
    const double den = denom[static_cast<std::size_t>(j)];
    if (den < 1e-300) throw BreakdownError("rsf_density: delta + gamma vanishes on the grid");
    const double v = out.prefactor / den;
    out.theta[static_cast<std::size_t>(j)] = kTwoPi * j / gridsize;
    out.density[static_cast<std::size_t>(j)] = v;
    sum += v;
    peak = std::max(peak, v);
  }
  out.mass = sum / gridsize;
  for (int j = 0; j < gridsize; ++j)
    if (out.density[static_cast<std::size_t>(j)] < 1e-4 * peak) out.near_zero.push_back(out.theta[static_cast<std::size_t>(j)]);
  return out;
}

SupDiagnostic circle_sup_diagnostic(const VerblunskySequence& alphas, int N, int gridsize) {
  check_alphas(alphas, N);
  const auto roots = unit_roots(gridsize);
  const auto G = static_cast<std::size_t>(gridsize);
  std::vector<Complex> g(G, 0.0), d(G, 1.0);
  SupDiagnostic out;
  out.sup_table.push_back(1.0);
  out.value_at_one.push_back(1.0);
  for (int k = 1; k <= N; ++k) {
    double level_sup = 0.0;
    for (std::size_t j = 0; j < G; ++j) {
      const Complex azk = alphas(k) * roots[(static_cast<std::size_t>(k) * j) % G];
      const Complex ng = g[j] + azk * std::conj(d[j]);
      const Complex nd = d[j] + azk * std::conj(g[j]);
      g[j] = ng;
      d[j] = nd;
      level_sup = std::max(level_sup, std::abs(ng + nd));
    }
    out.sup_table.push_back(level_sup);
    out.value_at_one.push_back(std::abs(g[0] + d[0]));
  }
  for (double v : out.sup_table) out.sup = std::max(out.sup, v);
  return out;
}

Rational sum_at_one_exact(const ExactVerblunsky& alphas, int N) {
  check_alphas(alphas, N);
  Rational g = 0, d = 1;
  for (int k = 1; k <= N; ++k) {
    const Rational ng = g + alphas(k) * d;
    const Rational nd = d + alphas(k) * g;
    g = ng;
    d = nd;
  }
  return g + d;
}

}  // namespace ctk
