#include "ctk/opuc.hpp"

#include <cctype>
#include <cmath>
#include <iomanip>
#include <limits>
#include <numbers>
#include <sstream>

namespace ctk {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double grid_theta(long k, long grid) { return kTwoPi * static_cast<double>(k) / static_cast<double>(grid); }

// e^{-i 2 pi n k / G} with the phase reduced exactly in integers.
Complex grid_phase(long n, long k, long grid) {
  const long r = ((n * k) % grid + grid) % grid;
  return std::polar(1.0, -kTwoPi * static_cast<double>(r) / static_cast<double>(grid));
}

std::string fmt17(double x) {
  std::ostringstream os;
  os << std::setprecision(std::numeric_limits<double>::max_digits10) << x;
  return os.str();
}

// Monic reversal conj: coefficient k of z^{n-1} p^*(z) is conj(p_{n-1-k}).
template <class T>
std::vector<T> reversed_conj(const std::vector<T>& p) {
  std::vector<T> r(p.size());
  for (std::size_t k = 0; k < p.size(); ++k) r[k] = conj_of(p[p.size() - 1 - k]);
  return r;
}

template <class T>
TruncatedSeries<T> szego_step_impl(const TruncatedSeries<T>& p, const T& alpha_n, int n) {
  if (p.lo() != 0 || p.hi() != n - 1 || !p.is_polynomial())
    throw ContractError("szego_step: input must be a polynomial of degree n-1 on window [0, n-1]");
  if (!(p[n - 1] == T(1))) throw ContractError("szego_step: input polynomial is not monic");
  if (magnitude(alpha_n) >= 1.0) throw DomainError("szego_step: |alpha_n| must be < 1");
  const auto rev = reversed_conj(p.coeffs());
  std::vector<T> out(static_cast<std::size_t>(n) + 1, T(0));
  for (int k = 0; k < n; ++k) out[static_cast<std::size_t>(k) + 1] += p[k];
  const T a = conj_of(alpha_n);
  for (int k = 0; k < n; ++k) out[static_cast<std::size_t>(k)] += a * rev[static_cast<std::size_t>(k)];
  out[static_cast<std::size_t>(n)] = T(1);
  return TruncatedSeries<T>::polynomial(std::move(out));
}

}  // namespace

VerblunskySequence to_complex(const ExactVerblunsky& a) {
  std::vector<Complex> v;
  v.reserve(a.values.size());
  for (const auto& q : a.values) v.emplace_back(q.get_d(), 0.0);
  return VerblunskySequence(std::move(v));
}

CircleMeasure CircleMeasure::from_density(Density density, int check_grid, double mass_tol) {
  if (check_grid < 8) throw ContractError("CircleMeasure: check grid too small");
  double sum = 0.0;
  for (int k = 0; k < check_grid; ++k) {
    const double v = density(grid_theta(k, check_grid));
    if (!(v >= 0.0)) throw MeasureError("negative or NaN density sample at theta = " + fmt17(grid_theta(k, check_grid)));
    sum += v;
  }
  const double mass = sum / check_grid;
  if (std::abs(mass - 1.0) > mass_tol)
    throw MeasureError("density does not integrate to 1 (mass " + fmt17(mass) + ")");
  return CircleMeasure(std::move(density), std::nullopt);
}

CircleMeasure CircleMeasure::from_samples(std::vector<double> samples, double mass_tol) {
  const std::size_t size = samples.size();
  if (size < 8) throw ContractError("CircleMeasure: too few samples");
  double sum = 0.0;
  for (double v : samples) {
    if (!(v >= 0.0)) throw MeasureError("negative or NaN density sample");
    sum += v;
  }
  if (std::abs(sum / size - 1.0) > mass_tol)
    throw MeasureError("density samples do not integrate to 1 (mass " + fmt17(sum / size) + ")");
  auto shared = std::make_shared<const std::vector<double>>(samples);
  Density interp = [shared](double theta) {
    const auto& s = *shared;
    const double g = static_cast<double>(s.size());
    double x = theta / kTwoPi * g;
    x -= g * std::floor(x / g);
    const double base = std::floor(x);
    const double frac = x - base;
    const auto i = static_cast<std::size_t>(base) % s.size();
    const auto j = (i + 1) % s.size();
    if (frac < 1e-9) return s[i];
    return (1.0 - frac) * s[i] + frac * s[j];
  };
  return CircleMeasure(std::move(interp), std::move(samples));
}

double CircleMeasure::mass(int grid) const {
  double sum = 0.0;
  for (int k = 0; k < grid; ++k) sum += density_(grid_theta(k, grid));
  return sum / grid;
}

MomentSequence moments_quadrature(const CircleMeasure& mu, int N, int gridsize) {
  if (N < 0) throw ContractError("moments_quadrature: N must be non-negative");
  if (gridsize < 8 * std::max(N, 1))
    throw ContractError("moments_quadrature: grid size must be at least 8 N");
  std::vector<double> w(static_cast<std::size_t>(gridsize));
  for (int k = 0; k < gridsize; ++k) {
    const double v = mu.density(grid_theta(k, gridsize));
    if (!(v >= 0.0)) throw MeasureError("moments_quadrature: negative density sample");
    w[static_cast<std::size_t>(k)] = v;
  }
  MomentSequence out;
  out.c.resize(static_cast<std::size_t>(N) + 1);
  // Trapezoid sums on the full grid and on its even points. A density with a
  // kink at a grid node (the family at m = 1/2 has one at theta = 0) leaves
  // an h^2 error term; one Richardson step removes it and costs nothing for
  // smooth densities, where both sums are already spectrally accurate. It is
  // skipped when the half grid visibly under-resolves the mass, since the
  // error is then not in its asymptotic regime.
  bool richardson = gridsize % 2 == 0 && gridsize / 2 >= 8 * std::max(N, 1);
  if (richardson) {
    double full = 0.0, half = 0.0;
    for (int k = 0; k < gridsize; ++k) {
      full += w[static_cast<std::size_t>(k)];
      if (k % 2 == 0) half += w[static_cast<std::size_t>(k)];
    }
    richardson = std::abs(full / gridsize - half / (gridsize / 2)) <= 1e-6;
  }
  for (int n = 0; n <= N; ++n) {
    Complex acc = 0.0, even = 0.0;
    for (int k = 0; k < gridsize; ++k) {
      const Complex term = grid_phase(n, k, gridsize) * w[static_cast<std::size_t>(k)];
      acc += term;
      if (k % 2 == 0) even += term;
    }
    const Complex full = acc / static_cast<double>(gridsize);
    const Complex half = even / static_cast<double>(gridsize / 2);
    out.c[static_cast<std::size_t>(n)] = richardson ? full + (full - half) / 3.0 : full;
  }
  const double c0 = out.c[0].real();
  if (std::abs(c0 - 1.0) > 1e-6)
    throw QuadratureError("moments_quadrature: c_0 = " + fmt17(c0) + " is off by more than 1e-6");
  for (auto& v : out.c) v /= c0;
  out.c[0] = 1.0;
  out.renormalization = c0;
  return out;
}

Series szego_step(const Series& p, Complex alpha_n, int n) { return szego_step_impl(p, alpha_n, n); }

ExactSeries szego_step(const ExactSeries& p, const Rational& alpha_n, int n) {
  return szego_step_impl(p, alpha_n, n);
}

Series szego_polynomial(const VerblunskySequence& alpha) {
  Series p = Series::constant(1.0);
  for (int n = 1; n <= alpha.size(); ++n) p = szego_step(p, alpha(n), n);
  return p;
}

ForwardResult verblunsky_from_moments(const MomentSequence& moments, int N) {
  if (moments.size() < N + 1) throw ContractError("verblunsky_from_moments: need moments c_0..c_N");
  // <f, z^k> = sum_j f_j c_{k-j}
  auto inner = [&](const std::vector<Complex>& f, int k) {
    Complex acc = 0.0;
    for (std::size_t j = 0; j < f.size(); ++j) acc += f[j] * moments.at(k - static_cast<int>(j));
    return acc;
  };
  const double c0 = moments.c[0].real();

  ForwardResult out;
  std::vector<Complex> fwd{1.0};  // p_{n-1}
  std::vector<Complex> bwd{1.0};  // z^{n-1} p_{n-1}^*, tracked independently
  out.polys.push_back(Series::constant(1.0));
  out.alpha.values.reserve(static_cast<std::size_t>(N));

  for (int n = 1; n <= N; ++n) {
    std::vector<Complex> zp(fwd.size() + 1, 0.0);
    for (std::size_t j = 0; j < fwd.size(); ++j) zp[j + 1] = fwd[j];

    const Complex energy = inner(bwd, 0);  // = ||p_{n-1}||^2
    if (energy.real() <= 1e-13 * c0)
      throw FiniteSupportError("finite-support or under-resolved measure: Toeplitz minor ratio " +
                               fmt17(energy.real()) + " at n = " + std::to_string(n));
    out.energies.push_back(energy.real());

    const Complex kf = -inner(zp, 0) / energy;
    const Complex kb = -inner(bwd, n) / inner(zp, n);

    std::vector<Complex> next_fwd = zp;
    for (std::size_t j = 0; j < bwd.size(); ++j) next_fwd[j] += kf * bwd[j];
    std::vector<Complex> next_bwd(zp.size(), 0.0);
    for (std::size_t j = 0; j < bwd.size(); ++j) next_bwd[j] = bwd[j];
    for (std::size_t j = 0; j < zp.size(); ++j) next_bwd[j] += kb * zp[j];
    next_fwd.back() = 1.0;

    const Complex alpha = std::conj(next_fwd[0]);
    // The next minor ratio is energy (1 - |alpha|^2); a vanishing one means the
    // moments came from a finitely supported measure.
    const double next_energy = energy.real() * (1.0 - std::norm(alpha));
    if (std::abs(next_energy) <= 1e-13 * c0)
      throw FiniteSupportError("finite-support or under-resolved measure: Toeplitz minor ratio " +
                               fmt17(next_energy) + " at n = " + std::to_string(n + 1));
    if (std::abs(alpha) >= 1.0)
      throw BreakdownError("numerical breakdown: |alpha_" + std::to_string(n) + "| = " + fmt17(std::abs(alpha)));

    const Series levinson = Series::polynomial(next_fwd);
    const Series szego = szego_step(out.polys.back(), alpha, n);
    for (int k = 0; k <= n; ++k) out.szego_mismatch = std::max(out.szego_mismatch, std::abs(levinson[k] - szego[k]));

    out.alpha.values.push_back(alpha);
    out.polys.push_back(levinson);
    fwd = std::move(next_fwd);
    bwd = std::move(next_bwd);
  }
  out.energies.push_back(inner(bwd, 0).real());
  return out;
}

ForwardResult verblunsky_forward(const CircleMeasure& mu, int N, int gridsize) {
  return verblunsky_from_moments(moments_quadrature(mu, N, gridsize), N);
}

CircleMeasure bernstein_szego_density(const VerblunskySequence& alpha, int gridsize, double mass_tol) {
  double prefactor = 1.0;
  for (const auto& a : alpha.values) {
    if (std::abs(a) >= 1.0) throw DomainError("bernstein_szego_density: |alpha| must be < 1");
    prefactor *= 1.0 - std::norm(a);
  }
  const Series p = szego_polynomial(alpha);
  auto density = [p, prefactor](double theta) {
    const double d = std::norm(eval_on_circle(p, theta));
    if (d < 1e-300) throw BreakdownError("degenerate density: p_N vanishes on the circle");
    return prefactor / d;
  };
  return CircleMeasure::from_density(density, gridsize, mass_tol);
}

Complex quadrature_inner(const CircleMeasure& mu, const Series& f, const Series& g, int gridsize) {
  Complex acc = 0.0;
  for (int k = 0; k < gridsize; ++k) {
    const double t = grid_theta(k, gridsize);
    acc += eval_on_circle(f, t) * std::conj(eval_on_circle(g, t)) * mu.density(t);
  }
  return acc / static_cast<double>(gridsize);
}

CircleMeasure density_from_csv(const std::string& text, double mass_tol) {
  std::istringstream is(text);
  std::string line;
  std::vector<double> thetas, values;
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#' || std::isalpha(static_cast<unsigned char>(line[0]))) continue;
    std::istringstream ls(line);
    std::string t, v;
    std::getline(ls, t, ',');
    std::getline(ls, v, ',');
    thetas.push_back(std::stod(t));
    values.push_back(std::stod(v));
  }
  if (values.size() < 8) throw ContractError("density CSV: need at least 8 rows");
  const double step = kTwoPi / static_cast<double>(values.size());
  for (std::size_t k = 0; k < thetas.size(); ++k) {
    if (std::abs(thetas[k] - step * static_cast<double>(k)) > 1e-9 * (1.0 + std::abs(thetas[k])))
      throw ContractError("density CSV: theta grid must be uniform on [0, 2 pi) starting at 0");
  }
  return CircleMeasure::from_samples(std::move(values), mass_tol);
}

std::string density_to_csv(const CircleMeasure& mu, int gridsize) {
  std::ostringstream os;
  os << "theta,value\n";
  for (int k = 0; k < gridsize; ++k) {
    const double t = grid_theta(k, gridsize);
    os << fmt17(t) << ',' << fmt17(mu.density(t)) << '\n';
  }
  return os.str();
}

std::string moments_to_csv(const MomentSequence& m) {
  std::ostringstream os;
  os << "n,re,im\n";
  for (int n = 0; n < m.size(); ++n) os << n << ',' << fmt17(m.c[static_cast<std::size_t>(n)].real()) << ',' << fmt17(m.c[static_cast<std::size_t>(n)].imag()) << '\n';
  return os.str();
}

std::string alpha_to_csv(const VerblunskySequence& a) {
  std::ostringstream os;
  os << "n,re,im\n";
  for (int n = 1; n <= a.size(); ++n) os << n << ',' << fmt17(a(n).real()) << ',' << fmt17(a(n).imag()) << '\n';
  return os.str();
}

}  // namespace ctk
