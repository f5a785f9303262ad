#include "ctk/toda.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cctype>
#include <cmath>

#include "ctk/errors.hpp"

namespace ctk {

namespace {

void check_shape(const GeneralizedCartanMatrix& g, const TodaState& s) {
  if (static_cast<int>(s.a.size()) != g.n || static_cast<int>(s.b.size()) != g.n)
    throw DomainError("toda state has " + std::to_string(s.a.size()) + " a's and " + std::to_string(s.b.size()) +
                      " b's for a rank " + std::to_string(g.n) + " matrix");
}

using Vec = Eigen::VectorXcd;

Vec pack(const TodaState& s) {
  const int n = static_cast<int>(s.a.size());
  Vec y(2 * n);
  for (int j = 0; j < n; ++j) {
    y(j) = s.a[static_cast<std::size_t>(j)];
    y(n + j) = s.b[static_cast<std::size_t>(j)];
  }
  return y;
}

TodaState unpack(const Vec& y, Complex t) {
  const int n = static_cast<int>(y.size()) / 2;
  TodaState s;
  s.t = t;
  for (int j = 0; j < n; ++j) {
    s.a.push_back(y(j));
    s.b.push_back(y(n + j));
  }
  return s;
}

Vec rhs_vec(const GeneralizedCartanMatrix& g, const Vec& y) {
  const int n = g.n;
  Vec f(2 * n);
  for (int j = 0; j < n; ++j) {
    Complex rho = 0.0;
    for (int i = 0; i < n; ++i) rho += y(i) * static_cast<double>(g.at(i, j));
    f(j) = y(n + j);
    f(n + j) = rho * y(n + j);
  }
  return f;
}

// Dormand-Prince 5(4).
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784, b6 = 11.0 / 84;
constexpr double e1 = b1 - 5179.0 / 57600, e3 = b3 - 7571.0 / 16695, e4 = b4 - 393.0 / 640,
                 e5 = b5 - -92097.0 / 339200, e6 = b6 - 187.0 / 2100, e7 = -1.0 / 40;

}  // namespace

TodaRhs toda_rhs(const GeneralizedCartanMatrix& g, const TodaState& s) {
  check_shape(g, s);
  const Vec f = rhs_vec(g, pack(s));
  TodaRhs r;
  for (int j = 0; j < g.n; ++j) {
    r.da.push_back(f(j));
    r.db.push_back(f(g.n + j));
  }
  return r;
}

Complex hamiltonian(const GeneralizedCartanMatrix& g, const TodaState& s) {
  check_shape(g, s);
  if (static_cast<int>(g.d.size()) != g.n) throw DomainError("hamiltonian needs a symmetrizer");
  Complex h = 0.0;
  for (int j = 0; j < g.n; ++j) {
    const double dj = g.d[static_cast<std::size_t>(j)].get_d();
    h += dj * s.b[static_cast<std::size_t>(j)];
    for (int i = 0; i < g.n; ++i)
      h -= 0.5 * dj * static_cast<double>(g.at(i, j)) * s.a[static_cast<std::size_t>(i)] * s.a[static_cast<std::size_t>(j)];
  }
  return h;
}

Trajectory integrate_complex(const GeneralizedCartanMatrix& g, const TodaState& x0, const std::vector<Complex>& path,
                             const IntegratorOptions& opts) {
  check_shape(g, x0);
  if (path.empty()) throw DomainError("integrate_complex: empty path");
  if (std::abs(path.front() - x0.t) > 1e-14 * std::max(1.0, std::abs(x0.t)))
    throw DomainError("integrate_complex: path must start at x0.t");
  if (!(opts.rtol >= 1e-14) || !(opts.atol > 0))
    throw DomainError("integrate_complex: rtol below 1e-14 is unachievable in double precision");

  Trajectory tr;
  tr.path = path;
  const bool have_h = static_cast<int>(g.d.size()) == g.n;
  const Complex H0 = have_h ? hamiltonian(g, x0) : Complex(0.0);
  Vec y = pack(x0);
  auto accept_state = [&](const Vec& v, Complex t) {
    TodaState s = unpack(v, t);
    const Complex H = have_h ? hamiltonian(g, s) : Complex(0.0);
    tr.max_H_drift = std::max(tr.max_H_drift, std::abs(H - H0));
    if (opts.record) {
      tr.states.push_back(s);
      tr.H_values.push_back(H);
    }
    tr.last = std::move(s);
  };
  accept_state(y, path.front());

  double h = 0.0;
  for (std::size_t seg = 0; seg + 1 < path.size(); ++seg) {
    const Complex ta = path[seg], tb = path[seg + 1];
    const double L = std::abs(tb - ta);
    if (L == 0.0) continue;
    const Complex u = (tb - ta) / L;
    if (h == 0.0) h = std::min(L, 1e-2);
    h = std::min(h, L);
    double s = 0.0;
    auto f = [&](const Vec& v) -> Vec { return u * rhs_vec(g, v); };
    Vec k1 = f(y);
    while (s < L) {
      if (tr.stats.accepted + tr.stats.rejected > opts.max_steps) {
        tr.blew_up = true;
        tr.blowup_reason = "step budget exhausted";
        return tr;
      }
      const bool last = s + h >= L;
      const double hh = last ? L - s : h;
      const Vec k2 = f(y + hh * (a21 * k1));
      const Vec k3 = f(y + hh * (a31 * k1 + a32 * k2));
      const Vec k4 = f(y + hh * (a41 * k1 + a42 * k2 + a43 * k3));
      const Vec k5 = f(y + hh * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
      const Vec k6 = f(y + hh * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
      const Vec yn = y + hh * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
      const Vec k7 = f(yn);
      const Vec err = hh * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
      double en = 0.0;
      bool finite = true;
      for (int i = 0; i < y.size(); ++i) {
        const double sc = opts.atol + opts.rtol * std::max(std::abs(y(i)), std::abs(yn(i)));
        const double r = std::abs(err(i)) / sc;
        if (!std::isfinite(r)) finite = false;
        en = std::max(en, r);
      }
      if (finite && en <= 1.0) {
        s = last ? L : s + hh;
        y = yn;
        k1 = k7;
        ++tr.stats.accepted;
        tr.stats.max_error_estimate = std::max(tr.stats.max_error_estimate, en);
        accept_state(y, last ? tb : ta + u * s);
        if (y.cwiseAbs().maxCoeff() > opts.blowup_magnitude) {
          tr.blew_up = true;
          tr.blowup_reason = "magnitude cap exceeded";
          return tr;
        }
        const double fac = en == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(en, -0.2), 0.2, 5.0);
        if (!last) h = hh * fac;
      } else {
        ++tr.stats.rejected;
        const double fac = finite ? std::clamp(0.9 * std::pow(en, -0.2), 0.1, 0.9) : 0.1;
        h = hh * fac;
      }
      if (h < opts.collapse_ratio * L && s < L) {
        tr.blew_up = true;
        tr.blowup_reason = "step size collapse";
        return tr;
      }
    }
  }
  return tr;
}

Complex parse_complex(const std::string& text) {
  std::string s;
  for (char ch : text)
    if (!std::isspace(static_cast<unsigned char>(ch))) s += ch;
  if (s.empty()) throw UsageError("empty complex number");
  auto num = [&](const std::string& x) -> double {
    if (x.empty() || x == "+") return 1.0;
    if (x == "-") return -1.0;
    std::size_t pos = 0;
    double v = 0;
    try {
      v = std::stod(x, &pos);
    } catch (const std::exception&) {
      throw UsageError("cannot parse number '" + x + "' in '" + text + "'");
    }
    if (pos != x.size()) throw UsageError("cannot parse number '" + x + "' in '" + text + "'");
    return v;
  };
  if (s.back() != 'i' && s.back() != 'j') return {num(s), 0.0};
  s.pop_back();
  // Split at the last sign that is not an exponent sign and not leading.
  std::size_t split = std::string::npos;
  for (std::size_t k = s.size(); k-- > 1;) {
    if ((s[k] == '+' || s[k] == '-') && s[k - 1] != 'e' && s[k - 1] != 'E') {
      split = k;
      break;
    }
  }
  if (split == std::string::npos) return {0.0, num(s)};
  return {num(s.substr(0, split)), num(s.substr(split))};
}

std::vector<Complex> parse_path(const std::string& text) {
  std::vector<Complex> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t k = text.find("->", start);
    out.push_back(parse_complex(text.substr(start, k == std::string::npos ? std::string::npos : k - start)));
    if (k == std::string::npos) break;
    start = k + 2;
  }
  if (out.size() < 2) throw UsageError("path needs at least two points, e.g. \"0->1\"");
  return out;
}

LduFactorization ldu(const Eigen::MatrixXcd& g, double eps) {
  const int n = static_cast<int>(g.rows());
  if (g.cols() != n) throw DomainError("ldu: matrix must be square");
  const double norm = std::max(g.cwiseAbs().maxCoeff(), 1e-300);
  Eigen::MatrixXcd a = g;
  LduFactorization f;
  f.l = Eigen::MatrixXcd::Identity(n, n);
  f.d = Eigen::MatrixXcd::Zero(n, n);
  f.u = Eigen::MatrixXcd::Identity(n, n);
  Complex minor = 1.0;
  for (int k = 0; k < n; ++k) {
    const Complex piv = a(k, k);
    minor *= piv;
    f.minors.push_back(minor);
    if (std::abs(minor) <= eps * std::pow(norm, k + 1))
      throw FactorizationBoundary("leading principal minor " + std::to_string(k + 1) + " vanishes");
    f.d(k, k) = piv;
    for (int i = k + 1; i < n; ++i) f.l(i, k) = a(i, k) / piv;
    for (int j = k + 1; j < n; ++j) f.u(k, j) = a(k, j) / piv;
    for (int i = k + 1; i < n; ++i)
      for (int j = k + 1; j < n; ++j) a(i, j) -= f.l(i, k) * piv * f.u(k, j);
  }
  f.residual = (f.l * f.d * f.u - g).cwiseAbs().maxCoeff() / norm;
  return f;
}

Eigen::MatrixXcd sl_matrix(const TodaState& s) {
  const int r = static_cast<int>(s.a.size());
  if (static_cast<int>(s.b.size()) != r) throw DomainError("sl_matrix: a and b differ in length");
  Eigen::MatrixXcd x = Eigen::MatrixXcd::Zero(r + 1, r + 1);
  for (int j = 0; j < r; ++j) {
    x(j, j + 1) = 1.0;                            // e_j
    x(j, j) += s.a[static_cast<std::size_t>(j)];  // h_j = E_jj - E_{j+1,j+1}
    x(j + 1, j + 1) -= s.a[static_cast<std::size_t>(j)];
    x(j + 1, j) = s.b[static_cast<std::size_t>(j)];  // f_j
  }
  return x;
}

TodaState sl_coordinates(const Eigen::MatrixXcd& x) {
  const int r = static_cast<int>(x.rows()) - 1;
  TodaState s;
  Complex acc = 0.0;
  for (int j = 0; j < r; ++j) {
    acc += x(j, j);
    s.a.push_back(acc);
    s.b.push_back(x(j + 1, j));
  }
  return s;
}

TodaState adjoint_flow(const TodaState& x0, Complex t) {
  const Eigen::MatrixXcd X = sl_matrix(x0);
  const Eigen::MatrixXcd gt = ((t - x0.t) * X).exp();
  const LduFactorization f = ldu(gt);
  const Eigen::MatrixXcd x = f.l.triangularView<Eigen::UnitLower>().solve(X * f.l);
  TodaState s = sl_coordinates(x);
  s.t = t;
  return s;
}

TodaState finite_solution(const TodaState& x0, Complex t) {
  TodaState flipped = x0;
  for (auto& v : flipped.a) v = -v;
  for (auto& v : flipped.b) v = -v;
  TodaState s = adjoint_flow(flipped, t);
  for (auto& v : s.a) v = -v;
  for (auto& v : s.b) v = -v;
  s.t = t;
  return s;
}

}  // namespace ctk
