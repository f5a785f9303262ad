#pragma once

// Truncated Laurent series over a scalar backend (double complex or exact
// rationals).
//
// A series stores coefficients on the window [lo, hi]. Two flags say what is
// known outside it: `exact_below` means every coefficient below lo is zero,
// `exact_above` means every coefficient above hi is zero. A Taylor series cut
// at order M is exact below and truncated above; a polynomial is exact on
// both sides. Products only return coefficients that are fully determined by
// the known data, so truncation shows up as a shrunken window and never as a
// silently wrong coefficient.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ctk/errors.hpp"
#include "ctk/rational.hpp"

namespace ctk {

template <class T>
class TruncatedSeries {
 public:
  using value_type = T;

  TruncatedSeries() : lo_(0), coeffs_{T(0)}, exact_below_(true), exact_above_(true) {}

  TruncatedSeries(int lo, std::vector<T> coeffs, bool exact_above = false, bool exact_below = true)
      : lo_(lo), coeffs_(std::move(coeffs)), exact_below_(exact_below), exact_above_(exact_above) {
    if (coeffs_.empty()) throw WindowError("window underflow: empty coefficient vector");
  }

  static TruncatedSeries polynomial(std::vector<T> coeffs, int lo = 0) {
    return TruncatedSeries(lo, std::move(coeffs), true, true);
  }

  static TruncatedSeries constant(T c) { return polynomial({std::move(c)}); }

  static TruncatedSeries monomial(T c, int n) { return polynomial({std::move(c)}, n); }

  int lo() const { return lo_; }
  int hi() const { return lo_ + static_cast<int>(coeffs_.size()) - 1; }
  std::size_t size() const { return coeffs_.size(); }
  bool exact_below() const { return exact_below_; }
  bool exact_above() const { return exact_above_; }
  bool is_polynomial() const { return exact_below_ && exact_above_; }
  const std::vector<T>& coeffs() const { return coeffs_; }

  bool in_window(int n) const { return n >= lo_ && n <= hi(); }

  // Coefficient at n; zero outside the window where that is known, otherwise
  // a window error.
  T at(int n) const {
    if (in_window(n)) return coeffs_[static_cast<std::size_t>(n - lo_)];
    if (n < lo_ && exact_below_) return T(0);
    if (n > hi() && exact_above_) return T(0);
    throw WindowError("coefficient " + std::to_string(n) + " lies outside the reliable window [" +
                      std::to_string(lo_) + ", " + std::to_string(hi()) + "]");
  }

  T& operator[](int n) {
    if (!in_window(n)) throw WindowError("index outside window");
    return coeffs_[static_cast<std::size_t>(n - lo_)];
  }
  const T& operator[](int n) const {
    if (!in_window(n)) throw WindowError("index outside window");
    return coeffs_[static_cast<std::size_t>(n - lo_)];
  }

  // Restricts to [new_lo, new_hi]; positions outside the old window that are
  // known zeros are filled in.
  TruncatedSeries window(int new_lo, int new_hi) const {
    if (new_hi < new_lo) throw WindowError("window underflow");
    std::vector<T> c;
    c.reserve(static_cast<std::size_t>(new_hi - new_lo + 1));
    for (int n = new_lo; n <= new_hi; ++n) c.push_back(at(n));
    const bool below = exact_below_ && new_lo <= lo_;
    const bool above = exact_above_ && new_hi >= hi();
    return TruncatedSeries(new_lo, std::move(c), above, below);
  }

  TruncatedSeries truncate_above(int max_hi) const {
    if (max_hi >= hi()) return *this;
    return window(lo_, max_hi);
  }

  bool operator==(const TruncatedSeries& o) const {
    return lo_ == o.lo_ && coeffs_ == o.coeffs_ && exact_below_ == o.exact_below_ &&
           exact_above_ == o.exact_above_;
  }

 private:
  int lo_;
  std::vector<T> coeffs_;
  bool exact_below_;
  bool exact_above_;
};

using Series = TruncatedSeries<Complex>;
using ExactSeries = TruncatedSeries<Rational>;

namespace detail {

constexpr std::int64_t kInf = std::int64_t{1} << 40;

struct Bounds {
  std::int64_t lo, hi;
};

// Range where coefficients may be nonzero.
template <class T>
Bounds support(const TruncatedSeries<T>& s) {
  return {s.exact_below() ? s.lo() : -kInf, s.exact_above() ? s.hi() : kInf};
}

}  // namespace detail

template <class T>
TruncatedSeries<T> add(const TruncatedSeries<T>& a, const TruncatedSeries<T>& b) {
  std::int64_t lo = std::min(a.lo(), b.lo());
  std::int64_t hi = std::max(a.hi(), b.hi());
  if (!a.exact_above()) hi = std::min<std::int64_t>(hi, a.hi());
  if (!b.exact_above()) hi = std::min<std::int64_t>(hi, b.hi());
  if (!a.exact_below()) lo = std::max<std::int64_t>(lo, a.lo());
  if (!b.exact_below()) lo = std::max<std::int64_t>(lo, b.lo());
  if (hi < lo) throw WindowError("window underflow");
  std::vector<T> c;
  c.reserve(static_cast<std::size_t>(hi - lo + 1));
  for (auto n = lo; n <= hi; ++n) {
    T v = a.at(static_cast<int>(n));
    v += b.at(static_cast<int>(n));
    c.push_back(std::move(v));
  }
  const bool above = a.exact_above() && b.exact_above();
  const bool below = a.exact_below() && b.exact_below();
  return TruncatedSeries<T>(static_cast<int>(lo), std::move(c), above, below);
}

template <class T>
TruncatedSeries<T> scale(const TruncatedSeries<T>& a, const T& lambda) {
  std::vector<T> c = a.coeffs();
  for (auto& v : c) v *= lambda;
  return TruncatedSeries<T>(a.lo(), std::move(c), a.exact_above(), a.exact_below());
}

template <class T>
TruncatedSeries<T> subtract(const TruncatedSeries<T>& a, const TruncatedSeries<T>& b) {
  return add(a, scale(b, T(-1)));
}

// Cauchy product restricted to the coefficients fully determined by the
// inputs; `max_hi` optionally caps the output order.
template <class T>
TruncatedSeries<T> mul(const TruncatedSeries<T>& a, const TruncatedSeries<T>& b,
                       std::optional<int> max_hi = std::nullopt) {
  using detail::kInf;
  const auto sa = detail::support(a);
  const auto sb = detail::support(b);
  std::int64_t lo = (sa.lo == -kInf || sb.lo == -kInf) ? -kInf : sa.lo + sb.lo;
  std::int64_t hi = (sa.hi == kInf || sb.hi == kInf) ? kInf : sa.hi + sb.hi;
  // Unknown coefficients of one factor must not meet possibly nonzero
  // coefficients of the other.
  auto clamp = [&](const TruncatedSeries<T>& x, const detail::Bounds& other) {
    if (!x.exact_above()) {
      if (other.lo == -kInf) throw WindowError("window underflow: product is an infinite sum");
      hi = std::min(hi, x.hi() + other.lo);
    }
    if (!x.exact_below()) {
      if (other.hi == kInf) throw WindowError("window underflow: product is an infinite sum");
      lo = std::max(lo, x.lo() + other.hi);
    }
  };
  clamp(a, sb);
  clamp(b, sa);
  bool truncated_above = !(a.exact_above() && b.exact_above());
  if (max_hi && *max_hi < hi) {
    hi = *max_hi;
    truncated_above = true;
  }
  if (lo == -kInf || hi == kInf) throw WindowError("window underflow: unbounded product window");
  if (hi < lo) throw WindowError("window underflow");

  std::vector<T> c(static_cast<std::size_t>(hi - lo + 1), T(0));
  for (int i = a.lo(); i <= a.hi(); ++i) {
    const T& ai = a[i];
    if (ai == T(0)) continue;
    const std::int64_t jlo = std::max<std::int64_t>(b.lo(), lo - i);
    const std::int64_t jhi = std::min<std::int64_t>(b.hi(), hi - i);
    for (auto j = jlo; j <= jhi; ++j) c[static_cast<std::size_t>(i + j - lo)] += ai * b[static_cast<int>(j)];
  }
  const bool below = a.exact_below() && b.exact_below();
  return TruncatedSeries<T>(static_cast<int>(lo), std::move(c), !truncated_above, below);
}

// f*(z) = sum conj(f_{-n}) z^n
template <class T>
TruncatedSeries<T> star(const TruncatedSeries<T>& f) {
  std::vector<T> c;
  c.reserve(f.size());
  for (int n = -f.hi(); n <= -f.lo(); ++n) c.push_back(conj_of(f[-n]));
  return TruncatedSeries<T>(-f.hi(), std::move(c), f.exact_below(), f.exact_above());
}

// a / b as a series; b must be exact below with a nonzero lowest coefficient.
template <class T>
TruncatedSeries<T> divide(const TruncatedSeries<T>& a, const TruncatedSeries<T>& b, int max_hi) {
  if (!a.exact_below() || !b.exact_below()) throw WindowError("division needs series exact below");
  const T& b0 = b[b.lo()];
  if (magnitude(b0) == 0.0) throw BreakdownError("division breakdown: leading coefficient vanishes");
  const int qlo = a.lo() - b.lo();
  int qhi = max_hi;
  if (!a.exact_above()) qhi = std::min(qhi, a.hi() - b.lo());
  if (!b.exact_above()) qhi = std::min(qhi, b.hi() - b.lo() + qlo);
  if (qhi < qlo) throw WindowError("window underflow");
  std::vector<T> q;
  q.reserve(static_cast<std::size_t>(qhi - qlo + 1));
  for (int k = qlo; k <= qhi; ++k) {
    T v = a.at(k + b.lo());
    for (int j = 1; j <= k - qlo; ++j) {
      if (b.lo() + j > b.hi()) break;
      v -= b[b.lo() + j] * q[static_cast<std::size_t>(k - j - qlo)];
    }
    v /= b0;
    q.push_back(std::move(v));
  }
  return TruncatedSeries<T>(qlo, std::move(q), false, true);
}

template <class T>
Complex eval(const TruncatedSeries<T>& f, Complex z) {
  // Horner in z for n >= 0 and in 1/z for n < 0.
  Complex pos = 0.0, neg = 0.0;
  for (int n = f.hi(); n >= std::max(f.lo(), 0); --n) pos = pos * z + to_complex(f[n]);
  if (f.lo() < 0) {
    const Complex w = 1.0 / z;
    const int top = std::min(f.hi(), -1);
    for (int n = f.lo(); n <= top; ++n) neg = neg * w + to_complex(f[n]);
    neg *= std::pow(w, -top);
  }
  if (f.lo() > 0) pos *= std::pow(z, f.lo());
  return pos + neg;
}

template <class T>
Complex eval_on_circle(const TruncatedSeries<T>& f, double theta) {
  return eval(f, std::polar(1.0, theta));
}

// Exact evaluation of a rational series at a rational point (nonzero when the
// window reaches below zero).
Rational eval_exact(const ExactSeries& f, const Rational& x);

// Coefficients of (1 - z)^{-m} for n = 0..N.
Series binomial_series(double m, int N);
ExactSeries binomial_series_exact(const Rational& m, int N);

Series to_complex(const ExactSeries& s);

// Serialization: CSV rows `n,re,im` and JSON {lo, hi, coeffs: [[re, im], ...]}.
std::string to_csv(const Series& s);
std::string to_csv(const ExactSeries& s);
std::string to_json_text(const Series& s);
std::string to_json_text(const ExactSeries& s);
Series series_from_json_text(const std::string& text);
Series series_from_csv(const std::string& text);

}  // namespace ctk
