#include "ctk/series.hpp"

#include <iomanip>
#include <limits>
#include <sstream>

#include "json.hpp"

namespace ctk {

using nlohmann::json;

Rational eval_exact(const ExactSeries& f, const Rational& x) {
  if (f.lo() < 0 && x == 0) throw DomainError("Laurent series evaluated at zero");
  Rational acc = 0;
  for (int n = f.hi(); n >= f.lo(); --n) acc = acc * x + f[n];
  if (f.lo() > 0) {
    for (int k = 0; k < f.lo(); ++k) acc *= x;
  } else {
    for (int k = 0; k < -f.lo(); ++k) acc /= x;
  }
  return acc;
}

Series binomial_series(double m, int N) {
  if (!(m > 0)) throw DomainError("binomial_series: m must be positive");
  if (N < 0) throw DomainError("binomial_series: N must be non-negative");
  // Gamma(m+n) / (Gamma(m) n!) by its term ratio (m+n-1)/n.
  std::vector<Complex> c(static_cast<std::size_t>(N) + 1);
  double v = 1.0;
  c[0] = 1.0;
  for (int n = 1; n <= N; ++n) {
    v *= (m + n - 1) / n;
    c[static_cast<std::size_t>(n)] = v;
  }
  return Series(0, std::move(c), false, true);
}

ExactSeries binomial_series_exact(const Rational& m, int N) {
  if (m <= 0) throw DomainError("binomial_series: m must be positive");
  if (N < 0) throw DomainError("binomial_series: N must be non-negative");
  std::vector<Rational> c(static_cast<std::size_t>(N) + 1);
  Rational v = 1;
  c[0] = 1;
  for (int n = 1; n <= N; ++n) {
    v *= (m + n - 1);
    v /= n;
    c[static_cast<std::size_t>(n)] = v;
  }
  return ExactSeries(0, std::move(c), false, true);
}

Series to_complex(const ExactSeries& s) {
  std::vector<Complex> c;
  c.reserve(s.size());
  for (const auto& q : s.coeffs()) c.emplace_back(q.get_d(), 0.0);
  return Series(s.lo(), std::move(c), s.exact_above(), s.exact_below());
}

namespace {

std::string fmt17(double x) {
  std::ostringstream os;
  os << std::setprecision(std::numeric_limits<double>::max_digits10) << x;
  return os.str();
}

}  // namespace

std::string to_csv(const Series& s) {
  std::ostringstream os;
  os << "n,re,im\n";
  for (int n = s.lo(); n <= s.hi(); ++n) os << n << ',' << fmt17(s[n].real()) << ',' << fmt17(s[n].imag()) << '\n';
  return os.str();
}

std::string to_csv(const ExactSeries& s) {
  std::ostringstream os;
  os << "n,re,im\n";
  for (int n = s.lo(); n <= s.hi(); ++n) os << n << ',' << to_string(s[n]) << ",0\n";
  return os.str();
}

std::string to_json_text(const Series& s) {
  json j;
  j["lo"] = s.lo();
  j["hi"] = s.hi();
  j["exact_above"] = s.exact_above();
  j["exact_below"] = s.exact_below();
  json arr = json::array();
  for (const auto& c : s.coeffs()) arr.push_back({c.real(), c.imag()});
  j["coeffs"] = arr;
  return j.dump();
}

std::string to_json_text(const ExactSeries& s) {
  json j;
  j["lo"] = s.lo();
  j["hi"] = s.hi();
  j["exact_above"] = s.exact_above();
  j["exact_below"] = s.exact_below();
  json arr = json::array();
  for (const auto& c : s.coeffs()) arr.push_back({to_string(c), "0"});
  j["coeffs"] = arr;
  return j.dump();
}

Series series_from_json_text(const std::string& text) {
  const json j = json::parse(text);
  const int lo = j.at("lo").get<int>();
  const int hi = j.at("hi").get<int>();
  const auto& arr = j.at("coeffs");
  if (static_cast<int>(arr.size()) != hi - lo + 1) throw ContractError("series JSON: coeffs length does not match window");
  std::vector<Complex> c;
  for (const auto& pair : arr) {
    auto part = [](const json& v) {
      return v.is_string() ? parse_rational(v.get<std::string>()).get_d() : v.get<double>();
    };
    c.emplace_back(part(pair.at(0)), part(pair.at(1)));
  }
  return Series(lo, std::move(c), j.value("exact_above", false), j.value("exact_below", true));
}

Series series_from_csv(const std::string& text) {
  std::istringstream is(text);
  std::string line;
  std::vector<std::pair<int, Complex>> rows;
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == 'n' || line[0] == '#') continue;
    std::istringstream ls(line);
    std::string n, re, im;
    std::getline(ls, n, ',');
    std::getline(ls, re, ',');
    std::getline(ls, im, ',');
    rows.emplace_back(std::stoi(n), Complex(std::stod(re), im.empty() ? 0.0 : std::stod(im)));
  }
  if (rows.empty()) throw ContractError("series CSV: no rows");
  std::vector<Complex> c;
  for (std::size_t k = 0; k < rows.size(); ++k) {
    if (rows[k].first != rows[0].first + static_cast<int>(k)) throw ContractError("series CSV: indices must be consecutive");
    c.push_back(rows[k].second);
  }
  return Series(rows[0].first, std::move(c), false, true);
}

}  // namespace ctk
