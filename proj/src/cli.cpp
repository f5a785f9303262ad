#include "ctk/cli.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <random>
#include <sstream>
#include <thread>

#include "ctk/cartan.hpp"
#include "ctk/errors.hpp"
#include "ctk/family.hpp"
#include "ctk/opuc.hpp"
#include "ctk/rsf.hpp"
#include "ctk/singularity.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace ctk::cli {

int worker_count() {
  int n = static_cast<int>(std::thread::hardware_concurrency());
  if (n <= 0) n = 1;
  if (const char* cap = std::getenv("TOOLKIT_THREADS")) {
    try {
      const int c = std::stoi(cap);
      if (c >= 1) n = std::min(n, c);
    } catch (const std::exception&) {
    }
  }
  return n;
}

namespace {

void dump_into(const json& j, std::string& s, int depth) {
  const std::string pad(static_cast<std::size_t>(2 * (depth + 1)), ' ');
  const std::string close(static_cast<std::size_t>(2 * depth), ' ');
  switch (j.type()) {
    case json::value_t::object: {
      if (j.empty()) {
        s += "{}";
        return;
      }
      s += "{\n";
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) s += ",\n";
        first = false;
        s += pad + json(it.key()).dump() + ": ";
        dump_into(it.value(), s, depth + 1);
      }
      s += "\n" + close + "}";
      return;
    }
    case json::value_t::array: {
      if (j.empty()) {
        s += "[]";
        return;
      }
      s += "[\n";
      bool first = true;
      for (const auto& v : j) {
        if (!first) s += ",\n";
        first = false;
        s += pad;
        dump_into(v, s, depth + 1);
      }
      s += "\n" + close + "]";
      return;
    }
    case json::value_t::number_float: {
      const double v = j.get<double>();
      if (!std::isfinite(v)) {
        s += "null";
        return;
      }
      char buf[40];
      std::snprintf(buf, sizeof buf, "%.17g", v);
      s += buf;
      return;
    }
    default:
      s += j.dump();
  }
}

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

json cjson(Complex z) { return json::array({z.real(), z.imag()}); }

// Collects outputs and writes them plus the manifest.
class Run {
 public:
  Run(std::string command, fs::path dir, json config)
      : command_(std::move(command)), dir_(std::move(dir)), config_(std::move(config)),
        start_(std::chrono::steady_clock::now()) {
    fs::create_directories(dir_);
  }

  void write(const std::string& name, const std::string& text) {
    std::ofstream f(dir_ / name, std::ios::binary);
    if (!f) throw UsageError("cannot write " + (dir_ / name).string());
    f << text;
    outputs_.push_back(name);
  }
  void write_json(const std::string& name, const json& j) { write(name, dump_json(j) + "\n"); }

  void finish(int exit_code) {
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    json m;
    m["command"] = command_;
    m["config"] = config_;
    m["version"] = CTK_VERSION;
    m["wall_time_seconds"] = secs;
    m["outputs"] = outputs_;
    m["exit_code"] = exit_code;
    std::ofstream f(dir_ / "manifest.json", std::ios::binary);
    f << dump_json(m) << "\n";
  }

  const fs::path& dir() const { return dir_; }

 private:
  std::string command_;
  fs::path dir_;
  json config_;
  std::chrono::steady_clock::time_point start_;
  std::vector<std::string> outputs_;
};

std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw UsageError("cannot read '" + path + "'");
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

// Inline JSON if it looks like JSON, otherwise a file path.
std::vector<std::vector<long>> load_cartan(const std::string& arg) {
  const auto first = arg.find_first_not_of(" \t\n");
  if (first != std::string::npos && (arg[first] == '[' || arg[first] == '{')) return parse_cartan_json(arg);
  return parse_cartan_json(read_file(arg));
}

VerblunskySequence parse_alpha_list(const std::string& text) {
  std::vector<Complex> v;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) v.push_back(parse_complex(item));
  if (v.empty()) throw UsageError("empty alpha list");
  return VerblunskySequence(std::move(v));
}

std::string poly_text(const ExactSeries& p) {
  std::string s;
  for (int n = p.lo(); n <= p.hi(); ++n) {
    Rational c = p[n];
    if (c == 0) continue;
    const bool neg = c < 0;
    if (neg) c = -c;
    if (s.empty())
      s += neg ? "-" : "";
    else
      s += neg ? " - " : " + ";
    const bool unit = c == 1 && n != 0;
    if (!unit) s += to_string(c);
    if (n >= 1) s += (unit ? "" : " ") + std::string("z");
    if (n >= 2) s += "^" + std::to_string(n);
  }
  return s.empty() ? "0" : s;
}

json exact_coeffs(const ExactSeries& p) {
  json a = json::array();
  for (int n = p.lo(); n <= p.hi(); ++n) a.push_back(to_string(p[n]));
  return a;
}

// ---- family verify ------------------------------------------------------------

struct Identity {
  std::string name;
  std::string lhs;
  std::string rhs;
  bool ok = false;
};

json verify_family(const FamilyParams& p, int max_n, std::vector<Identity>& ids, json& errata_report) {
  json out;
  for (int n = 1; n <= max_n; ++n) {
    const auto r = supertelescope_check(p, n);
    ids.push_back({"supertelescope n=" + std::to_string(n), to_string(r.lhs), to_string(r.rhs), r.equal});
  }
  {
    const auto g = supertelescope_generating_check(p, max_n);
    std::string l, r;
    for (std::size_t k = 0; k < g.lhs.size(); ++k) {
      l += (k ? "," : "") + to_string(g.lhs[k]);
      r += (k ? "," : "") + to_string(g.binomial[k]);
    }
    ids.push_back({"generating function vs (1-z)^(-m)", l, r, g.equal});
  }
  {
    // Product of (1 - alpha_n^2) to 10^6 with the remaining tail folded in.
    const double beta = p.beta();
    constexpr int K = 1000000;
    double logp = 0.0;
    for (int n = 1; n <= K; ++n) logp += std::log1p(-std::pow(alpha_beta(p, n), 2));
    logp -= 1.0 / (beta * (1.0 + (K + 0.5) * beta));
    const double direct = std::exp(logp);
    const double closed = normalization_constants(p).prod_one_minus_alpha_sq;
    ids.push_back({"prod(1-alpha^2) direct vs closed form", fmt17(direct), fmt17(closed),
                   std::abs(direct - closed) <= 1e-6});
  }
  {
    // Trig polynomial for integer m: the trapezoid rule is exact. Otherwise
    // the cusp at theta = 0 limits the rule to about h^{1+m}.
    const CircleMeasure mu = family_measure(p, 64);
    const double mass = mu.mass(1 << 16);
    const double tol = p.integral_m() ? 1e-10 : 1e-4;
    ids.push_back({"density mass", fmt17(mass), "1", std::abs(mass - 1.0) <= tol});
  }
  if (auto mi = p.integral_m()) {
    const int m = *mi;
    if (m <= 40) {
      const ExactSeries a = fm_series_exact(m, m), b = fm_integral(m);
      ids.push_back({"F_m Gamma form vs factorial form", poly_text(a), poly_text(b), a == b});
      const auto fourier = one_minus_cos_power_coefficients(m);
      const Rational c0 = fourier[static_cast<std::size_t>(m)];
      for (int n = 1; n <= m; ++n) {
        const Rational cn = mu_moments_closed(m, n);
        Rational twice = 2 * cn;
        twice.canonicalize();
        ids.push_back({"F_m z^" + std::to_string(n) + " = 2 c_n", to_string(b[n]), to_string(twice), b[n] == twice});
        Rational direct = fourier[static_cast<std::size_t>(m + n)] / c0;
        direct.canonicalize();
        ids.push_back({"c_" + std::to_string(n) + " closed vs Fourier expansion", to_string(cn), to_string(direct),
                       cn == direct});
      }
      if (m <= 4) {
        const MomentSequence mom = moments_quadrature(family_measure(p, 64), 10, 8192);
        double worst = 0.0;
        for (int n = 0; n <= 10; ++n)
          worst = std::max(worst, std::abs(mom.at(n) - Complex(mu_moments_closed(m, n).get_d(), 0.0)));
        ids.push_back({"moments closed vs quadrature (max |diff|)", fmt17(worst), "<= 1e-10", worst <= 1e-10});
      }
    }
  }
  // Published example polynomials against the computed ones and the errata table.
  const ErrataTable& et = errata_table();
  errata_report = json::array();
  for (const auto& [name, published] : et.published_examples) {
    const int m = std::stoi(name.substr(2));
    const ExactSeries comp = fm_integral(m);
    for (int n = 0; n < static_cast<int>(published.size()); ++n) {
      const Rational c = comp.at(n);
      if (c == published[static_cast<std::size_t>(n)]) continue;
      bool documented = false;
      for (const auto& e : et.entries)
        if (e.object == name && e.power && *e.power == n && parse_rational(e.published) == published[static_cast<std::size_t>(n)] &&
            parse_rational(e.computed) == c)
          documented = true;
      json row;
      row["object"] = name;
      row["power"] = n;
      row["published"] = to_string(published[static_cast<std::size_t>(n)]);
      row["computed"] = to_string(c);
      row["documented"] = documented;
      errata_report.push_back(row);
      ids.push_back({name + " z^" + std::to_string(n) + " published value is documented in the errata table",
                     to_string(published[static_cast<std::size_t>(n)]), to_string(c), documented});
    }
  }
  for (const auto& e : et.entries) {
    if (e.kind != "typography") continue;
    json row;
    row["object"] = e.object;
    row["published"] = e.published;
    row["computed"] = e.computed;
    row["documented"] = true;
    errata_report.push_back(row);
  }
  return out;
}

int cmd_family_verify(const std::string& beta_text, int max_n, Run& run, std::ostream& out, std::ostream& err) {
  const FamilyParams p = FamilyParams::exact(parse_rational(beta_text));
  std::vector<Identity> ids;
  json errata;
  verify_family(p, max_n, ids, errata);
  json table = json::array();
  const Identity* first_fail = nullptr;
  for (const auto& id : ids) {
    json row;
    row["identity"] = id.name;
    row["lhs"] = id.lhs;
    row["rhs"] = id.rhs;
    row["verdict"] = id.ok;
    table.push_back(row);
    if (!id.ok && !first_fail) first_fail = &id;
  }
  json doc;
  doc["beta"] = to_string(p.beta_exact());
  doc["m"] = to_string(p.m_exact());
  doc["identities"] = table;
  doc["errata"] = errata;
  doc["all_verified"] = first_fail == nullptr;
  run.write_json("verify.json", doc);
  out << ids.size() << " identities checked for beta = " << to_string(p.beta_exact()) << "\n";
  if (first_fail) {
    err << "verification failed: " << first_fail->name << "\n  lhs = " << first_fail->lhs
        << "\n  rhs = " << first_fail->rhs << "\n";
    return kExitVerification;
  }
  out << "all identities hold\n";
  return kExitOk;
}

int cmd_family_fm(int m, Run& run, std::ostream& out) {
  const ExactSeries f = fm_integral(m);
  json doc;
  doc["m"] = m;
  doc["coefficients"] = exact_coeffs(f);
  doc["polynomial"] = poly_text(f);
  run.write_json("fm.json", doc);
  out << "F_" << m << "(z) = " << poly_text(f) << "\n";
  return kExitOk;
}

// ---- verblunsky ---------------------------------------------------------------

int cmd_forward(const std::string& density, const std::string& beta, int N, int grid, const std::string& format,
                Run& run, std::ostream& out) {
  CircleMeasure mu = [&] {
    if (!beta.empty()) return family_measure(FamilyParams::exact(parse_rational(beta)), grid);
    if (density.empty()) throw UsageError("verblunsky forward needs --density FILE or --beta p/q");
    return density_from_csv(read_file(density));
  }();
  const ForwardResult r = verblunsky_forward(mu, N, grid);
  if (format == "csv") {
    run.write("alpha.csv", alpha_to_csv(r.alpha));
  } else {
    json doc;
    json a = json::array();
    for (const auto& v : r.alpha.values) a.push_back(cjson(v));
    doc["alpha"] = a;
    doc["energies"] = r.energies;
    doc["szego_mismatch"] = r.szego_mismatch;
    run.write_json("alpha.json", doc);
  }
  out << "computed " << r.alpha.size() << " Verblunsky coefficients (Szego mismatch " << fmt17(r.szego_mismatch)
      << ")\n";
  return kExitOk;
}

int cmd_inverse(const std::string& alpha_list, const std::string& beta, int N, int grid, int moments, Run& run,
                std::ostream& out) {
  VerblunskySequence a;
  if (!beta.empty())
    a = family_alphas(FamilyParams::exact(parse_rational(beta)), N);
  else if (!alpha_list.empty())
    a = parse_alpha_list(alpha_list);
  else
    throw UsageError("verblunsky inverse needs --alpha LIST or --beta p/q with --N");
  const CircleMeasure mu = bernstein_szego_density(a, grid);
  run.write("density.csv", density_to_csv(mu, grid));
  run.write("moments.csv", moments_to_csv(moments_quadrature(mu, moments, std::max(grid, 8 * moments))));
  out << "density and moments written for " << a.size() << " coefficients\n";
  return kExitOk;
}

// ---- rsf converge ---------------------------------------------------------------

std::vector<int> parse_int_list(const std::string& text) {
  std::vector<int> v;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      v.push_back(std::stoi(item));
    } catch (const std::exception&) {
      throw UsageError("cannot parse integer '" + item + "'");
    }
  }
  return v;
}

int cmd_rsf_converge(const std::string& beta, const std::string& levels, int max_n, bool exact, Run& run,
                     std::ostream& out) {
  const FamilyParams p = FamilyParams::exact(parse_rational(beta));
  const std::vector<int> lv = parse_int_list(levels);
  const ConvergenceReport rep = product_convergence(p, lv, max_n);
  std::string csv = "N,n,sum_coeff,sum_target,delta_coeff,delta_target\n";
  for (const auto& r : rep.rows)
    csv += std::to_string(r.N) + "," + std::to_string(r.n) + "," + fmt17(r.sum_coeff) + "," + fmt17(r.sum_target) +
           "," + fmt17(r.delta_coeff) + "," + fmt17(r.delta_target) + "\n";
  run.write("converge.csv", csv);
  json doc;
  json slopes;
  for (const auto& [n, s] : rep.slopes) slopes[std::to_string(n)] = s;
  doc["slopes"] = slopes;
  doc["beta"] = to_string(p.beta_exact());
  if (exact) {
    json ex = json::array();
    for (int N : lv) {
      if (N > kMaxProductFactorsExact) continue;
      const ExactProduct pp = partial_product(family_alphas_exact(p, N), N, max_n);
      json row;
      row["N"] = N;
      json c = json::array();
      for (int n = 0; n <= max_n; ++n) {
        Rational v = pp.delta.at(n) + (n >= 1 ? pp.gamma.at(n) : Rational(0));
        v.canonicalize();
        c.push_back(to_string(v));
      }
      row["sum_coeffs"] = c;
      ex.push_back(row);
    }
    doc["exact"] = ex;
  }
  run.write_json("converge.json", doc);
  for (const auto& [n, s] : rep.slopes) out << "n=" << n << " log-log slope " << fmt17(s) << "\n";
  return kExitOk;
}

// ---- toda -----------------------------------------------------------------------

int cmd_toda_integrate(const std::string& cartan, const std::string& x0s, const std::string& path, double rtol,
                       double atol, Run& run, std::ostream& out) {
  const GeneralizedCartanMatrix g = validate_gcm(load_cartan(cartan));
  TodaState x0 = parse_state(x0s);
  const std::vector<Complex> pts = parse_path(path);
  x0.t = pts.front();
  IntegratorOptions io;
  io.rtol = rtol;
  io.atol = atol;
  const Trajectory tr = integrate_complex(g, x0, pts, io);
  std::string csv = "t_re,t_im";
  for (int j = 1; j <= g.n; ++j) csv += ",a" + std::to_string(j) + "_re,a" + std::to_string(j) + "_im";
  for (int j = 1; j <= g.n; ++j) csv += ",b" + std::to_string(j) + "_re,b" + std::to_string(j) + "_im";
  csv += ",H_re,H_im\n";
  for (std::size_t k = 0; k < tr.states.size(); ++k) {
    const auto& s = tr.states[k];
    csv += fmt17(s.t.real()) + "," + fmt17(s.t.imag());
    for (const auto& v : s.a) csv += "," + fmt17(v.real()) + "," + fmt17(v.imag());
    for (const auto& v : s.b) csv += "," + fmt17(v.real()) + "," + fmt17(v.imag());
    csv += "," + fmt17(tr.H_values[k].real()) + "," + fmt17(tr.H_values[k].imag()) + "\n";
  }
  run.write("trajectory.csv", csv);
  json st;
  st["accepted"] = tr.stats.accepted;
  st["rejected"] = tr.stats.rejected;
  st["max_error_estimate"] = tr.stats.max_error_estimate;
  st["max_H_drift"] = tr.max_H_drift;
  st["blew_up"] = tr.blew_up;
  st["blowup_reason"] = tr.blowup_reason;
  st["last_t"] = cjson(tr.last.t);
  run.write_json("trajectory_stats.json", st);
  out << tr.stats.accepted << " steps, H drift " << fmt17(tr.max_H_drift);
  if (tr.blew_up) out << ", blow-up (" << tr.blowup_reason << ") after t = " << tr.last.t;
  out << "\n";
  return kExitOk;
}

json balance_json(const Balance& b) {
  json j;
  j["support"] = b.support;
  json c = json::array();
  for (const auto& r : b.residues) c.push_back(to_string(r));
  j["residues"] = c;
  json rho = json::object();
  for (const auto& [k, v] : b.off_support_rho) rho[std::to_string(k)] = to_string(v);
  j["off_support_rho"] = rho;
  j["lambdas"] = b.lambdas;
  json ex = json::array();
  for (const auto& e : b.exponents) ex.push_back(e.text);
  j["kovalevskaya_exponents"] = ex;
  j["all_integer"] = b.all_integer;
  return j;
}

int cmd_toda_analyze(const std::string& cartan, const std::string& x0s, const std::string& region, int grid,
                     Run& run, std::ostream& out) {
  const auto A = load_cartan(cartan);
  const Classification cl = validate_and_classify(A);
  const BalanceReport br = balances_and_exponents(cl.gcm);
  json doc;
  doc["class"] = to_string(cl.cls);
  doc["irreducible"] = cl.irreducible;
  doc["determinant"] = to_string(cl.det);
  json d = json::array();
  for (const auto& v : cl.gcm.d) d.push_back(to_string(v));
  doc["symmetrizer"] = d;
  json bal = json::array();
  for (const auto& b : br.balances) bal.push_back(balance_json(b));
  doc["balances"] = bal;
  doc["has_full_balance"] = br.has_full_balance;
  doc["singular_supports"] = br.singular_supports;
  out << "class " << to_string(cl.cls) << "\n";
  if (!br.has_full_balance) out << "no full balance\n";
  for (const auto& b : br.balances) {
    out << "balance on {";
    for (std::size_t k = 0; k < b.support.size(); ++k) out << (k ? "," : "") << b.support[k] + 1;
    out << "}: c = (";
    for (std::size_t k = 0; k < b.residues.size(); ++k) out << (k ? ", " : "") << to_string(b.residues[k]);
    out << "), exponents {";
    for (std::size_t k = 0; k < b.exponents.size(); ++k) out << (k ? ", " : "") << b.exponents[k].text;
    out << "}" << (b.all_integer ? "" : " non-integer") << "\n";
  }
  if (!x0s.empty() && !region.empty()) {
    ScanOptions so;
    so.grid = grid;
    so.threads = worker_count();
    const auto reps = singularity_scan(cl.gcm, parse_state(x0s), parse_region(region), so);
    json arr = json::array();
    for (const auto& r : reps) {
      json j;
      j["t0"] = cjson(r.t0);
      j["t0_uncertainty"] = r.t0_uncertainty;
      j["support"] = r.support;
      json res = json::array();
      for (const auto& c : r.residues) res.push_back(cjson(c));
      j["residues"] = res;
      j["exponents_a"] = r.exponents_a;
      j["exponents_b"] = r.exponents_b;
      j["fit_residual"] = r.fit_residual;
      j["residue_law"] = r.residue_law;
      j["balance"] = r.balance ? balance_json(*r.balance) : json(nullptr);
      j["verdict"] = to_string(r.verdict);
      arr.push_back(j);
    }
    run.write_json("singularities.json", arr);
    out << reps.size() << " singularities found\n";
  }
  run.write_json("analysis.json", doc);
  return kExitOk;
}

int cmd_toda_oracle(int rank, int seeds, double t_end, std::uint64_t seed, Run& run, std::ostream& out,
                    std::ostream& err) {
  const GeneralizedCartanMatrix g = validate_gcm(cartan_type_a(rank));
  std::vector<double> worst(static_cast<std::size_t>(seeds), 0.0);
  std::vector<std::string> notes(static_cast<std::size_t>(seeds));
  std::vector<std::thread> pool;
  const int nw = std::min(worker_count(), std::max(seeds, 1));
  for (int w = 0; w < nw; ++w)
    pool.emplace_back([&, w] {
      for (int s = w; s < seeds; s += nw) {
        std::mt19937_64 rng(seed + static_cast<std::uint64_t>(s));
        std::uniform_real_distribution<double> U(-0.5, 0.5);
        TodaState x0;
        for (int j = 0; j < rank; ++j) {
          x0.a.emplace_back(U(rng), 0.0);
          x0.b.emplace_back(U(rng), 0.0);
        }
        IntegratorOptions io;
        io.rtol = 1e-12;
        io.atol = 1e-14;
        double e = 0.0;
        try {
          constexpr int kSteps = 8;
          for (int k = 1; k <= kSteps; ++k) {
            const Complex t = t_end * k / kSteps;
            const TodaState ref = finite_solution(x0, t);
            const Trajectory tr = integrate_complex(g, x0, {0.0, t}, io);
            if (tr.blew_up) throw FactorizationBoundary("integrator blow-up before t");
            for (int j = 0; j < rank; ++j) {
              e = std::max(e, std::abs(ref.a[static_cast<std::size_t>(j)] - tr.last.a[static_cast<std::size_t>(j)]));
              e = std::max(e, std::abs(ref.b[static_cast<std::size_t>(j)] - tr.last.b[static_cast<std::size_t>(j)]));
            }
          }
        } catch (const Error& ex) {
          notes[static_cast<std::size_t>(s)] = ex.what();
          e = std::numeric_limits<double>::infinity();
        }
        worst[static_cast<std::size_t>(s)] = e;
      }
    });
  for (auto& th : pool) th.join();
  json doc;
  doc["rank"] = rank;
  doc["t_end"] = t_end;
  doc["seed"] = seed;
  json rows = json::array();
  double overall = 0.0;
  for (int s = 0; s < seeds; ++s) {
    json r;
    r["seed"] = seed + static_cast<std::uint64_t>(s);
    r["max_abs_diff"] = worst[static_cast<std::size_t>(s)];
    r["note"] = notes[static_cast<std::size_t>(s)];
    rows.push_back(r);
    overall = std::max(overall, worst[static_cast<std::size_t>(s)]);
  }
  doc["runs"] = rows;
  doc["max_abs_diff"] = overall;
  doc["verdict"] = overall <= 1e-6;
  run.write_json("oracle_compare.json", doc);
  out << "max |finite_solution - integrator| = " << fmt17(overall) << "\n";
  if (!(overall <= 1e-6)) {
    err << "verification failed: oracle vs integrator difference " << fmt17(overall) << " exceeds 1e-6\n";
    return kExitVerification;
  }
  return kExitOk;
}

}  // namespace

std::string dump_json(const json& j) {
  std::string s;
  dump_into(j, s, 0);
  return s;
}

TodaState parse_state(const std::string& text) {
  TodaState s;
  bool have_a = false, have_b = false;
  std::stringstream ss(text);
  std::string part;
  while (std::getline(ss, part, ',')) {
    const auto eq = part.find('=');
    if (eq == std::string::npos) throw UsageError("state entry '" + part + "' must look like a=... or b=...");
    std::string key = part.substr(0, eq);
    key.erase(0, key.find_first_not_of(' '));
    key.erase(key.find_last_not_of(' ') + 1);
    std::vector<Complex> vals;
    std::stringstream vs(part.substr(eq + 1));
    std::string v;
    while (std::getline(vs, v, ';')) vals.push_back(parse_complex(v));
    if (key == "a") {
      s.a = vals;
      have_a = true;
    } else if (key == "b") {
      s.b = vals;
      have_b = true;
    } else {
      throw UsageError("unknown state key '" + key + "' (expected a or b)");
    }
  }
  if (!have_a || !have_b) throw UsageError("state needs both a=... and b=..., e.g. a=0,b=1 or a=0;0,b=1;1");
  if (s.a.size() != s.b.size()) throw UsageError("state: a and b have different lengths");
  return s;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Verblunsky coefficients, root subgroup products and generalized Toda equations"};
  app.set_version_flag("--version", CTK_VERSION);
  app.fallthrough();
  app.require_subcommand(1);
  std::string outdir = "out";
  std::string format = "json";
  app.add_option("-o,--out", outdir, "output directory")->capture_default_str();
  app.add_option("--format", format, "csv or json where both apply")
      ->check(CLI::IsMember({"csv", "json"}))
      ->capture_default_str();

  json config;
  std::string command;
  std::function<int(Run&)> action;

  // verblunsky
  auto* verb = app.add_subcommand("verblunsky", "forward and inverse Verblunsky maps");
  verb->require_subcommand(1);
  std::string density, beta_s, alpha_s;
  int N = 20, grid = 8192, nmom = 20;
  auto* fwd = verb->add_subcommand("forward", "measure -> Verblunsky coefficients");
  fwd->add_option("--density", density, "CSV with theta,value rows on a uniform grid");
  fwd->add_option("--beta", beta_s, "use the family measure for this beta (p/q)");
  fwd->add_option("--N", N, "number of coefficients")->capture_default_str();
  fwd->add_option("--grid", grid, "quadrature grid size")->capture_default_str();
  fwd->callback([&] {
    command = "verblunsky forward";
    config = {{"density", density}, {"beta", beta_s}, {"N", N}, {"grid", grid}, {"format", format}};
    action = [&](Run& r) { return cmd_forward(density, beta_s, N, grid, format, r, out); };
  });
  auto* inv = verb->add_subcommand("inverse", "Verblunsky coefficients -> density and moments");
  inv->add_option("--alpha", alpha_s, "comma separated coefficients, e.g. 0.5,0.2+0.1i");
  inv->add_option("--beta", beta_s, "use alpha_n = 1/(1 + n beta), n <= N");
  inv->add_option("--N", N, "number of coefficients with --beta")->capture_default_str();
  inv->add_option("--grid", grid, "density grid size")->capture_default_str();
  inv->add_option("--moments", nmom, "number of moments")->capture_default_str();
  inv->callback([&] {
    command = "verblunsky inverse";
    config = {{"alpha", alpha_s}, {"beta", beta_s}, {"N", N}, {"grid", grid}, {"moments", nmom}};
    action = [&](Run& r) { return cmd_inverse(alpha_s, beta_s, N, grid, nmom, r, out); };
  });

  // family
  auto* fam = app.add_subcommand("family", "closed forms for alpha_n = 1/(1 + n beta)");
  fam->require_subcommand(1);
  int max_n = 8, m = 1;
  auto* ver = fam->add_subcommand("verify", "exact identity suite");
  ver->add_option("--beta", beta_s, "beta as p/q")->required();
  ver->add_option("--max-n", max_n, "largest n (<= 10)")->capture_default_str()->check(CLI::Range(1, 10));
  ver->callback([&] {
    command = "family verify";
    config = {{"beta", beta_s}, {"max_n", max_n}};
    action = [&](Run& r) { return cmd_family_verify(beta_s, max_n, r, out, err); };
  });
  auto* fm = fam->add_subcommand("fm", "exact F_m polynomial");
  fm->add_option("--m", m, "positive integer m")->required()->check(CLI::Range(1, 200));
  fm->callback([&] {
    command = "family fm";
    config = {{"m", m}};
    action = [&](Run& r) { return cmd_family_fm(m, r, out); };
  });

  // rsf
  auto* rsf = app.add_subcommand("rsf", "root subgroup products");
  rsf->require_subcommand(1);
  std::string levels = "10,20,50,100,200,500,1000";
  bool exact = false;
  auto* conv = rsf->add_subcommand("converge", "coefficient-versus-N tables for the family");
  conv->add_option("--beta", beta_s, "beta as p/q")->required();
  conv->add_option("--levels", levels, "comma separated N values")->capture_default_str();
  conv->add_option("--max-n", max_n, "largest coefficient index")->capture_default_str();
  conv->add_flag("--exact", exact, "also compute exact rational coefficients");
  conv->callback([&] {
    command = "rsf converge";
    config = {{"beta", beta_s}, {"levels", levels}, {"max_n", max_n}, {"exact", exact}};
    action = [&](Run& r) { return cmd_rsf_converge(beta_s, levels, max_n, exact, r, out); };
  });

  // toda
  auto* toda = app.add_subcommand("toda", "generalized Toda equations");
  toda->require_subcommand(1);
  std::string cartan, x0s, path, region;
  double rtol = 1e-10, atol = 1e-12, t_end = 0.4;
  int scan_grid = 8, rank = 2, seeds = 20;
  std::uint64_t seed = 1;
  auto* integ = toda->add_subcommand("integrate", "integrate along a complex-time polyline");
  integ->add_option("--cartan", cartan, "Cartan matrix JSON or file")->required();
  integ->add_option("--x0", x0s, "initial state, e.g. a=0,b=1 or a=0;0,b=1;1")->required();
  integ->add_option("--path", path, "polyline, e.g. 0->1+0.5i->2")->required();
  integ->add_option("--rtol", rtol)->capture_default_str();
  integ->add_option("--atol", atol)->capture_default_str();
  integ->callback([&] {
    command = "toda integrate";
    config = {{"cartan", cartan}, {"x0", x0s}, {"path", path}, {"rtol", rtol}, {"atol", atol}};
    action = [&](Run& r) { return cmd_toda_integrate(cartan, x0s, path, rtol, atol, r, out); };
  });
  auto* an = toda->add_subcommand("analyze", "classification, balances and singularity scan");
  an->add_option("--cartan", cartan, "Cartan matrix JSON or file")->required();
  an->add_option("--x0", x0s, "initial state for the scan");
  an->add_option("--region", region, "scan rectangle re0,im0,re1,im1");
  an->add_option("--grid", scan_grid, "rays per side")->capture_default_str();
  an->callback([&] {
    command = "toda analyze";
    config = {{"cartan", cartan}, {"x0", x0s}, {"region", region}, {"grid", scan_grid}};
    action = [&](Run& r) { return cmd_toda_analyze(cartan, x0s, region, scan_grid, r, out); };
  });
  auto* orc = toda->add_subcommand("oracle-compare", "LDU closed form vs integrator for type A");
  orc->add_option("--rank", rank, "rank of A_n")->capture_default_str()->check(CLI::Range(1, 11));
  orc->add_option("--seeds", seeds, "random initial conditions")->capture_default_str();
  orc->add_option("--t", t_end, "final real time")->capture_default_str();
  orc->add_option("--seed", seed, "first RNG seed")->capture_default_str();
  orc->callback([&] {
    command = "toda oracle-compare";
    config = {{"rank", rank}, {"seeds", seeds}, {"t", t_end}, {"seed", seed}};
    action = [&](Run& r) { return cmd_toda_oracle(rank, seeds, t_end, seed, r, out, err); };
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }
  if (!action) {
    err << "usage error: no command given\n";
    return kExitUsage;
  }
  try {
    Run r(command, outdir, config);
    const int code = action(r);
    r.finish(code);
    return code;
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const fs::filesystem_error& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  }
}

}  // namespace ctk::cli
