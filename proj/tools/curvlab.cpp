// curvlab command line: verification runs, scans, branch sweeps and reports.
// Exit codes: 0 pass, 1 a verdict failed, 2 bad input or usage.

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iostream>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "curvlab/checks.hpp"
#include "curvlab/counterexample.hpp"
#include "curvlab/gelfand.hpp"
#include "curvlab/io/svg.hpp"
#include "curvlab/io/table.hpp"
#include "curvlab/levelset.hpp"
#include "curvlab/scan.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace curvlab;
using io::jnum;

namespace {

constexpr std::size_t kMaxRadialNodes = std::size_t{1} << 20;

struct ParamArgs {
  int n = 5;
  double p = 2.0;
  double r = 1.0;
  std::string q;
  bool exploration = false;
  std::string iso_mode = "sphere";
  double a2 = 0.0;
  double c3_margin = 2.0;
  std::optional<double> tol_slack;
  double tol_analytic = 1e-9;

  void attach(CLI::App* app, bool with_q = true) {
    app->add_option("--n", n, "dimension")->check(CLI::Range(2, 64));
    app->add_option("--p", p, "integrability exponent p >= 1");
    app->add_option("--r", r, "curvature exponent r in {0} or [1, inf)");
    if (with_q) app->add_option("--q", q, "target exponent (number or inf)");
    app->add_flag("--exploration", exploration, "admit r in (0,1), no verdicts");
    app->add_option("--iso-mode", iso_mode, "sphere | user")->check(CLI::IsMember({"sphere", "user"}));
    app->add_option("--a2", a2, "A2 for --iso-mode user");
    app->add_option("--c3-margin", c3_margin, "Trudinger margin in C3");
    app->add_option("--tol-slack", tol_slack, "relative discretization slack of verdicts");
    app->add_option("--tol-analytic", tol_analytic, "analytic tolerance of verdicts");
  }

  InequalityParams params() const {
    InequalityParams ip;
    ip.n = n;
    ip.p = p;
    ip.r = r;
    ip.exploration = exploration;
    if (!q.empty()) {
      try {
        ip.q = parse_exponent(q);
      } catch (const std::exception&) {
        throw Error(ErrorCode::MalformedInput, "bad --q '" + q + "'");
      }
    }
    ip.validate();
    return ip;
  }

  IsoperimetricConstants iso() const {
    if (iso_mode == "user") return IsoperimetricConstants::user(n, a2);
    return IsoperimetricConstants::sphere_equality(n);
  }

  Tolerance tol() const { return {tol_analytic, tol_slack}; }
};

json params_json(const InequalityParams& ip) {
  json j = {{"n", ip.n}, {"p", ip.p}, {"r", ip.r}, {"exploration", ip.exploration}};
  if (ip.q) j["q"] = ip.q->is_infinite() ? json("inf") : json(ip.q->value());
  return j;
}

json iso_json(const IsoperimetricConstants& iso) {
  return {{"A1", iso.A1}, {"A2", iso.A2}, {"mode", to_string(iso.a2_mode)}, {"caveat", iso.caveat()}};
}

// uniform in [0, 1) from the top 53 bits, identical on every platform
double unit(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

std::string part_of(const InequalityParams& ip) {
  if (detail::is_morrey_case(ip)) return "a";
  return exponent_regime(ip) == ExponentRegime::Critical ? "c" : "b";
}

void prepare(const fs::path& out) {
  std::error_code ec;
  fs::create_directories(out, ec);
  require(!ec, ErrorCode::InvalidArgument, "cannot create " + out.string());
}

ScalarField load_field(const fs::path& path) {
  if (path.extension() == ".csv") return read_field_csv(path);
  return read_field(path);
}

// --- verify ---

struct VerifyArgs {
  ParamArgs pa;
  std::string regime;
  bool builtin_suite = false;
  std::vector<std::string> profiles, fields;
  int random = 0;
  std::size_t res = 4097;
};

int cmd_verify(const VerifyArgs& a, const fs::path& out, std::uint64_t seed) {
  const InequalityParams ip = a.pa.params();
  const auto iso = a.pa.iso();
  require(a.res >= RadialProfile::kMinNodes && a.res <= kMaxRadialNodes, ErrorCode::InvalidArgument,
          "--res out of [16, 2^20]");
  json report = {{"command", "verify"}, {"params", params_json(ip)}, {"iso", iso_json(iso)}, {"part", part_of(ip)}};
  io::CsvTable csv({"case", "check", "regime", "lhs", "rhs", "ratio", "pass", "indeterminate", "error"});
  bool hard_failure = false;

  if (!a.regime.empty() && a.regime != part_of(ip)) {
    report["error"] = "WRONG_REGIME: (n,p,r) belongs to part (" + part_of(ip) + "), not (" + a.regime + ")";
    std::cout << report["error"].get<std::string>() << "\n";
    io::write_json(report, out / "verify.json");
    return 1;
  }
  if (ip.q) {
    const Validity val = regime_classify(ip);
    report["validity"] = to_string(val);
    if (val == Validity::Fails) {
      report["cases"] = json::array();
      report["all_pass"] = false;
      csv.row().add("regime").add("regime_classify").add(to_string(exponent_regime(ip)));
      for (int i = 0; i < 5; ++i) csv.add("");
      csv.add("regime FAILS");
      io::write_json(report, out / "verify.json");
      csv.write(out / "verify.csv");
      std::cout << "regime FAILS for q = " << a.pa.q << ": the inequality has no finite constant\n";
      return 1;
    }
  }

  // cases: (label, sample)
  std::vector<std::pair<std::string, std::function<std::unique_ptr<Sample>()>>> cases;
  const bool any_input = !a.profiles.empty() || !a.fields.empty() || a.random > 0;
  if (a.builtin_suite || !any_input)
    for (const auto& prof : builtin_profiles())
      cases.emplace_back(prof.name, [&prof, &a, n = ip.n] {
        return std::make_unique<RadialSample>(builtin_profile(n, prof, a.res));
      });
  for (const auto& f : a.profiles) {
    auto prof = std::make_shared<RadialProfile>(io::read_profile(f));
    require(prof->n() == ip.n, ErrorCode::MalformedInput, f + ": profile dimension differs from --n");
    cases.emplace_back(f, [prof] { return std::make_unique<RadialSample>(*prof); });
  }
  for (const auto& f : a.fields) {
    auto field = std::make_shared<ScalarField>(load_field(f));
    require(field->n() == ip.n, ErrorCode::MalformedInput, f + ": field dimension differs from --n");
    cases.emplace_back(f, [field] { return std::make_unique<FieldSample>(*field); });
  }
  std::mt19937_64 rng(seed);
  for (int k = 0; k < a.random; ++k) {
    const double e = 1.0 + 2.0 * unit(rng), b = 0.8 * unit(rng) - 0.4, c = 0.8 * unit(rng) - 0.4;
    char label[96];
    std::snprintf(label, sizeof label, "random%d(a=%.6f;b=%.6f;c=%.6f)", k, e, b, c);
    cases.emplace_back(label, [e, b, c, &a, n = ip.n] {
      return std::make_unique<RadialSample>(RadialProfile::sample(n, 1.0, a.res, [&](double x) {
        return x < 1.0 ? std::pow(1.0 - x * x, e) * (1.0 + b * x + c * x * x) : 0.0;
      }));
    });
  }

  json rows = json::array();
  int passed = 0, failed = 0, indeterminate = 0;
  for (const auto& [label, make] : cases) {
    csv.row().add(label);
    try {
      const auto sample = make();
      const Verdict v = regime_check(*sample, ip, iso, a.pa.c3_margin, a.pa.tol());
      json j = to_json(v);
      j["case"] = label;
      rows.push_back(j);
      csv.add(v.check).add(to_string(v.regime)).add(v.lhs).add(v.rhs).add(v.ratio).add(v.pass).add(v.indeterminate).add("");
      if (v.indeterminate)
        ++indeterminate;
      else if (v.pass)
        ++passed;
      else
        ++failed;
    } catch (const Error& e) {
      rows.push_back({{"case", label}, {"error", e.what()}, {"code", std::string(to_string(e.code()))}});
      for (int i = 0; i < 7; ++i) csv.add("");
      csv.add(std::string(to_string(e.code())));
      if (e.code() == ErrorCode::MalformedInput) throw;
      hard_failure = true;
      ++failed;
    }
  }
  report["cases"] = rows;
  report["summary"] = {{"passed", passed}, {"failed", failed}, {"indeterminate", indeterminate}};
  report["all_pass"] = failed == 0 && !hard_failure;
  io::write_json(report, out / "verify.json");
  csv.write(out / "verify.csv");
  std::cout << "verify part (" << part_of(ip) << "): " << passed << " pass, " << failed << " fail, " << indeterminate
            << " indeterminate\n";
  return failed == 0 && !hard_failure ? 0 : 1;
}

// --- scan ---

struct ScanArgs {
  ParamArgs pa;
  std::string family = "PEAK";
  std::size_t k_max = 24;
  std::size_t res = 2049;
};

int cmd_scan(const ScanArgs& a, const fs::path& out) {
  const InequalityParams ip = a.pa.params();
  require(ip.q.has_value(), ErrorCode::MissingExponent, "scan needs --q");
  require(a.res >= RadialProfile::kMinNodes && a.res <= kMaxRadialNodes, ErrorCode::InvalidArgument,
          "--res out of [16, 2^20]");
  ScanOptions opt;
  opt.nodes = a.res;
  const ScanResult s = sharpness_scan(parse_family(a.family), ip, a.k_max, opt);
  io::CsvTable csv({"k", "scale", "quotient"});
  std::vector<double> ks;
  for (std::size_t k = 0; k < s.quotients.size(); ++k) {
    csv.row().add(k + 1).add(s.scales[k]).add(s.quotients[k]);
    ks.push_back(static_cast<double>(k + 1));
  }
  const bool fails = s.validity == Validity::Fails;
  const bool consistent = fails ? s.growth >= 10.0 : s.within_bound;
  json j = {{"command", "scan"},
            {"params", params_json(ip)},
            {"family", to_string(s.family)},
            {"validity", to_string(s.validity)},
            {"growth", jnum(s.growth)},
            {"tail_increasing", s.tail_increasing},
            {"within_bound", s.within_bound},
            {"consistent", consistent}};
  if (s.bound) j["bound"] = jnum(*s.bound);
  csv.write(out / "scan.csv");
  io::write_json(j, out / "scan.json");
  io::Plot plot{"sharpness scan " + to_string(s.family) + " (" + to_string(s.validity) + ")", "k", "quotient", "",
                false, true, false, {{"quotient", ks, s.quotients, "#1f77b4", true, false}}, {}};
  if (s.bound) plot.hlines.push_back(*s.bound);
  io::write_svg(plot, out / "scan.svg");
  std::cout << "scan " << to_string(s.family) << ": " << to_string(s.validity) << ", growth " << io::num(s.growth)
            << (consistent ? " (consistent)" : " (inconsistent)") << "\n";
  return consistent ? 0 : 1;
}

// --- counterexample ---

struct CounterArgs {
  double p = 1.0, r = 0.5;
  std::string q;
  std::vector<double> eps0 = {0.2, 0.1, 0.05, 0.025, 0.0125};
  int res = 256;
  int n = 2;
  std::string cutoff = "SMOOTHSTEP";
  double cells_per_band = 0.0;
};

int run_counterexample(const CounterArgs& a, const fs::path& out) {
  require(a.n == 2 ? a.res <= 512 : a.res <= 128, ErrorCode::InvalidArgument, "--res above 512^2 / 128^3");
  CubeParams cp;
  cp.nodes = a.res;
  cp.n = a.n;
  cp.cells_per_band = a.cells_per_band;
  std::optional<double> q;
  if (!a.q.empty()) {
    try {
      q = std::stod(a.q);
    } catch (const std::exception&) {
      throw Error(ErrorCode::MalformedInput, "bad --q '" + a.q + "'");
    }
  }
  const auto rep = counterexample_report(a.p, a.r, a.eps0, parse_cutoff(a.cutoff), cp, q);
  io::CsvTable csv({"eps0", "nodes", "energy", "lq_norm", "ratio", "convergence"});
  std::vector<double> e, en, ra, fit;
  for (const auto& row : rep.rows) {
    csv.row().add(row.eps0).add(row.nodes).add(row.energy).add(row.lq_norm).add(row.ratio).add(to_string(row.convergence));
    e.push_back(row.eps0);
    en.push_back(row.energy);
    ra.push_back(row.ratio);
  }
  // fitted line through the geometric mean
  double lx = 0, ly = 0;
  for (std::size_t i = 0; i < e.size(); ++i) lx += std::log(e[i]) / e.size(), ly += std::log(en[i]) / e.size();
  for (double x : e) fit.push_back(std::exp(ly + rep.slope * (std::log(x) - lx)));
  json j = {{"command", "counterexample"}, {"p", rep.p},          {"r", rep.r},
            {"q", jnum(rep.q)},            {"n", a.n},            {"cutoff", to_string(rep.cutoff)},
            {"slope", jnum(rep.slope)},    {"theory_slope", rep.theory_slope},
            {"ratio_monotone", rep.ratio_monotone}, {"ratio_growth", jnum(rep.ratio_growth)},
            {"verdict", to_string(rep.verdict)}};
  csv.write(out / "counterexample.csv");
  io::write_json(j, out / "counterexample.json");
  io::Plot plot{"smoothed cube, p = " + io::num(a.p) + ", r = " + io::num(a.r) + ": " + to_string(rep.verdict),
                "eps0", "energy", "LHS/RHS ratio", true, true, true,
                {{"energy", e, en, "#1f77b4", true, false},
                 {"fit, slope " + io::num(rep.slope), e, fit, "#888888", false, false},
                 {"ratio", e, ra, "#d62728", true, true}},
                {}};
  io::write_svg(plot, out / "counterexample.svg");
  std::cout << "counterexample: " << to_string(rep.verdict) << ", slope " << io::num(rep.slope) << " (theory "
            << io::num(rep.theory_slope) << "), ratio growth " << io::num(rep.ratio_growth) << "\n";
  return 0;
}

// --- chain ---

struct ChainArgs {
  std::string field;
  std::string shape = "radial";
  int res = 256;
  double r = 1.0;
  int levels = 64;
  double tol_talenti = 1.02, tol_ms = 1.03, min_fraction = 0.95;
};

int run_chain(const ChainArgs& a, const fs::path& out) {
  ScalarField f = [&] {
    if (!a.field.empty()) return load_field(a.field);
    require(a.res >= ScalarField::kMinShape && a.res <= 512, ErrorCode::InvalidArgument, "--res out of [32, 512]");
    if (a.shape == "ellipse")
      return ScalarField::sample(2, a.res, 1.25, [](const Point& x) {
        const double q = std::max(0.0, 1.0 - x[0] * x[0] - 4.0 * x[1] * x[1]);
        return q * q;
      });
    require(a.shape == "radial", ErrorCode::InvalidArgument, "--shape must be radial or ellipse");
    return ScalarField::sample(2, a.res, 1.25, [](const Point& x) {
      const double q = std::max(0.0, 1.0 - x[0] * x[0] - x[1] * x[1]);
      return q * q;
    });
  }();
  const auto iso = IsoperimetricConstants::sphere_equality(f.n());
  const auto stats = verify_key_chain(f, a.r, default_t_grid(f, a.levels), iso);
  io::CsvTable csv({"t", "V", "P", "curv_int", "ratio_talenti", "ratio_ms", "ratio_chain"});
  std::vector<double> t, rt, rm, rc;
  int sampled = 0, ok_t = 0, ok_ms = 0, ok_chain = 0, irregular = 0;
  for (const auto& s : stats) {
    csv.row().add(s.t).add(s.V).add(s.P).add(s.curv_int).add(s.ratio_talenti).add(s.ratio_ms).add(s.ratio_chain);
    if (s.empty) continue;
    ++sampled;
    irregular += s.irregular;
    ok_t += s.ratio_talenti <= a.tol_talenti;
    ok_ms += s.ratio_ms <= a.tol_ms;  // NaN (irregular) counts as a miss
    ok_chain += s.ratio_chain <= a.tol_ms;
    t.push_back(s.t);
    rt.push_back(s.ratio_talenti);
    rm.push_back(s.ratio_ms);
    rc.push_back(s.ratio_chain);
  }
  const auto frac = [&](int k) { return sampled ? static_cast<double>(k) / sampled : 0.0; };
  const bool pass = sampled > 0 && frac(ok_t) >= a.min_fraction && frac(ok_ms) >= a.min_fraction &&
                    frac(ok_chain) >= a.min_fraction;
  json j = {{"command", "chain"},
            {"n", f.n()},
            {"r", a.r},
            {"levels", sampled},
            {"irregular_levels", irregular},
            {"fraction_talenti_ok", frac(ok_t)},
            {"fraction_ms_ok", frac(ok_ms)},
            {"fraction_chain_ok", frac(ok_chain)},
            {"distribution_nonincreasing", distribution_nonincreasing(stats)},
            {"iso", iso_json(iso)},
            {"pass", pass}};
  csv.write(out / "chain.csv");
  io::write_json(j, out / "chain.json");
  io::Plot plot{"level-set chain ratios", "t", "ratio", "", false, false, false,
                {{"talenti", t, rt, "#1f77b4", false, false},
                 {"ms", t, rm, "#2ca02c", false, false},
                 {"chain", t, rc, "#d62728", false, false}},
                {1.0}};
  io::write_svg(plot, out / "chain.svg");
  std::cout << "chain: " << sampled << " levels, talenti ok " << io::num(frac(ok_t)) << ", ms ok "
            << io::num(frac(ok_ms)) << ", chain ok " << io::num(frac(ok_chain)) << (pass ? " PASS" : " FAIL") << "\n";
  return pass ? 0 : 1;
}

// --- gelfand ---

struct GelfandArgs {
  int n = 2;
  std::string f = "exp";
  double m_max = 100.0;
  std::size_t points = 64;
  double m_ratio = 1e-3;
  std::size_t res = 2048;
  double tol_abs = 1e-10, tol_rel = 1e-8, tol_eig = 1e-6;
  int levels = 16;
};

struct EstimateTally {
  int points = 0, checks = 0;
  json failures = json::array();
  void record(bool pass, const std::string& what, double m) {
    ++checks;
    if (!pass) failures.push_back({{"m", m}, {"check", what}});
  }
};

EstimateTally run_estimates(const ExtremalEstimate& e, const Nonlinearity& nl, const GelfandOptions& o, int levels) {
  EstimateTally t;
  const int n = e.u_star_proxy.n();
  const auto iso = IsoperimetricConstants::sphere_equality(n);
  for (const auto& p : e.branch) {
    if (p.mu1 < -tol_eig(n, o)) continue;
    ++t.points;
    for (const auto& tf : builtin_test_functions(p)) t.record(stability_geometric_check(p, nl, tf, o).pass, "stability " + tf.label, p.m);
    std::vector<double> s;
    for (int k = 1; k <= levels; ++k) s.push_back(p.m * k / levels);
    if (n >= 5)
      for (const auto& c : lq_estimate_check(p, nl, s, iso, o)) t.record(c.pass, "lq s=" + io::num(c.param), p.m);
    if (n <= 3)
      for (const auto& c : linf_estimate_check(p, s, iso, o)) t.record(c.pass, "linf s=" + io::num(c.param), p.m);
    if (n >= 3) {
      const double q = n >= 5 ? 2.0 * n / (n - 4.0) : n / (n - 2.0);
      const double pq = 2.0 * q / (q + 1.0);
      std::vector<double> ps = {1.0, pq / 1.1};
      if (4.0 / 3.0 < pq) ps.push_back(4.0 / 3.0);
      for (double pe : ps)
        t.record(gradient_estimate_check(p, nl, q, pe).verdict.pass, "gradient p=" + io::num(pe), p.m);
    }
    const auto ph = pohozaev_and_nedev(p);
    t.record(ph.identity_residual <= 1e-6, "pohozaev identity", p.m);
    t.record(ph.h1_bound_pass, "nedev h1 bound", p.m);
  }
  return t;
}

int run_gelfand(const GelfandArgs& a, const fs::path& out) {
  require(a.res >= RadialProfile::kMinNodes && a.res <= kMaxRadialNodes, ErrorCode::InvalidArgument,
          "--res out of [16, 2^20]");
  const Nonlinearity nl = Nonlinearity::parse(a.f);
  ExtremalOptions o;
  o.m_max = a.m_max;
  o.points = a.points;
  o.m_ratio = a.m_ratio;
  o.solver.nodes = a.res;
  o.solver.abs_tol = a.tol_abs;
  o.solver.rel_tol = a.tol_rel;
  o.solver.tol_eig_factor = a.tol_eig;
  const ExtremalEstimate e = extremal_estimate(a.n, nl, o);

  io::CsvTable csv({"m", "lambda", "mu1", "L1", "L2", "H1_grad", "Lqstar", "J", "residual"});
  std::vector<double> m, lam, mu;
  for (const auto& p : e.branch) {
    csv.row().add(p.m).add(p.lambda).add(p.mu1).add(p.norms.L1).add(p.norms.L2).add(p.norms.H1_grad);
    if (p.norms.Lq_star)
      csv.add(*p.norms.Lq_star);
    else
      csv.add("");
    csv.add(p.norms.J).add(p.residual);
    m.push_back(p.m);
    lam.push_back(p.lambda);
    mu.push_back(p.mu1);
  }
  const EstimateTally tally = run_estimates(e, nl, o.solver, a.levels);
  const auto& px = e.u_star_proxy;
  json norms = {{"sup", e.norms.sup}, {"H1_grad", e.norms.H1_grad}};
  if (e.norms.Lq_star) norms["Lq_star"] = *e.norms.Lq_star, norms["q_star"] = *e.norms.q_star;
  if (e.norms.q_star_below_sharp) norms["q_star_below_sharp"] = *e.norms.q_star_below_sharp;
  if (e.norms.H1_trend) norms["H1_trend"] = *e.norms.H1_trend;
  if (e.norms.Lq_star_trend) norms["Lq_star_trend"] = *e.norms.Lq_star_trend;
  const bool pass = tally.failures.empty() && e.weak.pass;
  json j = {{"command", "gelfand"},
            {"n", a.n},
            {"f", nl.name},
            {"lambda_star", e.lambda_star},
            {"uncertainty", e.uncertainty},
            {"regime", to_string(e.regime)},
            {"regime_flags", e.regime_flags},
            {"proxy", {{"m", px.m}, {"lambda", px.lambda}, {"mu1", px.mu1}, {"J", px.norms.J}}},
            {"norms", norms},
            {"weak_solution", {{"relerr", e.weak.relerr}, {"f_dist_l1", e.weak.f_dist_l1}, {"pass", e.weak.pass}}},
            {"estimates", {{"points", tally.points}, {"checks", tally.checks}, {"failures", tally.failures}}},
            {"warnings", nl.warnings},
            {"pass", pass}};
  if (e.fold_m) j["fold_m"] = *e.fold_m;
  csv.write(out / "gelfand_branch.csv");
  io::write_json(j, out / "gelfand.json");
  io::Plot plot{"branch of -Lap u = lambda f(u), f = " + nl.name + ", n = " + std::to_string(a.n), "m = u(0)",
                "lambda", "mu1", true, false, false,
                {{"lambda(m)", m, lam, "#1f77b4", true, false}, {"mu1(m)", m, mu, "#d62728", false, true}},
                {e.lambda_star}};
  io::write_svg(plot, out / "gelfand.svg");
  std::cout << "gelfand n=" << a.n << " f=" << nl.name << ": lambda* = " << io::num(e.lambda_star) << " +- "
            << io::num(e.uncertainty) << " (" << to_string(e.regime) << "), " << tally.checks << " estimate checks on "
            << tally.points << " semi-stable points, " << tally.failures.size() << " failed"
            << (pass ? "" : ", FAIL") << "\n";
  return pass ? 0 : 1;
}

// --- constants ---

int run_constants(const ParamArgs& pa, const fs::path& out) {
  const InequalityParams ip = pa.params();
  const auto iso = pa.iso();
  const ConstantBundle c = constants(ip, iso, pa.c3_margin);
  json j = {{"command", "constants"}, {"params", params_json(ip)}, {"iso", iso_json(iso)},
            {"regime", to_string(c.regime)}, {"part", part_of(ip)}, {"A", c.A}};
  if (c.C1) j["C1"] = jnum(*c.C1);
  if (c.C2) j["C2"] = jnum(*c.C2);
  if (c.C3) j["C3"] = jnum(*c.C3);
  if (c.C4) j["C4"] = jnum(*c.C4);
  if (c.p_dual) j["p_dual"] = jnum(*c.p_dual);
  const auto crit = critical_exponent(ip);
  j["critical_exponent"] = crit.value.is_infinite() ? json("inf") : json(crit.value.value());
  if (ip.q) {
    j["validity"] = to_string(regime_classify(ip));
    if (c.subcritical_C && ip.q->is_finite() && crit.value.is_finite() &&
        compare_exponents(ip.q->value(), crit.value.value()) < 0)
      j["subcritical_C"] = jnum(c.subcritical_C(ip.q->value()));
  }
  io::write_json(j, out / "constants.json");
  std::cout << j.dump(2) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"curvlab: curvature-weighted inequalities and Gelfand branches"};
  app.require_subcommand(1);
  app.fallthrough();  // --out and --seed also after the subcommand
  std::string out_dir = "curvlab_out";
  std::uint64_t seed = 1;
  app.add_option("--out", out_dir, "output directory")->capture_default_str();
  app.add_option("--seed", seed, "seed for random sample functions")->capture_default_str();
  std::function<int(const fs::path&)> run;

  VerifyArgs va;
  auto* verify = app.add_subcommand("verify", "run the inequality of the matching part on profiles / fields");
  va.pa.attach(verify);
  verify->add_option("--regime", va.regime, "expected part: a (Morrey), b (Sobolev), c (Trudinger)")
      ->check(CLI::IsMember({"a", "b", "c"}));
  verify->add_flag("--builtin-suite", va.builtin_suite, "built-in radial profiles (default without inputs)");
  verify->add_option("--profile", va.profiles, "radial profile CSV (rho,v) with JSON sidecar");
  verify->add_option("--field", va.fields, "scalar field JSON header (or 2D CSV)");
  verify->add_option("--random", va.random, "add this many seeded random radial profiles");
  verify->add_option("--res", va.res, "radial nodes of built-in profiles");
  verify->callback([&] { run = [&](const fs::path& o) { return cmd_verify(va, o, seed); }; });

  ScanArgs sa;
  auto* scan = app.add_subcommand("scan", "quotients along a concentrating family");
  sa.pa.attach(scan);
  scan->add_option("--family", sa.family, "PEAK | PLATEAU | MOLLIFIED_POWER");
  scan->add_option("--kmax", sa.k_max, "family members");
  scan->add_option("--res", sa.res, "radial nodes per member");
  scan->callback([&] { run = [&](const fs::path& o) { return cmd_scan(sa, o); }; });

  CounterArgs ca;
  auto* counter = app.add_subcommand("counterexample", "smoothed cube energies as eps0 -> 0");
  counter->add_option("--p", ca.p);
  counter->add_option("--r", ca.r);
  counter->add_option("--q", ca.q, "L^q exponent of the ratio (default p*_r)");
  counter->add_option("--n", ca.n)->check(CLI::IsMember({2, 3}));
  counter->add_option("--eps0", ca.eps0, "decreasing list, at least 4")->delimiter(',');
  counter->add_option("--res", ca.res, "nodes per axis");
  counter->add_option("--cutoff", ca.cutoff, "SMOOTHSTEP | BUMP");
  counter->add_option("--cells-per-band", ca.cells_per_band, "refine so the eps0 band spans this many cells");
  counter->callback([&] { run = [&](const fs::path& o) { return run_counterexample(ca, o); }; });

  ChainArgs cha;
  auto* chain = app.add_subcommand("chain", "level-set chain ratios on a 2D field");
  chain->add_option("--field", cha.field, "scalar field JSON header (or 2D CSV)");
  chain->add_option("--shape", cha.shape, "built-in field: radial | ellipse");
  chain->add_option("--res", cha.res, "nodes per axis of the built-in field");
  chain->add_option("--r", cha.r, "curvature exponent");
  chain->add_option("--levels", cha.levels, "levels in (0.02, 0.98) max|v|");
  chain->add_option("--tol-talenti", cha.tol_talenti);
  chain->add_option("--tol-ms", cha.tol_ms, "bound for ratio_ms and ratio_chain");
  chain->add_option("--tol-fraction", cha.min_fraction, "fraction of levels that must meet the bounds");
  chain->callback([&] { run = [&](const fs::path& o) { return run_chain(cha, o); }; });

  GelfandArgs ga;
  auto* gel = app.add_subcommand("gelfand", "branch sweep, lambda*, and the estimate battery");
  gel->add_option("--n", ga.n)->check(CLI::Range(2, 64));
  gel->add_option("--f", ga.f, "exp | pow(1+u,m) | power:m | expression in u");
  gel->add_option("--m-max", ga.m_max);
  gel->add_option("--points", ga.points);
  gel->add_option("--m-ratio", ga.m_ratio, "first m = m_max * ratio");
  gel->add_option("--res", ga.res, "radial nodes");
  gel->add_option("--tol-abs", ga.tol_abs);
  gel->add_option("--tol-rel", ga.tol_rel);
  gel->add_option("--tol-eig", ga.tol_eig, "tol_eig / first Dirichlet eigenvalue");
  gel->add_option("--levels", ga.levels, "levels s per estimate check");
  gel->callback([&] { run = [&](const fs::path& o) { return run_gelfand(ga, o); }; });

  ParamArgs ka;
  auto* cons = app.add_subcommand("constants", "admissible constants for (n, p, r[, q])");
  ka.attach(cons);
  cons->callback([&] { run = [&](const fs::path& o) { return run_constants(ka, o); }; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  try {
    const fs::path out(out_dir);
    prepare(out);
    return run(out);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    switch (e.code()) {
      case ErrorCode::MalformedInput:
      case ErrorCode::InvalidArgument:
      case ErrorCode::MissingExponent:
      case ErrorCode::UnknownFamily:
        return 2;
      default:
        return 1;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
