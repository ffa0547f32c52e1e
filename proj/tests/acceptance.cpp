// Acceptance suite: one [PASS]/[FAIL] line per criterion.
// Usage: acceptance [--only N]

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <map>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include <sys/wait.h>
#include <unistd.h>

#include "curvlab/checks.hpp"
#include "curvlab/counterexample.hpp"
#include "curvlab/gelfand.hpp"
#include "curvlab/levelset.hpp"
#include "curvlab/scan.hpp"

using namespace curvlab;
namespace fs = std::filesystem;

namespace {

constexpr double kPi = std::numbers::pi;

struct Outcome {
  bool pass = true;
  std::string detail;

  // records a failed sub-check; keeps the first few messages
  void expect(bool ok, const std::string& what) {
    if (ok) return;
    if (pass || detail.size() < 400) detail += (detail.empty() ? "" : "; ") + what;
    pass = false;
  }
};

std::string fmt(const char* f, double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, x);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

InequalityParams make(int n, double p, double r, std::optional<Exponent> q = std::nullopt) {
  InequalityParams ip;
  ip.n = n;
  ip.p = p;
  ip.r = r;
  ip.q = q;
  return ip;
}

double radius(const Point& x) { return std::sqrt(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]); }

ScalarField cone2(int nodes) {
  return ScalarField::sample(2, nodes, 1.25, [](const Point& x) { return std::max(0.0, 1.0 - radius(x)); });
}

ScalarField bump2(int nodes) {
  return ScalarField::sample(2, nodes, 1.25, [](const Point& x) {
    const double q = std::max(0.0, 1.0 - radius(x) * radius(x));
    return q * q;
  });
}

ScalarField ellipse2(int nodes) {
  return ScalarField::sample(2, nodes, 1.25, [](const Point& x) {
    const double q = std::max(0.0, 1.0 - x[0] * x[0] - 4.0 * x[1] * x[1]);
    return q * q;
  });
}

struct TimedSweep {
  ExtremalEstimate e;
  double seconds = 0.0;
};

const TimedSweep& sweep(int n, const std::string& f) {
  static std::map<std::pair<int, std::string>, TimedSweep> cache;
  const auto key = std::make_pair(n, f);
  auto it = cache.find(key);
  if (it == cache.end()) {
    const auto t0 = std::chrono::steady_clock::now();
    auto e = extremal_estimate(n, Nonlinearity::parse(f));
    it = cache.emplace(key, TimedSweep{std::move(e), seconds_since(t0)}).first;
  }
  return it->second;
}

// fixed-step RK4 in s for w'' = -(n-1)/s w' - e^w, w(0) = m, at 10x the
// resolution of the sweep grid; lambda = s0^2 at the first zero
double rk4_lambda(int n, double m, double h = 2e-4) {
  const auto rhs = [n](double s, double w, double dw) { return -(n - 1.0) / s * dw - std::exp(w); };
  const auto step = [&](double& s, double& w, double& dw, double dt) {
    const double k1 = dw, l1 = rhs(s, w, dw);
    const double k2 = dw + 0.5 * dt * l1, l2 = rhs(s + 0.5 * dt, w + 0.5 * dt * k1, dw + 0.5 * dt * l1);
    const double k3 = dw + 0.5 * dt * l2, l3 = rhs(s + 0.5 * dt, w + 0.5 * dt * k2, dw + 0.5 * dt * l2);
    const double k4 = dw + dt * l3, l4 = rhs(s + dt, w + dt * k3, dw + dt * l3);
    w += dt / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4);
    dw += dt / 6.0 * (l1 + 2 * l2 + 2 * l3 + l4);
    s += dt;
  };
  double s = 1e-3;
  const double a = std::exp(m) / (2.0 * n), c = std::exp(2.0 * m) / (8.0 * n * (n + 2.0));
  double w = m - a * s * s + c * s * s * s * s, dw = -2 * a * s + 4 * c * s * s * s;
  while (w > 0.0) {
    double s1 = s, w1 = w, d1 = dw;
    step(s1, w1, d1, h);
    if (w1 <= 0.0) break;
    s = s1, w = w1, dw = d1;
  }
  for (int it = 0; it < 4; ++it) step(s, w, dw, -w / dw);
  return s * s;
}

double rk4_lambda_star(int n, double a, double b) {
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  double x1 = b - g * (b - a), x2 = a + g * (b - a);
  double f1 = rk4_lambda(n, x1), f2 = rk4_lambda(n, x2);
  for (int it = 0; it < 30; ++it) {
    if (f1 > f2)
      b = x2, x2 = x1, f2 = f1, x1 = b - g * (b - a), f1 = rk4_lambda(n, x1);
    else
      a = x1, x1 = x2, f1 = f2, x2 = a + g * (b - a), f2 = rk4_lambda(n, x2);
  }
  return std::max(f1, f2);
}

// --- criteria ---

Outcome radial_sobolev() {
  Outcome o;
  const std::vector<std::array<double, 3>> cases = {{5, 2, 1}, {6, 2, 1}, {8, 2, 1}, {10, 2, 1}, {5, 1, 1}, {7, 3, 1}};
  o.expect(builtin_profiles().size() >= 6, "fewer than 6 profiles");
  double worst = 0.0, slowest = 0.0;
  for (const auto& c : cases) {
    const int n = static_cast<int>(c[0]);
    const auto iso = IsoperimetricConstants::sphere_equality(n);
    const auto t0 = std::chrono::steady_clock::now();
    for (const auto& prof : builtin_profiles()) {
      const auto v = sobolev_check(RadialSample(builtin_profile(n, prof)), make(n, c[1], c[2]), iso);
      o.expect(v.counts_as_pass(), prof.name + " n=" + std::to_string(n) + " ratio " + fmt("%.4g", v.ratio));
      worst = std::max(worst, v.ratio);
    }
    const double dt = seconds_since(t0);
    slowest = std::max(slowest, dt);
    o.expect(dt < 1.0, "case n=" + std::to_string(n) + " took " + fmt("%.2f s", dt));
  }
  if (o.pass) o.detail = "48 verdicts, max ratio " + fmt("%.4f", worst) + ", slowest case " + fmt("%.3f s", slowest);
  return o;
}

Outcome dilation_homogeneity() {
  Outcome o;
  const std::vector<std::array<double, 3>> cases = {{5, 2, 1}, {6, 2, 1}, {8, 2, 1}, {10, 2, 1}, {5, 1, 1}, {7, 3, 1}};
  double worst_c = 0.0, worst_s = 0.0;
  for (const auto& c : cases) {
    const int n = static_cast<int>(c[0]);
    auto ip = make(n, c[1], c[2]);
    ip.q = critical_exponent(ip).value;
    for (const auto& prof : builtin_profiles()) {
      const auto v = builtin_profile(n, prof);
      const double q0 = sobolev_quotient(v, ip);
      for (double k : {-2.0, 1e-3, 1e3}) {
        const double e = std::fabs(sobolev_quotient(v.scaled(k), ip) / q0 - 1.0);
        worst_c = std::max(worst_c, e);
        o.expect(e <= 1e-12, prof.name + " scale " + fmt("%g", k) + " rel " + fmt("%.2e", e));
      }
      for (double s : {0.5, 2.0, 4.0}) {
        const double e = std::fabs(sobolev_quotient(v.dilated(s), ip) / q0 - 1.0);
        worst_s = std::max(worst_s, e);
        o.expect(e <= 1e-6, prof.name + " dilation " + fmt("%g", s) + " rel " + fmt("%.2e", e));
      }
    }
  }
  if (o.pass) o.detail = "scaling max rel " + fmt("%.1e", worst_c) + ", dilation max rel " + fmt("%.1e", worst_s);
  return o;
}

// validity table of the radial inequality, exact on the lattice
Validity table_validity(int n, double p, double r, std::optional<double> q) {
  const double order = p * (1.0 + r);
  if (n < order) return Validity::Holds;
  if (n == order) return q ? Validity::HoldsStrictSubcritical : Validity::Fails;
  if (!q) return Validity::Fails;
  return *q * (n - order) <= n * p ? Validity::Holds : Validity::Fails;
}

Outcome regime_map() {
  Outcome o;
  int points = 0, mismatches = 0;
  for (int n = 2; n <= 6; ++n)
    for (double p : {1.0, 1.5, 2.0, 3.0})
      for (double r : {0.0, 1.0}) {
        const double order = p * (1.0 + r);
        const std::optional<double> crit = n > order ? std::optional<double>(n * p / (n - order)) : std::nullopt;
        for (std::optional<double> q : {std::optional<double>(1.0), std::optional<double>(crit ? *crit : 2.5),
                                        std::optional<double>(6.0), std::optional<double>(12.0),
                                        std::optional<double>()}) {
          ++points;
          const auto ip = make(n, p, r, q ? Exponent::finite(*q) : Exponent::infinity());
          const Validity got = regime_classify(ip), want = table_validity(n, p, r, q);
          if (got != want) {
            ++mismatches;
            o.expect(false, "n=" + std::to_string(n) + " p=" + fmt("%g", p) + " r=" + fmt("%g", r) + " q=" +
                                (q ? fmt("%g", *q) : "inf") + ": " + to_string(got) + " vs " + to_string(want));
          }
        }
      }
  o.expect(points == 200, "lattice has " + std::to_string(points) + " points");

  struct ScanCase {
    Family f;
    InequalityParams ip;
    std::size_t k;
  };
  const std::vector<ScanCase> fails = {
      {Family::Peak, make(5, 2, 1, Exponent::finite(12)), 48},
      {Family::Plateau, make(4, 2, 1, Exponent::infinity()), 24},
      {Family::Plateau, make(6, 3, 1, Exponent::infinity()), 24},
      {Family::Plateau, make(6, 1.5, 3, Exponent::infinity()), 24},
  };
  const std::vector<ScanCase> holds = {
      {Family::Peak, make(5, 2, 1, Exponent::finite(10)), 16},
      {Family::Peak, make(5, 2, 1, Exponent::finite(5)), 16},
      {Family::Peak, make(3, 2, 1, Exponent::infinity()), 16},
      {Family::Plateau, make(3, 2, 1, Exponent::infinity()), 16},
      {Family::MollifiedPower, make(3, 2, 1, Exponent::infinity()), 16},
  };
  double min_growth = INFINITY;
  for (const auto& c : fails) {
    const auto s = sharpness_scan(c.f, c.ip, c.k);
    o.expect(s.validity == Validity::Fails, to_string(c.f) + " not a FAILS case");
    o.expect(s.growth >= 10.0, to_string(c.f) + " n=" + std::to_string(c.ip.n) + " growth " + fmt("%.3g", s.growth));
    min_growth = std::min(min_growth, s.growth);
  }
  for (const auto& c : holds) {
    const auto s = sharpness_scan(c.f, c.ip, c.k);
    o.expect(s.bound.has_value() && s.within_bound, to_string(c.f) + " n=" + std::to_string(c.ip.n) + " exceeds bound");
  }
  if (o.pass)
    o.detail = std::to_string(points) + " lattice points, 0 mismatches; min FAILS growth " + fmt("%.3g", min_growth) +
               ", " + std::to_string(holds.size()) + " HOLDS scans bounded";
  return o;
}

Outcome counterexample() {
  Outcome o;
  const std::vector<double> eps{0.2, 0.1, 0.05, 0.025, 0.0125};
  const auto t0 = std::chrono::steady_clock::now();
  const auto a = counterexample_report(1.0, 0.5, eps);
  const auto b = counterexample_report(1.0, 1.0, eps);
  const double dt = seconds_since(t0);
  o.expect(std::fabs(a.slope - 0.5) <= 0.15, "(1,1/2) slope " + fmt("%.4f", a.slope));
  o.expect(a.ratio_monotone, "(1,1/2) ratio not monotone");
  o.expect(a.ratio_growth >= 10.0, "(1,1/2) ratio growth " + fmt("%.3f", a.ratio_growth) + "x < 10x");
  o.expect(b.slope <= 0.1, "(1,1) slope " + fmt("%.4f", b.slope));
  o.expect(dt < 30.0, "runtime " + fmt("%.1f s", dt));
  const std::string summary = "(1,1/2) slope " + fmt("%.4f", a.slope) + ", ratio growth " +
                              fmt("%.3f", a.ratio_growth) + "x; (1,1) slope " + fmt("%.4f", b.slope) + "; " +
                              fmt("%.2f s", dt);
  o.detail = o.pass ? summary : o.detail + " [" + summary + "]";
  return o;
}

Outcome level_set_chain() {
  Outcome o;
  double worst_eq = 0.0;
  for (const char* name : {"radial", "ellipse"}) {
    const bool radial = name[0] == 'r';
    const auto f = radial ? bump2(256) : ellipse2(256);
    const auto iso = IsoperimetricConstants::sphere_equality(2);
    const auto stats = verify_key_chain(f, 1.0, default_t_grid(f), iso);
    int sampled = 0, ok_t = 0, ok_ms = 0, ok_chain = 0;
    for (const auto& s : stats) {
      if (s.empty) continue;
      ++sampled;
      ok_t += s.ratio_talenti <= 1.02;
      ok_ms += s.ratio_ms <= 1.03;
      ok_chain += s.ratio_chain <= 1.03;
      if (radial && !s.irregular) {
        const double e = std::max(std::fabs(s.ratio_ms - 1.0), std::fabs(s.ratio_chain - 1.0));
        worst_eq = std::max(worst_eq, e);
        o.expect(e <= 0.03, std::string("radial sphere-equality off by ") + fmt("%.3f", e) + " at t=" + fmt("%.3f", s.t));
      }
    }
    const double need = 0.95 * sampled;
    o.expect(sampled > 0, std::string(name) + ": no levels");
    o.expect(ok_t >= need, std::string(name) + ": talenti ok on " + std::to_string(ok_t) + "/" + std::to_string(sampled));
    o.expect(ok_ms >= need, std::string(name) + ": ms ok on " + std::to_string(ok_ms) + "/" + std::to_string(sampled));
    o.expect(ok_chain >= need, std::string(name) + ": chain ok on " + std::to_string(ok_chain) + "/" + std::to_string(sampled));
  }
  if (o.pass) o.detail = "both fields within bounds at >= 95% of levels; radial equality within " + fmt("%.4f", worst_eq);
  return o;
}

Outcome curvature_accuracy() {
  Outcome o;
  std::vector<double> errs;
  for (int nodes : {65, 129, 257}) {
    const auto f = cone2(nodes);
    const auto c = mean_curvature(f);
    double e = 0.0;
    for (int i = 0; i < nodes; ++i)
      for (int j = 0; j < nodes; ++j) {
        const double r = radius(f.node(i, j));
        if (r >= 0.2 && r <= 0.8) {
          if (!c.defined[f.index(i, j)]) {
            e = INFINITY;
            continue;
          }
          e = std::max(e, std::fabs(c.H[f.index(i, j)] - 1.0 / r));
        }
      }
    errs.push_back(e);
  }
  double min_order = INFINITY;
  for (std::size_t i = 1; i < errs.size(); ++i) min_order = std::min(min_order, std::log2(errs[i - 1] / errs[i]));
  o.expect(min_order >= 1.5, "observed order " + fmt("%.3f", min_order));
  const auto a = coarea_check(cone2(128), 0.0);
  const auto b = coarea_check(cone2(255), 0.0);
  o.expect(a.relerr <= 0.05, "coarea relerr at 128^2 " + fmt("%.3e", a.relerr));
  o.expect(b.relerr <= 0.5 * a.relerr, "coarea relerr " + fmt("%.3e", a.relerr) + " -> " + fmt("%.3e", b.relerr));
  if (o.pass)
    o.detail = "H order " + fmt("%.3f", min_order) + "; coarea relerr " + fmt("%.2e", a.relerr) + " -> " +
               fmt("%.2e", b.relerr);
  return o;
}

Outcome gelfand_oracles() {
  Outcome o;
  const auto& s2 = sweep(2, "exp");
  const auto& s3 = sweep(3, "exp");
  const auto& s10 = sweep(10, "exp");
  // Liouville: lambda(m) = 8mu/(1+mu)^2, maximal value 2
  o.expect(std::fabs(s2.e.lambda_star - 2.0) <= 1e-3, "n=2 lambda* " + fmt("%.8f", s2.e.lambda_star));
  const double oracle3 = rk4_lambda_star(3, 1.0, 2.5);
  o.expect(std::fabs(s3.e.lambda_star - 3.322) <= 0.01, "n=3 lambda* " + fmt("%.8f", s3.e.lambda_star));
  o.expect(std::fabs(s3.e.lambda_star - oracle3) <= 0.01, "n=3 rk4 oracle " + fmt("%.8f", oracle3));
  o.expect(s10.e.regime == BranchRegime::Plateau, "n=10 not a plateau");
  o.expect(std::fabs(s10.e.lambda_star - 16.0) <= 0.05, "n=10 lambda* " + fmt("%.8f", s10.e.lambda_star));
  const auto rho = s10.e.u_star_proxy.rho();
  const auto u = s10.e.u_star_proxy.u();
  double worst = 0.0;
  for (std::size_t i = 0; i + 1 < rho.size(); ++i)
    if (rho[i] >= 0.1) worst = std::max(worst, std::fabs(u[i] + 2 * std::log(rho[i])) / (-2 * std::log(rho[i])));
  o.expect(worst <= 0.01, "n=10 profile rel residual " + fmt("%.3e", worst));
  for (const auto* s : {&s2, &s3, &s10}) {
    o.expect(s->e.branch.size() == 64 && s->e.branch.front().rho().size() == 2048, "sweep size");
    o.expect(s->seconds < 10.0, "sweep took " + fmt("%.2f s", s->seconds));
  }
  if (o.pass)
    o.detail = "lambda* " + fmt("%.8f", s2.e.lambda_star) + " / " + fmt("%.8f", s3.e.lambda_star) + " (rk4 " +
               fmt("%.8f", oracle3) + ") / " + fmt("%.8f", s10.e.lambda_star) + "; n=10 profile rel " +
               fmt("%.1e", worst) + "; sweeps " + fmt("%.2f", s2.seconds) + "/" + fmt("%.2f", s3.seconds) + "/" +
               fmt("%.2f s", s10.seconds);
  return o;
}

Outcome stability_structure() {
  Outcome o;
  double worst_fold = 0.0;
  for (int n = 2; n <= 9; ++n) {
    const auto& e = sweep(n, "exp").e;
    o.expect(e.regime == BranchRegime::Fold && e.fold_m.has_value(), "n=" + std::to_string(n) + " no fold");
    if (!e.fold_m) continue;
    for (const auto& p : e.branch) {
      if (p.m >= *e.fold_m) break;
      o.expect(p.mu1 > 0.0, "n=" + std::to_string(n) + " mu1 " + fmt("%.3e", p.mu1) + " at m=" + fmt("%.4g", p.m));
    }
    const double rel = std::fabs(e.u_star_proxy.mu1) / dirichlet_eigenvalue(n);
    worst_fold = std::max(worst_fold, rel);
    o.expect(rel <= 1e-3, "n=" + std::to_string(n) + " |mu1| at fold " + fmt("%.3e", rel) + " of scale");
  }
  const double mu0 = branch_point(3, Nonlinearity::exp(), 1e-6).mu1;
  o.expect(std::fabs(mu0 - kPi * kPi) <= 0.01 * kPi * kPi, "n=3 mu1 at lambda->0 " + fmt("%.6f", mu0));
  if (o.pass)
    o.detail = "mu1 > 0 before every fold, max |mu1|/scale at folds " + fmt("%.1e", worst_fold) + "; mu1(0+) = " +
               fmt("%.6f", mu0) + " vs pi^2";
  return o;
}

Outcome estimate_suite() {
  Outcome o;
  int points = 0, checks = 0;
  double worst_poh = 0.0;
  for (const char* f : {"exp", "power:3"})
    for (int n : {5, 7, 10}) {
      const auto nl = Nonlinearity::parse(f);
      const auto iso = IsoperimetricConstants::sphere_equality(n);
      const double q = 2.0 * n / (n - 4.0);
      const double pq = 4.0 * n / (3.0 * n - 4.0);
      const std::string tag = std::string(f) + " n=" + std::to_string(n);
      for (const auto& p : sweep(n, f).e.branch) {
        if (p.mu1 < -tol_eig(n)) continue;
        ++points;
        const std::string at = tag + " m=" + fmt("%.4g", p.m);
        for (const auto& tf : builtin_test_functions(p)) {
          ++checks;
          o.expect(stability_geometric_check(p, nl, tf).pass, at + " stability " + tf.label);
        }
        std::vector<double> s;
        for (int k = 1; k <= 16; ++k) s.push_back(p.m * k / 16);
        for (const auto& c : lq_estimate_check(p, nl, s, iso)) {
          ++checks;
          o.expect(c.pass, at + " lq s=" + fmt("%.4g", c.param));
        }
        for (double pe : {4.0 / 3.0, pq / 1.1}) {
          ++checks;
          o.expect(gradient_estimate_check(p, nl, q, pe).verdict.pass, at + " gradient p=" + fmt("%.4g", pe));
        }
        const auto ph = pohozaev_and_nedev(p);
        checks += 2;
        worst_poh = std::max(worst_poh, ph.identity_residual);
        o.expect(ph.identity_residual <= 1e-6, at + " pohozaev residual " + fmt("%.2e", ph.identity_residual));
        o.expect(ph.h1_bound_pass, at + " nedev bound");
      }
    }
  // grid error under refinement, ODE tolerances tight enough not to interfere
  GelfandOptions tight;
  tight.abs_tol = 1e-14;
  tight.rel_tol = 1e-13;
  double min_ratio = INFINITY;
  for (int n : {5, 7, 10}) {
    std::vector<double> poh;
    for (std::size_t N : {33, 65}) {
      tight.nodes = N;
      poh.push_back(pohozaev_and_nedev(branch_point(n, Nonlinearity::exp(), 5.0, tight)).identity_residual);
    }
    min_ratio = std::min(min_ratio, poh[0] / poh[1]);
    o.expect(poh[0] / poh[1] >= 4.0, "n=" + std::to_string(n) + " pohozaev refinement ratio " + fmt("%.2f", poh[0] / poh[1]));
  }
  const double a = 10.0 / 3.0;
  const double gamma = std::pow(unit_sphere_area(10) * std::pow(2.0, a) * std::tgamma(a + 1) / std::pow(10.0, a + 1), 0.3);
  const auto& lq = sweep(10, "exp").e.norms.Lq_star;
  o.expect(lq.has_value() && std::fabs(*lq - gamma) <= 0.05 * gamma,
           "n=10 proxy L^{10/3} " + (lq ? fmt("%.8f", *lq) : std::string("missing")) + " vs " + fmt("%.8f", gamma));
  if (o.pass)
    o.detail = std::to_string(checks) + " checks on " + std::to_string(points) + " semi-stable points; max Pohozaev " +
               fmt("%.1e", worst_poh) + ", refinement ratio >= " + fmt("%.1f", min_ratio) + "; L^{10/3} " +
               fmt("%.6f", *lq) + " vs " + fmt("%.6f", gamma);
  return o;
}

Outcome trudinger() {
  Outcome o;
  const auto iso = IsoperimetricConstants::sphere_equality(4);
  const auto ip = make(4, 2, 1);
  for (const auto& prof : builtin_profiles()) {
    const auto t = trudinger_check(RadialSample(builtin_profile(4, prof)), ip, iso, 2.0);
    o.expect(t.verdict.counts_as_pass(), prof.name + " moment " + fmt("%.4g", t.exp_moment) + " > " + fmt("%.4g", t.bound));
  }
  double prev = INFINITY;
  std::string bounds;
  for (double m : {1.5, 2.0, 4.0}) {
    const auto t = trudinger_check(RadialSample(builtin_profile(4, builtin_profiles().front())), ip, iso, m);
    o.expect(t.bound < prev, "bound not decreasing at margin " + fmt("%g", m));
    prev = t.bound;
    bounds += (bounds.empty() ? "" : " > ") + fmt("%.4f", t.bound);
  }
  if (o.pass) o.detail = std::to_string(builtin_profiles().size()) + " profiles pass at margin 2; bounds " + bounds;
  return o;
}

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(is), std::istreambuf_iterator<char>()};
}

Outcome determinism() {
  Outcome o;
  const fs::path root = fs::temp_directory_path() / ("curvlab_acceptance_" + std::to_string(::getpid()));
  const std::vector<std::string> runs = {
      "verify --n 5 --p 2 --r 1 --random 4",
      "scan --family PEAK --n 5 --p 2 --r 1 --q 12",
      "counterexample --p 1 --r 0.5",
      "chain --shape ellipse",
      "gelfand --n 2",
      "constants --n 4 --p 2 --r 1",
  };
  for (const char* run : {"a", "b"}) {
    const std::string threads = run[0] == 'a' ? "1" : "4";
    for (const auto& args : runs) {
      const std::string cmd = "CURVLAB_THREADS=" + threads + " \"" CURVLAB_CLI "\" --out \"" + (root / run).string() +
                              "\" --seed 11 " + args + " > /dev/null 2>&1";
      const int rc = std::system(cmd.c_str());
      o.expect(rc != -1 && WEXITSTATUS(rc) <= 1, "'" + args + "' exit " + std::to_string(WEXITSTATUS(rc)));
    }
  }
  int files = 0;
  for (const auto& entry : fs::directory_iterator(root / "a")) {
    const auto ext = entry.path().extension();
    if (ext != ".csv" && ext != ".json") continue;
    ++files;
    const auto other = root / "b" / entry.path().filename();
    o.expect(fs::exists(other) && slurp(entry.path()) == slurp(other), entry.path().filename().string() + " differs");
  }
  o.expect(files >= 11, "only " + std::to_string(files) + " CSV/JSON files");
  std::error_code ec;
  fs::remove_all(root, ec);
  if (o.pass) o.detail = std::to_string(files) + " CSV/JSON files byte-identical across two runs (1 and 4 threads)";
  return o;
}

struct Criterion {
  int id;
  const char* name;
  std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> all = {
      {1, "radial Sobolev verification", radial_sobolev},
      {2, "dilation and homogeneity", dilation_homogeneity},
      {3, "regime map and sharpness scans", regime_map},
      {4, "smoothed-cube counterexample", counterexample},
      {5, "level-set chain", level_set_chain},
      {6, "curvature and coarea accuracy", curvature_accuracy},
      {7, "Gelfand oracles", gelfand_oracles},
      {8, "stability structure", stability_structure},
      {9, "semi-stable estimate suite", estimate_suite},
      {10, "Trudinger", trudinger},
      {11, "determinism", determinism},
  };
  int only = 0;
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if (a == "--only" && i + 1 < argc) {
      only = std::atoi(argv[++i]);
    } else {
      std::fprintf(stderr, "usage: %s [--only N]\n", argv[0]);
      return 2;
    }
  }
  int failed = 0, ran = 0;
  for (const auto& c : all) {
    if (only && c.id != only) continue;
    ++ran;
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    std::printf("[%s] %d %s: %s (%.2f s)\n", o.pass ? "PASS" : "FAIL", c.id, c.name, o.detail.c_str(), seconds_since(t0));
    std::fflush(stdout);
    failed += !o.pass;
  }
  if (!ran) {
    std::fprintf(stderr, "no criterion %d\n", only);
    return 2;
  }
  return failed ? 1 : 0;
}
