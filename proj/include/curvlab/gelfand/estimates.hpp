#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include <boost/math/tools/roots.hpp>

#include "curvlab/constants.hpp"
#include "curvlab/error.hpp"
#include "curvlab/gelfand/shooting.hpp"

namespace curvlab {

namespace detail {

// u'(rho)/rho, finite at the center: -lambda f(m)/n
inline double du_over_rho(const BranchPoint& p, const Nonlinearity& nl, double r, double du) {
  return r > 0.0 ? du / r : -p.lambda * nl.f(p.m) / p.n();
}

}  // namespace detail

/// Radius where the decreasing profile crosses level s (0 when s >= u(0)).
inline double level_radius(const BranchPoint& p, double s) {
  const auto rho = p.rho();
  const auto u = p.u();
  if (s >= u.front()) return 0.0;
  if (s <= 0.0) return 1.0;
  // last node with u > s
  std::size_t k = 0;
  while (k + 1 < u.size() && u[k + 1] > s) ++k;
  const auto g = [&](double r) { return detail::hermite(p, k, r).first - s; };
  std::uintmax_t iters = 200;
  const auto root = boost::math::tools::toms748_solve(
      g, rho[k], rho[k + 1], u[k] - s, u[k + 1] - s,
      [](double a, double b) { return std::fabs(b - a) <= 1e-15 * std::max(1e-300, std::fabs(a)); }, iters);
  return 0.5 * (root.first + root.second);
}

/// Cutoff eta in the stability inequality
///   (n-1) int H^2 |grad u|^2 eta^2 <= int |grad u|^2 |grad eta|^2,
/// TRUNCATION(s): eta = min(u, s); DIST_CAP(eps): eta = min(1 - rho, eps);
/// USER: eta(rho) with eta(1) = 0.
struct TestFunction {
  enum class Kind { Truncation, DistCap, User } kind = Kind::Truncation;
  double param = 0.0;
  std::function<double(double)> eta, deta;  // USER only
  std::string label;

  static TestFunction truncation(double s) {
    require(s > 0.0, ErrorCode::InvalidArgument, "truncation level must be positive");
    return {Kind::Truncation, s, {}, {}, "TRUNCATION(" + std::to_string(s) + ")"};
  }
  static TestFunction dist_cap(double eps) {
    require(eps > 0.0 && eps <= 1.0, ErrorCode::InvalidArgument, "cap must lie in (0, 1]");
    return {Kind::DistCap, eps, {}, {}, "DIST_CAP(" + std::to_string(eps) + ")"};
  }
  static TestFunction user(std::string label, std::function<double(double)> eta,
                           std::function<double(double)> deta = {}) {
    if (!deta) {
      deta = [eta](double r) {
        const double h = 1e-6;
        const double a = std::max(0.0, r - h), b = std::min(1.0, r + h);
        return (eta(b) - eta(a)) / (b - a);
      };
    }
    return {Kind::User, 0.0, std::move(eta), std::move(deta), std::move(label)};
  }
};

struct StabilityCheck {
  std::string eta;
  double lhs = 0.0;  // (n-1) int H^2 |grad u|^2 eta^2
  double lhs_curvature = 0.0;  // int (|B|^2 |grad u|^2 + |grad_T |grad u||^2) eta^2
  double rhs = 0.0;  // int |grad u|^2 |grad eta|^2
  bool pass = false;
};

inline constexpr double kEstimateSlack = 0.01;

namespace detail {
inline void require_semistable(const BranchPoint& p, const GelfandOptions& o) {
  require(p.mu1 >= -tol_eig(p.n(), o), ErrorCode::NotSemistable,
          "mu1 = " + std::to_string(p.mu1) + " below -tol_eig");
}
}  // namespace detail

/// Radially H = 1/rho, so the test reduces to 1D quadrature split where eta'
/// jumps.
inline StabilityCheck stability_geometric_check(const BranchPoint& p, const Nonlinearity& nl, const TestFunction& tf,
                                                const GelfandOptions& o = {}) {
  detail::require_semistable(p, o);
  const int n = p.n();
  StabilityCheck c;
  c.eta = tf.label;
  // break points where eta' jumps
  double split = 1.0;
  std::function<double(double, double)> eta;  // of (rho, u)
  switch (tf.kind) {
    case TestFunction::Kind::Truncation: {
      const double s = tf.param;
      split = level_radius(p, s);
      eta = [s](double, double v) { return std::min(v, s); };
      break;
    }
    case TestFunction::Kind::DistCap: {
      const double e = tf.param;
      split = 1.0 - e;
      eta = [e](double r, double) { return std::min(1.0 - r, e); };
      break;
    }
    case TestFunction::Kind::User:
      split = 0.5;
      eta = [&tf](double r, double) { return tf.eta(r); };
      break;
  }
  const auto lhs_part = [&](double a, double b) {
    return ball_integral(p, a, b, [&](double r, double v, double dv) {
      const double g = detail::du_over_rho(p, nl, r, dv);
      const double e = eta(r, v);
      return (n - 1.0) * g * g * e * e;
    });
  };
  c.lhs = lhs_part(0.0, split) + lhs_part(split, 1.0);
  // |B|^2 = (n-1)/rho^2 = (n-1) H^2 and grad_T |grad u| = 0 on spheres
  c.lhs_curvature = c.lhs;
  switch (tf.kind) {
    case TestFunction::Kind::Truncation:
      c.rhs = ball_integral(p, split, 1.0, [](double, double, double dv) { return dv * dv * dv * dv; });
      break;
    case TestFunction::Kind::DistCap:
      c.rhs = ball_integral(p, split, 1.0, [](double, double, double dv) { return dv * dv; });
      break;
    case TestFunction::Kind::User:
      c.rhs = ball_integral(p, 0.0, 1.0, [&tf](double r, double, double dv) {
        const double d = tf.deta(r);
        return dv * dv * d * d;
      });
      break;
  }
  c.pass = c.lhs <= c.rhs * (1.0 + kEstimateSlack);
  return c;
}

/// Built-in cutoffs: truncations at 1/4, 1/2, 3/4 of u(0) and distance caps 0.1, 0.5.
inline std::vector<TestFunction> builtin_test_functions(const BranchPoint& p) {
  return {TestFunction::truncation(0.25 * p.m), TestFunction::truncation(0.5 * p.m),
          TestFunction::truncation(0.75 * p.m), TestFunction::dist_cap(0.1), TestFunction::dist_cap(0.5)};
}

struct EstimateCheck {
  std::string check;
  double param = 0.0;  // level s or exponent p
  double lhs = 0.0;
  double rhs = 0.0;
  bool pass = false;
};

/// (int_{u>s} (u-s)^{2n/(n-4)})^{(n-4)/(2n)} <= C(n)/s (int_{u<=s} |grad u|^4)^{1/2},
/// C(n) = C2(n,2,1)/sqrt(n-1).
inline std::vector<EstimateCheck> lq_estimate_check(const BranchPoint& p, const Nonlinearity& nl,
                                                    const std::vector<double>& s_grid,
                                                    const IsoperimetricConstants& iso, const GelfandOptions& o = {}) {
  const int n = p.n();
  require(n >= 5, ErrorCode::WrongRegime, "lq estimate needs n >= 5; use linf_estimate_check for n <= 3");
  detail::require_semistable(p, o);
  (void)nl;
  InequalityParams ip;
  ip.n = n;
  ip.p = 2.0;
  ip.r = 1.0;
  const double C = *constants(ip, iso).C2 / std::sqrt(n - 1.0);
  const double q = detail::lq_star_exponent(n);
  std::vector<EstimateCheck> out;
  for (double s : s_grid) {
    require(s > 0.0, ErrorCode::InvalidArgument, "levels must be positive");
    const double rs = level_radius(p, s);
    EstimateCheck e{"lq_estimate", s};
    e.lhs = std::pow(ball_integral(p, 0.0, rs, [s, q](double, double v, double) {
                       return std::pow(std::max(v - s, 0.0), q);
                     }),
                     1.0 / q);
    const double grad4 = ball_integral(p, rs, 1.0, [](double, double, double dv) { return dv * dv * dv * dv; });
    e.rhs = C / s * std::sqrt(grad4);
    e.pass = e.lhs <= e.rhs * (1.0 + kEstimateSlack);
    out.push_back(e);
  }
  return out;
}

/// ||u||_inf <= s + C(n)/s |Omega|^{(4-n)/(2n)} (int_{u<=s} |grad u|^4)^{1/2},
/// C(n) = C1(n,2,1)/sqrt(n-1), n in {2, 3}.
inline std::vector<EstimateCheck> linf_estimate_check(const BranchPoint& p, const std::vector<double>& s_grid,
                                                      const IsoperimetricConstants& iso,
                                                      const GelfandOptions& o = {}) {
  const int n = p.n();
  require(n == 2 || n == 3, ErrorCode::WrongRegime, "linf estimate needs n in {2, 3}");
  detail::require_semistable(p, o);
  InequalityParams ip;
  ip.n = n;
  ip.p = 2.0;
  ip.r = 1.0;
  const double C = *constants(ip, iso).C1 / std::sqrt(n - 1.0);
  const double omega = unit_ball_volume(n);
  std::vector<EstimateCheck> out;
  for (double s : s_grid) {
    require(s > 0.0, ErrorCode::InvalidArgument, "levels must be positive");
    const double rs = level_radius(p, s);
    EstimateCheck e{"linf_estimate", s};
    e.lhs = p.u().front();
    const double grad4 = ball_integral(p, rs, 1.0, [](double, double, double dv) { return dv * dv * dv * dv; });
    e.rhs = s + C / s * std::pow(omega, (4.0 - n) / (2.0 * n)) * std::sqrt(grad4);
    e.pass = e.lhs <= e.rhs * (1.0 + kEstimateSlack);
    out.push_back(e);
  }
  return out;
}

struct GradientCheck {
  EstimateCheck verdict;
  double q = 0.0;
  double p_q = 0.0;  // 2q/(q+1)
  // the n >= 5 instantiation q = 2n/(n-4), p < 4n/(3n-4)
  std::optional<double> q_dim, p_dim;
};

/// int |grad u|^p <= p|Omega| + (p_q/p - 1)^{-1} (||u||_q^q + ||lambda f(u)||_1),
/// q >= n/(n-2), 1 <= p < p_q = 2q/(q+1).
inline GradientCheck gradient_estimate_check(const BranchPoint& p, const Nonlinearity& nl, double q, double pe) {
  const int n = p.n();
  require(n >= 3, ErrorCode::WrongRegime, "gradient estimate needs n >= 3");
  require(q >= n / (n - 2.0) - 1e-12, ErrorCode::WrongRegime, "gradient estimate needs q >= n/(n-2)");
  GradientCheck g;
  g.q = q;
  g.p_q = 2.0 * q / (q + 1.0);
  require(pe >= 1.0 && pe < g.p_q, ErrorCode::WrongRegime, "gradient estimate needs 1 <= p < p_q");
  if (n >= 5) {
    g.q_dim = detail::lq_star_exponent(n);
    g.p_dim = 4.0 * n / (3.0 * n - 4.0);
  }
  const double lhs = ball_integral(p, 0.0, 1.0, [pe](double, double, double dv) { return std::pow(std::fabs(dv), pe); });
  const double uq = ball_integral(p, 0.0, 1.0, [q](double, double v, double) { return std::pow(std::fabs(v), q); });
  const double h1 = p.lambda * ball_integral(p, 0.0, 1.0, [&nl](double, double v, double) { return nl.f(v); });
  g.verdict = {"gradient_estimate", pe, lhs, pe * unit_ball_volume(n) + (uq + h1) / (g.p_q / pe - 1.0)};
  g.verdict.pass = g.verdict.lhs <= g.verdict.rhs;
  return g;
}

struct PohozaevCheck {
  double grad2 = 0.0;  // int |grad u|^2
  double boundary = 0.0;  // 1/2 int_{dB} |grad u|^2 x.nu
  double nJ = 0.0;
  double identity_residual = 0.0;  // relative to the larger side
  bool h1_bound_pass = false;  // grad2 <= boundary (J <= 0)
};

inline PohozaevCheck pohozaev_and_nedev(const BranchPoint& p) {
  PohozaevCheck c;
  const int n = p.n();
  c.grad2 = p.norms.H1_grad * p.norms.H1_grad;
  c.boundary = 0.5 * p.du.back() * p.du.back() * unit_sphere_area(n);
  c.nJ = n * p.norms.J;
  const double right = c.boundary + c.nJ;
  c.identity_residual = std::fabs(c.grad2 - right) / std::max(std::fabs(c.grad2), std::fabs(right));
  c.h1_bound_pass = c.grad2 <= c.boundary;
  return c;
}

struct WeakSolutionCheck {
  std::vector<double> relerr;  // per test function phi_k = 1 - rho^{2k}
  double max_relerr = 0.0;
  double f_dist_l1 = 0.0;  // int f(u) (1 - rho)
  bool pass = false;
};

/// int u (-Delta phi) = int lambda f(u) phi for phi_k = 1 - rho^{2k}, k = 1..K,
/// with -Delta phi_k = 2k(2k+n-2) rho^{2k-2}.
inline WeakSolutionCheck weak_solution_check(const BranchPoint& p, const Nonlinearity& nl, int K = 4,
                                             double tol = 1e-6) {
  const auto rho = p.rho();
  const auto u = p.u();
  const int n = p.n();
  WeakSolutionCheck w;
  for (int k = 1; k <= K; ++k) {
    const double c = 2.0 * k * (2.0 * k + n - 2.0);
    const double lhs =
        ball_integral(p, 0.0, 1.0, [c, k](double r, double v, double) { return v * c * std::pow(r, 2 * k - 2); });
    const double rhs = p.lambda * ball_integral(p, 0.0, 1.0, [&nl, k](double r, double v, double) {
                         return nl.f(v) * (1.0 - std::pow(r, 2 * k));
                       });
    w.relerr.push_back(std::fabs(lhs - rhs) / std::fabs(rhs));
  }
  w.max_relerr = *std::max_element(w.relerr.begin(), w.relerr.end());
  w.f_dist_l1 = ball_integral(p, 0.0, 1.0, [&nl](double r, double v, double) { return nl.f(v) * (1.0 - r); });
  w.pass = w.max_relerr <= tol && std::isfinite(w.f_dist_l1);
  return w;
}

}  // namespace curvlab
