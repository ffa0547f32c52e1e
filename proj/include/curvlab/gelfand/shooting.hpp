#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/special_functions/bessel.hpp>
#include <boost/math/tools/roots.hpp>
#include <boost/numeric/odeint.hpp>

#include "curvlab/error.hpp"
#include "curvlab/gelfand/nonlinearity.hpp"
#include "curvlab/math.hpp"
#include "curvlab/parallel.hpp"
#include "curvlab/quadrature.hpp"
#include "curvlab/radial.hpp"

namespace curvlab {

struct GelfandOptions {
  std::size_t nodes = 2048;
  double abs_tol = 1e-10;
  double rel_tol = 1e-8;
  double tol_eig_factor = 1e-6;  // times the first radial Dirichlet eigenvalue
};

/// First radial Dirichlet eigenvalue of -Delta on the unit ball, j_{n/2-1,1}^2.
inline double dirichlet_eigenvalue(int n) {
  const double j = boost::math::cyl_bessel_j_zero(n / 2.0 - 1.0, 1);
  return j * j;
}

inline double tol_eig(int n, const GelfandOptions& opts = {}) { return opts.tol_eig_factor * dirichlet_eigenvalue(n); }

/// Nodes 0 = rho_0 < ... < rho_N = 1 with rho_i = sinh(beta i/N)/sinh(beta),
/// beta chosen so the first cell is about first_cell (uniform when that is
/// already >= 1/N).
inline std::vector<double> graded_grid(std::size_t nodes, double first_cell) {
  require(nodes >= RadialProfile::kMinNodes, ErrorCode::InvalidArgument, "need at least 16 nodes");
  const double N = static_cast<double>(nodes - 1);
  // rho(x) = e^{beta(x-1)} (1 - e^{-2 beta x}) / (1 - e^{-2 beta}), overflow-free sinh ratio
  const auto node = [](double beta, double x) {
    if (beta <= 0.0) return x;
    return std::exp(beta * (x - 1.0)) * std::expm1(-2.0 * beta * x) / std::expm1(-2.0 * beta);
  };
  double beta = 0.0;
  if (first_cell < 1.0 / N) {
    double lo = 1e-9, hi = 700.0;
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (lo + hi);
      (node(mid, 1.0 / N) > first_cell ? lo : hi) = mid;
    }
    beta = 0.5 * (lo + hi);
  }
  std::vector<double> rho(nodes);
  for (std::size_t i = 0; i < nodes; ++i) rho[i] = node(beta, static_cast<double>(i) / N);
  rho.front() = 0.0;
  rho.back() = 1.0;
  return rho;
}

/// Length in the scaled variable over which w drops from m by an O(1)
/// relative change of f.
inline double core_scale(int n, const Nonlinearity& nl, double m) {
  const double fm = nl.f(m), fp = nl.fprime(m);
  double delta = m;
  if (fp > 0.0) delta = std::min(delta, fm / fp);
  return std::sqrt(2.0 * n * delta / fm);
}

namespace detail {

using OdeState = std::array<double, 2>;

// w(s) with w'' + (n-1)/s w' + f(w) = 0 in t = ln s, state (w, dw/dt):
//   w_tt = -(n-2) w_t - e^{2t} f(w)
struct ScaledGelfand {
  int n;
  const Nonlinearity* nl;
  void operator()(const OdeState& x, OdeState& dx, double t) const {
    dx[0] = x[1];
    dx[1] = -(n - 2.0) * x[1] - std::exp(2.0 * t) * nl->f(x[0]);
  }
};

// w and dw/ds from the regular expansion at s = 0 through s^4
inline std::pair<double, double> series(int n, const Nonlinearity& nl, double m, double s) {
  const double f = nl.f(m), fp = nl.fprime(m);
  const double c2 = -f / (2.0 * n), c4 = f * fp / (8.0 * n * (n + 2.0));
  return {m + c2 * s * s + c4 * s * s * s * s, 2.0 * c2 * s + 4.0 * c4 * s * s * s};
}

inline double start_scale(int n, const Nonlinearity& nl, double m) { return 1e-3 * core_scale(n, nl, m); }

// abs_tol is meant for w = O(1); small m scales it down with the solution
inline auto make_stepper(const GelfandOptions& o, double m) {
  namespace ode = boost::numeric::odeint;
  return ode::make_dense_output(o.abs_tol * std::min(1.0, m), o.rel_tol, ode::runge_kutta_dopri5<OdeState>());
}

inline constexpr int kMaxSteps = 1000000;

inline bool finite(const OdeState& x) { return std::isfinite(x[0]) && std::isfinite(x[1]); }

/// w and dw/ds at the increasing scaled radii s (s[0] may be 0).
inline std::pair<std::vector<double>, std::vector<double>> sample_scaled(int n, const Nonlinearity& nl, double m,
                                                                          const std::vector<double>& s,
                                                                          const GelfandOptions& o) {
  const double s_init = start_scale(n, nl, m);
  std::vector<double> w(s.size()), ws(s.size());
  std::vector<double> times{std::log(s_init)};
  std::vector<std::size_t> slots;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] <= s_init) {
      std::tie(w[i], ws[i]) = series(n, nl, m, s[i]);
    } else {
      times.push_back(std::log(s[i]));
      slots.push_back(i);
    }
  }
  if (slots.empty()) return {w, ws};
  const auto [w0, ws0] = series(n, nl, m, s_init);
  OdeState x{w0, s_init * ws0};
  std::size_t seen = 0;
  bool bad = false;
  try {
    boost::numeric::odeint::integrate_times(make_stepper(o, m), ScaledGelfand{n, &nl}, x, times.begin(), times.end(),
                                            0.1, [&](const OdeState& y, double t) {
                                              if (seen > 0) {
                                                const std::size_t i = slots[seen - 1];
                                                w[i] = y[0];
                                                ws[i] = y[1] / std::exp(t);
                                                bad = bad || !finite(y);
                                              }
                                              ++seen;
                                            });
  } catch (const boost::numeric::odeint::odeint_error& e) {
    throw Error(ErrorCode::ShootDiverged, e.what());
  }
  require(!bad && seen == times.size(), ErrorCode::ShootDiverged, "solution blew up before the last radius");
  return {w, ws};
}

}  // namespace detail

/// First zero s0 of the scaled solution with w(0) = m; the branch point with
/// u(0) = m has lambda = s0^2 and u(rho) = w(s0 rho).
inline double first_zero(int n, const Nonlinearity& nl, double m, const GelfandOptions& o = {}) {
  require(n >= 2, ErrorCode::InvalidArgument, "n must be >= 2");
  require(m > 0.0, ErrorCode::InvalidArgument, "m must be positive");
  const double f0 = nl.f(0.0);
  require(f0 > 0.0, ErrorCode::NoSolutionAtM, "f(0) must be positive");
  // w <= m - f(0) s^2/(2n) while w >= 0
  const double t_limit = 0.5 * std::log(2.0 * n * m / f0) + 1.0;
  const double s_init = detail::start_scale(n, nl, m);
  const auto [w0, ws0] = detail::series(n, nl, m, s_init);
  auto st = detail::make_stepper(o, m);
  st.initialize(detail::OdeState{w0, s_init * ws0}, std::log(s_init), 0.1);
  const detail::ScaledGelfand sys{n, &nl};
  try {
    for (int k = 0; k < detail::kMaxSteps; ++k) {
      const auto [t0, t1] = st.do_step(sys);
      const detail::OdeState& x = st.current_state();
      require(detail::finite(x), ErrorCode::ShootDiverged, "scaled solution not finite");
      if (x[0] <= 0.0) {
        const auto g = [&st](double t) {
          detail::OdeState y;
          st.calc_state(t, y);
          return y[0];
        };
        std::uintmax_t iters = 200;
        const auto root = boost::math::tools::toms748_solve(
            g, t0, t1, [](double a, double b) { return std::fabs(b - a) <= 4e-16 * std::max(1.0, std::fabs(a)); },
            iters);
        return std::exp(0.5 * (root.first + root.second));
      }
      require(t1 <= t_limit, ErrorCode::NoSolutionAtM, "no zero of u found (is f positive and increasing?)");
    }
  } catch (const boost::numeric::odeint::odeint_error& e) {
    throw Error(ErrorCode::ShootDiverged, e.what());
  }
  throw Error(ErrorCode::NoSolutionAtM, "step budget exhausted");
}

inline double lambda_at(int n, const Nonlinearity& nl, double m, const GelfandOptions& o = {}) {
  const double s0 = first_zero(n, nl, m, o);
  return s0 * s0;
}

struct ShootResult {
  RadialProfile profile;
  std::vector<double> du;
  double u1 = 0.0;  // u(1)
};

/// -u'' - (n-1)/rho u' = lambda f(u), u(0) = m, u'(0) = 0 on [0, 1].
inline ShootResult shoot(int n, const Nonlinearity& nl, double lambda, double m, const GelfandOptions& o = {}) {
  require(lambda > 0.0 && m > 0.0, ErrorCode::InvalidArgument, "shoot needs lambda > 0, m > 0");
  const double s_end = std::sqrt(lambda);
  std::vector<double> rho = graded_grid(o.nodes, core_scale(n, nl, m) / s_end / 20.0);
  std::vector<double> s(rho.size());
  for (std::size_t i = 0; i < rho.size(); ++i) s[i] = s_end * rho[i];
  auto [w, ws] = detail::sample_scaled(n, nl, m, s, o);
  for (double& d : ws) d *= s_end;
  const double u1 = w.back();
  return {RadialProfile(n, std::move(rho), std::move(w)), std::move(ws), u1};
}

struct BranchNorms {
  double L1 = 0.0;
  double L2 = 0.0;
  double H1_grad = 0.0;  // ||grad u||_2
  std::optional<double> Lq_star;  // q = 2n/(n-4), n >= 5
  double J = 0.0;  // 1/2 int |grad u|^2 - lambda int F(u)
};

/// A solution of -Delta u = lambda f(u) in B_1, u = 0 on the boundary.
struct BranchPoint {
  double m = 0.0;
  double lambda = 0.0;
  RadialProfile profile;
  std::vector<double> du;  // u'(rho) at the profile nodes
  std::vector<double> d2u;  // u'' from the equation
  double mu1 = 0.0;
  BranchNorms norms;
  double residual = 0.0;

  int n() const { return profile.n(); }
  std::span<const double> rho() const { return profile.rho(); }
  std::span<const double> u() const { return profile.v(); }
};

namespace detail {

// quintic Hermite through (u, u', u'') at rho_k and rho_k+1: u and u' at r
inline std::pair<double, double> hermite(const BranchPoint& p, std::size_t k, double r) {
  const auto rho = p.rho();
  const auto u = p.u();
  const double h = rho[k + 1] - rho[k];
  const double t = (r - rho[k]) / h;
  const double t2 = t * t, t3 = t2 * t, t4 = t3 * t, t5 = t4 * t;
  const double a0 = u[k], a1 = h * p.du[k], a2 = h * h * p.d2u[k];
  const double b0 = u[k + 1], b1 = h * p.du[k + 1], b2 = h * h * p.d2u[k + 1];
  const double v = a0 * (1 - 10 * t3 + 15 * t4 - 6 * t5) + a1 * (t - 6 * t3 + 8 * t4 - 3 * t5) +
                   a2 * (0.5 * t2 - 1.5 * t3 + 1.5 * t4 - 0.5 * t5) + b0 * (10 * t3 - 15 * t4 + 6 * t5) +
                   b1 * (-4 * t3 + 7 * t4 - 3 * t5) + b2 * (0.5 * t3 - t4 + 0.5 * t5);
  const double dv = (a0 - b0) * (-30 * t2 + 60 * t3 - 30 * t4) + a1 * (1 - 18 * t2 + 32 * t3 - 15 * t4) +
                    a2 * (t - 4.5 * t2 + 6 * t3 - 2.5 * t4) + b1 * (-12 * t2 + 28 * t3 - 15 * t4) +
                    b2 * (1.5 * t2 - 4 * t3 + 2.5 * t4);
  return {v, dv / h};
}

inline std::size_t cell_of(const BranchPoint& p, double r) {
  const auto rho = p.rho();
  const auto it = std::upper_bound(rho.begin(), rho.end(), r);
  const std::size_t k = static_cast<std::size_t>(std::max<std::ptrdiff_t>(it - rho.begin() - 1, 0));
  return std::min(k, rho.size() - 2);
}

}  // namespace detail

/// |S^{n-1}| int_a^b g(rho, u, u') rho^{n-1} drho: 8-point Gauss on every
/// cell (clipped to [a, b]) of the quintic Hermite interpolant.
template <class G>
double ball_integral(const BranchPoint& p, double a, double b, G&& g) {
  using gauss8 = boost::math::quadrature::gauss<double, 8>;
  if (b <= a) return 0.0;
  const auto rho = p.rho();
  const int n = p.n();
  double sum = 0.0;
  for (std::size_t k = detail::cell_of(p, a); k + 1 < rho.size() && rho[k] < b; ++k) {
    const double lo = std::max(a, rho[k]), hi = std::min(b, rho[k + 1]);
    if (hi <= lo) continue;
    sum += gauss8::integrate(
        [&](double r) {
          const auto [v, dv] = detail::hermite(p, k, r);
          return g(r, v, dv) * std::pow(r, n - 1);
        },
        lo, hi);
  }
  return unit_sphere_area(n) * sum;
}

namespace detail {

inline double lq_star_exponent(int n) { return 2.0 * n / (n - 4.0); }

inline BranchNorms branch_norms(const BranchPoint& p, const Nonlinearity& nl) {
  BranchNorms b;
  b.L1 = ball_integral(p, 0.0, 1.0, [](double, double v, double) { return std::fabs(v); });
  b.L2 = std::sqrt(ball_integral(p, 0.0, 1.0, [](double, double v, double) { return v * v; }));
  const double grad2 = ball_integral(p, 0.0, 1.0, [](double, double, double dv) { return dv * dv; });
  b.H1_grad = std::sqrt(grad2);
  if (p.n() >= 5) {
    const double q = lq_star_exponent(p.n());
    b.Lq_star = std::pow(
        ball_integral(p, 0.0, 1.0, [q](double, double v, double) { return std::pow(std::fabs(v), q); }), 1.0 / q);
  }
  b.J = 0.5 * grad2 - p.lambda * ball_integral(p, 0.0, 1.0, [&nl](double, double v, double) { return nl.F(v); });
  return b;
}

}  // namespace detail

/// Scaled sup of the integrated ODE, |rho^{n-1} u' + lambda int_0^rho t^{n-1} f(u)| / |u'(1)|,
/// the running integral over the interpolant.
inline double ode_residual(const BranchPoint& p, const Nonlinearity& nl) {
  const auto rho = p.rho();
  const int n = p.n();
  const auto fu = [&nl](double, double v, double) { return nl.f(v); };
  double I = 0.0, worst = 0.0;
  for (std::size_t i = 1; i < rho.size(); ++i) {
    I += ball_integral(p, rho[i - 1], rho[i], fu) / unit_sphere_area(n);
    worst = std::max(worst, std::fabs(std::pow(rho[i], n - 1) * p.du[i] + p.lambda * I));
  }
  return worst / (p.lambda * I);
}

/// Smallest eigenvalue of -xi'' - (n-1)/rho xi' - lambda f'(u) xi with
/// xi'(0) = 0, xi(1) = 0: finite volumes on the profile nodes with the
/// Vertex-centred 3-point scheme for the quadratic form after the ground
/// state substitution xi = g phi, g = (rho^2 + c^2)^{-(n-2)/4}:
///   int (xi'^2 - lambda f'(u) xi^2) rho^{n-1}
///     = int (phi'^2 + (h - lambda f'(u)) phi^2) g^2 rho^{n-1},  h = -Delta g/g.
/// Away from the core h ~ (n-2)^2/(4 rho^2), the Hardy constant. Near the
/// singular limit lambda f'(u) approaches it, and discretizing the plain form
/// leaves a small negative deficit over many decades of rho that shows up as
/// spurious modes of size -1/rho^2. c is the core scale, so phi stays smooth
/// at 0. Symmetrized; Sturm bisection, confirmed by inverse iteration.
inline double stability_eigenvalue(const BranchPoint& p, const Nonlinearity& nl) {
  const auto rho = p.rho();
  const auto u = p.u();
  const int n = p.n();
  const double c2 = std::pow(core_scale(n, nl, p.m), 2) / p.lambda;
  const double b = 0.25 * (n - 2.0);
  const auto g2 = [&](double r) { return std::pow(r * r + c2, -2.0 * b); };
  const auto h = [&](double r) {
    const double q = r * r + c2;
    return (2.0 * b * n * c2 + 0.25 * (n - 2.0) * (n - 2.0) * r * r) / (q * q);
  };
  const std::size_t N = rho.size() - 1;  // unknowns 0..N-1, phi_N = 0
  std::vector<double> vol(N), flux(N), D(N), E(N > 0 ? N - 1 : 0);
  double prev = 0.0;
  for (std::size_t i = 0; i < N; ++i) {
    const double half = 0.5 * (rho[i] + rho[i + 1]);
    const double hn = std::pow(half, n);
    vol[i] = (hn - prev) / n * g2(rho[i]);
    prev = hn;
    flux[i] = std::pow(half, n - 1) * g2(half) / (rho[i + 1] - rho[i]);
  }
  for (std::size_t i = 0; i < N; ++i) {
    const double W = h(rho[i]) - p.lambda * nl.fprime(u[i]);
    const double k = (i > 0 ? flux[i - 1] : 0.0) + flux[i] + W * vol[i];
    D[i] = k / vol[i];
    if (i + 1 < N) E[i] = -flux[i] / (std::sqrt(vol[i]) * std::sqrt(vol[i + 1]));  // product underflows
  }
  const auto count_below = [&](double x) {
    std::size_t c = 0;
    double d = 1.0;
    for (std::size_t i = 0; i < N; ++i) {
      d = (D[i] - x) - (i > 0 ? E[i - 1] * E[i - 1] / d : 0.0);
      if (d == 0.0) d = -1e-300;
      if (d < 0.0) ++c;
    }
    return c;
  };
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (std::size_t i = 0; i < N; ++i) {
    const double rad = (i > 0 ? std::fabs(E[i - 1]) : 0.0) + (i + 1 < N ? std::fabs(E[i]) : 0.0);
    lo = std::min(lo, D[i] - rad);
    hi = std::max(hi, D[i] + rad);
  }
  require(std::isfinite(lo) && std::isfinite(hi), ErrorCode::EigFailed, "stability matrix not finite");
  for (int it = 0; it < 400 && hi - lo > 1e-13 * std::max({1.0, std::fabs(lo), std::fabs(hi)}); ++it) {
    const double mid = 0.5 * (lo + hi);
    (count_below(mid) >= 1 ? hi : lo) = mid;
  }
  const double mu = 0.5 * (lo + hi);

  // inverse iteration at a shift just below mu
  const double scale = std::max(1.0, std::fabs(mu));
  for (double gap : {1e-9, 1e-7, 1e-5}) {
    const double sigma = mu - gap * scale;
    std::vector<double> z(N, 1.0), c(N), y(N);
    bool ok = true;
    for (int sweep = 0; sweep < 4 && ok; ++sweep) {
      // Thomas on (T - sigma) y = z
      double piv = D[0] - sigma;
      c[0] = N > 1 ? E[0] / piv : 0.0;
      y[0] = z[0] / piv;
      for (std::size_t i = 1; i < N && ok; ++i) {
        piv = D[i] - sigma - E[i - 1] * c[i - 1];
        if (piv == 0.0 || !std::isfinite(piv)) ok = false;
        c[i] = i + 1 < N ? E[i] / piv : 0.0;
        y[i] = (z[i] - E[i - 1] * y[i - 1]) / piv;
      }
      for (std::size_t i = N - 1; ok && i-- > 0;) y[i] -= c[i] * y[i + 1];
      double norm = 0.0;
      for (double v : y) norm += v * v;
      norm = std::sqrt(norm);
      if (!(norm > 0.0) || !std::isfinite(norm)) ok = false;
      for (std::size_t i = 0; ok && i < N; ++i) z[i] = y[i] / norm;
    }
    if (!ok) continue;
    // residual against the rounding floor |T||z| (rows near a tiny first cell are huge)
    double rq = 0.0, res = 0.0, floor = 0.0;
    std::vector<double> tz(N);
    for (std::size_t i = 0; i < N; ++i) {
      double mag = std::fabs(D[i] * z[i]);
      tz[i] = D[i] * z[i];
      if (i > 0) {
        tz[i] += E[i - 1] * z[i - 1];
        mag += std::fabs(E[i - 1] * z[i - 1]);
      }
      if (i + 1 < N) {
        tz[i] += E[i] * z[i + 1];
        mag += std::fabs(E[i] * z[i + 1]);
      }
      rq += z[i] * tz[i];
      floor += mag * mag;
    }
    for (std::size_t i = 0; i < N; ++i) res += (tz[i] - rq * z[i]) * (tz[i] - rq * z[i]);
    const double allowed = 1e-6 * scale + 1e-10 * std::sqrt(floor);
    if (std::sqrt(res) <= allowed && std::fabs(rq - mu) <= allowed) return mu;
  }
  throw Error(ErrorCode::EigFailed, "inverse iteration did not confirm the lowest eigenvalue");
}

/// Branch point with u(0) = m.
inline BranchPoint branch_point(int n, const Nonlinearity& nl, double m, const GelfandOptions& o = {}) {
  const double s0 = first_zero(n, nl, m, o);
  std::vector<double> rho = graded_grid(o.nodes, core_scale(n, nl, m) / s0 / 20.0);
  std::vector<double> s(rho.size());
  for (std::size_t i = 0; i < rho.size(); ++i) s[i] = s0 * rho[i];
  auto [w, ws] = detail::sample_scaled(n, nl, m, s, o);
  for (double& d : ws) d *= s0;
  w.back() = 0.0;
  const double lambda = s0 * s0;
  // u'' = -(n-1) u'/rho - lambda f(u), and -lambda f(m)/n at the center
  std::vector<double> d2(rho.size(), -lambda * nl.f(m) / n);
  for (std::size_t i = 1; i < rho.size(); ++i) d2[i] = -(n - 1.0) * ws[i] / rho[i] - lambda * nl.f(w[i]);
  BranchPoint p{m, lambda, RadialProfile(n, std::move(rho), std::move(w)), std::move(ws), std::move(d2), 0.0, {}, 0.0};
  p.mu1 = stability_eigenvalue(p, nl);
  p.norms = detail::branch_norms(p, nl);
  p.residual = ode_residual(p, nl);
  return p;
}

/// One branch point per m (computed concurrently, returned in m order).
inline std::vector<BranchPoint> solve_branch(int n, const Nonlinearity& nl, const std::vector<double>& m_grid,
                                             const GelfandOptions& o = {}) {
  require(!m_grid.empty(), ErrorCode::InvalidArgument, "empty m grid");
  for (std::size_t i = 0; i < m_grid.size(); ++i) {
    require(m_grid[i] > 0.0, ErrorCode::InvalidArgument, "m grid must be positive");
    require(i == 0 || m_grid[i] > m_grid[i - 1], ErrorCode::InvalidArgument, "m grid must increase");
  }
  std::vector<std::optional<BranchPoint>> slots(m_grid.size());
  parallel_for(m_grid.size(), [&](std::size_t i) { slots[i] = branch_point(n, nl, m_grid[i], o); });
  std::vector<BranchPoint> out;
  out.reserve(slots.size());
  for (auto& s : slots) out.push_back(std::move(*s));
  return out;
}

/// m values geometric on [m_max * ratio, m_max].
inline std::vector<double> geometric_m_grid(double m_max, std::size_t points, double ratio = 1e-3) {
  require(m_max > 0.0 && points >= 2 && ratio > 0.0 && ratio < 1.0, ErrorCode::InvalidArgument, "bad m grid");
  std::vector<double> m(points);
  for (std::size_t i = 0; i < points; ++i)
    m[i] = m_max * std::pow(ratio, 1.0 - static_cast<double>(i) / static_cast<double>(points - 1));
  m.back() = m_max;
  return m;
}

}  // namespace curvlab
