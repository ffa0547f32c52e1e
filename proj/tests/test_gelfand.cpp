#include <chrono>
#include <cmath>
#include <map>
#include <numbers>

#include <boost/math/tools/roots.hpp>
#include <gtest/gtest.h>

#include "curvlab/gelfand.hpp"

using namespace curvlab;

namespace {

constexpr double kPi = std::numbers::pi;

const ExtremalEstimate& sweep(int n, const std::string& f) {
  static std::map<std::pair<int, std::string>, ExtremalEstimate> cache;
  const auto key = std::make_pair(n, f);
  auto it = cache.find(key);
  if (it == cache.end()) it = cache.emplace(key, extremal_estimate(n, Nonlinearity::parse(f))).first;
  return it->second;
}

// Liouville family on the unit disk: u = ln(8mu / (lambda (1 + mu rho^2)^2)),
// u(1) = 0 gives lambda = 8mu/(1+mu)^2 and m = 2 ln(1+mu)
double liouville_lambda(double m) {
  const double mu = std::expm1(0.5 * m);
  return 8.0 * mu / ((1.0 + mu) * (1.0 + mu));
}

// plain fixed-step RK4 in s for w'' = -(n-1)/s w' - e^w, w(0) = m; the first
// zero s0 gives lambda = s0^2
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
  // series w = m - e^m s^2/(2n) + e^{2m} s^4/(8n(n+2))
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

BranchPoint point_at_lambda(int n, const Nonlinearity& nl, double lambda, double m_hi) {
  std::uintmax_t iters = 100;
  const auto r = boost::math::tools::toms748_solve([&](double m) { return lambda_at(n, nl, m) - lambda; }, 1e-6,
                                                   m_hi, boost::math::tools::eps_tolerance<double>(50), iters);
  return branch_point(n, nl, 0.5 * (r.first + r.second));
}

std::vector<double> level_grid(double m, int k = 16) {
  std::vector<double> s;
  for (int i = 1; i <= k; ++i) s.push_back(m * i / k);
  return s;
}

}  // namespace

// --- expression and nonlinearity ---

TEST(Expression, EvaluatesAndDifferentiates) {
  const auto e = Expression::parse("2*exp(u) - u^2/4 + pow(1+u, 3) - log(2+u)");
  for (double u : {0.0, 0.5, 2.0}) {
    EXPECT_NEAR(e(u), 2 * std::exp(u) - u * u / 4 + std::pow(1 + u, 3) - std::log(2 + u), 1e-13);
    EXPECT_NEAR(e.derivative(u), 2 * std::exp(u) - u / 2 + 3 * std::pow(1 + u, 2) - 1 / (2 + u), 1e-12);
  }
  EXPECT_DOUBLE_EQ(Expression::parse("-2^2")(0.0), -4.0);
  EXPECT_DOUBLE_EQ(Expression::parse("2^3^2")(0.0), 512.0);
  EXPECT_DOUBLE_EQ(Expression::parse(" 1.5e1 * u ")(2.0), 30.0);
}

TEST(Expression, MalformedInput) {
  for (const char* bad : {"", "u +", "exp(u", "sin(u)", "2 ** u", "pow(u)", "u)"}) {
    try {
      Expression::parse(bad);
      ADD_FAILURE() << bad;
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::MalformedInput) << bad;
    }
  }
}

TEST(Nonlinearity, ParseForms) {
  EXPECT_EQ(Nonlinearity::parse("exp").id, NonlinearityId::Exp);
  const auto p = Nonlinearity::parse("pow(1+u, 3)");
  EXPECT_EQ(p.id, NonlinearityId::Power);
  EXPECT_EQ(p.exponent, 3.0);
  EXPECT_EQ(Nonlinearity::parse("power:2.5").exponent, 2.5);
  EXPECT_EQ(Nonlinearity::parse("exp(u) + u").id, NonlinearityId::User);
}

TEST(Nonlinearity, AntiderivativeVanishesAtZero) {
  for (const auto& nl : {Nonlinearity::exp(), Nonlinearity::power(3), Nonlinearity::user("exp(u) + u")}) {
    EXPECT_EQ(nl.F(0.0), 0.0);
    for (double t : {0.3, 2.0}) {
      // F' = f by central difference
      EXPECT_NEAR((nl.F(t + 1e-5) - nl.F(t - 1e-5)) / 2e-5, nl.f(t), 1e-6 * nl.f(t)) << nl.name;
    }
  }
  EXPECT_NEAR(Nonlinearity::user("exp(u) + u").F(2.0), std::expm1(2.0) + 2.0, 1e-12);
}

TEST(Nonlinearity, Validation) {
  EXPECT_THROW(Nonlinearity::user("1 - u"), Error);
  EXPECT_THROW(Nonlinearity::user("u"), Error);  // f(0) = 0
  EXPECT_THROW(Nonlinearity::power(1.0), Error);
  EXPECT_TRUE(Nonlinearity::exp().warnings.empty());
  EXPECT_FALSE(Nonlinearity::user("1 + u").warnings.empty());  // f(t)/t decreasing
}

// --- shooting ---

TEST(Shoot, LiouvilleFamily) {
  const auto nl = Nonlinearity::exp();
  for (double m : {0.01, 0.3, 1.0, 2 * std::log(2.0), 3.0, 8.0}) {
    const double lam = lambda_at(2, nl, m);
    EXPECT_NEAR(lam, liouville_lambda(m), 1e-6) << m;
    const auto r = shoot(2, nl, lam, m);
    EXPECT_NEAR(r.u1, 0.0, 1e-7);
    const double mu = std::expm1(0.5 * m);
    const auto rho = r.profile.rho();
    const auto u = r.profile.v();
    for (std::size_t i = 0; i < rho.size(); i += 97)
      EXPECT_NEAR(u[i], std::log(8 * mu / (lam * std::pow(1 + mu * rho[i] * rho[i], 2))), 1e-6);
  }
}

TEST(Shoot, LinearRegime) {
  const auto nl = Nonlinearity::exp();
  for (int n : {2, 3, 7}) {
    const double lam = 1e-6, m = lam / (2.0 * n);
    const auto r = shoot(n, nl, lam, m);
    EXPECT_LT(std::fabs(r.u1), 1e-4 * m);
    const auto rho = r.profile.rho();
    const auto u = r.profile.v();
    for (std::size_t i = 0; i < rho.size(); i += 101) EXPECT_NEAR(u[i], m * (1 - rho[i] * rho[i]), 1e-4 * m);
  }
}

TEST(Shoot, SingularProfileInDimensionTen) {
  const auto r = shoot(10, Nonlinearity::exp(), 16.0, 30.0);
  EXPECT_NEAR(r.u1, 0.0, 1e-6);
  const auto rho = r.profile.rho();
  const auto u = r.profile.v();
  for (std::size_t i = 0; i < rho.size(); ++i)
    if (rho[i] >= 0.1) {
      EXPECT_NEAR(u[i], -2 * std::log(rho[i]), 1e-5);
    }
}

TEST(Shoot, Errors) {
  const auto nl = Nonlinearity::exp();
  EXPECT_THROW(shoot(3, nl, 0.0, 1.0), Error);
  EXPECT_THROW(shoot(3, nl, 1.0, -1.0), Error);
  // f blows up for negative u, so the profile runs off to -inf before rho = 1
  const auto wild = Nonlinearity::user("exp(u*u/100)");
  try {
    shoot(3, wild, 1e4, 1.0);
    ADD_FAILURE();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ShootDiverged);
  }
  EXPECT_THROW(branch_point(3, nl, 0.0), Error);
}

TEST(Shoot, GradedGrid) {
  const auto g = graded_grid(2048, 1e-9);
  EXPECT_EQ(g.front(), 0.0);
  EXPECT_EQ(g.back(), 1.0);
  EXPECT_NEAR(g[1], 1e-9, 1e-12);
  for (std::size_t i = 1; i < g.size(); ++i) EXPECT_GT(g[i], g[i - 1]);
  const auto u = graded_grid(33, 0.5);
  for (std::size_t i = 0; i < u.size(); ++i) EXPECT_NEAR(u[i], i / 32.0, 1e-15);
}

// --- branch and extremal parameter ---

TEST(Branch, LiouvilleOnSampledGrid) {
  const auto nl = Nonlinearity::exp();
  const auto m = geometric_m_grid(10.0, 24);
  const auto b = solve_branch(2, nl, m);
  for (const auto& p : b) EXPECT_NEAR(p.lambda, liouville_lambda(p.m), 1e-6);
  EXPECT_THROW(solve_branch(2, nl, {1.0, 0.5}), Error);
  EXPECT_THROW(solve_branch(2, nl, {}), Error);
}

TEST(Branch, LambdaStarInTwoDimensions) {
  const auto& e = sweep(2, "exp");
  EXPECT_EQ(e.regime, BranchRegime::Fold);
  EXPECT_NEAR(e.lambda_star, 2.0, 1e-3);
  EXPECT_NEAR(*e.fold_m, 2 * std::log(2.0), 1e-4);
  EXPECT_TRUE(std::isfinite(e.norms.sup));
  EXPECT_LT(e.uncertainty, 1e-6);
}

TEST(Branch, LambdaStarInThreeDimensions) {
  const auto& e = sweep(3, "exp");
  EXPECT_NEAR(e.lambda_star, 3.322, 0.01);
  // independent fixed-step oracle, golden section in m
  double a = 1.0, b = 2.5;
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  double x1 = b - g * (b - a), x2 = a + g * (b - a);
  double f1 = rk4_lambda(3, x1), f2 = rk4_lambda(3, x2);
  for (int it = 0; it < 30; ++it) {
    if (f1 > f2) {
      b = x2, x2 = x1, f2 = f1, x1 = b - g * (b - a), f1 = rk4_lambda(3, x1);
    } else {
      a = x1, x1 = x2, f1 = f2, x2 = a + g * (b - a), f2 = rk4_lambda(3, x2);
    }
  }
  EXPECT_NEAR(e.lambda_star, std::max(f1, f2), 1e-6);
}

TEST(Branch, PlateauInDimensionTen) {
  const auto& e = sweep(10, "exp");
  EXPECT_EQ(e.regime, BranchRegime::Plateau);
  EXPECT_NEAR(e.lambda_star, 16.0, 0.05);
  // lambda(m) increases toward 16 (up to shooting noise)
  for (std::size_t i = 1; i < e.branch.size(); ++i)
    EXPECT_GT(e.branch[i].lambda, e.branch[i - 1].lambda - 1e-6);
  const auto rho = e.u_star_proxy.rho();
  const auto u = e.u_star_proxy.u();
  for (std::size_t i = 0; i + 1 < rho.size(); ++i)
    if (rho[i] >= 0.1) {
      EXPECT_LE(std::fabs(u[i] + 2 * std::log(rho[i])), 0.01 * -2 * std::log(rho[i]));
    }
}

TEST(Branch, LqStarOfProxyAgainstGammaOracle) {
  // int_B (-2 ln rho)^a = |S^9| 2^a Gamma(a+1) / 10^{a+1}, a = 10/3
  const double a = 10.0 / 3.0;
  const double oracle = std::pow(unit_sphere_area(10) * std::pow(2.0, a) * std::tgamma(a + 1) / std::pow(10.0, a + 1), 0.3);
  const auto& e = sweep(10, "exp");
  ASSERT_TRUE(e.norms.Lq_star.has_value());
  EXPECT_NEAR(*e.norms.q_star, a, 1e-14);
  EXPECT_NEAR(*e.norms.Lq_star, oracle, 0.05 * oracle);
  EXPECT_LE(*e.norms.Lq_star, oracle * 1.05);
}

TEST(Branch, DimensionNineStaysBounded) {
  const auto& e = sweep(9, "exp");
  EXPECT_EQ(e.regime, BranchRegime::Fold);
  EXPECT_TRUE(std::isfinite(e.norms.sup));
  EXPECT_GT(e.norms.sup, sweep(5, "exp").norms.sup);
  ASSERT_TRUE(e.norms.q_star_below_sharp.has_value());
  EXPECT_TRUE(*e.norms.q_star_below_sharp);
}

TEST(Branch, SweepTime) {
  const auto t0 = std::chrono::steady_clock::now();
  ExtremalOptions o;
  const auto e = extremal_estimate(3, Nonlinearity::exp(), o);
  EXPECT_EQ(e.branch.size(), 64u);
  EXPECT_EQ(e.branch.front().rho().size(), 2048u);
  EXPECT_LT(std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count(), 10.0);
}

TEST(Branch, Detector) {
  const std::vector<double> m = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 20, 30};
  EXPECT_EQ(*detect_branch(m, {1, 2, 3, 2.9, 2.8, 2.7, 2.6, 2.5, 2.4, 2.3, 2.2, 2.1}).regime, BranchRegime::Fold);
  EXPECT_EQ(detect_branch(m, {1, 2, 3, 2.9, 2.8, 2.7, 2.6, 2.5, 2.4, 2.3, 2.2, 2.1}).peak, 2u);
  // two decreases do not make a fold
  EXPECT_FALSE(detect_branch(m, {1, 2, 3, 2.9, 2.8, 2.9, 3.0, 3.1, 3.2, 3.3, 3.4, 3.5}).regime.has_value());
  std::vector<double> flat(m.size(), 5.0);
  flat[0] = 1.0;
  EXPECT_EQ(*detect_branch(m, flat).regime, BranchRegime::Plateau);
  // decreases within shooting noise do not count
  std::vector<double> noisy = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 10, 10};
  noisy[10] = 10 * (1 - 1e-9), noisy[11] = 10 * (1 - 2e-9);
  EXPECT_FALSE(detect_branch(m, noisy).regime.has_value());
}

TEST(Branch, Inconclusive) {
  ExtremalOptions o;
  o.m_max = 4.0;
  o.points = 16;
  try {
    extremal_estimate(10, Nonlinearity::exp(), o);
    ADD_FAILURE();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InconclusiveBranch);
  }
}

// --- stability eigenvalue ---

TEST(Stability, DirichletLimit) {
  const auto nl = Nonlinearity::exp();
  const auto p = branch_point(3, nl, 1e-6);
  EXPECT_NEAR(p.mu1, kPi * kPi, 0.01 * kPi * kPi);
  EXPECT_NEAR(p.mu1, kPi * kPi, 1e-3);
  EXPECT_NEAR(dirichlet_eigenvalue(3), kPi * kPi, 1e-12);
  for (int n : {2, 5, 10}) EXPECT_NEAR(branch_point(n, nl, 1e-6).mu1, dirichlet_eigenvalue(n), 1e-3 * dirichlet_eigenvalue(n));
}

TEST(Stability, SecondOrderUnderRefinement) {
  const auto nl = Nonlinearity::exp();
  GelfandOptions o;
  o.abs_tol = 1e-14;
  o.rel_tol = 1e-13;
  std::vector<double> mu;
  for (std::size_t N : {65, 129, 257, 513}) {
    o.nodes = N;
    mu.push_back(branch_point(3, nl, 1.0, o).mu1);
  }
  for (std::size_t i = 0; i + 2 < mu.size(); ++i) {
    const double ratio = (mu[i + 1] - mu[i]) / (mu[i + 2] - mu[i + 1]);
    EXPECT_NEAR(ratio, 4.0, 0.5);
  }
}

TEST(Stability, PositiveBeforeFoldAndNonincreasing) {
  for (int n = 2; n <= 9; ++n) {
    const auto& e = sweep(n, "exp");
    ASSERT_EQ(e.regime, BranchRegime::Fold) << n;
    const double tol = tol_eig(n);
    double prev = std::numeric_limits<double>::infinity();
    for (const auto& p : e.branch) {
      if (p.m >= *e.fold_m) break;
      EXPECT_GT(p.mu1, 0.0) << "n=" << n << " m=" << p.m;
      EXPECT_LE(p.mu1, prev + tol) << "n=" << n << " m=" << p.m;
      prev = p.mu1;
    }
    EXPECT_LE(std::fabs(e.u_star_proxy.mu1), 1e-3 * dirichlet_eigenvalue(n)) << n;
  }
}

TEST(Stability, DimensionTenStaysStable) {
  const auto& e = sweep(10, "exp");
  for (const auto& p : e.branch) EXPECT_GE(p.mu1, -tol_eig(10)) << p.m;
  EXPECT_EQ(std::count(e.regime_flags.begin(), e.regime_flags.end(), "unstable_points"), 0);
}

TEST(Stability, GeometricCheckOnBuiltinFamily) {
  for (const char* f : {"exp", "power:3"})
    for (int n : {2, 3, 5, 7, 10}) {
      const auto& e = sweep(n, f);
      const auto nl = Nonlinearity::parse(f);
      for (const auto& p : e.branch) {
        if (p.mu1 < -tol_eig(n)) continue;
        for (const auto& tf : builtin_test_functions(p)) {
          const auto c = stability_geometric_check(p, nl, tf);
          EXPECT_TRUE(c.pass) << f << " n=" << n << " m=" << p.m << " " << tf.label;
          EXPECT_DOUBLE_EQ(c.lhs_curvature, c.lhs);
        }
      }
    }
}

TEST(Stability, TruncationMatchesDirectQuadrature) {
  // (n-1) s^2 int_{u>s} |grad u|^2 / rho^2 <= int_{u<=s} |grad u|^4 at eta = min(u, s)
  const auto nl = Nonlinearity::exp();
  const auto& e = sweep(3, "exp");
  const auto& p = e.branch[20];
  const double s = 0.5 * p.m;
  const auto c = stability_geometric_check(p, nl, TestFunction::truncation(s));
  const double rs = level_radius(p, s);
  const double inner = ball_integral(p, 0.0, rs, [](double r, double, double dv) { return dv * dv / (r * r); });
  const double outer = ball_integral(p, rs, 1.0, [](double r, double v, double dv) { return dv * dv * v * v / (r * r); });
  EXPECT_NEAR(c.lhs, 2.0 * (s * s * inner + outer), 1e-8 * c.lhs);
  EXPECT_NEAR(c.rhs, ball_integral(p, rs, 1.0, [](double, double, double dv) { return std::pow(dv, 4); }), 1e-12);
  EXPECT_TRUE(c.pass);
}

TEST(Stability, DistanceCapDisplay) {
  // eta = min(1 - rho, eps): rhs = int_{rho > 1-eps} |grad u|^2
  const auto nl = Nonlinearity::exp();
  const auto& p = sweep(5, "exp").branch[25];
  const auto c = stability_geometric_check(p, nl, TestFunction::dist_cap(0.2));
  EXPECT_NEAR(c.rhs, ball_integral(p, 0.8, 1.0, [](double, double, double dv) { return dv * dv; }), 1e-12);
  const double core = ball_integral(p, 0.0, 0.8, [](double r, double, double dv) { return dv * dv / (r * r); });
  EXPECT_GE(c.lhs, 4.0 * 0.04 * core);
  EXPECT_TRUE(c.pass);
}

TEST(Stability, LinearRegimeScalesQuadratically) {
  const auto nl = Nonlinearity::exp();
  const auto a = stability_geometric_check(branch_point(4, nl, 1e-4), nl, TestFunction::dist_cap(0.5));
  const auto b = stability_geometric_check(branch_point(4, nl, 2e-4), nl, TestFunction::dist_cap(0.5));
  EXPECT_NEAR(b.lhs / a.lhs, 4.0, 1e-3);
  EXPECT_NEAR(b.rhs / a.rhs, 4.0, 1e-3);
  EXPECT_TRUE(a.pass);
}

TEST(Stability, UserTestFunction) {
  const auto nl = Nonlinearity::exp();
  const auto p = branch_point(5, nl, 1.0);
  const auto c = stability_geometric_check(p, nl, TestFunction::user("1-rho^2", [](double r) { return 1 - r * r; }));
  const auto d = stability_geometric_check(
      p, nl, TestFunction::user("1-rho^2", [](double r) { return 1 - r * r; }, [](double r) { return -2 * r; }));
  EXPECT_NEAR(c.rhs, d.rhs, 1e-6 * d.rhs);
  EXPECT_TRUE(d.pass);
}

TEST(Stability, UnstablePointRejected) {
  const auto nl = Nonlinearity::exp();
  const auto p = branch_point(3, nl, 5.0);
  ASSERT_LT(p.mu1, -tol_eig(3));
  try {
    stability_geometric_check(p, nl, TestFunction::truncation(1.0));
    ADD_FAILURE();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NotSemistable);
  }
}

// --- estimates ---

TEST(Estimates, LqOnSemistableSweeps) {
  for (const char* f : {"exp", "power:3"})
    for (int n : {5, 7, 10}) {
      const auto nl = Nonlinearity::parse(f);
      const auto iso = IsoperimetricConstants::sphere_equality(n);
      for (const auto& p : sweep(n, f).branch) {
        if (p.mu1 < -tol_eig(n)) continue;
        for (const auto& c : lq_estimate_check(p, nl, level_grid(p.m), iso))
          EXPECT_TRUE(c.pass) << f << " n=" << n << " m=" << p.m << " s=" << c.param;
      }
    }
}

TEST(Estimates, LqTrivialLevels) {
  const auto nl = Nonlinearity::power(3);
  const auto& b = sweep(5, "power:3").branch;
  const auto& p = b[b.size() / 4];
  const auto c = lq_estimate_check(p, nl, {p.m, 2 * p.m}, IsoperimetricConstants::sphere_equality(5));
  EXPECT_EQ(c[0].lhs, 0.0);
  EXPECT_EQ(c[1].lhs, 0.0);
  EXPECT_TRUE(c[0].pass && c[1].pass);
  EXPECT_THROW(lq_estimate_check(p, nl, {0.0}, IsoperimetricConstants::sphere_equality(5)), Error);
  try {
    lq_estimate_check(branch_point(4, nl, 0.5), nl, {0.1}, IsoperimetricConstants::sphere_equality(4));
    ADD_FAILURE();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::WrongRegime);
  }
}

TEST(Estimates, LqFiniteNearExtremal) {
  const auto& e = sweep(10, "exp");
  const auto c = lq_estimate_check(e.u_star_proxy, Nonlinearity::exp(), {1.0, 2.0, 5.0},
                                   IsoperimetricConstants::sphere_equality(10));
  for (const auto& x : c) {
    EXPECT_TRUE(std::isfinite(x.lhs));
    EXPECT_TRUE(x.pass);
  }
}

TEST(Estimates, LinfInLowDimensions) {
  const auto nl = Nonlinearity::exp();
  const auto p3 = point_at_lambda(3, nl, 0.5 * sweep(3, "exp").lambda_star, 1.0);
  EXPECT_NEAR(p3.lambda, 0.5 * sweep(3, "exp").lambda_star, 1e-8);
  std::vector<double> s = level_grid(p3.m);
  s.push_back(1e-8);
  for (const auto& c : linf_estimate_check(p3, s, IsoperimetricConstants::sphere_equality(3)))
    EXPECT_TRUE(c.pass) << c.param;
  // vacuous as s -> 0
  EXPECT_GT(linf_estimate_check(p3, {1e-8}, IsoperimetricConstants::sphere_equality(3))[0].rhs, 1e3);
  const auto& fold = sweep(2, "exp").u_star_proxy;
  for (const auto& c : linf_estimate_check(fold, level_grid(fold.m), IsoperimetricConstants::sphere_equality(2)))
    EXPECT_TRUE(c.pass) << c.param;
  EXPECT_THROW(linf_estimate_check(branch_point(4, nl, 0.5), {0.1}, IsoperimetricConstants::sphere_equality(4)),
               Error);
}

TEST(Estimates, GradientExponents) {
  const auto nl = Nonlinearity::exp();
  const auto p5 = branch_point(5, nl, 1.0);
  EXPECT_NEAR(gradient_estimate_check(p5, nl, 5.0 / 3.0, 1.0).p_q, 5.0 / 4.0, 1e-14);
  EXPECT_NEAR(gradient_estimate_check(p5, nl, 10.0, 1.5).p_q, 20.0 / 11.0, 1e-14);
  const auto g = gradient_estimate_check(p5, nl, 10.0, 1.5);
  EXPECT_NEAR(*g.q_dim, 10.0, 1e-14);
  EXPECT_NEAR(*g.p_dim, 20.0 / 11.0, 1e-14);
  for (double bad_p : {20.0 / 11.0, 2.0, 0.5}) {
    try {
      gradient_estimate_check(p5, nl, 10.0, bad_p);
      ADD_FAILURE() << bad_p;
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::WrongRegime);
    }
  }
  EXPECT_THROW(gradient_estimate_check(p5, nl, 1.5, 1.0), Error);  // q < n/(n-2)
}

TEST(Estimates, GradientOnSemistableSweeps) {
  for (const char* f : {"exp", "power:3"})
    for (int n : {5, 7, 10}) {
      const auto nl = Nonlinearity::parse(f);
      const double q = 2.0 * n / (n - 4.0);
      const double pq = 4.0 * n / (3.0 * n - 4.0);
      for (const auto& p : sweep(n, f).branch) {
        if (p.mu1 < -tol_eig(n)) continue;
        for (double pe : {4.0 / 3.0, pq / 1.1})
          EXPECT_TRUE(gradient_estimate_check(p, nl, q, pe).verdict.pass) << f << " n=" << n << " m=" << p.m;
      }
    }
  const auto& e = sweep(10, "exp");
  EXPECT_TRUE(gradient_estimate_check(e.u_star_proxy, Nonlinearity::exp(), 10.0 / 3.0, 4.0 / 3.0).verdict.pass);
}

TEST(Estimates, PohozaevAndNedev) {
  const auto nl = Nonlinearity::exp();
  const auto p = point_at_lambda(3, nl, 1.0, 1.0);
  EXPECT_LE(pohozaev_and_nedev(p).identity_residual, 1e-6);
  double sup_grad = 0.0;
  for (const auto& q : sweep(2, "exp").branch) {
    if (q.mu1 < -tol_eig(2)) continue;
    EXPECT_TRUE(pohozaev_and_nedev(q).h1_bound_pass) << q.m;
    sup_grad = std::max(sup_grad, q.norms.H1_grad);
  }
  EXPECT_TRUE(std::isfinite(sup_grad));
  EXPECT_LT(sup_grad, 10.0);
  for (const char* f : {"exp", "power:3"})
    for (int n : {5, 7, 10})
      for (const auto& q : sweep(n, f).branch) {
        if (q.mu1 < -tol_eig(n)) continue;
        const auto c = pohozaev_and_nedev(q);
        EXPECT_LE(c.identity_residual, 1e-6) << f << " n=" << n << " m=" << q.m;
        EXPECT_TRUE(c.h1_bound_pass) << f << " n=" << n << " m=" << q.m;
      }
}

TEST(Estimates, PohozaevLinearLimit) {
  const auto nl = Nonlinearity::exp();
  const auto a = pohozaev_and_nedev(branch_point(3, nl, 1e-4));
  const auto b = pohozaev_and_nedev(branch_point(3, nl, 2e-4));
  EXPECT_NEAR(b.grad2 / a.grad2, 4.0, 1e-3);
  EXPECT_LE(a.identity_residual, 1e-8);
}

TEST(Estimates, RefinementReducesResiduals) {
  // tight ODE tolerances so the grid error dominates
  const auto nl = Nonlinearity::exp();
  GelfandOptions o;
  o.abs_tol = 1e-14;
  o.rel_tol = 1e-13;
  for (int n : {3, 10}) {
    std::vector<double> poh, res;
    for (std::size_t N : {33, 65}) {
      o.nodes = N;
      const auto p = branch_point(n, nl, 5.0, o);
      poh.push_back(pohozaev_and_nedev(p).identity_residual);
      res.push_back(p.residual);
    }
    EXPECT_GE(poh[0] / poh[1], 4.0) << n;
    EXPECT_GE(res[0] / res[1], 3.0) << n;
  }
}

TEST(Estimates, WeakSolutionOfProxy) {
  for (int n : {2, 5, 9, 10}) {
    const auto& e = sweep(n, "exp");
    EXPECT_TRUE(e.weak.pass) << n << " " << e.weak.max_relerr;
    EXPECT_EQ(e.weak.relerr.size(), 4u);
    EXPECT_TRUE(std::isfinite(e.weak.f_dist_l1));
  }
}

TEST(Estimates, WeakFormOracleForConstantSource) {
  // lambda -> 0: u = lambda (1 - rho^2)/(2n), int u (-Delta phi_1) = lambda int phi_1
  const auto nl = Nonlinearity::exp();
  const auto p = branch_point(4, nl, 1e-7);
  const auto w = weak_solution_check(p, nl, 6);
  EXPECT_TRUE(w.pass);
  EXPECT_NEAR(w.f_dist_l1, unit_sphere_area(4) * (1.0 / 4 - 1.0 / 5), 1e-6);
}

// --- branch invariants ---

TEST(Invariants, ProfilesAndEnergy) {
  for (const char* f : {"exp", "power:3"})
    for (int n : {2, 3, 5, 7, 10}) {
      for (const auto& p : sweep(n, f).branch) {
        const auto u = p.u();
        EXPECT_EQ(u.back(), 0.0);
        bool monotone = true;
        for (std::size_t i = 0; i + 1 < u.size(); ++i) monotone = monotone && u[i] > u[i + 1] && u[i] > 0.0;
        EXPECT_TRUE(monotone) << f << " n=" << n << " m=" << p.m;
        // accepted (semi-stable) points meet 1e-8; far up the unstable branch
        // the rel_tol floor of the integrator shows
        if (p.mu1 >= -tol_eig(n)) {
          EXPECT_LE(p.residual, 1e-8) << f << " n=" << n << " m=" << p.m;
          EXPECT_LE(p.norms.J, 0.0) << f << " n=" << n << " m=" << p.m;
        }
        EXPECT_LE(p.residual, 1e-7) << f << " n=" << n << " m=" << p.m;
        EXPECT_GT(p.norms.L1, 0.0);
        EXPECT_EQ(p.norms.Lq_star.has_value(), n >= 5);
      }
    }
}

TEST(Invariants, NormsOfLinearProfile) {
  // u = c (1 - rho^2) + O(c^2) in n = 3: L1 = 4 pi c (1/3 - 1/5), |grad u|_2^2 = 4 pi 4 c^2 / 5
  const auto nl = Nonlinearity::exp();
  const auto p = branch_point(3, nl, 1e-7);
  const double c = 1e-7;
  EXPECT_NEAR(p.norms.L1, 4 * kPi * c * (1.0 / 3 - 1.0 / 5), 1e-6 * p.norms.L1);
  EXPECT_NEAR(p.norms.H1_grad * p.norms.H1_grad, 4 * kPi * 4 * c * c / 5, 1e-6 * 4 * kPi * 4 * c * c / 5);
}

TEST(Invariants, Deterministic) {
  const auto nl = Nonlinearity::exp();
  const auto m = geometric_m_grid(5.0, 12);
  const auto a = solve_branch(5, nl, m);
  const auto b = solve_branch(5, nl, m);
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].lambda, b[i].lambda);
    EXPECT_EQ(a[i].mu1, b[i].mu1);
    EXPECT_EQ(a[i].norms.J, b[i].norms.J);
  }
}
