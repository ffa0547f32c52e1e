#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include <boost/math/tools/minima.hpp>
#include <boost/math/tools/roots.hpp>

#include "curvlab/error.hpp"
#include "curvlab/gelfand/estimates.hpp"
#include "curvlab/gelfand/shooting.hpp"
#include "curvlab/radial.hpp"

namespace curvlab {

enum class BranchRegime { Fold, Plateau };

inline std::string to_string(BranchRegime r) { return r == BranchRegime::Fold ? "FOLD" : "PLATEAU"; }

struct ExtremalOptions {
  double m_max = 100.0;
  std::size_t points = 64;
  double m_ratio = 1e-3;  // m grid starts at m_max * m_ratio
  int fold_run = 3;  // consecutive decreases that make a fold
  double plateau_tol = 1e-4;  // relative change of lambda over the last decade of m
  GelfandOptions solver;
};

struct BranchDetection {
  std::optional<BranchRegime> regime;
  std::size_t peak = 0;  // index of the largest sampled lambda before the fold
};

/// Fold when lambda(m) decreases over fold_run consecutive m (first such
/// run), plateau when it moved by less than plateau_tol over the last decade.
/// Decreases below 10 rel_tol lambda are shooting noise and do not count.
inline BranchDetection detect_branch(const std::vector<double>& m, const std::vector<double>& lambda,
                                     const ExtremalOptions& o = {}) {
  BranchDetection d;
  const std::size_t k = lambda.size();
  const double noise = 10.0 * o.solver.rel_tol;
  for (std::size_t i = 0; i + o.fold_run < k; ++i) {
    bool falls = true;
    for (int j = 0; j < o.fold_run; ++j)
      falls = falls && lambda[i + j + 1] < lambda[i + j] * (1.0 - noise);
    if (falls) {
      d.regime = BranchRegime::Fold;
      d.peak = i;
      return d;
    }
  }
  std::size_t j = k - 1;
  while (j > 0 && m[j] > m.back() / 10.0) --j;
  if (m[j] <= m.back() / 10.0 && std::fabs(lambda.back() - lambda[j]) < o.plateau_tol * lambda.back()) {
    d.regime = BranchRegime::Plateau;
    d.peak = k - 1;
  }
  return d;
}

struct NormReport {
  double sup = 0.0;  // u(0)
  double H1_grad = 0.0;
  std::optional<double> Lq_star;  // exponent 2n/(n-4), n >= 5
  std::optional<double> q_star;
  SharpRadialExponents sharp;
  // 2n/(n-4) inside the sharp radial range (always for n <= 9)
  std::optional<bool> q_star_below_sharp;
  // linear fit of the norms against the distance to lambda* over the last
  // three stable points, evaluated at lambda*
  std::optional<double> H1_trend, Lq_star_trend;
};

struct ExtremalEstimate {
  double lambda_star = 0.0;
  double uncertainty = 0.0;
  BranchRegime regime = BranchRegime::Fold;
  std::vector<std::string> regime_flags;
  std::vector<BranchPoint> branch;
  BranchPoint u_star_proxy;
  std::optional<double> fold_m;
  NormReport norms;
  WeakSolutionCheck weak;
};

namespace detail {

inline double linear_extrapolate(const std::vector<double>& x, const std::vector<double>& y) {
  const double k = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  const double den = k * sxx - sx * sx;
  if (den == 0.0) return sy / k;
  const double slope = (k * sxy - sx * sy) / den;
  return (sy - slope * sx) / k;
}

}  // namespace detail

/// lambda* from a sweep of m on a geometric grid up to m_max: a fold is
/// refined to the zero of mu1(m) next to the sampled peak, a plateau takes
/// the last value. The proxy for u* is the fold point (or the
/// last stable point before it), resp. the last point of a plateau.
inline ExtremalEstimate extremal_estimate(int n, const Nonlinearity& nl, const ExtremalOptions& o = {}) {
  const std::vector<double> m = geometric_m_grid(o.m_max, o.points, o.m_ratio);
  std::vector<BranchPoint> branch = solve_branch(n, nl, m, o.solver);
  std::vector<double> lambda(branch.size());
  for (std::size_t i = 0; i < branch.size(); ++i) lambda[i] = branch[i].lambda;
  const BranchDetection det = detect_branch(m, lambda, o);
  require(det.regime.has_value(), ErrorCode::InconclusiveBranch,
          "lambda(m) neither folds nor plateaus up to m_max = " + std::to_string(o.m_max));

  const double tol = tol_eig(n, o.solver);
  std::optional<BranchPoint> proxy;
  std::optional<double> fold_m;
  double lambda_star = 0.0, uncertainty = 0.0;
  std::vector<std::string> flags;
  std::size_t last_stable = det.peak;

  if (*det.regime == BranchRegime::Fold) {
    flags.push_back("fold");
    const std::size_t i = det.peak;
    // lambda is flat at the fold, so the turning point is located as the
    // zero of mu1(m) next to the peak; Brent on lambda(m) cross-checks it
    const double a = m[i > 0 ? i - 1 : 0], b = m[i + 1];
    const auto neg = [&](double mm) { return -lambda_at(n, nl, mm, o.solver); };
    std::uintmax_t iters = 200;
    const auto best = boost::math::tools::brent_find_minima(neg, a, b, 40, iters);
    std::size_t j = i > 0 ? i - 1 : 0;
    while (j + 1 < branch.size() && !(branch[j].mu1 >= 0.0 && branch[j + 1].mu1 < 0.0)) ++j;
    if (j + 1 < branch.size() && j <= i + static_cast<std::size_t>(o.fold_run)) {
      iters = 100;
      const auto mu = [&](double mm) { return branch_point(n, nl, mm, o.solver).mu1; };
      const auto root = boost::math::tools::toms748_solve(
          mu, m[j], m[j + 1], branch[j].mu1, branch[j + 1].mu1,
          [](double x, double y) { return std::fabs(y - x) <= 1e-10 * std::fabs(x); }, iters);
      fold_m = 0.5 * (root.first + root.second);
      lambda_star = lambda_at(n, nl, *fold_m, o.solver);
      uncertainty = std::fabs(lambda_star + best.second);
    } else {
      flags.push_back("no_mu1_crossing");
      fold_m = best.first;
      lambda_star = -best.second;
    }
    // ODE error estimate: the same point at 100x tighter tolerances
    GelfandOptions tight = o.solver;
    tight.abs_tol *= 1e-2;
    tight.rel_tol *= 1e-2;
    uncertainty = std::max(uncertainty, std::fabs(lambda_at(n, nl, *fold_m, tight) - lambda_star));
    BranchPoint fp = branch_point(n, nl, *fold_m, o.solver);
    while (last_stable > 0 && branch[last_stable].mu1 < -tol) --last_stable;
    if (fp.mu1 >= -tol)
      proxy = std::move(fp);
    else
      proxy = branch[last_stable];
  } else {
    flags.push_back("plateau");
    lambda_star = lambda.back();
    std::size_t j = lambda.size() - 1;
    while (j > 0 && m[j] > m.back() / 10.0) --j;
    uncertainty = std::fabs(lambda.back() - lambda[j]);
    while (last_stable > 0 && branch[last_stable].mu1 < -tol) --last_stable;
    proxy = branch[last_stable];
  }
  for (const auto& p : branch)
    if (p.mu1 < -tol) {
      flags.push_back("unstable_points");
      break;
    }

  NormReport nr;
  nr.sup = proxy->m;
  nr.H1_grad = proxy->norms.H1_grad;
  nr.Lq_star = proxy->norms.Lq_star;
  nr.sharp = sharp_radial_exponents(n);
  if (n >= 5) {
    nr.q_star = detail::lq_star_exponent(n);
    nr.q_star_below_sharp = nr.sharp.q0.is_infinite() || *nr.q_star < nr.sharp.q0.value();
  }
  if (last_stable >= 2) {
    std::vector<double> x, h1, lq;
    for (std::size_t k = last_stable - 2; k <= last_stable; ++k) {
      const double gap = std::max(lambda_star - branch[k].lambda, 0.0);
      // near a fold the norms move like sqrt(lambda* - lambda)
      x.push_back(*det.regime == BranchRegime::Fold ? std::sqrt(gap) : gap);
      h1.push_back(branch[k].norms.H1_grad);
      if (branch[k].norms.Lq_star) lq.push_back(*branch[k].norms.Lq_star);
    }
    nr.H1_trend = detail::linear_extrapolate(x, h1);
    if (lq.size() == x.size()) nr.Lq_star_trend = detail::linear_extrapolate(x, lq);
  }
  WeakSolutionCheck weak = weak_solution_check(*proxy, nl);
  return ExtremalEstimate{lambda_star, uncertainty, *det.regime, flags, std::move(branch),
                          std::move(*proxy), fold_m, nr, weak};
}

}  // namespace curvlab
