#pragma once

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "curvlab/constants.hpp"
#include "curvlab/contour.hpp"
#include "curvlab/field.hpp"

namespace curvlab {

struct LevelSetStats {
  double t = 0.0;
  double V = 0.0;
  double P = 0.0;
  double curv_int = std::numeric_limits<double>::quiet_NaN();  // int_{|v|=t} |H|^r dsigma
  double ratio_talenti = std::numeric_limits<double>::quiet_NaN();  // A1 V^{(n-1)/n} / P
  double ratio_ms = std::numeric_limits<double>::quiet_NaN();
  double ratio_chain = std::numeric_limits<double>::quiet_NaN();
  bool empty = false;  // level outside (0, max|v|)
  bool irregular = false;  // contour met the gradient mask
};

/// 64 levels uniform in (0.02, 0.98) max|v|.
inline std::vector<double> default_t_grid(const ScalarField& field, int count = 64) {
  const double m = field.max_abs();
  std::vector<double> t(count);
  for (int i = 0; i < count; ++i) t[i] = m * (0.02 + 0.96 * i / std::max(1, count - 1));
  return t;
}

namespace detail {

inline void require_increasing(const std::vector<double>& t) {
  for (std::size_t i = 1; i < t.size(); ++i)
    require(t[i] > t[i - 1], ErrorCode::InvalidArgument, "t_grid must be strictly increasing");
}

inline double talenti_ratio(int n, double A1, double V, double P) {
  return P > 0.0 ? A1 * std::pow(V, (n - 1.0) / n) / P : std::numeric_limits<double>::quiet_NaN();
}

}  // namespace detail

/// V(t) and P(t) of |v| on the given levels, with A1 V^{(n-1)/n} / P.
inline std::vector<LevelSetStats> distribution_and_perimeter(const ScalarField& field, const std::vector<double>& t_grid,
                                                             const IsoperimetricConstants& iso) {
  detail::require_increasing(t_grid);
  const auto absv = detail::abs_values(field);
  const double vmax = field.max_abs();
  std::vector<LevelSetStats> out(t_grid.size());
  for (std::size_t i = 0; i < t_grid.size(); ++i) {
    LevelSetStats& s = out[i];
    s.t = t_grid[i];
    if (!(s.t > 0.0 && s.t < vmax)) {
      s.empty = true;
      continue;
    }
    const LevelMeasures m = measure_level(field, absv, s.t);
    s.V = m.V;
    s.P = m.P;
    s.ratio_talenti = detail::talenti_ratio(field.n(), iso.A1, s.V, s.P);
  }
  return out;
}

/// int_{|v|=t} |H|^r dsigma with H interpolated from the node curvature.
inline double level_surface_integral(const ScalarField& field, double t, double r, const CurvatureField& curv) {
  const auto absv = detail::abs_values(field);
  const LevelMeasures m = measure_level(field, absv, t, &curv, r);
  require(m.pieces > 0, ErrorCode::IrregularLevel, "level " + std::to_string(t) + " is empty");
  require(!m.irregular, ErrorCode::IrregularLevel, "level " + std::to_string(t) + " meets the gradient mask");
  return m.weighted;
}

inline double level_surface_integral(const ScalarField& field, double t, double r) {
  return level_surface_integral(field, t, r, mean_curvature(field));
}

/// Per level: ratio_talenti, ratio_ms = P^e / (A2^r int |H|^r) and
/// ratio_chain = A1^e V^{(n-(1+r))/n} / (A2^r int |H|^r), e = (n-(1+r))/(n-1).
/// Irregular levels are flagged and keep NaN ratios.
inline std::vector<LevelSetStats> verify_key_chain(const ScalarField& field, double r, const std::vector<double>& t_grid,
                                                   const IsoperimetricConstants& iso) {
  require(r == 0.0 || r >= 1.0, ErrorCode::InvalidArgument, "key chain needs r = 0 or r >= 1");
  detail::require_increasing(t_grid);
  const int n = field.n();
  require(iso.n == n, ErrorCode::InvalidArgument, "isoperimetric constants for another dimension");
  const auto absv = detail::abs_values(field);
  const CurvatureField curv = mean_curvature(field);
  const double vmax = field.max_abs();
  const double e = (n - (1.0 + r)) / (n - 1.0);
  std::vector<LevelSetStats> out(t_grid.size());
  // measure_level runs the cells in parallel
  for (std::size_t i = 0; i < t_grid.size(); ++i) {
    LevelSetStats& s = out[i];
    s.t = t_grid[i];
    if (!(s.t > 0.0 && s.t < vmax)) {
      s.empty = true;
      continue;
    }
    const LevelMeasures m = measure_level(field, absv, s.t, &curv, r);
    s.V = m.V;
    s.P = m.P;
    s.ratio_talenti = detail::talenti_ratio(n, iso.A1, s.V, s.P);
    if (m.irregular || m.pieces == 0) {
      s.irregular = true;
      continue;
    }
    s.curv_int = m.weighted;
    const double denom = std::pow(iso.A2, r) * s.curv_int;
    s.ratio_ms = std::pow(s.P, e) / denom;
    s.ratio_chain = std::pow(iso.A1, e) * std::pow(s.V, (n - (1.0 + r)) / n) / denom;
  }
  return out;
}

inline bool distribution_nonincreasing(const std::vector<LevelSetStats>& stats) {
  double prev = std::numeric_limits<double>::infinity();
  for (const auto& s : stats) {
    if (s.empty) continue;
    if (s.V > prev) return false;
    prev = s.V;
  }
  return true;
}

struct CoareaResult {
  double lhs = 0.0;  // int g |grad v| dx
  double rhs = 0.0;  // int_0^inf int_{|v|=t} g dsigma dt
  double relerr = 0.0;
  int levels = 0;
  int irregular_levels = 0;
};

/// Coarea identity for g = |H|^w (g = 1 for w = 0), levels by the midpoint
/// rule in t.
inline CoareaResult coarea_check(const ScalarField& field, double weight_exponent, int levels = 256) {
  require(levels >= 8, ErrorCode::InvalidArgument, "need at least 8 levels");
  const double w = weight_exponent;
  const CurvatureField curv = mean_curvature(field);
  CoareaResult res;
  res.levels = levels;
  double lhs = 0.0;
  for (std::size_t i = 0; i < field.size(); ++i) {
    const double gn = curv.grad.norm[i];
    if (w == 0.0) {
      if (gn > curv.eps_grad) lhs += gn;
    } else if (curv.defined[i]) {
      lhs += std::pow(std::fabs(curv.H[i]), w) * gn;
    }
  }
  res.lhs = lhs * field.cell_measure();

  const double vmax = field.max_abs();
  if (vmax == 0.0) return res;
  const auto absv = detail::abs_values(field);
  const double dt = vmax / levels;
  std::vector<double> F(levels);
  std::vector<std::uint8_t> bad(levels, 0);
  for (int k = 0; k < levels; ++k) {
    const double t = (k + 0.5) * dt;
    const LevelMeasures m = w == 0.0 ? measure_level(field, absv, t) : measure_level(field, absv, t, &curv, w);
    F[k] = m.weighted;
    bad[k] = m.irregular;
  }
  double rhs = 0.0;
  for (int k = 0; k < levels; ++k) {
    rhs += F[k];
    res.irregular_levels += bad[k];
  }
  res.rhs = rhs * dt;
  const double scale = std::max(std::fabs(res.lhs), std::fabs(res.rhs));
  res.relerr = scale > 0.0 ? std::fabs(res.lhs - res.rhs) / scale : 0.0;
  return res;
}

}  // namespace curvlab
