#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "curvlab/constants.hpp"
#include "curvlab/error.hpp"
#include "curvlab/field.hpp"
#include "curvlab/radial.hpp"

namespace curvlab {

/// Decreasing cutoffs psi on [0, 1] with psi(0) = 1 and psi = 0 for s >= 1.
///  SMOOTHSTEP: 1 - f(s)/(f(s) + f(1-s)), f(s) = exp(-1/s); every derivative
///    vanishes at both ends.
///  BUMP: exp(1 - 1/(1 - s^2)); flat at s = 1, only psi'(0) = 0 at s = 0.
enum class Cutoff { Smoothstep, Bump };

inline std::string to_string(Cutoff c) { return c == Cutoff::Smoothstep ? "SMOOTHSTEP" : "BUMP"; }

inline Cutoff parse_cutoff(const std::string& id) {
  if (id == "SMOOTHSTEP" || id == "smoothstep") return Cutoff::Smoothstep;
  if (id == "BUMP" || id == "bump") return Cutoff::Bump;
  throw Error(ErrorCode::InvalidArgument, "unknown cutoff '" + id + "'");
}

inline double cutoff_value(Cutoff c, double s) {
  if (s <= 0.0) return 1.0;
  if (s >= 1.0) return 0.0;
  if (c == Cutoff::Bump) return std::exp(1.0 - 1.0 / (1.0 - s * s));
  const double a = std::exp(-1.0 / s), b = std::exp(-1.0 / (1.0 - s));
  return b / (a + b);
}

struct CubeParams {
  int nodes = 256;  // per axis
  int n = 2;
  // when > 0, refine so the band {0 < d < eps0} spans at least this many cells
  double cells_per_band = 0.0;
  int max_nodes = 2048;
};

/// Euclidean distance from x to the closed unit cube [0, 1]^n.
inline double cube_distance(const Point& x, int n) {
  double s = 0.0;
  for (int a = 0; a < n; ++a) {
    const double e = std::max({0.0, -x[a], x[a] - 1.0});
    s += e * e;
  }
  return std::sqrt(s);
}

/// v = psi(d(x)/eps0) with d the distance to the unit cube: v = psi(0) on the
/// cube, support {d < eps0}. The offset levels {d = s eps0} are flat faces
/// joined by round edges/corners of radius s eps0.
inline ScalarField build_cube_counterexample(double eps0, Cutoff cutoff, const CubeParams& params = {}) {
  require(eps0 > 0.0 && eps0 < 1.0, ErrorCode::BadEpsilon, "eps0 must lie in (0, 1)");
  require(params.n == 2 || params.n == 3, ErrorCode::InvalidArgument, "cube counterexample needs n = 2 or 3");
  require(params.nodes >= ScalarField::kMinShape, ErrorCode::InvalidArgument, "need at least 32 nodes per axis");
  // two spare cells beyond the support on each side
  const double span = 1.0 + 2.0 * eps0;
  int nodes = params.nodes;
  if (params.cells_per_band > 0.0) {
    const double want = std::ceil(params.cells_per_band * span / eps0) + 5.0;
    nodes = static_cast<int>(std::min<double>(std::max<double>(nodes, want), params.max_nodes));
  }
  const double h = span / (nodes - 5);
  const double o = -eps0 - 2.0 * h;
  const int n = params.n;
  return ScalarField::sample_box(n, {nodes, nodes, n == 3 ? nodes : 1}, h, {o, o, n == 3 ? o : 0.0},
                                 [=](const Point& x) { return cutoff_value(cutoff, cube_distance(x, n) / eps0); });
}

enum class CounterexampleVerdict { FailureDemonstrated, NoFailure, NotInFailureRange };

inline std::string to_string(CounterexampleVerdict v) {
  switch (v) {
    case CounterexampleVerdict::FailureDemonstrated: return "FAILURE_DEMONSTRATED";
    case CounterexampleVerdict::NoFailure: return "NO_FAILURE";
    case CounterexampleVerdict::NotInFailureRange: return "NOT_IN_FAILURE_RANGE";
  }
  return "?";
}

struct CounterexampleRow {
  double eps0 = 0.0;
  int nodes = 0;
  double energy = 0.0;  // int |H|^{pr} |grad v|^p dx
  double lq_norm = 0.0;
  double ratio = 0.0;  // ||v||_q / energy^{1/p}
  Convergence convergence = Convergence::Unchecked;
};

struct CounterexampleReport {
  double p = 1.0, r = 0.0, q = 0.0;
  Cutoff cutoff = Cutoff::Smoothstep;
  std::vector<CounterexampleRow> rows;
  double slope = 0.0;  // least-squares d log(energy) / d log(eps0)
  double theory_slope = 0.0;  // (1 - pr) - (p - 1)
  bool ratio_monotone = false;
  double ratio_growth = 0.0;  // last / first
  CounterexampleVerdict verdict = CounterexampleVerdict::NoFailure;
};

inline double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t m = x.size();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < m; ++i) {
    const double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (m * sxy - sx * sy) / (m * sxx - sx * sx);
}

inline constexpr double kSlopeTolerance = 0.15;
inline constexpr double kVanishingSlope = 0.1;

/// Energy, L^q norm and ratio along eps0 -> 0 with the fitted energy slope.
/// q defaults to p*_r when it is finite, else 2p. Verdict:
///  NOT_IN_FAILURE_RANGE when r > 2/p - 1 (theory slope < 0),
///  FAILURE_DEMONSTRATED when the fitted slope shows a vanishing energy
///  (above 0.1 and at most 0.15 below theory) and the ratio increases
///  monotonically, NO_FAILURE otherwise (including the border r = 2/p - 1).
inline CounterexampleReport counterexample_report(double p, double r, const std::vector<double>& eps0_list,
                                                  Cutoff cutoff = Cutoff::Smoothstep, const CubeParams& params = {},
                                                  std::optional<double> q = std::nullopt) {
  require(p >= 1.0 && r > 0.0, ErrorCode::InvalidArgument, "counterexample needs p >= 1, r > 0");
  require(eps0_list.size() >= 4, ErrorCode::InvalidArgument, "need at least 4 eps0 values");
  for (std::size_t i = 1; i < eps0_list.size(); ++i)
    require(eps0_list[i] < eps0_list[i - 1], ErrorCode::InvalidArgument, "eps0 list must decrease");
  CounterexampleReport rep;
  rep.p = p;
  rep.r = r;
  rep.cutoff = cutoff;
  if (q) {
    rep.q = *q;
  } else {
    InequalityParams ip;
    ip.n = params.n;
    ip.p = p;
    ip.r = r;
    ip.exploration = true;
    const Exponent ps = critical_exponent(ip).value;
    rep.q = ps.is_finite() ? ps.value() : 2.0 * p;
  }
  rep.theory_slope = (1.0 - p * r) - (p - 1.0);
  std::vector<double> eps, en;
  for (double e0 : eps0_list) {
    const ScalarField f = build_cube_counterexample(e0, cutoff, params);
    const EnergyReport er = curvature_energy(f, p, r);
    CounterexampleRow row;
    row.eps0 = e0;
    row.nodes = f.shape(0);
    row.energy = er.integral;
    row.convergence = er.convergence;
    row.lq_norm = field_lq_norm(f, rep.q);
    row.ratio = er.integral > 0.0 ? row.lq_norm / er.energy : std::numeric_limits<double>::infinity();
    rep.rows.push_back(row);
    eps.push_back(e0);
    en.push_back(er.integral);
  }
  rep.slope = loglog_slope(eps, en);
  rep.ratio_monotone = true;
  for (std::size_t i = 1; i < rep.rows.size(); ++i)
    rep.ratio_monotone = rep.ratio_monotone && rep.rows[i].ratio > rep.rows[i - 1].ratio;
  rep.ratio_growth = rep.rows.back().ratio / rep.rows.front().ratio;
  if (rep.theory_slope < -1e-12)
    rep.verdict = CounterexampleVerdict::NotInFailureRange;
  else if (rep.slope >= rep.theory_slope - kSlopeTolerance && rep.slope > kVanishingSlope && rep.ratio_monotone)
    rep.verdict = CounterexampleVerdict::FailureDemonstrated;
  else
    rep.verdict = CounterexampleVerdict::NoFailure;
  return rep;
}

}  // namespace curvlab
