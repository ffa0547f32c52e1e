#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "curvlab/error.hpp"
#include "curvlab/math.hpp"
#include "curvlab/quadrature.hpp"

namespace curvlab {

/// Exponent data (n, p, r[, q]) for one inequality instance.
struct InequalityParams {
  int n = 2;
  double p = 1.0;
  double r = 0.0;
  std::optional<Exponent> q;
  /// Admits r in (0,1); such runs report numbers without theorem verdicts.
  bool exploration = false;

  double order() const { return p * (1.0 + r); }

  /// Checks the structural invariants. Throws InvalidArgument.
  void validate() const {
    require(n >= 2, ErrorCode::InvalidArgument, "n must be >= 2");
    require(p >= 1.0, ErrorCode::InvalidArgument, "p must be >= 1");
    require(r >= 0.0, ErrorCode::InvalidArgument, "r must be >= 0");
    if (!exploration) {
      require(r == 0.0 || r >= 1.0, ErrorCode::InvalidArgument,
              "r in (0,1) requires exploration mode");
    }
    if (q && q->is_finite()) require(q->value() >= 1.0, ErrorCode::InvalidArgument, "q must be >= 1");
  }
};

/// Position of n relative to the derivative order p(1+r).
enum class ExponentRegime {
  Sobolev,  // n > p(1+r): finite critical exponent
  Critical,  // n = p(1+r)
  Morrey,  // n < p(1+r)
};

inline std::string to_string(ExponentRegime regime) {
  switch (regime) {
    case ExponentRegime::Sobolev: return "SUBCRITICAL_SOBOLEV";
    case ExponentRegime::Critical: return "CRITICAL";
    case ExponentRegime::Morrey: return "SUPERCRITICAL_MORREY";
  }
  return "?";
}

struct CriticalExponent {
  Exponent value;
  ExponentRegime regime;
};

inline ExponentRegime exponent_regime(const InequalityParams& params) {
  const int cmp = compare_exponents(static_cast<double>(params.n), params.order());
  if (cmp > 0) return ExponentRegime::Sobolev;
  if (cmp == 0) return ExponentRegime::Critical;
  return ExponentRegime::Morrey;
}

/// p*_r from 1/p*_r = 1/p - (1+r)/n; infinite outside the Sobolev regime.
inline CriticalExponent critical_exponent(const InequalityParams& params) {
  require(params.n >= 2 && params.p >= 1.0 && params.r >= 0.0, ErrorCode::InvalidArgument,
          "critical_exponent: need n >= 2, p >= 1, r >= 0");
  const ExponentRegime regime = exponent_regime(params);
  if (regime != ExponentRegime::Sobolev) return {Exponent::infinity(), regime};
  return {Exponent::finite(params.n * params.p / (params.n - params.order())), regime};
}

enum class Validity { Holds, Fails, HoldsStrictSubcritical };

inline std::string to_string(Validity v) {
  switch (v) {
    case Validity::Holds: return "HOLDS";
    case Validity::Fails: return "FAILS";
    case Validity::HoldsStrictSubcritical: return "HOLDS_STRICT_SUBCRITICAL";
  }
  return "?";
}

/// Validity map of the one-dimensional weighted inequality
///   (int |v|^q rho^{n-1})^{1/q} <= C (int rho^{-pr} |v'|^p rho^{n-1})^{1/p}.
inline Validity regime_classify(const InequalityParams& params) {
  require(params.q.has_value(), ErrorCode::MissingExponent, "regime_classify needs q");
  const Exponent q = *params.q;
  const CriticalExponent crit = critical_exponent(params);
  switch (crit.regime) {
    case ExponentRegime::Morrey:
      return Validity::Holds;
    case ExponentRegime::Critical:
      return q.is_infinite() ? Validity::Fails : Validity::HoldsStrictSubcritical;
    case ExponentRegime::Sobolev:
      if (q.is_infinite()) return Validity::Fails;
      return compare_exponents(q.value(), crit.value.value()) <= 0 ? Validity::Holds : Validity::Fails;
  }
  return Validity::Fails;
}

inline bool holds(Validity v) { return v != Validity::Fails; }

/// Radial function v(rho) on nodes 0 = rho_0 < ... < rho_last = R in dimension n.
/// The mean curvature of its level sets is 1/rho.
class RadialProfile {
 public:
  static constexpr std::size_t kMinNodes = 16;

  RadialProfile(int n, std::vector<double> rho, std::vector<double> v)
      : n_(n), rho_(std::move(rho)), v_(std::move(v)) {
    require(n_ >= 2, ErrorCode::InvalidArgument, "profile dimension must be >= 2");
    require(rho_.size() == v_.size(), ErrorCode::InvalidArgument, "rho/v size mismatch");
    require(rho_.size() >= kMinNodes, ErrorCode::InvalidArgument, "profile needs >= 16 nodes");
    require(rho_.front() == 0.0, ErrorCode::InvalidArgument, "rho[0] must be 0");
    for (std::size_t i = 1; i < rho_.size(); ++i)
      require(rho_[i] > rho_[i - 1], ErrorCode::InvalidArgument, "rho must be strictly increasing");
    for (double x : v_) require(std::isfinite(x), ErrorCode::InvalidArgument, "profile value not finite");
  }

  /// Samples f on nodes uniform in [0, R].
  static RadialProfile sample(int n, double R, std::size_t nodes, const std::function<double(double)>& f) {
    std::vector<double> rho(nodes), v(nodes);
    for (std::size_t i = 0; i < nodes; ++i) {
      rho[i] = R * static_cast<double>(i) / static_cast<double>(nodes - 1);
      v[i] = f(rho[i]);
    }
    rho.back() = R;
    return RadialProfile(n, std::move(rho), std::move(v));
  }

  /// Samples f on given nodes.
  static RadialProfile sample_on(int n, std::vector<double> rho, const std::function<double(double)>& f) {
    std::vector<double> v(rho.size());
    for (std::size_t i = 0; i < rho.size(); ++i) v[i] = f(rho[i]);
    return RadialProfile(n, std::move(rho), std::move(v));
  }

  int n() const { return n_; }
  double R() const { return rho_.back(); }
  std::size_t size() const { return rho_.size(); }
  std::span<const double> rho() const { return rho_; }
  std::span<const double> v() const { return v_; }

  bool compactly_supported() const { return v_.back() == 0.0; }

  void require_compact_support() const {
    require(compactly_supported(), ErrorCode::InvalidArgument, "profile must vanish at rho = R");
  }

  /// v' by second-order differences: central (nonuniform) inside, one-sided at the ends.
  std::vector<double> derivative() const {
    const std::size_t m = rho_.size();
    std::vector<double> d(m);
    const auto& x = rho_;
    const auto& y = v_;
    for (std::size_t i = 1; i + 1 < m; ++i) {
      const double a = x[i] - x[i - 1], b = x[i + 1] - x[i];
      d[i] = -b / (a * (a + b)) * y[i - 1] + (b - a) / (a * b) * y[i] + a / (b * (a + b)) * y[i + 1];
    }
    {
      const double a = x[1] - x[0], b = x[2] - x[1];
      d[0] = -(2 * a + b) / (a * (a + b)) * y[0] + (a + b) / (a * b) * y[1] - a / (b * (a + b)) * y[2];
    }
    {
      const std::size_t k = m - 1;
      const double a = x[k - 1] - x[k - 2], b = x[k] - x[k - 1];
      d[k] = b / (a * (a + b)) * y[k - 2] - (a + b) / (a * b) * y[k - 1] + (a + 2 * b) / (b * (a + b)) * y[k];
    }
    return d;
  }

  /// Same profile with values mapped through phi.
  RadialProfile transformed(const std::function<double(double)>& phi) const {
    std::vector<double> w(v_.size());
    std::transform(v_.begin(), v_.end(), w.begin(), phi);
    return RadialProfile(n_, rho_, std::move(w));
  }

  RadialProfile scaled(double c) const {
    return transformed([c](double x) { return c * x; });
  }

  /// v(rho / s) on [0, s R], nodes scaled along.
  RadialProfile dilated(double s) const {
    std::vector<double> rho(rho_.size());
    std::transform(rho_.begin(), rho_.end(), rho.begin(), [s](double x) { return s * x; });
    return RadialProfile(n_, std::move(rho), v_);
  }

 private:
  int n_;
  std::vector<double> rho_;
  std::vector<double> v_;
};

namespace detail {

// int_{x0}^{x1} rho^a drho without cancellation when x1 - x0 << x0.
inline double weight_moment(double x0, double x1, double a) {
  const double e = a + 1.0;
  if (x0 <= 0.0) return std::pow(x1, e) / e;
  return std::pow(x0, e) * std::expm1(e * std::log1p((x1 - x0) / x0)) / e;
}

// int_{x0}^{x1} rho^a (rho - m) drho, m the midpoint. Series in h/m when the
// direct difference of moments would cancel.
inline double weight_first_moment(double x0, double x1, double a) {
  const double h = x1 - x0;
  const double m = 0.5 * (x0 + x1);
  const double u = h / m;
  if (u < 0.1) {
    const double c1 = a / 12.0;
    const double c3 = a * (a - 1.0) * (a - 2.0) / 480.0;
    const double c5 = a * (a - 1.0) * (a - 2.0) * (a - 3.0) * (a - 4.0) / 53760.0;
    return std::pow(m, a + 2.0) * (c1 * u * u * u + c3 * std::pow(u, 5) + c5 * std::pow(u, 7));
  }
  const double m1 = (std::pow(x1, a + 2.0) - std::pow(x0, a + 2.0)) / (a + 2.0);
  return m1 - m * weight_moment(x0, x1, a);
}

inline double minmod(double l, double r) {
  if (l * r <= 0.0) return 0.0;
  return std::fabs(l) < std::fabs(r) ? l : r;
}

}  // namespace detail

/// (int_0^R rho^{n-1-pr} |v'|^p drho)^{1/p}, no angular factor.
/// |v'|^p is taken from cell slopes, reconstructed linearly across midpoints
/// with a minmod limiter and integrated against exact weight moments. Kinks at
/// nodes stay exact and the singular weight keeps second order. Work is done
/// in log scale per cell so that nodes down to ~1e-300 neither overflow nor
/// underflow.
inline double radial_weighted_energy(const RadialProfile& profile, double p, double r) {
  const int n = profile.n();
  require(n > p * r, ErrorCode::NonintegrableWeight, "radial weight rho^{n-1-pr} not integrable at 0");
  const auto rho = profile.rho();
  const auto v = profile.v();
  const double a = n - 1.0 - p * r;
  const std::size_t cells = rho.size() - 1;
  constexpr double kNone = -std::numeric_limits<double>::infinity();
  std::vector<double> logG(cells), mid(cells);
  for (std::size_t i = 0; i < cells; ++i) {
    const double slope = std::fabs(v[i + 1] - v[i]) / (rho[i + 1] - rho[i]);
    logG[i] = slope > 0.0 ? p * std::log(slope) : kNone;
    mid[i] = 0.5 * (rho[i] + rho[i + 1]);
  }
  // (G[j] - G[i]) / G[i] for G[i] > 0
  const auto rel = [&](std::size_t j, std::size_t i) { return std::expm1(logG[j] - logG[i]); };

  double log_max = kNone;
  std::vector<double> logs(cells, kNone), factors(cells, 0.0);
  for (std::size_t i = 0; i < cells; ++i) {
    if (logG[i] == kNone) continue;
    double dG = 0.0;  // relative slope of G
    if (cells == 1) {
      dG = 0.0;
    } else if (i == 0) {
      dG = rel(1, 0) / (mid[1] - mid[0]);
    } else if (i + 1 == cells) {
      dG = -rel(i - 1, i) / (mid[i] - mid[i - 1]);
    } else {
      dG = detail::minmod(-rel(i - 1, i) / (mid[i] - mid[i - 1]), rel(i + 1, i) / (mid[i + 1] - mid[i]));
    }
    // moments scaled by rho[i+1]: M0 = x1^{a+1} m0, M1 = x1^{a+2} m1
    const double x1 = rho[i + 1];
    const double m0 = detail::weight_moment(rho[i] / x1, 1.0, a);
    const double m1 = detail::weight_first_moment(rho[i] / x1, 1.0, a);
    logs[i] = logG[i] + (a + 1.0) * std::log(x1) + std::log(m0);
    factors[i] = 1.0 + dG * x1 * m1 / m0;
    log_max = std::max(log_max, logs[i]);
  }
  if (log_max == kNone) return 0.0;
  double scaled = 0.0;
  for (std::size_t i = 0; i < cells; ++i)
    if (logs[i] != kNone) scaled += std::exp(logs[i] - log_max) * factors[i];
  if (scaled <= 0.0) return 0.0;
  return std::exp((log_max + std::log(scaled)) / p);
}

/// (int_0^R |v|^q rho^{n-1} drho)^{1/q}, no angular factor; max |v| for q = inf.
inline double radial_lq_norm(const RadialProfile& profile, Exponent q) {
  const auto v = profile.v();
  if (q.is_infinite()) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::fabs(x));
    return m;
  }
  const double qq = q.value();
  require(qq >= 1.0, ErrorCode::InvalidArgument, "q must be >= 1");
  const auto rho = profile.rho();
  std::vector<double> y(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) y[i] = std::pow(std::fabs(v[i]), qq) * std::pow(rho[i], profile.n() - 1);
  return std::pow(std::max(quad::simpson(rho, y), 0.0), 1.0 / qq);
}

/// Quotient of the two sides above at q (defaults to p*_r).
inline double sobolev_quotient(const RadialProfile& profile, const InequalityParams& params) {
  const Exponent q = params.q.value_or(critical_exponent(params).value);
  const double lhs = radial_lq_norm(profile, q);
  const double rhs = radial_weighted_energy(profile, params.p, params.r);
  if (rhs == 0.0) {
    require(lhs == 0.0, ErrorCode::DegenerateQuotient, "zero energy with nonzero function");
    return 0.0;
  }
  return lhs / rhs;
}

struct SharpRadialExponents {
  Exponent q0;  // Lebesgue integrability threshold
  Exponent q1;  // gradient integrability threshold
};

/// Optimal regularity exponents of semi-stable radial solutions on the unit ball.
inline SharpRadialExponents sharp_radial_exponents(int n) {
  require(n >= 2, ErrorCode::InvalidArgument, "n must be >= 2");
  if (n <= 9) return {Exponent::infinity(), Exponent::infinity()};
  const double root = 2.0 * std::sqrt(n - 1.0);
  const double d1 = n - root - 2.0;
  const double d0 = n - root - 4.0;
  const Exponent q1 = d1 <= 1e-12 ? Exponent::infinity() : Exponent::finite(2.0 * n / d1);
  const Exponent q0 = d0 <= 1e-12 ? Exponent::infinity() : Exponent::finite(2.0 * n / d0);
  return {q0, q1};
}

/// Numbers behind the level-set-preserving substitution w = |v|^gamma with
/// gamma = p*_r / 1*_r that reduces the p > 1 Sobolev case to p = 1.
struct GammaPowerChain {
  double gamma = 1.0;
  double norm_identity_relerr = 0.0;  // | ||w||_{1*} - ||v||_{p*}^gamma | / ||v||_{p*}^gamma
  double holder_ratio = 0.0;  // energy_1(w) / (gamma ||v||_{p*}^{gamma-1} energy_p(v))
  double p1_quotient = 0.0;  // ||w||_{1*} / energy_1(w)
};

inline GammaPowerChain gamma_power_chain(const RadialProfile& profile, const InequalityParams& params) {
  require(exponent_regime(params) == ExponentRegime::Sobolev, ErrorCode::WrongRegime,
          "gamma-power chain needs n > p(1+r)");
  const int n = params.n;
  const double r = params.r;
  const double p_star = critical_exponent(params).value.value();
  const double one_star = n / (n - (1.0 + r));
  GammaPowerChain out;
  out.gamma = p_star / one_star;
  const double gamma = out.gamma;
  const RadialProfile w = profile.transformed([gamma](double x) { return std::pow(std::fabs(x), gamma); });

  const double v_norm = radial_lq_norm(profile, Exponent::finite(p_star));
  const double w_norm = radial_lq_norm(w, Exponent::finite(one_star));
  const double target = std::pow(v_norm, gamma);
  out.norm_identity_relerr = std::fabs(w_norm - target) / target;

  const double w_energy = radial_weighted_energy(w, 1.0, r);
  const double v_energy = radial_weighted_energy(profile, params.p, r);
  out.holder_ratio = w_energy / (gamma * std::pow(v_norm, gamma - 1.0) * v_energy);
  out.p1_quotient = w_norm / w_energy;
  return out;
}

}  // namespace curvlab
