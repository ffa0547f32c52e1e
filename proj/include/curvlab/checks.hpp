#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "curvlab/constants.hpp"
#include "curvlab/field.hpp"
#include "curvlab/radial.hpp"

namespace curvlab {

struct Tolerance {
  double analytic = 1e-9;
  std::optional<double> slack;  // discretization slack; 1% radial, 5% grid when unset
};

inline constexpr double kRadialSlack = 0.01;
inline constexpr double kGridSlack = 0.05;

struct Verdict {
  std::string check;
  ExponentRegime regime = ExponentRegime::Sobolev;
  double lhs = 0.0;
  double rhs = 0.0;
  double ratio = 0.0;  // lhs / rhs
  bool pass = false;
  bool indeterminate = false;  // never counted as pass
  double tol = 0.0;
  ConstantBundle constants;
  std::vector<std::string> caveats;

  bool counts_as_pass() const { return pass && !indeterminate; }
};

inline nlohmann::json to_json(const Verdict& v) {
  nlohmann::json c = nlohmann::json::object();
  if (v.constants.C1) c["C1"] = *v.constants.C1;
  if (v.constants.C2) c["C2"] = *v.constants.C2;
  if (v.constants.C3) c["C3"] = *v.constants.C3;
  if (v.constants.C4) c["C4"] = *v.constants.C4;
  c["A"] = v.constants.A;
  if (v.constants.p_dual) c["p_dual"] = *v.constants.p_dual;
  const auto num = [](double x) { return std::isfinite(x) ? nlohmann::json(x) : nlohmann::json(std::to_string(x)); };
  return {{"check", v.check},       {"regime", to_string(v.regime)}, {"lhs", num(v.lhs)},
          {"rhs", num(v.rhs)},      {"ratio", num(v.ratio)},         {"pass", v.pass},
          {"indeterminate", v.indeterminate}, {"tol", v.tol},        {"constants", c},
          {"caveats", v.caveats}};
}

/// The quantities a check needs, taken either from a radial profile (with the
/// angular factor |S^{n-1}|, so everything is a full-measure value) or from a
/// grid field.
class Sample {
 public:
  virtual ~Sample() = default;
  virtual int n() const = 0;
  virtual bool radial() const = 0;
  /// (int |H|^{pr} |grad v|^p dx)^{1/p}
  virtual double energy(double p, double r, Convergence* conv) const = 0;
  virtual double lq_norm(Exponent q) const = 0;
  virtual double omega() const = 0;
  /// int_Omega exp((|v|/K)^e) dx
  virtual double exp_moment(double K, double e) const = 0;
  /// ess sup of |H|^r |grad v| over {|grad v| > 0}; nullopt for an empty mask
  virtual std::optional<double> weighted_sup(double r) const = 0;
  virtual bool is_zero() const = 0;
};

class RadialSample final : public Sample {
 public:
  explicit RadialSample(const RadialProfile& profile) : prof_(profile) {
    prof_.require_compact_support();
    const auto v = prof_.v();
    const auto rho = prof_.rho();
    std::size_t last = 0;
    for (std::size_t i = 0; i < v.size(); ++i)
      if (v[i] != 0.0) last = i;
    support_R_ = is_zero() ? 0.0 : rho[std::min(last + 1, rho.size() - 1)];
  }

  int n() const override { return prof_.n(); }
  bool radial() const override { return true; }

  double energy(double p, double r, Convergence* conv) const override {
    if (conv) *conv = Convergence::Unchecked;
    return std::pow(unit_sphere_area(n()), 1.0 / p) * radial_weighted_energy(prof_, p, r);
  }

  double lq_norm(Exponent q) const override {
    if (q.is_infinite()) return radial_lq_norm(prof_, q);
    return std::pow(unit_sphere_area(n()), 1.0 / q.value()) * radial_lq_norm(prof_, q);
  }

  double omega() const override { return ball_volume(n(), support_R_); }

  double exp_moment(double K, double e) const override {
    const auto rho = prof_.rho();
    const auto v = prof_.v();
    std::vector<double> x, y;
    for (std::size_t i = 0; i < rho.size() && rho[i] <= support_R_; ++i) {
      x.push_back(rho[i]);
      y.push_back(std::exp(std::pow(std::fabs(v[i]) / K, e)) * std::pow(rho[i], n() - 1));
    }
    if (x.size() < 3) return 0.0;
    return unit_sphere_area(n()) * quad::simpson(x, y);
  }

  std::optional<double> weighted_sup(double r) const override {
    const auto d = prof_.derivative();
    const auto rho = prof_.rho();
    double dmax = 0.0;
    for (double x : d) dmax = std::max(dmax, std::fabs(x));
    if (dmax == 0.0) return std::nullopt;
    const double eps = 1e-8 * dmax;
    double sup = 0.0;
    for (std::size_t i = 0; i < d.size(); ++i) {
      if (std::fabs(d[i]) <= eps) continue;
      // level sets are spheres, H = 1/rho
      if (rho[i] == 0.0) return r > 0.0 ? std::numeric_limits<double>::infinity() : std::fabs(d[i]);
      sup = std::max(sup, std::pow(rho[i], -r) * std::fabs(d[i]));
    }
    return sup;
  }

  bool is_zero() const override {
    const auto v = prof_.v();
    return std::all_of(v.begin(), v.end(), [](double x) { return x == 0.0; });
  }

 private:
  RadialProfile prof_;
  double support_R_ = 0.0;
};

class FieldSample final : public Sample {
 public:
  explicit FieldSample(const ScalarField& field) : f_(field), curv_(mean_curvature(field)) {}

  int n() const override { return f_.n(); }
  bool radial() const override { return false; }

  double energy(double p, double r, Convergence* conv) const override {
    const EnergyReport rep = curvature_energy(f_, p, r);
    if (conv) *conv = rep.convergence;
    return rep.energy;
  }

  double lq_norm(Exponent q) const override {
    return q.is_infinite() ? f_.max_abs() : field_lq_norm(f_, q.value());
  }

  double omega() const override { return support_measure(f_); }

  double exp_moment(double K, double e) const override {
    double s = 0.0;
    for (double v : f_.values())
      if (v != 0.0) s += std::exp(std::pow(std::fabs(v) / K, e));
    return s * f_.cell_measure();
  }

  std::optional<double> weighted_sup(double r) const override {
    double sup = 0.0;
    bool any = false;
    for (std::size_t i = 0; i < f_.size(); ++i) {
      if (!curv_.defined[i]) continue;
      any = true;
      sup = std::max(sup, std::pow(std::fabs(curv_.H[i]), r) * curv_.grad.norm[i]);
    }
    if (!any) return std::nullopt;
    return sup;
  }

  bool is_zero() const override { return f_.max_abs() == 0.0; }

 private:
  ScalarField f_;
  CurvatureField curv_;
};

namespace detail {

inline Verdict start_verdict(const std::string& name, const Sample& s, const InequalityParams& params,
                             const IsoperimetricConstants& iso, const Tolerance& tol) {
  params.validate();
  require(s.n() == params.n, ErrorCode::InvalidArgument, "sample dimension differs from n");
  require(iso.n == params.n, ErrorCode::InvalidArgument, "isoperimetric constants for another dimension");
  Verdict v;
  v.check = name;
  v.regime = exponent_regime(params);
  v.tol = tol.analytic + tol.slack.value_or(s.radial() ? kRadialSlack : kGridSlack);
  v.caveats.push_back(iso.caveat());
  if (!s.radial()) v.caveats.push_back("|Omega| taken as the measure of the support {|v| > 0}");
  if (params.r > 0.0 && params.r < 1.0) {
    v.indeterminate = true;
    v.caveats.push_back("r in (0,1): exploration mode, no theorem verdict");
  }
  return v;
}

inline void finish(Verdict& v, Convergence conv) {
  if (v.rhs > 0.0)
    v.ratio = v.lhs / v.rhs;
  else
    v.ratio = v.lhs == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  v.pass = v.lhs <= v.rhs * (1.0 + v.tol);
  if (conv == Convergence::Nonconvergent) {
    v.indeterminate = true;
    v.caveats.push_back("energy NONCONVERGENT under grid refinement");
  }
}

inline void require_energy(const Sample& s, double energy) {
  require(energy > 0.0 || s.is_zero(), ErrorCode::DegenerateQuotient, "zero energy with nonzero function");
}

}  // namespace detail

/// Part (a): ||v||_inf <= C1 |Omega|^{(p(1+r)-n)/(np)} energy.
inline Verdict morrey_check(const Sample& s, const InequalityParams& params, const IsoperimetricConstants& iso,
                            const Tolerance& tol = {}) {
  Verdict v = detail::start_verdict("morrey", s, params, iso, tol);
  require(detail::is_morrey_case(params), ErrorCode::WrongRegime, "morrey_check needs 1+r <= n < p(1+r) or p=1, r=n-1");
  v.constants = constants(params, iso);
  Convergence conv = Convergence::Unchecked;
  const double e = s.energy(params.p, params.r, &conv);
  detail::require_energy(s, e);
  const int n = params.n;
  v.lhs = s.lq_norm(Exponent::infinity());
  v.rhs = *v.constants.C1 * std::pow(s.omega(), (params.order() - n) / (n * params.p)) * e;
  detail::finish(v, conv);
  return v;
}

/// Part (b): ||v||_{p*_r} <= C2 energy. For p = 1 this is the direct
/// isoperimetric bound with C2 = A.
inline Verdict sobolev_check(const Sample& s, const InequalityParams& params, const IsoperimetricConstants& iso,
                             const Tolerance& tol = {}) {
  Verdict v = detail::start_verdict("sobolev", s, params, iso, tol);
  require(v.regime == ExponentRegime::Sobolev, ErrorCode::WrongRegime, "sobolev_check needs n > p(1+r)");
  v.constants = constants(params, iso);
  if (params.p == 1.0) v.caveats.push_back("p = 1: direct bound without the Hoelder step");
  Convergence conv = Convergence::Unchecked;
  const double e = s.energy(params.p, params.r, &conv);
  detail::require_energy(s, e);
  v.lhs = s.lq_norm(critical_exponent(params).value);
  v.rhs = *v.constants.C2 * e;
  detail::finish(v, conv);
  return v;
}

/// Part (b) below the critical exponent: ||v||_q <= C(q) |Omega|^{1/q - 1/p*} energy.
/// For p = 1 the bound is Hoelder applied to the critical one (C = C2).
inline Verdict subcritical_check(const Sample& s, const InequalityParams& params, const IsoperimetricConstants& iso,
                                 const Tolerance& tol = {}) {
  Verdict v = detail::start_verdict("subcritical", s, params, iso, tol);
  require(v.regime == ExponentRegime::Sobolev, ErrorCode::WrongRegime, "subcritical_check needs n > p(1+r)");
  require(params.q.has_value(), ErrorCode::MissingExponent, "subcritical_check needs q");
  const double p_star = critical_exponent(params).value.value();
  require(params.q->is_finite() && compare_exponents(params.q->value(), p_star) < 0, ErrorCode::WrongRegime,
          "subcritical_check needs q < p*_r");
  const double q = params.q->value();
  v.constants = constants(params, iso);
  double C = 0.0;
  if (v.constants.subcritical_C) {
    C = v.constants.subcritical_C(q);
  } else {
    C = *v.constants.C2;
    v.caveats.push_back("p = 1: Hoelder from the critical bound");
  }
  Convergence conv = Convergence::Unchecked;
  const double e = s.energy(params.p, params.r, &conv);
  detail::require_energy(s, e);
  v.lhs = s.lq_norm(*params.q);
  v.rhs = C * std::pow(s.omega(), 1.0 / q - 1.0 / p_star) * e;
  detail::finish(v, conv);
  return v;
}

struct TrudingerVerdict {
  Verdict verdict;  // lhs = exponential moment, rhs = C4 |Omega|
  double exp_moment = 0.0;
  double bound = 0.0;
};

/// Part (c): int_Omega exp((|v| / (C3 energy))^{p'}) dx <= C4 |Omega|.
inline TrudingerVerdict trudinger_check(const Sample& s, const InequalityParams& params,
                                        const IsoperimetricConstants& iso, double c3_margin = 2.0,
                                        const Tolerance& tol = {}) {
  TrudingerVerdict out;
  Verdict& v = out.verdict;
  v = detail::start_verdict("trudinger", s, params, iso, tol);
  require(v.regime == ExponentRegime::Critical && params.p > 1.0, ErrorCode::WrongRegime,
          "trudinger_check needs p > 1 and n = p(1+r)");
  v.constants = constants(params, iso, c3_margin);
  Convergence conv = Convergence::Unchecked;
  const double e = s.energy(params.p, params.r, &conv);
  detail::require_energy(s, e);
  const double omega = s.omega();
  out.exp_moment = s.is_zero() ? omega : s.exp_moment(*v.constants.C3 * e, *v.constants.p_dual);
  out.bound = *v.constants.C4 * omega;
  v.lhs = out.exp_moment;
  v.rhs = out.bound;
  detail::finish(v, conv);
  return out;
}

/// p -> infinity limit, 1 <= r <= n-1:
/// ||v||_inf <= (n/(1+r)) A1^{(1+r-n)/(n-1)} A2^r |Omega|^{(1+r)/n} sup |H|^r |grad v|.
inline Verdict pinf_check(const Sample& s, const InequalityParams& params, const IsoperimetricConstants& iso,
                          const Tolerance& tol = {}) {
  Verdict v = detail::start_verdict("pinf", s, params, iso, tol);
  const int n = params.n;
  const double r = params.r;
  require(r >= 1.0 && r <= n - 1.0, ErrorCode::WrongRegime, "pinf_check needs 1 <= r <= n-1");
  const auto sup = s.weighted_sup(r);
  require(sup.has_value(), ErrorCode::DegenerateQuotient, "empty gradient mask");
  v.constants.A = std::pow(iso.A1, -(n - (1.0 + r)) / (n - 1.0)) * std::pow(iso.A2, r);
  v.lhs = s.lq_norm(Exponent::infinity());
  const double K = n / (1.0 + r) * v.constants.A * std::pow(s.omega(), (1.0 + r) / n);
  v.rhs = std::isinf(*sup) ? *sup : K * *sup;
  if (std::isinf(*sup)) v.caveats.push_back("|H|^r |grad v| unbounded: vacuous pass");
  detail::finish(v, Convergence::Unchecked);
  return v;
}

/// The check that matches the regime of `params`: sobolev (or subcritical for
/// q < p*), morrey, or trudinger.
inline Verdict regime_check(const Sample& s, const InequalityParams& params, const IsoperimetricConstants& iso,
                            double c3_margin = 2.0, const Tolerance& tol = {}) {
  if (detail::is_morrey_case(params)) return morrey_check(s, params, iso, tol);
  switch (exponent_regime(params)) {
    case ExponentRegime::Sobolev:
      if (params.q && params.q->is_finite() &&
          compare_exponents(params.q->value(), critical_exponent(params).value.value()) < 0)
        return subcritical_check(s, params, iso, tol);
      return sobolev_check(s, params, iso, tol);
    case ExponentRegime::Critical:
      return trudinger_check(s, params, iso, c3_margin, tol).verdict;
    case ExponentRegime::Morrey:
      break;
  }
  throw Error(ErrorCode::WrongRegime, "no inequality for n < 1 + r outside the p = 1 endpoint");
}

struct NamedProfile {
  std::string name;
  std::function<double(double)> f;  // on [0, 1], f(1) = 0
};

/// Radial test functions on the unit ball, all decreasing with f(1) = 0.
inline const std::vector<NamedProfile>& builtin_profiles() {
  static const std::vector<NamedProfile> suite = {
      {"cone", [](double x) { return 1.0 - x; }},
      {"paraboloid", [](double x) { return 0.5 * (1.0 - x * x); }},
      {"bump2", [](double x) { return (1.0 - x * x) * (1.0 - x * x); }},
      {"cosine", [](double x) { return std::cos(0.5 * std::numbers::pi * x); }},
      {"gaussian", [](double x) { return std::exp(-4.0 * x * x) - std::exp(-4.0); }},
      {"smooth_bump", [](double x) { return x < 1.0 ? std::exp(1.0 - 1.0 / (1.0 - x * x)) : 0.0; }},
      {"cubic_cone", [](double x) { return (1.0 - x) * (1.0 - x) * (1.0 - x); }},
      {"hat", [](double x) { return std::min(1.0, 2.0 * (1.0 - x)); }},
  };
  return suite;
}

inline RadialProfile builtin_profile(int n, const NamedProfile& p, std::size_t nodes = 4097) {
  // exact zero at rho = 1 (cos(pi/2) is 6e-17)
  return RadialProfile::sample(n, 1.0, nodes, [&](double x) { return x < 1.0 ? p.f(x) : 0.0; });
}

}  // namespace curvlab
