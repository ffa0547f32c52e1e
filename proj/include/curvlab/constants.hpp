#pragma once

#include <cmath>
#include <functional>
#include <optional>
#include <string>

#include "curvlab/error.hpp"
#include "curvlab/math.hpp"
#include "curvlab/quadrature.hpp"
#include "curvlab/radial.hpp"

namespace curvlab {

enum class A2Mode { SphereEquality, User };

inline std::string to_string(A2Mode m) { return m == A2Mode::SphereEquality ? "SPHERE_EQUALITY" : "USER"; }

/// Constants of the classical isoperimetric inequality A1 |D|^{(n-1)/n} <= |dD|
/// and of the mean-curvature inequality |S|^{(n-2)/(n-1)} <= A2 int_S |H|.
struct IsoperimetricConstants {
  int n = 2;
  double A1 = 0.0;
  double A2 = 0.0;
  A2Mode a2_mode = A2Mode::SphereEquality;

  /// A2 chosen so that spheres attain equality. Known admissible only for
  /// starshaped mean-convex hypersurfaces.
  static IsoperimetricConstants sphere_equality(int n) {
    require(n >= 2, ErrorCode::InvalidArgument, "n must be >= 2");
    return {n, n * std::pow(unit_ball_volume(n), 1.0 / n), std::pow(unit_sphere_area(n), -1.0 / (n - 1)),
            A2Mode::SphereEquality};
  }

  static IsoperimetricConstants user(int n, double a2) {
    require(a2 > 0.0, ErrorCode::InvalidArgument, "A2 must be positive");
    IsoperimetricConstants c = sphere_equality(n);
    c.A2 = a2;
    c.a2_mode = A2Mode::User;
    return c;
  }

  std::string caveat() const {
    if (a2_mode == A2Mode::SphereEquality)
      return "A2 set to the sphere-equality value; admissible only for starshaped mean-convex level sets";
    return "A2 supplied by the user; admissibility not checked";
  }
};

/// Admissible constants of the curvature-weighted Morrey / Sobolev / Trudinger
/// inequalities. Only the members of the active regime are populated.
struct ConstantBundle {
  ExponentRegime regime = ExponentRegime::Sobolev;
  std::optional<double> C1, C2, C3, C4;
  double A = 0.0;  // A1^{-(n-(1+r))/(n-1)} A2^r
  std::optional<double> p_dual;
  std::function<double(double)> subcritical_C;  // q -> C(q), q < p*_r; empty when p = 1
};

namespace detail {

inline bool is_morrey_case(const InequalityParams& pr) {
  const int n = pr.n;
  const double r = pr.r;
  const ExponentRegime regime = exponent_regime(pr);
  const bool order_ok = compare_exponents(1.0 + r, n) <= 0;
  if (regime == ExponentRegime::Morrey && order_ok && pr.p > 1.0) return true;
  return pr.p == 1.0 && compare_exponents(r, n - 1.0) == 0;
}

}  // namespace detail

/// Beta-type tau integral of the subcritical constant,
///   int_0^inf tau^{q/p' - 1} (tau + 1)^{-p*/p'} dtau,
/// finite iff q < p*.
inline double subcritical_tau_integral(double q, double p_dual, double p_star) {
  require(q < p_star, ErrorCode::WrongRegime, "tau integral diverges for q >= p*");
  const double a = q / p_dual;
  const double c = (p_star - q) / p_dual;
  // t = s / (1 - s) gives int_0^1 s^{a-1} (1-s)^{c-1} ds. The (1-s)^{c-1}
  // part is integrated exactly (1/c): for c -> 0 its mass sits at scales
  // e^{-1/c} that no quadrature reaches.
  const double rest = quad::adaptive_unit_interval([a, c](double s, double sc) {
    if (s <= 0.0 || sc <= 0.0) return 0.0;
    const double log_s = s > 0.5 ? std::log1p(-sc) : std::log(s);
    return std::expm1((a - 1.0) * log_s) * std::exp((c - 1.0) * std::log(sc));
  });
  return rest + 1.0 / c;
}

inline ConstantBundle constants(const InequalityParams& params, const IsoperimetricConstants& iso,
                                double c3_margin = 2.0) {
  params.validate();
  require(iso.n == params.n, ErrorCode::InvalidArgument, "isoperimetric constants for another dimension");
  const int n = params.n;
  const double p = params.p;
  const double r = params.r;
  const double A1 = iso.A1;
  const double A2 = iso.A2;

  ConstantBundle b;
  b.regime = exponent_regime(params);
  b.A = std::pow(A1, -(n - (1.0 + r)) / (n - 1.0)) * std::pow(A2, r);
  if (p > 1.0) b.p_dual = dual_exponent(p);

  if (detail::is_morrey_case(params)) {
    if (p == 1.0) {
      b.C1 = std::pow(A2, n - 1.0);
    } else {
      b.C1 = std::pow((p - 1.0) * n / (p * (1.0 + r) - n), 1.0 - 1.0 / p) *
             std::pow(A1, (1.0 + r - n) / (n - 1.0)) * std::pow(A2, r);
    }
    return b;
  }

  switch (b.regime) {
    case ExponentRegime::Sobolev: {
      b.C2 = (n - (1.0 + r)) / (n - p * (1.0 + r)) * p * std::pow(A1, -(n - (1.0 + r)) / (n - 1.0)) *
             std::pow(A2, r);
      if (p > 1.0) {
        const double p_dual = *b.p_dual;
        const double p_star = critical_exponent(params).value.value();
        const double A = b.A;
        b.subcritical_C = [p_dual, p_star, A](double q) {
          const double tau = subcritical_tau_integral(q, p_dual, p_star);
          return std::pow(q / p_dual, 1.0 / q) * std::pow(p_dual / p_star, -1.0 / p_dual) * A *
                 std::pow(tau, 1.0 / q);
        };
      }
      return b;
    }
    case ExponentRegime::Critical: {
      require(p > 1.0, ErrorCode::WrongRegime, "critical case with p = 1 needs r = n - 1");
      require(c3_margin > 1.0, ErrorCode::InvalidArgument, "c3_margin must exceed 1");
      const double p_dual = *b.p_dual;
      b.A = std::pow(A1, -n / ((n - 1.0) * p_dual)) * std::pow(A2, n / p - 1.0);
      b.C3 = c3_margin * b.A;
      const double c3p = std::pow(*b.C3, p_dual);
      b.C4 = c3p / (c3p - std::pow(b.A, p_dual));
      return b;
    }
    case ExponentRegime::Morrey:
      break;
  }
  throw Error(ErrorCode::WrongRegime, "no constant for n < 1 + r outside the p = 1 endpoint");
}

/// Admissible constant K in ||v||_{L^q(B_R)} <= K (int |H|^{pr} |grad v|^p)^{1/p}
/// for radial v supported in B_R, derived from the bundle (Hoelder for q < p*,
/// |Omega|^{1/q} ||v||_inf in the Morrey case, the Gamma moment bound in the
/// critical case). Empty when no admissible constant is available.
inline std::optional<double> admissible_lq_constant(const InequalityParams& params,
                                                    const IsoperimetricConstants& iso, double R) {
  require(params.q.has_value(), ErrorCode::MissingExponent, "admissible constant needs q");
  const Exponent q = *params.q;
  const int n = params.n;
  const double omega = ball_volume(n, R);
  ConstantBundle b;
  try {
    b = constants(params, iso);
  } catch (const Error&) {
    return std::nullopt;
  }
  if (b.C1) {
    return std::pow(omega, q.reciprocal()) * *b.C1 *
           std::pow(omega, (params.p * (1.0 + params.r) - n) / (n * params.p));
  }
  if (b.C2) {
    if (q.is_infinite()) return std::nullopt;
    const double p_star = critical_exponent(params).value.value();
    if (compare_exponents(q.value(), p_star) > 0) return std::nullopt;
    return *b.C2 * std::pow(omega, q.reciprocal() - 1.0 / p_star);
  }
  if (b.C3) {
    if (q.is_infinite()) return std::nullopt;
    const double p_dual = *b.p_dual;
    return std::pow(omega, q.reciprocal()) * b.A * std::pow(std::tgamma(q.value() / p_dual + 1.0), q.reciprocal());
  }
  return std::nullopt;
}

}  // namespace curvlab
