#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <optional>
#include <string>

#include "curvlab/error.hpp"

namespace curvlab {

/// Exponent on the extended half-line [1, inf]. Infinity is a distinct state,
/// never a float sentinel, so regime comparisons stay exact.
class Exponent {
 public:
  constexpr Exponent() = default;

  static constexpr Exponent finite(double value) { return Exponent(value, false); }
  static constexpr Exponent infinity() { return Exponent(0.0, true); }

  constexpr bool is_infinite() const { return infinite_; }
  constexpr bool is_finite() const { return !infinite_; }

  /// Finite value; throws for infinity.
  double value() const {
    require(!infinite_, ErrorCode::InvalidArgument, "exponent is infinite");
    return value_;
  }

  /// 1/q with 1/inf = 0.
  constexpr double reciprocal() const { return infinite_ ? 0.0 : 1.0 / value_; }

  std::string str() const {
    if (infinite_) return "inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", value_);
    return buf;
  }

  friend constexpr bool operator==(const Exponent& a, const Exponent& b) {
    return a.infinite_ == b.infinite_ && (a.infinite_ || a.value_ == b.value_);
  }

 private:
  constexpr Exponent(double v, bool inf) : value_(v), infinite_(inf) {}
  double value_ = 0.0;
  bool infinite_ = false;
};

inline Exponent parse_exponent(const std::string& text) {
  if (text == "inf" || text == "infinity" || text == "Inf") return Exponent::infinity();
  std::size_t pos = 0;
  double v = std::stod(text, &pos);
  require(pos == text.size(), ErrorCode::MalformedInput, "bad exponent '" + text + "'");
  return Exponent::finite(v);
}

/// Relative tolerance used when comparing exponents built from decimal input.
inline constexpr double kExponentTol = 1e-12;

/// -1, 0, +1 for a < b, a ~ b, a > b up to kExponentTol relative.
inline int compare_exponents(double a, double b) {
  const double scale = std::max({1.0, std::fabs(a), std::fabs(b)});
  if (std::fabs(a - b) <= kExponentTol * scale) return 0;
  return a < b ? -1 : 1;
}

/// |B_1| in R^n.
inline double unit_ball_volume(int n) {
  return std::pow(std::numbers::pi, 0.5 * n) / std::tgamma(0.5 * n + 1.0);
}

/// |S^{n-1}| = n |B_1|.
inline double unit_sphere_area(int n) { return n * unit_ball_volume(n); }

inline double ball_volume(int n, double radius) {
  return unit_ball_volume(n) * std::pow(radius, n);
}

inline double dual_exponent(double p) { return p / (p - 1.0); }

}  // namespace curvlab
