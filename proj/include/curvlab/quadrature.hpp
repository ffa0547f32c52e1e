#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <span>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include "curvlab/error.hpp"

namespace curvlab::quad {

// Panels whose two cells differ in length by more than this factor are
// integrated with the trapezoid rule (Simpson weights turn negative beyond 2).
inline constexpr double kMaxPanelRatio = 2.0;

/// Composite Simpson on arbitrary increasing nodes. Each pair of cells is a
/// quadratic panel; an odd trailing cell uses the quadratic through the last
/// three nodes. Strongly irregular panels fall back to trapezoid.
inline double simpson(std::span<const double> x, std::span<const double> y) {
  const std::size_t n = x.size();
  require(n == y.size(), ErrorCode::InvalidArgument, "simpson: size mismatch");
  if (n < 2) return 0.0;
  if (n == 2) return 0.5 * (x[1] - x[0]) * (y[0] + y[1]);

  double sum = 0.0;
  std::size_t i = 0;
  for (; i + 2 < n; i += 2) {
    const double a = x[i + 1] - x[i];
    const double b = x[i + 2] - x[i + 1];
    const double ratio = b / a;
    if (ratio > kMaxPanelRatio || ratio < 1.0 / kMaxPanelRatio) {
      sum += 0.5 * a * (y[i] + y[i + 1]) + 0.5 * b * (y[i + 1] + y[i + 2]);
      continue;
    }
    const double w = (a + b) / 6.0;
    sum += w * ((2.0 - b / a) * y[i] + (a + b) * (a + b) / (a * b) * y[i + 1] +
                (2.0 - a / b) * y[i + 2]);
  }
  if (i + 1 < n) {
    // one cell [x[i], x[i+1]] left over
    const double a = x[i] - x[i - 1];
    const double b = x[i + 1] - x[i];
    const double ratio = b / a;
    if (ratio > kMaxPanelRatio || ratio < 1.0 / kMaxPanelRatio) {
      sum += 0.5 * b * (y[i] + y[i + 1]);
    } else {
      const double w0 = -b * b * b / (6.0 * a * (a + b));
      const double w1 = b * b / (6.0 * a) + 0.5 * b;
      const double w2 = b * (2.0 * b + 3.0 * a) / (6.0 * (a + b));
      sum += w0 * y[i - 1] + w1 * y[i] + w2 * y[i + 1];
    }
  }
  return sum;
}

inline double trapezoid(std::span<const double> x, std::span<const double> y) {
  require(x.size() == y.size(), ErrorCode::InvalidArgument, "trapezoid: size mismatch");
  double sum = 0.0;
  for (std::size_t i = 1; i < x.size(); ++i) sum += 0.5 * (x[i] - x[i - 1]) * (y[i] + y[i - 1]);
  return sum;
}

/// Adaptive Gauss-Kronrod on a finite interval.
inline double adaptive(const std::function<double(double)>& f, double a, double b,
                       double rel_tol = 1e-10) {
  double err = 0.0;
  return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, a, b, 15, rel_tol, &err);
}

/// Adaptive double-exponential quadrature for integrable endpoint singularities.
inline double adaptive_singular(const std::function<double(double)>& f, double a, double b,
                                double rel_tol = 1e-10) {
  boost::math::quadrature::tanh_sinh<double> integrator;
  return integrator.integrate(f, a, b, rel_tol);
}

/// Adaptive quadrature on [0, 1] of f(s, 1 - s), with both arguments accurate
/// near their zero so endpoint singularities of either kind resolve.
inline double adaptive_unit_interval(const std::function<double(double, double)>& f, double rel_tol = 1e-10) {
  boost::math::quadrature::tanh_sinh<double> integrator;
  // boost passes xc = a - x near a (negative) and b - x near b (positive)
  return integrator.integrate(
      [&f](double x, double xc) {
        const double s = xc < 0.0 ? -xc : x;
        const double sc = xc > 0.0 ? xc : 1.0 - x;
        return f(s, sc);
      },
      0.0, 1.0, rel_tol);
}

/// Adaptive quadrature on [0, inf). The integrand may be singular at 0.
inline double adaptive_half_line(const std::function<double(double)>& f, double rel_tol = 1e-10) {
  // split at 1: tanh-sinh handles the singular end, exp-sinh the tail
  boost::math::quadrature::tanh_sinh<double> head;
  boost::math::quadrature::exp_sinh<double> tail;
  return head.integrate(f, 0.0, 1.0, rel_tol) + tail.integrate(f, 1.0, std::numeric_limits<double>::infinity(), rel_tol);
}

}  // namespace curvlab::quad
