#pragma once

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "curvlab/error.hpp"
#include "curvlab/gelfand/expression.hpp"

namespace curvlab {

enum class NonlinearityId { Exp, Power, User };

/// f in -Delta u = lambda f(u) with f' and F(t) = int_0^t f.
struct Nonlinearity {
  NonlinearityId id = NonlinearityId::Exp;
  std::string name;
  double exponent = 0.0;  // POWER only
  std::function<double(double)> f, fprime, F;
  std::vector<std::string> warnings;

  static Nonlinearity exp() {
    Nonlinearity nl;
    nl.id = NonlinearityId::Exp;
    nl.name = "exp(u)";
    nl.f = [](double u) { return std::exp(u); };
    nl.fprime = nl.f;
    nl.F = [](double u) { return std::expm1(u); };
    return nl;
  }

  /// (1 + u)^m
  static Nonlinearity power(double m) {
    require(m > 1.0, ErrorCode::InvalidArgument, "POWER needs exponent > 1");
    Nonlinearity nl;
    nl.id = NonlinearityId::Power;
    nl.exponent = m;
    nl.name = "pow(1+u," + trim(m) + ")";
    nl.f = [m](double u) { return std::pow(1.0 + u, m); };
    nl.fprime = [m](double u) { return m * std::pow(1.0 + u, m - 1.0); };
    nl.F = [m](double u) { return (std::pow(1.0 + u, m + 1.0) - 1.0) / (m + 1.0); };
    nl.validate();
    return nl;
  }

  static Nonlinearity user(const std::string& text) {
    const Expression e = Expression::parse(text);
    Nonlinearity nl;
    nl.id = NonlinearityId::User;
    nl.name = text;
    nl.f = [e](double u) { return e(u); };
    nl.fprime = [e](double u) { return e.derivative(u); };
    nl.F = [e](double t) {
      if (t == 0.0) return 0.0;
      return boost::math::quadrature::gauss_kronrod<double, 31>::integrate([&e](double x) { return e(x); }, 0.0, t,
                                                                           15, 1e-13);
    };
    nl.validate();
    return nl;
  }

  /// "exp", "pow(1+u,3)" / "power:3", or any expression in u.
  static Nonlinearity parse(const std::string& spec) {
    if (spec == "exp" || spec == "EXP" || spec == "exp(u)") return exp();
    for (const std::string prefix : {"power:", "POWER:"})
      if (spec.rfind(prefix, 0) == 0) return power(std::stod(spec.substr(prefix.size())));
    const auto compact = [](std::string s) {
      s.erase(std::remove_if(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c); }), s.end());
      return s;
    };
    const std::string c = compact(spec);
    if (c.rfind("pow(1+u,", 0) == 0 && c.back() == ')') {
      try {
        std::size_t used = 0;
        const std::string arg = c.substr(8, c.size() - 9);
        const double m = std::stod(arg, &used);
        if (used == arg.size()) return power(m);
      } catch (const std::exception&) {
      }
    }
    return user(spec);
  }

  /// f increasing and positive on a probe grid of [0, probe_max]; warns when
  /// f(t)/t is not increasing beyond t = 1.
  void validate(double probe_max = 20.0) {
    require(f(0.0) > 0.0 && std::isfinite(f(0.0)), ErrorCode::InvalidArgument, "f(0) must be positive");
    double prev = f(0.0), prev_ratio = 0.0;
    bool superlinear = true;
    for (int i = 1; i <= 200; ++i) {
      const double t = probe_max * i / 200.0;
      const double v = f(t);
      require(std::isfinite(v) && v > prev, ErrorCode::InvalidArgument, "f must be increasing and positive");
      prev = v;
      if (t > 1.0) {
        if (v / t <= prev_ratio) superlinear = false;
        prev_ratio = v / t;
      }
    }
    if (!superlinear) warnings.push_back("f(t)/t not increasing on the probe grid");
  }

 private:
  static std::string trim(double m) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", m);
    return buf;
  }
};

}  // namespace curvlab
