#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "curvlab/constants.hpp"
#include "curvlab/radial.hpp"

namespace curvlab {

/// Test-function families for the sharpness scan, all supported in [0, 1].
///  PEAK: (1 - k rho)_+, concentration by dilation.
///  PLATEAU: min(1, log(1/rho) / L), a plateau of height 1 on [0, e^{-L}].
///  MOLLIFIED_POWER: min(rho^{-a}, k^a) - 1 with a the critical decay rate.
enum class Family { Peak, Plateau, MollifiedPower };

inline std::string to_string(Family f) {
  switch (f) {
    case Family::Peak: return "PEAK";
    case Family::Plateau: return "PLATEAU";
    case Family::MollifiedPower: return "MOLLIFIED_POWER";
  }
  return "?";
}

inline Family parse_family(const std::string& id) {
  if (id == "PEAK" || id == "peak") return Family::Peak;
  if (id == "PLATEAU" || id == "plateau") return Family::Plateau;
  if (id == "MOLLIFIED_POWER" || id == "mollified_power" || id == "power") return Family::MollifiedPower;
  throw Error(ErrorCode::UnknownFamily, "unknown family '" + id + "'");
}

struct ScanResult {
  Family family = Family::Peak;
  std::vector<double> scales;  // concentration parameter of each member
  std::vector<double> quotients;
  double growth = 1.0;  // last / first
  bool tail_increasing = false;  // strictly increasing over the last quarter
  std::optional<double> bound;  // admissible constant for the radial quotient
  bool within_bound = false;
  Validity validity = Validity::Holds;
};

struct ScanOptions {
  std::size_t nodes = 2049;  // nodes on the active part of each member
  double peak_base = 2.0;  // PEAK / MOLLIFIED_POWER use scale base^(k-1)
  double plateau_min = 0.01, plateau_max = 690.0;  // PLATEAU log-widths L, geometric
};

namespace detail {

inline std::vector<double> uniform_then_geometric(double split, std::size_t inner, std::size_t outer) {
  std::vector<double> rho;
  rho.reserve(inner + outer);
  for (std::size_t i = 0; i < inner; ++i) rho.push_back(split * static_cast<double>(i) / (inner - 1));
  if (split < 1.0) {
    const double ratio = std::pow(1.0 / split, 1.0 / static_cast<double>(outer));
    double x = split;
    for (std::size_t i = 1; i <= outer; ++i) {
      x = (i == outer) ? 1.0 : x * ratio;
      rho.push_back(x);
    }
  }
  return rho;
}

inline double mollified_power_rate(const InequalityParams& params) {
  const double rate = (params.n - params.order()) / params.p;
  return rate > 0.0 ? rate : 0.25;
}

}  // namespace detail

/// Member k (1-based) of a family for the given exponents.
inline RadialProfile family_member(Family family, const InequalityParams& params, std::size_t k,
                                   std::size_t k_max, const ScanOptions& opt = {}) {
  const int n = params.n;
  const std::size_t N = opt.nodes;
  switch (family) {
    case Family::Peak: {
      const double kappa = std::pow(opt.peak_base, static_cast<double>(k - 1));
      auto rho = detail::uniform_then_geometric(1.0 / kappa, N, 32);
      return RadialProfile::sample_on(n, std::move(rho), [kappa](double x) { return std::max(0.0, 1.0 - kappa * x); });
    }
    case Family::Plateau: {
      const double t = k_max > 1 ? static_cast<double>(k - 1) / static_cast<double>(k_max - 1) : 0.0;
      const double L = opt.plateau_min * std::pow(opt.plateau_max / opt.plateau_min, t);
      const double split = std::exp(-L);
      // log-uniform nodes on [e^{-L}, 1], where v is linear in log rho
      const std::size_t M = std::max(N, static_cast<std::size_t>(std::ceil(64.0 * L)) + 1);
      std::vector<double> rho;
      rho.reserve(M + 8);
      for (int i = 0; i < 8; ++i) rho.push_back(split * i / 8.0);
      for (std::size_t i = 0; i < M; ++i) rho.push_back(std::exp(-L * (1.0 - static_cast<double>(i) / (M - 1))));
      rho.back() = 1.0;
      return RadialProfile::sample_on(n, std::move(rho), [L](double x) {
        if (x <= 0.0) return 1.0;
        return std::clamp(-std::log(x) / L, 0.0, 1.0);
      });
    }
    case Family::MollifiedPower: {
      const double kappa = std::pow(opt.peak_base, static_cast<double>(k));
      const double a = detail::mollified_power_rate(params);
      const double split = 1.0 / kappa;
      std::vector<double> rho;
      if (split < 1.0) {
        for (int i = 0; i < 16; ++i) rho.push_back(split * i / 16.0);
        const double L = std::log(kappa);
        for (std::size_t i = 0; i < N; ++i) rho.push_back(split * std::exp(L * static_cast<double>(i) / (N - 1)));
        rho.back() = 1.0;
      } else {
        for (std::size_t i = 0; i < N; ++i) rho.push_back(static_cast<double>(i) / (N - 1));
      }
      const double cap = std::pow(kappa, a);
      return RadialProfile::sample_on(n, std::move(rho), [a, cap](double x) {
        if (x <= 0.0) return cap - 1.0;
        return std::max(0.0, std::min(std::pow(x, -a), cap) - 1.0);
      });
    }
  }
  throw Error(ErrorCode::UnknownFamily, "unknown family");
}

/// Quotients of the radial inequality along a family. FAILS regimes show
/// unbounded growth along a suitable family; HOLDS regimes stay below the
/// admissible constant.
inline ScanResult sharpness_scan(Family family, const InequalityParams& params, std::size_t k_max,
                                 const ScanOptions& opt = {}) {
  require(k_max >= 4, ErrorCode::InvalidArgument, "k_max must be >= 4");
  require(params.q.has_value(), ErrorCode::MissingExponent, "sharpness_scan needs q");
  ScanResult out;
  out.family = family;
  out.validity = regime_classify(params);
  for (std::size_t k = 1; k <= k_max; ++k) {
    const RadialProfile member = family_member(family, params, k, k_max, opt);
    out.quotients.push_back(sobolev_quotient(member, params));
    if (family == Family::Plateau) {
      const double t = static_cast<double>(k - 1) / static_cast<double>(k_max - 1);
      out.scales.push_back(opt.plateau_min * std::pow(opt.plateau_max / opt.plateau_min, t));
    } else {
      const double shift = family == Family::MollifiedPower ? 0.0 : 1.0;
      out.scales.push_back(std::pow(opt.peak_base, static_cast<double>(k) - shift));
    }
  }
  out.growth = out.quotients.back() / out.quotients.front();
  const std::size_t tail_start = k_max - std::max<std::size_t>(2, k_max / 4);
  out.tail_increasing = true;
  for (std::size_t i = tail_start + 1; i < k_max; ++i)
    if (!(out.quotients[i] > out.quotients[i - 1])) out.tail_increasing = false;

  if (!params.exploration || params.r == 0.0 || params.r >= 1.0) {
    const auto iso = IsoperimetricConstants::sphere_equality(params.n);
    if (auto K = admissible_lq_constant(params, iso, 1.0)) {
      // convert from full measure to the radial measure rho^{n-1} drho
      const double area = unit_sphere_area(params.n);
      out.bound = *K * std::pow(area, 1.0 / params.p - params.q->reciprocal());
    }
  }
  const double peak = *std::max_element(out.quotients.begin(), out.quotients.end());
  out.within_bound = out.bound ? peak <= *out.bound * 1.01 : false;
  return out;
}

}  // namespace curvlab
