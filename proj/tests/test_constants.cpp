#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "curvlab/constants.hpp"

using namespace curvlab;

namespace {

InequalityParams make(int n, double p, double r) {
  InequalityParams ip;
  ip.n = n;
  ip.p = p;
  ip.r = r;
  return ip;
}

}  // namespace

TEST(Isoperimetric, SphereEqualityValues) {
  const double pi = std::numbers::pi;
  auto iso2 = IsoperimetricConstants::sphere_equality(2);
  EXPECT_NEAR(iso2.A1, 2.0 * std::sqrt(pi), 1e-14);
  EXPECT_NEAR(iso2.A2, 1.0 / (2.0 * pi), 1e-14);
  auto iso3 = IsoperimetricConstants::sphere_equality(3);
  EXPECT_NEAR(iso3.A2, 1.0 / std::sqrt(4.0 * pi), 1e-14);
  // spheres attain A1 |B|^{(n-1)/n} = |dB|
  for (int n = 2; n <= 10; ++n) {
    auto iso = IsoperimetricConstants::sphere_equality(n);
    EXPECT_NEAR(iso.A1 * std::pow(unit_ball_volume(n), (n - 1.0) / n), unit_sphere_area(n), 1e-12);
  }
}

TEST(Constants, SobolevC2) {
  const double pi = std::numbers::pi;
  auto iso = IsoperimetricConstants::sphere_equality(5);
  const auto b = constants(make(5, 2, 1), iso);
  ASSERT_TRUE(b.C2);
  const double ball5 = 8.0 * pi * pi / 15.0;
  EXPECT_NEAR(unit_ball_volume(5), ball5, 1e-13);
  const double expected = 6.0 * std::pow(5.0 * std::pow(ball5, 0.2), -0.75) * iso.A2;
  EXPECT_NEAR(*b.C2, expected, 1e-12);
  EXPECT_FALSE(b.C1);
}

TEST(Constants, MorreyEndpointPOne) {
  for (int n = 2; n <= 6; ++n) {
    auto iso = IsoperimetricConstants::sphere_equality(n);
    const auto b = constants(make(n, 1, n - 1.0), iso);
    ASSERT_TRUE(b.C1);
    EXPECT_NEAR(*b.C1, std::pow(iso.A2, n - 1.0), 1e-14);
  }
}

TEST(Constants, TrudingerBundle) {
  auto iso = IsoperimetricConstants::sphere_equality(4);
  const auto b = constants(make(4, 2, 1), iso, 2.0);
  // A = A1^{-n/((n-1)p')} A2^{n/p-1} = A1^{-2/3} A2
  EXPECT_NEAR(b.A, std::pow(iso.A1, -2.0 / 3.0) * iso.A2, 1e-14);
  EXPECT_NEAR(*b.C3, 2.0 * b.A, 1e-14);
  EXPECT_NEAR(*b.C4, 4.0 / 3.0, 1e-12);
  EXPECT_GT(*b.C3, b.A);
  EXPECT_GT(*b.C4, 1.0);
}

TEST(Constants, TrudingerBoundDecreasesWithMargin) {
  auto iso = IsoperimetricConstants::sphere_equality(4);
  double prev = std::numeric_limits<double>::infinity();
  for (double m : {1.01, 1.5, 2.0, 4.0}) {
    const double c4 = *constants(make(4, 2, 1), iso, m).C4;
    EXPECT_LT(c4, prev);
    prev = c4;
  }
}

TEST(Constants, MorreyC1Formula) {
  auto iso = IsoperimetricConstants::sphere_equality(3);
  const auto b = constants(make(3, 2, 1), iso);
  ASSERT_TRUE(b.C1);
  // ((p-1)n/(p(1+r)-n))^{1-1/p} A1^{(1+r-n)/(n-1)} A2^r = 3^{1/2} A1^{-1/2} A2
  EXPECT_NEAR(*b.C1, std::sqrt(3.0) * std::pow(iso.A1, -0.5) * iso.A2, 1e-14);
}

TEST(Constants, WrongRegime) {
  auto iso = IsoperimetricConstants::sphere_equality(2);
  try {
    constants(make(2, 1, 2), iso);  // n < 1 + r, p = 1
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::WrongRegime);
  }
}

TEST(Constants, SubcriticalTauIntegralMatchesBeta) {
  // int_0^inf tau^{a-1} (1+tau)^{-(a+b)} = B(a, b) with a = q/p', b = (p*-q)/p'
  const double p_dual = 2.0, p_star = 10.0;
  for (double q : {1.0, 2.5, 5.0, 9.0, 9.9}) {
    const double a = q / p_dual, b = (p_star - q) / p_dual;
    EXPECT_NEAR(subcritical_tau_integral(q, p_dual, p_star) / std::beta(a, b), 1.0, 1e-8) << q;
  }
  EXPECT_THROW(subcritical_tau_integral(10.0, p_dual, p_star), Error);
}

TEST(Constants, SubcriticalBlowsUpNearCritical) {
  auto iso = IsoperimetricConstants::sphere_equality(5);
  const auto b = constants(make(5, 2, 1), iso);
  ASSERT_TRUE(b.subcritical_C);
  const double c5 = b.subcritical_C(5.0);
  const double c99 = b.subcritical_C(9.99);
  EXPECT_TRUE(std::isfinite(c5));
  EXPECT_GT(c99, c5);
  EXPECT_GT(b.subcritical_C(9.9999), c99);
}

TEST(Constants, C2AlgebraicIdentity) {
  // C2 = gamma * A with gamma = p*/1*
  auto iso = IsoperimetricConstants::sphere_equality(7);
  for (double r : {0.0, 1.0, 2.0}) {
    const auto ip = make(7, 1.5, r);
    const auto b = constants(ip, iso);
    const double p_star = critical_exponent(ip).value.value();
    const double one_star = 7.0 / (7.0 - (1.0 + r));
    EXPECT_NEAR(*b.C2, p_star / one_star * b.A, 1e-12);
  }
}
