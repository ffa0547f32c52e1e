// Verdict ratios lhs/rhs of the built-in radial profiles for a few (n, p, r).
// Ratios stay below 1; the cone in n = 3, p = 2, r = 1 sits at equality.

#include <cstdio>

#include "curvlab/checks.hpp"

int main() {
  using namespace curvlab;
  const double cases[][3] = {{3, 2, 1}, {4, 2, 1}, {5, 2, 1}, {7, 3, 1}, {6, 1, 2}};
  std::printf("%-14s", "profile");
  for (const auto& c : cases) {
    char head[32];
    std::snprintf(head, sizeof head, "(%g,%g,%g)", c[0], c[1], c[2]);
    std::printf("  %9s ", head);
  }
  std::printf("\n");
  for (const auto& prof : builtin_profiles()) {
    std::printf("%-14s", prof.name.c_str());
    for (const auto& c : cases) {
      InequalityParams ip;
      ip.n = static_cast<int>(c[0]);
      ip.p = c[1];
      ip.r = c[2];
      const auto iso = IsoperimetricConstants::sphere_equality(ip.n);
      const auto v = regime_check(RadialSample(builtin_profile(ip.n, prof)), ip, iso);
      std::printf("  %9.4f%s", v.ratio, v.counts_as_pass() ? " " : "!");
    }
    std::printf("\n");
  }
}
