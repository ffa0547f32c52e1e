// Smoothed unit square: the curvature energy vanishes like eps0^{1/2} for
// p = 1, r = 1/2 while ||v||_4 -> 1, and stays put at r = 1.

#include <cstdio>

#include "curvlab/counterexample.hpp"

int main() {
  using namespace curvlab;
  const std::vector<double> eps{0.2, 0.1, 0.05, 0.025, 0.0125};
  for (double r : {0.5, 1.0}) {
    const auto rep = counterexample_report(1.0, r, eps);
    std::printf("p = 1, r = %g: %s, slope %.4f (theory %.4f)\n", r, to_string(rep.verdict).c_str(), rep.slope,
                rep.theory_slope);
    for (const auto& row : rep.rows)
      std::printf("  eps0 %-7g energy %.6f  ||v||_q %.6f  ratio %.6f\n", row.eps0, row.energy, row.lq_norm, row.ratio);
  }
}
