// lambda* of -Lap u = lambda e^u on the unit ball for n = 2..10: folds up
// to n = 9, the plateau at 2(n-2) from n = 10 on.

#include <cstdio>

#include "curvlab/gelfand.hpp"

int main() {
  using namespace curvlab;
  std::printf("%3s %14s %10s %8s %12s\n", "n", "lambda*", "+-", "regime", "u*(0)");
  for (int n = 2; n <= 10; ++n) {
    const auto e = extremal_estimate(n, Nonlinearity::exp());
    std::printf("%3d %14.9f %10.1e %8s %12.6g\n", n, e.lambda_star, e.uncertainty, to_string(e.regime).c_str(),
                e.norms.sup);
  }
}
