#include "weldlab/quadrature.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace weldlab {

GaussLegendreRule gauss_legendre(int n) {
  if (n < 1) throw std::invalid_argument("gauss_legendre: order must be >= 1");
  Eigen::VectorXd x(n);
  Eigen::VectorXd w(n);
  const int half = (n + 1) / 2;
  for (int i = 0; i < half; ++i) {
    double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p1 = 1.0;
      double p2 = 0.0;
      for (int j = 1; j <= n; ++j) {
        const double p3 = p2;
        p2 = p1;
        p1 = ((2.0 * j - 1.0) * z * p2 - (j - 1.0) * p3) / j;
      }
      dp = n * (z * p1 - p2) / (z * z - 1.0);
      const double dz = p1 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    // Refresh the derivative at the converged root for the weight.
    double p1 = 1.0;
    double p2 = 0.0;
    for (int j = 1; j <= n; ++j) {
      const double p3 = p2;
      p2 = p1;
      p1 = ((2.0 * j - 1.0) * z * p2 - (j - 1.0) * p3) / j;
    }
    dp = n * (z * p1 - p2) / (z * z - 1.0);
    const double wi = 2.0 / ((1.0 - z * z) * dp * dp);
    // Map [-1, 1] -> [0, 1], ascending order.
    x[i] = 0.5 * (1.0 - z);
    x[n - 1 - i] = 0.5 * (1.0 + z);
    w[i] = 0.5 * wi;
    w[n - 1 - i] = 0.5 * wi;
  }
  return {std::move(x), std::move(w)};
}

}  // namespace weldlab
