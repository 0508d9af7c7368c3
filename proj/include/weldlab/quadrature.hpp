#pragma once

#include <Eigen/Dense>

namespace weldlab {

/// Gauss-Legendre nodes and weights on the unit interval [0, 1].
struct GaussLegendreRule {
  Eigen::VectorXd nodes;
  Eigen::VectorXd weights;

  int order() const { return static_cast<int>(nodes.size()); }
};

/// Builds the n-point rule by Newton iteration on P_n. Throws for n < 1.
GaussLegendreRule gauss_legendre(int n);

/// Integrates f over [a, b] with the rule mapped affinely.
template <typename F>
double integrate(const GaussLegendreRule& rule, F&& f, double a, double b) {
  const double len = b - a;
  double sum = 0.0;
  for (Eigen::Index k = 0; k < rule.nodes.size(); ++k) {
    sum += rule.weights[k] * f(a + len * rule.nodes[k]);
  }
  return sum * len;
}

/// Maximizes f on [a, b] by golden-section search; returns (argmax, max).
/// f is assumed unimodal on the bracket.
template <typename F>
std::pair<double, double> golden_section_max(F&& f, double a, double b,
                                             int iterations = 60) {
  constexpr double kInvPhi = 0.6180339887498949;
  double c = b - kInvPhi * (b - a);
  double d = a + kInvPhi * (b - a);
  double fc = f(c);
  double fd = f(d);
  for (int it = 0; it < iterations; ++it) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - kInvPhi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + kInvPhi * (b - a);
      fd = f(d);
    }
  }
  return fc > fd ? std::pair{c, fc} : std::pair{d, fd};
}

}  // namespace weldlab
