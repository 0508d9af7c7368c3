#pragma once

#include <complex>
#include <optional>

#include <Eigen/Dense>

#include "weldlab/circle_homeo.hpp"
#include "weldlab/quadrature.hpp"

namespace weldlab {

/// Beurling-Ahlfors extension H of a lift h to the closed upper half-plane:
///
///   0 < y < 1 :  H = 1/2 int_0^1 (h(x+ty) + h(x-ty)) dt
///                    + i int_0^1 (h(x+ty) - h(x-ty)) dt
///   1 <= y <= 2: H = z + (2 - y) C0,   C0 = int_0^1 h - 1/2
///   y >= 2     : H = z
///
/// and H = h on the real axis. The integrals are split at the breakpoints
/// of h and each piece uses the Gauss-Legendre rule of the given order.
class StripMap {
 public:
  explicit StripMap(CircleHomeo lift, int quad_order = 64);

  std::complex<double> operator()(std::complex<double> z) const;

  /// Evaluates the integral layer at z without reducing Re z modulo 1.
  std::complex<double> integral_layer(std::complex<double> z) const;

  /// Differential of the integral layer at z (0 < Im z < 1) by the Leibniz
  /// rule applied to the two integrals; uses the same quadrature values as
  /// the evaluation of H.
  Eigen::Matrix2d integral_layer_differential(std::complex<double> z) const;

  double c0() const { return c0_; }
  const CircleHomeo& lift() const { return lift_; }
  int quad_order() const { return rule_.order(); }

 private:
  // int_0^1 (h(x + sign t y) - h(x)) dt
  double shifted_mean(double x, double y, double sign, double hx) const;

  CircleHomeo lift_;
  GaussLegendreRule rule_;
  double c0_ = 0.0;
};

StripMap ba_extend(const CircleHomeo& h, int quad_order = 64);

/// Smallest Im z at which differentials and distortion are evaluated.
inline constexpr double kHalfPlaneFloor = 1e-6;

/// Default finite-difference step: 1e-5 max(1, y), capped at y/10.
double default_fd_step(double y);

/// DH at z as [[dRe/dx, dRe/dy], [dIm/dx, dIm/dy]]. Exact in the affine
/// layers y > 1. In the integral layer a given `step` selects four-point
/// central differences (step <= y/10 required); without one the Leibniz
/// differential is returned.
Eigen::Matrix2d ba_differential(const StripMap& map, std::complex<double> z,
                                std::optional<double> step = std::nullopt);

/// ||D||^2 / det D with ||D|| the largest singular value.
/// Throws std::domain_error("orientation violation") when det D <= 0.
double distortion_of(const Eigen::Matrix2d& d);

double distortion_at(const StripMap& map, std::complex<double> z);

}  // namespace weldlab
