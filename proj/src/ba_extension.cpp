#include "weldlab/ba_extension.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace weldlab {

StripMap::StripMap(CircleHomeo lift, int quad_order)
    : lift_(std::move(lift)), rule_(gauss_legendre(quad_order)) {
  if (quad_order < 16) throw std::invalid_argument("ba_extend: quad_order must be >= 16");
  std::vector<double> cuts{0.0};
  for (double b : lift_.breakpoints(0.0, 1.0)) cuts.push_back(b);
  cuts.push_back(1.0);
  double mean = 0.0;
  for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
    mean += integrate(rule_, [&](double x) { return lift_.lift(x); }, cuts[k], cuts[k + 1]);
  }
  c0_ = mean - 0.5;
}

double StripMap::shifted_mean(double x, double y, double sign, double hx) const {
  // Breakpoints b of h on the segment x + sign t y, t in (0, 1).
  const double lo = sign > 0 ? x : x - y;
  const double hi = sign > 0 ? x + y : x;
  std::vector<double> cuts{0.0};
  for (double b : lift_.breakpoints(lo, hi)) cuts.push_back(std::abs(b - x) / y);
  cuts.push_back(1.0);
  std::sort(cuts.begin(), cuts.end());

  auto integrand = [&](double t) { return lift_.lift(x + sign * t * y) - hx; };
  double sum = 0.0;
  for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
    const double a = cuts[k];
    const double b = cuts[k + 1];
    if (!(b > a)) continue;
    if (lift_.piecewise_linear()) {
      sum += (b - a) * integrand(0.5 * (a + b));
    } else {
      sum += integrate(rule_, integrand, a, b);
    }
  }
  return sum;
}

std::complex<double> StripMap::integral_layer(std::complex<double> z) const {
  const double x = z.real();
  const double y = z.imag();
  const double hx = lift_.lift(x);
  const double plus = shifted_mean(x, y, +1.0, hx);
  const double minus = shifted_mean(x, y, -1.0, hx);
  return {hx + 0.5 * (plus + minus), plus - minus};
}

Eigen::Matrix2d StripMap::integral_layer_differential(std::complex<double> z) const {
  // Re H = A / 2y, Im H = B / y with A = int_{x-y}^{x+y} h and
  // B = int_x^{x+y} h - int_{x-y}^x h; everything relative to h(x).
  const double x = z.real();
  const double y = z.imag();
  const double hx = lift_.lift(x);
  const double jp = shifted_mean(x, y, +1.0, hx);
  const double jm = shifted_mean(x, y, -1.0, hx);
  const double dp = lift_.lift(x + y) - hx;
  const double dm = lift_.lift(x - y) - hx;
  Eigen::Matrix2d d;
  d(0, 0) = (dp - dm) / (2.0 * y);
  d(0, 1) = ((dp + dm) - (jp + jm)) / (2.0 * y);
  d(1, 0) = (dp + dm) / y;
  d(1, 1) = ((dp - dm) - (jp - jm)) / y;
  return d;
}

std::complex<double> StripMap::operator()(std::complex<double> z) const {
  const double y = z.imag();
  if (y < 0.0) throw std::invalid_argument("StripMap: Im z must be >= 0");
  if (y >= 2.0) return z;
  if (y >= 1.0) return z + (2.0 - y) * c0_;
  // H(z + k) = H(z) + k: evaluate on the period cell around the origin.
  const double shift = std::floor(z.real() + 0.5);
  const std::complex<double> reduced{z.real() - shift, y};
  if (y == 0.0) return {lift_.lift(reduced.real()) + shift, 0.0};
  return integral_layer(reduced) + shift;
}

StripMap ba_extend(const CircleHomeo& h, int quad_order) { return StripMap(h, quad_order); }

double default_fd_step(double y) { return std::min(1e-5 * std::max(1.0, y), y / 10.0); }

namespace {

template <typename F>
Eigen::Vector2d central4(F&& f, double s) {
  const Eigen::Vector2d fp1 = f(s), fm1 = f(-s), fp2 = f(2 * s), fm2 = f(-2 * s);
  return (8.0 * (fp1 - fm1) - (fp2 - fm2)) / (12.0 * s);
}

template <typename F>
Eigen::Vector2d backward3(F&& f, double s) {
  const Eigen::Vector2d f0 = f(0.0), fm1 = f(-s), fm2 = f(-2 * s);
  return (3.0 * f0 - 4.0 * fm1 + fm2) / (2.0 * s);
}

Eigen::Vector2d as_vec(std::complex<double> w) { return {w.real(), w.imag()}; }

}  // namespace

Eigen::Matrix2d ba_differential(const StripMap& map, std::complex<double> z,
                                std::optional<double> step) {
  const double y = z.imag();
  if (!(y >= kHalfPlaneFloor)) {
    throw std::invalid_argument("ba_differential: Im z below the half-plane floor");
  }
  if (y > 2.0) return Eigen::Matrix2d::Identity();
  if (y > 1.0) {
    Eigen::Matrix2d d;
    d << 1.0, -map.c0(), 0.0, 1.0;
    return d;
  }
  const double shift = std::floor(z.real() + 0.5);
  const std::complex<double> zc{z.real() - shift, y};
  if (!step) return map.integral_layer_differential(zc);
  const double s = *step;
  if (!(s > 0.0) || s > y / 10.0) {
    throw std::invalid_argument("step violates half-plane margin");
  }
  auto along_x = [&](double e) { return as_vec(map(zc + e)); };
  auto along_y = [&](double e) { return as_vec(map(zc + std::complex<double>(0.0, e))); };

  Eigen::Matrix2d d;
  d.col(0) = central4(along_x, s);
  // Stay inside the integral layer: H is only Lipschitz across y = 1.
  d.col(1) = (y + 2.0 * s < 1.0) ? central4(along_y, s) : backward3(along_y, s);
  return d;
}

double distortion_of(const Eigen::Matrix2d& d) {
  const double jac = d.determinant();
  if (!(jac > 0.0)) throw std::domain_error("orientation violation");
  // sigma_max = |f_z| + |f_zbar|, J = |f_z|^2 - |f_zbar|^2
  const double fz = 0.5 * std::hypot(d(0, 0) + d(1, 1), d(1, 0) - d(0, 1));
  const double fzbar = 0.5 * std::hypot(d(0, 0) - d(1, 1), d(1, 0) + d(0, 1));
  if (!(fz > fzbar)) throw std::domain_error("orientation violation");
  return (fz + fzbar) / (fz - fzbar);
}

double distortion_at(const StripMap& map, std::complex<double> z) {
  if (z.imag() >= 2.0) return 1.0;
  return distortion_of(ba_differential(map, z));
}

}  // namespace weldlab
