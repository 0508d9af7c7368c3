#include "weldlab/welding_extension.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace weldlab {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kIdentityLog = 4.0 * std::numbers::pi;

// Exterior branch: |z| >= 1.
std::complex<double> exterior(const StripMap& strip, std::complex<double> z) {
  const double r = std::abs(z);
  const double log_r = std::log(r);
  if (log_r >= kIdentityLog) return z;
  const std::complex<double> w = PlaneMapField::strip_point(z);
  const std::complex<double> hw = strip(w);
  return std::polar(std::exp(kTwoPi * hw.imag()), kTwoPi * hw.real());
}

std::complex<double> invert(std::complex<double> z) { return z / std::norm(z); }

}  // namespace

double PlaneMapField::delta() { return std::exp(-kIdentityLog); }

PlaneMapField::PlaneMapField(StripMap strip) : strip_(std::move(strip)) {}

std::complex<double> PlaneMapField::strip_point(std::complex<double> z) {
  double theta = std::arg(z);
  if (theta < 0.0) theta += kTwoPi;
  if (theta >= kTwoPi) theta = 0.0;
  return {theta / kTwoPi, std::abs(std::log(std::abs(z))) / kTwoPi};
}

std::complex<double> PlaneMapField::operator()(std::complex<double> z) const {
  if (z == 0.0) return 0.0;
  const double log_r = std::log(std::abs(z));
  if (std::abs(log_r) >= kIdentityLog) return z;
  if (log_r >= 0.0) return exterior(strip_, z);
  return invert(exterior(strip_, invert(z)));
}

double PlaneMapField::distortion(std::complex<double> z) const {
  if (z == 0.0) return 1.0;
  const double log_r = std::log(std::abs(z));
  if (std::abs(log_r) >= kIdentityLog) return 1.0;
  return distortion_at(strip_, strip_point(z));
}

PlaneMapField extend_welding(const CircleHomeo& g, int quad_order) {
  PlaneMapField field(StripMap(g, quad_order));
  for (const double r : {1.1, 2.0, 10.0}) {
    const double y = std::log(r) / kTwoPi;
    const std::complex<double> at0 = field.strip().integral_layer({0.0, y});
    const std::complex<double> at1 = field.strip().integral_layer({1.0, y});
    const std::complex<double> g0 = std::polar(std::exp(kTwoPi * at0.imag()), kTwoPi * at0.real());
    const std::complex<double> g1 = std::polar(std::exp(kTwoPi * at1.imag()), kTwoPi * at1.real());
    if (y < 1.0 && std::abs(g0 - g1) > 1e-8) {
      throw std::domain_error("translation-commutation violated");
    }
  }
  return field;
}

double welding_distortion(const PlaneMapField& field, std::complex<double> z) {
  return field.distortion(z);
}

ShellMax shell_max_distortion(const PlaneMapField& field, double r, int theta_samples) {
  if (theta_samples < 64) throw std::invalid_argument("shell_max_distortion: need >= 64 samples");
  auto k_at = [&](double theta) { return field.distortion(std::polar(r, theta)); };
  const double step = kTwoPi / theta_samples;
  ShellMax best{-1.0, 0.0};
  for (int k = 0; k < theta_samples; ++k) {
    const double v = k_at(step * k);
    if (v > best.value) best = {v, step * k};
  }
  const auto [arg, val] = golden_section_max(k_at, best.theta - step, best.theta + step);
  if (val > best.value) best = {val, arg < 0.0 ? arg + kTwoPi : arg};
  return best;
}

ScalewiseBoundReport verify_scalewise_bound(const PlaneMapField& field,
                                            std::span<const double> radii,
                                            int theta_samples) {
  ScalewiseBoundReport out;
  out.ratio_sup = 0.0;
  out.ratio_inf = std::numeric_limits<double>::infinity();
  for (const double r : radii) {
    if (!(r > 1.0 && std::log(r) < std::numbers::pi / 2)) {
      throw std::invalid_argument("verify_scalewise_bound: radii must lie in (1, e^{pi/2})");
    }
    const double kmax = shell_max_distortion(field, r, theta_samples).value;
    const double rho_g = rho(field.welding(), std::log(r), theta_samples).value;
    out.radii.push_back(r);
    out.k_max.push_back(kmax);
    out.rho.push_back(rho_g);
    out.ratio.push_back(kmax / rho_g);
    out.ratio_sup = std::max(out.ratio_sup, kmax / rho_g);
    out.ratio_inf = std::min(out.ratio_inf, kmax / rho_g);
  }
  return out;
}

HomeomorphismProbe probe_homeomorphism(const PlaneMapField& field, int n, double r_min,
                                       double r_max) {
  if (n < 2 || !(r_min > 0.0) || !(r_max > r_min)) {
    throw std::invalid_argument("probe_homeomorphism: bad grid");
  }
  if (r_min < 1.0 && r_max > 1.0) {
    throw std::invalid_argument("probe_homeomorphism: grid must not straddle the unit circle");
  }
  HomeomorphismProbe probe;
  probe.min_jacobian = std::numeric_limits<double>::infinity();
  std::vector<std::complex<double>> images;
  images.reserve(static_cast<std::size_t>(n) * n);
  for (int i = 0; i < n; ++i) {
    const double r = r_min * std::pow(r_max / r_min, static_cast<double>(i) / (n - 1));
    for (int j = 0; j < n; ++j) {
      const std::complex<double> z = std::polar(r, kTwoPi * j / n);
      images.push_back(field(z));
      const std::complex<double> w = PlaneMapField::strip_point(z);
      const double jac = w.imag() >= 2.0 ? 1.0 : ba_differential(field.strip(), w).determinant();
      probe.min_jacobian = std::min(probe.min_jacobian, jac);
    }
  }
  std::sort(images.begin(), images.end(),
            [](auto a, auto b) { return a.real() < b.real(); });
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < images.size(); ++i) {
    for (std::size_t j = i + 1; j < images.size(); ++j) {
      if (images[j].real() - images[i].real() >= best) break;
      best = std::min(best, std::abs(images[j] - images[i]));
    }
  }
  probe.min_image_separation = best;
  probe.injective = best > 1e-12;
  probe.orientation_preserving = probe.min_jacobian > 0.0;
  return probe;
}

}  // namespace weldlab
