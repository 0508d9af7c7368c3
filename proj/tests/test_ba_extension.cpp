#include <doctest.h>

#include <cmath>
#include <complex>
#include <random>

#include <Eigen/SVD>

#include "weldlab/ba_extension.hpp"

using namespace weldlab;
using cd = std::complex<double>;

namespace {

// Antiderivative of the a = 2 power lift: h = 2u^2 on [0,1/2], u on [1/2,1].
double phi_power2(double u) {
  constexpr double kMean = 11.0 / 24.0;  // int_0^1 h
  const double n = std::floor(u);
  const double v = u - n;
  const double piece = v <= 0.5 ? 2.0 * v * v * v / 3.0 : 1.0 / 12.0 + (v * v - 0.25) / 2.0;
  return n * kMean + n * (n - 1.0) / 2.0 + piece + n * v;
}

cd oracle_power2(cd z) {
  const double x = z.real(), y = z.imag();
  const double re = (phi_power2(x + y) - phi_power2(x - y)) / (2.0 * y);
  const double im = (phi_power2(x + y) - 2.0 * phi_power2(x) + phi_power2(x - y)) / y;
  return {re, im};
}

}  // namespace

TEST_CASE("identity lift extends to the identity") {
  const StripMap H = ba_extend(CircleHomeo::identity());
  CHECK(H.c0() == doctest::Approx(0.0).scale(1.0).epsilon(1e-15));
  for (double y : {0.0, 0.01, 0.5, 0.999, 1.0, 1.5, 2.0, 3.0}) {
    for (double x : {-1.3, 0.0, 0.25, 0.7}) {
      CHECK(std::abs(H(cd(x, y)) - cd(x, y)) <= 1e-12);
    }
  }
}

TEST_CASE("translated lift: closed form of both integrals") {
  const double c = 0.3;
  const StripMap H = ba_extend(CircleHomeo::rotation(c));
  CHECK(H.c0() == doctest::Approx(c).epsilon(1e-13));
  for (double y : {0.05, 0.5, 0.95}) {
    for (double x : {-0.4, 0.1, 0.8}) {
      CHECK(std::abs(H(cd(x, y)) - cd(x + c, y)) <= 1e-10);
    }
  }
  for (double y : {1.0, 1.3, 1.9}) {
    CHECK(std::abs(H(cd(0.2, y)) - (cd(0.2, y) + (2.0 - y) * c)) <= 1e-12);
  }
}

TEST_CASE("power lift matches the antiderivative oracle") {
  const StripMap H = ba_extend(CircleHomeo::power(2.0));
  CHECK(H.c0() == doctest::Approx(-1.0 / 24.0).epsilon(1e-14));
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> ux(-2.0, 2.0), uy(1e-4, 0.999);
  for (int k = 0; k < 500; ++k) {
    const cd z(ux(rng), uy(rng));
    CHECK(std::abs(H(z) - oracle_power2(z)) <= 1e-12);
  }
}

TEST_CASE("quadrature orders 32 and 64 agree") {
  for (double a : {2.0, 3.0}) {
    const StripMap h32 = ba_extend(CircleHomeo::power(a), 32);
    const StripMap h64 = ba_extend(CircleHomeo::power(a), 64);
    CHECK(std::abs(h32(cd(0.0, 0.5)) - h64(cd(0.0, 0.5))) <= 1e-8);
  }
  CHECK_THROWS(ba_extend(CircleHomeo::power(2.0), 8));
}

TEST_CASE("translation equivariance, boundary agreement, layer continuity") {
  for (const auto& h : {CircleHomeo::power(1.5), CircleHomeo::power(3.0), CircleHomeo::log_power(0.5)}) {
    const StripMap H = ba_extend(h);
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> ux(-3.0, 3.0), uy(0.0, 2.5);
    double worst = 0.0;
    for (int k = 0; k < 1000; ++k) {
      const cd z(ux(rng), uy(rng));
      worst = std::max(worst, std::abs(H(z + 1.0) - H(z) - 1.0));
    }
    CHECK(worst <= 1e-9);
    double boundary = 0.0;
    for (int k = 0; k < 1000; ++k) {
      const double x = -1.0 + 3.0 * k / 1000.0;
      boundary = std::max(boundary, std::abs(H(cd(x, 0.0)) - h(x)));
    }
    CHECK(boundary <= 1e-10);
    for (double x : {0.0, 0.3, 0.77}) {
      CHECK(std::abs(H(cd(x, 1.0 - 1e-10)) - cd(x + H.c0(), 1.0)) <= 1e-8);
      CHECK(H(cd(x, 2.0)) == cd(x, 2.0));
      CHECK(std::abs(H.c0()) <= 0.5 + 1e-9);
    }
  }
}

TEST_CASE("differential: identity, shear, step consistency") {
  const StripMap id = ba_extend(CircleHomeo::identity());
  for (double y : {0.1, 0.5, 1.5}) {
    const auto d = ba_differential(id, cd(0.3, y), 1e-5 * std::max(1.0, y));
    CHECK((d - Eigen::Matrix2d::Identity()).cwiseAbs().maxCoeff() <= 1e-9);
  }
  const double c = 0.4;
  const StripMap sh = ba_extend(CircleHomeo::rotation(c));
  Eigen::Matrix2d shear;
  shear << 1.0, -c, 0.0, 1.0;
  for (double y : {1.1, 1.5, 1.9}) {
    CHECK((ba_differential(sh, cd(0.2, y)) - shear).cwiseAbs().maxCoeff() <= 1e-12);
    // finite differences of z + (2 - y)c agree
    const double s = 1e-6;
    const cd dx = (sh(cd(0.2 + s, y)) - sh(cd(0.2 - s, y))) / (2.0 * s);
    const cd dy = (sh(cd(0.2, y + s)) - sh(cd(0.2, y - s))) / (2.0 * s);
    CHECK(std::abs(dx.real() - 1.0) <= 1e-8);
    CHECK(std::abs(dy.real() + c) <= 1e-8);
  }

  const StripMap p = ba_extend(CircleHomeo::power(2.0));
  const auto d4 = ba_differential(p, cd(0.0, 0.5), 1e-4);
  const auto d5 = ba_differential(p, cd(0.0, 0.5), 1e-5);
  const auto exact = ba_differential(p, cd(0.0, 0.5));
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      const double scale = std::max(1e-3, std::abs(exact(i, j)));
      CHECK(std::abs(d4(i, j) - d5(i, j)) <= 5e-4 * scale);
      CHECK(std::abs(d5(i, j) - exact(i, j)) <= 5e-4 * scale);
    }
  }
  CHECK_THROWS_WITH(ba_differential(p, cd(0.0, 0.01), 0.01), "step violates half-plane margin");
}

TEST_CASE("leibniz differential agrees with central differences away from breakpoints") {
  const StripMap p = ba_extend(CircleHomeo::power(1.5));
  for (const cd z : {cd(0.2, 0.13), cd(-0.31, 0.4), cd(0.05, 0.02), cd(0.6, 0.7)}) {
    const auto exact = ba_differential(p, z);
    const auto fd = ba_differential(p, z, 1e-4 * z.imag());
    CHECK((exact - fd).cwiseAbs().maxCoeff() <= 1e-6 * exact.cwiseAbs().maxCoeff());
  }
}

TEST_CASE("distortion: svd oracle, bounds, orientation") {
  const double c = 0.5;
  Eigen::Matrix2d shear;
  shear << 1.0, -c, 0.0, 1.0;
  const Eigen::JacobiSVD<Eigen::Matrix2d> svd(shear);
  const double smax = svd.singularValues()(0);
  CHECK(distortion_of(shear) == doctest::Approx(smax * smax / shear.determinant()).epsilon(1e-13));
  const double closed = std::pow((std::sqrt(c * c + 4.0) + c) / 2.0, 2.0);
  CHECK(distortion_of(shear) == doctest::Approx(closed).epsilon(1e-13));

  Eigen::Matrix2d flip;
  flip << 1.0, 0.0, 0.0, -1.0;
  CHECK_THROWS_WITH(distortion_of(flip), "orientation violation");

  const StripMap p = ba_extend(CircleHomeo::power(3.0));
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> ux(-1.0, 1.0), uy(1e-6, 3.0);
  for (int k = 0; k < 2000; ++k) {
    const cd z(ux(rng), uy(rng));
    const double kk = distortion_at(p, z);
    CHECK(kk >= 1.0 - 1e-9);
    if (z.imag() >= 2.0) CHECK(kk == 1.0);
  }
}

TEST_CASE("strip distortion over the lift's scalewise distortion stays within 2x across scales") {
  for (double a : {1.5, 2.0, 3.0}) {
    const auto h = CircleHomeo::power(a);
    const StripMap p = ba_extend(h);
    double lo = 1e300, hi = 0.0;
    for (int k = 3; k <= 10; ++k) {
      const double y = std::ldexp(1.0, -k);
      double kmax = 0.0;
      for (int i = 0; i < 512; ++i) kmax = std::max(kmax, distortion_at(p, cd(i / 512.0, y)));
      const double ratio = kmax / rho_lift(h, y, 1024).value;
      lo = std::min(lo, ratio);
      hi = std::max(hi, ratio);
    }
    MESSAGE("a = " << a << ": K/rho in [" << lo << ", " << hi << "]");
    CHECK(hi / lo < 2.0);
  }
}
