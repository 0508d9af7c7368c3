#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "weldlab/circle_homeo.hpp"

using namespace weldlab;
using std::numbers::pi;

namespace {

// Independent chordal-ratio oracle from a lift given as a callable.
template <class H>
double delta_oracle(H h, double theta, double t) {
  auto g = [&](double a) { return std::polar(1.0, 2.0 * pi * h(a / (2.0 * pi))); };
  const auto p0 = g(theta), pp = g(theta + t), pm = g(theta - t);
  const double a = std::abs(pp - p0), b = std::abs(p0 - pm);
  return std::max(a / b, b / a);
}

double power_lift(double a, double x) {
  const double fl = std::floor(x);
  const double u = x - fl;
  return fl + (u <= 0.5 ? std::pow(2.0, a - 1.0) * std::pow(u, a) : u);
}

}  // namespace

TEST_CASE("model homeomorphisms: closed forms and validation") {
  CHECK(CircleHomeo::identity()(0.37) == 0.37);
  const auto rot = build_model_homeo(HomeoFamily::rotation, std::vector{0.25});
  CHECK(rot(0.5) == doctest::Approx(0.75));

  const auto p2 = build_model_homeo(HomeoFamily::power, std::vector{2.0});
  CHECK(p2(0.25) == doctest::Approx(2.0 * 0.0625).epsilon(1e-15));
  CHECK(p2(0.5) == doctest::Approx(0.5 * 0.5 * 2.0).epsilon(1e-15));
  CHECK(p2(0.0) == 0.0);

  // brute-force monotonicity scan on [0, 2]
  for (double a : {0.5, 1.5, 2.0, 3.0}) {
    const auto h = CircleHomeo::power(a);
    double prev = h(0.0);
    bool increasing = true;
    double commute = 0.0;
    for (int k = 1; k <= 10000; ++k) {
      const double x = 2.0 * k / 10000.0;
      const double v = h(x);
      increasing = increasing && v > prev;
      prev = v;
      commute = std::max(commute, std::abs(h(x + 1.0) - h(x) - 1.0));
    }
    CHECK(increasing);
    CHECK(commute <= 1e-12);
  }

  CHECK_THROWS(CircleHomeo::power(0.0));
  CHECK_THROWS(CircleHomeo::power(-1.0));
  std::vector<double> bad(256);
  for (int k = 0; k < 256; ++k) bad[k] = k / 256.0;
  bad[100] = bad[99];
  CHECK_THROWS(CircleHomeo::table(bad));
  CHECK_THROWS(CircleHomeo::table(std::vector<double>{0.0, 0.5}));
}

TEST_CASE("table lift interpolates linearly and closes at 1") {
  std::vector<double> v(256);
  for (int k = 0; k < 256; ++k) v[k] = power_lift(2.0, k / 256.0);
  const auto h = CircleHomeo::table(v);
  CHECK(h(0.0) == 0.0);
  CHECK(h(1.0) == doctest::Approx(1.0));
  const double x = 10.5 / 256.0;
  CHECK(h(x) == doctest::Approx(0.5 * (v[10] + v[11])).epsilon(1e-15));
  CHECK(h(x + 3.0) == doctest::Approx(h(x) + 3.0).epsilon(1e-14));
  CHECK(h.piecewise_linear());
}

TEST_CASE("delta is 1 for identity and rotations") {
  const auto id = CircleHomeo::identity();
  const auto rot = CircleHomeo::rotation(0.3);
  for (double theta : {0.0, 1.0, 4.0}) {
    for (double t : {1e-3, 0.1, 1.5}) {
      CHECK(std::abs(delta(id, theta, t) - 1.0) <= 1e-12);
      CHECK(std::abs(delta(rot, theta, t) - 1.0) <= 1e-12);
    }
  }
  CHECK(std::abs(rho(id, 0.1, 256).value - 1.0) <= 1e-12);
  CHECK(std::abs(rho(rot, 0.1, 256).value - 1.0) <= 1e-12);
}

TEST_CASE("delta of the power lift matches the direct evaluation oracle") {
  const auto h = CircleHomeo::power(2.0);
  for (double theta : {0.0, 0.4, 2.0, 6.0}) {
    for (double t : {0.01, 0.2}) {
      const double oracle = delta_oracle([](double x) { return power_lift(2.0, x); }, theta, t);
      CHECK(delta(h, theta, t) == doctest::Approx(oracle).epsilon(1e-10));
    }
  }
}

TEST_CASE("delta properties: lower bound, periodicity, domain") {
  const auto h = CircleHomeo::power(1.5);
  for (int k = 0; k < 200; ++k) {
    const double theta = 0.031 * k;
    const double t = 1e-3 + 0.007 * k;
    const double d = delta(h, theta, t);
    CHECK(d >= 1.0);
    CHECK(std::abs(delta(h, theta + 2.0 * pi, t) - d) <= 1e-12 * d);
  }
  CHECK_THROWS(delta(h, 0.0, 0.0));
  CHECK_THROWS(delta(h, 0.0, pi / 2.0));
}

TEST_CASE("rho is invariant under post-rotation") {
  // chord lengths of h and h + c agree, so the oracle maxima agree
  const double c = 0.137;
  for (double t : {0.05, 0.3}) {
    double m0 = 0.0, m1 = 0.0;
    for (int k = 0; k < 512; ++k) {
      const double theta = 2.0 * pi * k / 512;
      m0 = std::max(m0, delta_oracle([](double x) { return power_lift(2.0, x); }, theta, t));
      m1 = std::max(m1, delta_oracle([&](double x) { return power_lift(2.0, x) + c; }, theta, t));
    }
    CHECK(std::abs(m0 - m1) <= 1e-10 * m0);
    CHECK(rho(CircleHomeo::power(2.0), t, 512, false).value == doctest::Approx(m0).epsilon(1e-12));
  }
}

TEST_CASE("rho grid refinement never decreases on nested grids") {
  const auto h = CircleHomeo::power(2.5);
  for (double t : {0.01, 0.1, 0.7}) {
    double prev = 0.0;
    for (int n : {64, 128, 256, 512, 1024}) {
      const double v = rho(h, t, n, false).value;
      CHECK(v >= prev);
      prev = v;
    }
    CHECK(rho(h, t, 1024, true).value >= prev);
  }
  CHECK_THROWS(rho(h, 0.1, 32));
}

TEST_CASE("rho slope of the power lift is a - 1") {
  const auto h = CircleHomeo::power(2.0);
  std::vector<double> lt, lr;
  for (double t : {1e-1, 1e-2, 1e-3}) {
    lt.push_back(std::log(t));
    lr.push_back(std::log(rho(h, t, 1024).value));
  }
  // least squares slope of log rho vs log t
  const double mx = (lt[0] + lt[1] + lt[2]) / 3.0, my = (lr[0] + lr[1] + lr[2]) / 3.0;
  double sxy = 0.0, sxx = 0.0;
  for (int k = 0; k < 3; ++k) {
    sxy += (lt[k] - mx) * (lr[k] - my);
    sxx += (lt[k] - mx) * (lt[k] - mx);
  }
  const double growth = -sxy / sxx;
  CHECK(growth == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("scalewise profile values are at least 1") {
  const std::vector<double> ts{0.5, 0.1, 0.01};
  const auto prof = scalewise_profile(CircleHomeo::log_power(1.0), ts, 256);
  REQUIRE(prof.rho_values.size() == 3);
  for (double v : prof.rho_values) CHECK(v >= 1.0);
}

TEST_CASE("json round trip and unknown keys") {
  for (const auto& h : {CircleHomeo::power(2.0), CircleHomeo::rotation(0.2), CircleHomeo::log_power(0.5)}) {
    nlohmann::json j = h;
    CircleHomeo back;
    from_json(j, back);
    CHECK(back(0.123) == h(0.123));
  }
  std::vector<double> v(300);
  for (int k = 0; k < 300; ++k) v[k] = power_lift(1.5, k / 300.0);
  nlohmann::json jt = CircleHomeo::table(v);
  CHECK(jt.contains("table"));
  CircleHomeo back;
  from_json(jt, back);
  CHECK(back(0.4567) == doctest::Approx(CircleHomeo::table(v)(0.4567)).epsilon(1e-15));
  nlohmann::json bad = {{"family", "power"}, {"params", {2.0}}, {"extra", 1}};
  CHECK_THROWS(from_json(bad, back));
}
