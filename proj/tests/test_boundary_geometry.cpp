#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "weldlab/boundary_geometry.hpp"

using namespace weldlab;

namespace {

// Arc diameter by brute force over the vertices of the forward arc i..j.
double brute_arc_diameter(const JordanCurve& c, int i, int j) {
  const int len = (c.wrap(j - i)) + 1;
  double best = 0.0;
  for (int a = 0; a < len; ++a)
    for (int b = a + 1; b < len; ++b) best = std::max(best, (c.vertex(i + a) - c.vertex(i + b)).norm());
  return best;
}

// Exponent of m against d for pairs (x, kappa x^{1/s}), (x, -kappa x^{1/s})
// on the continuous cusp model, where the short arc runs through the tip.
double cusp_model_exponent(double s, double kappa) {
  std::vector<double> ld, lm;
  for (int k = 0; k <= 40; ++k) {
    const double x = std::pow(10.0, -3.0 + 2.0 * k / 40.0);
    const double y = kappa * std::pow(x, 1.0 / s);
    const double d = 2.0 * y;
    double m = 0.0;  // diameter of the tip arc: sup over flank points
    for (int i = 0; i <= 400; ++i) {
      const double u = x * i / 400.0;
      const double v = kappa * std::pow(u, 1.0 / s);
      m = std::max({m, std::hypot(x - u, y + v), std::hypot(x - u, y - v)});
    }
    ld.push_back(std::log(d));
    lm.push_back(std::log(m));
  }
  const double n = static_cast<double>(ld.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < ld.size(); ++i) {
    sx += ld[i];
    sy += lm[i];
    sxx += ld[i] * ld[i];
    sxy += ld[i] * lm[i];
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace

TEST_CASE("pair measure is symmetric and matches brute force") {
  const JordanCurve c = make_domain({DomainFamily::interior_cusp}, 256);
  std::mt19937_64 rng(1);
  std::uniform_int_distribution<int> ui(0, c.size() - 1);
  for (int k = 0; k < 200; ++k) {
    const int i = ui(rng), j = ui(rng);
    if (i == j) continue;
    const PairMeasure a = pair_measure(c, i, j), b = pair_measure(c, j, i);
    CHECK(a.d == b.d);
    CHECK(a.m == b.m);
    CHECK(a.d == doctest::Approx((c.vertex(i) - c.vertex(j)).norm()));
    const double m = std::min(brute_arc_diameter(c, i, j), brute_arc_diameter(c, j, i));
    CHECK(a.m == doctest::Approx(m).epsilon(1e-14));
  }
}

TEST_CASE("circle envelope is linear with constant 1") {
  const JordanCurve disk = make_domain({DomainFamily::disk}, 256);
  const Envelope env = three_point_envelope(disk, 10000);
  CHECK(env.max_ratio <= 1.0 + 1e-12);
  CHECK(env.max_ratio >= 0.98);
  CHECK(env.fit.psi.family() == ControlFamily::linear);
  CHECK(env.fit.psi.c() == doctest::Approx(1.0).epsilon(0.02));
  for (const PairMeasure& p : env.pairs) CHECK(p.m <= disk.diameter() + 1e-12);
  CHECK_THROWS(three_point_envelope(disk, 10));
}

TEST_CASE("square envelope is linear") {
  const Envelope env = three_point_envelope(make_domain({DomainFamily::square}, 256), 4000);
  CHECK(env.fit.psi.family() == ControlFamily::linear);
  CHECK(env.max_ratio <= std::sqrt(2.0) + 1e-12);
  CHECK(env.max_ratio >= 1.0);
}

TEST_CASE("cusp envelopes follow the cusp model exponent") {
  const double oracle = cusp_model_exponent(0.5, 0.5);
  MESSAGE("model exponent " << oracle);
  CHECK(oracle == doctest::Approx(0.5).epsilon(0.02));
  for (DomainFamily fam : {DomainFamily::interior_cusp, DomainFamily::exterior_cusp}) {
    const Envelope env = three_point_envelope(make_domain({fam}, 1024), 4000);
    REQUIRE(env.fit.psi.family() == ControlFamily::power);
    CHECK(env.fit.psi.exponent() == doctest::Approx(oracle).epsilon(0.1));
  }
}

TEST_CASE("envelope fit recovers synthetic families") {
  std::vector<double> d, lin, pw;
  for (int k = 0; k < 50; ++k) {
    const double t = std::pow(10.0, -5.0 + 4.0 * k / 49.0);
    d.push_back(t);
    lin.push_back(3.0 * t);
    pw.push_back(2.0 * std::pow(t, 0.6));
  }
  const EnvelopeFit a = fit_envelope(d, lin);
  CHECK(a.psi.family() == ControlFamily::linear);
  CHECK(a.psi.c() == doctest::Approx(3.0).epsilon(1e-10));
  const EnvelopeFit b = fit_envelope(d, pw);
  CHECK(b.psi.family() == ControlFamily::power);
  CHECK(b.psi.exponent() == doctest::Approx(0.6).epsilon(1e-10));
  CHECK(b.psi.c() == doctest::Approx(2.0).epsilon(1e-8));
}

TEST_CASE("lc checks") {
  const JordanCurve disk = make_domain({DomainFamily::disk}, 256);
  CHECK(lc_check(disk, Side::interior, ControlFunction::linear(2.0), 128, 40).pass_fraction == 1.0);

  const JordanCurve cusp = make_domain({DomainFamily::interior_cusp}, 1024);
  const LcReport one = lc_check(cusp, Side::interior, ControlFunction::linear(1.0), 256, 80);
  const LcReport two = lc_check(cusp, Side::interior, ControlFunction::linear(2.0), 256, 80);
  CHECK(one.pass_fraction < 1.0);
  CHECK_FALSE(one.worst.pass);
  CHECK(one.worst.feature);
  CHECK(two.pass_fraction >= one.pass_fraction);

  const LcReport outside = lc_check(cusp, Side::exterior, ControlFunction::linear(2.0), 256, 80);
  CHECK(outside.pass_fraction == 1.0);

  const LcReport lc2 = lc_check(disk, Side::interior, ControlFunction::linear(0.5), 128, 40, 42, LcKind::lc2);
  CHECK(lc2.pass_fraction == 1.0);
}

TEST_CASE("duality on quasidisks and cusps") {
  DualityOptions opts;
  opts.pair_samples = 2000;
  opts.probe_count = 80;
  for (DomainFamily fam : {DomainFamily::disk, DomainFamily::square}) {
    const DualityReport r = duality_check(make_domain({fam}, 256), ControlFunction::linear(1.0), opts);
    CHECK(r.three_point);
    CHECK(r.direction_a);
    CHECK(r.direction_b);
    CHECK(r.kappa_a <= 8.0);
    CHECK(r.kappa_b <= 8.0);
  }
  const JordanCurve cusp = make_domain({DomainFamily::interior_cusp}, 1024);
  const DualityReport lin = duality_check(cusp, ControlFunction::linear(1.0), opts);
  CHECK_FALSE(lin.three_point);
  const DualityReport matched = duality_check(cusp, ControlFunction::power(0.5), opts);
  CHECK(matched.three_point);
  CHECK(matched.direction_a);
  CHECK(matched.direction_b);
}

TEST_CASE("internal distance") {
  const JordanCurve disk = make_domain({DomainFamily::disk}, 256);
  CHECK(internal_distance(disk, Side::interior, {-0.5, 0.0}, {0.5, 0.0}, 256) == doctest::Approx(1.0).epsilon(0.02));
  const JordanCurve sq = make_domain({DomainFamily::square}, 256);
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(-0.4, 0.4);
  for (int k = 0; k < 10; ++k) {
    const Point a(u(rng), u(rng)), b(u(rng), u(rng));
    const double di = internal_distance(sq, Side::interior, a, b, 128);
    CHECK(di >= (a - b).norm());
    CHECK(di <= (a - b).norm() + 4.0 * 1.5 / 128);
  }
  // opposite flanks of the horn: the path must go around the tip
  const JordanCurve cusp = make_domain({DomainFamily::interior_cusp}, 1024);
  const Point a(0.6, 0.5 * 0.36 + 0.05), b(0.6, -0.5 * 0.36 - 0.05);
  const double around = internal_distance(cusp, Side::interior, a, b, 256);
  // any such path contains a, b and a point near the tip
  const double through_tip = std::max((a - b).norm(), a.norm());
  CHECK(around >= through_tip - 2.0 * 2.5 / 256);
  CHECK(around <= through_tip * 1.1);
  CHECK(around >= 1.3 * (a - b).norm());
  CHECK_THROWS(internal_distance(cusp, Side::interior, {0.6, 0.0}, b, 256));
}

TEST_CASE("reports serialize") {
  const JordanCurve disk = make_domain({DomainFamily::disk}, 128);
  const nlohmann::json env = three_point_envelope(disk, 1000);
  CHECK(env.contains("fit"));
  const nlohmann::json lc = lc_check(disk, Side::exterior, ControlFunction::linear(2.0), 64, 8);
  CHECK(lc.at("side") == "exterior");
}
