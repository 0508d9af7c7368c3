#include <doctest.h>

#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <random>
#include <vector>

#include "weldlab/distortion_analysis.hpp"

using namespace weldlab;
using cd = std::complex<double>;

namespace {
constexpr double kPi = std::numbers::pi;

DistortionProfile synthetic_profile(double alpha, double scale) {
  DistortionProfile p;
  p.r_grid = dyadic_radii(2, 12);
  for (double r : p.r_grid) p.k_max.push_back(scale * std::pow(r - 1.0, -alpha));
  return p;
}
}  // namespace

TEST_CASE("exponent fit recovers an exact power law") {
  for (double alpha : {0.25, 1.0, 2.0}) {
    const ExponentFit fit = fit_radial_exponent(synthetic_profile(alpha, 1.0));
    CHECK(fit.alpha == doctest::Approx(alpha).epsilon(1e-6));
    CHECK(fit.residual <= 1e-9);
    CHECK_FALSE(fit.constant_profile);
  }
  DistortionProfile flat;
  flat.r_grid = dyadic_radii(2, 12);
  flat.k_max.assign(flat.r_grid.size(), 3.0);
  const ExponentFit f = fit_radial_exponent(flat);
  CHECK(f.constant_profile);
  CHECK(f.alpha == 0.0);

  DistortionProfile short_span;
  short_span.r_grid = dyadic_radii(2, 6);
  short_span.k_max.assign(short_span.r_grid.size(), 2.0);
  CHECK_THROWS(fit_radial_exponent(short_span));
}

TEST_CASE("constant field integrates to the annulus area") {
  const AnnulusFamily annuli{0.125, 0.5, 6};
  const std::vector<double> ps{0.5, 2.0};
  const std::vector<double> lambdas{0.3};
  const DistortionField k3 = [](cd) { return 3.0; };
  const IntegrabilityReport rep = integrability_report(k3, ps, lambdas, annuli, 0.0);
  const double r_out = annuli.outer(0), r_in = annuli.inner(annuli.count - 1);
  const double area = kPi * (r_out * r_out - r_in * r_in);
  CHECK(rep.p_trends[0].total == doctest::Approx(std::pow(3.0, 0.5) * area).epsilon(1e-8));
  CHECK(rep.p_trends[1].total == doctest::Approx(9.0 * area).epsilon(1e-8));
  CHECK(rep.lambda_trends[0].total == doctest::Approx(std::exp(0.9) * area).epsilon(1e-8));
  for (int k = 0; k < annuli.count; ++k) {
    const double ro = annuli.outer(k), ri = annuli.inner(k);
    CHECK(rep.p_trends[1].increments[k] == doctest::Approx(9.0 * kPi * (ro * ro - ri * ri)).epsilon(1e-8));
  }
  CHECK(rep.p_trends[0].verdict == TailVerdict::converging);
  CHECK(rep.p_trends[0].decay_exponent == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("radial power singularity: p below and above 1/alpha") {
  // K = (r - 1)^-2: int K^p converges near the circle iff 2p < 1.
  const DistortionField k = [](cd z) { return std::max(1.0, std::pow(std::abs(z) - 1.0, -2.0)); };
  const AnnulusFamily annuli{0.125, 0.5, 10};
  const std::vector<double> ps{0.4, 0.6};
  const IntegrabilityReport rep = integrability_report(k, ps, {}, annuli, 2.0);
  CHECK(rep.p_trends[0].verdict == TailVerdict::converging);
  CHECK(rep.p_trends[1].verdict == TailVerdict::diverging);
  CHECK(rep.p_trends[0].decay_exponent == doctest::Approx(0.2).epsilon(0.05));
  CHECK(rep.p_trends[1].decay_exponent == doctest::Approx(-0.2).epsilon(0.05));
  CHECK(*rep.p_trends[0].model_exponent == doctest::Approx(0.2));
  // A radial field equals its own majorant.
  CHECK(rep.p_trends_majorant[0].total == doctest::Approx(rep.p_trends[0].total).epsilon(1e-5));
}

TEST_CASE("angular concentration: field integrable where the majorant is not") {
  // K = 1 + (r - 1)^-1 on a sector of angular width (r - 1), 1 elsewhere.
  const DistortionField k = [](cd z) {
    const double e = std::abs(z) - 1.0;
    return std::abs(std::arg(z)) < e ? 1.0 + 1.0 / e : 1.0;
  };
  const AnnulusFamily annuli{0.125, 0.5, 8};
  const std::vector<double> ps{1.5};
  IntegrationOptions opts;
  opts.theta_tolerance = 1e-9;
  opts.theta_initial_panels = 4096;
  const IntegrabilityReport rep = integrability_report(k, ps, {}, annuli, 1.0, opts);
  CHECK(rep.p_trends_majorant[0].verdict == TailVerdict::diverging);
  CHECK(rep.p_trends[0].verdict == TailVerdict::converging);
}

TEST_CASE("classification formulas") {
  const Classification log_law = classify_from_rho(RhoModelKind::log_law);
  CHECK(log_law.exp_integrable);
  CHECK(log_law.label == "exp-integrable");
  const Classification p = classify_from_rho(RhoModelKind::power_law, 0.5);
  CHECK(p.label == "p-integrable");
  CHECK(p.p_upper == doctest::Approx(2.0));
  CHECK_FALSE(p.exp_integrable);
  const Classification b = classify_from_rho(RhoModelKind::power_law, 0.0);
  CHECK(b.label == "bounded distortion");
  CHECK(std::isinf(b.p_upper));

  CHECK(welding_exponent_from_three_point(std::sqrt(0.5)) == doctest::Approx(2.0));
  CHECK(p_upper_from_three_point(std::sqrt(0.5)) == doctest::Approx(0.5));
  CHECK_THROWS(p_upper_from_three_point(1.0));
  CHECK_THROWS(welding_exponent_from_three_point(0.0));

  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> us(0.01, 0.99);
  for (int i = 0; i < 1000; ++i) {
    const double s = us(rng);
    const double a = welding_exponent_from_three_point(s);
    CHECK(p_upper_from_three_point(s) * a == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(classify_from_rho(RhoModelKind::power_law, a).p_upper ==
          doctest::Approx(p_upper_from_three_point(s)).epsilon(1e-12));
  }
}

TEST_CASE("power welding: radial exponent tracks a - 1") {
  for (double a : {1.5, 2.0, 3.0}) {
    const PlaneMapField f = extend_welding(CircleHomeo::power(a));
    const ExponentFit fit = fit_radial_exponent(radial_profile(f, dyadic_radii(3, 10), 512));
    MESSAGE("a = " << a << ": alpha = " << fit.alpha);
    CHECK(fit.alpha == doctest::Approx(a - 1.0).epsilon(0.1));
  }
  const PlaneMapField id = extend_welding(CircleHomeo::identity());
  CHECK(fit_radial_exponent(radial_profile(id, dyadic_radii(3, 10), 128)).constant_profile);
}
